#include "support.hpp"

#include "polarlab/codec.hpp"
#include "polarlab/entropy.hpp"
#include "polarlab/errors.hpp"
#include "polarlab/kernelscope.hpp"

#include <doctest.h>

#include <chrono>
#include <cmath>

using namespace polarlab;

namespace {

Matrix arikan()
{
	return Matrix::from_rows(Field(2), {{1, 0}, {1, 1}});
}

Channel random_channel(std::uint32_t q, std::size_t outputs, Rng &rng)
{
	std::vector<std::vector<double>> w(q, std::vector<double>(outputs));
	for (auto &row : w) {
		double total = 0.0;
		for (auto &p : row)
			total += p = 0.05 + uniform01(rng);
		for (auto &p : row)
			p /= total;
	}
	return Channel::unchecked(Field(q), w);
}

// Leaf posteriors of successive cancellation by summing the channel law over
// every completion u_{>i}, with u_{<i} fixed to the earlier decisions.
std::vector<double> brute_sc_posteriors(const PolarCode &code, const Channel &ch, const std::vector<std::size_t> &y,
                                        const Vec &decided)
{
	const std::size_t n = code.n;
	const std::uint32_t q = code.kernel.q();
	const std::uint64_t words = checked_pow(q, unsigned(n));
	std::vector<double> post(n * q, 0.0);
	Vec u(n);
	for (std::uint64_t idx = 0; idx < words; ++idx) {
		index_to_digits(idx, q, u);
		Vec x = testkit::dense_tensor_product(code.kernel_inverse, code.t, u);
		double p = 1.0;
		for (std::size_t i = 0; i < n; ++i)
			p *= ch.prob(y[i], x[i]);
		// Contributes to leaf i for every prefix that agrees with the decisions.
		for (std::size_t i = 0; i < n; ++i) {
			post[i * q + u[i]] += p;
			if (u[i] != decided[i])
				break;
		}
	}
	for (std::size_t i = 0; i < n; ++i) {
		double s = 0.0;
		for (std::uint32_t a = 0; a < q; ++a)
			s += post[i * q + a];
		for (std::uint32_t a = 0; a < q; ++a)
			post[i * q + a] = s > 0 ? post[i * q + a] / s : 1.0 / q;
	}
	return post;
}

} // namespace

TEST_CASE("construction examples")
{
	auto tiny = construct_code(arikan(), make_erasure(2, 0.5), 1, CodeTarget::with_rate(0.5));
	CHECK(tiny.info == std::vector<std::size_t>{1});
	CHECK(tiny.frozen == std::vector<std::size_t>{0});
	CHECK(tiny.estimator == "exact-erasure-tree");
	CHECK(tiny.reliability[0] == doctest::Approx(0.75));
	CHECK(tiny.reliability[1] == doctest::Approx(0.25));

	auto clean = construct_code(arikan(), make_qsc(2, 0.0), 3, CodeTarget::with_threshold(0.0));
	CHECK(clean.estimator == "noiseless");
	CHECK(clean.frozen.empty());
	CHECK(clean.message_length() == 8);

	auto big = construct_code(arikan(), make_erasure(2, 0.3), 10, CodeTarget::with_rate(0.6));
	CHECK(big.n == 1024);
	CHECK(big.frozen.size() == 410);
	CHECK(big.info.size() == 614);
	// Every frozen index is at least as unreliable as every information index.
	double worst_info = 0.0, best_frozen = 1.0;
	for (auto i : big.info)
		worst_info = std::max(worst_info, big.reliability[i]);
	for (auto i : big.frozen)
		best_frozen = std::min(best_frozen, big.reliability[i]);
	CHECK(worst_info <= best_frozen);

	auto thr = construct_code(arikan(), make_erasure(2, 0.3), 6, CodeTarget::with_threshold(1e-3));
	for (auto i : thr.info)
		CHECK(thr.reliability[i] <= 1e-3);
	for (auto i : thr.frozen)
		CHECK(thr.reliability[i] > 1e-3);

	CHECK(info_size_for_rate(0.6, 1024) == 614);
	CHECK(info_size_for_rate(0.5, 2) == 1);
	CHECK_THROWS_AS(info_size_for_rate(1.5, 4), DomainError);

	CHECK_THROWS_AS(construct_code(Matrix::identity(Field(2), 2), make_erasure(2, 0.3), 2, CodeTarget::with_rate(0.5)),
	                DomainError);
	CHECK_THROWS_AS(construct_code(arikan(), make_erasure(3, 0.3), 2, CodeTarget::with_rate(0.5)), DimensionError);
	auto z = Channel::unchecked(Field(2), {{1.0, 0.0}, {0.3, 0.7}});
	CHECK_THROWS_AS(construct_code(arikan(), z, 2, CodeTarget::with_rate(0.5)), DomainError);

	ConstructOptions small;
	small.budget = 100;
	CHECK_THROWS_AS(construct_code(arikan(), make_erasure(2, 0.3), 8, CodeTarget::with_rate(0.5), small),
	                BudgetExceeded);
}

TEST_CASE("genie construction on a symmetric channel")
{
	ConstructOptions opts;
	opts.genie_trials = 2000;
	auto a = construct_code(arikan(), make_qsc(2, 0.1), 4, CodeTarget::with_rate(0.5), opts);
	CHECK(a.estimator == "genie-monte-carlo");
	opts.workers = 3;
	auto b = construct_code(arikan(), make_qsc(2, 0.1), 4, CodeTarget::with_rate(0.5), opts);
	CHECK(a.frozen == b.frozen);
	CHECK(a.frozen_values == b.frozen_values);
	CHECK(a.reliability == b.reliability);
	opts.zero_frozen = true;
	auto c = construct_code(arikan(), make_qsc(2, 0.1), 4, CodeTarget::with_rate(0.5), opts);
	CHECK(c.frozen_values == Vec(16, 0));
}

TEST_CASE("encoding")
{
	auto code = make_code(arikan(), 1, {0}, {0});
	CHECK(encode(code, Vec{1}) == Vec{1, 1});
	CHECK(encode(code, Vec{0}) == Vec{0, 0});

	auto frozen = make_code(arikan(), 3, {0, 1, 2, 3, 4, 5, 6, 7}, Vec(8, 0));
	CHECK(encode(frozen, Vec{}) == Vec(8, 0));

	CHECK_THROWS_AS(encode(code, Vec{1, 0}), DimensionError);
	CHECK_THROWS_AS(encode(code, Vec{2}), DomainError);
	CHECK_THROWS_AS(make_code(arikan(), 1, {0, 0}, {0, 0}), DomainError);
	CHECK_THROWS_AS(make_code(arikan(), 1, {2}, {0}), DomainError);

	Rng rng = stream(61, 0);
	for (int trial = 0; trial < 20; ++trial) {
		std::uint32_t q = trial % 2 ? 3 : 2;
		std::size_t k = 2 + trial % 2;
		Matrix m = testkit::random_mixing(Field(q), k, rng);
		unsigned t = 3;
		auto c = make_code(m, t, {}, {});
		Vec msg(c.n);
		for (auto &e : msg)
			e = static_cast<Elem>(uniform_below(rng, q));
		Vec x = encode(c, msg);
		CHECK(testkit::dense_tensor_product(m, t, x) == msg);
		CHECK(x == testkit::dense_tensor_product(c.kernel_inverse, t, msg));
	}
}

TEST_CASE("noiseless channels decode every message")
{
	struct Case
	{
		Matrix kernel;
		unsigned t;
	};
	Rng rng = stream(62, 0);
	std::vector<Case> cases{{arikan(), 3}, {testkit::random_mixing(Field(3), 3, rng), 2},
	                        {testkit::random_mixing(Field(2), 3, rng), 2}, {hamming7_kernel(), 1}};
	for (const auto &c : cases) {
		const std::uint32_t q = c.kernel.q();
		Channel clean = make_qsc(q, 0.0);
		auto code = make_code(c.kernel, c.t, {}, {});
		ScDecoder dec(code, clean);
		const std::uint64_t total = checked_pow(q, unsigned(code.n));
		Vec msg(code.n);
		for (std::uint64_t idx = 0; idx < total; ++idx) {
			index_to_digits(idx, q, msg);
			Vec x = encode(code, msg);
			std::vector<std::size_t> y(x.begin(), x.end());
			auto res = dec.decode(y);
			REQUIRE(res.message == msg);
		}
	}
}

TEST_CASE("decoder posteriors match exhaustive successive cancellation")
{
	Rng rng = stream(63, 0);
	for (int trial = 0; trial < 24; ++trial) {
		std::uint32_t q = trial % 3 == 2 ? 3 : 2;
		Matrix m = q == 3 ? testkit::random_mixing(Field(3), 2, rng)
		                  : testkit::random_mixing(Field(2), 2 + trial % 2, rng);
		unsigned t = q == 3 ? 2 : (m.rows() == 2 ? 3 : 2);
		Channel ch = random_channel(q, 2 + uniform_below(rng, 3), rng);
		std::vector<std::size_t> frozen;
		Vec values;
		auto n = checked_pow(m.rows(), t);
		for (std::size_t i = 0; i < n; ++i)
			if (uniform_below(rng, 3) == 0) {
				frozen.push_back(i);
				values.push_back(static_cast<Elem>(uniform_below(rng, q)));
			}
		auto code = make_code(m, t, frozen, values);
		std::vector<std::size_t> y(code.n);
		for (auto &s : y)
			s = uniform_below(rng, ch.outputs());
		ScDecoder dec(code, ch);
		auto res = dec.decode(y, true);
		auto brute = brute_sc_posteriors(code, ch, y, res.u);
		for (std::size_t i = 0; i < brute.size(); ++i)
			CHECK(std::abs(res.posteriors[i] - brute[i]) < 1e-9);
		for (auto i : code.frozen)
			CHECK(res.u[i] == code.frozen_values[i]);
	}
}

TEST_CASE("erasures at one level follow the determinacy rule")
{
	Rng rng = stream(64, 0);
	for (int trial = 0; trial < 10; ++trial) {
		std::uint32_t q = trial % 2 ? 3 : 2;
		Matrix m = testkit::random_mixing(Field(q), 3 + trial % 2, rng);
		auto code = make_code(m, 1, {}, {});
		Channel ch = make_erasure(q, 0.5);
		ScDecoder dec(code, ch);
		for (std::uint64_t mask = 0; mask < (1u << m.rows()); ++mask) {
			Vec u(code.n);
			for (auto &e : u)
				e = static_cast<Elem>(uniform_below(rng, q));
			Vec x = encode(code, u);
			std::vector<std::size_t> y(x.begin(), x.end());
			for (std::size_t i = 0; i < code.n; ++i)
				if (mask >> i & 1)
					y[i] = ch.erasure_symbol();
			std::vector<std::uint8_t> errors;
			dec.genie(y, u, errors);
			for (std::size_t j = 0; j < code.n; ++j)
				CHECK(bool(errors[j]) == !output_determined(m, mask, j));
		}
	}
}

TEST_CASE("genie error frequencies track the erasure tree")
{
	const double z = 0.3;
	const unsigned t = 4;
	const std::size_t trials = 20000;
	auto est = genie_error_rates(arikan(), t, make_erasure(2, z), trials, 7, 4);
	auto exact = evolve_tree(erasure_polynomials(arikan()), z, t).values;
	for (std::size_t i = 0; i < exact.size(); ++i) {
		double sigma = std::sqrt(exact[i] * (1 - exact[i]) / double(trials));
		CHECK(std::abs(est.rates()[i] - exact[i]) <= 3 * sigma + 1e-12);
	}
	CHECK(genie_error_rates(arikan(), t, make_erasure(2, z), 500, 7, 1).errors ==
	      genie_error_rates(arikan(), t, make_erasure(2, z), 500, 7, 5).errors);
}

TEST_CASE("single-symbol kernel decodes as the MAP predictor")
{
	Rng rng = stream(65, 0);
	for (int trial = 0; trial < 30; ++trial) {
		std::uint32_t q = std::vector<std::uint32_t>{2, 3, 5}[trial % 3];
		const Field f(q);
		Elem a = static_cast<Elem>(1 + uniform_below(rng, q - 1));
		Matrix m = Matrix::from_rows(f, {{a}});
		Channel ch = random_channel(q, 4, rng);
		// u = x·a, so P(u, y) = W(y | u·a⁻¹) / q.
		std::vector<double> joint(q * 4);
		for (Elem u = 0; u < q; ++u)
			for (std::size_t y = 0; y < 4; ++y)
				joint[u * 4 + y] = ch.prob(y, f.mul(u, f.inv(a))) / q;
		auto pred = map_predictor(SymbolJoint(f, 4, joint));
		auto code = make_code(m, 1, {}, {});
		for (std::size_t y = 0; y < 4; ++y)
			CHECK(sc_decode(code, ch, std::vector<std::size_t>{y}).message[0] == pred.guess[y]);
	}
}

TEST_CASE("Wilson interval")
{
	auto [lo0, hi0] = wilson_interval(0, 10);
	CHECK(lo0 == 0.0);
	CHECK(hi0 == doctest::Approx(0.27753).epsilon(1e-4));
	auto [lo5, hi5] = wilson_interval(5, 10);
	CHECK(lo5 == doctest::Approx(0.23659).epsilon(1e-4));
	CHECK(hi5 == doctest::Approx(0.76341).epsilon(1e-4));
	auto [lo, hi] = wilson_interval(10, 10);
	CHECK(hi == doctest::Approx(1.0));
	CHECK(lo == doctest::Approx(1.0 - 0.27753).epsilon(1e-4));
}

TEST_CASE("frame error experiments")
{
	auto code = construct_code(arikan(), make_erasure(2, 0.3), 8, CodeTarget::with_rate(0.5));
	auto a = fer_experiment(code, make_erasure(2, 0.3), 400, 11, 1);
	auto b = fer_experiment(code, make_erasure(2, 0.3), 400, 11, 6);
	CHECK(a.failures == b.failures);
	CHECK(a.ci_low <= a.fer);
	CHECK(a.fer <= a.ci_high);
	// SC on the erasure channel fails only if some information index is undetermined.
	CHECK(a.fer <= code.union_bound() + 3 * std::sqrt(code.union_bound() / 400.0) + 1e-9);

	auto clean = construct_code(arikan(), make_qsc(2, 0.0), 6, CodeTarget::with_rate(1.0));
	CHECK(fer_experiment(clean, make_qsc(2, 0.0), 200, 3).failures == 0);

	auto over = construct_code(arikan(), make_erasure(2, 0.5), 8, CodeTarget::with_rate(0.9));
	CHECK(fer_experiment(over, make_erasure(2, 0.5), 200, 5, 4).fer > 0.5);
}

TEST_CASE("decoder time grows by about k per level")
{
	auto seconds = [](unsigned t) {
		auto code = make_code(Matrix::from_rows(Field(2), {{1, 0}, {1, 1}}), t, {}, {});
		Channel ch = make_qsc(2, 0.1);
		ScDecoder dec(code, ch);
		Rng rng = stream(66, t);
		std::vector<std::size_t> y(code.n);
		for (auto &s : y)
			s = uniform_below(rng, 2);
		const int reps = int(4096 / code.n) + 20;
		auto start = std::chrono::steady_clock::now();
		for (int r = 0; r < reps; ++r)
			dec.decode(y);
		return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / reps;
	};
	seconds(10);
	const double ratio = seconds(12) / seconds(11);
	CHECK(ratio > 2.0 / 3.0);
	CHECK(ratio < 6.0);
}
