#include "support.hpp"

#include "polarlab/entropy.hpp"
#include "polarlab/errors.hpp"
#include "polarlab/martingale.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace polarlab;

namespace {

double entropy_bits(const std::map<std::vector<std::uint64_t>, double> &law)
{
	double h = 0.0;
	for (const auto &[key, p] : law)
		if (p > 0)
			h -= p * std::log2(p);
	return h;
}

// h[j] = H(V_{<=j}, A) - H(V_{<j}, A) with V = U·M, by explicit joint laws.
std::vector<double> naive_profile(const Matrix &m, const SymbolJoint &joint)
{
	const std::size_t k = m.rows();
	const std::uint32_t q = m.q();
	const std::size_t side = joint.side();
	std::vector<std::map<std::vector<std::uint64_t>, double>> laws(k + 1);
	const std::uint64_t nu = checked_pow(q, unsigned(k)), na = checked_pow(side, unsigned(k));
	Vec u(k);
	for (std::uint64_t ui = 0; ui < nu; ++ui) {
		index_to_digits(ui, q, u);
		Vec v = std::span<const Elem>(u) * m;
		for (std::uint64_t ai = 0; ai < na; ++ai) {
			std::uint64_t rest = ai;
			double p = 1.0;
			std::vector<std::uint64_t> key{ai};
			for (std::size_t i = 0; i < k; ++i) {
				p *= joint(u[i], rest % side);
				rest /= side;
			}
			for (std::size_t j = 0; j <= k; ++j) {
				laws[j][key] += p;
				if (j < k)
					key.push_back(v[j]);
			}
		}
	}
	std::vector<double> h(k);
	for (std::size_t j = 0; j < k; ++j)
		h[j] = (entropy_bits(laws[j + 1]) - entropy_bits(laws[j])) / std::log2(double(q));
	return h;
}

SymbolJoint random_joint(std::uint32_t q, std::size_t side, Rng &rng)
{
	std::vector<double> p(q * side);
	double total = 0.0;
	for (auto &x : p) {
		x = uniform01(rng);
		if (uniform_below(rng, 4) == 0)
			x = 0.0;
		total += x;
	}
	if (total == 0.0) {
		p[0] = total = 1.0;
	}
	for (auto &x : p)
		x /= total;
	// Renormalize exactly enough to pass the 1e-12 check.
	return SymbolJoint(Field(q), side, p);
}

double cond_entropy_bits(const SymbolJoint &j)
{
	return cond_entropy(j) * std::log2(double(j.q()));
}

} // namespace

TEST_CASE("conditional entropy")
{
	CHECK(cond_entropy(SymbolJoint(Field(2), 2, {0.25, 0.25, 0.25, 0.25})) == doctest::Approx(1.0));
	CHECK(cond_entropy(SymbolJoint(Field(3), 3, {1 / 3.0, 0, 0, 0, 1 / 3.0, 0, 0, 0, 1 / 3.0})) == 0.0);
	CHECK(cond_entropy(erasure_source(2, 0.5)) == doctest::Approx(0.5).epsilon(1e-14));
	for (double d : {0.0, 0.01, 0.3, 0.99})
		for (std::uint32_t q : {2u, 3u, 5u}) {
			CHECK(std::abs(cond_entropy(erasure_source(q, d)) - d) < 1e-12);
			CHECK(std::abs(cond_entropy(additive_source(q, d)) - d) < 1e-12);
		}
	CHECK_THROWS_AS(SymbolJoint(Field(2), 1, {0.5, 0.6}), DomainError);
	CHECK_THROWS_AS(SymbolJoint(Field(2), 1, {1.5, -0.5}), DomainError);
	CHECK_THROWS_AS(SymbolJoint(Field(2), 2, {1.0}), DimensionError);
}

TEST_CASE("polar entropies: worked examples")
{
	Field f2(2);
	auto id = polar_entropies(Matrix::identity(f2, 3), erasure_source(2, 0.3));
	for (double h : id.h)
		CHECK(h == doctest::Approx(0.3).epsilon(1e-12));

	auto ar = polar_entropies(Matrix::from_rows(f2, {{1, 0}, {1, 1}}), erasure_source(2, 0.5));
	CHECK(std::abs(ar.h[0] - 0.75) < 1e-12);
	CHECK(std::abs(ar.h[1] - 0.25) < 1e-12);

	CHECK_THROWS_AS(polar_entropies(Matrix(f2, 2, 2), erasure_source(2, 0.5)), DomainError);
	CHECK_THROWS_AS(polar_entropies(Matrix::identity(f2, 6), erasure_source(2, 0.5), 1000), BudgetExceeded);
	CHECK_THROWS_AS(polar_entropies(Matrix::identity(Field(3), 2), erasure_source(2, 0.5)), DimensionError);
}

TEST_CASE("polar entropies match the naive joint-law oracle")
{
	Rng rng = stream(31, 0);
	for (int trial = 0; trial < 30; ++trial) {
		std::uint32_t q = trial % 3 == 0 ? 3 : 2;
		std::size_t k = 2 + uniform_below(rng, 2);
		Matrix m = testkit::random_invertible(Field(q), k, rng);
		SymbolJoint joint = random_joint(q, 1 + uniform_below(rng, 3), rng);
		auto fast = polar_entropies(m, joint).h;
		auto slow = naive_profile(m, joint);
		for (std::size_t j = 0; j < k; ++j)
			CHECK(std::abs(fast[j] - slow[j]) < 1e-12);
	}
}

TEST_CASE("chain rule, monotonicity and determinism")
{
	Rng rng = stream(32, 0);
	for (int trial = 0; trial < 40; ++trial) {
		std::uint32_t q = std::vector<std::uint32_t>{2, 3, 5}[trial % 3];
		std::size_t k = q == 5 ? 2 : 2 + uniform_below(rng, 3);
		Matrix m = testkit::random_invertible(Field(q), k, rng);
		SymbolJoint joint = random_joint(q, 1 + uniform_below(rng, 3), rng);
		auto prof = polar_entropies(m, joint);
		CHECK(std::abs(prof.sum() - double(k) * cond_entropy(joint)) < 1e-9);
		for (double h : prof.h) {
			CHECK(h >= 0.0);
			CHECK(h <= 1.0);
		}
		auto blind = polar_entropies(m, joint.without_side_information());
		for (std::size_t j = 0; j < k; ++j)
			CHECK(blind.h[j] >= prof.h[j] - 1e-12);
		CHECK(polar_entropies(m, joint, kDefaultEntropyBudget, 4).h == prof.h);
	}
}

TEST_CASE("entropy engine agrees with erasure polynomials")
{
	Rng rng = stream(33, 0);
	for (int trial = 0; trial < 12; ++trial) {
		std::uint32_t q = trial % 2 ? 3 : 2;
		std::size_t k = 2 + trial % 3;
		if (q == 3 && k == 4)
			k = 3;
		Matrix m = testkit::random_invertible(Field(q), k, rng);
		auto polys = erasure_polynomials(m);
		for (double z : {0.1, 0.5, 0.9}) {
			auto prof = polar_entropies(m, erasure_source(q, z));
			for (std::size_t j = 0; j < k; ++j)
				CHECK(std::abs(prof.h[j] - polys.eval(j, z)) < 1e-9);
		}
	}
}

TEST_CASE("polarization exponents")
{
	Field f2(2);
	const std::vector<double> grid{1e-2, 1e-3, 1e-4};
	SourceFamily family = [](double d) { return erasure_source(2, d); };

	auto ident = polarization_exponents(Matrix::identity(f2, 2), family, grid);
	for (double b : ident.exponents)
		CHECK(b == doctest::Approx(1.0).epsilon(1e-6));
	CHECK(ident.fraction_at_least(1.5) == 0.0);

	auto ar = polarization_exponents(Matrix::from_rows(f2, {{1, 0}, {1, 1}}), family, grid);
	CHECK(ar.exponents[0] == doctest::Approx(1.0).epsilon(0.01));
	CHECK(ar.exponents[1] == doctest::Approx(2.0).epsilon(1e-6));
	CHECK(ar.fraction_at_least(1.9) == 0.5);

	auto fit = fit_exponents({0.1, 0.01, 0.001}, {{0.1, 0.0}, {0.01, 0.0}, {0.001, 0.0}});
	CHECK(fit.exponents[0] == doctest::Approx(1.0));
	CHECK(std::isinf(fit.exponents[1]));

	CHECK_THROWS_AS(fit_exponents({0.1, 0.01}, {{0.1}, {0.01}}), DomainError);
	CHECK_THROWS_AS(polarization_exponents(Matrix::identity(f2, 2), family, {0.1, 0.01, 1.5}), DomainError);
	SourceFamily wrong = [](double) { return erasure_source(2, 0.5); };
	CHECK_THROWS_AS(polarization_exponents(Matrix::identity(f2, 2), wrong, grid), DomainError);
}

TEST_CASE("MAP predictor and Fano")
{
	auto reveal = map_predictor(SymbolJoint(Field(3), 3, {1 / 3.0, 0, 0, 0, 1 / 3.0, 0, 0, 0, 1 / 3.0}));
	CHECK(reveal.error == doctest::Approx(0.0));
	CHECK(reveal.guess == Vec{0, 1, 2});
	auto blind = map_predictor(SymbolJoint(Field(2), 1, {0.5, 0.5}));
	CHECK(blind.error == doctest::Approx(0.5));
	CHECK(blind.guess == Vec{0});

	CHECK(fano_bound(0.0, 2) == 0.0);
	CHECK(fano_bound(1e-9, 2) < 1e-6);
	CHECK(fano_bound(0.25, 2) == doctest::Approx(1.5));
	CHECK_THROWS_AS(fano_bound(0.5, 2), DomainError);

	Rng rng = stream(34, 0);
	for (int trial = 0; trial < 500; ++trial) {
		std::uint32_t q = std::vector<std::uint32_t>{2, 3, 5}[trial % 3];
		SymbolJoint joint = random_joint(q, 1 + uniform_below(rng, 6), rng);
		auto pred = map_predictor(joint);
		double correct = 0.0;
		for (std::size_t a = 0; a < joint.side(); ++a) {
			double best = 0.0;
			for (Elem u = 0; u < q; ++u)
				best = std::max(best, joint(u, a));
			correct += best;
			CHECK(joint(pred.guess[a], a) == best);
		}
		CHECK(std::abs(pred.error - (1.0 - correct)) < 1e-15);
		// Predictor error is bounded by the conditional entropy in bits.
		CHECK(pred.error <= cond_entropy_bits(joint) + 1e-12);
		if (pred.error < 0.5)
			CHECK(cond_entropy_bits(joint) <= fano_bound(pred.error, q) + 1e-12);
	}
}
