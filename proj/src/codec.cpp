#include "polarlab/codec.hpp"

#include "polarlab/errors.hpp"
#include "polarlab/kernelscope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace polarlab {

double PolarCode::union_bound() const
{
	double s = 0.0;
	if (reliability.empty())
		return s;
	for (auto i : info)
		s += reliability[i];
	return s;
}

PolarCode make_code(const Matrix &kernel, unsigned t, std::vector<std::size_t> frozen, Vec frozen_values)
{
	if (!kernel.is_square())
		throw DimensionError("kernel must be square");
	const std::uint64_t n = checked_pow(kernel.rows(), t);
	if (n > kDefaultTreeBudget)
		throw BudgetExceeded("blocklength " + std::to_string(n) + " exceeds budget");
	if (frozen.size() != frozen_values.size())
		throw DimensionError("one frozen value per frozen index");

	PolarCode code{kernel, kernel.inverse(), t, std::size_t(n), std::vector<bool>(n, false), {}, {}, Vec(n, 0),
	               {}, "explicit"};
	for (std::size_t i = 0; i < frozen.size(); ++i) {
		if (frozen[i] >= n || code.frozen_mask[frozen[i]])
			throw DomainError("frozen index out of range or repeated");
		if (frozen_values[i] >= kernel.q())
			throw DomainError("frozen value outside F_q");
		code.frozen_mask[frozen[i]] = true;
		code.frozen_values[frozen[i]] = frozen_values[i];
	}
	for (std::size_t i = 0; i < n; ++i)
		(code.frozen_mask[i] ? code.frozen : code.info).push_back(i);
	return code;
}

std::size_t info_size_for_rate(double rate, std::size_t n)
{
	if (!(rate >= 0.0 && rate <= 1.0))
		throw DomainError("rate outside [0, 1]");
	return static_cast<std::size_t>(std::floor(rate * double(n) + 1e-9));
}

PolarCode construct_code(const Matrix &kernel, const Channel &channel, unsigned t, CodeTarget target,
                         const ConstructOptions &opts)
{
	if (kernel.field() != channel.field())
		throw DimensionError("kernel and channel live over different fields");
	if (!validate_symmetric(channel).symmetric)
		throw DomainError("code construction needs a symmetric channel");
	if (!is_mixing(kernel))
		throw DomainError("code construction needs a mixing kernel");
	const std::uint64_t n64 = checked_pow(kernel.rows(), t);
	if (n64 > opts.budget)
		throw BudgetExceeded("blocklength " + std::to_string(n64) + " exceeds budget " + std::to_string(opts.budget));
	const std::size_t n = static_cast<std::size_t>(n64);

	std::vector<double> est;
	std::string how;
	if (capacity(channel) >= 1.0 - 1e-15) {
		est.assign(n, 0.0);
		how = "noiseless";
	} else if (channel.kind() == ChannelKind::erasure && channel.parameter()) {
		est = evolve_tree(erasure_polynomials(kernel), *channel.parameter(), t, opts.budget).values;
		how = "exact-erasure-tree";
	} else {
		est = genie_error_rates(kernel, t, channel, opts.genie_trials, opts.seed, opts.workers).rates();
		how = "genie-monte-carlo";
	}

	std::vector<std::size_t> order(n);
	std::iota(order.begin(), order.end(), 0);
	std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return est[a] > est[b]; });
	std::size_t n_frozen;
	if (target.kind == CodeTarget::Kind::rate) {
		n_frozen = n - info_size_for_rate(target.value, n);
	} else {
		n_frozen = static_cast<std::size_t>(
		    std::count_if(est.begin(), est.end(), [&](double e) { return e > target.value; }));
	}
	std::vector<std::size_t> frozen(order.begin(), order.begin() + n_frozen);
	std::sort(frozen.begin(), frozen.end());

	Vec values(frozen.size(), 0);
	if (!opts.zero_frozen) {
		Rng rng = stream(opts.seed, 0x66726f7a656eULL);
		for (auto &v : values)
			v = static_cast<Elem>(uniform_below(rng, kernel.q()));
	}
	PolarCode code = make_code(kernel, t, std::move(frozen), std::move(values));
	code.reliability = std::move(est);
	code.estimator = how;
	return code;
}

Vec assemble_u(const PolarCode &code, std::span<const Elem> message)
{
	if (message.size() != code.message_length())
		throw DimensionError("message length " + std::to_string(message.size()) + " != " +
		                     std::to_string(code.message_length()));
	Vec u = code.frozen_values;
	for (std::size_t i = 0; i < code.info.size(); ++i) {
		if (message[i] >= code.kernel.q())
			throw DomainError("message symbol outside F_q");
		u[code.info[i]] = message[i];
	}
	return u;
}

Vec encode(const PolarCode &code, std::span<const Elem> message)
{
	return tensor_apply(code.kernel_inverse, code.t, assemble_u(code, message));
}

ScDecoder::ScDecoder(const PolarCode &code, const Channel &channel)
    : code_(code), channel_(channel), k_(code.kernel.rows()), q_(code.kernel.q())
{
	if (code.kernel.field() != channel.field())
		throw DimensionError("code and channel live over different fields");
	combos_ = static_cast<std::size_t>(checked_pow(q_, unsigned(k_)));
	if (combos_ > 1'000'000)
		throw BudgetExceeded("q^k kernel node enumeration exceeds 10^6 combinations");
	combo_image_.resize(combos_ * k_);
	combo_digits_.resize(combos_ * k_);
	for (std::size_t c = 0; c < combos_; ++c) {
		std::span<Elem> digits(&combo_digits_[c * k_], k_);
		index_to_digits(c, q_, digits);
		Vec img = std::span<const Elem>(digits) * code.kernel;
		std::copy(img.begin(), img.end(), combo_image_.begin() + c * k_);
	}
	ll_.resize(code.t + 1);
	decided_.resize(code.t + 1);
	for (unsigned l = 0; l <= code.t; ++l) {
		std::size_t size = static_cast<std::size_t>(checked_pow(k_, l));
		ll_[l].resize(size * q_);
		decided_[l].resize(size);
	}
	weights_.resize(q_);
	u_.resize(code.n);
}

void ScDecoder::load(std::span<const std::size_t> y)
{
	if (y.size() != code_.n)
		throw DimensionError("received word has length " + std::to_string(y.size()) + ", expected " +
		                     std::to_string(code_.n));
	auto &top = ll_[code_.t];
	for (std::size_t i = 0; i < code_.n; ++i) {
		if (y[i] >= channel_.outputs())
			throw DomainError("received symbol outside the channel output alphabet");
		double sum = 0.0;
		for (Elem x = 0; x < q_; ++x)
			sum += top[i * q_ + x] = channel_.prob(y[i], x);
		for (Elem x = 0; x < q_; ++x)
			top[i * q_ + x] = sum > 0.0 ? top[i * q_ + x] / sum : 1.0 / q_;
	}
}

DecodeResult ScDecoder::decode(std::span<const std::size_t> y, bool keep_posteriors)
{
	load(y);
	DecodeResult res;
	if (keep_posteriors)
		res.posteriors.resize(code_.n * q_);
	posteriors_ = keep_posteriors ? &res.posteriors : nullptr;
	genie_errors_ = nullptr;
	Vec x(code_.n);
	node(code_.t, 0, x.data());
	posteriors_ = nullptr;
	res.u = u_;
	res.message.reserve(code_.info.size());
	for (auto i : code_.info)
		res.message.push_back(u_[i]);
	return res;
}

void ScDecoder::genie(std::span<const std::size_t> y, std::span<const Elem> u_true, std::vector<std::uint8_t> &errors)
{
	if (u_true.size() != code_.n)
		throw DimensionError("genie word has the wrong length");
	load(y);
	errors.assign(code_.n, 0);
	genie_u_ = u_true;
	genie_errors_ = &errors;
	Vec x(code_.n);
	node(code_.t, 0, x.data());
	genie_errors_ = nullptr;
}

void ScDecoder::leaf(std::size_t index, Elem *out)
{
	const double *p = ll_[0].data();
	if (posteriors_)
		std::copy(p, p + q_, posteriors_->begin() + index * q_);
	Elem best = 0;
	for (Elem x = 1; x < q_; ++x)
		if (p[x] > p[best] * (1.0 + kTieTolerance))
			best = x;
	Elem decision;
	if (genie_errors_) {
		decision = genie_u_[index];
		bool tied = false;
		for (Elem x = 0; x < q_; ++x)
			if (x != best && p[x] >= p[best] * (1.0 - kTieTolerance))
				tied = true;
		if (best != decision || tied)
			(*genie_errors_)[index] = 1;
	} else if (code_.frozen_mask[index]) {
		decision = code_.frozen_values[index];
	} else {
		decision = best;
	}
	u_[index] = decision;
	*out = decision;
}

// Node of size k^level decoding u[u_offset, u_offset + k^level). The input
// likelihoods are in ll_[level]; the hard x-domain word is written to out.
void ScDecoder::node(unsigned level, std::size_t u_offset, Elem *out)
{
	if (level == 0) {
		leaf(u_offset, out);
		return;
	}
	const std::size_t n = static_cast<std::size_t>(checked_pow(k_, level));
	const std::size_t sub = n / k_;
	const double *in = ll_[level].data();
	double *child = ll_[level - 1].data();
	Elem *dec = decided_[level].data();

	for (std::size_t a = 0; a < k_; ++a) {
		for (std::size_t i = 0; i < sub; ++i) {
			std::fill(weights_.begin(), weights_.end(), 0.0);
			for (std::size_t c = 0; c < combos_; ++c) {
				const Elem *img = &combo_image_[c * k_];
				bool consistent = true;
				for (std::size_t b = 0; b < a && consistent; ++b)
					consistent = img[b] == dec[b * sub + i];
				if (!consistent)
					continue;
				const Elem *digits = &combo_digits_[c * k_];
				double w = 1.0;
				for (std::size_t s = 0; s < k_ && w > 0.0; ++s)
					w *= in[(s * sub + i) * q_ + digits[s]];
				weights_[img[a]] += w;
			}
			double sum = std::accumulate(weights_.begin(), weights_.end(), 0.0);
			for (Elem x = 0; x < q_; ++x)
				child[i * q_ + x] = sum > 0.0 ? weights_[x] / sum : 1.0 / q_;
		}
		node(level - 1, u_offset + a * sub, dec + a * sub);
	}

	// x-domain blocks: x̄[i] = ȳ[i]·M⁻¹ across the k blocks.
	const Matrix &minv = code_.kernel_inverse;
	const Field &f = minv.field();
	for (std::size_t i = 0; i < sub; ++i)
		for (std::size_t s = 0; s < k_; ++s) {
			Elem acc = 0;
			for (std::size_t b = 0; b < k_; ++b)
				acc = f.add(acc, f.mul(dec[b * sub + i], minv(b, s)));
			out[s * sub + i] = acc;
		}
}

DecodeResult sc_decode(const PolarCode &code, const Channel &channel, std::span<const std::size_t> y)
{
	ScDecoder dec(code, channel);
	return dec.decode(y);
}

std::vector<std::size_t> transmit(const Channel &channel, std::span<const Elem> x, Rng &rng)
{
	std::vector<std::size_t> y(x.size());
	for (std::size_t i = 0; i < x.size(); ++i)
		y[i] = sample_output(channel, x[i], rng);
	return y;
}

std::vector<double> GenieEstimate::rates() const
{
	std::vector<double> r(errors.size(), 0.0);
	if (trials == 0)
		return r;
	for (std::size_t i = 0; i < errors.size(); ++i)
		r[i] = double(errors[i]) / double(trials);
	return r;
}

namespace {

// Runs body(worker_state, trial) over [0, trials) on `workers` threads; each
// worker owns a contiguous trial range and its own state.
template <typename State, typename Make, typename Body>
std::vector<State> run_trials(std::size_t trials, unsigned workers, Make make, Body body)
{
	workers = std::max(1u, std::min<unsigned>(workers, std::max<std::size_t>(trials, 1)));
	std::vector<State> states;
	for (unsigned w = 0; w < workers; ++w)
		states.push_back(make());
	auto run = [&](unsigned w) {
		for (std::size_t i = trials * w / workers; i < trials * (w + 1) / workers; ++i)
			body(states[w], i);
	};
	if (workers == 1) {
		run(0);
	} else {
		std::vector<std::thread> pool;
		for (unsigned w = 0; w < workers; ++w)
			pool.emplace_back(run, w);
		for (auto &th : pool)
			th.join();
	}
	return states;
}

} // namespace

GenieEstimate genie_error_rates(const Matrix &kernel, unsigned t, const Channel &channel, std::size_t trials,
                                std::uint64_t seed, unsigned workers)
{
	const PolarCode all_info = make_code(kernel, t, {}, {});
	const std::size_t n = all_info.n;
	struct State
	{
		ScDecoder dec;
		std::vector<std::uint64_t> counts;
		std::vector<std::uint8_t> flags;
	};
	auto states = run_trials<State>(
	    trials, workers, [&] { return State{ScDecoder(all_info, channel), std::vector<std::uint64_t>(n, 0), {}}; },
	    [&](State &st, std::size_t trial) {
		    Rng rng = stream(seed, trial);
		    Vec u(n);
		    for (auto &e : u)
			    e = static_cast<Elem>(uniform_below(rng, kernel.q()));
		    Vec x = tensor_apply(all_info.kernel_inverse, t, u);
		    auto y = transmit(channel, x, rng);
		    st.dec.genie(y, u, st.flags);
		    for (std::size_t i = 0; i < n; ++i)
			    st.counts[i] += st.flags[i];
	    });
	GenieEstimate est{std::vector<std::uint64_t>(n, 0), trials};
	for (const auto &st : states)
		for (std::size_t i = 0; i < n; ++i)
			est.errors[i] += st.counts[i];
	return est;
}

std::pair<double, double> wilson_interval(std::uint64_t failures, std::uint64_t trials, double z)
{
	if (trials == 0)
		return {0.0, 1.0};
	const double n = double(trials);
	const double p = double(failures) / n;
	const double z2 = z * z;
	const double denom = 1.0 + z2 / n;
	const double centre = (p + z2 / (2.0 * n)) / denom;
	const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
	return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

FerResult fer_experiment(const PolarCode &code, const Channel &channel, std::size_t trials, std::uint64_t seed,
                         unsigned workers)
{
	struct State
	{
		ScDecoder dec;
		std::uint64_t failures;
	};
	auto states = run_trials<State>(
	    trials, workers, [&] { return State{ScDecoder(code, channel), 0}; },
	    [&](State &st, std::size_t trial) {
		    Rng rng = stream(seed, trial);
		    Vec msg(code.message_length());
		    for (auto &e : msg)
			    e = static_cast<Elem>(uniform_below(rng, code.kernel.q()));
		    auto y = transmit(channel, encode(code, msg), rng);
		    if (st.dec.decode(y).message != msg)
			    ++st.failures;
	    });
	FerResult res;
	res.trials = trials;
	for (const auto &st : states)
		res.failures += st.failures;
	res.fer = trials ? double(res.failures) / double(trials) : 0.0;
	std::tie(res.ci_low, res.ci_high) = wilson_interval(res.failures, trials);
	return res;
}

} // namespace polarlab
