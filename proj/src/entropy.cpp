#include "polarlab/entropy.hpp"

#include "polarlab/channels.hpp"
#include "polarlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

namespace polarlab {

SymbolJoint::SymbolJoint(Field f, std::size_t side, std::vector<double> probs)
    : field_(f), side_(side), p_(std::move(probs))
{
	if (side_ == 0 || p_.size() != std::size_t(f.q()) * side_)
		throw DimensionError("joint table must have q*m entries");
	double total = 0.0;
	for (double p : p_) {
		if (!(p >= 0.0))
			throw DomainError("negative or NaN probability in joint");
		total += p;
	}
	if (std::abs(total - 1.0) > 1e-12)
		throw DomainError("joint probabilities sum to " + std::to_string(total));
}

SymbolJoint SymbolJoint::without_side_information() const
{
	std::vector<double> marginal(q(), 0.0);
	for (Elem u = 0; u < q(); ++u)
		for (std::size_t a = 0; a < side_; ++a)
			marginal[u] += (*this)(u, a);
	return SymbolJoint(field_, 1, std::move(marginal));
}

SymbolJoint erasure_source(std::uint32_t q, double delta)
{
	if (!(delta >= 0.0 && delta <= 1.0))
		throw DomainError("erasure rate outside [0, 1]");
	Field f(q);
	std::vector<double> p(std::size_t(q) * (q + 1), 0.0);
	for (Elem u = 0; u < q; ++u) {
		p[u * (q + 1) + u] = (1.0 - delta) / q;
		p[u * (q + 1) + q] = delta / q;
	}
	return SymbolJoint(f, q + 1, std::move(p));
}

SymbolJoint additive_source(std::uint32_t q, double delta)
{
	if (!(delta >= 0.0 && delta <= 1.0))
		throw DomainError("target entropy outside [0, 1]");
	Field f(q);
	// B_q(ε) entropy is increasing on [0, (q-1)/q] from 0 to 1.
	double lo = 0.0, hi = double(q - 1) / q;
	for (int it = 0; it < 200; ++it) {
		double mid = 0.5 * (lo + hi);
		(bernoulli_q_entropy(q, mid) < delta ? lo : hi) = mid;
	}
	const double eps = 0.5 * (lo + hi);
	std::vector<double> p(std::size_t(q) * q);
	for (Elem u = 0; u < q; ++u)
		for (Elem a = 0; a < q; ++a)
			p[u * q + a] = (a == u ? 1.0 - eps : eps / (q - 1)) / q;
	return SymbolJoint(f, q, std::move(p));
}

double cond_entropy(const SymbolJoint &joint)
{
	double h = 0.0;
	for (std::size_t a = 0; a < joint.side(); ++a) {
		double pa = 0.0;
		for (Elem u = 0; u < joint.q(); ++u)
			pa += joint(u, a);
		if (pa <= 0.0)
			continue;
		for (Elem u = 0; u < joint.q(); ++u) {
			double p = joint(u, a);
			if (p > 0.0)
				h -= p * std::log2(p / pa);
		}
	}
	return std::max(0.0, h / std::log2(double(joint.q())));
}

double EntropyProfile::sum() const
{
	return std::accumulate(h.begin(), h.end(), 0.0);
}

namespace {

// Σ_c -s_c log2(s_c / s) over the q children of one prefix block. The
// complement s - s_c is summed from the siblings so that nearly
// deterministic blocks keep full relative precision.
double block_entropy(const double *children, std::uint32_t q, double parent)
{
	if (parent <= 0.0)
		return 0.0;
	double h = 0.0;
	for (std::uint32_t c = 0; c < q; ++c) {
		double sc = children[c];
		if (sc <= 0.0)
			continue;
		double others = 0.0;
		for (std::uint32_t d = 0; d < q; ++d)
			if (d != c)
				others += children[d];
		h -= sc * std::log1p(-others / parent);
	}
	return h / std::log(2.0);
}

} // namespace

EntropyProfile polar_entropies(const Matrix &m, const SymbolJoint &joint, std::uint64_t budget, unsigned workers)
{
	if (m.q() != joint.q())
		throw DimensionError("kernel and joint live over different fields");
	const Matrix minv = m.inverse();
	const std::size_t k = m.rows();
	const std::uint32_t q = m.q();
	const std::size_t side = joint.side();

	const std::uint64_t nv = checked_pow(q, unsigned(k));
	const std::uint64_t na = checked_pow(side, unsigned(k));
	const std::uint64_t states = checked_pow(std::uint64_t(q) * side, unsigned(k));
	if (states > budget)
		throw BudgetExceeded("entropy enumeration needs " + std::to_string(states) + " states, budget is " +
		                     std::to_string(budget));

	// v is indexed lexicographically (v_0 most significant) so that every
	// prefix v_{<j} is a contiguous block; u = v·M⁻¹ is tabulated once.
	std::vector<Elem> u_of_v(nv * k);
	{
		Vec v(k);
		for (std::uint64_t idx = 0; idx < nv; ++idx) {
			std::uint64_t rest = idx;
			for (std::size_t j = k; j-- > 0;) {
				v[j] = static_cast<Elem>(rest % q);
				rest /= q;
			}
			Vec u = std::span<const Elem>(v) * minv;
			std::copy(u.begin(), u.end(), u_of_v.begin() + idx * k);
		}
	}

	constexpr std::uint64_t kPartitions = 64;
	const std::uint64_t parts = std::min<std::uint64_t>(kPartitions, na);
	std::vector<std::vector<double>> partial(parts, std::vector<double>(k, 0.0));

	auto run_partition = [&](std::uint64_t part) {
		const std::uint64_t begin = na * part / parts, end = na * (part + 1) / parts;
		std::vector<std::vector<double>> level(k + 1);
		for (std::size_t j = 0; j <= k; ++j)
			level[j].assign(checked_pow(q, unsigned(j)), 0.0);
		std::vector<double> cols(k * q);
		std::vector<double> &acc = partial[part];
		for (std::uint64_t a = begin; a < end; ++a) {
			std::uint64_t rest = a;
			for (std::size_t i = 0; i < k; ++i) {
				std::size_t ai = rest % side;
				rest /= side;
				for (Elem u = 0; u < q; ++u)
					cols[i * q + u] = joint(u, ai);
			}
			auto &w = level[k];
			double total = 0.0;
			for (std::uint64_t v = 0; v < nv; ++v) {
				const Elem *u = &u_of_v[v * k];
				double p = 1.0;
				for (std::size_t i = 0; i < k && p > 0.0; ++i)
					p *= cols[i * q + u[i]];
				w[v] = p;
				total += p;
			}
			if (total <= 0.0)
				continue;
			for (std::size_t j = k; j-- > 0;) {
				const auto &child = level[j + 1];
				auto &parent = level[j];
				for (std::size_t b = 0; b < parent.size(); ++b) {
					double s = 0.0;
					for (std::uint32_t c = 0; c < q; ++c)
						s += child[b * q + c];
					parent[b] = s;
					acc[j] += block_entropy(&child[b * q], q, s);
				}
			}
		}
	};

	workers = std::max(1u, workers);
	if (workers == 1 || parts == 1) {
		for (std::uint64_t p = 0; p < parts; ++p)
			run_partition(p);
	} else {
		std::vector<std::thread> pool;
		for (unsigned wkr = 0; wkr < workers; ++wkr)
			pool.emplace_back([&, wkr] {
				for (std::uint64_t p = wkr; p < parts; p += workers)
					run_partition(p);
			});
		for (auto &th : pool)
			th.join();
	}

	EntropyProfile profile;
	profile.h.assign(k, 0.0);
	const double norm = std::log2(double(q));
	for (const auto &part : partial)
		for (std::size_t j = 0; j < k; ++j)
			profile.h[j] += part[j];
	for (auto &h : profile.h)
		h = std::clamp(h / norm, 0.0, 1.0);
	return profile;
}

double ExponentFit::fraction_at_least(double b) const
{
	if (exponents.empty())
		return 0.0;
	auto n = std::count_if(exponents.begin(), exponents.end(), [b](double e) { return e >= b; });
	return double(n) / double(exponents.size());
}

ExponentFit fit_exponents(std::vector<double> deltas, std::vector<std::vector<double>> profiles, std::size_t fit_points)
{
	if (deltas.size() != profiles.size() || deltas.empty())
		throw DimensionError("one profile per δ is required");
	if (deltas.size() < 3)
		throw DomainError("exponent fitting needs at least 3 δ values");
	for (double d : deltas)
		if (!(d > 0.0 && d < 1.0))
			throw DomainError("δ grid must lie in (0, 1)");
	const std::size_t k = profiles.front().size();

	std::vector<std::size_t> order(deltas.size());
	std::iota(order.begin(), order.end(), 0);
	std::sort(order.begin(), order.end(), [&](auto a, auto b) { return deltas[a] < deltas[b]; });
	order.resize(std::min(std::max<std::size_t>(fit_points, 2), order.size()));

	ExponentFit fit;
	fit.exponents.assign(k, 0.0);
	for (std::size_t j = 0; j < k; ++j) {
		double sx = 0, sy = 0, sxx = 0, sxy = 0;
		bool vanished = false;
		for (auto i : order) {
			double h = profiles[i][j];
			if (h <= 0.0) {
				vanished = true;
				break;
			}
			double x = std::log(deltas[i]), y = std::log(h);
			sx += x, sy += y, sxx += x * x, sxy += x * y;
		}
		const double n = double(order.size());
		fit.exponents[j] = vanished ? std::numeric_limits<double>::infinity()
		                            : (n * sxy - sx * sy) / (n * sxx - sx * sx);
	}
	fit.deltas = std::move(deltas);
	fit.profiles = std::move(profiles);
	return fit;
}

ExponentFit polarization_exponents(const Matrix &m, const SourceFamily &family, std::vector<double> deltas,
                                   std::size_t fit_points, std::uint64_t budget)
{
	std::vector<std::vector<double>> profiles;
	for (double d : deltas) {
		SymbolJoint joint = family(d);
		if (std::abs(cond_entropy(joint) - d) > 1e-9)
			throw DomainError("source family does not hit the requested entropy");
		profiles.push_back(polar_entropies(m, joint, budget).h);
	}
	return fit_exponents(std::move(deltas), std::move(profiles), fit_points);
}

Predictor map_predictor(const SymbolJoint &joint)
{
	Predictor pred;
	pred.guess.assign(joint.side(), 0);
	double correct = 0.0;
	for (std::size_t a = 0; a < joint.side(); ++a) {
		Elem best = 0;
		for (Elem u = 1; u < joint.q(); ++u)
			if (joint(u, a) > joint(best, a))
				best = u;
		pred.guess[a] = best;
		correct += joint(best, a);
	}
	pred.error = std::max(0.0, 1.0 - correct);
	return pred;
}

double fano_bound(double delta, double alphabet_size)
{
	if (!(delta >= 0.0) || delta >= 0.5)
		throw DomainError("Fano bound needs 0 <= δ < 1/2");
	if (alphabet_size < 1.0)
		throw DomainError("alphabet size must be positive");
	if (delta == 0.0)
		return 0.0;
	return 2.0 * delta * (std::log2(1.0 / delta) + std::log2(alphabet_size));
}

} // namespace polarlab
