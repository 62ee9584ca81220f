#include "polarlab/martingale.hpp"

#include "polarlab/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

namespace polarlab {

ErasurePolynomials::ErasurePolynomials(Matrix kernel, std::vector<std::vector<std::uint64_t>> counts)
    : kernel_(std::move(kernel)), counts_(std::move(counts))
{
	if (counts_.size() != kernel_.rows())
		throw DimensionError("one coefficient row per kernel column");
}

double ErasurePolynomials::eval(std::size_t j, double x) const
{
	const auto &c = counts_[j];
	const std::size_t k = c.size() - 1;
	const double y = 1.0 - x;
	double sum = 0.0;
	double xp = 1.0;
	for (std::size_t w = 0; w <= k; ++w) {
		if (c[w] != 0)
			sum += double(c[w]) * xp * std::pow(y, double(k - w));
		xp *= x;
	}
	return std::clamp(sum, 0.0, 1.0);
}

std::vector<double> ErasurePolynomials::eval_all(double x) const
{
	std::vector<double> out(size());
	for (std::size_t j = 0; j < size(); ++j)
		out[j] = eval(j, x);
	return out;
}

namespace {

// Incremental echelon basis of column vectors restricted to the erased rows.
class RestrictedSpan
{
public:
	RestrictedSpan(const Field &f, std::size_t dim) : field_(f), dim_(dim) {}

	// Reduces v against the basis; adds it and returns false when it is new.
	bool contains_or_add(Vec v)
	{
		for (std::size_t b = 0; b < basis_.size(); ++b) {
			Elem coef = v[pivot_[b]];
			if (coef == 0)
				continue;
			for (std::size_t i = 0; i < dim_; ++i)
				v[i] = field_.sub(v[i], field_.mul(coef, basis_[b][i]));
		}
		std::size_t p = 0;
		while (p < dim_ && v[p] == 0)
			++p;
		if (p == dim_)
			return true;
		Elem s = field_.inv(v[p]);
		for (auto &e : v)
			e = field_.mul(e, s);
		basis_.push_back(std::move(v));
		pivot_.push_back(p);
		return false;
	}

private:
	Field field_;
	std::size_t dim_;
	std::vector<Vec> basis_;
	std::vector<std::size_t> pivot_;
};

std::vector<std::size_t> bits_of(std::uint64_t mask, std::size_t k)
{
	std::vector<std::size_t> rows;
	for (std::size_t i = 0; i < k; ++i)
		if (mask >> i & 1)
			rows.push_back(i);
	return rows;
}

} // namespace

bool output_determined(const Matrix &m, std::uint64_t erased, std::size_t j)
{
	const auto rows = bits_of(erased, m.rows());
	RestrictedSpan span(m.field(), rows.size());
	Vec col(rows.size());
	for (std::size_t c = 0; c <= j; ++c) {
		for (std::size_t i = 0; i < rows.size(); ++i)
			col[i] = m(rows[i], c);
		bool in = span.contains_or_add(col);
		if (c == j)
			return in;
	}
	return true;
}

ErasurePolynomials erasure_polynomials(const Matrix &m)
{
	if (!m.is_invertible())
		throw DomainError("erasure polynomials need an invertible kernel");
	const std::size_t k = m.rows();
	if (k > 20)
		throw BudgetExceeded("erasure pattern enumeration limited to k <= 20");
	std::vector<std::vector<std::uint64_t>> counts(k, std::vector<std::uint64_t>(k + 1, 0));
	for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << k); ++mask) {
		const auto rows = bits_of(mask, k);
		const std::size_t w = rows.size();
		RestrictedSpan span(m.field(), w);
		Vec col(w);
		for (std::size_t j = 0; j < k; ++j) {
			for (std::size_t i = 0; i < w; ++i)
				col[i] = m(rows[i], j);
			if (!span.contains_or_add(col))
				++counts[j][w];
		}
	}
	return ErasurePolynomials(m, std::move(counts));
}

LeadingExponents leading_exponents(const ErasurePolynomials &polys)
{
	LeadingExponents le;
	const std::size_t k = polys.size();
	std::size_t suction = 0;
	for (std::size_t j = 0; j < k; ++j) {
		const auto &c = polys.counts(j);
		unsigned d = 0;
		while (d < c.size() && c[d] == 0)
			++d;
		le.degree.push_back(d);
		le.constant.push_back(d < c.size() ? c[d] : 0);
		if (d >= 2) {
			++suction;
			le.b = le.b == 0 ? d : std::min(le.b, d);
		}
	}
	le.eta = k ? double(suction) / double(k) : 0.0;
	return le;
}

namespace {

std::uint64_t tree_size(std::size_t k, unsigned t, std::uint64_t budget)
{
	std::uint64_t n = checked_pow(k, t);
	if (n > budget)
		throw BudgetExceeded("tree with k^t = " + std::to_string(n) + " leaves exceeds budget " +
		                     std::to_string(budget));
	return n;
}

TreeLevel next_level(const ErasurePolynomials &polys, const TreeLevel &prev, double z0)
{
	const std::size_t k = polys.size();
	TreeLevel next;
	next.t = prev.t + 1;
	next.values.resize(prev.values.size() * k);
	for (std::size_t i = 0; i < prev.values.size(); ++i) {
		const double x = prev.values[i];
		for (std::size_t j = 0; j < k; ++j) {
			double v = x == 0.0 ? 0.0 : polys.eval(j, x);
			if (v < kUnderflowFloor)
				v = 0.0;
			next.values[i * k + j] = v;
		}
	}
	if (z0 > 0.0)
		next.underflow = static_cast<std::size_t>(std::count(next.values.begin(), next.values.end(), 0.0));
	return next;
}

} // namespace

std::vector<TreeLevel> evolve_levels(const ErasurePolynomials &polys, double z0, unsigned t, std::uint64_t budget)
{
	if (!(z0 >= 0.0 && z0 <= 1.0))
		throw DomainError("initial erasure rate outside [0, 1]");
	tree_size(polys.size(), t, budget);
	std::vector<TreeLevel> levels;
	levels.push_back(TreeLevel{0, {z0}, 0});
	for (unsigned l = 0; l < t; ++l)
		levels.push_back(next_level(polys, levels.back(), z0));
	return levels;
}

TreeLevel evolve_tree(const ErasurePolynomials &polys, double z0, unsigned t, std::uint64_t budget)
{
	if (!(z0 >= 0.0 && z0 <= 1.0))
		throw DomainError("initial erasure rate outside [0, 1]");
	tree_size(polys.size(), t, budget);
	TreeLevel level{0, {z0}, 0};
	for (unsigned l = 0; l < t; ++l)
		level = next_level(polys, level, z0);
	return level;
}

std::vector<double> sample_paths(const ErasurePolynomials &polys, double z0, unsigned t, std::size_t n,
                                 std::uint64_t seed, unsigned workers)
{
	std::vector<double> out(n);
	const std::size_t k = polys.size();
	auto run = [&](std::size_t begin, std::size_t end) {
		for (std::size_t i = begin; i < end; ++i) {
			Rng rng = stream(seed, i);
			double x = z0;
			for (unsigned l = 0; l < t; ++l) {
				auto j = static_cast<std::size_t>(uniform_below(rng, k));
				x = x == 0.0 ? 0.0 : polys.eval(j, x);
				if (x < kUnderflowFloor)
					x = 0.0;
			}
			out[i] = x;
		}
	};
	workers = std::max(1u, workers);
	if (workers == 1) {
		run(0, n);
	} else {
		std::vector<std::thread> pool;
		for (unsigned w = 0; w < workers; ++w)
			pool.emplace_back(run, n * w / workers, n * (w + 1) / workers);
		for (auto &th : pool)
			th.join();
	}
	return out;
}

LevelStats level_stats(std::span<const double> values, unsigned t, double lambda, double gamma, double threshold,
                       std::size_t underflow)
{
	if (values.empty())
		throw DomainError("polarization report needs at least one value");
	if (!(gamma > 0.0 && gamma < 1.0) || !(lambda > 0.0))
		throw DomainError("need 0 < γ < 1 and Λ > 0");
	const double hi = 1.0 - std::pow(gamma, double(t));
	const double lo_exp = std::exp2(-std::exp2(lambda * t));
	const double lo_strong = std::pow(gamma, double(t));
	std::size_t in_exp = 0, in_strong = 0, below = 0;
	for (double v : values) {
		if (v > lo_exp && v < hi)
			++in_exp;
		if (v > lo_strong && v < hi)
			++in_strong;
		if (v <= threshold)
			++below;
	}
	const double n = double(values.size());
	LevelStats s;
	s.t = t;
	s.size = values.size();
	s.fraction_exp = in_exp / n;
	s.fraction_strong = in_strong / n;
	s.rate_at_threshold = below / n;
	s.underflow = underflow;
	return s;
}

PolarizationReport polarization_report(std::span<const TreeLevel> levels, double lambda, double gamma,
                                       double threshold)
{
	if (levels.empty())
		throw DomainError("polarization report needs at least one level");
	PolarizationReport report;
	double sx = 0, sy = 0, sxx = 0, sxy = 0;
	std::size_t n = 0;
	for (const auto &level : levels) {
		report.levels.push_back(level_stats(level.values, level.t, lambda, gamma, threshold, level.underflow));
		double f = report.levels.back().fraction_exp;
		if (f > 0.0) {
			double x = level.t, y = std::log(f);
			sx += x, sy += y, sxx += x * x, sxy += x * y;
			++n;
		}
	}
	if (n >= 2 && n * sxx - sx * sx > 0) {
		report.log_rho_hat = (n * sxy - sx * sy) / (n * sxx - sx * sx);
		report.rho_hat = std::exp(report.log_rho_hat);
	} else {
		report.log_rho_hat = report.rho_hat = std::numeric_limits<double>::quiet_NaN();
	}
	return report;
}

std::vector<double> suction_scan()
{
	std::vector<double> xs;
	for (int s = 1; s <= 20; ++s)
		xs.push_back(std::ldexp(1.0, -s));
	return xs;
}

namespace {

template <typename Pred>
double fraction_of(const ErasurePolynomials &polys, Pred pred)
{
	std::size_t n = 0;
	for (std::size_t j = 0; j < polys.size(); ++j)
		if (pred(j))
			++n;
	return double(n) / double(polys.size());
}

// Largest scan value below which frac(x) ≥ target holds at every scan point.
template <typename Frac>
double scan_tau(const std::vector<double> &scan, double target, Frac frac)
{
	if (target <= 0.0)
		return 0.0;
	double tau = 0.0;
	for (auto it = scan.rbegin(); it != scan.rend(); ++it) {
		if (frac(*it) + 1e-12 < target)
			break;
		tau = *it;
	}
	return tau;
}

} // namespace

LocalProfile local_profile(const ErasurePolynomials &polys, std::size_t grid_points, unsigned max_log2_c)
{
	if (grid_points < 2)
		throw DomainError("variance grid needs at least two points");
	LocalProfile prof;
	const std::size_t k = polys.size();
	for (std::size_t i = 0; i < grid_points; ++i) {
		double x = double(i) / double(grid_points - 1);
		double v = 0.0;
		for (std::size_t j = 0; j < k; ++j) {
			double d = polys.eval(j, x) - x;
			v += d * d;
		}
		prof.grid.push_back(x);
		prof.variance.push_back(v / k);
	}

	const auto scan = suction_scan();
	for (unsigned e = 1; e <= max_log2_c; ++e) {
		const double c = std::ldexp(1.0, int(e));
		auto low = [&](double x) { return fraction_of(polys, [&](std::size_t j) { return polys.eval(j, x) <= x / c; }); };
		auto high = [&](double x) {
			// x is the distance to 1
			return fraction_of(polys, [&](std::size_t j) { return 1.0 - polys.eval(j, 1.0 - x) <= x / c; });
		};
		SuctionRow row;
		row.c = c;
		row.low_fraction = low(scan.back());
		row.low_tau = scan_tau(scan, row.low_fraction, low);
		row.high_fraction = high(scan.back());
		row.high_tau = scan_tau(scan, row.high_fraction, high);
		prof.suction.push_back(row);
	}
	return prof;
}

double strong_suction_tau(const ErasurePolynomials &polys, double b, double eta, double slack)
{
	const auto scan = suction_scan();
	auto frac = [&](double x) {
		return fraction_of(polys, [&](std::size_t j) { return polys.eval(j, x) <= std::pow(x, b - slack); });
	};
	return scan_tau(scan, eta, frac);
}

} // namespace polarlab
