#pragma once

// Exact Arıkan martingale for erasure channels.
//
// Given an erasure pattern on the k inputs of a kernel, each (UM)_j is
// either determined by the observations and (UM)_{<j} or uniform on F_q.
// The one-step law is therefore a set of polynomials f_j(x), the synthetic
// erasure rates when every input is erased independently with rate x.

#include "polarlab/fqlin.hpp"
#include "polarlab/random.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace polarlab {

inline constexpr std::uint64_t kDefaultTreeBudget = 1'000'000;
/// Smaller values are flushed to zero and counted as underflow.
inline constexpr double kUnderflowFloor = 1e-300;

class ErasurePolynomials
{
public:
	ErasurePolynomials(Matrix kernel, std::vector<std::vector<std::uint64_t>> counts);

	const Matrix &kernel() const { return kernel_; }
	std::size_t size() const { return counts_.size(); }
	/// counts(j)[w] = number of weight-w erasure patterns leaving (UM)_j undetermined.
	const std::vector<std::uint64_t> &counts(std::size_t j) const { return counts_[j]; }

	/// f_j(x) = Σ_w c_j[w] x^w (1-x)^{k-w}.
	double eval(std::size_t j, double x) const;
	std::vector<double> eval_all(double x) const;

private:
	Matrix kernel_;
	std::vector<std::vector<std::uint64_t>> counts_;
};

/// Pattern-rank enumeration over all 2^k erasure patterns (k ≤ 20).
ErasurePolynomials erasure_polynomials(const Matrix &m);

/// Whether (UM)_j is determined when the inputs in `erased` (bitmask) are unknown.
bool output_determined(const Matrix &m, std::uint64_t erased, std::size_t j);

struct LeadingExponents
{
	/// d[j] = smallest w with c_j[w] > 0.
	std::vector<unsigned> degree;
	/// c_j[d_j], the constant of the leading term.
	std::vector<std::uint64_t> constant;
	/// Fraction of indices with d[j] ≥ 2 and the minimum such d[j] (0 if none).
	double eta = 0.0;
	unsigned b = 0;
};

LeadingExponents leading_exponents(const ErasurePolynomials &polys);

struct TreeLevel
{
	unsigned t = 0;
	/// k^t values in lexicographic path order (i_1 most significant).
	std::vector<double> values;
	/// Values flushed below kUnderflowFloor (including their descendants).
	std::size_t underflow = 0;
};

/// Level-t values f_{i_t}(…f_{i_1}(z0)…) for every path.
TreeLevel evolve_tree(const ErasurePolynomials &polys, double z0, unsigned t,
                      std::uint64_t budget = kDefaultTreeBudget);
/// Levels 0..t of the same tree.
std::vector<TreeLevel> evolve_levels(const ErasurePolynomials &polys, double z0, unsigned t,
                                     std::uint64_t budget = kDefaultTreeBudget);

/// Endpoints of n independent uniformly random index paths of length t.
/// Path i uses its own seeded stream, so results are independent of `workers`.
std::vector<double> sample_paths(const ErasurePolynomials &polys, double z0, unsigned t, std::size_t n,
                                 std::uint64_t seed, unsigned workers = 1);

struct LevelStats
{
	unsigned t = 0;
	std::size_t size = 0;
	/// Pr[X_t ∈ (2^{-2^{Λt}}, 1 - γ^t)]
	double fraction_exp = 0.0;
	/// Pr[X_t ∈ (γ^t, 1 - γ^t)]
	double fraction_strong = 0.0;
	/// Pr[X_t ≤ threshold]
	double rate_at_threshold = 0.0;
	std::size_t underflow = 0;
};

struct PolarizationReport
{
	std::vector<LevelStats> levels;
	/// exp(slope) of log fraction_exp against t; NaN with fewer than two positive levels.
	double rho_hat = 0.0;
	double log_rho_hat = 0.0;
};

LevelStats level_stats(std::span<const double> values, unsigned t, double lambda, double gamma, double threshold,
                       std::size_t underflow = 0);
PolarizationReport polarization_report(std::span<const TreeLevel> levels, double lambda, double gamma,
                                       double threshold);

struct SuctionRow
{
	double c = 0.0;
	/// Fraction of j with f_j(x) ≤ x/c at the smallest scanned x.
	double low_fraction = 0.0;
	/// Largest scanned x below which the low fraction holds throughout (0 if never).
	double low_tau = 0.0;
	/// Fraction of j with 1 - f_j(x) ≤ (1-x)/c at the scanned x closest to 1.
	double high_fraction = 0.0;
	double high_tau = 0.0;
};

struct LocalProfile
{
	std::vector<double> grid;
	/// v(x) = (1/k) Σ_j (f_j(x) - x)^2
	std::vector<double> variance;
	std::vector<SuctionRow> suction;
};

/// x-scan used for suction thresholds: 2^-1 … 2^-20.
std::vector<double> suction_scan();

LocalProfile local_profile(const ErasurePolynomials &polys, std::size_t grid_points = 101, unsigned max_log2_c = 6);

/// Largest scanned τ such that for every scanned x ≤ τ at least an η
/// fraction of indices has f_j(x) ≤ x^{b - slack}; 0 if none.
double strong_suction_tau(const ErasurePolynomials &polys, double b, double eta, double slack = 0.1);

} // namespace polarlab
