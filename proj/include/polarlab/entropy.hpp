#pragma once

// Exact normalized conditional entropies H((UM)_j | (UM)_{<j}, A) for i.i.d.
// (symbol, side information) pairs, by full enumeration.

#include "polarlab/fqlin.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace polarlab {

inline constexpr std::uint64_t kDefaultEntropyBudget = 10'000'000;

/// Joint law p(u, a) of one symbol u ∈ F_q and side information a ∈ [m].
class SymbolJoint
{
public:
	/// probs[u * side + a]; must be non-negative and sum to 1 within 1e-12.
	SymbolJoint(Field f, std::size_t side, std::vector<double> probs);

	const Field &field() const { return field_; }
	std::uint32_t q() const { return field_.q(); }
	std::size_t side() const { return side_; }
	double operator()(Elem u, std::size_t a) const { return p_[u * side_ + a]; }
	const std::vector<double> &probs() const { return p_; }

	/// Same U-marginal with the side information removed (m = 1).
	SymbolJoint without_side_information() const;

private:
	Field field_;
	std::size_t side_;
	std::vector<double> p_;
};

/// U uniform; A = U with probability 1-δ, else an erasure label (m = q+1).
SymbolJoint erasure_source(std::uint32_t q, double delta);
/// U uniform; A = U + Z with Z ~ B_q(ε), ε chosen so that H̄(U|A) = δ.
SymbolJoint additive_source(std::uint32_t q, double delta);

using SourceFamily = std::function<SymbolJoint(double delta)>;

/// H̄(U|A), base-2 entropy divided by log2 q.
double cond_entropy(const SymbolJoint &joint);

struct EntropyProfile
{
	/// h[j] = H̄((UM)_j | (UM)_{<j}, A), zero-based j.
	std::vector<double> h;

	double sum() const;
};

/// Exact profile by enumerating F_q^k × [m]^k. The state space is split in
/// a fixed number of partitions merged in order, so the result does not
/// depend on `workers`.
EntropyProfile polar_entropies(const Matrix &m, const SymbolJoint &joint,
                               std::uint64_t budget = kDefaultEntropyBudget, unsigned workers = 1);

/// Per-index fitted decay exponents of h[j](δ) ~ δ^b.
struct ExponentFit
{
	std::vector<double> deltas;
	/// profiles[i] is the profile at deltas[i].
	std::vector<std::vector<double>> profiles;
	/// Least-squares slope of log h[j] against log δ over the fit points;
	/// +inf when h[j] vanishes at a fit point.
	std::vector<double> exponents;

	/// Fraction of indices whose fitted exponent is at least b.
	double fraction_at_least(double b) const;
};

/// Fits exponents from precomputed profiles using the `fit_points` smallest δ.
ExponentFit fit_exponents(std::vector<double> deltas, std::vector<std::vector<double>> profiles,
                          std::size_t fit_points = 3);

ExponentFit polarization_exponents(const Matrix &m, const SourceFamily &family, std::vector<double> deltas,
                                   std::size_t fit_points = 3, std::uint64_t budget = kDefaultEntropyBudget);

/// Maximum-posterior guess of U from A; ties go to the smallest symbol.
struct Predictor
{
	std::vector<Elem> guess;
	double error;
};

Predictor map_predictor(const SymbolJoint &joint);

/// 2δ(log2 δ⁻¹ + log2 s) for 0 ≤ δ < 1/2.
double fano_bound(double delta, double alphabet_size);

} // namespace polarlab
