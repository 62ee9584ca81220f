#pragma once

// Structural kernel analysis: mixing, useful containment witnesses,
// left-kernel code distance and high-distance kernel construction.

#include "polarlab/fqlin.hpp"
#include "polarlab/martingale.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace polarlab {

/// P·M·T = [R; 0]. P is stored as a row selection: (P·M) row i = M row perm[i].
struct ContainmentWitness
{
	Matrix target;
	std::vector<std::size_t> perm;
	Matrix transform;
	/// Scale of the last nonzero row of T, which equals alpha·e_m when useful.
	Elem alpha = 0;
	bool useful = false;
	/// Column of M (output index) at which the last nonzero row of T sits.
	std::size_t witnessed_index = 0;
};

struct WitnessCheck
{
	bool ok = false;
	std::string reason;

	explicit operator bool() const { return ok; }
};

/// Independent check of P·M·T = [R; 0] and, if flagged useful, the last-row condition.
WitnessCheck verify_containment(const Matrix &m, const ContainmentWitness &w);

/// Invertible and no row permutation is upper-triangular (k! loop, k ≤ 8).
bool is_mixing_bruteforce(const Matrix &m);
/// Invertible and the L factor of the PLU decomposition is not diagonal.
bool is_mixing_plu(const Matrix &m);
bool is_mixing(const Matrix &m);

/// [[1,0],[alpha,1]]
Matrix containment_target(const Field &f, Elem alpha);

/// Witness for H ⊑_u L with L unit lower-triangular and not diagonal.
ContainmentWitness containment_in_lower(const Matrix &lower);
/// Witness for H = [[1,0],[α,1]] ⊑_u M for mixing M; throws DomainError("no containment") otherwise.
ContainmentWitness find_useful_containment_H(const Matrix &m);
/// Witness for R ⊑_u M'·U⁻¹ from one for R ⊑_u M'; U must be unit upper-triangular.
ContainmentWitness transport_witness(const ContainmentWitness &w, const Matrix &u);
/// Witness for R⊗² ⊑_u M⊗² from one for R ⊑_u M.
ContainmentWitness tensor_witness(const ContainmentWitness &w);

/// Minimum distance of a linear code; infinite for the zero code.
class CodeDistance
{
public:
	static CodeDistance infinite() { return CodeDistance(); }
	explicit CodeDistance(std::size_t d) : value_(d) {}

	bool is_infinite() const { return !value_.has_value(); }
	/// Throws std::bad_optional_access when infinite.
	std::size_t value() const { return value_.value(); }
	/// distance > b
	bool exceeds(std::size_t b) const { return is_infinite() || *value_ > b; }
	std::string to_string() const { return value_ ? std::to_string(*value_) : "inf"; }

	friend bool operator==(const CodeDistance &, const CodeDistance &) = default;
	friend bool operator<(const CodeDistance &a, const CodeDistance &b)
	{
		if (a.is_infinite())
			return false;
		return b.is_infinite() || *a.value_ < *b.value_;
	}

private:
	CodeDistance() = default;
	std::optional<std::size_t> value_;
};

inline constexpr std::uint64_t kDefaultDistanceBudget = 10'000'000;

/// min wt(u) over nonzero u with u·M0 = 0.
CodeDistance left_kernel_distance(const Matrix &m0, std::uint64_t budget = kDefaultDistanceBudget);

/// M = [M0 | M1] with M0 the parity-check columns of the length-7 Hamming code.
Matrix hamming7_kernel();

struct MlFailure
{
	/// P(min-weight decoding fails), ties counted as failures.
	double failure = 0.0;
	/// P(wt(U) exceeds the minimum weight of its coset), the tie-free part.
	double strict_failure = 0.0;
	CodeDistance distance = CodeDistance::infinite();
	/// (ε/(q-1))^A, zero when A is infinite.
	double bound = 0.0;
	bool bound_holds = false;
};

inline constexpr std::uint64_t kDefaultMlBudget = 1'000'000;

/// Exact failure of the min-weight decoder of U from U·P for U ~ B_q(ε)^k.
MlFailure ml_failure_exact(const Matrix &p, double eps, std::uint64_t budget = kDefaultMlBudget);

struct KernelReport
{
	Matrix kernel;
	bool mixing = false;
	/// Brute-force verdict when k ≤ 7.
	std::optional<bool> mixing_bruteforce;
	std::optional<ContainmentWitness> witness;
	std::size_t parity_columns = 0;
	CodeDistance distance = CodeDistance::infinite();
	LeadingExponents exponents;
	std::string construction;
};

/// Full report; the distance is that of the first `parity_columns` columns.
KernelReport analyze_kernel(const Matrix &m, std::size_t parity_columns, std::string construction = "given");

struct HighDistanceKernel
{
	Matrix kernel;
	std::size_t parity_columns = 0;
	CodeDistance distance = CodeDistance::infinite();
	std::string construction;
	std::size_t attempts = 0;
	KernelReport report;
};

/// Mixing [M0 | M1] with left_kernel_distance(M0) > 2b. Known parity
/// checks are used where tabulated, seeded random search otherwise.
HighDistanceKernel build_high_distance_kernel(std::uint32_t q, std::size_t k, std::size_t b, std::uint64_t seed = 1,
                                              std::size_t attempts = 20000);

/// Random mixing completion of the k×s block m0 to a k×k kernel.
std::optional<Matrix> complete_to_mixing(const Matrix &m0, Rng &rng, std::size_t attempts);

struct ColumnSelection
{
	std::vector<std::size_t> columns;
	CodeDistance distance = CodeDistance::infinite();
	/// Whether [chosen | rest] (rest in original order) is mixing.
	bool padded_mixing = false;
	/// Greedy search was used, so optimality is not guaranteed.
	bool heuristic = false;
};

/// Best s columns of M⊗t0 by left-kernel distance; exhaustive when k^t0 ≤ 16.
ColumnSelection extract_high_distance_columns(const Matrix &m, unsigned t0, std::size_t s,
                                              std::uint64_t budget = kDefaultDistanceBudget);

} // namespace polarlab
