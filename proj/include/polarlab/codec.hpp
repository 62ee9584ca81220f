#pragma once

// Polar codes over generic kernels: construction, encoding x = u·(M⁻¹)^{⊗t}
// and successive-cancellation decoding in lexicographic u order.

#include "polarlab/channels.hpp"
#include "polarlab/fqlin.hpp"
#include "polarlab/martingale.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace polarlab {

struct PolarCode
{
	Matrix kernel;
	Matrix kernel_inverse;
	unsigned t = 0;
	std::size_t n = 0;
	std::vector<bool> frozen_mask;
	/// Sorted frozen and information indices.
	std::vector<std::size_t> frozen;
	std::vector<std::size_t> info;
	/// Length n; only frozen positions are meaningful.
	Vec frozen_values;
	/// Per-index reliability loss used for construction (synthetic erasure
	/// rate or genie error frequency); empty for hand-built codes.
	std::vector<double> reliability;
	std::string estimator;

	std::size_t message_length() const { return info.size(); }
	/// Σ over information indices of the reliability loss.
	double union_bound() const;
};

/// Code with an explicit frozen set; frozen_values has one entry per frozen index.
PolarCode make_code(const Matrix &kernel, unsigned t, std::vector<std::size_t> frozen, Vec frozen_values);

struct CodeTarget
{
	enum class Kind { rate, threshold };
	Kind kind = Kind::rate;
	double value = 0.5;

	/// floor(rate·N) information indices.
	static CodeTarget with_rate(double r) { return {Kind::rate, r}; }
	/// Information indices are those whose estimate is at most `h`.
	static CodeTarget with_threshold(double h) { return {Kind::threshold, h}; }
};

struct ConstructOptions
{
	std::uint64_t seed = 1;
	std::size_t genie_trials = 10'000;
	bool zero_frozen = false;
	unsigned workers = 1;
	std::uint64_t budget = kDefaultTreeBudget;
};

/// Number of information symbols for a rate target at blocklength n.
std::size_t info_size_for_rate(double rate, std::size_t n);

/// Frozen set = indices with the largest estimates (ties: smaller index frozen first).
PolarCode construct_code(const Matrix &kernel, const Channel &channel, unsigned t, CodeTarget target,
                         const ConstructOptions &opts = {});

/// Transmitted word for `message` (length n - |F|).
Vec encode(const PolarCode &code, std::span<const Elem> message);
/// u with frozen values and message symbols in place.
Vec assemble_u(const PolarCode &code, std::span<const Elem> message);

struct DecodeResult
{
	Vec message;
	Vec u;
	/// n×q leaf posteriors when requested.
	std::vector<double> posteriors;
};

/// Relative tolerance under which two posterior values count as tied.
inline constexpr double kTieTolerance = 1e-12;

class ScDecoder
{
public:
	ScDecoder(const PolarCode &code, const Channel &channel);

	/// y holds output labels of `channel`, one per code position.
	DecodeResult decode(std::span<const std::size_t> y, bool keep_posteriors = false);

	/// Genie-aided pass: decisions follow `u_true`; errors[i] is set when the
	/// leaf posterior at i does not single out u_true[i].
	void genie(std::span<const std::size_t> y, std::span<const Elem> u_true, std::vector<std::uint8_t> &errors);

private:
	void load(std::span<const std::size_t> y);
	void node(unsigned level, std::size_t u_offset, Elem *out);
	void leaf(std::size_t index, Elem *out);

	const PolarCode &code_;
	const Channel &channel_;
	std::size_t k_;
	std::uint32_t q_;
	std::size_t combos_;
	/// c·M for every combination c ∈ F_q^k, k entries per combination.
	std::vector<Elem> combo_image_;
	/// Digits of every combination, k entries per combination.
	std::vector<Elem> combo_digits_;
	std::vector<std::vector<double>> ll_;
	std::vector<std::vector<Elem>> decided_;
	std::vector<double> weights_;
	Vec u_;
	std::vector<double> *posteriors_ = nullptr;
	std::span<const Elem> genie_u_;
	std::vector<std::uint8_t> *genie_errors_ = nullptr;
};

DecodeResult sc_decode(const PolarCode &code, const Channel &channel, std::span<const std::size_t> y);

/// Channel outputs for a transmitted word.
std::vector<std::size_t> transmit(const Channel &channel, std::span<const Elem> x, Rng &rng);

struct GenieEstimate
{
	std::vector<std::uint64_t> errors;
	std::size_t trials = 0;

	std::vector<double> rates() const;
};

/// Per-index genie-aided decision-error counts; trial i uses stream(seed, i).
GenieEstimate genie_error_rates(const Matrix &kernel, unsigned t, const Channel &channel, std::size_t trials,
                                std::uint64_t seed, unsigned workers = 1);

/// 95% Wilson score interval for `failures` out of `trials`.
std::pair<double, double> wilson_interval(std::uint64_t failures, std::uint64_t trials, double z = 1.959963984540054);

struct FerResult
{
	std::uint64_t failures = 0;
	std::uint64_t trials = 0;
	double fer = 0.0;
	double ci_low = 0.0;
	double ci_high = 0.0;
};

/// Trial i draws its message and noise from stream(seed, i).
FerResult fer_experiment(const PolarCode &code, const Channel &channel, std::size_t trials, std::uint64_t seed,
                         unsigned workers = 1);

} // namespace polarlab
