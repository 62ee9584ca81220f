#pragma once

#include "polarlab/fqlin.hpp"
#include "polarlab/random.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace polarlab {

enum class ChannelKind { additive, erasure, general };

std::string to_string(ChannelKind kind);

/// Memoryless channel F_q -> {0..m-1}. Outputs 0..q-1 of additive and
/// erasure channels coincide with field symbols; the erasure symbol is q.
class Channel
{
public:
	/// Validates row sums (1e-12) and symmetry; throws DomainError otherwise.
	Channel(Field f, std::vector<std::vector<double>> table, ChannelKind kind = ChannelKind::general);

	/// Unchecked construction, used to represent tables that fail symmetry
	/// (for instance to call validate_symmetric on them).
	static Channel unchecked(Field f, std::vector<std::vector<double>> table);

	const Field &field() const { return field_; }
	std::uint32_t q() const { return field_.q(); }
	std::size_t outputs() const { return table_.front().size(); }
	ChannelKind kind() const { return kind_; }
	double prob(std::size_t y, Elem x) const { return table_[x][y]; }
	const std::vector<double> &row(Elem x) const { return table_[x]; }

	/// The ε of make_qsc or the z of make_erasure.
	std::optional<double> parameter() const { return param_; }
	std::size_t erasure_symbol() const { return field_.q(); }

private:
	friend Channel make_qsc(std::uint32_t, double);
	friend Channel make_erasure(std::uint32_t, double);

	Channel(Field f, std::vector<std::vector<double>> table, ChannelKind kind, bool check);

	Field field_;
	std::vector<std::vector<double>> table_;
	ChannelKind kind_;
	std::optional<double> param_;
};

/// Additive channel y = x + Z with Z ~ B_q(eps).
Channel make_qsc(std::uint32_t q, double eps);
/// y = x with probability 1-z, the erasure symbol otherwise.
Channel make_erasure(std::uint32_t q, double z);

/// For each ordered input pair (α, β): σ with w[y|α] = w[σ(y)|β]. The
/// outputs must also split, by column multiset, into sub-channels whose rows
/// are permutations of each other (so uniform input achieves capacity).
struct SymmetryCertificate
{
	bool symmetric = false;
	/// bijections[α * q + β][y] = σ(y); filled only when symmetric.
	std::vector<std::vector<std::size_t>> bijections;
	/// First violating input pair when not symmetric.
	std::optional<std::pair<Elem, Elem>> violation;
	std::string reason;
};

SymmetryCertificate validate_symmetric(const Channel &c, double tol = 1e-12);

/// I(X;Y) / log2 q for uniform X; throws DomainError for non-symmetric tables.
double capacity(const Channel &c);

/// Output symbol drawn with probability w[y|x].
std::size_t sample_output(const Channel &c, Elem x, Rng &rng);

/// Normalized entropy of B_q(eps), i.e. 1 - capacity(make_qsc(q, eps)).
double bernoulli_q_entropy(std::uint32_t q, double eps);

/// Binary entropy in bits.
double h2(double p);

/// Parses "qsc:0.1", "erasure:0.3" or "bsc:0.1" (q=2) with the given q.
Channel parse_channel(const std::string &spec, std::uint32_t q);

} // namespace polarlab
