#pragma once

// Test-side helpers and independent oracles. Nothing here calls the
// elimination routines of the library, so the oracles stay independent.

#include "polarlab/fqlin.hpp"
#include "polarlab/random.hpp"

#include <cstdint>
#include <set>
#include <vector>

namespace testkit {

using namespace polarlab;

inline Matrix random_matrix(const Field &f, std::size_t rows, std::size_t cols, Rng &rng)
{
	Matrix m(f, rows, cols);
	for (std::size_t r = 0; r < rows; ++r)
		for (std::size_t c = 0; c < cols; ++c)
			m(r, c) = static_cast<Elem>(uniform_below(rng, f.q()));
	return m;
}

/// Dimension of the row space by enumerating every combination of rows.
inline std::size_t brute_rank(const Matrix &m)
{
	const std::uint32_t q = m.q();
	const std::size_t rows = m.rows(), cols = m.cols();
	std::uint64_t combos = 1;
	for (std::size_t i = 0; i < rows; ++i)
		combos *= q;
	std::set<Vec> span;
	Vec coef(rows);
	for (std::uint64_t idx = 0; idx < combos; ++idx) {
		std::uint64_t rest = idx;
		for (auto &c : coef) {
			c = static_cast<Elem>(rest % q);
			rest /= q;
		}
		Vec v(cols, 0);
		for (std::size_t c = 0; c < cols; ++c) {
			std::uint64_t acc = 0;
			for (std::size_t r = 0; r < rows; ++r)
				acc += std::uint64_t(coef[r]) * m(r, c);
			v[c] = static_cast<Elem>(acc % q);
		}
		span.insert(v);
	}
	std::size_t rank = 0;
	for (std::size_t size = 1; size < span.size(); size *= q)
		++rank;
	return rank;
}

inline Matrix random_invertible(const Field &f, std::size_t k, Rng &rng)
{
	while (true) {
		Matrix m = random_matrix(f, k, k, rng);
		if (brute_rank(m) == k)
			return m;
	}
}

/// Entry of M^{⊗t} from its digit formula Π_l M[i_l][j_l].
inline Elem kron_power_entry(const Matrix &m, unsigned t, std::uint64_t row, std::uint64_t col)
{
	const std::size_t k = m.rows();
	std::uint64_t acc = 1;
	for (unsigned l = 0; l < t; ++l) {
		acc = acc * m(row % k, col % k) % m.q();
		row /= k;
		col /= k;
	}
	return static_cast<Elem>(acc);
}

/// u·M^{⊗t} by the dense entry formula.
inline Vec dense_tensor_product(const Matrix &m, unsigned t, const Vec &u)
{
	const std::uint64_t n = u.size();
	Vec out(n, 0);
	for (std::uint64_t c = 0; c < n; ++c) {
		std::uint64_t acc = 0;
		for (std::uint64_t r = 0; r < n; ++r)
			acc += std::uint64_t(u[r]) * kron_power_entry(m, t, r, c);
		out[c] = static_cast<Elem>(acc % m.q());
	}
	return out;
}

/// All k×k matrices over F_q, as row-major index → matrix.
inline Matrix matrix_from_index(const Field &f, std::size_t k, std::uint64_t idx)
{
	Matrix m(f, k, k);
	for (std::size_t r = 0; r < k; ++r)
		for (std::size_t c = 0; c < k; ++c) {
			m(r, c) = static_cast<Elem>(idx % f.q());
			idx /= f.q();
		}
	return m;
}

/// Mixing by definition, written independently of the library: no
/// assignment of rows to positions puts every row's first nonzero at or after
/// its position. Invertibility is checked with brute_rank.
inline bool mixing_by_definition(const Matrix &m)
{
	const std::size_t k = m.rows();
	if (brute_rank(m) != k)
		return false;
	std::vector<std::size_t> lead(k);
	for (std::size_t r = 0; r < k; ++r) {
		std::size_t c = 0;
		while (c < k && m(r, c) == 0)
			++c;
		lead[r] = c;
	}
	// Row at position i must have its leading nonzero at column >= i; for an
	// invertible matrix this forces lead values to be a permutation.
	std::vector<bool> taken(k, false);
	for (std::size_t r = 0; r < k; ++r) {
		if (taken[lead[r]])
			return true;
		taken[lead[r]] = true;
	}
	return false;
}

inline Matrix random_mixing(const Field &f, std::size_t k, Rng &rng)
{
	while (true) {
		Matrix m = random_invertible(f, k, rng);
		if (mixing_by_definition(m))
			return m;
	}
}

} // namespace testkit
