#pragma once

// Exact linear algebra over prime fields F_q.
//
// Vectors are row vectors; products are written u·M. Kronecker powers use
// lexicographic order on index tuples, first digit most significant.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace polarlab {

using Elem = std::uint32_t;
using Vec = std::vector<Elem>;

/// Prime modulus q; construction fails for composite q.
class Field
{
public:
	explicit Field(std::uint32_t q);

	std::uint32_t q() const { return q_; }

	Elem add(Elem a, Elem b) const { return static_cast<Elem>((std::uint64_t(a) + b) % q_); }
	Elem sub(Elem a, Elem b) const { return static_cast<Elem>((std::uint64_t(a) + q_ - b) % q_); }
	Elem neg(Elem a) const { return a == 0 ? 0 : q_ - a; }
	Elem mul(Elem a, Elem b) const { return static_cast<Elem>((std::uint64_t(a) * b) % q_); }
	Elem inv(Elem a) const;
	Elem reduce(std::int64_t v) const;

	friend bool operator==(const Field &, const Field &) = default;

private:
	std::uint32_t q_;
};

bool is_prime(std::uint64_t n);

/// Multiplicative inverse of a in F_q; throws DomainError for a = 0.
Elem field_inverse(Elem a, const Field &f);

/// Dense row-major matrix over F_q. Zero-sized dimensions are allowed
/// (a k×0 block is the empty set of parity checks).
class Matrix
{
public:
	Matrix(Field f, std::size_t rows, std::size_t cols);
	Matrix(Field f, std::size_t rows, std::size_t cols, std::vector<Elem> entries);

	/// Literal constructor; entries are reduced mod q (so -1 is q-1).
	static Matrix from_rows(Field f, std::initializer_list<std::initializer_list<std::int64_t>> rows);
	static Matrix identity(Field f, std::size_t n);

	const Field &field() const { return field_; }
	std::uint32_t q() const { return field_.q(); }
	std::size_t rows() const { return rows_; }
	std::size_t cols() const { return cols_; }
	bool is_square() const { return rows_ == cols_; }
	const std::vector<Elem> &entries() const { return data_; }

	Elem operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
	Elem &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
	std::span<const Elem> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
	Vec column(std::size_t c) const;

	Matrix transpose() const;
	Matrix select_columns(std::span<const std::size_t> cols) const;
	Matrix select_rows(std::span<const std::size_t> rows) const;
	/// Horizontal concatenation [*this | rhs].
	Matrix hcat(const Matrix &rhs) const;

	std::size_t rank() const;
	bool is_invertible() const { return is_square() && rank() == rows_; }
	Matrix inverse() const;
	/// Rows form a basis of {u : u·M = 0}; there are rows() - rank() of them.
	Matrix left_null_space() const;

	bool is_upper_triangular() const;
	bool is_lower_triangular() const;
	bool is_diagonal() const { return is_upper_triangular() && is_lower_triangular(); }
	bool is_zero() const;

	friend bool operator==(const Matrix &, const Matrix &) = default;

private:
	Field field_;
	std::size_t rows_, cols_;
	std::vector<Elem> data_;
};

Matrix operator*(const Matrix &a, const Matrix &b);
Matrix operator+(const Matrix &a, const Matrix &b);
/// Row vector times matrix.
Vec operator*(std::span<const Elem> u, const Matrix &m);

/// Hamming weight of a vector.
std::size_t weight(std::span<const Elem> v);

/// result row i = m row perm[i].
Matrix permute_rows(const Matrix &m, std::span<const std::size_t> perm);
/// Permutation matrix P with (P·M) row i = M row perm[i].
Matrix permutation_matrix(const Field &f, std::span<const std::size_t> perm);

Matrix kron(const Matrix &a, const Matrix &b);
Matrix kron_power(const Matrix &m, unsigned t);

/// u·M^{⊗t} in O(k^t·k·t) field operations, one kernel application per digit.
Vec tensor_apply(const Matrix &m, unsigned t, std::span<const Elem> u);

/// perm(M) = lower·upper with lower unit lower-triangular and upper
/// upper-triangular. Pivot = first remaining row with a nonzero entry.
struct PluDecomposition
{
	std::vector<std::size_t> perm;
	Matrix lower;
	Matrix upper;
};

PluDecomposition plu_decompose(const Matrix &m);

/// Little-endian base-q digits of `index` into `out` (length = number of digits).
void index_to_digits(std::uint64_t index, std::uint32_t q, std::span<Elem> out);

/// Saturating integer power; returns UINT64_MAX on overflow.
std::uint64_t checked_pow(std::uint64_t base, unsigned exp);

} // namespace polarlab
