#include "polarlab/fqlin.hpp"

#include "polarlab/errors.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>
#include <utility>

namespace polarlab {

bool is_prime(std::uint64_t n)
{
	if (n < 2)
		return false;
	for (std::uint64_t d = 2; d * d <= n; ++d)
		if (n % d == 0)
			return false;
	return true;
}

Field::Field(std::uint32_t q) : q_(q)
{
	if (!is_prime(q))
		throw DomainError("field modulus " + std::to_string(q) + " is not prime");
}

Elem Field::inv(Elem a) const
{
	if (a % q_ == 0)
		throw DomainError("zero has no inverse");
	// extended Euclid on (a, q)
	std::int64_t r0 = q_, r1 = a % q_, s0 = 0, s1 = 1;
	while (r1 != 0) {
		std::int64_t quot = r0 / r1;
		std::tie(r0, r1) = std::pair(r1, r0 - quot * r1);
		std::tie(s0, s1) = std::pair(s1, s0 - quot * s1);
	}
	return reduce(s0);
}

Elem Field::reduce(std::int64_t v) const
{
	std::int64_t r = v % static_cast<std::int64_t>(q_);
	return static_cast<Elem>(r < 0 ? r + q_ : r);
}

Elem field_inverse(Elem a, const Field &f)
{
	if (a >= f.q())
		throw DomainError("element out of range");
	return f.inv(a);
}

Matrix::Matrix(Field f, std::size_t rows, std::size_t cols)
    : field_(f), rows_(rows), cols_(cols), data_(rows * cols, 0)
{
}

Matrix::Matrix(Field f, std::size_t rows, std::size_t cols, std::vector<Elem> entries)
    : field_(f), rows_(rows), cols_(cols), data_(std::move(entries))
{
	if (data_.size() != rows * cols)
		throw DimensionError("entry count " + std::to_string(data_.size()) + " != rows*cols");
	for (Elem e : data_)
		if (e >= field_.q())
			throw DomainError("matrix entry " + std::to_string(e) + " not in [0, q)");
}

Matrix Matrix::from_rows(Field f, std::initializer_list<std::initializer_list<std::int64_t>> rows)
{
	std::size_t nr = rows.size();
	std::size_t nc = nr ? rows.begin()->size() : 0;
	std::vector<Elem> data;
	data.reserve(nr * nc);
	for (const auto &r : rows) {
		if (r.size() != nc)
			throw DimensionError("ragged matrix literal");
		for (auto v : r)
			data.push_back(f.reduce(v));
	}
	return Matrix(f, nr, nc, std::move(data));
}

Matrix Matrix::identity(Field f, std::size_t n)
{
	Matrix m(f, n, n);
	for (std::size_t i = 0; i < n; ++i)
		m(i, i) = 1;
	return m;
}

Vec Matrix::column(std::size_t c) const
{
	Vec v(rows_);
	for (std::size_t r = 0; r < rows_; ++r)
		v[r] = (*this)(r, c);
	return v;
}

Matrix Matrix::transpose() const
{
	Matrix t(field_, cols_, rows_);
	for (std::size_t r = 0; r < rows_; ++r)
		for (std::size_t c = 0; c < cols_; ++c)
			t(c, r) = (*this)(r, c);
	return t;
}

Matrix Matrix::select_columns(std::span<const std::size_t> cols) const
{
	Matrix out(field_, rows_, cols.size());
	for (std::size_t j = 0; j < cols.size(); ++j) {
		if (cols[j] >= cols_)
			throw DimensionError("column index out of range");
		for (std::size_t r = 0; r < rows_; ++r)
			out(r, j) = (*this)(r, cols[j]);
	}
	return out;
}

Matrix Matrix::select_rows(std::span<const std::size_t> rows) const
{
	Matrix out(field_, rows.size(), cols_);
	for (std::size_t i = 0; i < rows.size(); ++i) {
		if (rows[i] >= rows_)
			throw DimensionError("row index out of range");
		std::copy(row(rows[i]).begin(), row(rows[i]).end(), out.data_.begin() + i * cols_);
	}
	return out;
}

Matrix Matrix::hcat(const Matrix &rhs) const
{
	if (rhs.field_ != field_ || rhs.rows_ != rows_)
		throw DimensionError("hcat: incompatible operands");
	Matrix out(field_, rows_, cols_ + rhs.cols_);
	for (std::size_t r = 0; r < rows_; ++r) {
		for (std::size_t c = 0; c < cols_; ++c)
			out(r, c) = (*this)(r, c);
		for (std::size_t c = 0; c < rhs.cols_; ++c)
			out(r, cols_ + c) = rhs(r, c);
	}
	return out;
}

namespace {

// Gauss-Jordan elimination in place; pivots are restricted to the first
// `pivot_cols` columns. Returns the pivot column of each leading row.
std::vector<std::size_t> reduce_rows(Matrix &m, std::size_t pivot_cols)
{
	const Field &f = m.field();
	std::vector<std::size_t> pivots;
	std::size_t r = 0;
	for (std::size_t c = 0; c < pivot_cols && r < m.rows(); ++c) {
		std::size_t p = r;
		while (p < m.rows() && m(p, c) == 0)
			++p;
		if (p == m.rows())
			continue;
		if (p != r)
			for (std::size_t j = 0; j < m.cols(); ++j)
				std::swap(m(p, j), m(r, j));
		Elem s = f.inv(m(r, c));
		for (std::size_t j = 0; j < m.cols(); ++j)
			m(r, j) = f.mul(m(r, j), s);
		for (std::size_t i = 0; i < m.rows(); ++i) {
			if (i == r || m(i, c) == 0)
				continue;
			Elem factor = m(i, c);
			for (std::size_t j = 0; j < m.cols(); ++j)
				m(i, j) = f.sub(m(i, j), f.mul(factor, m(r, j)));
		}
		pivots.push_back(c);
		++r;
	}
	return pivots;
}

} // namespace

std::size_t Matrix::rank() const
{
	Matrix work = *this;
	return reduce_rows(work, cols_).size();
}

Matrix Matrix::inverse() const
{
	if (!is_square())
		throw DimensionError("inverse of non-square matrix");
	Matrix aug = hcat(identity(field_, rows_));
	if (reduce_rows(aug, cols_).size() != rows_)
		throw DomainError("matrix is not invertible");
	Matrix inv(field_, rows_, rows_);
	for (std::size_t r = 0; r < rows_; ++r)
		for (std::size_t c = 0; c < rows_; ++c)
			inv(r, c) = aug(r, cols_ + c);
	return inv;
}

Matrix Matrix::left_null_space() const
{
	// Reduce [M | I]; rows whose M-part vanished carry u with u·M = 0.
	Matrix aug = hcat(identity(field_, rows_));
	std::size_t rk = reduce_rows(aug, cols_).size();
	Matrix basis(field_, rows_ - rk, rows_);
	for (std::size_t i = rk; i < rows_; ++i)
		for (std::size_t c = 0; c < rows_; ++c)
			basis(i - rk, c) = aug(i, cols_ + c);
	return basis;
}

bool Matrix::is_upper_triangular() const
{
	for (std::size_t r = 0; r < rows_; ++r)
		for (std::size_t c = 0; c < std::min(r, cols_); ++c)
			if ((*this)(r, c) != 0)
				return false;
	return true;
}

bool Matrix::is_lower_triangular() const
{
	for (std::size_t r = 0; r < rows_; ++r)
		for (std::size_t c = r + 1; c < cols_; ++c)
			if ((*this)(r, c) != 0)
				return false;
	return true;
}

bool Matrix::is_zero() const
{
	return std::all_of(data_.begin(), data_.end(), [](Elem e) { return e == 0; });
}

Matrix operator*(const Matrix &a, const Matrix &b)
{
	if (a.field() != b.field() || a.cols() != b.rows())
		throw DimensionError("product: incompatible operands");
	const Field &f = a.field();
	Matrix out(f, a.rows(), b.cols());
	for (std::size_t i = 0; i < a.rows(); ++i)
		for (std::size_t l = 0; l < a.cols(); ++l) {
			Elem x = a(i, l);
			if (x == 0)
				continue;
			for (std::size_t j = 0; j < b.cols(); ++j)
				out(i, j) = f.add(out(i, j), f.mul(x, b(l, j)));
		}
	return out;
}

Matrix operator+(const Matrix &a, const Matrix &b)
{
	if (a.field() != b.field() || a.rows() != b.rows() || a.cols() != b.cols())
		throw DimensionError("sum: incompatible operands");
	Matrix out = a;
	for (std::size_t i = 0; i < a.rows(); ++i)
		for (std::size_t j = 0; j < a.cols(); ++j)
			out(i, j) = a.field().add(a(i, j), b(i, j));
	return out;
}

Vec operator*(std::span<const Elem> u, const Matrix &m)
{
	if (u.size() != m.rows())
		throw DimensionError("vector-matrix product: length mismatch");
	const Field &f = m.field();
	Vec out(m.cols(), 0);
	for (std::size_t i = 0; i < u.size(); ++i) {
		if (u[i] == 0)
			continue;
		for (std::size_t j = 0; j < m.cols(); ++j)
			out[j] = f.add(out[j], f.mul(u[i], m(i, j)));
	}
	return out;
}

std::size_t weight(std::span<const Elem> v)
{
	return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](Elem e) { return e != 0; }));
}

Matrix permute_rows(const Matrix &m, std::span<const std::size_t> perm)
{
	if (perm.size() != m.rows())
		throw DimensionError("permutation length mismatch");
	return m.select_rows(perm);
}

Matrix permutation_matrix(const Field &f, std::span<const std::size_t> perm)
{
	Matrix p(f, perm.size(), perm.size());
	for (std::size_t i = 0; i < perm.size(); ++i)
		p(i, perm[i]) = 1;
	return p;
}

Matrix kron(const Matrix &a, const Matrix &b)
{
	if (a.field() != b.field())
		throw DimensionError("kron: modulus mismatch");
	const Field &f = a.field();
	Matrix out(f, a.rows() * b.rows(), a.cols() * b.cols());
	for (std::size_t i1 = 0; i1 < a.rows(); ++i1)
		for (std::size_t j1 = 0; j1 < a.cols(); ++j1)
			for (std::size_t i2 = 0; i2 < b.rows(); ++i2)
				for (std::size_t j2 = 0; j2 < b.cols(); ++j2)
					out(i1 * b.rows() + i2, j1 * b.cols() + j2) = f.mul(a(i1, j1), b(i2, j2));
	return out;
}

Matrix kron_power(const Matrix &m, unsigned t)
{
	if (!m.is_square())
		throw DimensionError("kron_power of non-square matrix");
	Matrix out = Matrix::identity(m.field(), 1);
	for (unsigned i = 0; i < t; ++i)
		out = kron(out, m);
	return out;
}

Vec tensor_apply(const Matrix &m, unsigned t, std::span<const Elem> u)
{
	if (!m.is_square())
		throw DimensionError("tensor_apply needs a square kernel");
	const std::size_t k = m.rows();
	const std::uint64_t n = checked_pow(k, t);
	if (n != u.size())
		throw DimensionError("tensor_apply: vector length " + std::to_string(u.size()) + " != k^t");
	const Field &f = m.field();
	Vec v(u.begin(), u.end());
	std::vector<Elem> in(k), out(k);
	for (std::uint64_t stride = 1; stride < n; stride *= k) {
		for (std::uint64_t block = 0; block < n; block += k * stride) {
			for (std::uint64_t off = 0; off < stride; ++off) {
				for (std::size_t s = 0; s < k; ++s)
					in[s] = v[block + s * stride + off];
				std::fill(out.begin(), out.end(), 0);
				for (std::size_t s = 0; s < k; ++s) {
					if (in[s] == 0)
						continue;
					for (std::size_t a = 0; a < k; ++a)
						out[a] = f.add(out[a], f.mul(in[s], m(s, a)));
				}
				for (std::size_t a = 0; a < k; ++a)
					v[block + a * stride + off] = out[a];
			}
		}
	}
	return v;
}

PluDecomposition plu_decompose(const Matrix &m)
{
	if (!m.is_square())
		throw DimensionError("PLU of non-square matrix");
	const Field &f = m.field();
	const std::size_t k = m.rows();
	std::vector<std::size_t> perm(k);
	std::iota(perm.begin(), perm.end(), 0);
	Matrix upper = m;
	Matrix lower(f, k, k);
	for (std::size_t c = 0; c < k; ++c) {
		std::size_t p = c;
		while (p < k && upper(p, c) == 0)
			++p;
		if (p == k)
			throw DomainError("not invertible");
		if (p != c) {
			std::swap(perm[p], perm[c]);
			for (std::size_t j = 0; j < k; ++j)
				std::swap(upper(p, j), upper(c, j));
			for (std::size_t j = 0; j < c; ++j)
				std::swap(lower(p, j), lower(c, j));
		}
		Elem pivot_inv = f.inv(upper(c, c));
		for (std::size_t i = c + 1; i < k; ++i) {
			if (upper(i, c) == 0)
				continue;
			Elem factor = f.mul(upper(i, c), pivot_inv);
			lower(i, c) = factor;
			for (std::size_t j = c; j < k; ++j)
				upper(i, j) = f.sub(upper(i, j), f.mul(factor, upper(c, j)));
		}
	}
	for (std::size_t i = 0; i < k; ++i)
		lower(i, i) = 1;
	return {std::move(perm), std::move(lower), std::move(upper)};
}

void index_to_digits(std::uint64_t index, std::uint32_t q, std::span<Elem> out)
{
	for (auto &d : out) {
		d = static_cast<Elem>(index % q);
		index /= q;
	}
}

std::uint64_t checked_pow(std::uint64_t base, unsigned exp)
{
	std::uint64_t r = 1;
	for (unsigned i = 0; i < exp; ++i) {
		if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base)
			return std::numeric_limits<std::uint64_t>::max();
		r *= base;
	}
	return r;
}

} // namespace polarlab
