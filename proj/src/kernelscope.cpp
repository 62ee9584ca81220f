#include "polarlab/kernelscope.hpp"

#include "polarlab/errors.hpp"
#include "polarlab/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace polarlab {

namespace {

bool is_permutation_of(std::span<const std::size_t> perm, std::size_t n)
{
	if (perm.size() != n)
		return false;
	std::vector<bool> seen(n, false);
	for (auto p : perm) {
		if (p >= n || seen[p])
			return false;
		seen[p] = true;
	}
	return true;
}

std::optional<std::size_t> last_nonzero_row(const Matrix &t)
{
	for (std::size_t r = t.rows(); r-- > 0;)
		if (weight(t.row(r)) != 0)
			return r;
	return std::nullopt;
}

// Fills alpha / useful / witnessed_index from the shape of T.
void classify_last_row(ContainmentWitness &w)
{
	w.useful = false;
	w.alpha = 0;
	auto r = last_nonzero_row(w.transform);
	if (!r || w.transform.cols() == 0)
		return;
	auto row = w.transform.row(*r);
	const std::size_t m = row.size();
	if (row[m - 1] != 0 && weight(row) == 1) {
		w.useful = true;
		w.alpha = row[m - 1];
		w.witnessed_index = *r;
	}
}

void require_square(const Matrix &m, const char *what)
{
	if (!m.is_square())
		throw DimensionError(std::string(what) + " needs a square matrix");
}

} // namespace

WitnessCheck verify_containment(const Matrix &m, const ContainmentWitness &w)
{
	const std::size_t k = m.rows();
	const std::size_t r = w.target.rows();
	if (!m.is_square() || w.target.cols() != r || w.transform.rows() != k || w.transform.cols() != r || r > k)
		return {false, "shape mismatch"};
	if (w.target.field() != m.field() || w.transform.field() != m.field())
		return {false, "field mismatch"};
	if (!is_permutation_of(w.perm, k))
		return {false, "perm is not a permutation"};

	Matrix prod = permute_rows(m, w.perm) * w.transform;
	for (std::size_t i = 0; i < k; ++i)
		for (std::size_t j = 0; j < r; ++j) {
			Elem want = i < r ? w.target(i, j) : 0;
			if (prod(i, j) != want)
				return {false, "P*M*T differs from [R; 0] at (" + std::to_string(i) + ", " + std::to_string(j) + ")"};
		}

	if (w.useful) {
		auto last = last_nonzero_row(w.transform);
		if (!last)
			return {false, "T is zero"};
		auto row = w.transform.row(*last);
		if (w.alpha == 0 || row[r - 1] != w.alpha || weight(row) != 1)
			return {false, "last nonzero row of T is not alpha * e_m"};
		if (*last != w.witnessed_index)
			return {false, "witnessed index does not match the last nonzero row"};
	}
	return {true, {}};
}

bool is_mixing_bruteforce(const Matrix &m)
{
	require_square(m, "is_mixing");
	const std::size_t k = m.rows();
	if (k > 8)
		throw BudgetExceeded("brute-force mixing check limited to k <= 8");
	if (!m.is_invertible())
		return false;
	std::vector<std::size_t> perm(k);
	std::iota(perm.begin(), perm.end(), 0);
	do {
		if (permute_rows(m, perm).is_upper_triangular())
			return false;
	} while (std::next_permutation(perm.begin(), perm.end()));
	return true;
}

bool is_mixing_plu(const Matrix &m)
{
	require_square(m, "is_mixing");
	if (!m.is_invertible())
		return false;
	return !plu_decompose(m).lower.is_diagonal();
}

bool is_mixing(const Matrix &m)
{
	return is_mixing_plu(m);
}

Matrix containment_target(const Field &f, Elem alpha)
{
	Matrix h = Matrix::identity(f, 2);
	h(1, 0) = alpha;
	return h;
}

ContainmentWitness containment_in_lower(const Matrix &lower)
{
	require_square(lower, "containment");
	const std::size_t k = lower.rows();
	const Field &f = lower.field();

	std::optional<std::size_t> s;
	for (std::size_t c = k; c-- > 0;) {
		if (weight(lower.column(c)) > 1) {
			s = c;
			break;
		}
	}
	if (!s)
		throw DomainError("no containment");
	std::size_t r = *s;
	for (std::size_t i = k; i-- > *s + 1;)
		if (lower(i, *s) != 0) {
			r = i;
			break;
		}

	// Columns after s are unit vectors, so L·T = [e_s + α e_r | e_r].
	ContainmentWitness w{containment_target(f, lower(r, *s)), {}, Matrix(f, k, 2), 1, true, r};
	w.transform(*s, 0) = 1;
	for (std::size_t i = *s + 1; i < r; ++i)
		w.transform(i, 0) = f.neg(lower(i, *s));
	w.transform(r, 1) = 1;

	w.perm = {*s, r};
	for (std::size_t i = 0; i < k; ++i)
		if (i != *s && i != r)
			w.perm.push_back(i);
	return w;
}

ContainmentWitness find_useful_containment_H(const Matrix &m)
{
	require_square(m, "containment");
	if (!is_mixing(m))
		throw DomainError("no containment");
	const auto plu = plu_decompose(m);
	const Field &f = m.field();
	const std::size_t k = m.rows();

	// P·M = L·U with U = D·V, D diagonal and V unit upper-triangular.
	ContainmentWitness w = containment_in_lower(plu.lower);
	for (auto &p : w.perm)
		p = plu.perm[p];

	// Witness for P⁻¹·L·D: scale the rows of T by D⁻¹.
	Matrix v = plu.upper;
	for (std::size_t i = 0; i < k; ++i) {
		Elem dinv = f.inv(plu.upper(i, i));
		for (std::size_t c = 0; c < k; ++c) {
			v(i, c) = f.mul(v(i, c), dinv);
			if (c < w.transform.cols())
				w.transform(i, c) = f.mul(w.transform(i, c), dinv);
		}
	}
	classify_last_row(w);

	// M = (P⁻¹·L·D)·V, so transporting along V⁻¹ witnesses M itself.
	return transport_witness(w, v.inverse());
}

ContainmentWitness transport_witness(const ContainmentWitness &w, const Matrix &u)
{
	if (!u.is_square() || u.rows() != w.transform.rows())
		throw DimensionError("transport matrix must be k x k");
	if (!u.is_upper_triangular())
		throw DomainError("transport matrix is not upper-triangular");
	for (std::size_t i = 0; i < u.rows(); ++i)
		if (u(i, i) != 1)
			throw DomainError("transport matrix is not unit upper-triangular");
	ContainmentWitness out = w;
	out.transform = u * w.transform;
	classify_last_row(out);
	if (w.useful && !out.useful)
		throw SearchFailed("transport lost usefulness");
	return out;
}

ContainmentWitness tensor_witness(const ContainmentWitness &w)
{
	const std::size_t k = w.transform.rows();
	const std::size_t m = w.target.rows();
	if (w.target.cols() != m || w.transform.cols() != m || m > k || !is_permutation_of(w.perm, k))
		throw DomainError("invalid witness");
	ContainmentWitness check = w;
	classify_last_row(check);
	if (!w.useful || !check.useful || check.alpha != w.alpha || check.witnessed_index != w.witnessed_index)
		throw DomainError("invalid witness: not useful");

	const Field &f = w.target.field();
	ContainmentWitness out{kron(w.target, w.target), {}, kron(w.transform, w.transform), 0, true, 0};

	// Rows (i1, i2) with both digits below m carry R⊗²; they move to the top.
	std::vector<std::size_t> top, rest;
	for (std::size_t i1 = 0; i1 < k; ++i1)
		for (std::size_t i2 = 0; i2 < k; ++i2)
			(i1 < m && i2 < m ? top : rest).push_back(i1 * k + i2);
	top.insert(top.end(), rest.begin(), rest.end());
	out.perm.resize(k * k);
	for (std::size_t i = 0; i < k * k; ++i) {
		std::size_t i1 = top[i] / k, i2 = top[i] % k;
		out.perm[i] = w.perm[i1] * k + w.perm[i2];
	}
	out.alpha = f.mul(w.alpha, w.alpha);
	out.useful = true;
	out.witnessed_index = w.witnessed_index * k + w.witnessed_index;
	return out;
}

namespace {

// The minimum weight of a nonzero left-kernel word is the size of the smallest
// linearly dependent set of rows. Supports are tried by increasing size.
CodeDistance smallest_dependent_rows(const Matrix &m0, std::uint64_t budget)
{
	const std::size_t k = m0.rows();
	std::uint64_t spent = 0;
	for (std::size_t w = 1; w <= k; ++w) {
		std::vector<std::size_t> rows(w);
		std::iota(rows.begin(), rows.end(), 0);
		while (true) {
			if (++spent > budget)
				throw BudgetExceeded("left-kernel distance search exceeded budget " + std::to_string(budget));
			if (m0.select_rows(rows).rank() < w)
				return CodeDistance(w);
			std::size_t i = w;
			while (i > 0 && rows[i - 1] == k - w + i - 1)
				--i;
			if (i == 0)
				break;
			++rows[i - 1];
			for (std::size_t j = i; j < w; ++j)
				rows[j] = rows[j - 1] + 1;
		}
	}
	return CodeDistance::infinite();
}

} // namespace

CodeDistance left_kernel_distance(const Matrix &m0, std::uint64_t budget)
{
	const Matrix basis = m0.left_null_space();
	const std::size_t d = basis.rows();
	const std::size_t k = m0.rows();
	const std::uint32_t q = m0.q();
	if (d == 0)
		return CodeDistance::infinite();
	const std::uint64_t words = checked_pow(q, unsigned(d));
	if (words > budget)
		return smallest_dependent_rows(m0, budget);

	// Odometer over coefficient vectors. Moving a digit from c to c+1 (mod q)
	// always adds one copy of its basis row, including the wrap q-1 -> 0.
	const Field &f = m0.field();
	Vec coef(d, 0), word(k, 0);
	std::size_t best = k;
	for (std::uint64_t n = 1; n < words; ++n) {
		for (std::size_t i = 0; i < d; ++i) {
			auto row = basis.row(i);
			for (std::size_t c = 0; c < k; ++c)
				word[c] = f.add(word[c], row[c]);
			coef[i] = f.add(coef[i], 1);
			if (coef[i] != 0)
				break;
		}
		best = std::min(best, weight(word));
	}
	return CodeDistance(best);
}

Matrix hamming7_kernel()
{
	Field f(2);
	Matrix m(f, 7, 7);
	for (std::size_t i = 0; i < 7; ++i) {
		std::size_t v = i + 1;
		for (std::size_t b = 0; b < 3; ++b)
			m(i, b) = (v >> (2 - b)) & 1;
	}
	for (std::size_t j = 0; j < 4; ++j)
		m(j, 3 + j) = 1;
	return m;
}

MlFailure ml_failure_exact(const Matrix &p, double eps, std::uint64_t budget)
{
	if (!(eps >= 0.0) || eps >= 0.5)
		throw DomainError("min-weight decoding analysis needs 0 <= eps < 1/2");
	const std::size_t k = p.rows();
	const std::size_t s = p.cols();
	const std::uint32_t q = p.q();
	const std::uint64_t n = checked_pow(q, unsigned(k));
	if (n > budget)
		throw BudgetExceeded("q^k = " + std::to_string(n) + " sources exceed budget " + std::to_string(budget));
	const std::uint64_t syndromes = checked_pow(q, unsigned(s));

	MlFailure out;
	out.distance = left_kernel_distance(p);

	std::vector<std::uint32_t> syn(n);
	std::vector<std::uint8_t> wt(n);
	std::vector<std::uint32_t> min_wt(std::min(syndromes, n), std::numeric_limits<std::uint32_t>::max());
	std::vector<std::uint32_t> min_count(min_wt.size(), 0);
	// syndromes can exceed n only when s > k; index them through a map then.
	const bool dense = syndromes <= n;
	std::vector<std::uint64_t> syn_full;
	if (!dense)
		syn_full.resize(n);

	Vec u(k);
	for (std::uint64_t idx = 0; idx < n; ++idx) {
		index_to_digits(idx, q, u);
		Vec y = std::span<const Elem>(u) * p;
		std::uint64_t code = 0;
		for (std::size_t c = s; c-- > 0;)
			code = code * q + y[c];
		wt[idx] = static_cast<std::uint8_t>(weight(u));
		if (dense)
			syn[idx] = static_cast<std::uint32_t>(code);
		else
			syn_full[idx] = code;
	}
	if (!dense) {
		// Compress syndromes to dense ids.
		std::vector<std::uint64_t> keys = syn_full;
		std::sort(keys.begin(), keys.end());
		keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
		for (std::uint64_t idx = 0; idx < n; ++idx)
			syn[idx] = static_cast<std::uint32_t>(std::lower_bound(keys.begin(), keys.end(), syn_full[idx]) - keys.begin());
		min_wt.assign(keys.size(), std::numeric_limits<std::uint32_t>::max());
		min_count.assign(keys.size(), 0);
	}
	for (std::uint64_t idx = 0; idx < n; ++idx) {
		auto &mw = min_wt[syn[idx]];
		if (wt[idx] < mw) {
			mw = wt[idx];
			min_count[syn[idx]] = 1;
		} else if (wt[idx] == mw) {
			++min_count[syn[idx]];
		}
	}

	const double nonzero = q > 1 ? eps / (q - 1) : 0.0;
	for (std::uint64_t idx = 0; idx < n; ++idx) {
		const std::uint32_t w = wt[idx];
		const bool strict = w > min_wt[syn[idx]];
		const bool tie = w == min_wt[syn[idx]] && min_count[syn[idx]] > 1;
		if (!strict && !tie)
			continue;
		double prob = std::pow(1.0 - eps, double(k - w)) * std::pow(nonzero, double(w));
		out.failure += prob;
		if (strict)
			out.strict_failure += prob;
	}
	out.bound = out.distance.is_infinite() ? 0.0 : std::pow(nonzero, double(out.distance.value()));
	out.bound_holds = out.failure >= out.bound * (1.0 - 1e-12);
	return out;
}

KernelReport analyze_kernel(const Matrix &m, std::size_t parity_columns, std::string construction)
{
	require_square(m, "analyze_kernel");
	if (parity_columns > m.cols())
		throw DimensionError("more parity columns than kernel columns");
	KernelReport rep{m, is_mixing(m), std::nullopt, std::nullopt, parity_columns, CodeDistance::infinite(), {},
	                 std::move(construction)};
	if (m.rows() <= 7)
		rep.mixing_bruteforce = is_mixing_bruteforce(m);
	if (rep.mixing)
		rep.witness = find_useful_containment_H(m);
	std::vector<std::size_t> cols(parity_columns);
	std::iota(cols.begin(), cols.end(), 0);
	rep.distance = left_kernel_distance(m.select_columns(cols));
	if (m.is_invertible())
		rep.exponents = leading_exponents(erasure_polynomials(m));
	return rep;
}

namespace {

Matrix random_matrix(const Field &f, std::size_t rows, std::size_t cols, Rng &rng)
{
	Matrix out(f, rows, cols);
	for (std::size_t r = 0; r < rows; ++r)
		for (std::size_t c = 0; c < cols; ++c)
			out(r, c) = static_cast<Elem>(uniform_below(rng, f.q()));
	return out;
}

Matrix extended_hamming8_checks()
{
	Field f(2);
	Matrix m0(f, 8, 4);
	for (std::size_t i = 0; i < 8; ++i) {
		m0(i, 0) = 1;
		for (std::size_t b = 0; b < 3; ++b)
			m0(i, 1 + b) = (i >> (2 - b)) & 1;
	}
	return m0;
}

} // namespace

std::optional<Matrix> complete_to_mixing(const Matrix &m0, Rng &rng, std::size_t attempts)
{
	const std::size_t k = m0.rows(), s = m0.cols();
	if (s > k || m0.rank() != s)
		return std::nullopt;
	if (s == k)
		return is_mixing(m0) ? std::optional<Matrix>(m0) : std::nullopt;
	for (std::size_t a = 0; a < attempts; ++a) {
		Matrix m = m0.hcat(random_matrix(m0.field(), k, k - s, rng));
		if (is_mixing(m))
			return m;
	}
	return std::nullopt;
}

HighDistanceKernel build_high_distance_kernel(std::uint32_t q, std::size_t k, std::size_t b, std::uint64_t seed,
                                              std::size_t attempts)
{
	const Field f(q);
	if (k < 2)
		throw DomainError("mixing kernels need k >= 2");
	// Singleton: a length-k left kernel of s checks has distance at most s+1,
	// and at least one column is left for the mixing completion.
	if (2 * b + 1 > k)
		throw DomainError("no k x s parity block with s < k reaches distance > 2b (Singleton bound)");

	auto finish = [](Matrix m, std::size_t s, std::string how, std::size_t used) {
		KernelReport report = analyze_kernel(m, s, how);
		CodeDistance d = report.distance;
		return HighDistanceKernel{std::move(m), s, d, std::move(how), used, std::move(report)};
	};

	Rng rng = stream(seed, 0);
	if (q == 2 && k == 7 && b == 1)
		return finish(hamming7_kernel(), 3, "hamming7", 0);
	if (q == 2 && k == 8 && b == 1) {
		auto m = complete_to_mixing(extended_hamming8_checks(), rng, attempts);
		if (m)
			return finish(*m, 4, "extended-hamming8", 0);
	}

	CodeDistance best = CodeDistance(0);
	std::size_t used = 0;
	const std::size_t s_min = 2 * b;
	const std::size_t per_s = std::max<std::size_t>(1, attempts / (k - s_min));
	for (std::size_t s = s_min; s < k; ++s) {
		for (std::size_t a = 0; a < per_s; ++a, ++used) {
			Matrix m0 = random_matrix(f, k, s, rng);
			if (m0.rank() != s)
				continue;
			CodeDistance d = left_kernel_distance(m0);
			if (best < d)
				best = d;
			if (!d.exceeds(2 * b))
				continue;
			if (auto m = complete_to_mixing(m0, rng, 1000))
				return finish(*m, s, "random-search", used + 1);
		}
	}
	throw SearchFailed("no mixing kernel with parity distance > " + std::to_string(2 * b) + " after " +
	                   std::to_string(used) + " attempts; best distance found " + best.to_string());
}

ColumnSelection extract_high_distance_columns(const Matrix &m, unsigned t0, std::size_t s, std::uint64_t budget)
{
	require_square(m, "column extraction");
	const std::uint64_t n64 = checked_pow(m.rows(), t0);
	if (n64 > 4096)
		throw BudgetExceeded("k^t0 = " + std::to_string(n64) + " columns exceed the extraction limit 4096");
	const std::size_t n = static_cast<std::size_t>(n64);
	if (s > n)
		throw DimensionError("cannot choose more columns than M^t0 has");
	const Matrix big = kron_power(m, t0);

	auto distance_of = [&](const std::vector<std::size_t> &cols) {
		return left_kernel_distance(big.select_columns(cols), budget);
	};

	ColumnSelection best;
	if (n <= 16) {
		// Lexicographic combinations; strict improvement keeps the first best.
		std::vector<std::size_t> cols(s);
		std::iota(cols.begin(), cols.end(), 0);
		bool first = true;
		while (true) {
			CodeDistance d = distance_of(cols);
			if (first || best.distance < d) {
				best.columns = cols;
				best.distance = d;
				first = false;
			}
			std::size_t i = s;
			while (i > 0 && cols[i - 1] == n - s + i - 1)
				--i;
			if (i == 0)
				break;
			++cols[i - 1];
			for (std::size_t j = i; j < s; ++j)
				cols[j] = cols[j - 1] + 1;
		}
	} else {
		best.heuristic = true;
		std::vector<bool> used(n, false);
		best.distance = CodeDistance(1);
		for (std::size_t step = 0; step < s; ++step) {
			std::optional<std::size_t> pick;
			CodeDistance pick_d(0);
			for (std::size_t c = 0; c < n; ++c) {
				if (used[c])
					continue;
				auto cols = best.columns;
				cols.push_back(c);
				CodeDistance d = distance_of(cols);
				if (!pick || pick_d < d) {
					pick = c;
					pick_d = d;
				}
			}
			used[*pick] = true;
			best.columns.push_back(*pick);
			best.distance = pick_d;
		}
	}

	std::vector<std::size_t> order = best.columns;
	for (std::size_t c = 0; c < n; ++c)
		if (std::find(best.columns.begin(), best.columns.end(), c) == best.columns.end())
			order.push_back(c);
	best.padded_mixing = is_mixing(big.select_columns(order));
	return best;
}

} // namespace polarlab
