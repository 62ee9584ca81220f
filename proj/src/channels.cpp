#include "polarlab/channels.hpp"

#include "polarlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace polarlab {

std::string to_string(ChannelKind kind)
{
	switch (kind) {
	case ChannelKind::additive: return "additive";
	case ChannelKind::erasure: return "erasure";
	case ChannelKind::general: return "general";
	}
	return "general";
}

Channel::Channel(Field f, std::vector<std::vector<double>> table, ChannelKind kind)
    : Channel(f, std::move(table), kind, true)
{
}

Channel Channel::unchecked(Field f, std::vector<std::vector<double>> table)
{
	return Channel(f, std::move(table), ChannelKind::general, false);
}

Channel::Channel(Field f, std::vector<std::vector<double>> table, ChannelKind kind, bool check)
    : field_(f), table_(std::move(table)), kind_(kind)
{
	if (table_.size() != f.q())
		throw DimensionError("channel table needs one row per field element");
	const std::size_t m = table_.front().size();
	if (m == 0)
		throw DimensionError("channel needs at least one output");
	for (const auto &row : table_) {
		if (row.size() != m)
			throw DimensionError("ragged channel table");
		double sum = 0.0;
		for (double p : row) {
			if (!(p >= 0.0))
				throw DomainError("negative or NaN transition probability");
			sum += p;
		}
		if (std::abs(sum - 1.0) > 1e-12)
			throw DomainError("channel row does not sum to 1");
	}
	if (check) {
		auto cert = validate_symmetric(*this);
		if (!cert.symmetric)
			throw DomainError("channel is not symmetric: " + cert.reason);
	}
}

Channel make_qsc(std::uint32_t q, double eps)
{
	if (!(eps >= 0.0 && eps <= 1.0))
		throw DomainError("qsc parameter outside [0, 1]");
	Field f(q);
	std::vector<std::vector<double>> w(q, std::vector<double>(q, eps / (q - 1)));
	for (std::uint32_t x = 0; x < q; ++x)
		w[x][x] = 1.0 - eps;
	Channel c(f, std::move(w), ChannelKind::additive);
	c.param_ = eps;
	return c;
}

Channel make_erasure(std::uint32_t q, double z)
{
	if (!(z >= 0.0 && z <= 1.0))
		throw DomainError("erasure probability outside [0, 1]");
	Field f(q);
	std::vector<std::vector<double>> w(q, std::vector<double>(q + 1, 0.0));
	for (std::uint32_t x = 0; x < q; ++x) {
		w[x][x] = 1.0 - z;
		w[x][q] = z;
	}
	Channel c(f, std::move(w), ChannelKind::erasure);
	c.param_ = z;
	return c;
}

SymmetryCertificate validate_symmetric(const Channel &c, double tol)
{
	SymmetryCertificate cert;
	const std::uint32_t q = c.q();
	const std::size_t m = c.outputs();

	// Sorting each row turns the bijection search into a pairing of order
	// statistics: two rows admit σ iff their sorted values agree.
	std::vector<std::vector<std::size_t>> order(q);
	for (Elem x = 0; x < q; ++x) {
		order[x].resize(m);
		std::iota(order[x].begin(), order[x].end(), 0);
		std::stable_sort(order[x].begin(), order[x].end(),
		                 [&](std::size_t a, std::size_t b) { return c.prob(a, x) < c.prob(b, x); });
	}

	cert.bijections.assign(std::size_t(q) * q, {});
	for (Elem a = 0; a < q; ++a)
		for (Elem b = 0; b < q; ++b) {
			std::vector<std::size_t> sigma(m);
			for (std::size_t i = 0; i < m; ++i) {
				std::size_t ya = order[a][i], yb = order[b][i];
				if (std::abs(c.prob(ya, a) - c.prob(yb, b)) > tol) {
					cert.violation = std::pair(a, b);
					cert.reason = "rows " + std::to_string(a) + " and " + std::to_string(b) +
					              " have different value multisets";
					cert.bijections.clear();
					return cert;
				}
				sigma[ya] = yb;
			}
			cert.bijections[std::size_t(a) * q + b] = std::move(sigma);
		}

	// Outputs whose columns carry the same multiset form one sub-channel; each
	// sub-channel must again have rows that are permutations of each other.
	std::map<std::vector<double>, std::vector<std::size_t>> groups;
	for (std::size_t y = 0; y < m; ++y) {
		std::vector<double> col(q);
		for (Elem x = 0; x < q; ++x)
			col[x] = c.prob(y, x);
		std::sort(col.begin(), col.end());
		for (auto &v : col)
			v = std::round(v / tol) * tol;
		groups[col].push_back(y);
	}
	for (const auto &[key, outs] : groups) {
		std::vector<double> ref;
		for (Elem x = 0; x < q; ++x) {
			std::vector<double> row;
			for (auto y : outs)
				row.push_back(c.prob(y, x));
			std::sort(row.begin(), row.end());
			if (x == 0) {
				ref = row;
				continue;
			}
			for (std::size_t i = 0; i < row.size(); ++i)
				if (std::abs(row[i] - ref[i]) > tol) {
					cert.violation = std::pair(Elem(0), x);
					cert.reason = "outputs do not split into symmetric sub-channels";
					cert.bijections.clear();
					return cert;
				}
		}
	}
	cert.symmetric = true;
	return cert;
}

double capacity(const Channel &c)
{
	if (!validate_symmetric(c).symmetric)
		throw DomainError("capacity requires a symmetric channel");
	const std::uint32_t q = c.q();
	double info = 0.0;
	for (std::size_t y = 0; y < c.outputs(); ++y) {
		double py = 0.0;
		for (Elem x = 0; x < q; ++x)
			py += c.prob(y, x) / q;
		for (Elem x = 0; x < q; ++x) {
			double w = c.prob(y, x);
			if (w > 0.0)
				info += (w / q) * std::log2(w / py);
		}
	}
	return std::clamp(info / std::log2(double(q)), 0.0, 1.0);
}

std::size_t sample_output(const Channel &c, Elem x, Rng &rng)
{
	const auto &row = c.row(x);
	double u = uniform01(rng);
	double acc = 0.0;
	std::size_t last = 0;
	for (std::size_t y = 0; y < row.size(); ++y) {
		if (row[y] <= 0.0)
			continue;
		acc += row[y];
		last = y;
		if (u < acc)
			return y;
	}
	return last;
}

double h2(double p)
{
	if (p <= 0.0 || p >= 1.0)
		return 0.0;
	return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double bernoulli_q_entropy(std::uint32_t q, double eps)
{
	double h = 0.0;
	if (eps < 1.0)
		h -= (1.0 - eps) * std::log2(1.0 - eps);
	if (eps > 0.0)
		h -= eps * std::log2(eps / (q - 1));
	return h / std::log2(double(q));
}

Channel parse_channel(const std::string &spec, std::uint32_t q)
{
	auto colon = spec.find(':');
	if (colon == std::string::npos)
		throw DomainError("channel spec must look like kind:param, got '" + spec + "'");
	std::string kind = spec.substr(0, colon);
	double param;
	try {
		std::size_t used = 0;
		param = std::stod(spec.substr(colon + 1), &used);
		if (used != spec.size() - colon - 1)
			throw std::invalid_argument("trailing characters");
	} catch (const std::exception &) {
		throw DomainError("bad channel parameter in '" + spec + "'");
	}
	if (kind == "erasure" || kind == "bec")
		return make_erasure(q, param);
	if (kind == "qsc" || kind == "bsc")
		return make_qsc(q, param);
	throw DomainError("unknown channel kind '" + kind + "'");
}

} // namespace polarlab
