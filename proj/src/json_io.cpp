#include "polarlab/json_io.hpp"

#include "polarlab/errors.hpp"

#include <cmath>

namespace polarlab {

namespace {

// JSON has no infinity; unbounded exponents are written as "inf".
Json number_or_inf(double v)
{
	if (std::isinf(v))
		return v > 0 ? "inf" : "-inf";
	return v;
}

template <typename T>
T field_of(const Json &j, const char *key)
{
	if (!j.is_object() || !j.contains(key))
		throw DomainError(std::string("missing JSON field '") + key + "'");
	try {
		return j.at(key).get<T>();
	} catch (const nlohmann::json::exception &) {
		throw DomainError(std::string("JSON field '") + key + "' has the wrong type");
	}
}

} // namespace

Json to_json(const Matrix &m)
{
	return Json{{"q", m.q()}, {"rows", m.rows()}, {"cols", m.cols()}, {"entries", m.entries()}};
}

Matrix matrix_from_json(const Json &j)
{
	const auto q = field_of<std::int64_t>(j, "q");
	const auto rows = field_of<std::int64_t>(j, "rows");
	const auto cols = field_of<std::int64_t>(j, "cols");
	const auto raw = field_of<std::vector<std::int64_t>>(j, "entries");
	if (q < 2 || q > std::int64_t(UINT32_MAX) || rows < 0 || cols < 0)
		throw DomainError("matrix JSON has invalid q or shape");
	Vec entries;
	for (auto e : raw) {
		if (e < 0 || e >= q)
			throw DomainError("matrix entry " + std::to_string(e) + " not in [0, q)");
		entries.push_back(static_cast<Elem>(e));
	}
	return Matrix(Field(static_cast<std::uint32_t>(q)), std::size_t(rows), std::size_t(cols), std::move(entries));
}

Json to_json(const Channel &c)
{
	if (c.parameter() && c.kind() != ChannelKind::general)
		return Json{{"kind", c.kind() == ChannelKind::erasure ? "erasure" : "qsc"},
		            {"q", c.q()},
		            {"param", *c.parameter()}};
	Json w = Json::array();
	for (Elem x = 0; x < c.q(); ++x)
		w.push_back(c.row(x));
	return Json{{"kind", "table"}, {"q", c.q()}, {"w", w}};
}

Channel channel_from_json(const Json &j)
{
	const auto q = field_of<std::uint32_t>(j, "q");
	const std::string kind = j.contains("kind") ? field_of<std::string>(j, "kind") : "table";
	if (kind == "qsc")
		return make_qsc(q, field_of<double>(j, "param"));
	if (kind == "erasure")
		return make_erasure(q, field_of<double>(j, "param"));
	if (kind == "table")
		return Channel(Field(q), field_of<std::vector<std::vector<double>>>(j, "w"));
	throw DomainError("unknown channel kind '" + kind + "'");
}

Json to_json(const CodeDistance &d)
{
	if (d.is_infinite())
		return "inf";
	return d.value();
}

Json to_json(const ContainmentWitness &w)
{
	return Json{{"target", to_json(w.target)},      {"perm", w.perm}, {"transform", to_json(w.transform)},
	            {"alpha", w.alpha},                 {"useful", w.useful},
	            {"witnessed_index", w.witnessed_index}};
}

Json to_json(const KernelReport &r)
{
	Json j{{"kernel", to_json(r.kernel)}, {"mixing", r.mixing}};
	if (r.mixing_bruteforce)
		j["mixing_bruteforce"] = *r.mixing_bruteforce;
	j["parity_columns"] = r.parity_columns;
	j["distance"] = to_json(r.distance);
	j["exponents"] = r.exponents.degree;
	j["leading_constants"] = r.exponents.constant;
	j["eta"] = r.exponents.eta;
	j["b"] = r.exponents.b;
	j["witness"] = r.witness ? to_json(*r.witness) : Json(nullptr);
	j["construction"] = r.construction;
	return j;
}

Json profile_json(const EntropyProfile &p, const std::vector<double> &exponents)
{
	Json ex = Json::array();
	for (double e : exponents)
		ex.push_back(number_or_inf(e));
	return Json{{"h", p.h}, {"sum", p.sum()}, {"per_index_exponents", ex}};
}

} // namespace polarlab
