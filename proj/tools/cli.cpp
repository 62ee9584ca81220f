#include "cli.hpp"

#include "polarlab/codec.hpp"
#include "polarlab/entropy.hpp"
#include "polarlab/errors.hpp"
#include "polarlab/json_io.hpp"
#include "polarlab/kernelscope.hpp"
#include "polarlab/martingale.hpp"
#include "polarlab/version.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

namespace polarlab::cli {

namespace {

class UsageError : public std::invalid_argument
{
public:
	using std::invalid_argument::invalid_argument;
};

struct Common
{
	std::string kernel = "arikan";
	std::uint32_t q = 2;
	std::optional<std::size_t> parity_columns;
	std::uint64_t seed = 1;
	unsigned workers = 1;
	std::string output;
};

struct ResolvedKernel
{
	Matrix matrix;
	std::size_t parity_columns = 0;
	std::string name;
};

std::optional<std::uint64_t> budget_override()
{
	const char *env = std::getenv("POLARLAB_BUDGET");
	if (!env || !*env)
		return std::nullopt;
	char *end = nullptr;
	errno = 0;
	unsigned long long v = std::strtoull(env, &end, 10);
	if (errno || *end || v == 0)
		throw UsageError(fmt::format("POLARLAB_BUDGET must be a positive integer, got '{}'", env));
	return v;
}

std::uint64_t budget_or(std::uint64_t fallback)
{
	return budget_override().value_or(fallback);
}

Json read_json_file(const std::string &path, const char *what)
{
	if (!std::filesystem::is_regular_file(path))
		throw UsageError(fmt::format("{} file '{}' does not exist", what, path));
	std::ifstream in(path);
	try {
		return Json::parse(in);
	} catch (const Json::parse_error &e) {
		throw UsageError(fmt::format("{} file '{}' is not valid JSON: {}", what, path, e.what()));
	}
}

Json parse_literal(const std::string &text, const char *what)
{
	try {
		return Json::parse(text);
	} catch (const Json::parse_error &e) {
		throw UsageError(fmt::format("{} literal is not valid JSON: {}", what, e.what()));
	}
}

// Built-in name, "high-distance:K:B", JSON literal or file path.
ResolvedKernel resolve_kernel(const std::string &source, std::uint32_t q, std::uint64_t seed)
{
	const Field f(q);
	const Matrix arikan = Matrix::from_rows(f, {{1, 0}, {1, 1}});
	if (source == "arikan")
		return {arikan, 1, source};
	if (source == "arikan2")
		return {kron(arikan, arikan), 1, source};
	if (source == "hamming7") {
		if (q != 2)
			throw UsageError("the hamming7 kernel is binary; use --q 2");
		return {hamming7_kernel(), 3, source};
	}
	if (source.rfind("high-distance:", 0) == 0) {
		std::size_t k = 0, b = 0;
		char tail = 0;
		if (std::sscanf(source.c_str(), "high-distance:%zu:%zu%c", &k, &b, &tail) != 2)
			throw UsageError("expected high-distance:K:B, got '" + source + "'");
		auto built = build_high_distance_kernel(q, k, b, seed);
		return {built.kernel, built.parity_columns, built.construction};
	}
	Json j = !source.empty() && source.front() == '{' ? parse_literal(source, "kernel")
	                                                  : read_json_file(source, "kernel");
	Matrix m = matrix_from_json(j);
	if (m.q() != q)
		throw UsageError(fmt::format("kernel is over F_{} but --q is {}", m.q(), q));
	return {m, 0, "given"};
}

Channel resolve_channel(const std::string &source, std::uint32_t q)
{
	if (!source.empty() && source.front() == '{') {
		Channel c = channel_from_json(parse_literal(source, "channel"));
		if (c.q() != q)
			throw UsageError(fmt::format("channel is over F_{} but the kernel is over F_{}", c.q(), q));
		return c;
	}
	return parse_channel(source, q);
}

void add_common(CLI::App *sub, Common &c, bool kernel = true)
{
	if (kernel) {
		sub->add_option("--kernel", c.kernel, "arikan | arikan2 | hamming7 | high-distance:K:B | JSON literal | file")
		    ->capture_default_str();
		sub->add_option("--parity-columns", c.parity_columns, "Leading columns treated as parity checks");
	}
	sub->add_option("--q", c.q, "Field size (prime)")->capture_default_str();
	sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
	sub->add_option("--workers", c.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
	sub->add_option("-o,--output", c.output, "Output file (default: standard output)");
}

Json base_spec(const std::string &name, const Common &c, const ResolvedKernel *k)
{
	Json s{{"subcommand", name}};
	if (k) {
		s["kernel_source"] = c.kernel;
		s["kernel"] = to_json(k->matrix);
		s["parity_columns"] = k->parity_columns;
	}
	s["q"] = c.q;
	s["seed"] = c.seed;
	s["workers"] = c.workers;
	if (auto b = budget_override())
		s["budget"] = *b;
	return s;
}

class Sink
{
public:
	Sink(const std::string &path, std::ostream &fallback) : path_(path), fallback_(fallback) {}

	std::ostream &stream() { return buffer_; }

	void commit()
	{
		if (path_.empty()) {
			fallback_ << buffer_.str();
			return;
		}
		std::ofstream file(path_, std::ios::binary);
		if (!file)
			throw std::runtime_error("cannot open output file '" + path_ + "'");
		file << buffer_.str();
	}

private:
	std::string path_;
	std::ostream &fallback_;
	std::ostringstream buffer_;
};

void emit_json(const Common &c, const Json &spec, const Json &body, std::ostream &out)
{
	Json doc{{"provenance", {{"library", "polarlab"}, {"version", kVersion}, {"spec", spec}}}};
	for (auto it = body.begin(); it != body.end(); ++it)
		doc[it.key()] = it.value();
	Sink sink(c.output, out);
	sink.stream() << doc.dump(2) << '\n';
	sink.commit();
}

void csv_header(std::ostream &os, const Json &spec)
{
	fmt::print(os, "# polarlab {}\n# spec {}\n", kVersion, spec.dump());
}

std::string num(double x)
{
	if (std::isinf(x))
		return x > 0 ? "inf" : "-inf";
	if (std::isnan(x))
		return "nan";
	return fmt::format("{}", x);
}

Json number_or_text(double x)
{
	if (std::isfinite(x))
		return x;
	return num(x);
}

// analyze-kernel ----------------------------------------------------------

int analyze_kernel_cmd(const Common &c, std::ostream &out, std::ostream &err)
{
	auto k = resolve_kernel(c.kernel, c.q, c.seed);
	const std::size_t parity = c.parity_columns.value_or(k.parity_columns);
	if (parity > k.matrix.cols())
		throw UsageError("--parity-columns exceeds the kernel size");
	auto report = analyze_kernel(k.matrix, parity, k.name);
	Json spec = base_spec("analyze-kernel", c, &k);
	spec["parity_columns"] = parity;
	emit_json(c, spec, to_json(report), out);
	fmt::print(err, "analyze-kernel: k={} q={} mixing={} distance={}\n", k.matrix.rows(), c.q, report.mixing,
	           report.distance.to_string());
	return 0;
}

// polarize ----------------------------------------------------------------

struct PolarizeArgs
{
	double z = 0.5;
	unsigned t = 10;
	unsigned t_min = 1;
	double lambda = 0.45;
	double gamma = 0.8;
	double threshold = 1e-6;
	std::size_t paths = 0;
};

int polarize_cmd(const Common &c, const PolarizeArgs &a, std::ostream &out, std::ostream &err)
{
	if (a.t_min > a.t)
		throw UsageError("--t-min exceeds --t");
	auto k = resolve_kernel(c.kernel, c.q, c.seed);
	auto polys = erasure_polynomials(k.matrix);
	const std::uint64_t budget = budget_or(kDefaultTreeBudget);

	std::vector<TreeLevel> levels;
	if (a.paths == 0) {
		levels = evolve_levels(polys, a.z, a.t, budget);
	} else {
		for (unsigned t = 0; t <= a.t; ++t)
			levels.push_back(TreeLevel{t, sample_paths(polys, a.z, t, a.paths, c.seed, c.workers), 0});
	}
	levels.erase(levels.begin(), levels.begin() + a.t_min);
	auto report = polarization_report(levels, a.lambda, a.gamma, a.threshold);

	Json spec = base_spec("polarize", c, &k);
	spec.update(Json{{"z", a.z},
	                 {"t_min", a.t_min},
	                 {"t", a.t},
	                 {"lambda", a.lambda},
	                 {"gamma", a.gamma},
	                 {"threshold", a.threshold},
	                 {"mode", a.paths ? "sampled" : "full-tree"},
	                 {"paths", a.paths}});
	Sink sink(c.output, out);
	auto &os = sink.stream();
	csv_header(os, spec);
	os << "t,fraction_exp,fraction_strong,rate_at_threshold,underflow_count\n";
	for (const auto &l : report.levels)
		fmt::print(os, "{},{},{},{},{}\n", l.t, num(l.fraction_exp), num(l.fraction_strong), num(l.rate_at_threshold),
		           l.underflow);
	sink.commit();
	fmt::print(err, "polarize: {} levels, rho_hat={}, rate_at_threshold(t={})={}\n", report.levels.size(),
	           num(report.rho_hat), a.t, num(report.levels.back().rate_at_threshold));
	return 0;
}

// exponents ---------------------------------------------------------------

struct ExponentArgs
{
	std::vector<double> deltas{1e-2, 1e-3, 1e-4};
	std::string source = "erasure";
	std::string method = "auto";
	std::size_t fit_points = 3;
	double b = 1.5;
};

int exponents_cmd(const Common &c, const ExponentArgs &a, std::ostream &out, std::ostream &err)
{
	auto k = resolve_kernel(c.kernel, c.q, c.seed);
	std::string method = a.method;
	if (method == "auto")
		method = a.source == "erasure" ? "polynomial" : "enumerate";
	if (method == "polynomial" && a.source != "erasure")
		throw UsageError("the polynomial method needs the erasure source");

	ExponentFit fit;
	if (method == "polynomial") {
		auto polys = erasure_polynomials(k.matrix);
		std::vector<std::vector<double>> profiles;
		for (double d : a.deltas) {
			if (!(d > 0.0 && d < 1.0))
				throw UsageError("δ values must lie in (0, 1)");
			profiles.push_back(polys.eval_all(d));
		}
		fit = fit_exponents(a.deltas, profiles, a.fit_points);
	} else {
		const std::uint32_t q = c.q;
		SourceFamily family = a.source == "erasure" ? SourceFamily([q](double d) { return erasure_source(q, d); })
		                                            : SourceFamily([q](double d) { return additive_source(q, d); });
		fit = polarization_exponents(k.matrix, family, a.deltas, a.fit_points, budget_or(kDefaultEntropyBudget));
	}

	Json spec = base_spec("exponents", c, &k);
	spec.update(Json{{"deltas", a.deltas},
	                 {"source", a.source},
	                 {"method", method},
	                 {"fit_points", a.fit_points},
	                 {"b", a.b}});
	Json profiles = Json::array();
	for (std::size_t i = 0; i < fit.deltas.size(); ++i) {
		Json p = profile_json(EntropyProfile{fit.profiles[i]});
		p["delta"] = fit.deltas[i];
		profiles.push_back(p);
	}
	Json ex = Json::array();
	for (double e : fit.exponents)
		ex.push_back(number_or_text(e));
	Json body{{"profiles", profiles}, {"exponents", ex}, {"b", a.b}, {"eta_hat", fit.fraction_at_least(a.b)}};
	emit_json(c, spec, body, out);
	fmt::print(err, "exponents: {} indices, fraction with exponent >= {}: {}\n", fit.exponents.size(), num(a.b),
	           num(fit.fraction_at_least(a.b)));
	return 0;
}

// construct / simulate ----------------------------------------------------

struct CodeArgs
{
	std::string channel = "erasure:0.3";
	std::vector<unsigned> t{8};
	std::vector<double> rate;
	std::optional<double> threshold;
	std::size_t genie_trials = 10'000;
	bool zero_frozen = false;
	std::size_t trials = 1000;
	std::string config;
};

ConstructOptions construct_options(const Common &c, const CodeArgs &a)
{
	ConstructOptions o;
	o.seed = c.seed;
	o.genie_trials = a.genie_trials;
	o.zero_frozen = a.zero_frozen;
	o.workers = c.workers;
	o.budget = budget_or(kDefaultTreeBudget);
	return o;
}

Json code_spec(const char *name, const Common &c, const ResolvedKernel &k, const Channel &ch, const CodeArgs &a)
{
	Json spec = base_spec(name, c, &k);
	spec["channel"] = to_json(ch);
	spec["t"] = a.t;
	if (a.threshold)
		spec["threshold"] = *a.threshold;
	else
		spec["rate"] = a.rate;
	spec["genie_trials"] = a.genie_trials;
	spec["zero_frozen"] = a.zero_frozen;
	return spec;
}

int construct_cmd(const Common &c, CodeArgs a, std::ostream &out, std::ostream &err)
{
	if (a.t.size() != 1)
		throw UsageError("construct takes a single --t");
	if (a.threshold.has_value() == !a.rate.empty())
		throw UsageError("give exactly one of --rate or --threshold");
	if (a.rate.size() > 1)
		throw UsageError("construct takes a single --rate");
	auto k = resolve_kernel(c.kernel, c.q, c.seed);
	Channel ch = resolve_channel(a.channel, c.q);
	CodeTarget target = a.threshold ? CodeTarget::with_threshold(*a.threshold) : CodeTarget::with_rate(a.rate[0]);
	auto code = construct_code(k.matrix, ch, a.t[0], target, construct_options(c, a));

	Vec frozen_values;
	for (auto i : code.frozen)
		frozen_values.push_back(code.frozen_values[i]);
	const double cap = capacity(ch);
	const double rate = double(code.message_length()) / double(code.n);
	Json body{{"n", code.n},
	          {"message_length", code.message_length()},
	          {"rate", rate},
	          {"capacity", cap},
	          {"estimator", code.estimator},
	          {"union_bound", code.union_bound()},
	          {"frozen", code.frozen},
	          {"frozen_values", frozen_values},
	          {"info", code.info},
	          {"reliability", code.reliability}};
	emit_json(c, code_spec("construct", c, k, ch, a), body, out);
	fmt::print(err, "construct: N={} K={} rate={} estimator={} union_bound={}\n", code.n, code.message_length(),
	           num(rate), code.estimator, num(code.union_bound()));
	return 0;
}

// Experiment file: {"kernel": name|matrix, "t": int|[...], "channel": spec|object,
// "rate": real|[...], "trials": int, "seed": int}; flags given explicitly win.
void apply_config(const std::string &path, Common &c, CodeArgs &a, const CLI::App &sub)
{
	Json j = read_json_file(path, "experiment");
	auto unset = [&](const char *flag) { return sub.count(flag) == 0; };
	if (j.contains("kernel") && unset("--kernel")) {
		const Json &kj = j["kernel"];
		c.kernel = kj.is_string() ? kj.get<std::string>() : kj.dump();
		if (kj.is_object() && kj.contains("q") && unset("--q"))
			c.q = kj["q"].get<std::uint32_t>();
	}
	if (j.contains("q") && unset("--q"))
		c.q = j["q"].get<std::uint32_t>();
	if (j.contains("channel") && unset("--channel")) {
		const Json &cj = j["channel"];
		a.channel = cj.is_string() ? cj.get<std::string>() : cj.dump();
	}
	if (j.contains("t") && unset("--t"))
		a.t = j["t"].is_array() ? j["t"].get<std::vector<unsigned>>() : std::vector<unsigned>{j["t"].get<unsigned>()};
	if (j.contains("rate") && unset("--rate"))
		a.rate = j["rate"].is_array() ? j["rate"].get<std::vector<double>>()
		                              : std::vector<double>{j["rate"].get<double>()};
	if (j.contains("trials") && unset("--trials"))
		a.trials = j["trials"].get<std::size_t>();
	if (j.contains("seed") && unset("--seed"))
		c.seed = j["seed"].get<std::uint64_t>();
	if (j.contains("workers") && unset("--workers"))
		c.workers = j["workers"].get<unsigned>();
}

int simulate_cmd(const Common &c, const CodeArgs &a, std::ostream &out, std::ostream &err)
{
	if (a.rate.empty() || a.t.empty())
		throw UsageError("simulate needs at least one --t and one --rate");
	if (a.trials == 0)
		throw UsageError("--trials must be at least 1");
	auto k = resolve_kernel(c.kernel, c.q, c.seed);
	Channel ch = resolve_channel(a.channel, c.q);
	const double cap = capacity(ch);

	Json spec = code_spec("simulate", c, k, ch, a);
	spec["trials"] = a.trials;
	Sink sink(c.output, out);
	auto &os = sink.stream();
	csv_header(os, spec);
	os << "N,rate,capacity,gap,failures,trials,fer,ci_low,ci_high\n";
	// Construction and transmission draw from separate seeded streams.
	const std::uint64_t trial_seed = splitmix64(c.seed ^ 0x73696d756c617465ULL);
	std::size_t rows = 0;
	double last_fer = 0.0;
	for (unsigned t : a.t)
		for (double r : a.rate) {
			auto code = construct_code(k.matrix, ch, t, CodeTarget::with_rate(r), construct_options(c, a));
			auto res = fer_experiment(code, ch, a.trials, trial_seed, c.workers);
			const double rate = double(code.message_length()) / double(code.n);
			fmt::print(os, "{},{},{},{},{},{},{},{},{}\n", code.n, num(rate), num(cap), num(cap - rate), res.failures,
			           res.trials, num(res.fer), num(res.ci_low), num(res.ci_high));
			++rows;
			last_fer = res.fer;
		}
	sink.commit();
	fmt::print(err, "simulate: {} configurations, {} trials each, last fer={}\n", rows, a.trials, num(last_fer));
	return 0;
}

// distance ----------------------------------------------------------------

struct DistanceArgs
{
	std::optional<std::size_t> columns;
	std::optional<double> eps;
};

int distance_cmd(const Common &c, const DistanceArgs &a, std::ostream &out, std::ostream &err)
{
	auto k = resolve_kernel(c.kernel, c.q, c.seed);
	const std::size_t cols = a.columns.value_or(c.parity_columns.value_or(k.matrix.cols()));
	if (cols > k.matrix.cols())
		throw UsageError("--columns exceeds the matrix width");
	std::vector<std::size_t> pick(cols);
	std::iota(pick.begin(), pick.end(), 0);
	Matrix m0 = k.matrix.select_columns(pick);
	auto d = left_kernel_distance(m0, budget_or(kDefaultDistanceBudget));

	Json spec = base_spec("distance", c, &k);
	spec["columns"] = cols;
	Json body{{"rows", m0.rows()}, {"cols", m0.cols()}, {"distance", to_json(d)}};
	if (a.eps) {
		spec["eps"] = *a.eps;
		auto ml = ml_failure_exact(m0, *a.eps, budget_or(kDefaultMlBudget));
		body["min_weight_decoding"] = Json{{"eps", *a.eps},
		                                   {"failure", ml.failure},
		                                   {"strict_failure", ml.strict_failure},
		                                   {"bound", ml.bound},
		                                   {"bound_holds", ml.bound_holds}};
	}
	emit_json(c, spec, body, out);
	fmt::print(err, "distance: {}x{} left-kernel distance {}\n", m0.rows(), m0.cols(), d.to_string());
	return 0;
}

// extract-columns ---------------------------------------------------------

struct ExtractArgs
{
	unsigned t0 = 2;
	std::size_t s = 1;
};

int extract_cmd(const Common &c, const ExtractArgs &a, std::ostream &out, std::ostream &err)
{
	auto k = resolve_kernel(c.kernel, c.q, c.seed);
	auto sel = extract_high_distance_columns(k.matrix, a.t0, a.s, budget_or(kDefaultDistanceBudget));
	Json spec = base_spec("extract-columns", c, &k);
	spec["t0"] = a.t0;
	spec["s"] = a.s;
	Json body{{"columns", sel.columns},
	          {"distance", to_json(sel.distance)},
	          {"padded_mixing", sel.padded_mixing},
	          {"heuristic", sel.heuristic}};
	emit_json(c, spec, body, out);
	fmt::print(err, "extract-columns: {} of {} columns, distance {}{}\n", a.s,
	           checked_pow(k.matrix.rows(), a.t0), sel.distance.to_string(), sel.heuristic ? " (greedy)" : "");
	return 0;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
	CLI::App app{"Polarization analysis and polar coding over prime fields", "polarlab"};
	app.require_subcommand(1);
	app.failure_message(CLI::FailureMessage::help);
	app.set_version_flag("--version", kVersion);

	Common common;
	auto *analyze = app.add_subcommand("analyze-kernel", "Structural report for a kernel (JSON)");
	add_common(analyze, common);

	PolarizeArgs pa;
	auto *polarize = app.add_subcommand("polarize", "Per-level polarization statistics of the erasure tree (CSV)");
	add_common(polarize, common);
	polarize->add_option("--z", pa.z, "Initial erasure rate")->capture_default_str()->check(CLI::Range(0.0, 1.0));
	polarize->add_option("--t", pa.t, "Deepest level")->capture_default_str();
	polarize->add_option("--t-min", pa.t_min, "Shallowest level reported")->capture_default_str();
	polarize->add_option("--lambda", pa.lambda, "Exponential window parameter")->capture_default_str();
	polarize->add_option("--gamma", pa.gamma, "Strong window parameter")->capture_default_str();
	polarize->add_option("--threshold", pa.threshold, "Rate threshold")->capture_default_str();
	polarize->add_option("--paths", pa.paths, "Sample this many random paths instead of the full tree")
	    ->capture_default_str();

	ExponentArgs ea;
	auto *exponents = app.add_subcommand("exponents", "Fitted per-index polarization exponents (JSON)");
	add_common(exponents, common);
	exponents->add_option("--deltas", ea.deltas, "Source entropies δ")->delimiter(',')->capture_default_str();
	exponents->add_option("--source", ea.source, "Source family")
	    ->check(CLI::IsMember({"erasure", "additive"}))
	    ->capture_default_str();
	exponents->add_option("--method", ea.method, "Entropy computation")
	    ->check(CLI::IsMember({"auto", "enumerate", "polynomial"}))
	    ->capture_default_str();
	exponents->add_option("--fit-points", ea.fit_points, "Smallest δ values used in the fit")->capture_default_str();
	exponents->add_option("--b", ea.b, "Exponent level for the reported fraction")->capture_default_str();

	CodeArgs ca;
	auto code_options = [&](CLI::App *sub) {
		add_common(sub, common);
		sub->add_option("--channel", ca.channel, "erasure:z | qsc:eps | bsc:eps | JSON literal")->capture_default_str();
		sub->add_option("--t", ca.t, "Depth (blocklength k^t)")->delimiter(',')->capture_default_str();
		sub->add_option("--genie-trials", ca.genie_trials, "Monte Carlo trials for genie construction")
		    ->capture_default_str();
		sub->add_flag("--zero-frozen", ca.zero_frozen, "Freeze to zeros instead of random values");
	};
	auto *construct = app.add_subcommand("construct", "Build a polar code (JSON)");
	code_options(construct);
	auto *rate_opt = construct->add_option("--rate", ca.rate, "Target rate");
	construct->add_option("--threshold", ca.threshold, "Freeze indices whose estimate exceeds this")
	    ->excludes(rate_opt);

	auto *simulate = app.add_subcommand("simulate", "Frame error rate sweep (CSV)");
	code_options(simulate);
	simulate->add_option("--rate", ca.rate, "Target rates")->delimiter(',');
	simulate->add_option("--trials", ca.trials, "Trials per configuration")->capture_default_str();
	simulate->add_option("--config", ca.config, "Experiment JSON file");

	DistanceArgs da;
	auto *distance = app.add_subcommand("distance", "Left-kernel distance of the leading columns (JSON)");
	add_common(distance, common);
	distance->add_option("--columns", da.columns, "Number of leading columns");
	distance->add_option("--eps", da.eps, "Also compute exact min-weight decoding failure at this ε");

	ExtractArgs xa;
	auto *extract = app.add_subcommand("extract-columns", "Best columns of a Kronecker power by distance (JSON)");
	add_common(extract, common);
	extract->add_option("--t0", xa.t0, "Kronecker power")->capture_default_str();
	extract->add_option("--s", xa.s, "Number of columns")->capture_default_str();

	std::vector<const char *> argv{"polarlab"};
	for (const auto &a : args)
		argv.push_back(a.c_str());
	try {
		app.parse(int(argv.size()), argv.data());
	} catch (const CLI::ParseError &e) {
		const int code = app.exit(e, out, err);
		return code == 0 ? 0 : 2;
	}

	try {
		if (*analyze)
			return analyze_kernel_cmd(common, out, err);
		if (*polarize)
			return polarize_cmd(common, pa, out, err);
		if (*exponents)
			return exponents_cmd(common, ea, out, err);
		if (*construct)
			return construct_cmd(common, ca, out, err);
		if (*simulate) {
			if (!ca.config.empty())
				apply_config(ca.config, common, ca, *simulate);
			return simulate_cmd(common, ca, out, err);
		}
		if (*distance)
			return distance_cmd(common, da, out, err);
		if (*extract)
			return extract_cmd(common, xa, out, err);
	} catch (const BudgetExceeded &e) {
		fmt::print(err, "error: {}\nhint: raise the limit with POLARLAB_BUDGET=<states> or shrink the instance\n",
		           e.what());
		return 1;
	} catch (const SearchFailed &e) {
		fmt::print(err, "error: {}\n", e.what());
		return 1;
	} catch (const std::invalid_argument &e) {
		// UsageError, DimensionError
		fmt::print(err, "error: {}\n", e.what());
		return 2;
	} catch (const std::domain_error &e) {
		fmt::print(err, "error: {}\n", e.what());
		return 2;
	} catch (const Json::exception &e) {
		fmt::print(err, "error: malformed JSON input: {}\n", e.what());
		return 2;
	} catch (const std::exception &e) {
		fmt::print(err, "error: {}\n", e.what());
		return 1;
	}
	return 2;
}

} // namespace polarlab::cli
