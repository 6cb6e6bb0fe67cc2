#include "pdsq_cli/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>

#include "pdsq/error.hpp"

namespace pdsq::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

std::string join(const std::string& parent, std::string_view key) {
  return parent.empty() ? std::string(key) : parent + "." + std::string(key);
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed,
                const std::string& context = "") {
  if (!obj.is_object()) bad(path.empty() ? "(document)" : path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      bad(join(path, it.key()), context.empty() ? "unknown key" : "unknown key for " + context);
    }
  }
}

const json* lookup(const json& obj, std::string_view key) {
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double as_real(const json& v, const std::string& path) {
  if (!v.is_number()) bad(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(path, "expected a finite number");
  return x;
}

std::uint64_t as_uint(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (x >= 0.0 && x == std::floor(x) && x < 9007199254740992.0) return static_cast<std::uint64_t>(x);
  }
  bad(path, "expected a non-negative integer");
}

std::uint32_t as_u32(const json& v, const std::string& path) {
  const auto x = as_uint(v, path);
  if (x > std::numeric_limits<std::uint32_t>::max()) bad(path, "value too large");
  return static_cast<std::uint32_t>(x);
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) bad(path, "expected a string");
  return v.get<std::string>();
}

std::string required_message(std::string_view flag) {
  return "required; set it in the config file or pass " + std::string(flag);
}

const json& require(const json& obj, std::string_view key, const std::string& parent, std::string_view flag) {
  const json* v = lookup(obj, key);
  if (!v) bad(join(parent, key), required_message(flag));
  return *v;
}

// Wraps library parse errors so they carry the field path.
template <class F>
auto parse_enum(const json& v, const std::string& path, F&& parse) {
  const std::string text = as_string(v, path);
  try {
    return parse(text);
  } catch (const Error& e) {
    bad(path, e.what());
  }
}

bool is_integral_axis(std::string_view name) {
  return name == "n" || name == "k" || name == "M" || name == "n_prime" || name == "budget" ||
         name == "fanout" || name == "trials";
}

// Document location an axis overrides.
std::pair<std::string_view, std::string_view> axis_target(std::string_view name) {
  if (name == "n" || name == "k" || name == "p" || name == "q") return {"model", name};
  if (name == "M" || name == "n_prime" || name == "epsilon" || name == "gamma") return {"detector", name};
  if (name == "fanout") return {"strategy", name};
  return {"", name};
}

ModelParams build_model(const json& m) {
  const std::string law = lookup(m, "law") ? as_string(m["law"], "model.law") : "bernoulli";
  ModelParams params;
  params.n = as_u32(require(m, "n", "model", "--n"), "model.n");
  params.k = as_u32(require(m, "k", "model", "--k"), "model.k");
  const double p = as_real(require(m, "p", "model", "--p"), "model.p");
  const double q = as_real(require(m, "q", "model", "--q"), "model.q");
  if (law == "bernoulli") {
    params.dist = BernPair{p, q}.as_pair();
  } else {
    const double vp = lookup(m, "planted_variance") ? as_real(m["planted_variance"], "model.planted_variance") : 1.0;
    const double vq = lookup(m, "noise_variance") ? as_real(m["noise_variance"], "model.noise_variance") : 1.0;
    params.dist = DistributionPair{Gaussian{p, vp}, Gaussian{q, vq}};
  }
  return params;
}

DetectorSpec build_detector(const json& d, LogBase top_base) {
  const std::string kind = as_string(require(d, "kind", "detector", "--detector"), "detector.kind");
  if (kind == "scan") {
    ScanConfig c;
    c.M = as_u32(require(d, "M", "detector", "--M"), "detector.M");
    if (const json* v = lookup(d, "epsilon")) c.epsilon = as_real(*v, "detector.epsilon");
    if (const json* v = lookup(d, "gamma")) c.gamma = as_real(*v, "detector.gamma");
    if (const json* v = lookup(d, "threshold_mode")) {
      c.threshold_mode = parse_enum(*v, "detector.threshold_mode", parse_threshold_mode);
    }
    if (const json* v = lookup(d, "search_mode")) {
      c.search_mode = parse_enum(*v, "detector.search_mode", parse_search_mode);
    }
    if (const json* v = lookup(d, "enumeration_cap")) c.enumeration_cap = as_real(*v, "detector.enumeration_cap");
    if (const json* v = lookup(d, "restarts")) c.restarts = as_u32(*v, "detector.restarts");
    return c;
  }
  if (kind == "degree") {
    DegreeConfig c;
    c.M = as_u32(require(d, "M", "detector", "--M"), "detector.M");
    c.n_prime = as_u32(require(d, "n_prime", "detector", "--n-prime"), "detector.n_prime");
    if (const json* v = lookup(d, "epsilon")) c.epsilon = as_real(*v, "detector.epsilon");
    c.log_base = top_base;
    if (const json* v = lookup(d, "log_base")) c.log_base = parse_enum(*v, "detector.log_base", parse_log_base);
    return c;
  }
  if (kind == "constant") {
    ConstantDetector c;
    if (const json* v = lookup(d, "decision")) {
      const auto x = as_uint(*v, "detector.decision");
      if (x > 1) bad("detector.decision", "expected 0 or 1");
      c.decision = static_cast<int>(x);
    }
    return c;
  }
  return CoinDetector{};
}

StrategySpec build_strategy(const json* s) {
  if (!s) return PatternStrategy{};
  const std::string kind = lookup(*s, "kind") ? as_string((*s)["kind"], "strategy.kind") : "pattern";
  if (kind == "uniform") return UniformStrategy{};
  if (kind == "greedy") {
    GreedyStrategy g;
    if (const json* v = lookup(*s, "fanout")) g.fanout = as_u32(*v, "strategy.fanout");
    return g;
  }
  return PatternStrategy{};
}

}  // namespace

const std::vector<std::string>& grid_axis_names() {
  static const std::vector<std::string> names = {"n",       "k",     "p",      "q",      "M",     "n_prime",
                                                 "epsilon", "gamma", "budget", "fanout", "trials"};
  return names;
}

json parse_document(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is 1-based; count lines up to it for the diagnostic.
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ConfigError(source + ":" + std::to_string(line) + ": invalid JSON (" + e.what() + ")");
  }
}

json load_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_document(text.str(), path.string());
}

void check_schema(const json& doc) {
  check_keys(doc, "", {"schema_version", "model", "detector", "strategy", "budget", "budget_mode", "trials",
                       "master_seed", "grid", "output", "log_base"});
  if (const json* v = lookup(doc, "schema_version")) {
    if (as_uint(*v, "schema_version") != kSchemaVersion) {
      bad("schema_version", "unsupported version " + v->dump() + " (expected " + std::to_string(kSchemaVersion) + ")");
    }
  }
  if (const json* m = lookup(doc, "model")) {
    const std::string law = lookup(*m, "law") ? as_string((*m)["law"], "model.law") : "bernoulli";
    if (law == "bernoulli") {
      check_keys(*m, "model", {"n", "k", "law", "p", "q"}, "the bernoulli law");
    } else if (law == "gaussian") {
      check_keys(*m, "model", {"n", "k", "law", "p", "q", "planted_variance", "noise_variance"}, "the gaussian law");
    } else {
      bad("model.law", "expected \"bernoulli\" or \"gaussian\", got \"" + law + "\"");
    }
  }
  if (const json* d = lookup(doc, "detector")) {
    if (!d->is_object()) bad("detector", "expected an object");
    const std::string kind = lookup(*d, "kind") ? as_string((*d)["kind"], "detector.kind") : "";
    if (kind == "scan") {
      check_keys(*d, "detector",
                 {"kind", "M", "epsilon", "gamma", "threshold_mode", "search_mode", "enumeration_cap", "restarts"},
                 "the scan detector");
    } else if (kind == "degree") {
      check_keys(*d, "detector", {"kind", "M", "n_prime", "epsilon", "log_base"}, "the degree detector");
    } else if (kind == "constant") {
      check_keys(*d, "detector", {"kind", "decision"}, "the constant detector");
    } else if (kind == "coin") {
      check_keys(*d, "detector", {"kind"}, "the coin detector");
    } else if (!kind.empty()) {
      bad("detector.kind", "expected scan, degree, constant or coin, got \"" + kind + "\"");
    }
  }
  if (const json* s = lookup(doc, "strategy")) {
    if (!s->is_object()) bad("strategy", "expected an object");
    const std::string kind = lookup(*s, "kind") ? as_string((*s)["kind"], "strategy.kind") : "pattern";
    if (kind == "greedy") {
      check_keys(*s, "strategy", {"kind", "fanout"}, "the greedy strategy");
    } else if (kind == "pattern" || kind == "uniform") {
      check_keys(*s, "strategy", {"kind"}, "the " + kind + " strategy");
    } else {
      bad("strategy.kind", "expected pattern, uniform or greedy, got \"" + kind + "\"");
    }
  }
  if (const json* v = lookup(doc, "budget_mode")) {
    const std::string mode = as_string(*v, "budget_mode");
    if (mode != "unique_pairs" && mode != "every_call") bad("budget_mode", "expected unique_pairs or every_call");
  }
  if (const json* v = lookup(doc, "log_base")) (void)parse_enum(*v, "log_base", parse_log_base);
  if (const json* o = lookup(doc, "output")) {
    check_keys(*o, "output", {"csv", "jsonl", "manifest", "json"});
    for (auto it = o->begin(); it != o->end(); ++it) (void)as_string(it.value(), join("output", it.key()));
  }
  if (const json* g = lookup(doc, "grid")) {
    if (!g->is_object()) bad("grid", "expected an object of axis arrays");
    const auto& names = grid_axis_names();
    for (auto it = g->begin(); it != g->end(); ++it) {
      const std::string path = join("grid", it.key());
      if (std::find(names.begin(), names.end(), it.key()) == names.end()) bad(path, "unknown grid axis");
      if (!it->is_array() || it->empty()) bad(path, "expected a non-empty array");
      for (std::size_t i = 0; i < it->size(); ++i) {
        const std::string item = path + "[" + std::to_string(i) + "]";
        if (is_integral_axis(it.key())) {
          (void)as_uint((*it)[i], item);
        } else {
          (void)as_real((*it)[i], item);
        }
      }
    }
  }
}

ExperimentFile build_experiment(const json& doc) {
  check_schema(doc);
  ExperimentFile exp;
  exp.effective = doc;
  exp.schema_version = static_cast<int>(as_uint(require(doc, "schema_version", "", "a schema_version field"),
                                                "schema_version"));
  if (const json* v = lookup(doc, "log_base")) exp.log_base = parse_enum(*v, "log_base", parse_log_base);

  const json* m = lookup(doc, "model");
  if (!m) bad("model", required_message("--n, --k, --p and --q"));
  exp.base.params = build_model(*m);

  const json* d = lookup(doc, "detector");
  if (!d) bad("detector.kind", required_message("--detector"));
  exp.base.detector = build_detector(*d, exp.log_base);
  exp.base.strategy = build_strategy(lookup(doc, "strategy"));

  if (const json* v = lookup(doc, "budget")) exp.base.budget = as_uint(*v, "budget");
  if (const json* v = lookup(doc, "budget_mode")) {
    exp.base.budget_mode =
        as_string(*v, "budget_mode") == "every_call" ? BudgetMode::every_call : BudgetMode::unique_pairs;
  }
  if (const json* v = lookup(doc, "trials")) exp.base.trials = as_uint(*v, "trials");
  if (exp.base.trials == 0) bad("trials", "must be at least 1");
  if (const json* v = lookup(doc, "master_seed")) exp.base.master_seed = as_uint(*v, "master_seed");

  if (const json* o = lookup(doc, "output")) {
    if (const json* v = lookup(*o, "csv")) exp.output.csv = v->get<std::string>();
    if (const json* v = lookup(*o, "jsonl")) exp.output.jsonl = v->get<std::string>();
    if (const json* v = lookup(*o, "manifest")) exp.output.manifest = v->get<std::string>();
    if (const json* v = lookup(*o, "json")) exp.output.json = v->get<std::string>();
  }
  if (const json* g = lookup(doc, "grid")) {
    for (const auto& name : grid_axis_names()) {
      if (const json* axis = lookup(*g, name)) {
        GridAxis a{name, {}};
        for (const auto& x : *axis) a.values.push_back(x.get<double>());
        exp.grid.push_back(std::move(a));
      }
    }
  }
  return exp;
}

std::vector<TrialConfig> expand_grid(const ExperimentFile& exp) {
  if (exp.grid.empty()) return {exp.base};
  json base = exp.effective;
  base.erase("grid");
  std::vector<std::size_t> pos(exp.grid.size(), 0);
  std::vector<TrialConfig> out;
  while (true) {
    json point = base;
    for (std::size_t a = 0; a < exp.grid.size(); ++a) {
      const auto& axis = exp.grid[a];
      const double x = axis.values[pos[a]];
      const auto [section, key] = axis_target(axis.name);
      json& target = section.empty() ? point : point[std::string(section)];
      if (is_integral_axis(axis.name)) {
        target[std::string(key)] = static_cast<std::uint64_t>(x);
      } else {
        target[std::string(key)] = x;
      }
    }
    try {
      out.push_back(build_experiment(point).base);
    } catch (const ConfigError& e) {
      throw ConfigError("grid point " + std::to_string(out.size()) + ": " + e.what());
    }
    // Odometer: last axis varies fastest.
    std::size_t a = exp.grid.size();
    while (a > 0) {
      --a;
      if (++pos[a] < exp.grid[a].values.size()) break;
      pos[a] = 0;
      if (a == 0) return out;
    }
  }
}

std::filesystem::path resolve_output(const std::filesystem::path& p) {
  const char* dir = std::getenv("PDSQ_OUTPUT_DIR");
  if (p.is_relative() && dir && *dir) return std::filesystem::path(dir) / p;
  return p;
}

}  // namespace pdsq::cli
