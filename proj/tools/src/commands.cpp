#include "pdsq_cli/commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>

#include "pdsq/bounds.hpp"
#include "pdsq/error.hpp"
#include "pdsq/harness.hpp"
#include "pdsq_cli/experiment.hpp"

namespace pdsq::cli {

using nlohmann::json;

namespace {

// Flag values; unset means "keep the file value or the default".
struct Overrides {
  std::optional<std::string> config;
  std::optional<std::uint32_t> n, k, M, n_prime, restarts, fanout, decision;
  std::optional<double> p, q, planted_variance, noise_variance, eps, gamma;
  std::optional<std::string> law, detector, strategy, threshold_mode, search_mode, budget_mode, log_base;
  std::optional<std::uint64_t> budget, trials, seed;
  unsigned threads = 0;
};

void add_experiment_flags(CLI::App& app, Overrides& o) {
  app.add_option("--n", o.n, "number of vertices (count)");
  app.add_option("--k", o.k, "planted set size (count)");
  app.add_option("--law", o.law, "entry law: bernoulli | gaussian")->default_str("bernoulli");
  app.add_option("--p", o.p, "planted entry mean (edge probability for bernoulli)");
  app.add_option("--q", o.q, "noise entry mean (edge probability for bernoulli)");
  app.add_option("--planted-variance", o.planted_variance, "planted entry variance (gaussian only)")
      ->default_str("1");
  app.add_option("--noise-variance", o.noise_variance, "noise entry variance (gaussian only)")->default_str("1");
  app.add_option("--detector", o.detector, "detector: scan | degree | constant | coin");
  app.add_option("--M", o.M, "scan sample size or degree probe count (vertices)");
  app.add_option("--n-prime", o.n_prime, "degree panel size (vertices)");
  app.add_option("--eps", o.eps, "threshold slack epsilon (dimensionless; default 0.2 scan, 0.1 degree)");
  app.add_option("--gamma", o.gamma, "scan edge-density level in (q, p] (default: derived from p and q)");
  app.add_option("--threshold-mode", o.threshold_mode, "scan threshold: chernoff_gamma | bernstein_midpoint")
      ->default_str("chernoff_gamma");
  app.add_option("--search-mode", o.search_mode, "scan search: auto | exact | local_search")->default_str("auto");
  app.add_option("--restarts", o.restarts, "local search restarts (count)")->default_str("50");
  app.add_option("--decision", o.decision, "constant detector output (0 or 1)")->default_str("0");
  app.add_option("--strategy", o.strategy, "query strategy: pattern | uniform | greedy")->default_str("pattern");
  app.add_option("--fanout", o.fanout, "greedy strategy focus width (vertices)")->default_str("8");
  app.add_option("--Q", o.budget, "query budget (unique pairs; default: the detector's pattern size)");
  app.add_option("--budget-mode", o.budget_mode, "budget accounting: unique_pairs | every_call")
      ->default_str("unique_pairs");
  app.add_option("--trials", o.trials, "trials per hypothesis (count, >= 1)")->default_str("100");
  app.add_option("--seed", o.seed, "master seed (unsigned 64-bit)")->default_str("0");
  app.add_option("--log-base", o.log_base, "logarithm base for the degree threshold: natural | base2")
      ->default_str("natural");
  app.add_option("--threads", o.threads, "worker threads (0: all hardware threads; never changes results)")
      ->default_str("0");
  app.add_option("--config", o.config, "experiment config file (JSON); flags override its values");
}

// Loads the file (if any), checks it on its own, then layers the flags on top.
json merged_document(const Overrides& o) {
  json doc = json::object();
  if (o.config) {
    doc = load_document(*o.config);
    try {
      check_schema(doc);
    } catch (const ConfigError& e) {
      throw ConfigError(*o.config + ": " + e.what());
    }
  } else {
    doc["schema_version"] = kSchemaVersion;
  }

  auto section = [&](const char* name) -> json& {
    if (!doc.contains(name) || !doc[name].is_object()) doc[name] = json::object();
    return doc[name];
  };
  if (o.n) section("model")["n"] = *o.n;
  if (o.k) section("model")["k"] = *o.k;
  if (o.law) section("model")["law"] = *o.law;
  if (o.p) section("model")["p"] = *o.p;
  if (o.q) section("model")["q"] = *o.q;
  if (o.planted_variance) section("model")["planted_variance"] = *o.planted_variance;
  if (o.noise_variance) section("model")["noise_variance"] = *o.noise_variance;

  // A different kind on the command line replaces the file's section wholesale.
  if (o.detector && section("detector").value("kind", "") != *o.detector) doc["detector"] = {{"kind", *o.detector}};
  if (o.M) section("detector")["M"] = *o.M;
  if (o.n_prime) section("detector")["n_prime"] = *o.n_prime;
  if (o.eps) section("detector")["epsilon"] = *o.eps;
  if (o.gamma) section("detector")["gamma"] = *o.gamma;
  if (o.threshold_mode) section("detector")["threshold_mode"] = *o.threshold_mode;
  if (o.search_mode) section("detector")["search_mode"] = *o.search_mode;
  if (o.restarts) section("detector")["restarts"] = *o.restarts;
  if (o.decision) section("detector")["decision"] = *o.decision;
  if (o.log_base) {
    doc["log_base"] = *o.log_base;
    if (section("detector").value("kind", "") == "degree") doc["detector"]["log_base"] = *o.log_base;
  }
  if (doc["detector"].empty()) doc.erase("detector");

  if (o.strategy && section("strategy").value("kind", "pattern") != *o.strategy) {
    doc["strategy"] = {{"kind", *o.strategy}};
  }
  if (o.fanout) section("strategy")["fanout"] = *o.fanout;
  if (doc["strategy"].empty()) doc.erase("strategy");

  if (o.budget) doc["budget"] = *o.budget;
  if (o.budget_mode) doc["budget_mode"] = *o.budget_mode;
  if (o.trials) doc["trials"] = *o.trials;
  if (o.seed) doc["master_seed"] = *o.seed;
  return doc;
}

json plan_json(const TrialConfig& cfg) {
  if (const auto* s = std::get_if<ScanConfig>(&cfg.detector)) {
    const auto info = derive_scan(cfg.params, *s);
    return {{"N0", info.N0},
            {"gamma", info.gamma},
            {"threshold", info.threshold},
            {"pattern_budget", info.budget},
            {"exact_search", info.exact}};
  }
  if (const auto* d = std::get_if<DegreeConfig>(&cfg.detector)) {
    const auto info = derive_degree(cfg.params, *d);
    return {{"N0", info.N0},
            {"tau_deg", info.tau_deg},
            {"verdict_threshold", info.verdict_threshold},
            {"unique_pairs", info.unique_pairs},
            {"nominal_budget", info.nominal_budget},
            {"log_base", std::string(to_string(d->log_base))}};
  }
  return json::object();
}

std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, mode);
  if (!os) fail(ErrorKind::io, "cannot open " + path.string() + " for writing");
  return os;
}

int usage_error(std::ostream& err, const std::string& msg) {
  err << "pdsq: " << msg << "\n";
  return kExitUsage;
}

int cmd_simulate(const Overrides& o, const std::optional<std::string>& out_path, std::ostream& out,
                 std::ostream& err) {
  const ExperimentFile exp = build_experiment(merged_document(o));
  if (!exp.grid.empty()) {
    throw ConfigError("grid: simulate runs one configuration; use the sweep subcommand for grids");
  }
  TrialConfig cfg = exp.base;
  cfg.threads = o.threads;
  json plan;
  try {
    cfg.validate();
    plan = plan_json(cfg);
  } catch (const Error& e) {
    return usage_error(err, "invalid configuration: " + std::string(to_string(e.kind())) + ": " + e.what());
  }

  json result = json::parse(to_json(estimate_risk(cfg)));
  result["plan"] = plan;
  const std::string text = result.dump(2) + "\n";

  std::optional<std::filesystem::path> target;
  if (out_path) {
    target = *out_path;
  } else if (exp.output.json) {
    target = *exp.output.json;
  }
  if (target) {
    const auto path = resolve_output(*target);
    auto os = open_output(path, std::ios::out | std::ios::trunc);
    os << text;
    err << "wrote " << path.string() << "\n";
  } else {
    out << text;
  }
  return kExitOk;
}

struct SweepFlags {
  std::optional<std::string> csv, jsonl, manifest;
  std::optional<std::uint64_t> stop_after;
};

int cmd_sweep(const Overrides& o, const SweepFlags& f, std::ostream& out, std::ostream& err) {
  const ExperimentFile exp = build_experiment(merged_document(o));
  std::vector<TrialConfig> grid = expand_grid(exp);
  for (auto& c : grid) c.threads = o.threads;

  auto pick = [](const std::optional<std::string>& flag, const std::optional<std::filesystem::path>& file)
      -> std::optional<std::filesystem::path> {
    if (flag) return resolve_output(*flag);
    if (file) return resolve_output(*file);
    return std::nullopt;
  };
  const auto csv_path = pick(f.csv, exp.output.csv);
  const auto jsonl_path = pick(f.jsonl, exp.output.jsonl);
  auto manifest_path = pick(f.manifest, exp.output.manifest);
  if (!manifest_path && csv_path) manifest_path = std::filesystem::path(csv_path->string() + ".manifest.json");

  // Resume only if the manifest matches this grid; otherwise start clean.
  bool resuming = false;
  if (manifest_path) {
    for (const auto& [index, key] : read_manifest(*manifest_path)) {
      if (index < grid.size() && config_key(grid[index]) == key) resuming = true;
    }
    if (!resuming) std::filesystem::remove(*manifest_path);
  }

  const auto mode = resuming ? std::ios::out | std::ios::app : std::ios::out | std::ios::trunc;
  std::ofstream csv_file, jsonl_file;
  std::ostream* csv_stream = &out;
  bool header = true;
  if (csv_path) {
    header = !resuming || !std::filesystem::exists(*csv_path) || std::filesystem::file_size(*csv_path) == 0;
    csv_file = open_output(*csv_path, mode);
    csv_stream = &csv_file;
  }
  std::vector<std::unique_ptr<RecordSink>> owned;
  owned.push_back(std::make_unique<CsvRecordSink>(*csv_stream, header));
  if (jsonl_path) {
    jsonl_file = open_output(*jsonl_path, mode);
    owned.push_back(std::make_unique<JsonLinesRecordSink>(jsonl_file));
  }
  std::vector<RecordSink*> sinks;
  for (auto& s : owned) sinks.push_back(s.get());

  SweepOptions options;
  options.manifest = manifest_path;
  options.stop_after = f.stop_after;
  options.progress = [&err](const SweepRecord& r, std::uint64_t done, std::uint64_t total) {
    char line[256];
    if (r.estimate) {
      std::snprintf(line, sizeof line, "[%llu/%llu] %s risk=%.6g (type1 %.6g, type2 %.6g)",
                    static_cast<unsigned long long>(done), static_cast<unsigned long long>(total), r.key.c_str(),
                    r.estimate->risk, r.estimate->type1_rate, r.estimate->type2_rate);
    } else {
      std::snprintf(line, sizeof line, "[%llu/%llu] %s error", static_cast<unsigned long long>(done),
                    static_cast<unsigned long long>(total), r.key.c_str());
    }
    err << line;
    if (!r.estimate) err << ": " << r.error;
    err << "\n" << std::flush;
  };
  const auto records = sweep(grid, sinks, options);
  err << "sweep: " << records.size() << " computed, " << grid.size() << " configs in grid\n";
  return kExitOk;
}

struct BoundFlags {
  std::uint64_t n = 0, k = 0;
  double p = 0.0, q = 0.0;
  BoundInputs defaults;
  std::string log_base = "natural";
  bool json = false;
};

std::string sig6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

int cmd_bounds(const BoundFlags& f, std::ostream& out, std::ostream& err) {
  BoundReport report;
  try {
    BoundInputs in = f.defaults;
    in.n = f.n;
    in.k = f.k;
    in.pair = {f.p, f.q};
    in.base = parse_log_base(f.log_base);
    report = theorem1_bounds(in);
  } catch (const Error& e) {
    return usage_error(err, std::string(to_string(e.kind())) + ": " + e.what());
  }
  if (f.json) {
    out << json::parse(to_json(report)).dump(2) << "\n";
    return kExitOk;
  }
  const auto& in = report.inputs;
  char head[256];
  std::snprintf(head, sizeof head, "n=%llu k=%llu p=%s q=%s eps=%s delta=%s C=%s eps0=%s c_deg=%s log=%s\n",
                static_cast<unsigned long long>(in.n), static_cast<unsigned long long>(in.k),
                sig6(in.pair.p).c_str(), sig6(in.pair.q).c_str(), sig6(in.epsilon).c_str(),
                sig6(in.delta).c_str(), sig6(in.C).c_str(), sig6(in.epsilon0).c_str(),
                sig6(in.degree_constant).c_str(), std::string(to_string(in.base)).c_str());
  out << head;
  auto row = [&out](const char* name, double value, const char* formula) {
    char line[256];
    std::snprintf(line, sizeof line, "%-26s %14s  %s\n", name, sig6(value).c_str(), formula);
    out << line;
  };
  row("chi2", report.chi2, "(p-q)^2 / (q(1-q))");
  row("kl", report.kl, "d_KL(p||q)");
  row("statistical_lower_Q", report.statistical_lower_Q, "(2-eps) n^2/(k^2 chi^4) log^2(n/k)");
  if (report.statistical_lower_Q_logn) {
    row("statistical_lower_Q_logn", *report.statistical_lower_Q_logn, "same with log^2 n");
  }
  row("adaptive_lower_Q", report.adaptive_lower_Q, "delta * statistical_lower_Q");
  row("scan_sufficient_Q", report.scan_sufficient_Q, "(2+eps) n^2/(k^2 KL^2) log^2(n/k)");
  row("scan_sufficient_Q_chi", report.scan_sufficient_Q_chi, "(2+eps) C n^2/(k^2 chi^4) log^2(n/k)");
  row("degree_sufficient_Q", report.degree_sufficient_Q, "c n^3/k^3 log^3(n) / chi^2");
  row("min_k", report.min_k, "(2+eps0) log(n) / KL");
  return kExitOk;
}

int cmd_phase(double alpha, double beta, bool as_json, std::ostream& out, std::ostream& err) {
  Phase phase;
  try {
    phase = classify_phase(alpha, beta);
  } catch (const Error& e) {
    return usage_error(err, e.what());
  }
  if (as_json) {
    out << json{{"alpha", alpha}, {"beta", beta}, {"phase", std::string(to_string(phase))}}.dump() << "\n";
  } else {
    out << to_string(phase) << "\n";
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Query-limited planted dense subgraph detection: simulation, sweeps, bounds, phases", "pdsq"};
  app.require_subcommand(1);

  Overrides sim_flags;
  std::optional<std::string> sim_out;
  auto* simulate = app.add_subcommand("simulate", "estimate Type-I/Type-II risk of one configuration (JSON output)");
  add_experiment_flags(*simulate, sim_flags);
  simulate->add_option("--out", sim_out, "write the JSON result to this path instead of stdout");

  Overrides sweep_flags;
  SweepFlags sweep_extra;
  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate a parameter grid, streaming one CSV row per config");
  add_experiment_flags(*sweep_cmd, sweep_flags);
  sweep_cmd->get_option("--config")->required();
  sweep_cmd->add_option("--csv", sweep_extra.csv, "CSV output path (default: output.csv, else stdout)");
  sweep_cmd->add_option("--jsonl", sweep_extra.jsonl, "JSON-lines output path (default: output.jsonl)");
  sweep_cmd->add_option("--manifest", sweep_extra.manifest,
                        "resume manifest path (default: output.manifest, else <csv>.manifest.json)");
  sweep_cmd->add_option("--stop-after", sweep_extra.stop_after,
                        "stop after computing this many configs (count); rerun to resume");

  BoundFlags bf;
  auto* bounds = app.add_subcommand("bounds", "print the query-complexity thresholds for (n, k, p, q)");
  bounds->add_option("--n", bf.n, "number of vertices (count)")->required();
  bounds->add_option("--k", bf.k, "planted set size (count)")->required();
  bounds->add_option("--p", bf.p, "planted edge probability")->required();
  bounds->add_option("--q", bf.q, "noise edge probability in (0, 1)")->required();
  bounds->add_option("--eps", bf.defaults.epsilon, "prefactor slack epsilon in [0, 2) (0 gives the limit value)")
      ->capture_default_str();
  bounds->add_option("--delta", bf.defaults.delta, "adaptive lower-bound risk slack in (0, 1]")
      ->capture_default_str();
  bounds->add_option("--C", bf.defaults.C, "constant of the chi-square scan condition")->capture_default_str();
  bounds->add_option("--eps0", bf.defaults.epsilon0, "slack of the minimum-k condition")->capture_default_str();
  bounds->add_option("--degree-constant", bf.defaults.degree_constant, "constant of the degree-test budget")
      ->capture_default_str();
  bounds->add_option("--log-base", bf.log_base, "logarithm base: natural | base2")->capture_default_str();
  bounds->add_flag("--json", bf.json, "print JSON (17 significant digits) instead of the table");

  double alpha = 0.0, beta = 0.0;
  bool phase_json = false;
  auto* phase = app.add_subcommand("phase", "classify (alpha, beta) with k = n^beta and Q = n^alpha");
  phase->add_option("--alpha", alpha, "budget exponent in (0, 2)")->required();
  phase->add_option("--beta", beta, "planted size exponent in (0, 1)")->required();
  phase->add_flag("--json", phase_json, "print JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim_flags, sim_out, out, err);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_flags, sweep_extra, out, err);
    if (bounds->parsed()) return cmd_bounds(bf, out, err);
    return cmd_phase(alpha, beta, phase_json, out, err);
  } catch (const ConfigError& e) {
    return usage_error(err, std::string("config error: ") + e.what());
  } catch (const Error& e) {
    err << "pdsq: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "pdsq: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace pdsq::cli
