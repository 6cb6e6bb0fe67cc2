#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "pdsq/error.hpp"
#include "pdsq/harness.hpp"
#include "records_json.hpp"

namespace pdsq {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::divergence_infinite: return "divergence_infinite";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::self_loop: return "self_loop";
    case ErrorKind::budget_exhausted: return "budget_exhausted";
    case ErrorKind::budget_too_large: return "budget_too_large";
    case ErrorKind::not_applicable: return "not_applicable";
    case ErrorKind::infeasible_config: return "infeasible_config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

namespace detail {

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::json distribution_to_json(const Distribution& d) {
  if (const auto* b = std::get_if<Bernoulli>(&d)) return {{"kind", "bernoulli"}, {"theta", b->theta}};
  const auto& g = std::get<Gaussian>(d);
  return {{"kind", "gaussian"}, {"mean", g.mean}, {"variance", g.variance}};
}

nlohmann::json params_to_json(const ModelParams& params) {
  return {{"n", params.n},
          {"k", params.k},
          {"planted", distribution_to_json(params.dist.planted)},
          {"noise", distribution_to_json(params.dist.noise)}};
}

}  // namespace detail

namespace {

nlohmann::json detector_to_json(const DetectorSpec& spec) {
  return std::visit(
      [](const auto& d) -> nlohmann::json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ScanConfig>) {
          nlohmann::json j = {{"kind", "scan"},
                              {"M", d.M},
                              {"epsilon", d.epsilon},
                              {"threshold_mode", std::string(to_string(d.threshold_mode))},
                              {"search_mode", std::string(to_string(d.search_mode))},
                              {"enumeration_cap", d.enumeration_cap},
                              {"restarts", d.restarts}};
          j["gamma"] = d.gamma ? nlohmann::json(*d.gamma) : nlohmann::json(nullptr);
          return j;
        } else if constexpr (std::is_same_v<T, DegreeConfig>) {
          return {{"kind", "degree"},
                  {"n_prime", d.n_prime},
                  {"M", d.M},
                  {"epsilon", d.epsilon},
                  {"log_base", std::string(to_string(d.log_base))}};
        } else if constexpr (std::is_same_v<T, ConstantDetector>) {
          return {{"kind", "constant"}, {"decision", d.decision}};
        } else {
          return {{"kind", "coin"}};
        }
      },
      spec);
}

nlohmann::json strategy_to_json(const StrategySpec& spec) {
  nlohmann::json j = {{"kind", std::string(strategy_name(spec))}};
  if (const auto* g = std::get_if<GreedyStrategy>(&spec)) j["fanout"] = g->fanout;
  return j;
}

nlohmann::json config_json(const TrialConfig& cfg) {
  nlohmann::json j;
  j["model"] = detail::params_to_json(cfg.params);
  j["detector"] = detector_to_json(cfg.detector);
  j["strategy"] = strategy_to_json(cfg.strategy);
  j["budget"] = cfg.effective_budget();
  j["budget_mode"] = cfg.budget_mode == BudgetMode::unique_pairs ? "unique_pairs" : "every_call";
  j["trials"] = cfg.trials;
  j["master_seed"] = cfg.master_seed;
  return j;
}

nlohmann::json estimate_json(const RiskEstimate& e) {
  return {{"type1_rate", e.type1_rate},
          {"type2_rate", e.type2_rate},
          {"risk", e.risk},
          {"half_width_type1", e.half_width_type1},
          {"half_width_type2", e.half_width_type2},
          {"trials", e.trials},
          {"ci_valid", e.ci_valid},
          {"planted_hits", {{"mean", e.planted_hits.mean},
                            {"stddev", e.planted_hits.stddev},
                            {"max", e.planted_hits.max}}},
          {"config", config_json(e.config)}};
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

constexpr std::string_view kColumns[] = {
    "index", "key", "n", "k", "law", "p", "q", "planted_variance", "noise_variance",
    "detector", "strategy", "M", "n_prime", "epsilon", "gamma", "threshold_mode", "search_mode",
    "fanout", "budget", "budget_mode", "trials", "master_seed",
    "type1_rate", "type2_rate", "risk", "half_width_type1", "half_width_type2",
    "planted_hits_mean", "planted_hits_stddev", "planted_hits_max", "ci_valid", "error"};

}  // namespace

std::string to_json(const TrialConfig& cfg) { return config_json(cfg).dump(); }

std::string config_key(const TrialConfig& cfg) {
  // FNV-1a over the canonical dump.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string to_json(const RiskEstimate& est) { return estimate_json(est).dump(); }

std::span<const std::string_view> sweep_csv_columns() { return kColumns; }

std::string sweep_csv_header() {
  std::string out;
  for (std::size_t i = 0; i < std::size(kColumns); ++i) {
    if (i) out += ',';
    out += kColumns[i];
  }
  return out;
}

std::string sweep_csv_row(const SweepRecord& r) {
  using detail::format_real;
  const TrialConfig& c = r.config;
  std::vector<std::string> f;
  f.reserve(std::size(kColumns));
  f.push_back(std::to_string(r.index));
  f.push_back(r.key);
  f.push_back(std::to_string(c.params.n));
  f.push_back(std::to_string(c.params.k));
  const bool bern = c.params.dist.is_bernoulli();
  f.push_back(bern ? "bernoulli" : "gaussian");
  f.push_back(format_real(c.params.planted_mean()));
  f.push_back(format_real(c.params.noise_mean()));
  if (bern) {
    f.emplace_back();
    f.emplace_back();
  } else {
    f.push_back(format_real(std::get<Gaussian>(c.params.dist.planted).variance));
    f.push_back(format_real(std::get<Gaussian>(c.params.dist.noise).variance));
  }
  f.emplace_back(detector_name(c.detector));
  f.emplace_back(strategy_name(c.strategy));
  std::string M, n_prime, eps, gamma, tmode, smode, fanout;
  if (const auto* s = std::get_if<ScanConfig>(&c.detector)) {
    M = std::to_string(s->M);
    eps = format_real(s->epsilon);
    if (s->gamma) gamma = format_real(*s->gamma);
    tmode = to_string(s->threshold_mode);
    smode = to_string(s->search_mode);
  } else if (const auto* d = std::get_if<DegreeConfig>(&c.detector)) {
    M = std::to_string(d->M);
    n_prime = std::to_string(d->n_prime);
    eps = format_real(d->epsilon);
  }
  if (const auto* g = std::get_if<GreedyStrategy>(&c.strategy)) fanout = std::to_string(g->fanout);
  for (auto* s : {&M, &n_prime, &eps, &gamma, &tmode, &smode, &fanout}) f.push_back(*s);
  f.push_back(std::to_string(c.effective_budget()));
  f.push_back(c.budget_mode == BudgetMode::unique_pairs ? "unique_pairs" : "every_call");
  f.push_back(std::to_string(c.trials));
  f.push_back(std::to_string(c.master_seed));
  if (r.estimate) {
    const auto& e = *r.estimate;
    for (double v : {e.type1_rate, e.type2_rate, e.risk, e.half_width_type1, e.half_width_type2,
                     e.planted_hits.mean, e.planted_hits.stddev}) {
      f.push_back(format_real(v));
    }
    f.push_back(std::to_string(e.planted_hits.max));
    f.push_back(e.ci_valid ? "1" : "0");
  } else {
    for (int i = 0; i < 9; ++i) f.emplace_back();
  }
  f.push_back(csv_escape(r.error));
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out += ',';
    out += f[i];
  }
  return out;
}

std::string sweep_json_line(const SweepRecord& r) {
  nlohmann::json j;
  j["index"] = r.index;
  j["key"] = r.key;
  j["config"] = config_json(r.config);
  j["estimate"] = r.estimate ? estimate_json(*r.estimate) : nlohmann::json(nullptr);
  if (r.estimate) j["estimate"].erase("config");
  j["error"] = r.error;
  return j.dump();
}

CsvRecordSink::CsvRecordSink(std::ostream& os, bool write_header) : os_(os) {
  if (write_header) os_ << sweep_csv_header() << '\n' << std::flush;
}

void CsvRecordSink::write(const SweepRecord& record) {
  const std::string line = sweep_csv_row(record) + '\n';
  std::lock_guard lock(mutex_);
  os_ << line << std::flush;
}

void JsonLinesRecordSink::write(const SweepRecord& record) {
  const std::string line = sweep_json_line(record) + '\n';
  std::lock_guard lock(mutex_);
  os_ << line << std::flush;
}

std::vector<std::pair<std::uint64_t, std::string>> read_manifest(const std::filesystem::path& path) {
  std::vector<std::pair<std::uint64_t, std::string>> out;
  std::ifstream in(path);
  if (!in) return out;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::io, "unreadable manifest " + path.string() + ": " + e.what());
  }
  for (const auto& entry : j.value("completed", nlohmann::json::array())) {
    out.emplace_back(entry.at("index").get<std::uint64_t>(), entry.at("key").get<std::string>());
  }
  return out;
}

namespace detail {

void write_manifest(const std::filesystem::path& path,
                    const std::vector<std::pair<std::uint64_t, std::string>>& done) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["completed"] = nlohmann::json::array();
  for (const auto& [index, key] : done) j["completed"].push_back({{"index", index}, {"key", key}});
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot write manifest " + tmp.string());
    out << j.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

}  // namespace pdsq
