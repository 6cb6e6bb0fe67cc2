#include "pdsq/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pdsq/error.hpp"

namespace pdsq {

std::string_view to_string(LogBase base) noexcept {
  return base == LogBase::natural ? "natural" : "base2";
}

LogBase parse_log_base(std::string_view text) {
  if (text == "natural" || text == "e" || text == "ln") return LogBase::natural;
  if (text == "base2" || text == "2" || text == "log2") return LogBase::base2;
  fail(ErrorKind::parameter, "unknown log base '" + std::string(text) + "'");
}

double log_in(double x, LogBase base) {
  return base == LogBase::natural ? std::log(x) : std::log2(x);
}

double mean_of(const Distribution& d) noexcept {
  return std::visit(
      [](const auto& v) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Bernoulli>) {
          return v.theta;
        } else {
          return v.mean;
        }
      },
      d);
}

std::string describe(const Distribution& d) {
  std::ostringstream os;
  os.precision(17);
  if (const auto* b = std::get_if<Bernoulli>(&d)) {
    os << "Bernoulli(" << b->theta << ")";
  } else {
    const auto& g = std::get<Gaussian>(d);
    os << "Gaussian(" << g.mean << ", " << g.variance << ")";
  }
  return os.str();
}

bool DistributionPair::is_bernoulli() const noexcept {
  return std::holds_alternative<Bernoulli>(planted) && std::holds_alternative<Bernoulli>(noise);
}

namespace {

void check_probability(double theta, const char* name) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    fail(ErrorKind::domain, std::string(name) + " must lie in [0, 1]");
  }
}

void check_gaussian(const Gaussian& g, const char* name) {
  if (!std::isfinite(g.mean) || !(g.variance > 0.0) || !std::isfinite(g.variance)) {
    fail(ErrorKind::domain, std::string(name) + " needs a finite mean and positive variance");
  }
}

double chi_square_bernoulli(double p, double q) {
  check_probability(p, "planted probability");
  check_probability(q, "noise probability");
  // Two-point sum over x in {0, 1}; terms with Q(x) = 0 contribute only if P(x) > 0.
  double total = 0.0;
  const double P[2] = {1.0 - p, p};
  const double Q[2] = {1.0 - q, q};
  for (int x = 0; x < 2; ++x) {
    if (Q[x] == 0.0) {
      if (P[x] > 0.0) fail(ErrorKind::divergence_infinite, "chi-square diverges: planted mass outside noise support");
      continue;
    }
    const double d = P[x] - Q[x];
    total += d * d / Q[x];
  }
  return total;
}

double chi_square_gaussian(const Gaussian& planted, const Gaussian& noise) {
  check_gaussian(planted, "planted Gaussian");
  check_gaussian(noise, "noise Gaussian");
  if (planted == noise) return 0.0;
  const double s1 = planted.variance;
  const double s0 = noise.variance;
  const double denom = 2.0 * s0 - s1;
  if (denom <= 0.0) {
    fail(ErrorKind::divergence_infinite, "chi-square diverges: need 2*noise variance > planted variance");
  }
  const double dm = planted.mean - noise.mean;
  // 1 + chi^2 = s0 / sqrt(s1 * (2 s0 - s1)) * exp(dm^2 / (2 s0 - s1))
  const double log_one_plus = std::log(s0) - 0.5 * std::log(s1 * denom) + dm * dm / denom;
  return std::expm1(log_one_plus);
}

double kl_gaussian(const Gaussian& planted, const Gaussian& noise) {
  check_gaussian(planted, "planted Gaussian");
  check_gaussian(noise, "noise Gaussian");
  const double dm = planted.mean - noise.mean;
  return 0.5 * (std::log(noise.variance / planted.variance) +
                (planted.variance + dm * dm) / noise.variance - 1.0);
}

}  // namespace

double kl_bernoulli(double a, double b, LogBase base) {
  check_probability(a, "first Bernoulli parameter");
  check_probability(b, "second Bernoulli parameter");
  double total = 0.0;
  const double A[2] = {1.0 - a, a};
  const double B[2] = {1.0 - b, b};
  for (int x = 0; x < 2; ++x) {
    if (A[x] == 0.0) continue;
    if (B[x] == 0.0) fail(ErrorKind::divergence_infinite, "KL diverges: support mismatch");
    total += A[x] * std::log(A[x] / B[x]);
  }
  // Rounding can leave a tiny negative residue when a == b.
  total = std::max(total, 0.0);
  return base == LogBase::natural ? total : total / std::numbers::ln2;
}

double chi_square(const DistributionPair& pair) {
  if (const auto* p = std::get_if<Bernoulli>(&pair.planted)) {
    if (const auto* q = std::get_if<Bernoulli>(&pair.noise)) return chi_square_bernoulli(p->theta, q->theta);
  } else if (const auto* p = std::get_if<Gaussian>(&pair.planted)) {
    if (const auto* q = std::get_if<Gaussian>(&pair.noise)) return chi_square_gaussian(*p, *q);
  }
  fail(ErrorKind::domain, "planted and noise distributions must be of the same kind");
}

double kl(const DistributionPair& pair, LogBase base) {
  if (const auto* p = std::get_if<Bernoulli>(&pair.planted)) {
    if (const auto* q = std::get_if<Bernoulli>(&pair.noise)) return kl_bernoulli(p->theta, q->theta, base);
  } else if (const auto* p = std::get_if<Gaussian>(&pair.planted)) {
    if (const auto* q = std::get_if<Gaussian>(&pair.noise)) {
      const double nat = kl_gaussian(*p, *q);
      return base == LogBase::natural ? nat : nat / std::numbers::ln2;
    }
  }
  fail(ErrorKind::domain, "planted and noise distributions must be of the same kind");
}

}  // namespace pdsq
