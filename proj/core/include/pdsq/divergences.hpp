#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace pdsq {

enum class LogBase { natural, base2 };

std::string_view to_string(LogBase base) noexcept;
LogBase parse_log_base(std::string_view text);

/// log(x) in the requested base.
double log_in(double x, LogBase base);

struct Bernoulli {
  double theta = 0.5;
  friend bool operator==(const Bernoulli&, const Bernoulli&) = default;
};

struct Gaussian {
  double mean = 0.0;
  double variance = 1.0;
  friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

using Distribution = std::variant<Bernoulli, Gaussian>;

double mean_of(const Distribution& d) noexcept;
std::string describe(const Distribution& d);

/// Planted-entry law versus ambient-noise law.
struct DistributionPair {
  Distribution planted = Bernoulli{1.0};
  Distribution noise = Bernoulli{0.5};

  bool is_bernoulli() const noexcept;
  friend bool operator==(const DistributionPair&, const DistributionPair&) = default;
};

/// Edge densities of the planted-dense-subgraph model.
struct BernPair {
  double p = 1.0;  // inside the planted set
  double q = 0.5;  // everywhere else

  DistributionPair as_pair() const { return {Bernoulli{p}, Bernoulli{q}}; }
};

/// chi^2(planted || noise) = E_noise[(dP/dQ)^2] - 1. Base-free.
/// Throws divergence_infinite when the integral diverges, domain on bad parameters.
double chi_square(const DistributionPair& pair);
inline double chi_square(const BernPair& bp) { return chi_square(bp.as_pair()); }

/// d_KL(planted || noise) in the requested log base.
double kl(const DistributionPair& pair, LogBase base = LogBase::natural);
inline double kl(const BernPair& bp, LogBase base = LogBase::natural) {
  return kl(bp.as_pair(), base);
}

/// d_KL(Bern(a) || Bern(b)), with 0 log 0 = 0.
double kl_bernoulli(double a, double b, LogBase base = LogBase::natural);

/// C(m, 2) = m(m-1)/2.
constexpr std::uint64_t binom2(std::uint64_t m) noexcept {
  return m < 2 ? 0 : m * (m - 1) / 2;
}

}  // namespace pdsq
