#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pdsq/divergences.hpp"
#include "pdsq/types.hpp"

namespace pdsq {

struct ModelParams {
  std::uint32_t n = 2;
  std::uint32_t k = 2;
  DistributionPair dist;

  static ModelParams bernoulli(std::uint32_t n, std::uint32_t k, double p, double q) {
    return {n, k, BernPair{p, q}.as_pair()};
  }

  /// Mean of a planted entry ("p" for graphs).
  double planted_mean() const noexcept { return mean_of(dist.planted); }
  /// Mean of a noise entry ("q" for graphs).
  double noise_mean() const noexcept { return mean_of(dist.noise); }

  /// Throws parameter/domain errors unless 2 <= k <= n and both laws are valid.
  void validate() const;
};

/// One draw from H0 or H1. Edge values are never stored: each is recomputed
/// from (seed, endpoints) through a keyed hash, so an instance costs O(n) bits
/// regardless of how many pairs are eventually looked at.
class Instance {
 public:
  static Instance sample(const ModelParams& params, Hypothesis hypothesis, std::uint64_t seed);

  const ModelParams& params() const noexcept { return params_; }
  Hypothesis hypothesis() const noexcept { return hypothesis_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint32_t n() const noexcept { return params_.n; }

  /// Entry X_ij. Bernoulli laws yield 0.0 or 1.0. Symmetric; throws self_loop on i == j.
  double edge_value(Vertex i, Vertex j) const;

  /// Sorted planted set; empty under H0. Harness and tests only.
  std::span<const Vertex> planted_set() const noexcept { return planted_; }
  bool is_planted(Vertex v) const noexcept {
    return !membership_.empty() && membership_[v];
  }

  /// JSON descriptor: params, hypothesis, seed. The planted set is never included.
  std::string descriptor_json() const;

 private:
  Instance(ModelParams params, Hypothesis h, std::uint64_t seed)
      : params_(std::move(params)), hypothesis_(h), seed_(seed) {}

  ModelParams params_;
  Hypothesis hypothesis_;
  std::uint64_t seed_;
  std::uint64_t edge_key_ = 0;
  std::vector<Vertex> planted_;
  std::vector<bool> membership_;
};

/// Draws X from `d` using the uniform u in (0, 1) via the quantile transform.
double quantile_draw(const Distribution& d, double u);

}  // namespace pdsq
