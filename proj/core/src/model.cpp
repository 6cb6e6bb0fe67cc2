#include "pdsq/model.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <json.hpp>
#include <numbers>

#include "pdsq/error.hpp"
#include "pdsq/random.hpp"
#include "records_json.hpp"

namespace pdsq {

void ModelParams::validate() const {
  if (n < 2) fail(ErrorKind::parameter, "n must be at least 2");
  if (k < 2) fail(ErrorKind::parameter, "k must be at least 2");
  if (k > n) fail(ErrorKind::parameter, "k must not exceed n");
  auto check = [](const Distribution& d, const char* what) {
    if (const auto* b = std::get_if<Bernoulli>(&d)) {
      if (!(b->theta >= 0.0 && b->theta <= 1.0)) {
        fail(ErrorKind::domain, std::string(what) + " probability must lie in [0, 1]");
      }
    } else {
      const auto& g = std::get<Gaussian>(d);
      if (!std::isfinite(g.mean) || !(g.variance > 0.0) || !std::isfinite(g.variance)) {
        fail(ErrorKind::domain, std::string(what) + " Gaussian needs finite mean and positive variance");
      }
    }
  };
  check(dist.planted, "planted");
  check(dist.noise, "noise");
  if (dist.planted.index() != dist.noise.index()) {
    fail(ErrorKind::domain, "planted and noise laws must be of the same kind");
  }
}

double quantile_draw(const Distribution& d, double u) {
  if (const auto* b = std::get_if<Bernoulli>(&d)) return u < b->theta ? 1.0 : 0.0;
  const auto& g = std::get<Gaussian>(d);
  const double z = std::numbers::sqrt2 * boost::math::erf_inv(2.0 * u - 1.0);
  return g.mean + std::sqrt(g.variance) * z;
}

Instance Instance::sample(const ModelParams& params, Hypothesis hypothesis, std::uint64_t seed) {
  params.validate();
  Instance inst(params, hypothesis, seed);
  inst.edge_key_ = derive_seed(seed, {stream::edges});
  if (hypothesis == Hypothesis::alternative) {
    Rng rng(derive_seed(seed, {stream::planted_set}));
    inst.planted_ = sample_k_subset(params.n, params.k, rng);
    inst.membership_.assign(params.n, false);
    for (Vertex v : inst.planted_) inst.membership_[v] = true;
  }
  return inst;
}

double Instance::edge_value(Vertex i, Vertex j) const {
  if (i == j) fail(ErrorKind::self_loop, "self-loop query (" + std::to_string(i) + ", " + std::to_string(i) + ")");
  if (i >= params_.n || j >= params_.n) fail(ErrorKind::parameter, "vertex index out of range");
  const VertexPair e = VertexPair::of(i, j);
  const double u = to_open_unit(mix64(edge_key_ ^ mix64(e.key())));
  const bool planted = is_planted(e.lo) && is_planted(e.hi);
  return quantile_draw(planted ? params_.dist.planted : params_.dist.noise, u);
}

std::string Instance::descriptor_json() const {
  nlohmann::json j;
  j["params"] = detail::params_to_json(params_);
  j["hypothesis"] = std::string(to_string(hypothesis_));
  j["seed"] = seed_;
  return j.dump();
}

}  // namespace pdsq
