// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "extinctd/models.hpp"
#include "model_util.hpp"

namespace extinctd {

namespace {

struct Entry {
  const char* name;
  const char* summary;
  std::vector<std::string> keys;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {"sis", "SIS epidemic on a network with Markovian switching",
       {"adjacency", "beta", "delta", "kappa", "Q"}},
      {"lorenz", "Lorenz system near the origin, additive noise on z",
       {"gamma", "z_star", "eta", "alpha0", "sigma", "rho", "beta", "alpha_hat"}},
      {"eco-discrete", "discrete-time Ricker community X_i' = X_i exp(r_i - (BX)_i + sigma_i xi_i)",
       {"r", "B", "sigma", "p", "inner_samples"}},
      {"kolmogorov", "Lotka-Volterra SDE dX_i = X_i (r_i - (BX)_i) dt + X_i g_i dE_i",
       {"r", "B", "g", "A", "p"}},
      {"linear", "linear SDE dx = Ax dt + Sigma x dW", {"A", "Sigma"}},
  };
  return entries;
}

const Entry& lookup(const std::string& name) {
  for (const Entry& e : registry())
    if (name == e.name) return e;
  throw Error(ErrorCode::UnknownModel, "unknown model '" + name + "'");
}

Eigen::MatrixXd matrix_param(const ParamRecord& p, const std::string& key) {
  return detail::to_matrix(p.matrix(key), key);
}

std::vector<double> vector_or(const ParamRecord& p, const std::string& key,
                              std::vector<double> fallback) {
  return p.has(key) ? p.vector(key) : std::move(fallback);
}

ModelBundle build_sis(const ParamRecord& p) {
  SisParams s;
  for (const auto& a : p.tensor("adjacency")) s.adjacency.push_back(detail::to_matrix(a, "adjacency"));
  s.beta = p.vector("beta");
  s.delta = p.vector("delta");
  s.kappa = vector_or(p, "kappa", {0.0});
  if (p.has("Q")) s.Q = matrix_param(p, "Q");
  return make_sis(s);
}

ModelBundle build_lorenz(const ParamRecord& p) {
  const bool classic = p.has("sigma") || p.has("rho") || p.has("alpha_hat");
  if (classic) {
    for (const char* k : {"gamma", "z_star", "eta", "alpha0"})
      if (p.has(k))
        throw Error(ErrorCode::InvalidConfig,
                    std::string("lorenz: '") + k + "' cannot be combined with sigma/rho/beta/alpha_hat");
    return make_lorenz(lorenz_from_classic(p.number("sigma"), p.number("rho"), p.number("beta"),
                                           p.number_or("alpha_hat", 0.0)));
  }
  if (p.has("beta")) throw Error(ErrorCode::InvalidConfig, "lorenz: 'beta' needs sigma and rho");
  LorenzParams l;
  l.gamma = p.number_or("gamma", 1.0);
  l.z_star = p.number("z_star");
  l.eta = p.number_or("eta", 1.0);
  l.alpha0 = p.number_or("alpha0", 0.0);
  return make_lorenz(l);
}

ModelBundle build_eco(const ParamRecord& p) {
  const std::vector<double> r = p.vector("r");
  const double samples = p.number_or("inner_samples", 10000.0);
  if (!(samples >= 1.0) || samples != std::floor(samples))
    throw Error(ErrorCode::InvalidConfig, "inner_samples must be a positive integer");
  return make_ricker(r, matrix_param(p, "B"), vector_or(p, "sigma", {0.0}), vector_or(p, "p", {}),
                     static_cast<std::size_t>(samples));
}

ModelBundle build_kolmogorov(const ParamRecord& p) {
  KolmogorovParams k;
  k.r = p.vector("r");
  k.B = matrix_param(p, "B");
  k.g = p.vector("g");
  if (p.has("A")) k.A = matrix_param(p, "A");
  k.p = vector_or(p, "p", {});
  return make_kolmogorov(k);
}

ModelBundle build_linear(const ParamRecord& p) {
  const Eigen::MatrixXd A = matrix_param(p, "A");
  const Eigen::MatrixXd S =
      p.has("Sigma") ? matrix_param(p, "Sigma") : Eigen::MatrixXd::Zero(A.rows(), A.cols());
  return make_linear_sde(A, S);
}

}  // namespace

std::vector<std::string> model_names() {
  std::vector<std::string> out;
  for (const Entry& e : registry()) out.emplace_back(e.name);
  return out;
}

std::string model_summary(const std::string& name) { return lookup(name).summary; }

std::vector<std::string> model_parameter_keys(const std::string& name) { return lookup(name).keys; }

ModelBundle make_model(const std::string& name, const ParamRecord& params) {
  const Entry& e = lookup(name);
  for (const auto& [key, value] : params.values)
    if (std::find(e.keys.begin(), e.keys.end(), key) == e.keys.end())
      throw Error(ErrorCode::UnknownKey, "model '" + name + "' has no parameter '" + key + "'");
  if (name == "sis") return build_sis(params);
  if (name == "lorenz") return build_lorenz(params);
  if (name == "eco-discrete") return build_eco(params);
  if (name == "kolmogorov") return build_kolmogorov(params);
  return build_linear(params);
}

double intertwining_gap(const ModelBundle& bundle, const StateVector& x0, const SimConfig& cfg,
                        std::uint64_t seed, std::uint64_t stream) {
  if (!bundle.map) throw Error(ErrorCode::InvalidArgument, "model '" + bundle.model.name + "' has no blow-up map");
  const QuadrupleMap& q = *bundle.map;
  if (x0.x.size() != bundle.model.dim) throw Error(ErrorCode::DimensionMismatch, "initial state dimension");
  StateVector y0{std::vector<double>(q.blown_up.dim), x0.regime};
  q.lift(x0.x, y0.x);

  RngStream rx(seed, stream);
  RngStream ry(seed, stream);
  const Trajectory X = simulate(bundle.model, x0, cfg, rx);
  const Trajectory Y = simulate(q.blown_up, y0, cfg, ry);
  const std::size_t n = std::min(X.size(), Y.size());
  std::vector<double> mapped(bundle.model.dim);
  double gap = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (X.time(k) != Y.time(k) || X.regime(k) != Y.regime(k)) return HUGE_VAL;
    q.forward(Y.coords(k), mapped);
    const auto xk = X.coords(k);
    for (std::size_t i = 0; i < mapped.size(); ++i) gap = std::max(gap, std::abs(mapped[i] - xk[i]));
  }
  return gap;
}

}  // namespace extinctd
