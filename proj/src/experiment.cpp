// SPDX-License-Identifier: Apache-2.0
#include "extinctd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "extinctd/criteria.hpp"
#include "extinctd/exponents.hpp"
#include "extinctd/models.hpp"
#include "extinctd/parallel.hpp"
#include "model_util.hpp"

namespace extinctd {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// nlohmann's own float output is shortest-round-trip; reports use a fixed
// 17 significant digits instead, and non-finite values become null.
void write_json(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        write_json(it.value(), out, indent + 2);
      }
      out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool nested = j.front().is_structured();
      out += nested ? "[\n" : "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += nested ? ",\n" : ", ";
        first = false;
        if (nested) out += pad;
        write_json(e, out, indent + 2);
      }
      out += nested ? "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "]" : "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? fmt(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

Json estimate_json(const ExponentEstimate& e) {
  return Json{{"method", method_name(e.method)},
              {"point", e.point},
              {"ci_low", e.ci_low},
              {"ci_high", e.ci_high},
              {"n_replicas", e.n_replicas},
              {"horizon", e.horizon}};
}

struct ExponentRow {
  std::string label;
  ExponentEstimate estimate;
};

struct Outputs {
  Json results = Json::object();
  std::string trajectories;  // CSV bodies; empty when not produced
  std::string residuals;
  std::vector<ExponentRow> exponents;
};

EstimatorOptions estimator_options(const ExperimentConfig& c, const RunOptions& o) {
  EstimatorOptions e;
  e.seed = *c.seed;
  e.threads = o.threads;
  e.burn_in_fraction = c.estimator.burn_in;
  e.window = c.estimator.window;
  return e;
}

std::vector<StateVector> boundary_ics(const ExperimentConfig& c, const ModelBundle& b) {
  return c.boundary_ics.empty() ? b.boundary_ics : c.boundary_ics;
}

std::string csv_header(const char* lead, std::size_t dim, const char* tail) {
  std::string h = lead;
  for (std::size_t i = 0; i < dim; ++i) h += ",x_" + std::to_string(i);
  return h + tail;
}

void run_simulate(const ExperimentConfig& c, const RunOptions& o, const ModelBundle& b, Outputs& out) {
  const std::size_t reps = c.replicas;
  const std::size_t jobs = c.ics.size() * reps;
  std::vector<Trajectory> paths(jobs);
  parallel_for(jobs, o.threads, [&](std::size_t job) {
    RngStream rng(*c.seed, job);
    paths[job] = simulate(b.model, c.ics[job / reps], c.sim, rng);
  });

  std::string traj = csv_header("replica_id,t", b.model.dim, ",regime\n");
  std::string resid = "replica_id,t,dynkin,qv\n";
  Json runs = Json::array();
  std::size_t stopped = 0;
  for (std::size_t job = 0; job < jobs; ++job) {
    const Trajectory& p = paths[job];
    for (std::size_t k = 0; k < p.size(); ++k) {
      traj += std::to_string(job) + "," + fmt(p.time(k));
      for (double v : p.coords(k)) traj += "," + fmt(v);
      traj += "," + std::to_string(p.regime(k)) + "\n";
    }
    Json run{{"replica_id", job},
             {"ic", job / reps},
             {"replica", job % reps},
             {"t_end", p.duration()},
             {"stopped_at_floor", p.stopped_at_floor},
             {"final_distance", distance_to_extinction(b.model, p.view(p.size() - 1))}};
    if (p.stopped_at_floor) ++stopped;
    // Residuals of V only make sense off the extinction set.
    if (std::isfinite(b.suite.V(p.view(0)))) {
      const auto dyn = dynkin_residual(p, b.suite.V, b.suite.LV);
      const auto qv = qv_residual(p, b.suite.V, b.suite.LV, b.suite.gammaV);
      for (std::size_t k = 0; k < p.size(); ++k)
        resid += std::to_string(job) + "," + fmt(p.time(k)) + "," + fmt(dyn[k]) + "," + fmt(qv[k]) + "\n";
      run["dynkin_final"] = dyn.back();
      run["qv_final"] = qv.back();
    }
    runs.push_back(std::move(run));
  }
  out.results["paths"] = std::move(runs);
  out.results["fraction_stopped_at_floor"] = static_cast<double>(stopped) / static_cast<double>(jobs);
  out.trajectories = std::move(traj);
  out.residuals = std::move(resid);
}

void run_boundary(const ExperimentConfig& c, const RunOptions& o, const ModelBundle& b, Outputs& out) {
  const BoundaryExponentReport r =
      boundary_exponent(b.boundary, b.boundary_H, boundary_ics(c, b), c.sim, c.replicas, estimator_options(c, o));
  Json per = Json::array();
  for (std::size_t i = 0; i < r.per_ic.size(); ++i) {
    per.push_back(estimate_json(r.per_ic[i]));
    out.exponents.push_back({"boundary_ic" + std::to_string(i), r.per_ic[i]});
  }
  out.exponents.push_back({"boundary", r.estimate});
  out.results["estimate"] = estimate_json(r.estimate);
  out.results["per_ic"] = std::move(per);
  out.results["argmin_ic"] = r.argmin;
  out.results["alpha_candidate"] = b.suite.alpha_candidate;
  out.results["positive"] = r.estimate.ci_low > 0.0;
}

void run_slope(const ExperimentConfig& c, const RunOptions& o, const ModelBundle& b, Outputs& out) {
  const ExtinctionReport r = extinction_fraction(b.model, b.suite, c.ics, c.sim, c.replicas,
                                                 c.estimator.tolerance, estimator_options(c, o));
  Json per = Json::array();
  for (const ReplicaOutcome& oc : r.slopes.outcomes) {
    ExponentEstimate e;
    e.point = e.ci_low = e.ci_high = oc.has_slope ? oc.slope : std::nan("");
    e.method = EstimateMethod::TrajectorySlope;
    e.horizon = c.sim.t_final;
    out.exponents.push_back({"ic" + std::to_string(oc.ic) + "_rep" + std::to_string(oc.replica), e});
    per.push_back(Json{{"ic", oc.ic},
                       {"replica", oc.replica},
                       {"slope", oc.has_slope ? oc.slope : std::nan("")},
                       {"stopped_at_floor", oc.stopped_at_floor}});
  }
  out.exponents.push_back({"mean", r.slopes.estimate});
  out.results["estimate"] = estimate_json(r.slopes.estimate);
  out.results["extinction_fraction"] = r.fraction;
  out.results["alpha_candidate"] = b.suite.alpha_candidate;
  out.results["tolerance"] = c.estimator.tolerance;
  out.results["replicas"] = std::move(per);
}

double reference_value(const ModelBundle& b, const std::string& key) {
  for (const auto& [k, v] : b.reference)
    if (k == key) return v;
  throw Error(ErrorCode::MissingField, "model '" + b.model.name + "' has no reference value '" + key + "'");
}

void run_criterion(const ExperimentConfig& c, const RunOptions& o, const ModelBundle& b, Outputs& out) {
  Json& res = out.results;
  if (c.model == "sis") {
    const std::size_t m = b.model.regimes;
    std::vector<double> lambda1, rho(1, 1.0);
    for (std::size_t s = 0; s < m; ++s) lambda1.push_back(reference_value(b, "lambda1_" + std::to_string(s)));
    if (m > 1) {
      const Eigen::VectorXd r = ctmc_stationary(CtmcGenerator(detail::to_matrix(c.params.matrix("Q"), "Q")));
      rho.assign(r.data(), r.data() + r.size());
    }
    const auto delta = detail::broadcast(c.params.vector("delta"), m, "delta");
    const auto beta = detail::broadcast(c.params.vector("beta"), m, "beta");
    const double index = sis_extinction_index(delta, beta, lambda1, rho);
    res["index"] = index;
    res["extinct"] = index > 0.0;
    res["lambda1"] = lambda1;
    res["rho"] = rho;
    out.exponents.push_back({"sis_index", closed_form_estimate(index)});
  } else if (c.model == "lorenz") {
    const ExponentEstimate mc = lorenz_lambda_mc(
        reference_value(b, "gamma"), reference_value(b, "z_star"), reference_value(b, "eta"),
        reference_value(b, "alpha0"), c.sim, c.replicas, estimator_options(c, o), boundary_ics(c, b));
    res["lambda0"] = reference_value(b, "lambda0");
    res["lambda_measures"] = reference_value(b, "lambda_measures");
    res["lambda_mc"] = estimate_json(mc);
    res["index"] = -mc.point;
    res["extinct"] = mc.ci_high < 0.0;
    out.exponents.push_back({"lambda_mc", mc});
  } else if (c.model == "eco-discrete" || c.model == "kolmogorov") {
    const std::size_t n = b.model.dim;
    const std::vector<StateVector> ics = boundary_ics(c, b);
    std::vector<ExponentEstimate> rates;
    Json per = Json::array();
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<StateVector> face;
      for (const StateVector& s : ics)
        if (s.x[i] == 0.0) face.push_back(s);
      if (face.empty()) face.push_back(StateVector{std::vector<double>(n, 0.0), 0});
      EstimatorOptions eo = estimator_options(c, o);
      eo.stream_base = i * 1000003ULL;
      const ExponentEstimate r = invasion_rate(b.boundary, i, b.species_H[i], face, c.sim, c.replicas, eo);
      rates.push_back(r);
      per.push_back(estimate_json(r));
      out.exponents.push_back({"invasion_rate_" + std::to_string(i), r});
    }
    const std::vector<double> p = c.params.has("p") ? c.params.vector("p") : std::vector<double>(n, 1.0);
    const InvasionCriterion crit = weighted_invasion_criterion(p, rates);
    res["invasion_rates"] = std::move(per);
    res["weighted_sum"] = crit.value;
    res["weighted_sum_ci_high"] = crit.ci_high;
    res["index"] = -crit.value;
    res["extinct"] = crit.extinct;
  } else {
    res["index"] = b.suite.alpha_candidate;
    res["extinct"] = b.suite.alpha_candidate > 0.0;
    out.exponents.push_back({"linear_index", closed_form_estimate(b.suite.alpha_candidate)});
  }
}

void run_scan(const ExperimentConfig& c, const RunOptions& o, const ModelBundle& b, Outputs& out) {
  const BoundaryFamily family = [&](double theta) {
    ParamRecord p = c.params;
    p.set(c.scan.param, theta);
    ModelBundle m = make_model(c.model, p);
    return std::make_pair(m.boundary, m.boundary_H);
  };
  const ScanReport r = robustness_scan(family, c.scan.values, boundary_ics(c, b), c.sim, c.replicas,
                                       estimator_options(c, o), c.scan.limit_index, c.scan.jump_tolerance);
  Json pts = Json::array();
  for (const ScanPoint& sp : r.points) {
    Json e = estimate_json(sp.estimate);
    e["theta"] = sp.theta;
    pts.push_back(std::move(e));
    out.exponents.push_back({c.scan.param + "=" + fmt(sp.theta), sp.estimate});
  }
  out.results["param"] = c.scan.param;
  out.results["points"] = std::move(pts);
  out.results["limit_index"] = r.limit_index;
  out.results["nearest_drop"] = r.nearest_drop;
  out.results["envelope_ok"] = r.envelope_ok;
}

void run_diagnostics(const ExperimentConfig& c, const RunOptions&, const ModelBundle& b, Outputs& out) {
  // Sample points along one path per initial condition, at distance >= 10 floor_epsilon from M0.
  std::vector<StateVector> points;
  const std::size_t per_ic = (c.diagnostic_points + c.ics.size() - 1) / c.ics.size();
  for (std::size_t i = 0; i < c.ics.size(); ++i) {
    RngStream rng(*c.seed, i);
    const Trajectory p = simulate(b.model, c.ics[i], c.sim, rng);
    std::vector<StateVector> usable;
    for (std::size_t k = 0; k < p.size(); ++k)
      if (std::isfinite(b.suite.V(p.view(k))) &&
          distance_to_extinction(b.model, p.view(k)) >= 10.0 * c.sim.floor_epsilon)
        usable.push_back(p.state(k));
    for (std::size_t j = 0; j < per_ic && !usable.empty(); ++j)
      points.push_back(usable[j * usable.size() / per_ic]);
  }
  if (points.empty()) throw Error(ErrorCode::EmptyWindow, "no sample points off the extinction set");
  GeneratorOptions go;
  go.seed = *c.seed;
  const DiagnosticsReport d = suite_diagnostics(b.model, b.suite, points, go);
  double worst = 0.0;
  for (const StateVector& x : points) {
    const double fd = apply_generator(b.model, b.suite.V, x, go).Lf;
    const double lv = b.suite.LV(x);
    worst = std::max(worst, std::abs(fd - lv) / std::max(1e-3, 0.01 * std::abs(lv)));
  }
  out.results["points"] = d.points;
  out.results["lw_violation"] = d.lw_violation;
  out.results["lu_violation"] = d.lu_violation;
  out.results["gamma_w_violation"] = d.gamma_w_violation;
  out.results["gamma_v_violation"] = d.gamma_v_violation;
  out.results["suite_passed"] = d.passed;
  out.results["h_agreement_ratio"] = worst;
  out.results["h_agreement_passed"] = worst <= 1.0;
}

void write_file(const fs::path& path, const std::string& body, std::vector<std::string>& written) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  written.push_back(path.string());
  f << body;
  f.close();
  if (!f) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& c, const RunOptions& opts) {
  validate_config(c);
  RunOptions o = opts;
  o.threads = std::max<std::size_t>(o.threads, 1);
  const ModelBundle b = make_model(c.model, c.params);

  Outputs out;
  switch (c.experiment) {
    case ExperimentKind::Simulate: run_simulate(c, o, b, out); break;
    case ExperimentKind::BoundaryExponent: run_boundary(c, o, b, out); break;
    case ExperimentKind::Slope: run_slope(c, o, b, out); break;
    case ExperimentKind::Criterion: run_criterion(c, o, b, out); break;
    case ExperimentKind::RobustnessScan: run_scan(c, o, b, out); break;
    case ExperimentKind::Diagnostics: run_diagnostics(c, o, b, out); break;
  }

  Json report = Json::object();
  report["model"] = c.model;
  report["experiment"] = experiment_name(c.experiment);
  report["seed"] = *c.seed;
  report["replicas"] = c.replicas;
  report["sim"] = Json{{"dt", c.sim.dt},
                       {"t_final", c.sim.t_final},
                       {"max_rate_bound", c.sim.max_rate_bound},
                       {"floor_epsilon", c.sim.floor_epsilon},
                       {"record_every", c.sim.record_every}};
  Json ref = Json::object();
  for (const auto& [k, v] : b.reference) ref[k] = v;
  report["reference"] = std::move(ref);
  report["results"] = std::move(out.results);

  RunResult result;
  write_json(report, result.report_json, 0);
  result.report_json += "\n";

  const fs::path dir(c.output);
  std::vector<std::string> written;
  try {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create output directory '" + c.output + "': " + ec.message());
    if (!out.trajectories.empty()) write_file(dir / "trajectories.csv", out.trajectories, written);
    if (!out.residuals.empty()) write_file(dir / "residuals.csv", out.residuals, written);
    if (!out.exponents.empty()) {
      std::string csv = "label,method,point,ci_low,ci_high\n";
      for (const ExponentRow& r : out.exponents)
        csv += r.label + "," + method_name(r.estimate.method) + "," + fmt(r.estimate.point) + "," +
               fmt(r.estimate.ci_low) + "," + fmt(r.estimate.ci_high) + "\n";
      write_file(dir / "exponents.csv", csv, written);
    }
    write_file(dir / "report.json", result.report_json, written);
  } catch (...) {
    for (const std::string& f : written) {
      std::error_code ignored;
      fs::remove(f, ignored);
    }
    throw;
  }
  result.files = std::move(written);
  return result;
}

}  // namespace extinctd
