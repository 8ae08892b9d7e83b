// SPDX-License-Identifier: Apache-2.0
#include "extinctd/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "extinctd/models.hpp"

namespace extinctd {

namespace {

constexpr const char* kExperimentNames[] = {"simulate", "boundary-exponent", "slope",
                                            "criterion", "robustness-scan", "diagnostics"};

std::string where(const YAML::Node& n) {
  const YAML::Mark m = n.Mark();
  if (m.is_null()) return "";
  return " at line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1);
}

[[noreturn]] void bad(const YAML::Node& n, const std::string& msg) {
  throw Error(ErrorCode::InvalidConfig, msg + where(n));
}

void require_map(const YAML::Node& n, const std::string& what) {
  if (!n.IsMap()) bad(n, what + " must be a mapping");
}

void check_keys(const YAML::Node& n, const std::string& section, std::initializer_list<const char*> allowed) {
  for (const auto& kv : n) {
    const std::string key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw Error(ErrorCode::UnknownKey,
                  "unknown key '" + key + "' in " + section + where(kv.first));
  }
}

bool is_quoted(const YAML::Node& n) { return n.Tag() == "!"; }

double to_number(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar() || is_quoted(n)) bad(n, what + " must be a number");
  const std::string s = n.Scalar();
  // yaml-cpp accepts .inf/.nan spellings; anything else goes through strtod.
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      bad(n, what + " must be a number, got '" + s + "'");
    }
  }
  return v;
}

std::uint64_t to_unsigned(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar() || is_quoted(n)) bad(n, what + " must be a non-negative integer");
  const std::string s = n.Scalar();
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    bad(n, what + " must be a non-negative integer, got '" + s + "'");
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    bad(n, what + " is out of range");
  }
}

std::vector<double> to_vector(const YAML::Node& n, const std::string& what) {
  if (n.IsScalar()) return {to_number(n, what)};
  if (!n.IsSequence()) bad(n, what + " must be a list of numbers");
  std::vector<double> out;
  for (const auto& e : n) out.push_back(to_number(e, what));
  return out;
}

// Depth of nested sequences at the first element: 0 scalar, 1 list, ...
int depth(const YAML::Node& n) {
  if (!n.IsSequence()) return 0;
  if (n.size() == 0) return 1;
  return 1 + depth(n[0]);
}

ParamValue to_param(const YAML::Node& n, const std::string& key) {
  if (n.IsScalar()) {
    if (is_quoted(n)) return n.Scalar();
    char* end = nullptr;
    const std::string s = n.Scalar();
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() && *end == '\0') return v;
    return s;
  }
  switch (depth(n)) {
    case 1: return to_vector(n, "parameter '" + key + "'");
    case 2: {
      std::vector<std::vector<double>> m;
      for (const auto& row : n) {
        if (depth(row) != 1) bad(row, "parameter '" + key + "' has inconsistent nesting");
        m.push_back(to_vector(row, "parameter '" + key + "'"));
      }
      return m;
    }
    case 3: {
      std::vector<std::vector<std::vector<double>>> t;
      for (const auto& mat : n) {
        if (depth(mat) != 2) bad(mat, "parameter '" + key + "' has inconsistent nesting");
        std::vector<std::vector<double>> m;
        for (const auto& row : mat) m.push_back(to_vector(row, "parameter '" + key + "'"));
        t.push_back(std::move(m));
      }
      return t;
    }
    default: bad(n, "parameter '" + key + "' must be a number, string, list, matrix or list of matrices");
  }
}

StateVector to_state(const YAML::Node& n, const std::string& what) {
  if (n.IsMap()) {
    check_keys(n, what, {"x", "regime"});
    if (!n["x"]) throw Error(ErrorCode::MissingField, what + " needs 'x'" + where(n));
    StateVector s{to_vector(n["x"], what + ".x"), 0};
    if (n["regime"]) s.regime = static_cast<std::size_t>(to_unsigned(n["regime"], what + ".regime"));
    return s;
  }
  return {to_vector(n, what), 0};
}

std::vector<StateVector> to_states(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence()) bad(n, what + " must be a list of initial conditions");
  std::vector<StateVector> out;
  for (const auto& e : n) out.push_back(to_state(e, what));
  return out;
}

ExperimentConfig from_yaml(const YAML::Node& root) {
  if (!root.IsDefined() || root.IsNull()) throw Error(ErrorCode::ParseError, "config is empty");
  require_map(root, "config");
  check_keys(root, "config", {"model", "experiment", "seed", "replicas", "sim", "ics", "boundary_ics",
                              "estimator", "scan", "diagnostics", "output"});
  ExperimentConfig c;

  const YAML::Node model = root["model"];
  if (!model) throw Error(ErrorCode::MissingField, "config needs a 'model' section");
  require_map(model, "model");
  check_keys(model, "model", {"name", "params"});
  if (!model["name"] || !model["name"].IsScalar()) throw Error(ErrorCode::MissingField, "model needs a 'name'" + where(model));
  c.model = model["name"].Scalar();
  if (const YAML::Node params = model["params"]) {
    if (!params.IsNull()) {
      require_map(params, "model.params");
      for (const auto& kv : params) {
        const std::string key = kv.first.as<std::string>();
        c.params.set(key, to_param(kv.second, key));
      }
    }
  }

  const YAML::Node exp = root["experiment"];
  if (!exp) throw Error(ErrorCode::MissingField, "config needs an 'experiment'");
  if (!exp.IsScalar()) bad(exp, "experiment must be a name");
  const std::string kind = exp.Scalar();
  if (std::none_of(std::begin(kExperimentNames), std::end(kExperimentNames),
                   [&](const char* n) { return kind == n; }))
    bad(exp, "unknown experiment '" + kind + "'");
  c.experiment = experiment_from_name(kind);

  if (const YAML::Node s = root["seed"]) c.seed = to_unsigned(s, "seed");
  if (const YAML::Node r = root["replicas"]) c.replicas = static_cast<std::size_t>(to_unsigned(r, "replicas"));
  if (const YAML::Node s = root["sim"]) {
    require_map(s, "sim");
    check_keys(s, "sim", {"dt", "t_final", "max_rate_bound", "floor_epsilon", "record_every"});
    if (s["dt"]) c.sim.dt = to_number(s["dt"], "sim.dt");
    if (s["t_final"]) c.sim.t_final = to_number(s["t_final"], "sim.t_final");
    if (s["max_rate_bound"]) c.sim.max_rate_bound = to_number(s["max_rate_bound"], "sim.max_rate_bound");
    if (s["floor_epsilon"]) c.sim.floor_epsilon = to_number(s["floor_epsilon"], "sim.floor_epsilon");
    if (s["record_every"])
      c.sim.record_every = static_cast<std::size_t>(to_unsigned(s["record_every"], "sim.record_every"));
  }
  if (const YAML::Node n = root["ics"]) c.ics = to_states(n, "ics");
  if (const YAML::Node n = root["boundary_ics"]) c.boundary_ics = to_states(n, "boundary_ics");
  if (const YAML::Node e = root["estimator"]) {
    require_map(e, "estimator");
    check_keys(e, "estimator", {"burn_in", "window", "tolerance"});
    if (e["burn_in"]) c.estimator.burn_in = to_number(e["burn_in"], "estimator.burn_in");
    if (e["window"]) c.estimator.window = to_number(e["window"], "estimator.window");
    if (e["tolerance"]) c.estimator.tolerance = to_number(e["tolerance"], "estimator.tolerance");
  }
  if (const YAML::Node s = root["scan"]) {
    require_map(s, "scan");
    check_keys(s, "scan", {"param", "values", "limit_index", "jump_tolerance"});
    if (s["param"]) c.scan.param = s["param"].Scalar();
    if (s["values"]) c.scan.values = to_vector(s["values"], "scan.values");
    if (s["limit_index"]) c.scan.limit_index = static_cast<std::size_t>(to_unsigned(s["limit_index"], "scan.limit_index"));
    if (s["jump_tolerance"]) c.scan.jump_tolerance = to_number(s["jump_tolerance"], "scan.jump_tolerance");
  }
  if (const YAML::Node d = root["diagnostics"]) {
    require_map(d, "diagnostics");
    check_keys(d, "diagnostics", {"points"});
    if (d["points"]) c.diagnostic_points = static_cast<std::size_t>(to_unsigned(d["points"], "diagnostics.points"));
  }
  if (const YAML::Node o = root["output"]) {
    if (!o.IsScalar()) bad(o, "output must be a path");
    c.output = o.Scalar();
  }
  return c;
}

std::string num(double v) {
  if (std::isnan(v)) return ".nan";
  if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit_vector(YAML::Emitter& out, const std::vector<double>& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (double e : v) out << num(e);
  out << YAML::EndSeq;
}

void emit_matrix(YAML::Emitter& out, const std::vector<std::vector<double>>& m) {
  out << YAML::Flow << YAML::BeginSeq;
  for (const auto& row : m) emit_vector(out, row);
  out << YAML::EndSeq;
}

void emit_states(YAML::Emitter& out, const std::vector<StateVector>& states) {
  out << YAML::BeginSeq;
  for (const StateVector& s : states) {
    if (s.regime == 0) {
      emit_vector(out, s.x);
    } else {
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "x" << YAML::Value;
      emit_vector(out, s.x);
      out << YAML::Key << "regime" << YAML::Value << s.regime << YAML::EndMap;
    }
  }
  out << YAML::EndSeq;
}

}  // namespace

const char* experiment_name(ExperimentKind k) noexcept { return kExperimentNames[static_cast<int>(k)]; }

ExperimentKind experiment_from_name(const std::string& name) {
  for (int i = 0; i < 6; ++i)
    if (name == kExperimentNames[i]) return static_cast<ExperimentKind>(i);
  throw Error(ErrorCode::InvalidConfig,
              "unknown experiment '" + name +
                  "' (simulate, boundary-exponent, slope, criterion, robustness-scan, diagnostics)");
}

ExperimentConfig parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::ParseError, "YAML syntax error at line " + std::to_string(e.mark.line + 1) +
                                           ", column " + std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  try {
    return from_yaml(root);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::ParseError, "malformed config at line " + std::to_string(e.mark.line + 1) +
                                           ", column " + std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
}

ExperimentConfig load_config_unchecked(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

ExperimentConfig parse_config(const std::string& path) {
  ExperimentConfig c = load_config_unchecked(path);
  validate_config(c);
  return c;
}

void validate_config(const ExperimentConfig& c) {
  if (!c.seed) throw Error(ErrorCode::MissingField, "config needs a 'seed' (no clock-based default)");
  if (c.replicas == 0) throw Error(ErrorCode::InvalidConfig, "replicas must be >= 1");
  c.sim.validate();
  const ModelBundle bundle = make_model(c.model, c.params);
  const auto check_states = [](const std::vector<StateVector>& states, const ModelSpec& m,
                               const char* what) {
    for (const StateVector& s : states) {
      if (s.x.size() != m.dim)
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + " entries need " +
                                                      std::to_string(m.dim) + " coordinates, got " +
                                                      std::to_string(s.x.size()));
      if (s.regime >= m.regimes)
        throw Error(ErrorCode::InvalidConfig, std::string(what) + " regime out of range");
    }
  };
  check_states(c.ics, bundle.model, "ics");
  check_states(c.boundary_ics, bundle.boundary, "boundary_ics");
  const bool needs_ics = c.experiment == ExperimentKind::Simulate || c.experiment == ExperimentKind::Slope ||
                         c.experiment == ExperimentKind::Diagnostics;
  if (needs_ics && c.ics.empty())
    throw Error(ErrorCode::MissingField, std::string(experiment_name(c.experiment)) + " needs 'ics'");
  if (!(c.estimator.burn_in >= 0.0 && c.estimator.burn_in < 1.0))
    throw Error(ErrorCode::InvalidConfig, "estimator.burn_in must lie in [0, 1)");
  if (!(c.estimator.window > 0.0 && c.estimator.window <= 1.0))
    throw Error(ErrorCode::InvalidConfig, "estimator.window must lie in (0, 1]");
  if (!(c.estimator.tolerance >= 0.0)) throw Error(ErrorCode::InvalidConfig, "estimator.tolerance must be >= 0");
  if (c.experiment == ExperimentKind::RobustnessScan) {
    if (c.scan.param.empty()) throw Error(ErrorCode::MissingField, "robustness-scan needs scan.param");
    if (c.scan.values.empty()) throw Error(ErrorCode::MissingField, "robustness-scan needs scan.values");
    if (c.scan.limit_index >= c.scan.values.size())
      throw Error(ErrorCode::InvalidConfig, "scan.limit_index outside scan.values");
    const auto keys = model_parameter_keys(c.model);
    if (std::find(keys.begin(), keys.end(), c.scan.param) == keys.end())
      throw Error(ErrorCode::UnknownKey, "model '" + c.model + "' has no parameter '" + c.scan.param + "'");
  }
  if (c.experiment == ExperimentKind::Diagnostics && c.diagnostic_points == 0)
    throw Error(ErrorCode::InvalidConfig, "diagnostics.points must be >= 1");
}

std::string emit_config(const ExperimentConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << c.model;
  if (!c.params.values.empty()) {
    out << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
    for (const auto& [key, value] : c.params.values) {
      out << YAML::Key << key << YAML::Value;
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              out << num(v);
            } else if constexpr (std::is_same_v<T, std::string>) {
              out << YAML::DoubleQuoted << v;
            } else if constexpr (std::is_same_v<T, std::vector<double>>) {
              emit_vector(out, v);
            } else if constexpr (std::is_same_v<T, std::vector<std::vector<double>>>) {
              emit_matrix(out, v);
            } else {
              out << YAML::Flow << YAML::BeginSeq;
              for (const auto& m : v) emit_matrix(out, m);
              out << YAML::EndSeq;
            }
          },
          value);
    }
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  out << YAML::Key << "experiment" << YAML::Value << experiment_name(c.experiment);
  if (c.seed) out << YAML::Key << "seed" << YAML::Value << *c.seed;
  out << YAML::Key << "replicas" << YAML::Value << c.replicas;
  out << YAML::Key << "sim" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dt" << YAML::Value << num(c.sim.dt);
  out << YAML::Key << "t_final" << YAML::Value << num(c.sim.t_final);
  out << YAML::Key << "max_rate_bound" << YAML::Value << num(c.sim.max_rate_bound);
  out << YAML::Key << "floor_epsilon" << YAML::Value << num(c.sim.floor_epsilon);
  out << YAML::Key << "record_every" << YAML::Value << c.sim.record_every;
  out << YAML::EndMap;
  if (!c.ics.empty()) {
    out << YAML::Key << "ics" << YAML::Value;
    emit_states(out, c.ics);
  }
  if (!c.boundary_ics.empty()) {
    out << YAML::Key << "boundary_ics" << YAML::Value;
    emit_states(out, c.boundary_ics);
  }
  out << YAML::Key << "estimator" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "burn_in" << YAML::Value << num(c.estimator.burn_in);
  out << YAML::Key << "window" << YAML::Value << num(c.estimator.window);
  out << YAML::Key << "tolerance" << YAML::Value << num(c.estimator.tolerance);
  out << YAML::EndMap;
  if (!c.scan.param.empty() || !c.scan.values.empty()) {
    out << YAML::Key << "scan" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "param" << YAML::Value << c.scan.param;
    out << YAML::Key << "values" << YAML::Value;
    emit_vector(out, c.scan.values);
    out << YAML::Key << "limit_index" << YAML::Value << c.scan.limit_index;
    out << YAML::Key << "jump_tolerance" << YAML::Value << num(c.scan.jump_tolerance);
    out << YAML::EndMap;
  }
  out << YAML::Key << "diagnostics" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "points" << YAML::Value << c.diagnostic_points;
  out << YAML::EndMap;
  out << YAML::Key << "output" << YAML::Value << YAML::DoubleQuoted << c.output;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace extinctd
