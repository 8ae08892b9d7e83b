// SPDX-License-Identifier: Apache-2.0
//
// State spaces, trajectories, the model abstraction and the reproducible
// random stream shared by every simulator.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "extinctd/error.hpp"

namespace extinctd {

/// A point of R^n x {0..m-1}. Models without switching use regime 0.
struct StateVector {
  std::vector<double> x;
  std::size_t regime = 0;

  bool operator==(const StateVector&) const = default;
};

/// Non-owning view of a state; what observables and vector fields consume.
struct StateView {
  std::span<const double> x;
  std::size_t regime = 0;

  StateView() = default;
  StateView(std::span<const double> coords, std::size_t r) : x(coords), regime(r) {}
  StateView(const StateVector& s) : x(s.x), regime(s.regime) {}  // NOLINT(implicit)

  StateVector to_state() const { return {std::vector<double>(x.begin(), x.end()), regime}; }
};

using Observable = std::function<double(const StateView&)>;

enum class Family { SwitchingDiffusion, Sde, DiscreteChain };

const char* family_name(Family f) noexcept;

/// Counter-free reproducible stream: identical (seed, stream_id) always yields
/// the same sequence, independent of which thread consumes it.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  double normal();
  double exponential(double rate = 1.0);
  void fill_normal(std::span<double> out);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Vector fields write into caller-provided buffers so that steppers do not
// allocate per step.
using DriftFn = std::function<void(const StateView&, std::span<double> out)>;
/// Row-major dim x noise_dim matrix.
using DiffusionFn = std::function<void(const StateView&, std::span<double> out)>;
/// Row-major m x m generator Q(x); rows sum to zero.
using RatesFn = std::function<void(const StateView&, std::span<double> out)>;
using StepMapFn =
    std::function<void(const StateView&, std::span<const double> noise, std::span<double> out)>;
using NoiseSamplerFn = std::function<void(RngStream&, std::span<double> out)>;
using ProjectionFn = std::function<void(std::span<double> x)>;
using DistanceFn = std::function<double(const StateView&)>;

/// A simulatable Markov family together with its extinction-set metric.
/// Immutable after construction; safe to share across threads.
struct ModelSpec {
  std::string name;
  Family family = Family::Sde;
  std::size_t dim = 0;
  std::size_t noise_dim = 0;
  std::size_t regimes = 1;

  DriftFn drift;
  DiffusionFn diffusion;
  RatesFn switch_rates;
  StepMapFn step_map;
  NoiseSamplerFn noise_sampler;  // defaults to iid standard normals when empty
  ProjectionFn domain_projection;  // identity when empty
  DistanceFn extinction_distance;

  /// True when the rate matrix does not depend on x (enables a cheaper thinning path).
  bool constant_rates = false;
};

/// Checks the structural invariants of a model (fields required by the
/// family, positive dimension). Throws MissingField / DimensionMismatch.
void validate_model(const ModelSpec& model);

/// Checks q_ij >= 0 off the diagonal and zero row sums within 1e-12.
void check_rate_matrix(std::span<const double> q, std::size_t m);

/// d(x, M0) under the model's declared metric; 0 iff x lies in M0.
double distance_to_extinction(const ModelSpec& model, const StateView& x);

/// Cadlag sample path recorded on a time grid. Points flagged as jumps are
/// discontinuities (regime switches or chain steps); quadrature is
/// left-constant into them and trapezoidal elsewhere.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::size_t dim) : dim_(dim) {}

  void push(double t, const StateView& s, bool jump);
  void reserve(std::size_t n);

  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  std::size_t dim() const noexcept { return dim_; }

  double time(std::size_t k) const { return times_[k]; }
  std::span<const double> coords(std::size_t k) const {
    return {coords_.data() + k * dim_, dim_};
  }
  std::size_t regime(std::size_t k) const { return regimes_[k]; }
  StateView view(std::size_t k) const { return {coords(k), regimes_[k]}; }
  StateVector state(std::size_t k) const { return view(k).to_state(); }
  bool is_jump(std::size_t k) const { return jump_flags_[k] != 0; }

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<std::size_t>& jumps() const noexcept { return jumps_; }

  double duration() const { return times_.empty() ? 0.0 : times_.back(); }

  /// Set by the simulator when the path reached the extinction floor before the horizon.
  bool stopped_at_floor = false;

 private:
  std::size_t dim_ = 0;
  std::vector<double> times_;
  std::vector<double> coords_;
  std::vector<std::size_t> regimes_;
  std::vector<std::uint8_t> jump_flags_;
  std::vector<std::size_t> jumps_;
};

/// Values a structured model record may carry.
using ParamValue = std::variant<double, std::string, std::vector<double>,
                                std::vector<std::vector<double>>,
                                std::vector<std::vector<std::vector<double>>>>;

/// Named model parameters as read from a config file.
struct ParamRecord {
  std::map<std::string, ParamValue> values;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  void set(const std::string& key, ParamValue v) { values[key] = std::move(v); }

  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  std::string text(const std::string& key) const;
  /// Scalars are promoted to a one-element vector.
  std::vector<double> vector(const std::string& key) const;
  std::vector<std::vector<double>> matrix(const std::string& key) const;
  std::vector<std::vector<std::vector<double>>> tensor(const std::string& key) const;

  bool operator==(const ParamRecord&) const = default;
};

}  // namespace extinctd
