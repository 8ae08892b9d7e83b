// SPDX-License-Identifier: Apache-2.0
#include "extinctd/process.hpp"

#include <cmath>
#include <numbers>

namespace extinctd {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::seed_seq::result_type low32(std::uint64_t v) {
  return static_cast<std::seed_seq::result_type>(v & 0xffffffffULL);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t s = seed;
  const std::uint64_t a = splitmix64(s);
  std::uint64_t t = stream_id ^ 0xd1b54a32d192ed03ULL;
  const std::uint64_t b = splitmix64(t);
  std::uint64_t mix = a ^ (b * 0x9e3779b97f4a7c15ULL);
  std::seed_seq seq{low32(a), low32(a >> 32), low32(b), low32(b >> 32),
                    low32(splitmix64(mix)), low32(splitmix64(mix))};
  return std::mt19937_64(seq);
}

}  // namespace

const char* family_name(Family f) noexcept {
  switch (f) {
    case Family::SwitchingDiffusion: return "SwitchingDiffusion";
    case Family::Sde: return "Sde";
    case Family::DiscreteChain: return "DiscreteChain";
  }
  return "?";
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() {
  return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

double RngStream::exponential(double rate) { return -std::log(uniform_open()) / rate; }

void RngStream::fill_normal(std::span<double> out) {
  for (double& v : out) v = normal();
}

void validate_model(const ModelSpec& model) {
  if (model.dim == 0) throw Error(ErrorCode::DimensionMismatch, "model dimension must be positive");
  if (model.regimes == 0) throw Error(ErrorCode::DimensionMismatch, "model needs at least one regime");
  if (!model.extinction_distance)
    throw Error(ErrorCode::MissingField, "extinction_distance is required");
  switch (model.family) {
    case Family::SwitchingDiffusion:
      if (!model.switch_rates) throw Error(ErrorCode::MissingField, "switch_rates is required");
      [[fallthrough]];
    case Family::Sde:
      if (!model.drift) throw Error(ErrorCode::MissingField, "drift is required");
      if (!model.diffusion && model.noise_dim > 0)
        throw Error(ErrorCode::MissingField, "diffusion is required");
      if (model.step_map) throw Error(ErrorCode::InvalidArgument, "diffusions take no step_map");
      break;
    case Family::DiscreteChain:
      if (!model.step_map) throw Error(ErrorCode::MissingField, "step_map is required");
      if (model.drift || model.diffusion || model.switch_rates)
        throw Error(ErrorCode::InvalidArgument, "discrete chains take only a step_map");
      break;
  }
  if (model.family != Family::SwitchingDiffusion && model.regimes != 1)
    throw Error(ErrorCode::DimensionMismatch, "only switching diffusions carry several regimes");
}

void check_rate_matrix(std::span<const double> q, std::size_t m) {
  if (q.size() != m * m) throw Error(ErrorCode::DimensionMismatch, "rate matrix must be m x m");
  for (std::size_t i = 0; i < m; ++i) {
    double row = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double v = q[i * m + j];
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidRateMatrix, "non-finite rate");
      if (i != j && v < 0.0)
        throw Error(ErrorCode::InvalidRateMatrix,
                    "negative off-diagonal rate at (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
      row += v;
      scale = std::max(scale, std::abs(v));
    }
    if (std::abs(row) > 1e-12 * std::max(1.0, scale))
      throw Error(ErrorCode::InvalidRateMatrix,
                  "row " + std::to_string(i) + " sums to " + std::to_string(row));
  }
}

double distance_to_extinction(const ModelSpec& model, const StateView& x) {
  return model.extinction_distance(x);
}

void Trajectory::push(double t, const StateView& s, bool jump) {
  if (s.x.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "state dimension differs from trajectory");
  if (times_.empty()) {
    if (t != 0.0) throw Error(ErrorCode::InvalidArgument, "trajectories start at t = 0");
  } else if (!(t > times_.back())) {
    throw Error(ErrorCode::InvalidArgument, "trajectory times must be strictly increasing");
  }
  if (!jump && !regimes_.empty() && regimes_.back() != s.regime)
    throw Error(ErrorCode::InvalidArgument, "regime changes must be flagged as jumps");
  if (jump && !times_.empty()) jumps_.push_back(times_.size());
  times_.push_back(t);
  coords_.insert(coords_.end(), s.x.begin(), s.x.end());
  regimes_.push_back(s.regime);
  jump_flags_.push_back(jump && times_.size() > 1 ? 1 : 0);
}

void Trajectory::reserve(std::size_t n) {
  times_.reserve(n);
  coords_.reserve(n * dim_);
  regimes_.reserve(n);
  jump_flags_.reserve(n);
}

namespace {

template <class T>
const T& get_as(const ParamRecord& rec, const std::string& key, const char* kind) {
  auto it = rec.values.find(key);
  if (it == rec.values.end()) throw Error(ErrorCode::MissingField, "missing parameter '" + key + "'");
  if (const T* v = std::get_if<T>(&it->second)) return *v;
  throw Error(ErrorCode::InvalidConfig, "parameter '" + key + "' must be a " + kind);
}

}  // namespace

double ParamRecord::number(const std::string& key) const {
  auto it = values.find(key);
  if (it != values.end()) {
    if (auto* vec = std::get_if<std::vector<double>>(&it->second); vec && vec->size() == 1)
      return vec->front();
  }
  return get_as<double>(*this, key, "number");
}

double ParamRecord::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::string ParamRecord::text(const std::string& key) const {
  return get_as<std::string>(*this, key, "string");
}

std::vector<double> ParamRecord::vector(const std::string& key) const {
  auto it = values.find(key);
  if (it != values.end()) {
    if (const double* d = std::get_if<double>(&it->second)) return {*d};
  }
  return get_as<std::vector<double>>(*this, key, "list of numbers");
}

std::vector<std::vector<double>> ParamRecord::matrix(const std::string& key) const {
  auto it = values.find(key);
  if (it != values.end()) {
    if (const double* d = std::get_if<double>(&it->second)) return {{*d}};
  }
  return get_as<std::vector<std::vector<double>>>(*this, key, "matrix");
}

std::vector<std::vector<std::vector<double>>> ParamRecord::tensor(const std::string& key) const {
  auto it = values.find(key);
  if (it != values.end()) {
    if (auto* m = std::get_if<std::vector<std::vector<double>>>(&it->second)) return {*m};
  }
  return get_as<std::vector<std::vector<std::vector<double>>>>(*this, key, "list of matrices");
}

}  // namespace extinctd
