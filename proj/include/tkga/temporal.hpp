#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tkga/kg.hpp"
#include "tkga/linalg.hpp"
#include "tkga/rng.hpp"

namespace tkga {

// Learnable Time2Vec parameters for one granularity plus its output
// projection W_{T_g} (d_t x (k+1)).
struct Time2VecParams {
  std::vector<double> omega;  // k+1 frequencies; omega[0] is the linear slope
  std::vector<double> phi;    // k+1 phases
  Matrix projection;
  // Ordinals are multiplied by this before evaluation; fixed, not learned.
  double time_scale = 1.0;

  std::size_t components() const noexcept { return omega.size(); }
  std::size_t output_dim() const noexcept { return projection.rows(); }

  // Zero-valued parameters with the same shape.
  Time2VecParams zeros_like() const;

  // Time scale 1/|T_g| so ordinals map into [0, 1); slope 1, periods
  // log-spaced over [2, 2|T_g|] ordinals with jitter, random phases,
  // Gaussian projection.
  static Time2VecParams init(std::size_t k, std::size_t output_dim, std::size_t span_size,
                             Rng& rng);
};

// [omega_0 t + phi_0, cos(omega_1 t + phi_1), ..., cos(omega_k t + phi_k)].
// The params overload evaluates at time_scale * t.
std::vector<double> time2vec(double t, const Time2VecParams& params);
std::vector<double> time2vec(double t, std::span<const double> omega, std::span<const double> phi);

// W_{T_g} times the mean Time2Vec of the active indices; the zero vector
// when none are active.
std::vector<double> encode_entity_time(std::span<const std::size_t> active,
                                       const Time2VecParams& params);
std::vector<double> encode_entity_time(std::span<const std::uint8_t> signature,
                                       const Time2VecParams& params);

// Adds d(loss)/d(params) to `grad` given d(loss)/d(output) for an entity
// with the given active indices. No-op for an empty index set.
void accumulate_time_gradient(std::span<const std::size_t> active, const Time2VecParams& params,
                              std::span<const double> grad_output, Time2VecParams& grad);

struct TemporalEncoderConfig {
  std::size_t k = 15;
  std::size_t output_dim = 32;
  std::uint64_t seed = 1;
};

// One parameter set per granularity (year, month, date).
struct TemporalEncoder {
  std::array<Time2VecParams, 3> params;

  static TemporalEncoder init(const TemporalEncoderConfig& cfg, const TimeSpan& span);
  const Time2VecParams& at(Granularity g) const { return params[static_cast<std::size_t>(g)]; }
  Time2VecParams& at(Granularity g) { return params[static_cast<std::size_t>(g)]; }
  std::size_t output_dim() const noexcept { return params[0].output_dim(); }
};

// Active indices of every entity at every granularity.
struct EntityTimeIndex {
  std::array<std::vector<std::vector<std::size_t>>, 3> active;

  static EntityTimeIndex build(const TemporalKG& kg, const TimeSpan& span);
  std::span<const std::size_t> of(EntityId e, Granularity g) const {
    return active[static_cast<std::size_t>(g)][e.index()];
  }
};

struct GranularEmbeddings {
  std::array<Matrix, 3> views;  // |E| x d_t per granularity

  const Matrix& at(Granularity g) const { return views[static_cast<std::size_t>(g)]; }
};

GranularEmbeddings encode_all_granularities(const EntityTimeIndex& index,
                                            const TemporalEncoder& encoder);
GranularEmbeddings encode_all_granularities(const TemporalKG& kg, const TimeSpan& span,
                                            const TemporalEncoder& encoder);

}  // namespace tkga
