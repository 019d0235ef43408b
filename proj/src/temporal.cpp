#include "tkga/temporal.hpp"

#include <cmath>
#include <numbers>

namespace tkga {

Time2VecParams Time2VecParams::zeros_like() const {
  Time2VecParams z;
  z.omega.assign(omega.size(), 0.0);
  z.phi.assign(phi.size(), 0.0);
  z.projection = Matrix(projection.rows(), projection.cols());
  z.time_scale = time_scale;
  return z;
}

Time2VecParams Time2VecParams::init(std::size_t k, std::size_t output_dim, std::size_t span_size,
                                    Rng& rng) {
  Time2VecParams p;
  const double span = static_cast<double>(std::max<std::size_t>(span_size, 2));
  p.time_scale = 1.0 / span;
  p.omega.resize(k + 1);
  p.phi.resize(k + 1);
  p.omega[0] = 1.0;
  p.phi[0] = 0.0;
  const double lo = std::log(2.0);
  const double hi = std::log(2.0 * span);
  for (std::size_t i = 1; i <= k; ++i) {
    const double frac = k > 1 ? static_cast<double>(i - 1) / static_cast<double>(k - 1) : 0.0;
    const double period = std::exp(lo + (hi - lo) * frac) * rng.uniform(0.9, 1.1);
    p.omega[i] = 2.0 * std::numbers::pi * span / period;
    p.phi[i] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  p.projection = Matrix(output_dim, k + 1);
  // Keeps E|W m|^2 near 1 for a typical mean vector m.
  const double scale = std::sqrt(2.0 / static_cast<double>(output_dim * (k + 1)));
  for (double& w : p.projection.data()) w = rng.normal(0.0, scale);
  return p;
}

std::vector<double> time2vec(double t, std::span<const double> omega,
                             std::span<const double> phi) {
  std::vector<double> out(omega.size());
  if (out.empty()) return out;
  out[0] = omega[0] * t + phi[0];
  for (std::size_t i = 1; i < omega.size(); ++i) out[i] = std::cos(omega[i] * t + phi[i]);
  return out;
}

std::vector<double> time2vec(double t, const Time2VecParams& params) {
  return time2vec(params.time_scale * t, params.omega, params.phi);
}

std::vector<double> encode_entity_time(std::span<const std::size_t> active,
                                       const Time2VecParams& params) {
  std::vector<double> out(params.output_dim(), 0.0);
  if (active.empty()) return out;
  std::vector<double> mean(params.components(), 0.0);
  for (const auto t : active) {
    const auto v = time2vec(static_cast<double>(t), params);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
  }
  for (double& m : mean) m /= static_cast<double>(active.size());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = dot(params.projection.row(r), mean);
  return out;
}

std::vector<double> encode_entity_time(std::span<const std::uint8_t> signature,
                                       const Time2VecParams& params) {
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < signature.size(); ++i) {
    if (signature[i]) active.push_back(i);
  }
  return encode_entity_time(active, params);
}

void accumulate_time_gradient(std::span<const std::size_t> active, const Time2VecParams& params,
                              std::span<const double> grad_output, Time2VecParams& grad) {
  if (active.empty()) return;
  const std::size_t m = params.components();
  const double inv_n = 1.0 / static_cast<double>(active.size());

  std::vector<double> mean(m, 0.0);
  std::vector<double> d_omega(m, 0.0);  // d mean_i / d omega_i
  std::vector<double> d_phi(m, 0.0);    // d mean_i / d phi_i
  for (const auto ti : active) {
    const double t = params.time_scale * static_cast<double>(ti);
    mean[0] += params.omega[0] * t + params.phi[0];
    d_omega[0] += t;
    d_phi[0] += 1.0;
    for (std::size_t i = 1; i < m; ++i) {
      const double arg = params.omega[i] * t + params.phi[i];
      mean[i] += std::cos(arg);
      const double s = -std::sin(arg);
      d_omega[i] += s * t;
      d_phi[i] += s;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    mean[i] *= inv_n;
    d_omega[i] *= inv_n;
    d_phi[i] *= inv_n;
  }

  // output = W * mean
  for (std::size_t r = 0; r < params.output_dim(); ++r) {
    const double g = grad_output[r];
    if (g == 0.0) continue;
    auto gw = grad.projection.row(r);
    for (std::size_t c = 0; c < m; ++c) gw[c] += g * mean[c];
  }
  for (std::size_t c = 0; c < m; ++c) {
    double g_mean = 0.0;
    for (std::size_t r = 0; r < params.output_dim(); ++r) {
      g_mean += params.projection(r, c) * grad_output[r];
    }
    grad.omega[c] += g_mean * d_omega[c];
    grad.phi[c] += g_mean * d_phi[c];
  }
}

TemporalEncoder TemporalEncoder::init(const TemporalEncoderConfig& cfg, const TimeSpan& span) {
  TemporalEncoder enc;
  Rng rng(cfg.seed);
  for (const auto g : kGranularities) {
    enc.at(g) = Time2VecParams::init(cfg.k, cfg.output_dim, span.size(g), rng);
  }
  return enc;
}

EntityTimeIndex EntityTimeIndex::build(const TemporalKG& kg, const TimeSpan& span) {
  EntityTimeIndex index;
  std::vector<Quadruple> facts;
  for (const auto g : kGranularities) {
    auto& per_entity = index.active[static_cast<std::size_t>(g)];
    per_entity.resize(kg.num_entities());
    for (std::size_t e = 0; e < kg.num_entities(); ++e) {
      facts.clear();
      for (const auto qi : kg.incident(EntityId{e})) facts.push_back(kg.quadruple(qi));
      per_entity[e] = active_time_indices(facts, g, span);
    }
  }
  return index;
}

GranularEmbeddings encode_all_granularities(const EntityTimeIndex& index,
                                            const TemporalEncoder& encoder) {
  GranularEmbeddings out;
  for (const auto g : kGranularities) {
    const auto& per_entity = index.active[static_cast<std::size_t>(g)];
    Matrix m(per_entity.size(), encoder.output_dim());
    for (std::size_t e = 0; e < per_entity.size(); ++e) {
      const auto v = encode_entity_time(per_entity[e], encoder.at(g));
      std::copy(v.begin(), v.end(), m.row(e).begin());
    }
    out.views[static_cast<std::size_t>(g)] = std::move(m);
  }
  return out;
}

GranularEmbeddings encode_all_granularities(const TemporalKG& kg, const TimeSpan& span,
                                            const TemporalEncoder& encoder) {
  return encode_all_granularities(EntityTimeIndex::build(kg, span), encoder);
}

}  // namespace tkga
