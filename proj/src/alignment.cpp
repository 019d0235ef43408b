#include "tkga/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tkga/error.hpp"
#include "tkga/rng.hpp"

namespace tkga {

namespace {

constexpr std::array<View, 3> kTimeViews{View::Year, View::Month, View::Date};

struct Forward {
  std::vector<double> raw;    // ungated concatenation
  std::vector<double> fused;  // gated
};

Forward forward(const AlignmentModel& model, std::span<const double> name,
                std::span<const double> structural, const ActiveTimes& active) {
  std::array<std::vector<double>, 3> time;
  for (std::size_t g = 0; g < 3; ++g) {
    time[g] = encode_entity_time(active[g], model.params.encoder.params[g]);
  }
  Forward f;
  f.raw = fuse_views(name, time[0], time[1], time[2], structural, model.layout);
  f.fused = f.raw;
  for (const auto v : kViews) {
    const auto off = model.layout.offset(v);
    const double gate = model.params.gates[static_cast<std::size_t>(v)];
    for (std::size_t i = 0; i < model.layout.width(v); ++i) f.fused[off + i] *= gate;
  }
  return f;
}

// d cos(x, y) / d x
void add_cosine_grad(std::span<const double> x, std::span<const double> y, double scale,
                     std::span<double> out) {
  const double nx = norm(x);
  const double ny = norm(y);
  if (nx == 0.0 || ny == 0.0) return;
  const double c = dot(x, y) / (nx * ny);
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] += scale * (y[i] / (nx * ny) - c * x[i] / (nx * nx));
  }
}

void add_param(std::vector<double>& flat, std::span<const double> values) {
  flat.insert(flat.end(), values.begin(), values.end());
}

}  // namespace

ActiveTimes active_times(const EntityTimeIndex& index, EntityId e) {
  return {index.of(e, Granularity::Year), index.of(e, Granularity::Month),
          index.of(e, Granularity::Date)};
}

std::size_t AlignmentParameters::size() const {
  std::size_t n = gates.size();
  for (const auto& p : encoder.params) n += 2 * p.components() + p.projection.data().size();
  return n;
}

std::vector<double> AlignmentParameters::flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  add_param(flat, gates);
  for (const auto& p : encoder.params) {
    add_param(flat, p.omega);
    add_param(flat, p.phi);
    add_param(flat, p.projection.data());
  }
  return flat;
}

void AlignmentParameters::assign(std::span<const double> flat) {
  if (flat.size() != size()) throw LayoutError("parameter vector size mismatch");
  auto take = [&flat](std::span<double> dst) {
    std::copy_n(flat.begin(), dst.size(), dst.begin());
    flat = flat.subspan(dst.size());
  };
  take(gates);
  for (auto& p : encoder.params) {
    take(p.omega);
    take(p.phi);
    take(p.projection.data());
  }
}

AlignmentParameters AlignmentParameters::zeros_like() const {
  AlignmentParameters z;
  z.gates.fill(0.0);
  for (std::size_t g = 0; g < 3; ++g) z.encoder.params[g] = encoder.params[g].zeros_like();
  return z;
}

AlignmentModel AlignmentModel::init(std::size_t name_dim, std::size_t struct_dim,
                                    const TemporalEncoderConfig& time_cfg, const TimeSpan& span) {
  AlignmentModel m;
  m.layout = {name_dim, time_cfg.output_dim, struct_dim};
  m.params.encoder = TemporalEncoder::init(time_cfg, span);
  return m;
}

std::vector<double> AlignmentModel::embed(std::span<const double> name,
                                          std::span<const double> structural,
                                          const ActiveTimes& active) const {
  return forward(*this, name, structural, active).fused;
}

std::vector<double> AlignmentModel::embed(const GraphViews& views, EntityId e) const {
  return embed(views.names.row(e.index()), views.structural.row(e.index()),
               active_times(views.time, e));
}

Matrix AlignmentModel::embed_all(const GraphViews& views) const {
  Matrix out(views.num_entities(), layout.total());
  for (std::size_t e = 0; e < views.num_entities(); ++e) {
    const auto v = embed(views, EntityId{e});
    std::copy(v.begin(), v.end(), out.row(e).begin());
  }
  return out;
}

void TrainerConfig::validate() const {
  if (!(margin > 0.0)) throw ConfigError("margin", "must be positive");
  if (negatives == 0) throw ConfigError("negatives", "must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate", "must be positive");
  if (batch_size == 0) throw ConfigError("batch_size", "must be positive");
}

double hinge_loss(double dist_pos, double dist_neg, double margin) {
  return std::max(0.0, margin + dist_pos - dist_neg);
}

double triplet_loss(const AlignmentModel& model, const GraphViews& source,
                    const GraphViews& target, std::span<const Triple> triples, double margin,
                    std::vector<double>* grad) {
  if (triples.empty()) return 0.0;
  const std::size_t width = model.layout.total();
  std::map<std::uint32_t, Forward> src_fwd;
  std::map<std::uint32_t, Forward> tgt_fwd;
  auto src = [&](EntityId e) -> const Forward& {
    auto it = src_fwd.find(e.value);
    if (it == src_fwd.end()) {
      it = src_fwd.emplace(e.value, forward(model, source.names.row(e.index()),
                                            source.structural.row(e.index()),
                                            active_times(source.time, e)))
               .first;
    }
    return it->second;
  };
  auto tgt = [&](EntityId e) -> const Forward& {
    auto it = tgt_fwd.find(e.value);
    if (it == tgt_fwd.end()) {
      it = tgt_fwd.emplace(e.value, forward(model, target.names.row(e.index()),
                                            target.structural.row(e.index()),
                                            active_times(target.time, e)))
               .first;
    }
    return it->second;
  };

  std::map<std::uint32_t, std::vector<double>> src_grad;
  std::map<std::uint32_t, std::vector<double>> tgt_grad;
  auto slot = [width](auto& m, EntityId e) -> std::vector<double>& {
    auto& v = m[e.value];
    if (v.empty()) v.assign(width, 0.0);
    return v;
  };

  const double inv_n = 1.0 / static_cast<double>(triples.size());
  double total = 0.0;
  for (const auto& t : triples) {
    const auto& xs = src(t.source).fused;
    const auto& xp = tgt(t.positive).fused;
    const auto& xn = tgt(t.negative).fused;
    const double loss = hinge_loss(1.0 - cosine(xs, xp), 1.0 - cosine(xs, xn), margin);
    total += loss;
    if (!grad || loss <= 0.0) continue;
    // loss = margin - cos(s, p) + cos(s, n)
    auto& gs = slot(src_grad, t.source);
    add_cosine_grad(xs, xp, -inv_n, gs);
    add_cosine_grad(xs, xn, inv_n, gs);
    add_cosine_grad(xp, xs, -inv_n, slot(tgt_grad, t.positive));
    add_cosine_grad(xn, xs, inv_n, slot(tgt_grad, t.negative));
  }

  if (grad) {
    AlignmentParameters g = model.params.zeros_like();
    auto backward = [&](const Forward& f, const std::vector<double>& d_fused,
                        const ActiveTimes& active) {
      for (const auto v : kViews) {
        const auto b = static_cast<std::size_t>(v);
        const auto off = model.layout.offset(v);
        const auto w = model.layout.width(v);
        for (std::size_t i = 0; i < w; ++i) g.gates[b] += d_fused[off + i] * f.raw[off + i];
      }
      for (std::size_t k = 0; k < 3; ++k) {
        const auto v = kTimeViews[k];
        const auto off = model.layout.offset(v);
        std::vector<double> d_block(model.layout.width(v));
        const double gate = model.params.gates[static_cast<std::size_t>(v)];
        for (std::size_t i = 0; i < d_block.size(); ++i) d_block[i] = gate * d_fused[off + i];
        accumulate_time_gradient(active[k], model.params.encoder.params[k], d_block,
                                 g.encoder.params[k]);
      }
    };
    for (const auto& [id, d] : src_grad) {
      backward(src_fwd.at(id), d, active_times(source.time, EntityId{id}));
    }
    for (const auto& [id, d] : tgt_grad) {
      backward(tgt_fwd.at(id), d, active_times(target.time, EntityId{id}));
    }
    *grad = g.flatten();
  }
  return total * inv_n;
}

TrainingReport train_alignment(AlignmentModel& model, std::span<const AlignedPair> seeds,
                               const GraphViews& source, const GraphViews& target,
                               const TrainerConfig& cfg) {
  cfg.validate();
  if (seeds.empty()) throw TrainingError("no seed pairs to train on");
  const std::size_t nt = target.num_entities();
  if (nt < 2) throw TrainingError("negative sampling needs at least two target entities");

  Rng rng(cfg.seed);
  auto theta = model.params.flatten();
  std::vector<double> m(theta.size(), 0.0);
  std::vector<double> v(theta.size(), 0.0);
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  std::size_t step = 0;

  TrainingReport report;
  std::vector<Triple> triples;
  std::vector<double> grad;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    triples.clear();
    for (const auto& s : seeds) {
      for (std::size_t k = 0; k < cfg.negatives; ++k) {
        auto neg = static_cast<std::uint32_t>(rng.index(nt - 1));
        if (neg >= s.target.value) ++neg;
        triples.push_back({s.source, s.target, EntityId{neg}});
      }
    }
    rng.shuffle(triples.begin(), triples.end());

    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < triples.size(); begin += cfg.batch_size) {
      const auto count = std::min(cfg.batch_size, triples.size() - begin);
      const std::span<const Triple> batch(triples.data() + begin, count);
      epoch_loss += triplet_loss(model, source, target, batch, cfg.margin, &grad) *
                    static_cast<double>(count);
      if (!cfg.learn_gates) std::fill_n(grad.begin(), model.params.gates.size(), 0.0);
      ++step;
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
        theta[i] -= cfg.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
      }
      model.params.assign(theta);
    }
    report.epoch_loss.push_back(epoch_loss / static_cast<double>(triples.size()));
  }
  model.trained = true;
  return report;
}

}  // namespace tkga
