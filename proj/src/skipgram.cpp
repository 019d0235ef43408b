#include "tkga/skipgram.hpp"

#include <algorithm>
#include <cmath>

#include "tkga/error.hpp"
#include "tkga/rng.hpp"

namespace tkga {

namespace {

double sigmoid(double x) {
  if (x > 30.0) return 1.0;
  if (x < -30.0) return 0.0;
  return 1.0 / (1.0 + std::exp(-x));
}

// Unigram^0.75 noise distribution sampled by inverse CDF.
class NoiseTable {
 public:
  explicit NoiseTable(const std::vector<std::size_t>& counts) : cdf_(counts.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      acc += std::pow(static_cast<double>(counts[i]), 0.75);
      cdf_[i] = acc;
    }
    for (double& c : cdf_) c /= acc;
  }

  std::size_t sample(Rng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace

void SkipgramConfig::validate() const {
  if (dimension == 0) throw ConfigError("dimension", "must be positive");
  if (window == 0) throw ConfigError("window", "must be positive");
  if (negatives == 0) throw ConfigError("negatives", "must be positive");
  if (epochs == 0) throw ConfigError("epochs", "must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate", "must be positive");
  if (!(projection_rate > 0.0)) throw ConfigError("projection_rate", "must be positive");
}

std::optional<std::span<const double>> StructuralEmbeddings::vector(Token t) const {
  if (t.kind == Token::Kind::Entity) {
    if (t.id >= entity_present.size() || !entity_present[t.id]) return std::nullopt;
    return entities.row(t.id);
  }
  if (t.id >= relation_present.size() || !relation_present[t.id]) return std::nullopt;
  return relations.row(t.id);
}

StructuralEmbeddings train_structural_embeddings(const std::vector<Walk>& corpus,
                                                 const SkipgramConfig& cfg,
                                                 std::size_t num_entities,
                                                 std::size_t num_relations) {
  cfg.validate();
  std::size_t total_tokens = 0;
  for (const auto& walk : corpus) {
    total_tokens += walk.size();
    for (const auto& t : walk) {
      auto& bound = t.kind == Token::Kind::Entity ? num_entities : num_relations;
      bound = std::max<std::size_t>(bound, t.id + 1);
    }
  }
  if (total_tokens == 0) throw TrainingError("empty corpus");

  const std::size_t d = cfg.dimension;
  const std::size_t vocab = num_entities + num_relations;
  auto token_index = [&](Token t) {
    return t.kind == Token::Kind::Entity ? t.id : num_entities + t.id;
  };

  std::vector<std::size_t> counts(vocab, 0);
  for (const auto& walk : corpus) {
    for (const auto& t : walk) ++counts[token_index(t)];
  }
  const NoiseTable noise(counts);

  Rng rng(cfg.seed);
  Matrix in(vocab, d);
  Matrix out(vocab, d);
  for (double& x : in.data()) x = (rng.uniform() - 0.5) / static_cast<double>(d);
  Matrix w(d, d);
  for (std::size_t i = 0; i < d; ++i) w(i, i) = 1.0;

  std::vector<double> x(d);
  std::vector<double> gx(d);
  std::vector<double> v_old(d);
  std::vector<std::size_t> indices;

  StructuralEmbeddings result;
  const double total_steps = static_cast<double>(cfg.epochs * total_tokens);
  double step = 0.0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss = 0.0;
    std::size_t samples = 0;
    for (const auto& walk : corpus) {
      indices.resize(walk.size());
      for (std::size_t i = 0; i < walk.size(); ++i) indices[i] = token_index(walk[i]);
      for (std::size_t pos = 0; pos < walk.size(); ++pos, step += 1.0) {
        const double lr = cfg.learning_rate * std::max(1e-4, 1.0 - step / total_steps);
        const std::size_t center = indices[pos];
        auto v = in.row(center);
        for (std::size_t r = 0; r < d; ++r) x[r] = dot(w.row(r), v);
        std::fill(gx.begin(), gx.end(), 0.0);

        const std::size_t reach = cfg.window - rng.index(cfg.window);
        const std::size_t lo = pos >= reach ? pos - reach : 0;
        const std::size_t hi = std::min(walk.size() - 1, pos + reach);
        for (std::size_t ctx = lo; ctx <= hi; ++ctx) {
          if (ctx == pos) continue;
          const std::size_t positive = indices[ctx];
          for (std::size_t s = 0; s <= cfg.negatives; ++s) {
            std::size_t target = positive;
            double label = 1.0;
            if (s > 0) {
              target = noise.sample(rng);
              if (target == positive) continue;
              label = 0.0;
            }
            auto u = out.row(target);
            const double score = dot(x, u);
            const double p = sigmoid(score);
            loss += label > 0.0 ? -std::log(std::max(p, 1e-12)) : -std::log(std::max(1.0 - p, 1e-12));
            ++samples;
            const double g = lr * (label - p);
            for (std::size_t k = 0; k < d; ++k) {
              gx[k] += g * u[k];
              u[k] += g * x[k];
            }
          }
        }
        std::copy(v.begin(), v.end(), v_old.begin());
        for (std::size_t r = 0; r < d; ++r) {
          const double gr = gx[r];
          if (gr == 0.0) continue;
          auto wr = w.row(r);
          for (std::size_t c = 0; c < d; ++c) v[c] += gr * wr[c];
        }
        for (std::size_t r = 0; r < d; ++r) {
          const double gr = cfg.projection_rate * gx[r];
          if (gr == 0.0) continue;
          auto wr = w.row(r);
          for (std::size_t c = 0; c < d; ++c) wr[c] += gr * v_old[c];
        }
      }
    }
    result.epoch_loss.push_back(samples ? loss / static_cast<double>(samples) : 0.0);
  }

  result.entities = Matrix(num_entities, d);
  result.relations = Matrix(num_relations, d);
  result.entity_present.assign(num_entities, 0);
  result.relation_present.assign(num_relations, 0);
  for (std::size_t t = 0; t < vocab; ++t) {
    if (counts[t] == 0) continue;
    const bool is_entity = t < num_entities;
    auto dst = is_entity ? result.entities.row(t) : result.relations.row(t - num_entities);
    (is_entity ? result.entity_present[t] : result.relation_present[t - num_entities]) = 1;
    const auto v = in.row(t);
    for (std::size_t r = 0; r < d; ++r) dst[r] = dot(w.row(r), v);
  }
  result.projection = std::move(w);
  return result;
}

}  // namespace tkga
