#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tkga/fusion.hpp"
#include "tkga/linalg.hpp"
#include "tkga/pairs.hpp"
#include "tkga/temporal.hpp"

namespace tkga {

// Frozen per-entity inputs of one graph. Row e belongs to entity e.
struct GraphViews {
  Matrix names;       // |E| x d_n
  Matrix structural;  // |E| x d
  EntityTimeIndex time;

  std::size_t num_entities() const noexcept { return names.rows(); }
};

// Time index sets of one entity (or projection) at year, month and date.
using ActiveTimes = std::array<std::span<const std::size_t>, 3>;

ActiveTimes active_times(const EntityTimeIndex& index, EntityId e);

// Everything the margin loss updates.
struct AlignmentParameters {
  Gates gates = kUnitGates;
  TemporalEncoder encoder;

  std::size_t size() const;
  // gates, then (omega, phi, projection) for year, month, date.
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);
  AlignmentParameters zeros_like() const;
};

struct AlignmentModel {
  ViewLayout layout;
  AlignmentParameters params;
  bool trained = false;

  static AlignmentModel init(std::size_t name_dim, std::size_t struct_dim,
                             const TemporalEncoderConfig& time_cfg, const TimeSpan& span);

  // Fused vector from explicit views.
  std::vector<double> embed(std::span<const double> name, std::span<const double> structural,
                            const ActiveTimes& active) const;
  std::vector<double> embed(const GraphViews& views, EntityId e) const;
  Matrix embed_all(const GraphViews& views) const;
};

struct TrainerConfig {
  double margin = 0.5;
  std::size_t negatives = 5;
  std::size_t epochs = 30;
  double learning_rate = 0.01;
  std::size_t batch_size = 64;
  bool learn_gates = true;
  std::uint64_t seed = 1;

  void validate() const;
};

// max(0, margin + dist_pos - dist_neg)
double hinge_loss(double dist_pos, double dist_neg, double margin);

struct Triple {
  EntityId source;
  EntityId positive;
  EntityId negative;
};

// Mean hinge loss over the triples with dist = 1 - cos. When grad is
// non-null it receives the gradient with respect to flatten() order.
double triplet_loss(const AlignmentModel& model, const GraphViews& source,
                    const GraphViews& target, std::span<const Triple> triples, double margin,
                    std::vector<double>* grad = nullptr);

struct TrainingReport {
  std::vector<double> epoch_loss;
};

// Adam on the gates and temporal parameters; names and structure stay
// fixed. Negatives are uniform over the other targets and resampled every
// epoch. Throws TrainingError without seeds or with fewer than two targets.
TrainingReport train_alignment(AlignmentModel& model, std::span<const AlignedPair> seeds,
                               const GraphViews& source, const GraphViews& target,
                               const TrainerConfig& cfg);

}  // namespace tkga
