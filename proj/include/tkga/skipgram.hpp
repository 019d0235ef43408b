#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tkga/linalg.hpp"
#include "tkga/walks.hpp"

namespace tkga {

struct SkipgramConfig {
  std::size_t dimension = 64;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  // Step size of the shared output projection relative to learning_rate.
  double projection_rate = 0.1;
  std::uint64_t seed = 1;

  void validate() const;
};

// Structural vectors h = W_D * v for every token seen in the corpus.
struct StructuralEmbeddings {
  Matrix entities;                 // one row per entity node id
  Matrix relations;                // one row per relation id
  std::vector<std::uint8_t> entity_present;
  std::vector<std::uint8_t> relation_present;
  Matrix projection;               // learned W_D (d x d)
  std::vector<double> epoch_loss;  // mean negative-sampling loss per epoch

  std::size_t dimension() const noexcept { return projection.rows(); }
  std::optional<std::span<const double>> vector(Token t) const;
};

// Skip-gram with negative sampling over the token corpus. The input side is
// factored as W_D * v with one shared square W_D (initialized to identity),
// trained jointly with the token vectors. Single-threaded and deterministic
// for a fixed seed. Row counts default to the largest id seen plus one.
StructuralEmbeddings train_structural_embeddings(const std::vector<Walk>& corpus,
                                                 const SkipgramConfig& cfg,
                                                 std::size_t num_entities = 0,
                                                 std::size_t num_relations = 0);

}  // namespace tkga
