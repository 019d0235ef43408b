#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tkga/kg.hpp"
#include "tkga/projection.hpp"

namespace tkga {

// How a target fact's interval relates to its source counterpart.
struct TopologyMix {
  double identity = 1.0;
  double overlap = 0.0;
  double containment = 0.0;  // target strictly inside the source interval
  double disjoint = 0.0;
};

struct SynthConfig {
  std::size_t entities = 200;
  std::size_t source_relations = 12;
  std::size_t target_relations = 12;  // source relation i maps to i mod target_relations
  double facts_per_entity = 4.0;      // mean degree of the shared skeleton
  std::array<double, 3> granularity_mix{0.0, 0.0, 1.0};  // year, month, date per time point
  TopologyMix topology;
  double source_completeness = 1.0;  // chance a source fact keeps its time
  double target_completeness = 1.0;
  double density_factor = 1.0;       // source facts per skeleton fact
  double point_fraction = 0.2;       // skeleton facts with begin == end
  double name_noise = 0.05;          // per-character substitution rate in target labels
  int min_year = 1980;
  int max_year = 2020;
  double train_ratio = 0.3;
  std::uint64_t seed = 1;

  // Throws ConfigError for out-of-range values and GenerationError for
  // combinations that cannot be realised.
  void validate() const;
};

// "easy" or "wild"; ConfigError otherwise.
SynthConfig synth_preset(std::string_view name);

struct SynthDataset {
  TemporalKG source;
  TemporalKG target;
  SeedAlignment seeds;
  RelationMap rel_map;
  std::vector<std::string> scenarios;  // per seed pair, e.g. "multi-to-none"
};

// none / one / multi by the number of valid facts of each side, larger
// class first.
std::string scenario_label(std::size_t source_valid, std::size_t target_valid);

SynthDataset synth_generate(const SynthConfig& cfg);

// source.tsv, target.tsv, train.tsv, test.tsv, rel_map.tsv, scenarios.tsv
void write_dataset(const SynthDataset& d, const std::filesystem::path& dir);

}  // namespace tkga
