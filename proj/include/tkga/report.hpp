#pragma once

#include <filesystem>

#include <json.hpp>

#include "tkga/metrics.hpp"
#include "tkga/pipeline.hpp"
#include "tkga/stats.hpp"

namespace tkga {

inline constexpr int kResultSchemaVersion = 1;

nlohmann::json to_json(const RankReport& r, bool with_ranks = false);
nlohmann::json to_json(const GraphStats& g);
// Undefined values are null.
nlohmann::json to_json(const DatasetStats& s);
nlohmann::json to_json(const PipelineResult& r, const Dataset& data);

// Adds schema_version and the command name, then writes with 2-space indent.
void write_result(const std::filesystem::path& path, const std::string& command, nlohmann::json body);

void write_alignment(const std::filesystem::path& path, std::span<const AlignedPair> pairs,
                     const Dataset& data);

}  // namespace tkga
