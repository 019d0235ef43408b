#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "tkga/pipeline.hpp"
#include "tkga/remote.hpp"
#include "tkga/stats.hpp"
#include "tkga/synth.hpp"

namespace tkga {

// `key = value` lines; '#' starts a comment; later lines win.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig parse_file(const std::filesystem::path& path);

  void set(std::string key, std::string value);
  std::optional<std::string> get(std::string_view key) const;
  bool contains(std::string_view key) const { return values_.count(std::string(key)) > 0; }
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  // TKGA_REASONER_URL and TKGA_REASONER_TOKEN replace reasoner_url and
  // reasoner_token when set.
  void apply_env();

 private:
  std::map<std::string, std::string> values_;
};

struct DatasetPaths {
  std::filesystem::path source;
  std::filesystem::path target;
  std::filesystem::path train;
  std::filesystem::path test;      // optional
  std::filesystem::path rel_map;   // optional; empty means exact labels
  std::filesystem::path names;     // optional vector file; empty means hashed labels
};

struct RunConfig {
  DatasetPaths data;
  std::size_t name_dim = 64;
  PipelineConfig pipeline;
  std::string reasoner = "mock";  // mock | remote | replay | none
  RemoteConfig remote;
  std::string replay;             // transcript for the replay reasoner
  StatsConfig stats;
  SynthConfig synth;
};

// Every key must be known; unknown keys and bad values throw ConfigError
// naming the key.
RunConfig load_run_config(const KeyValueConfig& kv);

// Keys accepted by load_run_config.
const std::set<std::string>& known_config_keys();

// A directory written by write_dataset: source.tsv, target.tsv, train.tsv,
// and test.tsv / rel_map.tsv when present.
DatasetPaths dataset_dir(const std::filesystem::path& dir);

Dataset load_dataset(const DatasetPaths& paths);

}  // namespace tkga
