#include "tkga/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "tkga/error.hpp"

namespace tkga {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T number(const std::string& key, const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) throw ConfigError(key, "not a number: '" + v + "'");
  return out;
}

std::size_t size_value(const std::string& key, const std::string& v) {
  if (!v.empty() && v[0] == '-') throw ConfigError(key, "must be non-negative");
  return number<std::size_t>(key, v);
}

bool bool_value(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::vector<double> list_value(const std::string& key, const std::string& v, std::size_t n) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(number<double>(key, trim(item)));
  if (out.size() != n) throw ConfigError(key, "expected " + std::to_string(n) + " comma-separated values");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["source"] = [](RunConfig& c, auto&, auto& v) { c.data.source = v; };
    t["target"] = [](RunConfig& c, auto&, auto& v) { c.data.target = v; };
    t["train_seeds"] = [](RunConfig& c, auto&, auto& v) { c.data.train = v; };
    t["test_seeds"] = [](RunConfig& c, auto&, auto& v) { c.data.test = v; };
    t["rel_map"] = [](RunConfig& c, auto&, auto& v) { c.data.rel_map = v; };
    t["names_file"] = [](RunConfig& c, auto&, auto& v) { c.data.names = v; };
    t["name_dim"] = [](RunConfig& c, auto& k, auto& v) { c.name_dim = size_value(k, v); };

    t["seed"] = [](RunConfig& c, auto& k, auto& v) {
      const auto s = number<std::uint64_t>(k, v);
      auto& p = c.pipeline;
      p.walks.seed = p.skipgram.seed = p.temporal.seed = p.trainer.seed = p.bank.seed = s;
      p.noise_seed = mix_seed(s, 7);
    };
    t["iterations"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.iterations = size_value(k, v); };
    t["csls_only"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.csls_only = bool_value(k, v); };

    t["walk_beta"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.walks.beta = number<double>(k, v); };
    t["walk_length"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.walks.walk_length = size_value(k, v); };
    t["walks_per_entity"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.walks.walks_per_entity = size_value(k, v); };
    t["walk_seed"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.walks.seed = number<std::uint64_t>(k, v); };

    t["sg_dimension"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.skipgram.dimension = size_value(k, v); };
    t["sg_window"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.skipgram.window = size_value(k, v); };
    t["sg_negatives"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.skipgram.negatives = size_value(k, v); };
    t["sg_epochs"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.skipgram.epochs = size_value(k, v); };
    t["sg_learning_rate"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.skipgram.learning_rate = number<double>(k, v); };
    t["sg_projection_rate"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.skipgram.projection_rate = number<double>(k, v); };
    t["sg_seed"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.skipgram.seed = number<std::uint64_t>(k, v); };

    t["time_k"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.temporal.k = size_value(k, v); };
    t["time_dim"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.temporal.output_dim = size_value(k, v); };
    t["time_seed"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.temporal.seed = number<std::uint64_t>(k, v); };

    t["margin"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.trainer.margin = number<double>(k, v); };
    t["negatives"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.trainer.negatives = size_value(k, v); };
    t["epochs"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.trainer.epochs = size_value(k, v); };
    t["learning_rate"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.trainer.learning_rate = number<double>(k, v); };
    t["batch_size"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.trainer.batch_size = size_value(k, v); };
    t["learn_gates"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.trainer.learn_gates = bool_value(k, v); };
    t["train_seed"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.trainer.seed = number<std::uint64_t>(k, v); };

    t["k_csls"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.k_csls = size_value(k, v); };
    t["top_k"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.top_k = size_value(k, v); };
    t["k_r"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.k_r = size_value(k, v); };
    t["index"] = [](RunConfig& c, auto& k, auto& v) {
      if (v == "exact") {
        c.pipeline.bank.mode = IndexMode::Exact;
      } else if (v == "approx") {
        c.pipeline.bank.mode = IndexMode::Approx;
      } else {
        throw ConfigError(k, "expected exact or approx");
      }
    };
    t["include_raw_targets"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.bank.include_raw_targets = bool_value(k, v); };
    t["nlist"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.bank.nlist = size_value(k, v); };
    t["nprobe"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.bank.nprobe = size_value(k, v); };
    t["index_seed"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.bank.seed = number<std::uint64_t>(k, v); };
    t["max_facts"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.max_facts = size_value(k, v); };
    t["select_budget"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.select_budget = size_value(k, v); };
    t["augment_budget"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.augment_budget = size_value(k, v); };
    t["max_in_flight"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.max_in_flight = size_value(k, v); };
    t["noise_ratio"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.noise_ratio = number<double>(k, v); };
    t["noise_seed"] = [](RunConfig& c, auto& k, auto& v) { c.pipeline.noise_seed = number<std::uint64_t>(k, v); };

    t["reasoner"] = [](RunConfig& c, auto& k, auto& v) {
      if (v != "mock" && v != "remote" && v != "replay" && v != "none") {
        throw ConfigError(k, "expected mock, remote, replay or none");
      }
      c.reasoner = v;
    };
    t["reasoner_url"] = [](RunConfig& c, auto&, auto& v) { c.remote.url = v; };
    t["reasoner_token"] = [](RunConfig& c, auto&, auto& v) { c.remote.token = v; };
    t["reasoner_model"] = [](RunConfig& c, auto&, auto& v) { c.remote.model = v; };
    t["reasoner_timeout_ms"] = [](RunConfig& c, auto& k, auto& v) { c.remote.timeout_ms = number<int>(k, v); };
    t["reasoner_retries"] = [](RunConfig& c, auto& k, auto& v) { c.remote.max_retries = number<int>(k, v); };
    t["reasoner_backoff_ms"] = [](RunConfig& c, auto& k, auto& v) { c.remote.backoff_ms = number<int>(k, v); };
    t["transcript"] = [](RunConfig& c, auto&, auto& v) { c.remote.transcript = v; };
    t["replay_transcript"] = [](RunConfig& c, auto&, auto& v) { c.replay = v; };

    t["density_base"] = [](RunConfig& c, auto& k, auto& v) {
      if (v == "valid") {
        c.stats.density = DensityBase::ValidEntities;
      } else if (v == "all") {
        c.stats.density = DensityBase::AllEntities;
      } else {
        throw ConfigError(k, "expected valid or all");
      }
    };
    t["interval_consistency"] = [](RunConfig& c, auto& k, auto& v) {
      if (v == "identical") {
        c.stats.interval = IntervalComparator::IdenticalYearSpan;
      } else if (v == "overlap") {
        c.stats.interval = IntervalComparator::OverlappingYearSpan;
      } else {
        throw ConfigError(k, "expected identical or overlap");
      }
    };

    t["synth_preset"] = [](RunConfig& c, auto&, auto& v) {
      const auto seed = c.synth.seed;
      c.synth = synth_preset(v);
      c.synth.seed = seed;
    };
    t["synth_entities"] = [](RunConfig& c, auto& k, auto& v) { c.synth.entities = size_value(k, v); };
    t["synth_source_relations"] = [](RunConfig& c, auto& k, auto& v) { c.synth.source_relations = size_value(k, v); };
    t["synth_target_relations"] = [](RunConfig& c, auto& k, auto& v) { c.synth.target_relations = size_value(k, v); };
    t["synth_facts_per_entity"] = [](RunConfig& c, auto& k, auto& v) { c.synth.facts_per_entity = number<double>(k, v); };
    t["synth_granularity_mix"] = [](RunConfig& c, auto& k, auto& v) {
      const auto x = list_value(k, v, 3);
      c.synth.granularity_mix = {x[0], x[1], x[2]};
    };
    t["synth_topology"] = [](RunConfig& c, auto& k, auto& v) {
      const auto x = list_value(k, v, 4);
      c.synth.topology = {x[0], x[1], x[2], x[3]};
    };
    t["synth_source_completeness"] = [](RunConfig& c, auto& k, auto& v) { c.synth.source_completeness = number<double>(k, v); };
    t["synth_target_completeness"] = [](RunConfig& c, auto& k, auto& v) { c.synth.target_completeness = number<double>(k, v); };
    t["synth_density_factor"] = [](RunConfig& c, auto& k, auto& v) { c.synth.density_factor = number<double>(k, v); };
    t["synth_point_fraction"] = [](RunConfig& c, auto& k, auto& v) { c.synth.point_fraction = number<double>(k, v); };
    t["synth_name_noise"] = [](RunConfig& c, auto& k, auto& v) { c.synth.name_noise = number<double>(k, v); };
    t["synth_min_year"] = [](RunConfig& c, auto& k, auto& v) { c.synth.min_year = number<int>(k, v); };
    t["synth_max_year"] = [](RunConfig& c, auto& k, auto& v) { c.synth.max_year = number<int>(k, v); };
    t["synth_train_ratio"] = [](RunConfig& c, auto& k, auto& v) { c.synth.train_ratio = number<double>(k, v); };
    t["synth_seed"] = [](RunConfig& c, auto& k, auto& v) { c.synth.seed = number<std::uint64_t>(k, v); };
    return t;
  }();
  return table;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
    auto key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw ParseError(line_no, "empty key");
    kv.set(std::move(key), trim(std::string_view(t).substr(eq + 1)));
  }
  return kv;
}

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  return parse(in);
}

void KeyValueConfig::set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
  const auto it = values_.find(std::string(key));
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

void KeyValueConfig::apply_env() {
  if (const char* url = std::getenv("TKGA_REASONER_URL"); url && *url) set("reasoner_url", url);
  if (const char* token = std::getenv("TKGA_REASONER_TOKEN"); token && *token) set("reasoner_token", token);
}

const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> k;
    for (const auto& [name, _] : setters()) k.insert(name);
    return k;
  }();
  return keys;
}

RunConfig load_run_config(const KeyValueConfig& kv) {
  RunConfig cfg;
  const auto& table = setters();
  for (const auto& [key, _] : kv.values()) {
    if (!table.count(key)) throw ConfigError(key, "unknown key");
  }
  // Presets and the global seed first, so that specific keys override them.
  for (const char* first : {"synth_seed", "synth_preset", "seed"}) {
    if (const auto v = kv.get(first)) table.at(first)(cfg, first, *v);
  }
  for (const auto& [key, value] : kv.values()) {
    if (key == "synth_preset" || key == "seed") continue;
    table.at(key)(cfg, key, value);
  }
  cfg.pipeline.validate();
  if (cfg.name_dim == 0) throw ConfigError("name_dim", "must be positive");
  return cfg;
}

DatasetPaths dataset_dir(const std::filesystem::path& dir) {
  DatasetPaths p;
  p.source = dir / "source.tsv";
  p.target = dir / "target.tsv";
  p.train = dir / "train.tsv";
  if (std::filesystem::exists(dir / "test.tsv")) p.test = dir / "test.tsv";
  if (std::filesystem::exists(dir / "rel_map.tsv")) p.rel_map = dir / "rel_map.tsv";
  return p;
}

Dataset load_dataset(const DatasetPaths& paths) {
  if (paths.source.empty()) throw ConfigError("source", "missing");
  if (paths.target.empty()) throw ConfigError("target", "missing");
  Dataset d;
  d.source = TemporalKG::parse_file(paths.source);
  d.target = TemporalKG::parse_file(paths.target);
  if (!paths.train.empty()) d.seeds = parse_seed_file(paths.train, d.source, d.target, Split::Train);
  if (!paths.test.empty()) {
    const auto test = parse_seed_file(paths.test, d.source, d.target, Split::Test);
    d.seeds.pairs.insert(d.seeds.pairs.end(), test.pairs.begin(), test.pairs.end());
  }
  if (!paths.rel_map.empty()) d.rel_map = RelationMap::parse_file(paths.rel_map);
  return d;
}

}  // namespace tkga
