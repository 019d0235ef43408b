// tkga: command-line front end for encoding, alignment, evaluation,
// dataset statistics and synthetic data generation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/base_sink.h>
#include <spdlog/spdlog.h>

#include "tkga/config.hpp"
#include "tkga/error.hpp"
#include "tkga/remote.hpp"
#include "tkga/report.hpp"

namespace {

using namespace tkga;
using nlohmann::json;

// One JSON object per log record on stderr.
class JsonLineSink final : public spdlog::sinks::base_sink<std::mutex> {
 protected:
  void sink_it_(const spdlog::details::log_msg& msg) override {
    const auto t = std::chrono::duration_cast<std::chrono::milliseconds>(msg.time.time_since_epoch());
    const json j{{"ts_ms", t.count()},
                 {"level", std::string(spdlog::level::to_string_view(msg.level).data(),
                                       spdlog::level::to_string_view(msg.level).size())},
                 {"msg", std::string(msg.payload.data(), msg.payload.size())}};
    std::fputs((j.dump() + "\n").c_str(), stderr);
  }
  void flush_() override { std::fflush(stderr); }
};

struct Common {
  std::string config;
  std::string data;
  std::vector<std::string> overrides;
  bool json_logs = false;
  bool quiet = false;
};

RunConfig resolve(const Common& c, const std::map<std::string, std::string>& extra = {}) {
  KeyValueConfig kv;
  if (!c.config.empty()) kv = KeyValueConfig::parse_file(c.config);
  for (const auto& o : c.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError(o, "--set expects key=value");
    kv.set(o.substr(0, eq), o.substr(eq + 1));
  }
  for (const auto& [k, v] : extra) kv.set(k, v);
  kv.apply_env();
  auto cfg = load_run_config(kv);
  if (!c.data.empty()) {
    const auto names = cfg.data.names;
    cfg.data = dataset_dir(c.data);
    cfg.data.names = names;
  }
  return cfg;
}

std::unique_ptr<NameProvider> make_names(const RunConfig& cfg) {
  if (!cfg.data.names.empty()) {
    return std::make_unique<FileNameProvider>(FileNameProvider::load_file(cfg.data.names));
  }
  return std::make_unique<HashingNameProvider>(cfg.name_dim);
}

std::unique_ptr<Reasoner> make_reasoner(const RunConfig& cfg) {
  if (cfg.reasoner == "mock") return std::make_unique<MockReasoner>();
  if (cfg.reasoner == "none") return std::make_unique<AbstainingReasoner>();
  if (cfg.reasoner == "remote") return std::make_unique<RemoteReasoner>(cfg.remote);
  if (cfg.replay.empty()) throw ConfigError("replay_transcript", "required for the replay reasoner");
  return std::make_unique<ReplayReasoner>(ReplayReasoner::load(cfg.replay));
}

std::vector<AlignedPair> read_pairs(const std::filesystem::path& path, const Dataset& d) {
  const auto seeds = parse_seed_file(path, d.source, d.target, Split::Test);
  std::vector<AlignedPair> out;
  for (const auto& p : seeds.pairs) out.push_back({p.source, p.target});
  return out;
}

void dump_similarity(const std::filesystem::path& path, const SimilarityMatrix& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  p.dump(out);
}

int cmd_synth(const Common& c, const std::string& preset, std::optional<std::uint64_t> seed,
              std::optional<std::size_t> entities, const std::string& out) {
  std::map<std::string, std::string> extra;
  if (!preset.empty()) extra["synth_preset"] = preset;
  if (seed) extra["synth_seed"] = std::to_string(*seed);
  if (entities) extra["synth_entities"] = std::to_string(*entities);
  const auto cfg = resolve(c, extra);
  const auto d = synth_generate(cfg.synth);
  write_dataset(d, out);
  std::map<std::string, std::size_t> scenarios;
  for (const auto& s : d.scenarios) ++scenarios[s];
  Dataset data{d.source, d.target, d.seeds, d.rel_map};
  write_result(std::filesystem::path(out) / "synth.json", "synth",
               {{"seed", cfg.synth.seed},
                {"entities", cfg.synth.entities},
                {"scenarios", scenarios},
                {"stats", to_json(dataset_stats(d.source, d.target, d.seeds, cfg.stats))}});
  spdlog::info("wrote {} ({} + {} facts, {} pairs)", out, d.source.num_quadruples(),
               d.target.num_quadruples(), d.seeds.pairs.size());
  return 0;
}

int cmd_stats(const Common& c, const std::string& out) {
  const auto cfg = resolve(c);
  const auto d = load_dataset(cfg.data);
  const auto s = dataset_stats(d.source, d.target, d.seeds, cfg.stats);
  if (out.empty()) {
    std::cout << json{{"schema_version", kResultSchemaVersion}, {"command", "stats"}, {"stats", to_json(s)}}.dump(2)
              << '\n';
  } else {
    write_result(out, "stats", {{"stats", to_json(s)}});
  }
  return 0;
}

int cmd_encode(const Common& c, const std::string& out) {
  const auto cfg = resolve(c);
  const auto d = load_dataset(cfg.data);
  validate_train_split(d.seeds);
  const auto names = make_names(cfg);
  std::vector<AlignedPair> pool;
  for (const auto& p : d.seeds.train()) pool.push_back({p.source, p.target});
  const auto enc = encode_graphs(d, *names, pool, cfg.pipeline, nullptr, cfg.pipeline.noise_ratio);
  std::filesystem::create_directories(out);
  dump_similarity(std::filesystem::path(out) / "similarity.bin", enc.similarity);
  const auto pseudo = pseudo_pairs(enc.similarity);
  write_alignment(std::filesystem::path(out) / "pseudo_pairs.tsv", pseudo, d);
  json body{{"rows", enc.similarity.rows()},
            {"cols", enc.similarity.cols()},
            {"dimension", enc.source_fused.cols()},
            {"gates", enc.model.params.gates},
            {"epoch_loss", enc.training.epoch_loss}};
  const auto test = d.seeds.test();
  body["report"] = test.empty() ? json(nullptr) : to_json(evaluate(enc.similarity, test));
  write_result(std::filesystem::path(out) / "encode.json", "encode", body);
  return 0;
}

int cmd_align(const Common& c, std::optional<std::size_t> iterations, const std::string& reasoner,
              bool csls_only, const std::string& out) {
  auto cfg = resolve(c);
  if (iterations) cfg.pipeline.iterations = *iterations;
  if (!reasoner.empty()) cfg.reasoner = reasoner;
  if (csls_only) cfg.pipeline.csls_only = true;
  const auto d = load_dataset(cfg.data);
  const auto names = make_names(cfg);
  const auto r = make_reasoner(cfg);
  const auto result = run_pipeline(d, *names, *r, cfg.pipeline);
  std::filesystem::create_directories(out);
  const std::filesystem::path dir(out);
  if (result.similarity.rows() > 0) dump_similarity(dir / "similarity.bin", result.similarity);
  write_alignment(dir / "alignment.tsv", result.alignment, d);
  std::vector<AlignedPair> pins;
  for (const auto& [s, t] : result.pins) pins.push_back({s, t});
  write_alignment(dir / "pins.tsv", pins, d);
  auto body = to_json(result, d);
  body["reasoner"] = cfg.reasoner;
  write_result(dir / "results.json", "align", body);
  if (result.aborted) {
    spdlog::error("alignment aborted: {}", *result.aborted);
    return 2;
  }
  if (result.report) spdlog::info("Hits@1 {:.4f}  MRR {:.4f}", result.report->hits1, result.report->mrr);
  return 0;
}

int cmd_eval(const Common& c, const std::string& similarity, const std::string& pins_path,
             const std::string& out) {
  const auto cfg = resolve(c);
  const auto d = load_dataset(cfg.data);
  std::ifstream in(similarity, std::ios::binary);
  if (!in) throw Error("cannot open " + similarity);
  const auto p = SimilarityMatrix::load(in, cfg.pipeline.top_k);
  Pins pins;
  if (!pins_path.empty()) {
    for (const auto& pr : read_pairs(pins_path, d)) pins[pr.source] = pr.target;
  }
  const auto test = d.seeds.test();
  const auto report = evaluate(p, test, pins);
  const json body{{"report", to_json(report, true)}};
  if (out.empty()) {
    std::cout << json{{"schema_version", kResultSchemaVersion}, {"command", "eval"}, {"report", body["report"]}}.dump(2)
              << '\n';
  } else {
    write_result(out, "eval", body);
  }
  return 0;
}

int cmd_noise_sweep(const Common& c, const std::vector<double>& ratios, bool ablation,
                    const std::string& out) {
  const auto cfg = resolve(c);
  const auto d = load_dataset(cfg.data);
  const auto names = make_names(cfg);
  json runs = json::array();
  int status = 0;
  for (const double rho : ratios) {
    for (const bool only : ablation ? std::vector<bool>{false, true} : std::vector<bool>{false}) {
      auto pc = cfg.pipeline;
      pc.noise_ratio = rho;
      pc.csls_only = only;
      const auto r = make_reasoner(cfg);
      const auto result = run_pipeline(d, *names, *r, pc);
      if (result.aborted) status = 2;
      runs.push_back({{"ratio", rho},
                      {"variant", only ? "csls_only" : "full"},
                      {"aborted", result.aborted ? json(*result.aborted) : json(nullptr)},
                      {"report", result.report ? to_json(*result.report) : json(nullptr)}});
      spdlog::info("noise {:.2f} {}: Hits@1 {}", rho, only ? "csls_only" : "full",
                   result.report ? fmt::format("{:.4f}", result.report->hits1) : "n/a");
    }
  }
  write_result(out, "noise-sweep", {{"runs", runs}});
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal knowledge graph alignment"};
  app.require_subcommand(1);
  Common common;
  app.add_option("-c,--config", common.config, "key = value configuration file");
  app.add_option("--data", common.data, "dataset directory (source.tsv, target.tsv, train.tsv, ...)");
  app.add_option("--set", common.overrides, "override one configuration key (key=value)");
  app.add_flag("--json-logs", common.json_logs, "write logs as JSON lines on stderr");
  app.add_flag("-q,--quiet", common.quiet, "only log warnings and errors");

  std::string out;
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  std::string preset;
  std::optional<std::uint64_t> synth_seed;
  std::optional<std::size_t> synth_entities;
  synth->add_option("--preset", preset, "easy or wild");
  synth->add_option("--seed", synth_seed);
  synth->add_option("--entities", synth_entities);
  synth->add_option("-o,--out", out, "output directory")->required();

  auto* stats = app.add_subcommand("stats", "dataset statistics as JSON");
  stats->add_option("-o,--out", out, "result file (default: stdout)");

  auto* encode = app.add_subcommand("encode", "encode both graphs and write the similarity matrix");
  encode->add_option("-o,--out", out, "output directory")->required();

  auto* align = app.add_subcommand("align", "run the full alignment pipeline");
  std::optional<std::size_t> iterations;
  std::string reasoner;
  bool csls_only = false;
  align->add_option("--iterations", iterations);
  align->add_option("--reasoner", reasoner, "mock, remote, replay or none");
  align->add_flag("--csls-only", csls_only, "skip projection, retrieval and reasoning");
  align->add_option("-o,--out", out, "output directory")->required();

  auto* eval = app.add_subcommand("eval", "rank the test split under a stored similarity matrix");
  std::string similarity;
  std::string pins;
  eval->add_option("--similarity", similarity, "similarity.bin")->required();
  eval->add_option("--pins", pins, "pinned pairs (source\\ttarget)");
  eval->add_option("-o,--out", out, "result file (default: stdout)");

  auto* sweep = app.add_subcommand("noise-sweep", "alignment quality under embedding noise");
  std::vector<double> ratios{0.0, 0.2, 0.4, 0.6, 0.8};
  bool ablation = false;
  sweep->add_option("--ratios", ratios)->delimiter(',');
  sweep->add_flag("--ablation", ablation, "also run the CSLS-only variant");
  sweep->add_option("-o,--out", out, "result file")->required();

  CLI11_PARSE(app, argc, argv);

  if (common.json_logs) {
    spdlog::set_default_logger(std::make_shared<spdlog::logger>("tkga", std::make_shared<JsonLineSink>()));
  }
  spdlog::set_level(common.quiet ? spdlog::level::warn : spdlog::level::info);

  try {
    if (*synth) return cmd_synth(common, preset, synth_seed, synth_entities, out);
    if (*stats) return cmd_stats(common, out);
    if (*encode) return cmd_encode(common, out);
    if (*align) return cmd_align(common, iterations, reasoner, csls_only, out);
    if (*eval) return cmd_eval(common, similarity, pins, out);
    if (*sweep) return cmd_noise_sweep(common, ratios, ablation, out);
  } catch (const ConfigError& e) {
    spdlog::error("configuration error: {}", e.what());
    std::cerr << app.help() << '\n';
    return 64;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
