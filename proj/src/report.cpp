#include "tkga/report.hpp"

#include <fstream>

#include "tkga/error.hpp"

namespace tkga {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json pairs_json(const PairSet& pairs, const Dataset& data) {
  json out = json::array();
  for (const auto& p : pairs) {
    out.push_back({data.source.entity_label(p.source), data.target.entity_label(p.target)});
  }
  return out;
}

}  // namespace

json to_json(const RankReport& r, bool with_ranks) {
  json j{{"count", r.ranks.size()}, {"hits@1", r.hits1}, {"hits@5", r.hits5},
         {"hits@10", r.hits10}, {"mrr", r.mrr}};
  if (with_ranks) j["ranks"] = r.ranks;
  return j;
}

json to_json(const GraphStats& g) {
  return {{"entities", g.entities},
          {"relations", g.relations},
          {"facts", g.facts},
          {"valid_facts", g.valid_facts},
          {"temporal_entities", g.temporal_entities},
          {"temporal_density", g.density},
          {"overlap_pct", optional_number(g.overlap_pct)}};
}

json to_json(const DatasetStats& s) {
  return {{"source", to_json(s.source)},
          {"target", to_json(s.target)},
          {"mtf_pct", optional_number(s.mtf_pct)},
          {"delta_tf_pct", optional_number(s.delta_facts_pct)},
          {"delta_td_pct", optional_number(s.delta_density_pct)},
          {"interval_consistency_pct", optional_number(s.interval_consistency_pct)}};
}

json to_json(const PipelineResult& r, const Dataset& data) {
  json rounds = json::array();
  for (const auto& rec : r.rounds) {
    json j{{"round", rec.round},
           {"phi_sizes", {rec.phi[0].size(), rec.phi[1].size(), rec.phi[2].size()}},
           {"conflicted_sources", rec.conflicts},
           {"phi_c_size", rec.phi_c.size()},
           {"phi_f", pairs_json(rec.phi_f, data)},
           {"new_pairs", rec.new_pairs},
           {"reasoner", {{"calls", rec.reasoner.calls},
                         {"failures", rec.reasoner.failures},
                         {"edits", rec.reasoner.edits}}},
           {"final_train_loss", rec.final_train_loss}};
    j["report"] = rec.report ? to_json(*rec.report) : json(nullptr);
    rounds.push_back(std::move(j));
  }
  return {{"rounds", std::move(rounds)},
          {"converged", r.converged},
          {"aborted", r.aborted ? json(*r.aborted) : json(nullptr)},
          {"pool_size", r.pool.size()},
          {"pins", r.pins.size()},
          {"report", r.report ? to_json(*r.report) : json(nullptr)}};
}

void write_result(const std::filesystem::path& path, const std::string& command, json body) {
  json out{{"schema_version", kResultSchemaVersion}, {"command", command}};
  out.update(body);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  f << out.dump(2) << '\n';
}

void write_alignment(const std::filesystem::path& path, std::span<const AlignedPair> pairs,
                     const Dataset& data) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  for (const auto& p : pairs) {
    f << data.source.entity_label(p.source) << '\t' << data.target.entity_label(p.target) << '\n';
  }
}

}  // namespace tkga
