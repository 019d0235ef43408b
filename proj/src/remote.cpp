#include "tkga/remote.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "tkga/error.hpp"

namespace tkga {

using nlohmann::json;

namespace {

constexpr const char* kSystemPrompt =
    "You align entities between two temporal knowledge graphs. Each request is a JSON task. "
    "For task \"select\" answer with a JSON object {\"choice\": i} where i is the index of the "
    "candidate that denotes the same real-world entity as the source, or {\"choice\": \"none\"}. "
    "For task \"augment\" answer with {\"edits\": [...]} listing facts to add to or remove from "
    "the candidate (side \"candidate\") or the source (side \"source\") so that missing core "
    "temporal information is supplemented and irrelevant time information is trimmed. Each edit "
    "has op (add|remove), side, relation, neighbor, direction (out|in), begin and end (YYYY, "
    "YYYY-MM, YYYY-MM-DD or ####). Use only relations and neighbors that appear in the task. "
    "Reply with the JSON object only.";

json fact_json(const ContextFact& f, const TemporalKG& kg) {
  return {{"relation", kg.relation_label(f.rel)},
          {"neighbor", kg.entity_label(f.other)},
          {"direction", f.outgoing ? "out" : "in"},
          {"begin", format_time(f.interval.begin)},
          {"end", format_time(f.interval.end)}};
}

json entity_json(const EntityContext& c, const TemporalKG& kg) {
  json facts = json::array();
  for (const auto& f : c.facts) facts.push_back(fact_json(f, kg));
  return {{"label", kg.entity_label(c.entity)}, {"facts", std::move(facts)}};
}

std::optional<json> parse_object(const std::string& content) {
  auto j = json::parse(content, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

std::optional<std::string> string_field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

json select_task(const ReasoningScope& scope, const EntityContext& source,
                 std::span<const CandidateContext> candidates) {
  json cands = json::array();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto c = entity_json(candidates[i].context, *scope.target);
    c["index"] = i;
    c["score"] = candidates[i].score;
    cands.push_back(std::move(c));
  }
  return {{"task", "select"},
          {"source", entity_json(source, *scope.source)},
          {"candidates", std::move(cands)},
          {"answer_format", R"({"choice": <candidate index>} or {"choice": "none"})"}};
}

json augment_task(const ReasoningScope& scope, const EntityContext& source,
                  const CandidateContext& candidate) {
  return {{"task", "augment"},
          {"source", entity_json(source, *scope.source)},
          {"candidate", entity_json(candidate.context, *scope.target)},
          {"answer_format",
           R"({"edits": [{"op": "add|remove", "side": "candidate|source", "relation": "...", )"
           R"("neighbor": "...", "direction": "out|in", "begin": "...", "end": "..."}]})"}};
}

std::optional<std::optional<std::size_t>> parse_select_reply(const std::string& content,
                                                             std::size_t num_candidates) {
  const auto j = parse_object(content);
  if (!j || j->size() != 1) return std::nullopt;
  const auto it = j->find("choice");
  if (it == j->end()) return std::nullopt;
  if (it->is_string()) {
    if (it->get<std::string>() == "none") return std::optional<std::size_t>{};
    return std::nullopt;
  }
  if (!it->is_number_integer()) return std::nullopt;
  const auto v = it->get<long long>();
  if (v < 0 || static_cast<unsigned long long>(v) >= num_candidates) return std::nullopt;
  return std::optional<std::size_t>{static_cast<std::size_t>(v)};
}

std::optional<std::vector<FactEdit>> parse_augment_reply(const std::string& content,
                                                         const ReasoningScope& scope) {
  const auto j = parse_object(content);
  if (!j || j->size() != 1) return std::nullopt;
  const auto it = j->find("edits");
  if (it == j->end() || !it->is_array()) return std::nullopt;
  std::vector<FactEdit> edits;
  for (const auto& e : *it) {
    if (!e.is_object() || e.size() != 7) return std::nullopt;
    const auto op = string_field(e, "op");
    const auto side = string_field(e, "side");
    const auto rel = string_field(e, "relation");
    const auto nb = string_field(e, "neighbor");
    const auto dir = string_field(e, "direction");
    const auto begin = string_field(e, "begin");
    const auto end = string_field(e, "end");
    if (!op || !side || !rel || !nb || !dir || !begin || !end) return std::nullopt;
    FactEdit edit;
    if (*op == "add") {
      edit.op = FactEdit::Op::Add;
    } else if (*op == "remove") {
      edit.op = FactEdit::Op::Remove;
    } else {
      return std::nullopt;
    }
    if (*side == "source") {
      edit.side = Side::Source;
    } else if (*side == "candidate") {
      edit.side = Side::Candidate;
    } else {
      return std::nullopt;
    }
    if (*dir != "out" && *dir != "in") return std::nullopt;
    const TemporalKG& kg = edit.side == Side::Source ? *scope.source : *scope.target;
    const auto r = kg.find_relation(*rel);
    const auto n = kg.find_entity(*nb);
    const auto b = parse_time_literal(*begin);
    const auto t = parse_time_literal(*end);
    if (!r || !n || !b || !t) return std::nullopt;
    if (compare_at_coarsest(*b, *t) == std::strong_ordering::greater) return std::nullopt;
    edit.fact = {*r, *n, *dir == "out", {*b, *t}};
    edits.push_back(edit);
  }
  return edits;
}

Transcript::Transcript(const std::filesystem::path& path) : out_(path, std::ios::app) {
  if (!out_) throw Error("cannot open transcript " + path.string());
}

void Transcript::record(const std::string& kind, const json& task,
                        const std::optional<std::string>& content, const std::string& error) {
  json line{{"kind", kind}, {"task", task}};
  if (content) {
    line["content"] = *content;
  } else {
    line["error"] = error;
  }
  const std::lock_guard lock(mutex_);
  out_ << line.dump() << '\n';
  out_.flush();
}

void RemoteConfig::validate() const {
  if (url.rfind("http://", 0) != 0 && url.rfind("https://", 0) != 0) {
    throw ConfigError("reasoner_url", "must start with http:// or https://");
  }
  if (max_retries < 0) throw ConfigError("reasoner_retries", "must be non-negative");
  if (timeout_ms <= 0) throw ConfigError("reasoner_timeout_ms", "must be positive");
}

RemoteReasoner::RemoteReasoner(RemoteConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const auto scheme_end = cfg_.url.find("://") + 3;
  const auto slash = cfg_.url.find('/', scheme_end);
  base_ = cfg_.url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : cfg_.url.substr(slash);
  if (!cfg_.transcript.empty()) transcript_ = std::make_unique<Transcript>(cfg_.transcript);
}

std::string RemoteReasoner::complete(const json& task) {
  const json body{{"model", cfg_.model},
                  {"temperature", 0},
                  {"response_format", {{"type", "json_object"}}},
                  {"messages",
                   json::array({{{"role", "system"}, {"content", kSystemPrompt}},
                                {{"role", "user"}, {"content", task.dump()}}})}};
  const auto payload = body.dump();
  httplib::Client client(base_);
  const auto timeout = std::chrono::milliseconds(cfg_.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers headers;
  if (!cfg_.token.empty()) headers.emplace("Authorization", "Bearer " + cfg_.token);

  int delay = cfg_.backoff_ms;
  std::string last_error;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
      delay *= 2;
    }
    const auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) throw TransportError("reasoner returned HTTP " + std::to_string(res->status));
    const auto reply = json::parse(res->body, nullptr, false);
    try {
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
      // An unusable envelope is a malformed reply, not a transport fault.
      return std::string{};
    }
  }
  throw TransportError("reasoner unreachable after " + std::to_string(cfg_.max_retries + 1) +
                       " attempts: " + last_error);
}

std::string RemoteReasoner::exchange(const std::string& kind, const json& task) {
  try {
    auto content = complete(task);
    if (transcript_) transcript_->record(kind, task, content);
    return content;
  } catch (const TransportError& e) {
    if (transcript_) transcript_->record(kind, task, std::nullopt, e.what());
    throw;
  }
}

std::optional<std::size_t> RemoteReasoner::select(const ReasoningScope& scope,
                                                  const EntityContext& source,
                                                  std::span<const CandidateContext> candidates) {
  const auto content = exchange("select", select_task(scope, source, candidates));
  const auto parsed = parse_select_reply(content, candidates.size());
  if (!parsed) {
    spdlog::warn("malformed select reply for {}; treating as none",
                 scope.source->entity_label(source.entity));
    return std::nullopt;
  }
  return *parsed;
}

std::vector<FactEdit> RemoteReasoner::augment(const ReasoningScope& scope,
                                              const EntityContext& source,
                                              const CandidateContext& candidate) {
  const auto content = exchange("augment", augment_task(scope, source, candidate));
  auto parsed = parse_augment_reply(content, scope);
  if (!parsed) {
    spdlog::warn("malformed augment reply for {}; no edits",
                 scope.source->entity_label(source.entity));
    return {};
  }
  return std::move(*parsed);
}

ReplayReasoner ReplayReasoner::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open transcript " + path.string());
  return load(in);
}

ReplayReasoner ReplayReasoner::load(std::istream& in) {
  ReplayReasoner r;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("kind") || !j.contains("task")) {
      throw ParseError(line_no, "not a transcript record");
    }
    Reply reply;
    if (j.contains("content")) {
      reply.content = j.at("content").get<std::string>();
    } else {
      reply.error = j.value("error", std::string{"unknown error"});
    }
    r.replies_[j.at("kind").get<std::string>() + '\n' + j.at("task").dump()] = std::move(reply);
  }
  return r;
}

const ReplayReasoner::Reply& ReplayReasoner::find(const std::string& kind, const json& task) const {
  const auto it = replies_.find(kind + '\n' + task.dump());
  if (it == replies_.end()) throw Error("transcript has no reply for this " + kind + " task");
  if (!it->second.content) throw TransportError(it->second.error);
  return it->second;
}

std::optional<std::size_t> ReplayReasoner::select(const ReasoningScope& scope,
                                                  const EntityContext& source,
                                                  std::span<const CandidateContext> candidates) {
  const auto& reply = find("select", select_task(scope, source, candidates));
  const auto parsed = parse_select_reply(*reply.content, candidates.size());
  return parsed ? *parsed : std::nullopt;
}

std::vector<FactEdit> ReplayReasoner::augment(const ReasoningScope& scope,
                                              const EntityContext& source,
                                              const CandidateContext& candidate) {
  const auto& reply = find("augment", augment_task(scope, source, candidate));
  auto parsed = parse_augment_reply(*reply.content, scope);
  return parsed ? std::move(*parsed) : std::vector<FactEdit>{};
}

}  // namespace tkga
