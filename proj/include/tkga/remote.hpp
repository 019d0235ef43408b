#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

#include "tkga/reasoner.hpp"

namespace tkga {

// Task payloads sent to a chat model, as JSON with labels instead of handles.
nlohmann::json select_task(const ReasoningScope& scope, const EntityContext& source,
                           std::span<const CandidateContext> candidates);
nlohmann::json augment_task(const ReasoningScope& scope, const EntityContext& source,
                            const CandidateContext& candidate);

// Strict reply parsers. Anything off-schema yields nullopt (the caller
// treats it as "none" / no edits).
// select reply: {"choice": <index>} or {"choice": "none"}; nullopt inside
// the result means "none".
std::optional<std::optional<std::size_t>> parse_select_reply(const std::string& content,
                                                             std::size_t num_candidates);
// augment reply: {"edits": [{"op", "side", "relation", "neighbor",
// "direction", "begin", "end"}, ...]}. Labels must resolve in the graph of
// the edit's side.
std::optional<std::vector<FactEdit>> parse_augment_reply(const std::string& content,
                                                         const ReasoningScope& scope);

// Append-only JSON-lines log of every exchange: {"kind", "task", "content"}
// or {"kind", "task", "error"}.
class Transcript {
 public:
  explicit Transcript(const std::filesystem::path& path);
  void record(const std::string& kind, const nlohmann::json& task,
              const std::optional<std::string>& content, const std::string& error = {});

 private:
  std::mutex mutex_;
  std::ofstream out_;
};

struct RemoteConfig {
  std::string url;  // e.g. http://127.0.0.1:8080/v1/chat/completions
  std::string token;
  std::string model = "gpt-4o";
  int timeout_ms = 30000;
  int max_retries = 3;
  int backoff_ms = 250;  // doubled after every failed attempt
  std::string transcript;  // empty disables logging

  void validate() const;
};

// Chat-completion client. Retries connection errors, 429 and 5xx with
// exponential backoff, then throws TransportError. Malformed replies are
// logged and mapped to "none" / no edits.
class RemoteReasoner final : public Reasoner {
 public:
  explicit RemoteReasoner(RemoteConfig cfg);

  std::optional<std::size_t> select(const ReasoningScope& scope, const EntityContext& source,
                                    std::span<const CandidateContext> candidates) override;
  std::vector<FactEdit> augment(const ReasoningScope& scope, const EntityContext& source,
                                const CandidateContext& candidate) override;

  // Sends one task and returns the assistant message content.
  std::string complete(const nlohmann::json& task);

 private:
  std::string exchange(const std::string& kind, const nlohmann::json& task);

  RemoteConfig cfg_;
  std::string base_;
  std::string path_;
  std::unique_ptr<Transcript> transcript_;
};

// Answers from a transcript: the reply recorded for an identical task is
// parsed exactly as the live client would parse it.
class ReplayReasoner final : public Reasoner {
 public:
  static ReplayReasoner load(const std::filesystem::path& path);
  static ReplayReasoner load(std::istream& in);

  std::optional<std::size_t> select(const ReasoningScope& scope, const EntityContext& source,
                                    std::span<const CandidateContext> candidates) override;
  std::vector<FactEdit> augment(const ReasoningScope& scope, const EntityContext& source,
                                const CandidateContext& candidate) override;

  std::size_t size() const noexcept { return replies_.size(); }

 private:
  struct Reply {
    std::optional<std::string> content;
    std::string error;
  };
  const Reply& find(const std::string& kind, const nlohmann::json& task) const;

  std::map<std::string, Reply> replies_;
};

}  // namespace tkga
