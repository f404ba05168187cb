#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "finqa/prompts.hpp"

namespace finqa {

struct ProviderConfig {
  std::string base_url;     // "mock://echo" selects the deterministic mock
  std::string model;
  std::string api_key_env;  // name of the env var holding the key; empty = no auth header
  double temperature = 0.0;
  int max_retries = 3;
  double timeout_s = 60.0;
  int max_concurrency = 4;
  int initial_backoff_ms = 250;

  static ProviderConfig from_json(const nlohmann::json& obj);
  static ProviderConfig from_file(const std::string& path);
  nlohmann::json to_json() const;
};

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct TransportReply {
  int status = 0;
  std::string body;
  std::string transport_error;  // non-empty on timeout/connection failure
  bool ok() const { return transport_error.empty(); }
};

// One chat-completions round trip. Implementations must tolerate concurrent
// send() calls from multiple threads.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual TransportReply send(const std::string& request_body) = 0;
};

// Deterministic offline provider. Echo prompts produce an answer derived
// from the prompt text and its hash; judge-style prompts produce a
// parseable three-criterion rating derived from the hash.
class MockTransport : public ChatTransport {
 public:
  TransportReply send(const std::string& request_body) override;
  static std::string answer_for(const std::string& prompt_text);
};

// OpenAI-style chat completions over HTTP(S) via cpp-httplib. Resolves the
// API key from the configured environment variable at construction.
class HttpTransport : public ChatTransport {
 public:
  explicit HttpTransport(const ProviderConfig& cfg);
  TransportReply send(const std::string& request_body) override;

 private:
  ProviderConfig cfg_;
  std::string api_key_;
  std::string scheme_host_;
  std::string path_prefix_;
};

std::unique_ptr<ChatTransport> make_transport(const ProviderConfig& cfg);

struct GenerationRecord {
  std::string qa_id;
  PromptConfig config = PromptConfig::Baseline;
  std::string kg_name = "none";
  std::string model;
  std::string answer;  // verbatim, trailing whitespace trimmed
  std::string prompt_hash;
  std::string created_at;  // ISO 8601 UTC
  std::string error;       // non-empty when the item failed
  int retry_count = 0;
  std::optional<TokenUsage> usage;

  bool ok() const { return error.empty(); }
  nlohmann::json to_json() const;
  static GenerationRecord from_json(const nlohmann::json& row);
};

// One chat request carrying the prompt as a single user message. Transient
// failures (HTTP 429/5xx, timeouts) retry up to max_retries with
// exponential backoff and jitter; auth failures and malformed responses do
// not retry. Throws Error on failure.
GenerationRecord complete(const ProviderConfig& cfg, ChatTransport& transport,
                          const RenderedPrompt& prompt, const std::string& kg_name = "none");

// Executes prompts with at most max_concurrency in flight. Output order
// matches input order; per-item failures become error records and never
// abort the batch.
std::vector<GenerationRecord> run_batch(const ProviderConfig& cfg, ChatTransport& transport,
                                        const std::vector<RenderedPrompt>& prompts,
                                        const std::string& kg_name = "none");

struct JudgeScores {
  std::optional<int> concreteness;        // 0..10
  std::optional<int> info_richness;       // 0..10
  std::optional<int> relevance_accuracy;  // 0..10
  std::string raw_response;

  bool parse_failed() const { return !(concreteness && info_richness && relevance_accuracy); }
};

const std::string& judge_template();
std::string render_judge_prompt(std::string_view question, std::string_view answer);

// Extracts the three criterion scores from an arbitrary reply. For each
// criterion name (case-insensitive, tolerating a "(1-10)"-style suffix and
// numbering prefixes) the first integer within the following 40 characters
// is captured; out-of-range values fail that criterion. Never throws.
JudgeScores parse_judge_reply(const std::string& reply);

// Renders the judge prompt, requests a rating, and parses it. Provider
// errors throw; parse failures come back as records with parse_failed().
JudgeScores judge(const ProviderConfig& cfg, ChatTransport& transport, std::string_view question,
                  std::string_view answer);

std::string now_iso8601_utc();

}  // namespace finqa
