#include "finqa/llm.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <random>
#include <thread>

#include <httplib.h>

#include "finqa/error.hpp"
#include "finqa/hash.hpp"
#include "finqa/io.hpp"

namespace finqa {

ProviderConfig ProviderConfig::from_json(const nlohmann::json& obj) {
  ProviderConfig cfg;
  try {
    cfg.base_url = obj.at("base_url").get<std::string>();
    cfg.model = obj.at("model").get<std::string>();
    if (obj.contains("api_key_env") && !obj["api_key_env"].is_null())
      cfg.api_key_env = obj["api_key_env"].get<std::string>();
    if (obj.contains("temperature")) cfg.temperature = obj["temperature"].get<double>();
    if (obj.contains("max_retries")) cfg.max_retries = obj["max_retries"].get<int>();
    if (obj.contains("timeout_s")) cfg.timeout_s = obj["timeout_s"].get<double>();
    if (obj.contains("max_concurrency")) cfg.max_concurrency = obj["max_concurrency"].get<int>();
    if (obj.contains("initial_backoff_ms"))
      cfg.initial_backoff_ms = obj["initial_backoff_ms"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("provider config: ") + e.what());
  }
  if (cfg.temperature < 0) throw Error("temperature must be >= 0");
  if (cfg.timeout_s <= 0) throw Error("timeout_s must be > 0");
  if (cfg.max_retries < 0) throw Error("max_retries must be >= 0");
  if (cfg.max_concurrency < 1) throw Error("max_concurrency must be >= 1");
  return cfg;
}

ProviderConfig ProviderConfig::from_file(const std::string& path) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": malformed JSON: " + e.what());
  }
  try {
    return from_json(obj);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

nlohmann::json ProviderConfig::to_json() const {
  return {
      {"base_url", base_url},
      {"model", model},
      {"api_key_env", api_key_env},
      {"temperature", temperature},
      {"max_retries", max_retries},
      {"timeout_s", timeout_s},
      {"max_concurrency", max_concurrency},
      {"initial_backoff_ms", initial_backoff_ms},
  };
}

std::string now_iso8601_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// Mock transport

namespace {

constexpr std::string_view kJudgePrefix = "Task: Evaluate an answer to the question";

// Slice of `text` between `marker` and the next blank line.
std::string slice_block(const std::string& text, std::string_view marker) {
  const std::size_t at = text.find(marker);
  if (at == std::string::npos) return {};
  const std::size_t from = at + marker.size();
  std::size_t to = text.find("\n\n", from);
  if (to == std::string::npos) to = text.size();
  return text.substr(from, to - from);
}

}  // namespace

std::string MockTransport::answer_for(const std::string& prompt_text) {
  const std::uint64_t h = fnv1a64(prompt_text);
  if (prompt_text.rfind(kJudgePrefix, 0) == 0) {
    const int con = static_cast<int>((h >> 8) % 11);
    const int info = static_cast<int>((h >> 16) % 11);
    const int rel = static_cast<int>((h >> 24) % 11);
    return "1. Concreteness: " + std::to_string(con) +
           "\n2. Information Richness: " + std::to_string(info) +
           "\n3. Relevance and Accuracy: " + std::to_string(rel);
  }
  const std::string question = slice_block(prompt_text, "call: ");
  const std::string entities = slice_block(prompt_text, "graph: ");
  std::string answer = "Considering " + question;
  if (!entities.empty()) answer += " I would highlight " + entities + ".";
  answer += " [mock-" + hex64(h).substr(0, 8) + "]";
  return answer;
}

TransportReply MockTransport::send(const std::string& request_body) {
  nlohmann::json req;
  try {
    req = nlohmann::json::parse(request_body);
  } catch (const nlohmann::json::exception& e) {
    return TransportReply{400, std::string("{\"error\":\"bad request\"}"), ""};
  }
  std::string content;
  if (req.contains("messages") && req["messages"].is_array() && !req["messages"].empty())
    content = req["messages"][0].value("content", "");
  const std::string answer = answer_for(content);
  nlohmann::json body = {
      {"choices", nlohmann::json::array({{{"message", {{"role", "assistant"}, {"content", answer}}}}})},
      {"usage",
       {{"prompt_tokens", static_cast<std::int64_t>(content.size() / 4)},
        {"completion_tokens", static_cast<std::int64_t>(answer.size() / 4)}}},
  };
  return TransportReply{200, body.dump(), ""};
}

// ---------------------------------------------------------------------------
// HTTP transport

HttpTransport::HttpTransport(const ProviderConfig& cfg) : cfg_(cfg) {
  if (!cfg.api_key_env.empty()) {
    const char* key = std::getenv(cfg.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
      throw Error("environment variable " + cfg.api_key_env + " is not set");
    api_key_ = key;
  }
  const std::size_t scheme = cfg.base_url.find("://");
  if (scheme == std::string::npos) throw Error("base_url must include a scheme: " + cfg.base_url);
  const std::size_t slash = cfg.base_url.find('/', scheme + 3);
  if (slash == std::string::npos) {
    scheme_host_ = cfg.base_url;
  } else {
    scheme_host_ = cfg.base_url.substr(0, slash);
    path_prefix_ = cfg.base_url.substr(slash);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  }
}

TransportReply HttpTransport::send(const std::string& request_body) {
  // a fresh client per call keeps concurrent sends independent
  httplib::Client client(scheme_host_);
  const auto timeout_ms = static_cast<long>(cfg_.timeout_s * 1000.0);
  client.set_connection_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
  client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
  client.set_write_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = client.Post(path_prefix_ + "/chat/completions", headers, request_body,
                         "application/json");
  if (!res) return TransportReply{0, "", httplib::to_string(res.error())};
  return TransportReply{res->status, res->body, ""};
}

std::unique_ptr<ChatTransport> make_transport(const ProviderConfig& cfg) {
  if (cfg.base_url.rfind("mock", 0) == 0) return std::make_unique<MockTransport>();
  return std::make_unique<HttpTransport>(cfg);
}

// ---------------------------------------------------------------------------
// Request orchestration

nlohmann::json GenerationRecord::to_json() const {
  nlohmann::json row = {
      {"qa_id", qa_id},
      {"config", to_string(config)},
      {"kg", kg_name},
      {"model", model},
      {"answer", answer},
      {"prompt_hash", prompt_hash},
      {"created_at", created_at},
      {"retry_count", retry_count},
  };
  if (!error.empty()) row["error"] = error;
  if (usage)
    row["usage"] = {{"prompt_tokens", usage->prompt_tokens},
                    {"completion_tokens", usage->completion_tokens}};
  return row;
}

GenerationRecord GenerationRecord::from_json(const nlohmann::json& row) {
  GenerationRecord rec;
  rec.qa_id = row.at("qa_id").get<std::string>();
  rec.config = parse_prompt_config(row.at("config").get<std::string>());
  rec.kg_name = row.value("kg", "none");
  rec.model = row.value("model", "");
  rec.answer = row.value("answer", "");
  rec.prompt_hash = row.value("prompt_hash", "");
  rec.created_at = row.value("created_at", "");
  rec.retry_count = row.value("retry_count", 0);
  rec.error = row.value("error", "");
  if (row.contains("usage") && row["usage"].is_object()) {
    TokenUsage u;
    u.prompt_tokens = row["usage"].value("prompt_tokens", static_cast<std::int64_t>(0));
    u.completion_tokens = row["usage"].value("completion_tokens", static_cast<std::int64_t>(0));
    rec.usage = u;
  }
  return rec;
}

namespace {

std::string rtrim(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' || s.back() == '\r'))
    s.pop_back();
  return s;
}

void backoff_sleep(int attempt, const ProviderConfig& cfg) {
  thread_local std::mt19937 rng(std::random_device{}());
  double ms = static_cast<double>(cfg.initial_backoff_ms) * std::pow(2.0, attempt);
  ms = std::min(ms, 30000.0);
  std::uniform_real_distribution<double> jitter(0.5, 1.5);
  ms *= jitter(rng);
  std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<long>(ms)));
}

struct ChatResult {
  std::string answer;
  std::optional<TokenUsage> usage;
  int retry_count = 0;
};

ChatResult request_chat(const ProviderConfig& cfg, ChatTransport& transport,
                        const std::string& prompt_text) {
  const nlohmann::json req = {
      {"model", cfg.model},
      {"temperature", cfg.temperature},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt_text}}})},
  };
  const std::string body = req.dump();

  int attempt = 0;
  for (;;) {
    const TransportReply rep = transport.send(body);
    std::string transient;
    if (!rep.ok()) {
      transient = "transport error: " + rep.transport_error;
    } else if (rep.status == 429 || (rep.status >= 500 && rep.status < 600)) {
      transient = "HTTP " + std::to_string(rep.status);
    } else if (rep.status == 401 || rep.status == 403) {
      throw Error("authentication failed (HTTP " + std::to_string(rep.status) + ")");
    } else if (rep.status != 200) {
      throw Error("provider request failed (HTTP " + std::to_string(rep.status) + ")");
    } else {
      nlohmann::json parsed;
      try {
        parsed = nlohmann::json::parse(rep.body);
        ChatResult result;
        result.answer = rtrim(parsed.at("choices").at(0).at("message").at("content").get<std::string>());
        if (parsed.contains("usage") && parsed["usage"].is_object()) {
          TokenUsage u;
          u.prompt_tokens = parsed["usage"].value("prompt_tokens", static_cast<std::int64_t>(0));
          u.completion_tokens =
              parsed["usage"].value("completion_tokens", static_cast<std::int64_t>(0));
          result.usage = u;
        }
        result.retry_count = attempt;
        return result;
      } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed provider response: ") + e.what());
      }
    }
    if (attempt >= cfg.max_retries)
      throw Error("retries exhausted after " + std::to_string(attempt + 1) +
                  " attempts; last failure: " + transient);
    backoff_sleep(attempt, cfg);
    ++attempt;
  }
}

}  // namespace

GenerationRecord complete(const ProviderConfig& cfg, ChatTransport& transport,
                          const RenderedPrompt& prompt, const std::string& kg_name) {
  GenerationRecord rec;
  rec.qa_id = prompt.qa_id;
  rec.config = prompt.config;
  rec.kg_name = kg_name;
  rec.model = cfg.model;
  rec.prompt_hash = prompt.content_hash;
  const ChatResult result = request_chat(cfg, transport, prompt.text);
  rec.answer = result.answer;
  rec.usage = result.usage;
  rec.retry_count = result.retry_count;
  rec.created_at = now_iso8601_utc();
  return rec;
}

std::vector<GenerationRecord> run_batch(const ProviderConfig& cfg, ChatTransport& transport,
                                        const std::vector<RenderedPrompt>& prompts,
                                        const std::string& kg_name) {
  std::vector<GenerationRecord> out(prompts.size());
  if (prompts.empty()) return out;
  std::atomic<std::size_t> next{0};
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.max_concurrency), prompts.size());

  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= prompts.size()) return;
      try {
        out[i] = complete(cfg, transport, prompts[i], kg_name);
      } catch (const std::exception& e) {
        GenerationRecord failed;
        failed.qa_id = prompts[i].qa_id;
        failed.config = prompts[i].config;
        failed.kg_name = kg_name;
        failed.model = cfg.model;
        failed.prompt_hash = prompts[i].content_hash;
        failed.created_at = now_iso8601_utc();
        failed.error = e.what();
        out[i] = std::move(failed);
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();
  return out;
}

// ---------------------------------------------------------------------------
// Judge

const std::string& judge_template() {
  static const std::string tmpl =
      "Task: Evaluate an answer to the question using the following criteria.\n"
      "\n"
      "Question Asked: {question}\n"
      "\n"
      "Answer Provided: {answer}\n"
      "\n"
      "1. Concreteness (1-10): Assess how specific and detailed the answer is.\n"
      "\n"
      "- 1: Extremely vague, lacking specific details or examples. - 5: Provides moderate detail "
      "and examples but could be more specific. - 10: Exceptionally detailed, with clear, "
      "specific examples or data supporting the points.\n"
      "\n"
      "2. Information Richness (1-10): Gauge the breadth of the information provided.\n"
      "- 1: Offers minimal useful information, background, or analysis. - 5: Contains a fair "
      "amount of information and analysis but lacks breath in crucial areas. - 10: Highly "
      "informative, with comprehensive background, detailed analysis, and insightful commentary.\n"
      "\n"
      "3. Relevance and Accuracy (1-10): Determine if the answer directly and accurately "
      "addresses the question. - 1: Does not address the question, lacking relevance and "
      "accuracy. - 5: Partially addresses the question but misses full relevance or contains "
      "inaccuracies. - 10: Directly and accurately addresses the question in full, with high "
      "relevance and accuracy.\n"
      "\n"
      "Score each criterion based on how well the answer meets these benchmarks, adjusting "
      "scores between 1, 5, and 10 as needed.";
  return tmpl;
}

std::string render_judge_prompt(std::string_view question, std::string_view answer) {
  std::string text = judge_template();
  const auto sub = [&text](std::string_view placeholder, std::string_view value) {
    std::size_t pos = 0;
    while ((pos = text.find(placeholder, pos)) != std::string::npos) {
      text.replace(pos, placeholder.size(), value);
      pos += value.size();
    }
  };
  sub("{question}", question);
  sub("{answer}", answer);
  return text;
}

namespace {

char lower(char c) { return c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c; }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Matches the criterion words at `pos` case-insensitively, any whitespace
// run between words. Returns the position just past the name, or npos.
std::size_t match_name(const std::string& text, std::size_t pos,
                       const std::vector<std::string>& words) {
  std::size_t p = pos;
  for (std::size_t w = 0; w < words.size(); ++w) {
    if (w > 0) {
      std::size_t spaces = 0;
      while (p < text.size() && is_space(text[p])) {
        ++p;
        ++spaces;
      }
      if (spaces == 0) return std::string::npos;
    }
    const std::string& word = words[w];
    if (p + word.size() > text.size()) return std::string::npos;
    for (std::size_t k = 0; k < word.size(); ++k) {
      if (lower(text[p + k]) != word[k]) return std::string::npos;
    }
    p += word.size();
  }
  return p;
}

// Skips a "(d-d)" range suffix such as "(1-10)" or "(0 - 10)".
std::size_t skip_range_suffix(const std::string& text, std::size_t pos) {
  std::size_t p = pos;
  while (p < text.size() && is_space(text[p])) ++p;
  if (p >= text.size() || text[p] != '(') return pos;
  const std::size_t close = text.find(')', p);
  if (close == std::string::npos || close - p > 12) return pos;
  bool digits = false, dash = false, other = false;
  for (std::size_t k = p + 1; k < close; ++k) {
    const char c = text[k];
    if (c >= '0' && c <= '9') digits = true;
    else if (c == '-') dash = true;
    else if (!is_space(c)) other = true;
  }
  if (digits && dash && !other) return close + 1;
  return pos;
}

std::optional<int> first_int_within(const std::string& text, std::size_t pos, std::size_t span) {
  const std::size_t limit = std::min(text.size(), pos + span);
  for (std::size_t p = pos; p < limit; ++p) {
    if (text[p] < '0' || text[p] > '9') continue;
    long value = 0;
    std::size_t q = p;
    while (q < text.size() && text[q] >= '0' && text[q] <= '9' && q - p < 9) {
      value = value * 10 + (text[q] - '0');
      ++q;
    }
    return static_cast<int>(value);
  }
  return std::nullopt;
}

std::optional<int> parse_criterion(const std::string& reply,
                                   const std::vector<std::string>& words) {
  for (std::size_t pos = 0; pos < reply.size(); ++pos) {
    const std::size_t after = match_name(reply, pos, words);
    if (after == std::string::npos) continue;
    const std::size_t from = skip_range_suffix(reply, after);
    const std::optional<int> value = first_int_within(reply, from, 40);
    if (value && *value >= 0 && *value <= 10) return value;
    // this occurrence had no usable score; keep scanning
    pos = after - 1;
  }
  return std::nullopt;
}

}  // namespace

JudgeScores parse_judge_reply(const std::string& reply) {
  JudgeScores scores;
  scores.raw_response = reply;
  scores.concreteness = parse_criterion(reply, {"concreteness"});
  scores.info_richness = parse_criterion(reply, {"information", "richness"});
  scores.relevance_accuracy = parse_criterion(reply, {"relevance", "and", "accuracy"});
  return scores;
}

JudgeScores judge(const ProviderConfig& cfg, ChatTransport& transport, std::string_view question,
                  std::string_view answer) {
  const std::string prompt = render_judge_prompt(question, answer);
  const ChatResult result = request_chat(cfg, transport, prompt);
  return parse_judge_reply(result.answer);
}

}  // namespace finqa
