#include <doctest.h>

#include <mutex>
#include <random>

#include "finqa/error.hpp"
#include "finqa/io.hpp"
#include "finqa/llm.hpp"
#include "testutil.hpp"

using namespace finqa;

namespace {

ProviderConfig mock_provider() {
  ProviderConfig cfg;
  cfg.base_url = "mock://echo";
  cfg.model = "mock-small";
  cfg.max_retries = 3;
  cfg.initial_backoff_ms = 1;
  cfg.max_concurrency = 4;
  return cfg;
}

RenderedPrompt make_prompt(const std::string& qa_id, const std::string& question) {
  QAPair qa;
  qa.id = qa_id;
  qa.question = question;
  qa.reference_answer = "ref";
  return render(PromptConfig::Baseline, qa, {});
}

// Replays a fixed sequence of replies; thread-safe.
class ScriptedTransport : public ChatTransport {
 public:
  explicit ScriptedTransport(std::vector<TransportReply> script) : script_(std::move(script)) {}
  TransportReply send(const std::string&) override {
    std::lock_guard<std::mutex> lock(mu_);
    if (next_ >= script_.size()) return script_.back();
    return script_[next_++];
  }
  std::size_t calls() const { return next_; }

 private:
  std::mutex mu_;
  std::vector<TransportReply> script_;
  std::size_t next_ = 0;
};

TransportReply ok_reply(const std::string& answer) {
  nlohmann::json body = {
      {"choices", nlohmann::json::array({{{"message", {{"role", "assistant"}, {"content", answer}}}}})}};
  return TransportReply{200, body.dump(), ""};
}

}  // namespace

TEST_CASE("provider configs validate their invariants") {
  nlohmann::json obj = {{"base_url", "mock://echo"}, {"model", "m"}};
  CHECK_NOTHROW(ProviderConfig::from_json(obj));

  nlohmann::json bad = obj;
  bad["temperature"] = -0.5;
  CHECK_THROWS_AS(ProviderConfig::from_json(bad), Error);
  bad = obj;
  bad["timeout_s"] = 0.0;
  CHECK_THROWS_AS(ProviderConfig::from_json(bad), Error);
  bad = obj;
  bad["max_concurrency"] = 0;
  CHECK_THROWS_AS(ProviderConfig::from_json(bad), Error);
  bad = obj;
  bad.erase("model");
  CHECK_THROWS_AS(ProviderConfig::from_json(bad), Error);

  testutil::TempDir dir("provider");
  const auto path = testutil::write_file(dir.path(), "p.json", "{not json");
  CHECK_THROWS_WITH_AS(ProviderConfig::from_file(path), doctest::Contains("malformed"), Error);
  const auto good = testutil::write_file(dir.path(), "good.json", obj.dump());
  const ProviderConfig cfg = ProviderConfig::from_file(good);
  CHECK(cfg.temperature == 0.0);
  CHECK(cfg.max_retries == 3);
}

TEST_CASE("mock completions are deterministic functions of the prompt") {
  const ProviderConfig cfg = mock_provider();
  MockTransport transport;
  const RenderedPrompt prompt = make_prompt("qa-1", "How did sales trend?");
  const GenerationRecord a = complete(cfg, transport, prompt, "kg-x");
  const GenerationRecord b = complete(cfg, transport, prompt, "kg-x");
  CHECK(a.answer == b.answer);
  CHECK(a.answer.find(prompt.content_hash.substr(0, 8)) != std::string::npos);
  CHECK(a.answer.find("How did sales trend?") != std::string::npos);
  CHECK(a.qa_id == "qa-1");
  CHECK(a.kg_name == "kg-x");
  CHECK(a.model == "mock-small");
  CHECK(a.retry_count == 0);
  CHECK(a.prompt_hash == prompt.content_hash);
}

TEST_CASE("transient failures retry with the count recorded") {
  const ProviderConfig cfg = mock_provider();
  ScriptedTransport transport({{429, "", ""}, {429, "", ""}, ok_reply("fine")});
  const GenerationRecord rec = complete(cfg, transport, make_prompt("qa-1", "q?"));
  CHECK(rec.answer == "fine");
  CHECK(rec.retry_count == 2);
}

TEST_CASE("timeouts and 5xx retry until exhaustion") {
  ProviderConfig cfg = mock_provider();
  cfg.max_retries = 2;
  ScriptedTransport transport({{0, "", "timeout"}, {503, "", ""}, {503, "", ""}, {503, "", ""}});
  CHECK_THROWS_WITH_AS(complete(cfg, transport, make_prompt("qa-1", "q?")),
                       doctest::Contains("retries exhausted"), Error);
  CHECK(transport.calls() == 3);  // max_retries + 1 attempts
}

TEST_CASE("auth failures and malformed responses do not retry") {
  const ProviderConfig cfg = mock_provider();
  ScriptedTransport auth({{401, "", ""}, ok_reply("never")});
  CHECK_THROWS_WITH_AS(complete(cfg, auth, make_prompt("qa-1", "q?")),
                       doctest::Contains("authentication"), Error);
  CHECK(auth.calls() == 1);

  ScriptedTransport malformed({{200, "{\"unexpected\": 1}", ""}, ok_reply("never")});
  CHECK_THROWS_WITH_AS(complete(cfg, malformed, make_prompt("qa-1", "q?")),
                       doctest::Contains("malformed"), Error);
  CHECK(malformed.calls() == 1);
}

TEST_CASE("missing api key env var is reported by name") {
  ProviderConfig cfg;
  cfg.base_url = "https://example.invalid/v1";
  cfg.model = "m";
  cfg.api_key_env = "FINQA_TEST_KEY_THAT_DOES_NOT_EXIST";
  CHECK_THROWS_WITH_AS(make_transport(cfg),
                       doctest::Contains("FINQA_TEST_KEY_THAT_DOES_NOT_EXIST"), Error);
}

TEST_CASE("run_batch preserves input order under concurrency") {
  const ProviderConfig cfg = mock_provider();
  MockTransport transport;
  std::vector<RenderedPrompt> prompts;
  for (int i = 0; i < 10; ++i)
    prompts.push_back(make_prompt("qa-" + std::to_string(i), "question " + std::to_string(i)));
  const auto records = run_batch(cfg, transport, prompts);
  REQUIRE(records.size() == 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(records[static_cast<std::size_t>(i)].qa_id == "qa-" + std::to_string(i));
    CHECK(records[static_cast<std::size_t>(i)].ok());
  }
  // byte-identical on a second run, timestamps aside
  const auto again = run_batch(cfg, transport, prompts);
  for (std::size_t i = 0; i < records.size(); ++i) CHECK(records[i].answer == again[i].answer);

  CHECK(run_batch(cfg, transport, {}).empty());
}

namespace {

// fails any prompt whose text carries the marker; otherwise behaves as mock
class FailingTransport : public ChatTransport {
 public:
  explicit FailingTransport(std::string marker) : marker_(std::move(marker)) {}
  TransportReply send(const std::string& request_body) override {
    if (request_body.find(marker_) != std::string::npos) return TransportReply{400, "", ""};
    return mock_.send(request_body);
  }

 private:
  std::string marker_;
  MockTransport mock_;
};

}  // namespace

TEST_CASE("a permanently failing item never aborts the batch") {
  ProviderConfig cfg = mock_provider();
  cfg.max_retries = 0;
  FailingTransport transport("POISON");
  std::vector<RenderedPrompt> prompts;
  for (int i = 0; i < 10; ++i) {
    const std::string q = i == 4 ? "POISON question" : "question " + std::to_string(i);
    prompts.push_back(make_prompt("qa-" + std::to_string(i), q));
  }
  const auto records = run_batch(cfg, transport, prompts);
  REQUIRE(records.size() == 10);
  int failures = 0;
  for (const auto& rec : records) {
    if (!rec.ok()) ++failures;
  }
  CHECK(failures == 1);
  CHECK(!records[4].ok());
  CHECK(records[4].qa_id == "qa-4");
  CHECK(!records[4].error.empty());
}

TEST_CASE("answers are stored verbatim except for trailing whitespace") {
  const ProviderConfig cfg = mock_provider();
  ScriptedTransport transport({ok_reply("  Lead space stays.\nLine two.  \n\t\n")});
  const GenerationRecord rec = complete(cfg, transport, make_prompt("qa-1", "q?"));
  CHECK(rec.answer == "  Lead space stays.\nLine two.");
}

TEST_CASE("generation records round-trip through JSON") {
  const ProviderConfig cfg = mock_provider();
  MockTransport transport;
  const GenerationRecord rec = complete(cfg, transport, make_prompt("qa-1", "q?"), "kg-a");
  const GenerationRecord back = GenerationRecord::from_json(rec.to_json());
  CHECK(back.qa_id == rec.qa_id);
  CHECK(back.config == rec.config);
  CHECK(back.kg_name == rec.kg_name);
  CHECK(back.answer == rec.answer);
  CHECK(back.prompt_hash == rec.prompt_hash);
  CHECK(back.usage.has_value() == rec.usage.has_value());
}

TEST_CASE("judge prompt embeds question and answer in the rating template") {
  const std::string prompt = render_judge_prompt("Why did margin fall?", "Because of mix.");
  CHECK(prompt.find("Question Asked: Why did margin fall?") != std::string::npos);
  CHECK(prompt.find("Answer Provided: Because of mix.") != std::string::npos);
  CHECK(prompt.rfind("Task: Evaluate an answer to the question", 0) == 0);
  CHECK(prompt.find("Concreteness (1-10)") != std::string::npos);
  CHECK(prompt.find("Information Richness (1-10)") != std::string::npos);
  CHECK(prompt.find("Relevance and Accuracy (1-10)") != std::string::npos);
}

TEST_CASE("judge reply fixtures parse to the expected triples") {
  const auto rows = read_jsonl(std::string(FINQA_FIXTURE_DIR) + "/judge_replies.jsonl");
  REQUIRE(rows.size() >= 12);
  for (const auto& row : rows) {
    INFO("fixture: ", row.at("name").get<std::string>());
    const JudgeScores scores = parse_judge_reply(row.at("reply").get<std::string>());
    const auto expect = [&](const char* key, const std::optional<int>& got) {
      if (row.at(key).is_null()) {
        CHECK(!got.has_value());
      } else {
        REQUIRE(got.has_value());
        CHECK(*got == row.at(key).get<int>());
      }
    };
    expect("con", scores.concreteness);
    expect("info", scores.info_richness);
    expect("rel", scores.relevance_accuracy);
    CHECK(scores.parse_failed() == !row.at("ok").get<bool>());
    CHECK(scores.raw_response == row.at("reply").get<std::string>());
  }
}

TEST_CASE("judge parsing survives arbitrary bytes") {
  std::mt19937 rng(55);
  std::uniform_int_distribution<int> len(0, 120);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int it = 0; it < 10000; ++it) {
    std::string garbage;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) garbage.push_back(static_cast<char>(byte(rng)));
    const JudgeScores scores = parse_judge_reply(garbage);
    CHECK(scores.raw_response == garbage);
    if (scores.concreteness) CHECK((*scores.concreteness >= 0 && *scores.concreteness <= 10));
  }
}

TEST_CASE("the mock provider answers judge prompts with parseable ratings") {
  const ProviderConfig cfg = mock_provider();
  MockTransport transport;
  const JudgeScores scores = judge(cfg, transport, "How is margin?", "Margin expanded 50bps.");
  CHECK(!scores.parse_failed());
  const JudgeScores again = judge(cfg, transport, "How is margin?", "Margin expanded 50bps.");
  CHECK(scores.concreteness == again.concreteness);
  CHECK(scores.info_richness == again.info_richness);
  CHECK(scores.relevance_accuracy == again.relevance_accuracy);
}
