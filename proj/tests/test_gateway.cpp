#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "spvr/errors.hpp"
#include "spvr/gateway.hpp"
#include "temp_dir.hpp"

using namespace spvr;

namespace {

ModelConfig quick_config() {
  ModelConfig config;
  config.endpoint_url = "mock";
  config.model_name = "test-model";
  config.samples_per_prompt = 2;
  config.max_retries = 3;
  config.backoff_base_ms = 0;
  return config;
}

std::shared_ptr<MockEndpoint> echo_mock() {
  return std::make_shared<MockEndpoint>(std::vector<MockEndpoint::Rule>{
      {"alpha", {"first rule"}},
      {".*", {"reply one", "reply two"}},
  });
}

// Fails `failures` times with a scripted EndpointError, then succeeds.
class FlakyEndpoint : public ChatEndpoint {
 public:
  FlakyEndpoint(int failures, bool retryable)
      : remaining_(failures), retryable_(retryable) {}

  std::string complete(const std::string&, int attempt) override {
    calls_.fetch_add(1);
    if (remaining_ > 0) {
      --remaining_;
      throw EndpointError("scripted failure", retryable_);
    }
    return "ok " + std::to_string(attempt);
  }

  long calls() const { return calls_.load(); }

 private:
  std::atomic<long> calls_{0};
  int remaining_;
  bool retryable_;
};

class AlwaysAuthError : public ChatEndpoint {
 public:
  std::string complete(const std::string&, int) override {
    calls_.fetch_add(1);
    throw AuthError("scripted auth failure");
  }
  long calls() const { return calls_.load(); }

 private:
  std::atomic<long> calls_{0};
};

}  // namespace

TEST_CASE("fnv1a_128_hex matches frozen reference digests") {
  // Reference values computed independently from the 128-bit FNV-1a
  // parameters (offset basis 0x6C62272E07BB014262B821756295C58D,
  // prime 2^88 + 0x13B).
  CHECK(fnv1a_128_hex("") == "6c62272e07bb014262b821756295c58d");
  CHECK(fnv1a_128_hex("a") == "d228cb696f1a8caf78912b704e4a8964");
  CHECK(fnv1a_128_hex("hello world") == "6c155799fdc8eec4b91523808e7726b7");
  CHECK(fnv1a_128_hex("x") == fnv1a_128_hex("x"));
  CHECK(fnv1a_128_hex("x") != fnv1a_128_hex("y"));
  std::string digest = fnv1a_128_hex("anything");
  CHECK(digest.size() == 32);
  for (char c : digest) {
    CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
  }
}

TEST_CASE("MockEndpoint picks the first matching rule and cycles replies") {
  auto mock = echo_mock();
  CHECK(mock->complete("has alpha inside", 1) == "first rule");
  CHECK(mock->complete("something else", 1) == "reply one");
  CHECK(mock->complete("something else", 2) == "reply two");
  CHECK(mock->complete("something else", 3) == "reply one");
  CHECK(mock->calls() == 4);
}

TEST_CASE("MockEndpoint rejects unmatched prompts with a quoted prefix") {
  MockEndpoint mock(std::vector<MockEndpoint::Rule>{{"^never$", {"x"}}});
  try {
    mock.complete("the daily special", 1);
    FAIL("expected UnmatchedPrompt");
  } catch (const UnmatchedPrompt& e) {
    CHECK(std::string(e.what()).find("the daily special") != std::string::npos);
  }
}

TEST_CASE("MockEndpoint validates its script") {
  CHECK_THROWS_AS(MockEndpoint(std::vector<MockEndpoint::Rule>{{"p", {}}}),
                  ConfigError);
  CHECK_THROWS_AS(MockEndpoint(std::vector<MockEndpoint::Rule>{{"(", {"x"}}}),
                  ConfigError);
  CHECK_THROWS_AS(MockEndpoint::from_json("not json"), ConfigError);
  auto ok = MockEndpoint::from_json(
      R"({"rules": [{"pattern": "a", "replies": ["b"]}]})");
  CHECK(ok->complete("a", 1) == "b");
}

TEST_CASE("Gateway serves repeat prompts from the disk cache") {
  testutil::TempDir cache("gwcache");
  auto mock = echo_mock();
  Gateway gateway(quick_config(), mock, cache.path());

  std::vector<CompletionRecord> first = gateway.complete("s1", 1, "fix this");
  REQUIRE(first.size() == 2);
  CHECK(first[0].attempt == 1);
  CHECK(first[1].attempt == 2);
  CHECK(first[0].raw_text == "reply one");
  CHECK(first[1].raw_text == "reply two");
  CHECK_FALSE(first[0].cached);
  CHECK_FALSE(first[1].cached);
  CHECK(mock->calls() == 2);

  std::vector<CompletionRecord> second = gateway.complete("s1", 1, "fix this");
  REQUIRE(second.size() == 2);
  CHECK(second[0].cached);
  CHECK(second[1].cached);
  CHECK(second[0].raw_text == "reply one");
  CHECK(second[1].raw_text == "reply two");
  CHECK(mock->calls() == 2);  // nothing reached the endpoint

  // A different model keys differently, so it is a miss.
  ModelConfig other = quick_config();
  other.model_name = "other-model";
  Gateway other_gateway(other, mock, cache.path());
  std::vector<CompletionRecord> third = other_gateway.complete("s1", 1,
                                                               "fix this");
  CHECK_FALSE(third[0].cached);
  CHECK(mock->calls() == 4);
}

TEST_CASE("Gateway treats a torn cache file as a miss") {
  testutil::TempDir cache("gwtorn");
  auto mock = echo_mock();
  ModelConfig config = quick_config();
  Gateway gateway(config, mock, cache.path());
  gateway.complete("s1", 1, "fix this");
  CHECK(mock->calls() == 2);

  // The on-disk layout keys each completion by
  // fnv1a_128_hex(model \x1f prompt \x1f attempt).json.
  std::string key = config.model_name;
  key += '\x1f';
  key += "fix this";
  key += '\x1f';
  key += '1';
  std::filesystem::path entry = cache.path() / (fnv1a_128_hex(key) + ".json");
  REQUIRE(std::filesystem::exists(entry));
  {
    std::ofstream out(entry, std::ios::trunc);
    out << "{ torn";
  }

  std::vector<CompletionRecord> again = gateway.complete("s1", 1, "fix this");
  CHECK_FALSE(again[0].cached);  // re-fetched
  CHECK(again[1].cached);        // attempt 2 still intact
  CHECK(mock->calls() == 3);
}

TEST_CASE("Gateway without a cache directory always asks the endpoint") {
  auto mock = echo_mock();
  Gateway gateway(quick_config(), mock, "");
  gateway.complete("s1", 1, "fix this");
  gateway.complete("s1", 1, "fix this");
  CHECK(mock->calls() == 4);
}

TEST_CASE("Gateway retries retryable failures with bounded attempts") {
  ModelConfig config = quick_config();
  config.samples_per_prompt = 1;

  SUBCASE("eventual success") {
    auto flaky = std::make_shared<FlakyEndpoint>(2, /*retryable=*/true);
    Gateway gateway(config, flaky, "");
    std::vector<CompletionRecord> records = gateway.complete("s", 1, "p");
    REQUIRE(records.size() == 1);
    CHECK(records[0].raw_text == "ok 1");
    CHECK(flaky->calls() == 3);
  }
  SUBCASE("retries exhausted") {
    config.max_retries = 2;
    auto flaky = std::make_shared<FlakyEndpoint>(10, /*retryable=*/true);
    Gateway gateway(config, flaky, "");
    CHECK_THROWS_AS(gateway.complete("s", 1, "p"), EndpointError);
    CHECK(flaky->calls() == 3);  // first try + 2 retries
  }
  SUBCASE("non-retryable failures surface immediately") {
    auto flaky = std::make_shared<FlakyEndpoint>(10, /*retryable=*/false);
    Gateway gateway(config, flaky, "");
    CHECK_THROWS_AS(gateway.complete("s", 1, "p"), EndpointError);
    CHECK(flaky->calls() == 1);
  }
  SUBCASE("auth errors are never retried") {
    auto auth = std::make_shared<AlwaysAuthError>();
    Gateway gateway(config, auth, "");
    CHECK_THROWS_AS(gateway.complete("s", 1, "p"), AuthError);
    CHECK(auth->calls() == 1);
  }
}

TEST_CASE("run_batch keeps job order under concurrency") {
  std::vector<MockEndpoint::Rule> rules;
  std::vector<PromptJob> jobs;
  for (int i = 0; i < 20; ++i) {
    std::string tag = "job-" + std::to_string(i) + "-end";
    rules.push_back({tag,
                     {"reply-" + std::to_string(i) + "-a",
                      "reply-" + std::to_string(i) + "-b"}});
    jobs.push_back({"sample-" + std::to_string(i), 1, "prompt " + tag});
  }
  auto mock = std::make_shared<MockEndpoint>(rules);
  Gateway gateway(quick_config(), mock, "");

  std::vector<std::vector<CompletionRecord>> results =
      gateway.run_batch(jobs, 4);
  REQUIRE(results.size() == jobs.size());
  for (int i = 0; i < 20; ++i) {
    REQUIRE(results[static_cast<std::size_t>(i)].size() == 2);
    const auto& pair = results[static_cast<std::size_t>(i)];
    CHECK(pair[0].sample_id == "sample-" + std::to_string(i));
    CHECK(pair[0].raw_text == "reply-" + std::to_string(i) + "-a");
    CHECK(pair[1].raw_text == "reply-" + std::to_string(i) + "-b");
  }

  // The inline single-worker path produces the same result.
  std::vector<std::vector<CompletionRecord>> inline_results =
      gateway.run_batch(jobs, 1);
  REQUIRE(inline_results.size() == results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    CHECK(inline_results[i][0].raw_text == results[i][0].raw_text);
    CHECK(inline_results[i][1].raw_text == results[i][1].raw_text);
  }
}

TEST_CASE("run_batch propagates a worker failure") {
  auto mock = std::make_shared<MockEndpoint>(
      std::vector<MockEndpoint::Rule>{{"good", {"fine"}}});
  Gateway gateway(quick_config(), mock, "");
  std::vector<PromptJob> jobs;
  for (int i = 0; i < 8; ++i) jobs.push_back({"s", 1, "good"});
  jobs.push_back({"s", 1, "this matches nothing"});
  CHECK_THROWS_AS(gateway.run_batch(jobs, 4), UnmatchedPrompt);
}

TEST_CASE("ModelConfig::validate rejects out-of-range values") {
  CHECK_NOTHROW(ModelConfig{}.validate());

  auto expect_reject = [](auto mutate) {
    ModelConfig config;
    mutate(config);
    CHECK_THROWS_AS(config.validate(), ConfigError);
  };
  expect_reject([](ModelConfig& c) { c.endpoint_url = ""; });
  expect_reject([](ModelConfig& c) { c.model_name = ""; });
  expect_reject([](ModelConfig& c) { c.samples_per_prompt = 0; });
  expect_reject([](ModelConfig& c) { c.temperature = -0.1; });
  expect_reject([](ModelConfig& c) { c.temperature = 2.1; });
  expect_reject([](ModelConfig& c) { c.top_k = 0; });
  expect_reject([](ModelConfig& c) { c.top_p = 0.0; });
  expect_reject([](ModelConfig& c) { c.top_p = 1.5; });
  expect_reject([](ModelConfig& c) { c.max_retries = -1; });
  expect_reject([](ModelConfig& c) { c.timeout_seconds = 0.0; });
  expect_reject([](ModelConfig& c) { c.backoff_base_ms = -1; });
}

TEST_CASE("make_endpoint chooses by endpoint_url") {
  ModelConfig config = quick_config();
  auto scripted = make_endpoint(
      config, std::string(R"({"rules": [{"pattern": ".", "replies": ["r"]}]})"));
  CHECK(scripted->complete("x", 1) == "r");

  auto empty_script = make_endpoint(config, std::nullopt);
  CHECK_THROWS_AS(empty_script->complete("x", 1), UnmatchedPrompt);

  ModelConfig http = quick_config();
  http.endpoint_url = "http://127.0.0.1:1/v1/chat/completions";
  http.api_key_env = "SPVR_TEST_KEY_THAT_IS_NOT_SET";
  CHECK_THROWS_AS(make_endpoint(http, std::nullopt), AuthError);
}

TEST_CASE("HttpEndpoint reports transport failures as retryable") {
  ::setenv("SPVR_TEST_KEY", "not-a-real-key", 1);
  ModelConfig config = quick_config();
  // Port 1 on loopback refuses connections immediately.
  config.endpoint_url = "http://127.0.0.1:1/v1/chat/completions";
  config.api_key_env = "SPVR_TEST_KEY";
  config.timeout_seconds = 2.0;
  HttpEndpoint endpoint(config);
  try {
    endpoint.complete("hello", 1);
    FAIL("expected EndpointError");
  } catch (const EndpointError& e) {
    CHECK(e.retryable());
  }
}
