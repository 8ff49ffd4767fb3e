#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace spvr {

// Connection and sampling settings for a chat completion model.
struct ModelConfig {
  std::string endpoint_url = "mock";  // "mock" or an http(s):// base URL
  std::string model_name = "gpt-4-turbo";
  int samples_per_prompt = 3;  // completions requested per prompt
  double temperature = 0.5;
  std::optional<int> top_k = 50;
  std::optional<double> top_p = 0.95;
  int max_retries = 3;
  double timeout_seconds = 60.0;
  std::string api_key_env = "SPVR_API_KEY";
  int backoff_base_ms = 250;  // doubled per retry; tests shrink it

  // Throws ConfigError on out-of-range values.
  void validate() const;
};

// One model completion, as returned by the gateway.
struct CompletionRecord {
  std::string sample_id;
  int ordinal = 1;  // prompt bundle ordinal within the sample
  int attempt = 1;  // 1-based sample index for this prompt
  std::string raw_text;
  long latency_ms = 0;
  bool cached = false;
};

// Anything that can answer a chat prompt. Implementations must be safe to
// call from several threads at once.
class ChatEndpoint {
 public:
  virtual ~ChatEndpoint() = default;

  // Returns the model reply for `prompt`. `attempt` is 1-based and lets
  // scripted endpoints vary their replies across samples of one prompt.
  virtual std::string complete(const std::string& prompt, int attempt) = 0;
};

// A scripted offline endpoint: an ordered list of (regex, replies) rules.
// The first rule whose pattern matches anywhere in the prompt answers with
// replies[(attempt - 1) % replies.size()]; a prompt no rule matches throws
// UnmatchedPrompt. Stateless between calls, so runs are reproducible no
// matter how work is scheduled.
class MockEndpoint : public ChatEndpoint {
 public:
  struct Rule {
    std::string pattern;
    std::vector<std::string> replies;
  };

  explicit MockEndpoint(std::vector<Rule> rules);
  ~MockEndpoint() override;

  // Loads rules from a JSON script: {"rules": [{"pattern", "replies": [..]}]}.
  static std::shared_ptr<MockEndpoint> from_json(const std::string& json_text);

  std::string complete(const std::string& prompt, int attempt) override;

  // Number of complete() calls served so far (for cache tests).
  long calls() const noexcept;

 private:
  struct CompiledRule;
  std::vector<CompiledRule> rules_;
  mutable std::atomic<long> calls_{0};
};

// An OpenAI-style chat completions endpoint over HTTP. Reads the API key
// from the environment variable named in the config; missing key or 401/403
// raise AuthError, transport errors and 408/429/5xx raise retryable
// EndpointError.
class HttpEndpoint : public ChatEndpoint {
 public:
  explicit HttpEndpoint(const ModelConfig& config);
  std::string complete(const std::string& prompt, int attempt) override;

 private:
  ModelConfig config_;
  std::string api_key_;
};

// A unit of gateway work: one prompt to sample `samples_per_prompt` times.
struct PromptJob {
  std::string sample_id;
  int ordinal = 1;
  std::string prompt;
};

// Drives an endpoint with retries, a content-addressed disk cache, and a
// bounded worker pool. Completions are cached per (model, prompt, attempt),
// so re-running a corpus hits the network zero times.
class Gateway {
 public:
  // `cache_dir` empty disables caching. The directory is created on demand.
  Gateway(ModelConfig config, std::shared_ptr<ChatEndpoint> endpoint,
          std::filesystem::path cache_dir);

  // All samples for one prompt, attempts 1..samples_per_prompt, in order.
  // Retries retryable endpoint errors max_retries times with exponential
  // backoff; AuthError is never retried.
  std::vector<CompletionRecord> complete(const std::string& sample_id,
                                         int ordinal, const std::string& prompt);

  // Runs all jobs on at most `concurrency` worker threads; the result keeps
  // job order (flattened, attempts innermost) regardless of scheduling.
  std::vector<std::vector<CompletionRecord>> run_batch(
      const std::vector<PromptJob>& jobs, int concurrency);

  const ModelConfig& config() const noexcept { return config_; }

 private:
  std::optional<CompletionRecord> cache_lookup(const std::string& sample_id,
                                               int ordinal,
                                               const std::string& prompt,
                                               int attempt) const;
  void cache_store(const CompletionRecord& record,
                   const std::string& prompt) const;
  std::filesystem::path cache_path(const std::string& prompt,
                                   int attempt) const;

  ModelConfig config_;
  std::shared_ptr<ChatEndpoint> endpoint_;
  std::filesystem::path cache_dir_;
};

// Builds the endpoint a config calls for: the mock (with the given script
// JSON, or an empty catch-all script) for "mock", otherwise HTTP.
std::shared_ptr<ChatEndpoint> make_endpoint(
    const ModelConfig& config, const std::optional<std::string>& mock_script_json);

// 128-bit FNV-1a of `bytes`, as 32 hex characters. Exposed for cache tests.
std::string fnv1a_128_hex(const std::string& bytes);

}  // namespace spvr
