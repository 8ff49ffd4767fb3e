#include "spvr/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "spvr/errors.hpp"

namespace spvr {

namespace {

constexpr char kKeySeparator = '\x1f';

long elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

void ModelConfig::validate() const {
  if (endpoint_url.empty()) throw ConfigError("endpoint_url must not be empty");
  if (model_name.empty()) throw ConfigError("model_name must not be empty");
  if (samples_per_prompt < 1) {
    throw ConfigError("samples_per_prompt must be at least 1");
  }
  if (temperature < 0.0 || temperature > 2.0) {
    throw ConfigError("temperature must be in [0, 2]");
  }
  if (top_k.has_value() && *top_k < 1) {
    throw ConfigError("top_k must be at least 1 when set");
  }
  if (top_p.has_value() && (*top_p <= 0.0 || *top_p > 1.0)) {
    throw ConfigError("top_p must be in (0, 1] when set");
  }
  if (max_retries < 0) throw ConfigError("max_retries must not be negative");
  if (timeout_seconds <= 0.0) {
    throw ConfigError("timeout_seconds must be positive");
  }
  if (backoff_base_ms < 0) {
    throw ConfigError("backoff_base_ms must not be negative");
  }
}

// --- MockEndpoint ---------------------------------------------------------------

struct MockEndpoint::CompiledRule {
  std::regex pattern;
  std::string pattern_text;
  std::vector<std::string> replies;
};

MockEndpoint::~MockEndpoint() = default;

MockEndpoint::MockEndpoint(std::vector<Rule> rules) {
  for (Rule& rule : rules) {
    if (rule.replies.empty()) {
      throw ConfigError("mock rule for pattern '" + rule.pattern +
                        "' has no replies");
    }
    CompiledRule compiled;
    try {
      compiled.pattern = std::regex(rule.pattern);
    } catch (const std::regex_error& e) {
      throw ConfigError("bad mock rule pattern '" + rule.pattern +
                        "': " + e.what());
    }
    compiled.pattern_text = rule.pattern;
    compiled.replies = std::move(rule.replies);
    rules_.push_back(std::move(compiled));
  }
}

std::shared_ptr<MockEndpoint> MockEndpoint::from_json(
    const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("mock script is not valid JSON: ") + e.what());
  }
  std::vector<Rule> rules;
  for (const auto& entry : doc.value("rules", nlohmann::json::array())) {
    Rule rule;
    rule.pattern = entry.at("pattern").get<std::string>();
    for (const auto& reply : entry.at("replies")) {
      rule.replies.push_back(reply.get<std::string>());
    }
    rules.push_back(std::move(rule));
  }
  return std::make_shared<MockEndpoint>(std::move(rules));
}

std::string MockEndpoint::complete(const std::string& prompt, int attempt) {
  calls_.fetch_add(1, std::memory_order_relaxed);
  for (const CompiledRule& rule : rules_) {
    if (std::regex_search(prompt, rule.pattern)) {
      std::size_t index = static_cast<std::size_t>(
          (attempt - 1) % static_cast<int>(rule.replies.size()));
      return rule.replies[index];
    }
  }
  throw UnmatchedPrompt("no mock rule matches the prompt (first 80 chars: " +
                        prompt.substr(0, 80) + ")");
}

long MockEndpoint::calls() const noexcept {
  return calls_.load(std::memory_order_relaxed);
}

// --- HttpEndpoint ---------------------------------------------------------------

HttpEndpoint::HttpEndpoint(const ModelConfig& config) : config_(config) {
  const char* key = std::getenv(config.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw AuthError("environment variable " + config.api_key_env +
                    " is not set");
  }
  api_key_ = key;
}

std::string HttpEndpoint::complete(const std::string& prompt, int /*attempt*/) {
  // Split the configured URL into host base and request path.
  std::string url = config_.endpoint_url;
  std::string base = url;
  std::string path = "/v1/chat/completions";
  std::size_t scheme = url.find("://");
  if (scheme != std::string::npos) {
    std::size_t slash = url.find('/', scheme + 3);
    if (slash != std::string::npos) {
      base = url.substr(0, slash);
      if (slash + 1 < url.size()) path = url.substr(slash);
    }
  }

  nlohmann::json body = {
      {"model", config_.model_name},
      {"messages",
       nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", config_.temperature},
      {"n", 1},
  };
  if (config_.top_p.has_value()) body["top_p"] = *config_.top_p;
  if (config_.top_k.has_value()) body["top_k"] = *config_.top_k;

  httplib::Client client(base);
  client.set_connection_timeout(std::chrono::milliseconds(
      static_cast<long>(config_.timeout_seconds * 1000)));
  client.set_read_timeout(std::chrono::milliseconds(
      static_cast<long>(config_.timeout_seconds * 1000)));
  httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};

  httplib::Result res = client.Post(path, headers, body.dump(),
                                    "application/json");
  if (!res) {
    throw EndpointError("transport failure talking to " + base + ": " +
                            httplib::to_string(res.error()),
                        /*retryable=*/true);
  }
  if (res->status == 401 || res->status == 403) {
    throw AuthError("endpoint rejected the API key (HTTP " +
                    std::to_string(res->status) + ")");
  }
  if (res->status == 408 || res->status == 429 || res->status >= 500) {
    throw EndpointError("endpoint returned HTTP " + std::to_string(res->status),
                        /*retryable=*/true);
  }
  if (res->status != 200) {
    throw EndpointError("endpoint returned HTTP " + std::to_string(res->status),
                        /*retryable=*/false);
  }

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw EndpointError(std::string("endpoint reply is not JSON: ") + e.what(),
                        /*retryable=*/false);
  }
  try {
    return reply.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw EndpointError(std::string("endpoint reply missing fields: ") +
                            e.what(),
                        /*retryable=*/false);
  }
}

// --- cache hashing --------------------------------------------------------------

std::string fnv1a_128_hex(const std::string& bytes) {
  // FNV-1a with 128-bit offset basis and prime, done in native 128-bit math.
  using u128 = unsigned __int128;
  const u128 offset_basis =
      (static_cast<u128>(0x6C62272E07BB0142ULL) << 64) | 0x62B821756295C58DULL;
  const u128 prime = (static_cast<u128>(1) << 88) | 0x13BULL;
  u128 hash = offset_basis;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= prime;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(32, '0');
  for (int i = 31; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[static_cast<unsigned>(hash & 0xF)];
    hash >>= 4;
  }
  return out;
}

// --- Gateway --------------------------------------------------------------------

Gateway::Gateway(ModelConfig config, std::shared_ptr<ChatEndpoint> endpoint,
                 std::filesystem::path cache_dir)
    : config_(std::move(config)),
      endpoint_(std::move(endpoint)),
      cache_dir_(std::move(cache_dir)) {
  config_.validate();
  if (endpoint_ == nullptr) throw ConfigError("gateway needs an endpoint");
}

std::filesystem::path Gateway::cache_path(const std::string& prompt,
                                          int attempt) const {
  std::string key = config_.model_name;
  key += kKeySeparator;
  key += prompt;
  key += kKeySeparator;
  key += std::to_string(attempt);
  return cache_dir_ / (fnv1a_128_hex(key) + ".json");
}

std::optional<CompletionRecord> Gateway::cache_lookup(
    const std::string& sample_id, int ordinal, const std::string& prompt,
    int attempt) const {
  if (cache_dir_.empty()) return std::nullopt;
  std::filesystem::path path = cache_path(prompt, attempt);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error&) {
    return std::nullopt;  // treat a torn cache file as a miss
  }
  if (doc.value("model", "") != config_.model_name ||
      doc.value("prompt", "") != prompt || doc.value("attempt", -1) != attempt) {
    return std::nullopt;  // hash collision or stale layout
  }
  CompletionRecord record;
  record.sample_id = sample_id;
  record.ordinal = ordinal;
  record.attempt = attempt;
  record.raw_text = doc.value("reply", "");
  record.latency_ms = doc.value("latency_ms", 0L);
  record.cached = true;
  return record;
}

void Gateway::cache_store(const CompletionRecord& record,
                          const std::string& prompt) const {
  if (cache_dir_.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(cache_dir_, ec);
  nlohmann::json doc = {
      {"model", config_.model_name},
      {"attempt", record.attempt},
      {"prompt", prompt},
      {"reply", record.raw_text},
      {"latency_ms", record.latency_ms},
  };
  std::filesystem::path final_path = cache_path(prompt, record.attempt);
  // Write-then-rename keeps readers from ever seeing a torn file.
  std::filesystem::path tmp_path = final_path;
  tmp_path += ".tmp" + std::to_string(
                           std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp_path, std::ios::trunc);
    if (!out) return;
    out << doc.dump(2) << '\n';
  }
  std::filesystem::rename(tmp_path, final_path, ec);
  if (ec) std::filesystem::remove(tmp_path, ec);
}

std::vector<CompletionRecord> Gateway::complete(const std::string& sample_id,
                                                int ordinal,
                                                const std::string& prompt) {
  std::vector<CompletionRecord> records;
  for (int attempt = 1; attempt <= config_.samples_per_prompt; ++attempt) {
    if (auto hit = cache_lookup(sample_id, ordinal, prompt, attempt)) {
      records.push_back(*std::move(hit));
      continue;
    }
    int tries = 0;
    for (;;) {
      auto start = std::chrono::steady_clock::now();
      try {
        std::string reply = endpoint_->complete(prompt, attempt);
        CompletionRecord record;
        record.sample_id = sample_id;
        record.ordinal = ordinal;
        record.attempt = attempt;
        record.raw_text = std::move(reply);
        record.latency_ms = elapsed_ms(start);
        record.cached = false;
        cache_store(record, prompt);
        records.push_back(std::move(record));
        break;
      } catch (const AuthError&) {
        throw;  // a bad key never fixes itself
      } catch (const EndpointError& e) {
        if (!e.retryable() || tries >= config_.max_retries) throw;
        long delay = static_cast<long>(config_.backoff_base_ms) << tries;
        ++tries;
        if (delay > 0) {
          std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
      }
    }
  }
  return records;
}

std::vector<std::vector<CompletionRecord>> Gateway::run_batch(
    const std::vector<PromptJob>& jobs, int concurrency) {
  if (concurrency < 1) {
    concurrency = static_cast<int>(std::thread::hardware_concurrency());
    if (concurrency < 1) concurrency = 1;
  }
  concurrency = std::min<int>(concurrency, static_cast<int>(jobs.size()));
  std::vector<std::vector<CompletionRecord>> results(jobs.size());
  if (jobs.empty()) return results;

  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;

  auto worker = [&]() {
    for (;;) {
      std::size_t index = next.fetch_add(1);
      if (index >= jobs.size()) return;
      {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (failure != nullptr) return;  // stop picking up new work
      }
      const PromptJob& job = jobs[index];
      try {
        results[index] = complete(job.sample_id, job.ordinal, job.prompt);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (failure == nullptr) failure = std::current_exception();
        return;
      }
    }
  };

  if (concurrency == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(concurrency));
    for (int i = 0; i < concurrency; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure != nullptr) std::rethrow_exception(failure);
  return results;
}

std::shared_ptr<ChatEndpoint> make_endpoint(
    const ModelConfig& config,
    const std::optional<std::string>& mock_script_json) {
  if (config.endpoint_url == "mock") {
    if (mock_script_json.has_value()) {
      return MockEndpoint::from_json(*mock_script_json);
    }
    return MockEndpoint::from_json(R"({"rules": []})");
  }
  return std::make_shared<HttpEndpoint>(config);
}

}  // namespace spvr
