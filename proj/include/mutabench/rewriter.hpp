#pragma once

// Rewriter backends: something that, given a function's source, returns a
// candidate rewrite of it. Callers only see RewriteResponse.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mutabench/rulemut.hpp"

namespace mutabench::rewriter {

inline constexpr const char* kDefaultInstruction =
    "Rewrite the following function so it behaves identically but is written differently. Return only code.";

struct SamplingParams {
    double temperature = 0.8;
    double top_p = 0.95;
    int max_tokens = 512;
    std::optional<std::uint64_t> seed;

    // Throws Error(Usage) when a field is out of range.
    void validate() const;
};

struct RewriteRequest {
    std::string task_id;
    std::string source;
    std::string instruction = kDefaultInstruction;
    SamplingParams params;
    int sample_index = 0;
};

struct RewriteResponse {
    std::string raw_text;
    std::optional<std::string> extracted_source;
    std::int64_t latency_ms = 0;
    std::string backend_id;
};

// First fenced code block, else the first top-level function definition
// that parses, else nothing.
std::optional<std::string> extract_code(std::string_view raw_text);

class Backend {
public:
    virtual ~Backend() = default;
    virtual RewriteResponse rewrite(const RewriteRequest& request) = 0;
    virtual std::string id() const = 0;
    // Same request, same response.
    virtual bool deterministic() const = 0;
};

// Replies looked up by (task_id, sample_index); unscripted requests are
// echoed back unchanged.
class MockBackend : public Backend {
public:
    struct Entry {
        std::string task_id;
        int sample_index = 0;
        std::string reply;
    };

    explicit MockBackend(std::vector<Entry> script = {}, std::string id = "mock");

    // JSONL of {task_id, sample_index, reply}. Throws Error(FileNotFound) or MalformedRecord.
    static std::vector<Entry> load_script(const std::filesystem::path& path);

    RewriteResponse rewrite(const RewriteRequest& request) override;
    std::string id() const override { return id_; }
    bool deterministic() const override { return true; }

    std::size_t requests() const;

private:
    std::map<std::pair<std::string, int>, std::string> replies_;
    std::string id_;
    mutable std::mutex mu_;
    std::size_t requests_ = 0;
};

// rulemut over the request source; variant stream seeded by
// derive_seed(seed, task_id, sample_index).
class RuleBackend : public Backend {
public:
    RuleBackend(std::uint64_t seed, rulemut::MutationConfig config = {}, std::string id = "rule");

    RewriteResponse rewrite(const RewriteRequest& request) override;
    std::string id() const override { return id_; }
    bool deterministic() const override { return true; }

    const rulemut::MutationConfig& config() const noexcept { return config_; }

    // The plan behind the response to `request`.
    rulemut::MutationPlan plan_for(const RewriteRequest& request) const;

private:
    std::uint64_t seed_;
    rulemut::MutationConfig config_;
    std::string id_;
};

// Token bucket shared by every client of one endpoint.
class RateLimiter {
public:
    // `rate` requests per second with a burst of one; rate <= 0 disables limiting.
    explicit RateLimiter(double rate);
    void acquire();

private:
    double rate_;
    std::mutex mu_;
    std::chrono::steady_clock::time_point next_;
};

struct LlmConfig {
    std::string base_url;  // scheme://host[:port][/prefix]
    std::string api_key;
    std::string model = "gpt-3.5-turbo";
    int max_retries = 5;
    std::chrono::milliseconds initial_backoff{500};
    std::chrono::milliseconds max_backoff{30000};
    std::chrono::seconds timeout{60};

    // MUTABENCH_API_BASE (default https://api.openai.com) and MUTABENCH_API_KEY.
    static LlmConfig from_env();
};

// OpenAI-compatible chat completions. Retries 429 and 5xx with exponential
// backoff; 401/403 raise auth-error, exhausted 429s or quota replies raise
// budget-exhausted, other failures transport-error.
class LlmBackend : public Backend {
public:
    // Throws Error(AuthError) when no API key is configured.
    LlmBackend(LlmConfig config, std::shared_ptr<RateLimiter> limiter = nullptr);

    RewriteResponse rewrite(const RewriteRequest& request) override;
    std::string id() const override { return "llm:" + config_.model; }
    bool deterministic() const override { return false; }

    // Request body for `request` (exposed for tests).
    nlohmann::json request_body(const RewriteRequest& request) const;

    // Replaces the sleep between retries (tests).
    void set_sleeper(std::function<void(std::chrono::milliseconds)> sleeper) { sleep_ = std::move(sleeper); }

private:
    LlmConfig config_;
    std::shared_ptr<RateLimiter> limiter_;
    std::function<void(std::chrono::milliseconds)> sleep_;
    std::string scheme_host_;
    std::string path_;
};

}  // namespace mutabench::rewriter
