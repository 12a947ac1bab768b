#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "mutabench/rewriter.hpp"

#include <cstdlib>
#include <thread>

#include "mutabench/corpus.hpp"
#include "mutabench/error.hpp"
#include "mutabench/py/parser.hpp"

namespace mutabench::rewriter {

using Clock = std::chrono::steady_clock;

namespace {

std::int64_t elapsed_ms(Clock::time_point since) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - since).count();
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

bool blank(std::string_view line) { return line.find_first_not_of(" \t\r") == std::string_view::npos; }

std::string join(const std::vector<std::string_view>& lines, std::size_t first, std::size_t last) {
    std::string out;
    for (std::size_t i = first; i < last; ++i) {
        std::string_view l = lines[i];
        if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
        out.append(l);
        if (i + 1 < last) out += '\n';
    }
    return out;
}

std::optional<std::string> fenced_block(std::string_view text) {
    auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view l = lines[i];
        std::size_t indent = l.find_first_not_of(" \t");
        if (indent == std::string_view::npos || l.substr(indent, 3) != "```") continue;
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            std::string_view m = lines[j];
            std::size_t mi = m.find_first_not_of(" \t");
            if (mi != std::string_view::npos && m.substr(mi, 3) == "```") return join(lines, i + 1, j);
        }
        std::size_t end = lines.size();  // unterminated fence
        while (end > i + 1 && blank(lines[end - 1])) --end;
        return join(lines, i + 1, end);
    }
    return std::nullopt;
}

std::optional<std::string> first_function(std::string_view text) {
    auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view l = lines[i];
        bool header = l.starts_with("def ") || l.starts_with("async def ");
        if (!header) continue;
        std::size_t first = i;
        while (first > 0 && lines[first - 1].starts_with("@")) --first;
        std::size_t last = i + 1;
        while (last < lines.size() && (blank(lines[last]) || lines[last].starts_with(" ") || lines[last].starts_with("\t"))) {
            ++last;
        }
        while (last > i + 1 && blank(lines[last - 1])) --last;
        std::string candidate = join(lines, first, last);
        try {
            py::parse_module(candidate);
            return candidate;
        } catch (const ParseError&) {
        }
    }
    return std::nullopt;
}

}  // namespace

void SamplingParams::validate() const {
    if (!(temperature >= 0)) throw Error(ErrorKind::Usage, "temperature must be non-negative");
    if (!(top_p > 0 && top_p <= 1)) throw Error(ErrorKind::Usage, "top_p must be in (0, 1]");
    if (max_tokens < 1) throw Error(ErrorKind::Usage, "max_tokens must be at least 1");
}

std::optional<std::string> extract_code(std::string_view raw_text) {
    if (auto block = fenced_block(raw_text)) return block;
    return first_function(raw_text);
}

// ---- mock ------------------------------------------------------------------

MockBackend::MockBackend(std::vector<Entry> script, std::string id) : id_(std::move(id)) {
    for (auto& e : script) replies_[{e.task_id, e.sample_index}] = std::move(e.reply);
}

std::vector<MockBackend::Entry> MockBackend::load_script(const std::filesystem::path& path) {
    std::string text = corpus::read_file(path);
    std::vector<Entry> script;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? text.size() : nl + 1;
        ++line_no;
        if (blank(line)) continue;
        try {
            auto j = nlohmann::json::parse(line);
            script.push_back(Entry{j.at("task_id").get<std::string>(), j.at("sample_index").get<int>(),
                                   j.at("reply").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
            throw MalformedRecord(line_no, e.what());
        }
    }
    return script;
}

RewriteResponse MockBackend::rewrite(const RewriteRequest& request) {
    auto start = Clock::now();
    RewriteResponse r;
    {
        std::lock_guard lock(mu_);
        ++requests_;
        auto it = replies_.find({request.task_id, request.sample_index});
        r.raw_text = it == replies_.end() ? request.source : it->second;
    }
    r.extracted_source = extract_code(r.raw_text);
    r.latency_ms = elapsed_ms(start);
    r.backend_id = id_;
    return r;
}

std::size_t MockBackend::requests() const {
    std::lock_guard lock(mu_);
    return requests_;
}

// ---- rule ------------------------------------------------------------------

RuleBackend::RuleBackend(std::uint64_t seed, rulemut::MutationConfig config, std::string id)
    : seed_(seed), config_(config), id_(std::move(id)) {}

rulemut::MutationPlan RuleBackend::plan_for(const RewriteRequest& request) const {
    std::uint64_t base = request.params.seed.value_or(seed_);
    auto variants = rulemut::mutate(request.source, derive_seed(base, request.task_id, request.sample_index), config_, 1);
    return variants.front().plan;
}

RewriteResponse RuleBackend::rewrite(const RewriteRequest& request) {
    auto start = Clock::now();
    std::uint64_t base = request.params.seed.value_or(seed_);
    auto variants = rulemut::mutate(request.source, derive_seed(base, request.task_id, request.sample_index), config_, 1);
    RewriteResponse r;
    r.raw_text = std::move(variants.front().source);
    r.extracted_source = r.raw_text;
    r.latency_ms = elapsed_ms(start);
    r.backend_id = id_;
    return r;
}

// ---- llm -------------------------------------------------------------------

RateLimiter::RateLimiter(double rate) : rate_(rate), next_(Clock::now()) {}

void RateLimiter::acquire() {
    if (rate_ <= 0) return;
    Clock::time_point slot;
    {
        std::lock_guard lock(mu_);
        auto now = Clock::now();
        slot = std::max(now, next_);
        next_ = slot + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(1.0 / rate_));
    }
    std::this_thread::sleep_until(slot);
}

LlmConfig LlmConfig::from_env() {
    LlmConfig c;
    const char* base = std::getenv("MUTABENCH_API_BASE");
    const char* key = std::getenv("MUTABENCH_API_KEY");
    c.base_url = base != nullptr && *base != '\0' ? base : "https://api.openai.com";
    c.api_key = key != nullptr ? key : "";
    return c;
}

LlmBackend::LlmBackend(LlmConfig config, std::shared_ptr<RateLimiter> limiter)
    : config_(std::move(config)), limiter_(std::move(limiter)) {
    if (config_.api_key.empty()) throw Error(ErrorKind::AuthError, "MUTABENCH_API_KEY is not set");
    if (!limiter_) limiter_ = std::make_shared<RateLimiter>(0.0);
    sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    std::string url = config_.base_url;
    std::size_t scheme = url.find("://");
    std::size_t slash = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    scheme_host_ = url.substr(0, slash);
    std::string prefix = slash == std::string::npos ? "" : url.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    if (prefix.ends_with("/v1")) prefix.resize(prefix.size() - 3);
    path_ = prefix + "/v1/chat/completions";
}

nlohmann::json LlmBackend::request_body(const RewriteRequest& request) const {
    return nlohmann::json{
        {"model", config_.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.instruction + "\n\n" + request.source}}})},
        {"temperature", request.params.temperature},
        {"top_p", request.params.top_p},
        {"max_tokens", request.params.max_tokens},
    };
}

RewriteResponse LlmBackend::rewrite(const RewriteRequest& request) {
    auto start = Clock::now();
    std::string body = request_body(request).dump();
    httplib::Client client(scheme_host_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    httplib::Headers headers = {{"Authorization", "Bearer " + config_.api_key}};

    auto backoff = config_.initial_backoff;
    std::string last_problem;
    bool rate_limited = false;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            sleep_(backoff);
            backoff = std::min(backoff * 2, config_.max_backoff);
        }
        limiter_->acquire();
        auto res = client.Post(path_, headers, body, "application/json");
        if (!res) {
            last_problem = "request failed: " + httplib::to_string(res.error());
            rate_limited = false;
            continue;
        }
        int status = res->status;
        if (status == 401 || status == 403) {
            throw Error(ErrorKind::AuthError, "endpoint rejected credentials (HTTP " + std::to_string(status) + ")");
        }
        if (status == 429 && res->body.find("insufficient_quota") != std::string::npos) {
            throw Error(ErrorKind::BudgetExhausted, "quota exhausted: " + res->body.substr(0, 200));
        }
        if (status == 429 || status >= 500) {
            last_problem = "HTTP " + std::to_string(status);
            rate_limited = status == 429;
            continue;
        }
        if (status != 200) {
            throw Error(ErrorKind::TransportError, "HTTP " + std::to_string(status) + ": " + res->body.substr(0, 200));
        }
        RewriteResponse r;
        auto j = nlohmann::json::parse(res->body, nullptr, false);
        if (j.is_object() && j.contains("choices") && j["choices"].is_array() && !j["choices"].empty()) {
            const auto& choice = j["choices"][0];
            if (choice.contains("message") && choice["message"].contains("content") &&
                choice["message"]["content"].is_string()) {
                r.raw_text = choice["message"]["content"].get<std::string>();
            }
        }
        r.extracted_source = extract_code(r.raw_text);
        r.latency_ms = elapsed_ms(start);
        r.backend_id = id();
        return r;
    }
    std::string msg = "giving up after " + std::to_string(config_.max_retries) + " retries: " + last_problem;
    throw Error(rate_limited ? ErrorKind::BudgetExhausted : ErrorKind::TransportError, msg);
}

}  // namespace mutabench::rewriter
