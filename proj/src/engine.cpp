#include "mutabench/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>

#include "mutabench/canon.hpp"
#include "mutabench/py/parser.hpp"

namespace mutabench::engine {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPinnedTimestamp = "1970-01-01T00:00:00Z";

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

const py::Node* top_level_def(const py::Node& module, std::string_view name) {
    for (const auto& s : module.kids) {
        if (s.kind == py::Kind::FunctionDef && s.text == name) return &s;
    }
    return nullptr;
}

std::optional<std::string> digest_of(std::string_view source, std::string* error = nullptr) {
    try {
        return canon::canonicalize(source).digest;
    } catch (const ParseError& e) {
        if (error != nullptr) *error = e.what();
        return std::nullopt;
    }
}

Verdict non_parse(std::string detail) {
    Verdict v;
    v.kind = VerdictKind::NonParse;
    v.detail = std::move(detail);
    return v;
}

void write_atomically(const fs::path& path, const std::string& text) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        out.flush();
        if (!out) throw Error(ErrorKind::FileNotFound, "cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorKind::FileNotFound, "cannot replace " + path.string() + ": " + ec.message());
}

// Sample records from a results file or journal. Lines that do not parse
// (a torn final write) are ignored.
void load_samples(const fs::path& path, std::unordered_map<std::string, SampleRecord>& into) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (!j.is_object() || j.value("record", "") != "sample") continue;
        try {
            SampleRecord s = j.get<SampleRecord>();
            if (!s.cache_key.empty()) into[s.cache_key] = std::move(s);
        } catch (const std::exception&) {
        }
    }
}

}  // namespace

// ---- program mutation -------------------------------------------------------

Enumeration enumerate_subroutines(std::string_view program, const std::map<std::string, std::string>& tests) {
    py::Node module = py::parse_module(program);
    Enumeration out;
    for (const auto& s : module.kids) {
        if (s.kind != py::Kind::FunctionDef) continue;
        auto it = tests.find(s.text);
        if (it == tests.end()) {
            out.skipped.push_back(s.text);
            continue;
        }
        SubroutineUnit u;
        u.name = s.text;
        u.begin = s.begin;
        u.end = s.end;
        u.source = std::string(program.substr(s.begin, s.end - s.begin));
        u.test_source = it->second;
        out.units.push_back(std::move(u));
    }
    return out;
}

std::string splice(std::string_view program, const SubroutineUnit& unit, std::string_view replacement) {
    std::string out(program.substr(0, unit.begin));
    out.append(replacement);
    out.append(program.substr(unit.end));
    return out;
}

corpus::Task unit_task(std::string_view program, const SubroutineUnit& unit) {
    corpus::Task t;
    t.task_id = unit.name;
    t.prompt = std::string(program);
    t.entry_point = unit.name;
    t.test_source = unit.test_source;
    return t;
}

MutationRecord mutate_subroutine(const SubroutineUnit& unit, std::string_view program, rewriter::Backend& backend,
                                 int k_budget, const sandbox::Sandbox& sandbox, const RewriteSettings& settings) {
    MutationRecord rec;
    rec.unit = unit.name;
    rec.backend_id = backend.id();
    rec.original_digest = canon::canonicalize(unit.source).digest;
    corpus::Task task = unit_task(program, unit);
    for (int i = 0; i < k_budget; ++i) {
        rewriter::RewriteRequest req;
        req.task_id = unit.name;
        req.source = unit.source;
        req.instruction = settings.instruction;
        req.params = settings.params;
        req.sample_index = i;
        rewriter::RewriteResponse resp;
        try {
            resp = backend.rewrite(req);
        } catch (const Error& e) {
            throw MutationAborted(e, rec);
        }
        rec.budget_used = i + 1;
        Attempt a;
        a.sample_index = i;
        if (!resp.extracted_source) {
            a.verdict = non_parse("no code in reply");
            rec.attempts.push_back(std::move(a));
            continue;
        }
        std::string why;
        auto digest = digest_of(*resp.extracted_source, &why);
        if (!digest) {
            a.verdict = non_parse(why);
            rec.attempts.push_back(std::move(a));
            continue;
        }
        a.digest = *digest;
        a.verdict = sandbox.verify(*resp.extracted_source, task, settings.limits);
        bool accept = a.verdict.passed() && a.digest != rec.original_digest;
        rec.attempts.push_back(std::move(a));
        if (accept) {
            rec.accepted = *digest;
            rec.accepted_source = *resp.extracted_source;
            break;
        }
    }
    return rec;
}

std::vector<std::string> run_suite(std::string_view program, const std::map<std::string, std::string>& tests,
                                   const sandbox::Sandbox& sandbox, const sandbox::Limits& limits) {
    std::vector<std::string> failures;
    for (const auto& [name, test] : tests) {
        corpus::Task t;
        t.task_id = name;
        t.entry_point = name;
        t.test_source = test;
        Verdict v = sandbox.verify(program, t, limits);
        if (!v.passed()) failures.push_back(name + ": " + to_string(v.kind));
    }
    return failures;
}

ProgramMutation mutate_program(std::string_view program, const std::map<std::string, std::string>& tests,
                               rewriter::Backend& backend, int k_budget, const sandbox::Sandbox& sandbox,
                               const RewriteSettings& settings) {
    Enumeration units = enumerate_subroutines(program, tests);
    ProgramMutation out;
    out.skipped = units.skipped;
    std::map<std::string, std::string> suite;
    for (const auto& u : units.units) {
        out.records.push_back(mutate_subroutine(u, program, backend, k_budget, sandbox, settings));
        suite[u.name] = u.test_source;
    }
    std::string mutated(program);
    for (std::size_t i = units.units.size(); i-- > 0;) {
        const auto& rec = out.records[i];
        if (rec.accepted_source) mutated = splice(mutated, units.units[i], *rec.accepted_source);
    }
    out.gate_failures = run_suite(mutated, suite, sandbox, settings.limits);
    out.gate_passed = out.gate_failures.empty();
    out.source = out.gate_passed ? mutated : std::string(program);
    return out;
}

std::map<std::string, std::string> load_tests(const fs::path& path) {
    std::string text = corpus::read_file(path);
    auto j = nlohmann::json::parse(text, nullptr, false);
    if (!j.is_object()) throw MalformedRecord(1, "tests file must be a JSON object of name -> check source");
    std::map<std::string, std::string> tests;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_string()) throw MalformedRecord(1, "test for " + it.key() + " is not a string");
        tests[it.key()] = it.value().get<std::string>();
    }
    return tests;
}

void to_json(nlohmann::json& j, const Attempt& a) {
    j = nlohmann::json{{"sample_index", a.sample_index}, {"digest", a.digest}, {"verdict", a.verdict}};
}

void to_json(nlohmann::json& j, const MutationRecord& r) {
    j = nlohmann::json{{"unit", r.unit},
                       {"backend_id", r.backend_id},
                       {"original_digest", r.original_digest},
                       {"attempts", r.attempts},
                       {"budget_used", r.budget_used}};
    j["accepted"] = r.accepted ? nlohmann::json(*r.accepted) : nlohmann::json(nullptr);
    j["accepted_source"] = r.accepted_source ? nlohmann::json(*r.accepted_source) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, MutationRecord& r) {
    r.unit = j.at("unit").get<std::string>();
    r.backend_id = j.at("backend_id").get<std::string>();
    r.original_digest = j.at("original_digest").get<std::string>();
    r.budget_used = j.at("budget_used").get<int>();
    r.attempts.clear();
    for (const auto& a : j.at("attempts")) {
        Attempt at;
        at.sample_index = a.at("sample_index").get<int>();
        at.digest = a.at("digest").get<std::string>();
        at.verdict = a.at("verdict").get<Verdict>();
        r.attempts.push_back(std::move(at));
    }
    r.accepted.reset();
    r.accepted_source.reset();
    if (j.contains("accepted") && j["accepted"].is_string()) r.accepted = j["accepted"].get<std::string>();
    if (j.contains("accepted_source") && j["accepted_source"].is_string()) {
        r.accepted_source = j["accepted_source"].get<std::string>();
    }
}

// ---- corpus evaluation ------------------------------------------------------

const char* to_string(InputMode mode) { return mode == InputMode::Prompt ? "prompt" : "solution"; }

std::optional<InputMode> parse_input_mode(std::string_view text) {
    if (text == "prompt") return InputMode::Prompt;
    if (text == "solution") return InputMode::Solution;
    return std::nullopt;
}

std::string rewrite_input(const corpus::Task& task, InputMode mode) {
    std::string text = mode == InputMode::Prompt ? task.prompt : task.reference_source();
    try {
        py::Node module = py::parse_module(text);
        if (const py::Node* def = top_level_def(module, task.entry_point)) {
            return text.substr(def->begin, def->end - def->begin);
        }
    } catch (const ParseError&) {
    }
    return text;
}

std::string RunManifest::params_hash() const {
    nlohmann::json j{{"temperature", params.temperature},
                     {"top_p", params.top_p},
                     {"max_tokens", params.max_tokens},
                     {"seed", params.seed ? *params.seed : seed},
                     {"instruction", instruction},
                     {"input", to_string(input)}};
    return canon::sha256_hex(j.dump()).substr(0, 16);
}

std::string cache_key(const std::string& backend_id, const std::string& params_hash, const std::string& task_id,
                      int sample_index) {
    return backend_id + "|" + params_hash + "|" + task_id + "|" + std::to_string(sample_index);
}

corpus::Corpus self_checked(const corpus::Corpus& corpus, const sandbox::Sandbox& sandbox,
                            const sandbox::Limits& limits, std::vector<std::string>* excluded) {
    auto failed = sandbox::self_check_corpus(corpus, sandbox, limits);
    std::set<std::string> bad(failed.begin(), failed.end());
    corpus::Corpus out;
    out.source_path = corpus.source_path;
    for (const auto& t : corpus.tasks) {
        if (bad.count(t.task_id) == 0) out.tasks.push_back(t);
    }
    if (excluded != nullptr) excluded->insert(excluded->end(), failed.begin(), failed.end());
    if (out.tasks.empty()) throw Error(ErrorKind::EmptyCorpus, "no task passes its own tests");
    return out;
}

EvalResult evaluate_corpus(const corpus::Corpus& corpus, rewriter::Backend& backend, const sandbox::Sandbox& sandbox,
                           const EvalConfig& config, const fs::path& results_path,
                           const std::function<void(const SampleRecord&)>& on_sample) {
    if (config.k < 1) throw Error(ErrorKind::Usage, "k must be at least 1");
    config.rewrite.params.validate();
    bool reproducible = config.reproducible.value_or(backend.deterministic());

    EvalResult result;
    RunManifest& m = result.manifest;
    m.corpus_path = config.corpus_path.empty() ? corpus.source_path : config.corpus_path;
    m.backend_id = backend.id();
    m.label = config.label.empty() ? backend.id() : config.label;
    m.params = config.rewrite.params;
    m.instruction = config.rewrite.instruction;
    m.input = config.input;
    m.k = config.k;
    m.seed = config.seed;
    m.limits = config.rewrite.limits;
    m.timestamp = reproducible ? kPinnedTimestamp : utc_now();
    const std::string phash = m.params_hash();

    fs::path journal_path = results_path;
    journal_path += ".journal";
    std::unordered_map<std::string, SampleRecord> cached;
    load_samples(results_path, cached);
    load_samples(journal_path, cached);

    std::ofstream journal(journal_path, std::ios::binary | std::ios::app);
    if (!journal) throw Error(ErrorKind::FileNotFound, "cannot open " + journal_path.string());
    std::mutex journal_mu;

    std::vector<std::vector<SampleRecord>> per_task(corpus.tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> fresh{0};
    std::atomic<bool> stop{false};
    std::exception_ptr failure;
    std::mutex failure_mu;

    auto run_task = [&](std::size_t ti) {
        const corpus::Task& task = corpus.tasks[ti];
        std::string source = rewrite_input(task, config.input);
        std::string reference = canon::canonicalize(rewrite_input(task, InputMode::Solution)).digest;
        std::unordered_map<std::string, std::pair<VerdictKind, std::int64_t>> verdicts;
        auto& out = per_task[ti];
        for (int i = 0; i < config.k && !stop; ++i) {
            std::string key = cache_key(m.backend_id, phash, task.task_id, i);
            if (auto it = cached.find(key); it != cached.end()) {
                const SampleRecord& s = it->second;
                if (s.verdict != VerdictKind::NonParse && !s.digest.empty()) verdicts.try_emplace(s.digest, s.verdict, s.wall_ms);
                out.push_back(s);
                continue;
            }
            rewriter::RewriteRequest req;
            req.task_id = task.task_id;
            req.source = source;
            req.instruction = config.rewrite.instruction;
            req.params = config.rewrite.params;
            if (!req.params.seed) req.params.seed = config.seed;
            req.sample_index = i;
            rewriter::RewriteResponse resp = backend.rewrite(req);

            SampleRecord s;
            s.task_id = task.task_id;
            s.sample_index = i;
            s.backend_id = m.backend_id;
            s.raw_len = resp.raw_text.size();
            s.cache_key = key;
            s.verdict = VerdictKind::NonParse;
            if (resp.extracted_source) {
                if (auto digest = digest_of(*resp.extracted_source)) {
                    s.digest = *digest;
                    if (auto it = verdicts.find(s.digest); it != verdicts.end()) {
                        s.verdict = it->second.first;
                        s.wall_ms = it->second.second;
                    } else {
                        Verdict v = sandbox.verify(*resp.extracted_source, task, config.rewrite.limits);
                        s.verdict = v.kind;
                        s.wall_ms = v.wall_ms;
                        verdicts.emplace(s.digest, std::make_pair(v.kind, v.wall_ms));
                    }
                }
            }
            s.distinct_from_reference = !s.digest.empty() && s.digest != reference;
            if (reproducible) s.wall_ms = 0;
            {
                std::lock_guard lock(journal_mu);
                journal << nlohmann::json(s).dump() << '\n';
                journal.flush();
                if (on_sample) on_sample(s);
            }
            ++fresh;
            out.push_back(std::move(s));
        }
    };
    auto work = [&] {
        while (!stop) {
            std::size_t ti = next.fetch_add(1);
            if (ti >= corpus.tasks.size()) return;
            try {
                run_task(ti);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
                stop = true;
            }
        }
    };
    unsigned workers = config.workers > 0 ? config.workers : sandbox.parallelism();
    workers = static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, corpus.tasks.size())));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    journal.close();
    if (failure) std::rethrow_exception(failure);

    for (std::size_t ti = 0; ti < corpus.tasks.size(); ++ti) {
        std::vector<metrics::SampleResult> samples;
        for (const auto& s : per_task[ti]) {
            samples.push_back({s.digest, s.verdict});
            result.samples.push_back(s);
        }
        result.outcomes.push_back(metrics::problem_outcome(corpus.tasks[ti].task_id, samples, config.k));
    }
    result.summary = metrics::summarize(result.outcomes);
    result.fresh_samples = fresh;

    std::string text = nlohmann::json(m).dump() + "\n";
    for (const auto& s : result.samples) text += nlohmann::json(s).dump() + "\n";
    for (std::size_t ti = 0; ti < result.outcomes.size(); ++ti) {
        nlohmann::json o = result.outcomes[ti];
        int distinct = 0;
        for (const auto& s : per_task[ti]) distinct += s.verdict == VerdictKind::Pass && s.distinct_from_reference;
        o["record"] = "outcome";
        o["n_correct_distinct_from_reference"] = distinct;
        text += o.dump() + "\n";
    }
    nlohmann::json summary = result.summary;
    summary["record"] = "summary";
    text += summary.dump() + "\n";
    write_atomically(results_path, text);
    std::error_code ec;
    fs::remove(journal_path, ec);
    return result;
}

void to_json(nlohmann::json& j, const RunManifest& m) {
    j = nlohmann::json{{"record", "manifest"},
                       {"corpus_path", m.corpus_path},
                       {"backend_id", m.backend_id},
                       {"label", m.label},
                       {"temperature", m.params.temperature},
                       {"top_p", m.params.top_p},
                       {"max_tokens", m.params.max_tokens},
                       {"instruction", m.instruction},
                       {"input", to_string(m.input)},
                       {"k", m.k},
                       {"seed", m.seed},
                       {"timeout_s", m.limits.timeout_s},
                       {"memory_mb", m.limits.memory_mb},
                       {"tool_version", m.tool_version},
                       {"timestamp", m.timestamp}};
    j["params_seed"] = m.params.seed ? nlohmann::json(*m.params.seed) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, RunManifest& m) {
    m.corpus_path = j.value("corpus_path", "");
    m.backend_id = j.at("backend_id").get<std::string>();
    m.label = j.value("label", m.backend_id);
    m.params.temperature = j.value("temperature", 0.8);
    m.params.top_p = j.value("top_p", 0.95);
    m.params.max_tokens = j.value("max_tokens", 512);
    if (j.contains("params_seed") && j["params_seed"].is_number_unsigned()) {
        m.params.seed = j["params_seed"].get<std::uint64_t>();
    }
    m.instruction = j.value("instruction", std::string(rewriter::kDefaultInstruction));
    m.input = parse_input_mode(j.value("input", "solution")).value_or(InputMode::Solution);
    m.k = j.at("k").get<int>();
    m.seed = j.value("seed", std::uint64_t{0});
    m.limits.timeout_s = j.value("timeout_s", 10.0);
    m.limits.memory_mb = j.value("memory_mb", 512);
    m.tool_version = j.value("tool_version", "");
    m.timestamp = j.value("timestamp", "");
}

void to_json(nlohmann::json& j, const SampleRecord& s) {
    j = nlohmann::json{{"record", "sample"},
                       {"task_id", s.task_id},
                       {"sample_index", s.sample_index},
                       {"backend_id", s.backend_id},
                       {"digest", s.digest},
                       {"verdict_kind", to_string(s.verdict)},
                       {"wall_ms", s.wall_ms},
                       {"raw_len", s.raw_len},
                       {"distinct_from_reference", s.distinct_from_reference},
                       {"cache_key", s.cache_key}};
}

void from_json(const nlohmann::json& j, SampleRecord& s) {
    s.task_id = j.at("task_id").get<std::string>();
    s.sample_index = j.at("sample_index").get<int>();
    s.backend_id = j.at("backend_id").get<std::string>();
    s.digest = j.at("digest").get<std::string>();
    auto kind = parse_verdict_kind(j.at("verdict_kind").get<std::string>());
    if (!kind) throw std::invalid_argument("unknown verdict kind");
    s.verdict = *kind;
    s.wall_ms = j.value("wall_ms", std::int64_t{0});
    s.raw_len = j.value("raw_len", std::size_t{0});
    s.distinct_from_reference = j.value("distinct_from_reference", false);
    s.cache_key = j.value("cache_key", "");
}

}  // namespace mutabench::engine
