#pragma once

// Subroutine-level mutation of whole programs, and corpus-wide evaluation
// runs that reduce k samples per task to pass@k / variation@k.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "mutabench/corpus.hpp"
#include "mutabench/error.hpp"
#include "mutabench/metrics.hpp"
#include "mutabench/rewriter.hpp"
#include "mutabench/sandbox.hpp"
#include "mutabench/verdict.hpp"

namespace mutabench::engine {

inline constexpr const char* kToolVersion = "0.3.0";

// ---- program mutation -------------------------------------------------------

struct SubroutineUnit {
    std::string name;
    std::size_t begin = 0;  // byte span of the definition, decorators included
    std::size_t end = 0;
    std::string source;
    std::string test_source;
};

struct Enumeration {
    std::vector<SubroutineUnit> units;
    std::vector<std::string> skipped;  // top-level functions without a test
};

// One unit per top-level function that has an entry in `tests`, in source
// order. Throws ParseError.
Enumeration enumerate_subroutines(std::string_view program, const std::map<std::string, std::string>& tests);

// Program text with the unit's span replaced by `replacement`.
std::string splice(std::string_view program, const SubroutineUnit& unit, std::string_view replacement);

struct Attempt {
    int sample_index = 0;
    std::string digest;  // empty when nothing parseable came back
    Verdict verdict;
};

struct MutationRecord {
    std::string unit;
    std::string backend_id;
    std::string original_digest;
    std::vector<Attempt> attempts;
    std::optional<std::string> accepted;         // digest
    std::optional<std::string> accepted_source;  // as returned by the backend
    int budget_used = 0;
};

// Carries the attempts made before the backend failed.
class MutationAborted : public Error {
public:
    MutationAborted(const Error& cause, MutationRecord partial)
        : Error(cause.kind(), cause.what()), record_(std::move(partial)) {}
    const MutationRecord& record() const noexcept { return record_; }

private:
    MutationRecord record_;
};

struct RewriteSettings {
    std::string instruction = rewriter::kDefaultInstruction;
    rewriter::SamplingParams params;
    sandbox::Limits limits;
};

// Task that checks `unit` inside `program`: the rest of the program is the
// context the candidate runs in.
corpus::Task unit_task(std::string_view program, const SubroutineUnit& unit);

// Requests rewrites one at a time until one is digest-distinct from the
// original and passes, or `k_budget` attempts are spent.
MutationRecord mutate_subroutine(const SubroutineUnit& unit, std::string_view program, rewriter::Backend& backend,
                                 int k_budget, const sandbox::Sandbox& sandbox, const RewriteSettings& settings = {});

struct ProgramMutation {
    std::string source;  // the input program unless the final gate passed
    std::vector<MutationRecord> records;
    std::vector<std::string> skipped;
    bool gate_passed = false;
    std::vector<std::string> gate_failures;  // "<function>: <verdict>"
};

// Runs every test in `tests` against `program`; returns the failures.
std::vector<std::string> run_suite(std::string_view program, const std::map<std::string, std::string>& tests,
                                   const sandbox::Sandbox& sandbox, const sandbox::Limits& limits);

ProgramMutation mutate_program(std::string_view program, const std::map<std::string, std::string>& tests,
                               rewriter::Backend& backend, int k_budget, const sandbox::Sandbox& sandbox,
                               const RewriteSettings& settings = {});

// {"name": "<check source>", ...}. Throws Error(FileNotFound) or MalformedRecord.
std::map<std::string, std::string> load_tests(const std::filesystem::path& path);

void to_json(nlohmann::json& j, const Attempt& a);
void to_json(nlohmann::json& j, const MutationRecord& r);
void from_json(const nlohmann::json& j, MutationRecord& r);

// ---- corpus evaluation ------------------------------------------------------

enum class InputMode { Prompt, Solution };

const char* to_string(InputMode mode);
std::optional<InputMode> parse_input_mode(std::string_view text);

// Definition of the entry point as sent to the backend: taken from the
// prompt alone, or from prompt + canonical solution.
std::string rewrite_input(const corpus::Task& task, InputMode mode);

struct EvalConfig {
    int k = 10;
    RewriteSettings rewrite;
    InputMode input = InputMode::Solution;
    std::uint64_t seed = 0;
    unsigned workers = 0;  // tasks in flight; 0: sandbox parallelism
    // Zero wall_ms and pin the timestamp so results depend only on inputs.
    // Unset: on for deterministic backends.
    std::optional<bool> reproducible;
    std::string corpus_path;
    std::string label;  // display name in reports; defaults to the backend id
};

struct RunManifest {
    std::string corpus_path;
    std::string backend_id;
    std::string label;
    rewriter::SamplingParams params;
    std::string instruction;
    InputMode input = InputMode::Solution;
    int k = 10;
    std::uint64_t seed = 0;
    sandbox::Limits limits;
    std::string tool_version = kToolVersion;
    std::string timestamp;

    // Hash of everything that changes what a sample is.
    std::string params_hash() const;
};

struct SampleRecord {
    std::string task_id;
    int sample_index = 0;
    std::string backend_id;
    std::string digest;
    VerdictKind verdict = VerdictKind::Fail;
    std::int64_t wall_ms = 0;
    std::size_t raw_len = 0;
    bool distinct_from_reference = false;
    std::string cache_key;

    friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct EvalResult {
    RunManifest manifest;
    std::vector<SampleRecord> samples;  // corpus order, then sample index
    std::vector<metrics::ProblemOutcome> outcomes;
    metrics::MetricsSummary summary;
    std::size_t fresh_samples = 0;  // samples not found in the journal
};

std::string cache_key(const std::string& backend_id, const std::string& params_hash, const std::string& task_id,
                      int sample_index);

// Draws k samples per task, verifies them and writes `results_path`
// (manifest line, sample lines, outcome lines, summary line). Every sample
// is appended to `<results_path>.journal` as it completes; samples already
// in the journal or in an earlier results file with the same cache key are
// reused instead of requested again.
EvalResult evaluate_corpus(const corpus::Corpus& corpus, rewriter::Backend& backend, const sandbox::Sandbox& sandbox,
                           const EvalConfig& config, const std::filesystem::path& results_path,
                           const std::function<void(const SampleRecord&)>& on_sample = {});

// Tasks whose reference solution passes its tests; throws Error(EmptyCorpus)
// when none do. Failing ids are appended to `excluded`.
corpus::Corpus self_checked(const corpus::Corpus& corpus, const sandbox::Sandbox& sandbox,
                            const sandbox::Limits& limits, std::vector<std::string>* excluded = nullptr);

void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);
void to_json(nlohmann::json& j, const SampleRecord& s);
void from_json(const nlohmann::json& j, SampleRecord& s);

}  // namespace mutabench::engine
