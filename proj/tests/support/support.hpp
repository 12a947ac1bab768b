#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mutabench/corpus.hpp"
#include "mutabench/metrics.hpp"
#include "mutabench/rng.hpp"

namespace testing_support {

std::filesystem::path data_dir();
std::filesystem::path oracle_dir();

// The bundled fixture corpus (data/fixtures/tasks.jsonl).
const mutabench::corpus::Corpus& fixture_corpus();

// Fresh directory removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

struct CommandResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

// Runs `python3 -c <script>` with `input` on stdin.
CommandResult run_python(const std::string& script, const std::string& input = {});

// Runs a shell command line; stdout captured.
CommandResult run_command(const std::string& command);

// Runs `python3 <oracle_dir>/<oracle>` with `input` on stdin.
CommandResult run_oracle(const std::string& oracle, const std::string& input = {});

// Random (digest, verdict) samples for `n_problems` problems of k samples,
// digests drawn from a small pool so duplicates are common.
std::vector<std::vector<mutabench::metrics::SampleResult>> synthetic_run(mutabench::Rng& rng, int k, int n_problems);

// The run as metrics_oracle.py input.
nlohmann::json oracle_run(const std::vector<std::vector<mutabench::metrics::SampleResult>>& run, int k);

// Random straight-line block of 2..max_len statements over a, b, c, d, e,
// the list L and the list log.
std::vector<std::string> random_block(mutabench::Rng& rng, std::size_t max_len);

struct PermutationCheck {
    std::size_t blocks = 0;
    std::size_t orders_checked = 0;       // admitted orders executed
    std::size_t excluded_changing = 0;    // rejected orders that do change behavior
    std::size_t violations = 0;           // admitted orders that change behavior
    std::size_t sampler_escapes = 0;      // sampled orders the graph does not admit
    std::vector<std::string> failures;
};

// Generates `blocks` random blocks, enumerates every permutation, and
// executes all of them with permutations.py.
PermutationCheck check_permutations(std::uint64_t seed, std::size_t blocks, std::size_t max_len);

// The scripted mock run: data/fixtures/mock/{tasks,script}.jsonl.
const mutabench::corpus::Corpus& mock_corpus();
std::filesystem::path mock_script_path();
// Hand-enumerated expectation for the mock run (golden.json).
nlohmann::json mock_golden();

struct ResumeCheck {
    bool killed = false;               // the interrupted child died by SIGKILL
    std::size_t journal_lines = 0;     // samples persisted before the kill
    std::size_t resumed_fresh = 0;     // samples requested again on resume
    std::size_t total_samples = 0;
    std::string uninterrupted;         // results file bytes
    std::string resumed;
};

// Runs the mock evaluation once straight through and once killed after
// `kill_after` backend requests and then resumed, under `dir`.
ResumeCheck kill_and_resume(const std::filesystem::path& dir, std::size_t kill_after);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace testing_support
