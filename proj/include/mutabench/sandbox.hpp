#pragma once

// Candidate verification in a child interpreter process.
//
// Each candidate is written, together with the task's tests, to a script in a
// throwaway directory and run through the runner shim
// (`<interpreter> shim.py <script> <entry>`). The shim prints a one-line JSON
// report as the last line of stdout; the harness enforces the deadline by
// killing the child's process group.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "mutabench/corpus.hpp"
#include "mutabench/verdict.hpp"

namespace mutabench::sandbox {

class ForkServer;

struct Limits {
    double timeout_s = 10.0;
    int memory_mb = 512;
};

// What the shim printed on its final stdout line.
struct ShimReport {
    std::string status;  // pass | fail | runtime_error
    std::string message;
    std::int64_t elapsed_ms = 0;
};

// Parses the last non-empty line of `output` as a ShimReport.
std::optional<ShimReport> parse_shim_report(std::string_view output);

struct Options {
    std::string interpreter = "python3";
    // -S skips site initialization, which dominates interpreter start-up.
    std::vector<std::string> interpreter_args = {"-I", "-S"};
    // Runner shim to execute; empty selects the built-in scripted fake.
    std::filesystem::path shim_path;
    unsigned parallelism = 0;  // 0: hardware concurrency
    // Fork each child from a warm interpreter instead of starting a new one.
    // Children are still separate processes with their own limits.
    bool fork_server = true;
};

// Source of the built-in fake shim. It speaks the shim protocol with the
// interpreter's standard library only.
const std::string& fake_shim_source();

// Top-level statements of the task prompt other than the entry point's own
// definition (imports, helpers), as source text.
std::string prompt_context(const corpus::Task& task);

// prompt context, candidate, tests, then `check(<entry_point>)`.
std::string execution_script(std::string_view candidate, const corpus::Task& task);

class Sandbox {
public:
    explicit Sandbox(Options options = {});
    ~Sandbox();
    Sandbox(const Sandbox&) = delete;
    Sandbox& operator=(const Sandbox&) = delete;

    // Throws Error(SandboxSetup) when the interpreter or temp dir is unusable.
    Verdict verify(std::string_view candidate, const corpus::Task& task, const Limits& limits) const;

    // Order-preserving; at most `parallelism` children alive at once.
    std::vector<Verdict> verify_batch(const std::vector<std::string>& candidates, const corpus::Task& task,
                                      const Limits& limits, unsigned parallelism = 0) const;

    const Options& options() const noexcept { return options_; }
    unsigned parallelism() const noexcept;

private:
    std::unique_ptr<ForkServer> acquire_server(const std::string& interpreter) const;
    void release_server(std::unique_ptr<ForkServer> server) const;

    Options options_;
    std::filesystem::path workdir_;
    std::filesystem::path shim_;
    std::filesystem::path server_script_;
    mutable std::mutex pool_mu_;
    mutable std::vector<std::unique_ptr<ForkServer>> idle_;
};

// task_ids whose prompt + canonical_solution fails the task's own tests.
std::vector<std::string> self_check_corpus(const corpus::Corpus& corpus, const Sandbox& sandbox,
                                           const Limits& limits = {});

}  // namespace mutabench::sandbox
