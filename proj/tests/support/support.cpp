#include "support.hpp"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "mutabench/engine.hpp"
#include "mutabench/py/parser.hpp"
#include "mutabench/rulemut.hpp"

namespace testing_support {

namespace fs = std::filesystem;

fs::path data_dir() { return MUTABENCH_DATA_DIR; }
fs::path oracle_dir() { return MUTABENCH_ORACLE_DIR; }

const mutabench::corpus::Corpus& fixture_corpus() {
    static const mutabench::corpus::Corpus corpus = mutabench::corpus::load_corpus(data_dir() / "fixtures" / "tasks.jsonl");
    return corpus;
}

TempDir::TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "mbtest-XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

CommandResult run_command(const std::string& command) {
    CommandResult r;
    FILE* pipe = popen(command.c_str(), "r");
    if (pipe == nullptr) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.output.append(buf, n);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

CommandResult run_python(const std::string& script, const std::string& input) {
    TempDir dir;
    write_text(dir / "script.py", script);
    write_text(dir / "input.txt", input);
    return run_command("python3 " + (dir / "script.py").string() + " < " + (dir / "input.txt").string());
}

CommandResult run_oracle(const std::string& oracle, const std::string& input) {
    TempDir dir;
    write_text(dir / "input.txt", input);
    return run_command("python3 " + (oracle_dir() / oracle).string() + " < " + (dir / "input.txt").string());
}

std::vector<std::vector<mutabench::metrics::SampleResult>> synthetic_run(mutabench::Rng& rng, int k, int n_problems) {
    using mutabench::VerdictKind;
    static const VerdictKind kinds[] = {VerdictKind::Fail, VerdictKind::Timeout, VerdictKind::RuntimeError,
                                        VerdictKind::NonParse};
    std::vector<std::vector<mutabench::metrics::SampleResult>> run;
    for (int p = 0; p < n_problems; ++p) {
        double pass_rate = rng.chance(0.2) ? 0.0 : rng.unit();
        auto pool = rng.between(1, k + 2);
        std::vector<mutabench::metrics::SampleResult> samples;
        for (int i = 0; i < k; ++i) {
            mutabench::metrics::SampleResult s;
            s.digest = "d" + std::to_string(rng.below(static_cast<std::uint64_t>(pool)));
            s.verdict = rng.chance(pass_rate) ? VerdictKind::Pass : kinds[rng.below(4)];
            samples.push_back(std::move(s));
        }
        run.push_back(std::move(samples));
    }
    return run;
}

nlohmann::json oracle_run(const std::vector<std::vector<mutabench::metrics::SampleResult>>& run, int k) {
    nlohmann::json problems = nlohmann::json::array();
    for (const auto& samples : run) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& s : samples) row.push_back({s.digest, mutabench::to_string(s.verdict)});
        problems.push_back(std::move(row));
    }
    return {{"k", k}, {"problems", std::move(problems)}};
}

std::vector<std::string> random_block(mutabench::Rng& rng, std::size_t max_len) {
    static const char* const kNames[] = {"a", "b", "c", "d", "e"};
    auto name = [&] { return std::string(kNames[rng.below(4)]); };
    auto target = [&] { return std::string(kNames[rng.below(5)]); };
    std::size_t n = static_cast<std::size_t>(rng.between(2, static_cast<std::int64_t>(max_len)));
    std::vector<std::string> block;
    for (std::size_t i = 0; i < n; ++i) {
        switch (rng.below(12)) {
            case 0: block.push_back(target() + " = " + name() + " + " + name()); break;
            case 1: block.push_back(target() + " = " + std::to_string(rng.below(9))); break;
            case 2: block.push_back(name() + " += " + name()); break;
            case 3: block.push_back(target() + " = " + name() + " // " + name()); break;
            case 4: block.push_back("L[" + std::to_string(rng.below(3)) + "] = " + name()); break;
            case 5: block.push_back("log.append(" + name() + ")"); break;
            case 6: block.push_back(target() + " = L[" + std::to_string(rng.below(3)) + "]"); break;
            case 7: {
                std::string x = name(), y = name();
                block.push_back(x + ", " + y + " = " + y + ", " + x);
                break;
            }
            case 8: block.push_back("assert " + name() + " != 7"); break;
            case 9: block.push_back(target() + " = " + name() + " * 2 - " + name()); break;
            case 10: block.push_back(target() + " = " + name() + " and " + name()); break;
            default: block.push_back(target() + " = -" + name()); break;
        }
    }
    return block;
}

PermutationCheck check_permutations(std::uint64_t seed, std::size_t blocks, std::size_t max_len) {
    mutabench::Rng rng(seed);
    PermutationCheck result;
    nlohmann::json request = nlohmann::json::array();
    std::vector<std::vector<bool>> admitted;
    std::vector<std::vector<std::string>> sources;
    for (std::size_t b = 0; b < blocks; ++b) {
        auto block = random_block(rng, max_len);
        std::string text;
        for (const auto& s : block) text += s + "\n";
        auto graph = mutabench::rulemut::build_dependency_graph(mutabench::py::parse_module(text));
        std::vector<std::size_t> order(block.size());
        std::iota(order.begin(), order.end(), 0);
        nlohmann::json orders = nlohmann::json::array();
        std::vector<bool> flags;
        do {
            orders.push_back(order);
            flags.push_back(graph.admits(order));
        } while (std::next_permutation(order.begin(), order.end()));
        for (int i = 0; i < 20; ++i) {
            if (!graph.admits(mutabench::rulemut::sample_order(graph, rng))) ++result.sampler_escapes;
        }
        request.push_back({{"block", block}, {"orders", orders}});
        admitted.push_back(std::move(flags));
        sources.push_back(std::move(block));
    }
    auto r = run_oracle("permutations.py", request.dump());
    if (r.exit_code != 0) throw std::runtime_error("permutations.py failed");
    auto verdicts = nlohmann::json::parse(r.output);
    result.blocks = blocks;
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t i = 0; i < admitted[b].size(); ++i) {
            bool same = verdicts[b][i].get<bool>();
            if (admitted[b][i]) {
                ++result.orders_checked;
                if (!same) {
                    ++result.violations;
                    std::string msg = "order " + request[b]["orders"][i].dump() + " of:";
                    for (const auto& s : sources[b]) msg += "\n  " + s;
                    result.failures.push_back(msg);
                }
            } else if (!same) {
                ++result.excluded_changing;
            }
        }
    }
    return result;
}

const mutabench::corpus::Corpus& mock_corpus() {
    static const mutabench::corpus::Corpus corpus = mutabench::corpus::load_corpus(data_dir() / "fixtures" / "mock" / "tasks.jsonl");
    return corpus;
}

std::filesystem::path mock_script_path() { return data_dir() / "fixtures" / "mock" / "script.jsonl"; }

nlohmann::json mock_golden() { return nlohmann::json::parse(read_text(data_dir() / "fixtures" / "mock" / "golden.json")); }

namespace {

// Mock backend that kills its own process after a number of requests.
class DyingBackend : public mutabench::rewriter::Backend {
public:
    DyingBackend(std::vector<mutabench::rewriter::MockBackend::Entry> script, std::size_t limit)
        : inner_(std::move(script)), limit_(limit) {}
    mutabench::rewriter::RewriteResponse rewrite(const mutabench::rewriter::RewriteRequest& request) override {
        if (inner_.requests() >= limit_) raise(SIGKILL);
        return inner_.rewrite(request);
    }
    std::string id() const override { return inner_.id(); }
    bool deterministic() const override { return true; }

private:
    mutabench::rewriter::MockBackend inner_;
    std::size_t limit_;
};

mutabench::engine::EvalConfig mock_config() {
    mutabench::engine::EvalConfig c;
    c.k = 10;
    c.corpus_path = "mock/tasks.jsonl";
    c.workers = 3;
    return c;
}

}  // namespace

ResumeCheck kill_and_resume(const std::filesystem::path& dir, std::size_t kill_after) {
    using namespace mutabench;
    ResumeCheck r;
    std::filesystem::create_directories(dir);
    auto script = rewriter::MockBackend::load_script(mock_script_path());
    {
        rewriter::MockBackend backend(script);
        sandbox::Sandbox sb;
        auto res = engine::evaluate_corpus(mock_corpus(), backend, sb, mock_config(), dir / "straight.jsonl");
        r.total_samples = res.samples.size();
        r.uninterrupted = read_text(dir / "straight.jsonl");
    }
    auto resumed_path = dir / "resumed.jsonl";
    pid_t pid = fork();
    if (pid == 0) {
        DyingBackend backend(script, kill_after);
        sandbox::Sandbox sb;
        engine::evaluate_corpus(mock_corpus(), backend, sb, mock_config(), resumed_path);
        _exit(0);
    }
    int status = 0;
    waitpid(pid, &status, 0);
    r.killed = WIFSIGNALED(status) && WTERMSIG(status) == SIGKILL;
    std::string journal = read_text(std::filesystem::path(resumed_path.string() + ".journal"));
    r.journal_lines = static_cast<std::size_t>(std::count(journal.begin(), journal.end(), '\n'));
    rewriter::MockBackend backend(script);
    sandbox::Sandbox sb;
    auto res = engine::evaluate_corpus(mock_corpus(), backend, sb, mock_config(), resumed_path);
    r.resumed_fresh = res.fresh_samples;
    r.resumed = read_text(resumed_path);
    return r;
}

}  // namespace testing_support
