#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "mutabench/corpus.hpp"
#include "mutabench/engine.hpp"
#include "mutabench/error.hpp"
#include "mutabench/report.hpp"
#include "mutabench/rewriter.hpp"
#include "mutabench/rulemut.hpp"
#include "mutabench/sandbox.hpp"

namespace mutabench::cli {

namespace fs = std::filesystem;

namespace {

struct SandboxFlags {
    double timeout_s = 10.0;
    int memory_mb = 512;
    std::string interpreter = "python3";
    std::string shim;
    unsigned parallelism = 0;
    bool no_fork_server = false;

    void add(CLI::App* app) {
        app->add_option("--timeout-secs", timeout_s, "Per-candidate deadline in seconds")->check(CLI::PositiveNumber);
        app->add_option("--memory-mb", memory_mb, "Address-space limit per candidate")->check(CLI::PositiveNumber);
        app->add_option("--interpreter", interpreter, "Interpreter used to run candidates");
        app->add_option("--shim", shim, "Runner shim script (default: built-in)");
        app->add_option("--parallelism", parallelism, "Concurrent candidate processes (default: CPU count)");
        app->add_flag("--no-fork-server", no_fork_server, "Start a fresh interpreter for every candidate");
    }

    sandbox::Options options() const {
        sandbox::Options o;
        o.interpreter = interpreter;
        o.shim_path = shim;
        o.parallelism = parallelism;
        o.fork_server = !no_fork_server;
        return o;
    }

    sandbox::Limits limits() const { return {timeout_s, memory_mb}; }
};

struct BackendFlags {
    std::string backend = "rule";
    double temperature = 0.8;
    double top_p = 0.95;
    int max_tokens = 512;
    std::uint64_t seed = 0;
    std::string instruction_file;
    std::string mock_script;
    std::string operator_config;
    std::string model = "gpt-3.5-turbo";
    double rate_limit = 0;
    int max_retries = 5;

    void add(CLI::App* app) {
        app->add_option("--backend", backend, "Rewriter backend")->check(CLI::IsMember({"llm", "rule", "mock"}));
        app->add_option("--temperature", temperature, "Sampling temperature");
        app->add_option("--top-p", top_p, "Nucleus mass p of Top-P sampling");
        app->add_option("--max-tokens", max_tokens, "Completion length limit");
        app->add_option("--seed", seed, "Seed for the rule and mock backends");
        app->add_option("--instruction-file", instruction_file, "File holding the rewrite instruction");
        app->add_option("--mock-script", mock_script, "JSONL of {task_id, sample_index, reply} for --backend mock");
        app->add_option("--operator-config", operator_config, "JSON operator settings for --backend rule");
        app->add_option("--model", model, "Model name for --backend llm");
        app->add_option("--rate-limit", rate_limit, "Requests per second for --backend llm (0: unlimited)");
        app->add_option("--max-retries", max_retries, "Retries on 429/5xx for --backend llm");
    }

    rewriter::SamplingParams params() const {
        rewriter::SamplingParams p;
        p.temperature = temperature;
        p.top_p = top_p;
        p.max_tokens = max_tokens;
        p.validate();
        return p;
    }

    std::string instruction() const {
        if (instruction_file.empty()) return rewriter::kDefaultInstruction;
        std::string text = corpus::read_file(instruction_file);
        while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
        if (text.empty()) throw Error(ErrorKind::Usage, "instruction file is empty");
        return text;
    }

    std::unique_ptr<rewriter::Backend> make() const {
        if (backend == "mock") {
            if (mock_script.empty()) return std::make_unique<rewriter::MockBackend>();
            return std::make_unique<rewriter::MockBackend>(rewriter::MockBackend::load_script(mock_script));
        }
        if (backend == "rule") {
            rulemut::MutationConfig config;
            if (!operator_config.empty()) {
                auto j = nlohmann::json::parse(corpus::read_file(operator_config), nullptr, false);
                if (j.is_discarded()) throw Error(ErrorKind::Usage, "operator config is not valid JSON");
                try {
                    config = j.get<rulemut::MutationConfig>();
                } catch (const std::exception& e) {
                    throw Error(ErrorKind::Usage, std::string("bad operator config: ") + e.what());
                }
            }
            return std::make_unique<rewriter::RuleBackend>(seed, config);
        }
        rewriter::LlmConfig c = rewriter::LlmConfig::from_env();
        c.model = model;
        c.max_retries = max_retries;
        return std::make_unique<rewriter::LlmBackend>(c, std::make_shared<rewriter::RateLimiter>(rate_limit));
    }
};

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error(ErrorKind::FileNotFound, "cannot write " + path.string());
}

int cmd_evaluate(const std::string& corpus_path, int k, const std::string& input, const std::string& out_dir,
                 const std::string& label, bool no_self_check, bool verbose, const BackendFlags& bf,
                 const SandboxFlags& sf, std::ostream& out, std::ostream& err) {
    if (k < 1) throw Error(ErrorKind::Usage, "--k must be at least 1");
    auto mode = engine::parse_input_mode(input);
    if (!mode) throw Error(ErrorKind::Usage, "--input must be prompt or solution");
    engine::EvalConfig config;
    config.k = k;
    config.input = *mode;
    config.seed = bf.seed;
    config.label = label;
    config.corpus_path = corpus_path;
    config.rewrite.params = bf.params();
    config.rewrite.instruction = bf.instruction();
    config.rewrite.limits = sf.limits();
    auto backend = bf.make();

    corpus::Corpus corpus = corpus::load_corpus(corpus_path);
    sandbox::Sandbox sandbox(sf.options());
    if (!no_self_check) {
        std::vector<std::string> excluded;
        corpus = engine::self_checked(corpus, sandbox, config.rewrite.limits, &excluded);
        for (const auto& id : excluded) err << "warning: " << id << " fails its own tests; excluded\n";
    }
    fs::path dir = out_dir;
    fs::create_directories(dir);
    fs::path results = dir / "results.jsonl";
    std::size_t done = 0;
    std::size_t total = corpus.tasks.size() * static_cast<std::size_t>(k);
    auto progress = [&](const engine::SampleRecord& s) {
        ++done;
        if (verbose) {
            err << s.task_id << " #" << s.sample_index << " " << to_string(s.verdict) << " "
                << s.digest.substr(0, 12) << "\n";
        }
    };
    engine::EvalResult r = engine::evaluate_corpus(corpus, *backend, sandbox, config, results, progress);
    if (verbose) err << done << " of " << total << " samples drawn this run\n";

    nlohmann::json summary = r.summary;
    summary["manifest"] = r.manifest;
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    report::ResultsFile file;
    file.path = results;
    file.manifest = r.manifest;
    file.outcomes = r.outcomes;
    file.summary = r.summary;
    std::string table = report::format_table(report::points({file}));
    write_file(dir / "table.txt", table);
    out << table;
    out << "results: " << results.string() << "\n";
    return kOk;
}

int cmd_mutate(const std::string& program_path, const std::string& tests_path, int budget, const std::string& out_path,
               const std::string& records_path, const BackendFlags& bf, const SandboxFlags& sf, std::ostream& out,
               std::ostream& err) {
    if (budget < 1) throw Error(ErrorKind::Usage, "--k must be at least 1");
    std::string program = corpus::read_file(program_path);
    auto tests = engine::load_tests(tests_path);
    engine::RewriteSettings settings;
    settings.params = bf.params();
    settings.params.seed = bf.seed;
    settings.instruction = bf.instruction();
    settings.limits = sf.limits();

    auto units = engine::enumerate_subroutines(program, tests);
    for (const auto& name : units.skipped) err << "notice: " << name << " has no test; left untouched\n";
    fs::path records = records_path.empty() ? fs::path(out_path + ".records.json") : fs::path(records_path);
    if (units.units.empty()) {
        out << "nothing mutatable: no top-level function has a test\n";
        write_file(out_path, program);
        write_file(records, "[]\n");
        return kOk;
    }
    auto backend = bf.make();
    sandbox::Sandbox sandbox(sf.options());
    engine::ProgramMutation m = engine::mutate_program(program, tests, *backend, budget, sandbox, settings);
    nlohmann::json j{{"program", program_path},
                     {"tests", tests_path},
                     {"backend_id", backend->id()},
                     {"k_budget", budget},
                     {"seed", bf.seed},
                     {"instruction", settings.instruction},
                     {"gate_passed", m.gate_passed},
                     {"gate_failures", m.gate_failures},
                     {"skipped", m.skipped},
                     {"records", m.records}};
    write_file(records, j.dump(2) + "\n");
    for (const auto& rec : m.records) {
        out << rec.unit << ": ";
        if (rec.accepted) {
            out << "mutated after " << rec.budget_used << " attempt(s), " << rec.accepted->substr(0, 12) << "\n";
        } else {
            out << "kept (no distinct passing rewrite in " << rec.budget_used << " attempt(s))\n";
        }
    }
    if (!m.gate_passed) {
        for (const auto& f : m.gate_failures) err << "gate: " << f << "\n";
        err << "error: gate-failed: mutated program fails its test suite; not written\n";
        return kRunFailed;
    }
    write_file(out_path, m.source);
    out << "wrote " << out_path << "\n";
    return kOk;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_dir, std::ostream& out) {
    std::vector<fs::path> paths(inputs.begin(), inputs.end());
    std::vector<report::ResultsFile> files;
    for (const auto& p : report::collect_inputs(paths)) files.push_back(report::load_results(p));
    auto pts = report::points(files);
    std::string table = report::format_table(pts);
    out << table;
    if (!out_dir.empty()) {
        fs::path dir = out_dir;
        write_file(dir / "table.txt", table);
        write_file(dir / "points.csv", report::format_csv(pts));
        write_file(dir / "region.svg", report::render_svg(pts));
        out << "wrote " << (dir / "table.txt").string() << ", " << (dir / "points.csv").string() << ", "
            << (dir / "region.svg").string() << "\n";
    }
    return kOk;
}

int cmd_self_check(const std::string& corpus_path, const SandboxFlags& sf, std::ostream& out) {
    corpus::Corpus corpus = corpus::load_corpus(corpus_path);
    sandbox::Sandbox sandbox(sf.options());
    auto failed = sandbox::self_check_corpus(corpus, sandbox, sf.limits());
    for (const auto& id : failed) out << "FAIL " << id << "\n";
    out << corpus.tasks.size() - failed.size() << " of " << corpus.tasks.size() << " tasks pass their own tests\n";
    return failed.empty() ? kOk : kRunFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Code-mutation engine and pass@k / variation@k evaluation harness", "mutabench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", engine::kToolVersion);

    std::string corpus_path;
    int k = 10;
    std::string input = "solution";
    std::string out_dir = "out";
    std::string label;
    bool no_self_check = false;
    bool verbose = false;
    BackendFlags eval_backend;
    SandboxFlags eval_sandbox;
    auto* evaluate = app.add_subcommand("evaluate", "Draw k samples per corpus task and score them");
    evaluate->add_option("--corpus", corpus_path, "HumanEval-format JSONL (optionally gzipped)")->required();
    evaluate->add_option("--k", k, "Samples per task");
    evaluate->add_option("--input", input, "What the backend rewrites")->check(CLI::IsMember({"prompt", "solution"}));
    evaluate->add_option("--out", out_dir, "Output directory");
    evaluate->add_option("--label", label, "Display name in reports");
    evaluate->add_flag("--no-self-check", no_self_check, "Skip the reference-solution check");
    evaluate->add_flag("-v,--verbose", verbose, "Print every sample");
    eval_backend.add(evaluate);
    eval_sandbox.add(evaluate);

    std::string program_path;
    std::string tests_path;
    std::string mutated_path;
    std::string records_path;
    int budget = 10;
    BackendFlags mut_backend;
    SandboxFlags mut_sandbox;
    auto* mutate = app.add_subcommand("mutate", "Mutate every tested function of a program");
    mutate->add_option("--program", program_path, "Program source")->required();
    mutate->add_option("--tests", tests_path, "JSON object: function name -> check(candidate) source")->required();
    mutate->add_option("--out", mutated_path, "Where to write the mutated program")->required();
    mutate->add_option("--records", records_path, "Provenance records (default: <out>.records.json)");
    mutate->add_option("--k", budget, "Rewrite attempts per function");
    mut_backend.add(mutate);
    mut_sandbox.add(mutate);

    std::vector<std::string> report_inputs;
    std::string report_out;
    auto* rep = app.add_subcommand("report", "Tabulate and plot results files");
    rep->add_option("inputs", report_inputs, "Results files or directories")->required();
    rep->add_option("--out", report_out, "Directory for table.txt, points.csv and region.svg");

    std::string check_corpus;
    SandboxFlags check_sandbox;
    auto* self_check = app.add_subcommand("self-check", "Verify every reference solution against its tests");
    self_check->add_option("--corpus", check_corpus, "HumanEval-format JSONL")->required();
    check_sandbox.add(self_check);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        if (*evaluate) {
            return cmd_evaluate(corpus_path, k, input, out_dir, label, no_self_check, verbose, eval_backend,
                                eval_sandbox, out, err);
        }
        if (*mutate) {
            return cmd_mutate(program_path, tests_path, budget, mutated_path, records_path, mut_backend, mut_sandbox,
                              out, err);
        }
        if (*rep) return cmd_report(report_inputs, report_out, out);
        if (*self_check) return cmd_self_check(check_corpus, check_sandbox, out);
    } catch (const Error& e) {
        err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::TransportError:
            case ErrorKind::BudgetExhausted:
            case ErrorKind::GateFailed:
                return kRunFailed;
            default:
                return kUsage;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace mutabench::cli
