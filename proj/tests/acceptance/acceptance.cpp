// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "mutabench/canon.hpp"
#include "mutabench/engine.hpp"
#include "mutabench/error.hpp"
#include "mutabench/metrics.hpp"
#include "mutabench/report.hpp"
#include "mutabench/rewriter.hpp"
#include "mutabench/rulemut.hpp"
#include "mutabench/sandbox.hpp"
#include "support.hpp"

using namespace mutabench;
using metrics::Rational;

namespace {

struct Check {
    bool ok = true;
    std::string detail;
};

std::string ratio(const Rational& r) { return std::to_string(r.num()) + "/" + std::to_string(r.den()); }

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

Check within(Check c, double elapsed, double budget) {
    if (elapsed >= budget) {
        c.ok = false;
        c.detail += "; over the " + std::to_string(static_cast<int>(budget)) + " s budget";
    }
    return c;
}

Check metrics_oracle() {
    auto start = std::chrono::steady_clock::now();
    Rng rng(0x5eed0001);
    nlohmann::json runs = nlohmann::json::array();
    std::vector<metrics::MetricsSummary> mine;
    for (int r = 0; r < 1000; ++r) {
        int k = static_cast<int>(rng.between(1, 20));
        int n = static_cast<int>(rng.between(1, 30));
        auto run = testing_support::synthetic_run(rng, k, n);
        std::vector<metrics::ProblemOutcome> outcomes;
        for (std::size_t i = 0; i < run.size(); ++i) outcomes.push_back(metrics::problem_outcome(std::to_string(i), run[i], k));
        mine.push_back(metrics::summarize(outcomes));
        runs.push_back(testing_support::oracle_run(run, k));
    }
    auto res = testing_support::run_oracle("metrics_oracle.py", runs.dump());
    if (res.exit_code != 0) return {false, "oracle exited " + std::to_string(res.exit_code)};
    auto want = nlohmann::json::parse(res.output);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < mine.size(); ++i) {
        if (ratio(mine[i].pass_at_k) != want[i]["pass"].get<std::string>() ||
            ratio(mine[i].variation_at_k) != want[i]["variation"].get<std::string>() ||
            mine[i].variation_undefined != want[i]["undefined"].get<bool>()) {
            ++mismatches;
        }
    }
    Check c{mismatches == 0, std::to_string(mismatches) + " of 1000 runs differ from the recount"};
    return within(c, seconds_since(start), 10);
}

Check spot_values() {
    // S = {0.3, 0, 0.5} at k = 10.
    std::vector<metrics::ProblemOutcome> outcomes = {{"a", 10, 5, 3}, {"b", 10, 0, 0}, {"c", 10, 7, 5}};
    auto s = metrics::summarize(outcomes);
    bool ok = s.pass_at_k == Rational(2, 3) && s.variation_at_k == Rational(2, 5) && !s.variation_undefined;
    return {ok, "pass@k " + ratio(s.pass_at_k) + ", variation@k " + ratio(s.variation_at_k)};
}

Check feasibility() {
    auto start = std::chrono::steady_clock::now();
    Rng rng(0x5eed0003);
    std::size_t outside = 0;
    for (int r = 0; r < 10000; ++r) {
        int k = static_cast<int>(rng.between(1, 20));
        int n = static_cast<int>(rng.between(1, 40));
        auto run = testing_support::synthetic_run(rng, k, n);
        std::vector<metrics::ProblemOutcome> outcomes;
        for (std::size_t i = 0; i < run.size(); ++i) outcomes.push_back(metrics::problem_outcome(std::to_string(i), run[i], k));
        auto s = metrics::summarize(outcomes);
        const Rational& v = s.variation_at_k;
        bool in_range = v == Rational(0) || (!(v < Rational(1, k)) && !(Rational(1) < v));
        bool linked = (Rational(0) < v) == (Rational(0) < s.pass_at_k);
        if (!in_range || !linked || !metrics::feasibility_region(k).contains(s.pass_at_k, v)) ++outside;
    }
    Check c{outside == 0, std::to_string(outside) + " of 10000 summaries outside the region"};
    return within(c, seconds_since(start), 30);
}

rulemut::MutationConfig random_config(Rng& rng) {
    rulemut::MutationConfig c;
    for (auto& op : c.operators) {
        op.weight = rng.unit();
        op.max_applications = static_cast<int>(rng.between(1, 3));
    }
    c.max_steps = static_cast<int>(rng.between(1, 6));
    c.site_probability = 0.2 + 0.8 * rng.unit();
    c.max_dead_code = static_cast<int>(rng.between(0, 3));
    c.max_unreachable = static_cast<int>(rng.between(0, 2));
    return c;
}

Check rule_preservation() {
    auto start = std::chrono::steady_clock::now();
    const auto& corpus = testing_support::fixture_corpus();
    sandbox::Sandbox sb;
    std::size_t compositions = 0, verified = 0, failed = 0;
    std::string first_failure;
    for (const auto& task : corpus.tasks) {
        std::string source = task.reference_source();
        Rng rng(derive_seed(0x5eed0004, task.task_id, 0));
        std::set<std::string> seen;
        std::vector<std::string> distinct;
        for (int i = 0; i < 500; ++i) {
            auto config = random_config(rng);
            auto variants = rulemut::mutate(source, rng.next(), config, 1);
            ++compositions;
            const std::string& m = variants.front().source;
            if (seen.insert(canon::canonicalize(m).digest).second) distinct.push_back(m);
        }
        auto verdicts = sb.verify_batch(distinct, task, {10, 512});
        verified += verdicts.size();
        for (std::size_t i = 0; i < verdicts.size(); ++i) {
            if (verdicts[i].kind == VerdictKind::Pass) continue;
            ++failed;
            if (first_failure.empty()) first_failure = "; first: " + task.task_id + " " + verdicts[i].detail;
        }
    }
    Check c{failed == 0 && compositions == 500 * corpus.tasks.size(),
            std::to_string(compositions) + " compositions over " + std::to_string(corpus.tasks.size()) + " tasks, " +
                std::to_string(verified) + " distinct mutants run, " + std::to_string(failed) + " failed" + first_failure};
    return within(c, seconds_since(start), 300);
}

Check permutations() {
    auto start = std::chrono::steady_clock::now();
    auto r = testing_support::check_permutations(0x5eed0005, 300, 5);
    bool ok = r.failures.empty() && r.violations == 0 && r.sampler_escapes == 0 && r.excluded_changing > 0;
    Check c{ok, std::to_string(r.blocks) + " blocks, " + std::to_string(r.orders_checked) + " admitted orders run, " +
                    std::to_string(r.violations) + " violations, " + std::to_string(r.sampler_escapes) +
                    " sampler escapes, " + std::to_string(r.excluded_changing) + " rejected orders change behavior"};
    if (!r.failures.empty()) c.detail += "; " + r.failures.front();
    return within(c, seconds_since(start), 120);
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> lines;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

std::string inject(const std::string& source, const std::vector<int>& rows, Rng& rng) {
    auto lines = split_lines(source);
    std::set<int> safe(rows.begin(), rows.end());
    std::vector<std::vector<std::string>> after(lines.size() + 1);  // after[0]: before the first line
    auto noise = [&] {
        if (rng.chance(0.3)) return std::string(rng.below(5), ' ');
        return std::string(rng.below(9), ' ') + "# note " + std::to_string(rng.below(1000)) + (rng.chance(0.2) ? " \"'" : "");
    };
    bool any = false;
    for (int row = 0; row <= static_cast<int>(lines.size()); ++row) {
        if (row > 0 && !safe.count(row)) continue;
        if (row > 0 && rng.chance(0.3)) {
            lines[row - 1] += "  # tail " + std::to_string(rng.below(1000));
            any = true;
        }
        if (rng.chance(0.3)) {
            for (std::uint64_t j = 0, n = 1 + rng.below(2); j < n; ++j) after[row].push_back(noise());
            any = true;
        }
    }
    if (!any) after[0].push_back("# header");
    std::string out;
    for (const auto& extra : after[0]) out += extra + "\n";
    for (std::size_t i = 0; i < lines.size(); ++i) {
        out += lines[i] + "\n";
        for (const auto& extra : after[i + 1]) out += extra + "\n";
    }
    return out;
}

Check canonicalization() {
    std::vector<std::string> sources;
    for (const auto& t : testing_support::fixture_corpus().tasks) {
        sources.push_back(t.reference_source());
        sources.push_back(t.test_source);
    }
    sources.push_back(testing_support::read_text(testing_support::data_dir() / "fixtures" / "program" / "program.py"));
    auto res = testing_support::run_oracle("logical_lines.py", nlohmann::json(sources).dump());
    if (res.exit_code != 0) return {false, "oracle exited " + std::to_string(res.exit_code)};
    auto rows = nlohmann::json::parse(res.output).get<std::vector<std::vector<int>>>();
    Rng rng(0x5eed0006);
    std::size_t trials = 0, bad_sources = 0;
    std::string first;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        auto want = canon::canonicalize(sources[i]);
        bool ok = canon::canonicalize(want.text) == want;
        for (int t = 0; t < 200; ++t, ++trials) {
            std::string noisy = inject(sources[i], rows[i], rng);
            try {
                auto got = canon::canonicalize(noisy);
                if (!(got == want) || !(canon::canonicalize(got.text) == got)) ok = false;
            } catch (const Error& e) {
                ok = false;
            }
            if (!ok && first.empty()) first = "; first: source " + std::to_string(i) + ", trial " + std::to_string(t);
        }
        if (!ok) ++bad_sources;
    }
    return {bad_sources == 0, std::to_string(sources.size()) + " sources, " + std::to_string(trials) + " injections, " +
                                  std::to_string(bad_sources) + " sources not invariant" + first};
}

Check containment() {
    corpus::Task task;
    task.task_id = "T/spin";
    task.prompt = "def spin(x):\n";
    task.entry_point = "spin";
    task.canonical_solution = "    return x\n";
    task.test_source = "def check(candidate):\n    assert candidate(1) == 1\n";
    sandbox::Sandbox sb;
    auto verdicts = sb.verify_batch(std::vector<std::string>(20, "def spin(x):\n    while True:\n        pass"), task, {2, 256}, 10);
    int ok = 0;
    std::int64_t worst = 0;
    for (const auto& v : verdicts) {
        if (v.kind == VerdictKind::Timeout && v.wall_ms <= 4000) ++ok;
        worst = std::max<std::int64_t>(worst, v.wall_ms);
    }
    return {ok == 20, std::to_string(ok) + "/20 timed out within 4 s, slowest " + std::to_string(worst) + " ms"};
}

Check mock_end_to_end() {
    testing_support::TempDir dir;
    rewriter::MockBackend mock(rewriter::MockBackend::load_script(testing_support::mock_script_path()));
    sandbox::Sandbox sb;
    engine::EvalConfig config;
    config.k = 10;
    config.corpus_path = "mock/tasks.jsonl";
    auto res = engine::evaluate_corpus(testing_support::mock_corpus(), mock, sb, config, dir / "run.jsonl");
    auto golden = testing_support::mock_golden();
    bool metrics_ok = res.summary.pass_at_k.str() == golden["pass_at_k"].get<std::string>() &&
                      res.summary.variation_at_k.str() == golden["variation_at_k"].get<std::string>();
    auto resume = testing_support::kill_and_resume(dir / "resume", 23);
    bool resume_ok = resume.killed && resume.journal_lines > 0 && !resume.resumed.empty() && resume.resumed == resume.uninterrupted;
    return {metrics_ok && resume_ok,
            "pass@10 " + metrics::format_percent(res.summary.pass_at_k) + ", variation@10 " +
                metrics::format_percent(res.summary.variation_at_k) + (metrics_ok ? " (golden)" : " (golden differs)") +
                "; killed after " + std::to_string(resume.journal_lines) + " samples, resumed file " +
                (resume.resumed == resume.uninterrupted ? "byte-identical" : "differs")};
}

Check rule_variation_floor() {
    testing_support::TempDir dir;
    auto corpus = (testing_support::data_dir() / "fixtures" / "tasks.jsonl").string();
    // Default seed, operator config and sampling settings.
    rewriter::RuleBackend rule(0);
    sandbox::Sandbox sb;
    engine::EvalConfig config;
    config.k = 10;
    config.corpus_path = corpus;
    auto res = engine::evaluate_corpus(testing_support::fixture_corpus(), rule, sb, config, dir / "rule.jsonl");
    double v = static_cast<double>(res.summary.variation_at_k.num()) / static_cast<double>(res.summary.variation_at_k.den());
    return {!res.summary.variation_undefined && v >= 0.20,
            "variation@10 " + metrics::format_percent(res.summary.variation_at_k) + " (floor 20.00%), pass@10 " +
                metrics::format_percent(res.summary.pass_at_k)};
}

Check leaderboard() {
    std::vector<report::ResultsFile> files;
    for (const auto& p : report::collect_inputs({testing_support::data_dir() / "leaderboard"})) files.push_back(report::load_results(p));
    auto pts = report::points(files);
    struct Row { const char* label; const char* pass; const char* variation; };
    const Row rows[] = {{"CodeGen2-Multi", "30.48%", "32.80%"}, {"CodeGen-Mono", "43.29%", "38.45%"},
                        {"SantaCoder", "7.31%", "10.83%"},      {"StarCoderPlus", "10.36%", "11.76%"},
                        {"ChatGPT 3.5 Turbo", "100.00%", "51.32%"}};
    std::string table = report::format_table(pts);
    int matched = 0;
    std::string misses;
    for (const Row& r : rows) {
        bool hit = false;
        for (const auto& p : pts) {
            if (p.label == r.label && metrics::format_percent(p.pass_at_k) == r.pass &&
                metrics::format_percent(p.variation_at_k) == r.variation) {
                hit = true;
            }
        }
        std::istringstream in(table);
        bool printed = false;
        for (std::string line; std::getline(in, line);) {
            if (line.rfind(std::string(r.label) + " ", 0) == 0 && line.find(std::string(" ") + r.pass + " ") != std::string::npos &&
                line.find(r.variation) != std::string::npos) {
                printed = true;
            }
        }
        if (hit && printed) {
            ++matched;
        } else {
            misses += std::string("; ") + r.label + " differs";
        }
    }
    return {matched == 5, std::to_string(matched) + "/5 rows match to two decimals" + misses};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Check()> run;
    };
    const Criterion criteria[] = {
        {"metrics-oracle-equivalence", metrics_oracle},
        {"variation-spot-values", spot_values},
        {"feasibility-region", feasibility},
        {"rule-semantic-preservation", rule_preservation},
        {"permutation-brute-force", permutations},
        {"canonicalization-invariance", canonicalization},
        {"sandbox-containment", containment},
        {"mock-end-to-end-and-resume", mock_end_to_end},
        {"rule-variation-floor", rule_variation_floor},
        {"table-fidelity", leaderboard},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Check r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r = {false, std::string("threw: ") + e.what()};
        }
        char secs[32];
        std::snprintf(secs, sizeof secs, "%.1f s", seconds_since(start));
        std::cout << (r.ok ? "PASS " : "FAIL ") << c.name << ": " << r.detail << " [" << secs << "]" << std::endl;
        if (!r.ok) ++failed;
    }
    std::cout << (std::size(criteria) - failed) << "/" << std::size(criteria) << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
