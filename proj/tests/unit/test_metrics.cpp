#include <gtest/gtest.h>

#include <algorithm>

#include "mutabench/error.hpp"
#include "mutabench/metrics.hpp"
#include "support.hpp"

using namespace mutabench;
using metrics::ProblemOutcome;
using metrics::Rational;
using metrics::SampleResult;

namespace {

std::vector<SampleResult> samples(const std::vector<std::pair<std::string, bool>>& spec) {
    std::vector<SampleResult> out;
    for (const auto& [digest, pass] : spec) out.push_back({digest, pass ? VerdictKind::Pass : VerdictKind::Fail});
    return out;
}

ProblemOutcome outcome(const std::string& id, int k, int correct, int unique) {
    return ProblemOutcome{id, k, correct, unique};
}

std::string ratio(const Rational& r) { return std::to_string(r.num()) + "/" + std::to_string(r.den()); }

}  // namespace

TEST(Rational, Normalizes) {
    EXPECT_EQ(Rational(2, 4), Rational(1, 2));
    EXPECT_EQ(Rational(3, -6), Rational(-1, 2));
    EXPECT_EQ(Rational(0, 7), Rational(0));
    EXPECT_EQ((Rational(1, 3) + Rational(1, 6)).str(), "1/2");
    EXPECT_EQ((Rational(4, 5) / Rational(2)).str(), "2/5");
    EXPECT_TRUE(Rational(1, 10) < Rational(1, 9));
    EXPECT_THROW(Rational(1, 0), std::domain_error);
}

TEST(Rational, PercentTruncates) {
    EXPECT_EQ(metrics::format_percent(Rational(2, 3)), "66.66%");
    EXPECT_EQ(metrics::format_percent(Rational(1)), "100.00%");
    EXPECT_EQ(metrics::format_percent(Rational(0)), "0.00%");
    EXPECT_EQ(metrics::format_percent(Rational(1, 8)), "12.50%");
    EXPECT_EQ(metrics::format_percent(Rational(5132, 10000)), "51.32%");
}

TEST(ProblemOutcome, AllPassIdentical) {
    std::vector<std::pair<std::string, bool>> s(10, {"a", true});
    auto o = metrics::problem_outcome("t", samples(s), 10);
    EXPECT_EQ(o.n_correct, 10);
    EXPECT_EQ(o.n_unique_correct, 1);
    EXPECT_EQ(o.fraction(), Rational(1, 10));
}

TEST(ProblemOutcome, NonePass) {
    std::vector<std::pair<std::string, bool>> s;
    for (int i = 0; i < 10; ++i) s.push_back({"d" + std::to_string(i), false});
    auto o = metrics::problem_outcome("t", samples(s), 10);
    EXPECT_EQ(o.n_correct, 0);
    EXPECT_EQ(o.fraction(), Rational(0));
}

TEST(ProblemOutcome, TwoDuplicatedPairs) {
    auto o = metrics::problem_outcome(
        "t",
        samples({{"a", true}, {"a", true}, {"b", true}, {"b", true}, {"c", true}, {"d", true},
                 {"e", false}, {"a", false}, {"f", false}, {"g", false}}),
        10);
    EXPECT_EQ(o.n_correct, 6);
    EXPECT_EQ(o.n_unique_correct, 4);
    EXPECT_EQ(o.fraction(), Rational(2, 5));
}

TEST(ProblemOutcome, FailingDigestsNotCounted) {
    auto o = metrics::problem_outcome("t", samples({{"a", true}, {"b", false}, {"c", false}}), 3);
    EXPECT_EQ(o.n_unique_correct, 1);
    std::vector<SampleResult> s = {{"a", VerdictKind::Timeout}, {"b", VerdictKind::RuntimeError},
                                   {"c", VerdictKind::NonParse}};
    EXPECT_EQ(metrics::problem_outcome("t", s, 3).n_correct, 0);
}

TEST(ProblemOutcome, SampleCountMismatch) {
    try {
        metrics::problem_outcome("t", samples({{"a", true}}), 10);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SampleCountMismatch);
    }
}

TEST(Summarize, SpotValues) {
    auto s = metrics::summarize({outcome("a", 10, 3, 3), outcome("b", 10, 0, 0), outcome("c", 10, 7, 5)});
    EXPECT_EQ(s.pass_at_k, Rational(2, 3));
    EXPECT_EQ(s.variation_at_k, Rational(2, 5));
    EXPECT_FALSE(s.variation_undefined);
    EXPECT_EQ(s.s_values, (std::vector<Rational>{Rational(3, 10), Rational(0), Rational(1, 2)}));
    EXPECT_EQ(s.s_prime, (std::vector<Rational>{Rational(3, 10), Rational(1, 2)}));
    EXPECT_EQ(s.n_problems, 3);
}

TEST(Summarize, UpperCornerAndOrigin) {
    auto top = metrics::summarize({outcome("a", 10, 10, 10), outcome("b", 10, 10, 10)});
    EXPECT_EQ(top.pass_at_k, Rational(1));
    EXPECT_EQ(top.variation_at_k, Rational(1));
    auto origin = metrics::summarize({outcome("a", 10, 0, 0), outcome("b", 10, 0, 0)});
    EXPECT_EQ(origin.pass_at_k, Rational(0));
    EXPECT_EQ(origin.variation_at_k, Rational(0));
    EXPECT_TRUE(origin.variation_undefined);
}

TEST(Summarize, Errors) {
    try {
        metrics::summarize({});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyInput);
    }
    try {
        metrics::summarize({outcome("a", 10, 1, 1), outcome("b", 5, 1, 1)});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MixedK);
    }
}

TEST(Summarize, MatchesBruteForceOracle) {
    Rng rng(20240611);
    nlohmann::json runs = nlohmann::json::array();
    std::vector<metrics::MetricsSummary> mine;
    for (int r = 0; r < 200; ++r) {
        int k = static_cast<int>(rng.between(1, 12));
        int n = static_cast<int>(rng.between(1, 15));
        auto run = testing_support::synthetic_run(rng, k, n);
        std::vector<ProblemOutcome> outcomes;
        for (std::size_t i = 0; i < run.size(); ++i) outcomes.push_back(metrics::problem_outcome(std::to_string(i), run[i], k));
        mine.push_back(metrics::summarize(outcomes));
        runs.push_back(testing_support::oracle_run(run, k));
    }
    auto res = testing_support::run_oracle("metrics_oracle.py", runs.dump());
    ASSERT_EQ(res.exit_code, 0);
    auto want = nlohmann::json::parse(res.output);
    ASSERT_EQ(want.size(), mine.size());
    for (std::size_t i = 0; i < mine.size(); ++i) {
        EXPECT_EQ(ratio(mine[i].pass_at_k), want[i]["pass"].get<std::string>()) << "run " << i;
        EXPECT_EQ(ratio(mine[i].variation_at_k), want[i]["variation"].get<std::string>()) << "run " << i;
        EXPECT_EQ(mine[i].variation_undefined, want[i]["undefined"].get<bool>());
    }
}

TEST(Summarize, PermutationInvariant) {
    Rng rng(99);
    for (int r = 0; r < 50; ++r) {
        auto run = testing_support::synthetic_run(rng, 10, 8);
        std::vector<ProblemOutcome> outcomes;
        for (std::size_t i = 0; i < run.size(); ++i) outcomes.push_back(metrics::problem_outcome(std::to_string(i), run[i], 10));
        auto base = metrics::summarize(outcomes);
        std::reverse(outcomes.begin(), outcomes.end());
        for (auto& samples : run) std::reverse(samples.begin(), samples.end());
        auto flipped = metrics::summarize(outcomes);
        EXPECT_EQ(flipped.pass_at_k, base.pass_at_k);
        EXPECT_EQ(flipped.variation_at_k, base.variation_at_k);
        EXPECT_EQ(metrics::problem_outcome("x", run[0], 10).n_unique_correct,
                  std::find_if(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.task_id == "0"; })->n_unique_correct);
    }
}

TEST(Summarize, NovelPassingSampleNeverHurts) {
    Rng rng(5);
    for (int r = 0; r < 100; ++r) {
        auto run = testing_support::synthetic_run(rng, 10, 5);
        std::vector<ProblemOutcome> before;
        for (std::size_t i = 0; i < run.size(); ++i) before.push_back(metrics::problem_outcome(std::to_string(i), run[i], 10));
        auto p = rng.below(run.size());
        auto it = std::find_if(run[p].begin(), run[p].end(), [](const SampleResult& s) { return s.verdict != VerdictKind::Pass; });
        if (it == run[p].end()) continue;
        *it = {"novel", VerdictKind::Pass};
        auto after = metrics::problem_outcome("p", run[p], 10);
        EXPECT_TRUE(before[p].fraction() <= after.fraction());
        auto before_s = metrics::summarize(before);
        before[p] = after;
        EXPECT_TRUE(before_s.pass_at_k <= metrics::summarize(before).pass_at_k);
    }
}

TEST(Feasibility, Region) {
    auto r10 = metrics::feasibility_region(10);
    EXPECT_EQ(r10.lower, Rational(1, 10));
    EXPECT_TRUE(r10.contains(Rational(0), Rational(0)));
    EXPECT_FALSE(r10.contains(Rational(0), Rational(1, 2)));
    EXPECT_FALSE(r10.contains(Rational(1, 2), Rational(0)));
    EXPECT_FALSE(r10.contains(Rational(1, 2), Rational(1, 20)));
    EXPECT_TRUE(r10.contains(Rational(1, 2), Rational(1, 10)));
    EXPECT_TRUE(r10.contains(Rational(1), Rational(1)));
    auto r1 = metrics::feasibility_region(1);
    EXPECT_TRUE(r1.contains(Rational(1, 3), Rational(1)));
    EXPECT_FALSE(r1.contains(Rational(1, 3), Rational(1, 2)));
    EXPECT_THROW(metrics::feasibility_region(0), std::invalid_argument);
    EXPECT_FALSE(r10.boundary.empty());
}

TEST(Feasibility, RandomSummariesInside) {
    Rng rng(11);
    for (int r = 0; r < 1000; ++r) {
        int k = static_cast<int>(rng.between(1, 20));
        auto run = testing_support::synthetic_run(rng, k, static_cast<int>(rng.between(1, 10)));
        std::vector<ProblemOutcome> outcomes;
        for (std::size_t i = 0; i < run.size(); ++i) outcomes.push_back(metrics::problem_outcome(std::to_string(i), run[i], k));
        auto s = metrics::summarize(outcomes);
        EXPECT_TRUE(metrics::feasibility_region(k).contains(s.pass_at_k, s.variation_at_k));
        EXPECT_EQ(Rational(static_cast<std::int64_t>(s.s_prime.size()), s.n_problems), s.pass_at_k);
    }
}

TEST(Metrics, JsonRoundTrip) {
    auto o = outcome("a", 10, 3, 2);
    nlohmann::json j = o;
    EXPECT_EQ(j.get<ProblemOutcome>(), o);
}
