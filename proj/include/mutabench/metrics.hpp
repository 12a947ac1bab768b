#pragma once

// pass@k and variation@k over exact rationals.
//
//   S  = { unique_correct(i) / k : problem i }
//   S' = { x in S : x > 0 }
//   pass@k      = |S'| / n
//   variation@k = sum(S') / |S'|     (0, flagged undefined, when S' is empty)

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mutabench/verdict.hpp"

namespace mutabench::metrics {

class Rational {
public:
    Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }
    double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend bool operator<(const Rational& a, const Rational& b);
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }

    std::string str() const;  // "n/d", or "n" when d == 1

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

// Percentage truncated (not rounded) to two decimals, e.g. "51.32%".
std::string format_percent(const Rational& r);

struct SampleResult {
    std::string digest;
    VerdictKind verdict = VerdictKind::Fail;
};

struct ProblemOutcome {
    std::string task_id;
    int k = 0;
    int n_correct = 0;
    int n_unique_correct = 0;

    Rational fraction() const { return Rational(n_unique_correct, k); }
    friend bool operator==(const ProblemOutcome&, const ProblemOutcome&) = default;
};

// Throws Error(SampleCountMismatch) when samples.size() != k.
ProblemOutcome problem_outcome(std::string task_id, const std::vector<SampleResult>& samples, int k);

struct MetricsSummary {
    int k = 0;
    int n_problems = 0;
    Rational pass_at_k;
    Rational variation_at_k;
    bool variation_undefined = false;  // S' empty
    std::vector<Rational> s_values;
    std::vector<Rational> s_prime;
};

// Throws Error(EmptyInput) or Error(MixedK).
MetricsSummary summarize(const std::vector<ProblemOutcome>& outcomes);

// {(0,0)} ∪ (0,1] × [1/k, 1]
struct FeasibilityRegion {
    int k = 1;
    Rational lower;  // 1/k
    // Closed boundary of the rectangle part, as (pass, variation) points.
    std::vector<std::pair<double, double>> boundary;

    bool contains(const Rational& pass, const Rational& variation) const;
};

FeasibilityRegion feasibility_region(int k);

void to_json(nlohmann::json& j, const ProblemOutcome& o);
void from_json(const nlohmann::json& j, ProblemOutcome& o);
void to_json(nlohmann::json& j, const MetricsSummary& s);

}  // namespace mutabench::metrics
