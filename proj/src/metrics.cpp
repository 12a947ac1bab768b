#include "mutabench/metrics.hpp"

#include <cstdio>
#include <numeric>
#include <set>
#include <stdexcept>

#include "mutabench/error.hpp"

namespace mutabench::metrics {

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g == 0) g = 1;
    num_ = num / g;
    den_ = den / g;
}

Rational operator+(const Rational& a, const Rational& b) {
    std::int64_t l = std::lcm(a.den_, b.den_);
    return Rational(a.num_ * (l / a.den_) + b.num_ * (l / b.den_), l);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("division by zero");
    std::int64_t g1 = std::gcd(a.num_, b.num_);
    std::int64_t g2 = std::gcd(b.den_, a.den_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    return Rational((a.num_ / g1) * (b.den_ / g2), (a.den_ / g2) * (b.num_ / g1));
}

bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

std::string Rational::str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

std::string format_percent(const Rational& r) {
    __int128 scaled = static_cast<__int128>(r.num()) * 10000;
    __int128 q = scaled / r.den();
    if (scaled % r.den() != 0 && scaled < 0) --q;  // floor
    bool negative = q < 0;
    if (negative) q = -q;
    long long whole = static_cast<long long>(q / 100);
    int cents = static_cast<int>(q % 100);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%s%lld.%02d%%", negative ? "-" : "", whole, cents);
    return buf;
}

ProblemOutcome problem_outcome(std::string task_id, const std::vector<SampleResult>& samples, int k) {
    if (k < 1 || samples.size() != static_cast<std::size_t>(k)) {
        throw Error(ErrorKind::SampleCountMismatch, task_id + ": expected " + std::to_string(k) + " samples, got " +
                                                        std::to_string(samples.size()));
    }
    ProblemOutcome o;
    o.task_id = std::move(task_id);
    o.k = k;
    std::set<std::string> distinct;
    for (const auto& s : samples) {
        if (s.verdict != VerdictKind::Pass) continue;
        ++o.n_correct;
        distinct.insert(s.digest);
    }
    o.n_unique_correct = static_cast<int>(distinct.size());
    return o;
}

MetricsSummary summarize(const std::vector<ProblemOutcome>& outcomes) {
    if (outcomes.empty()) throw Error(ErrorKind::EmptyInput, "no problem outcomes to summarize");
    MetricsSummary s;
    s.k = outcomes.front().k;
    s.n_problems = static_cast<int>(outcomes.size());
    Rational total;
    for (const auto& o : outcomes) {
        if (o.k != s.k) {
            throw Error(ErrorKind::MixedK, "mixed k: " + std::to_string(s.k) + " and " + std::to_string(o.k));
        }
        Rational f = o.fraction();
        s.s_values.push_back(f);
        if (f.num() > 0) {
            s.s_prime.push_back(f);
            total = total + f;
        }
    }
    s.pass_at_k = Rational(static_cast<std::int64_t>(s.s_prime.size()), s.n_problems);
    if (s.s_prime.empty()) {
        s.variation_undefined = true;
    } else {
        s.variation_at_k = total / Rational(static_cast<std::int64_t>(s.s_prime.size()));
    }
    return s;
}

bool FeasibilityRegion::contains(const Rational& pass, const Rational& variation) const {
    Rational zero;
    Rational one(1);
    if (pass == zero) return variation == zero;
    if (pass < zero || one < pass) return false;
    return lower <= variation && variation <= one;
}

FeasibilityRegion feasibility_region(int k) {
    if (k < 1) throw std::invalid_argument("k must be positive");
    FeasibilityRegion r;
    r.k = k;
    r.lower = Rational(1, k);
    double lo = r.lower.value();
    r.boundary = {{0.0, lo}, {1.0, lo}, {1.0, 1.0}, {0.0, 1.0}, {0.0, lo}};
    return r;
}

void to_json(nlohmann::json& j, const ProblemOutcome& o) {
    j = nlohmann::json{{"task_id", o.task_id},
                       {"k", o.k},
                       {"n_correct", o.n_correct},
                       {"n_unique_correct", o.n_unique_correct},
                       {"fraction", o.fraction().str()}};
}

void from_json(const nlohmann::json& j, ProblemOutcome& o) {
    o.task_id = j.at("task_id").get<std::string>();
    o.k = j.at("k").get<int>();
    o.n_correct = j.at("n_correct").get<int>();
    o.n_unique_correct = j.at("n_unique_correct").get<int>();
    if (o.k < 1 || o.n_correct < 0 || o.n_correct > o.k || o.n_unique_correct < 0 ||
        o.n_unique_correct > o.n_correct) {
        throw std::invalid_argument("inconsistent outcome counts for " + o.task_id);
    }
}

void to_json(nlohmann::json& j, const MetricsSummary& s) {
    j = nlohmann::json{{"k", s.k},
                       {"n_problems", s.n_problems},
                       {"pass_at_k", s.pass_at_k.str()},
                       {"variation_at_k", s.variation_at_k.str()},
                       {"variation_undefined", s.variation_undefined},
                       {"pass_at_k_percent", format_percent(s.pass_at_k)},
                       {"variation_at_k_percent", format_percent(s.variation_at_k)},
                       {"s_prime_size", s.s_prime.size()}};
}

}  // namespace mutabench::metrics
