#pragma once

// Rule-based metamorphic engine: seeded, semantics-preserving rewrites over
// the syntax tree. Five operator families:
//
//   substitute   bidirectional expression templates (augmented assignment,
//                additive inversion, comparison mirroring, double negation)
//   permute      reorder independent statements of a straight-line block
//   rename       alpha-rename purely local bindings
//   dead_code    insert assignments to fresh, never-read names
//   unreachable  insert `if <constant-false>:` guarded junk
//
// Every rewrite is recorded as an OperatorApplication; replaying the
// recorded plan on the original source reproduces the variant exactly.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mutabench/py/ast.hpp"
#include "mutabench/rng.hpp"

namespace mutabench::rulemut {

enum class Operator : std::size_t { Substitute = 0, Permute, Rename, DeadCode, Unreachable };
inline constexpr std::size_t kOperatorCount = 5;

std::string_view operator_name(Operator op);
std::optional<Operator> parse_operator(std::string_view name);

struct OperatorApplication {
    Operator op = Operator::Substitute;
    py::NodePath site;
    // substitute: which template fired
    std::string template_id;
    // permute: new order of the block's statements
    std::vector<std::size_t> order;
    // rename: identifier mapping
    std::string from;
    std::string to;
    // dead_code / unreachable: insertion index and the inserted statement
    std::size_t index = 0;
    std::string inserted;

    friend bool operator==(const OperatorApplication&, const OperatorApplication&) = default;
};

struct OperatorSettings {
    double weight = 1.0;
    int max_applications = 2;  // per variant
};

struct MutationConfig {
    std::array<OperatorSettings, kOperatorCount> operators{};
    int max_steps = 3;              // operator applications per variant: 1..max_steps
    double site_probability = 0.5;  // per-site rewrite chance (substitute, permute)
    int max_dead_code = 2;          // insertions per function
    int max_unreachable = 1;        // guarded blocks per function

    OperatorSettings& operator[](Operator op) { return operators[static_cast<std::size_t>(op)]; }
    const OperatorSettings& operator[](Operator op) const { return operators[static_cast<std::size_t>(op)]; }

    // All operator weights set to `w`.
    static MutationConfig uniform(double w);
};

struct MutationPlan {
    std::uint64_t seed = 0;
    std::vector<OperatorApplication> steps;
    std::array<double, kOperatorCount> operator_weights{};

    friend bool operator==(const MutationPlan&, const MutationPlan&) = default;
};

struct Variant {
    std::string source;
    MutationPlan plan;
};

// Ordering constraints among the statements of one straight-line block.
// An edge (i, j) means statement j must stay after statement i.
struct DependencyGraph {
    std::size_t size = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    bool has_edge(std::size_t from, std::size_t to) const;
    bool admits(const std::vector<std::size_t>& order) const;
};

DependencyGraph build_dependency_graph(const py::Node& block);

// Number of orders admitted by the graph, saturating at UINT64_MAX.
std::uint64_t count_orders(const DependencyGraph& graph);

// Uniformly random admitted order (exactly uniform up to 20 statements).
std::vector<std::size_t> sample_order(const DependencyGraph& graph, Rng& rng);

// Operators. Each rewrites `module` in place and returns what it did.
std::vector<OperatorApplication> substitute_instructions(py::Node& module, Rng& rng, const MutationConfig& config);
std::vector<OperatorApplication> permute_statements(py::Node& module, Rng& rng, const MutationConfig& config);
std::vector<OperatorApplication> rename_variables(py::Node& module, Rng& rng, const MutationConfig& config);
std::vector<OperatorApplication> insert_dead_code(py::Node& module, Rng& rng, const MutationConfig& config);
std::vector<OperatorApplication> insert_unreachable(py::Node& module, Rng& rng, const MutationConfig& config);

std::vector<OperatorApplication> run_operator(Operator op, py::Node& module, Rng& rng, const MutationConfig& config);

// Re-applies one recorded step. Throws std::invalid_argument when the site
// does not match the recorded operator.
void apply(py::Node& module, const OperatorApplication& step);

// k variants of `source`; variant j draws from derive_seed(seed, "variant", j).
// Output is canonical source text. Throws ParseError on invalid input.
std::vector<Variant> mutate(std::string_view source, std::uint64_t seed, const MutationConfig& config, std::size_t k);

// Applies a recorded plan to the original source.
std::string replay(std::string_view source, const MutationPlan& plan);

// Constant-false guards used by insert_unreachable.
const std::vector<std::string>& opaque_false_catalog();

void to_json(nlohmann::json& j, const OperatorApplication& step);
void from_json(const nlohmann::json& j, OperatorApplication& step);
void to_json(nlohmann::json& j, const MutationPlan& plan);
void from_json(const nlohmann::json& j, MutationPlan& plan);
void to_json(nlohmann::json& j, const MutationConfig& config);
void from_json(const nlohmann::json& j, MutationConfig& config);

}  // namespace mutabench::rulemut
