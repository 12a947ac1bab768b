#include <stdexcept>

#include "analysis.hpp"
#include "mutabench/canon.hpp"
#include "mutabench/py/parser.hpp"
#include "mutabench/py/printer.hpp"
#include "mutabench/rulemut.hpp"

namespace mutabench::rulemut {

namespace {

constexpr std::array<std::string_view, kOperatorCount> kNames = {"substitute", "permute", "rename", "dead_code",
                                                                 "unreachable"};

py::Node parse_clean(std::string_view source) {
    py::Node tree = py::parse_module(source);
    canon::strip_docstrings(tree);
    return tree;
}

}  // namespace

std::string_view operator_name(Operator op) { return kNames[static_cast<std::size_t>(op)]; }

std::optional<Operator> parse_operator(std::string_view name) {
    for (std::size_t i = 0; i < kOperatorCount; ++i) {
        if (kNames[i] == name) return static_cast<Operator>(i);
    }
    return std::nullopt;
}

MutationConfig MutationConfig::uniform(double w) {
    MutationConfig c;
    for (auto& op : c.operators) op.weight = w;
    return c;
}

std::vector<OperatorApplication> run_operator(Operator op, py::Node& module, Rng& rng, const MutationConfig& config) {
    switch (op) {
        case Operator::Substitute:
            return substitute_instructions(module, rng, config);
        case Operator::Permute:
            return permute_statements(module, rng, config);
        case Operator::Rename:
            return rename_variables(module, rng, config);
        case Operator::DeadCode:
            return insert_dead_code(module, rng, config);
        case Operator::Unreachable:
            return insert_unreachable(module, rng, config);
    }
    return {};
}

void apply(py::Node& module, const OperatorApplication& step) {
    switch (step.op) {
        case Operator::Substitute:
            detail::apply_substitution(module, step);
            return;
        case Operator::Permute:
            detail::apply_permutation(module, step);
            return;
        case Operator::Rename:
            detail::apply_rename(module, step);
            return;
        case Operator::DeadCode:
        case Operator::Unreachable:
            detail::apply_insertion(module, step);
            return;
    }
}

std::vector<Variant> mutate(std::string_view source, std::uint64_t seed, const MutationConfig& config, std::size_t k) {
    const py::Node original = parse_clean(source);
    std::vector<Variant> out;
    out.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        Variant v;
        v.plan.seed = derive_seed(seed, "variant", j);
        for (std::size_t i = 0; i < kOperatorCount; ++i) v.plan.operator_weights[i] = config.operators[i].weight;
        Rng rng(v.plan.seed);
        py::Node tree = original;
        std::array<int, kOperatorCount> used{};
        std::array<bool, kOperatorCount> exhausted{};
        auto steps = rng.between(1, std::max(1, config.max_steps));
        for (std::int64_t s = 0; s < steps; ++s) {
            // Draw until an operator finds a site or none is left.
            while (true) {
                std::array<double, kOperatorCount> weights{};
                for (std::size_t i = 0; i < kOperatorCount; ++i) {
                    bool open = !exhausted[i] && used[i] < config.operators[i].max_applications;
                    weights[i] = open ? std::max(0.0, config.operators[i].weight) : 0.0;
                }
                std::size_t pick = rng.weighted(weights);
                if (pick == kOperatorCount) break;
                auto applied = run_operator(static_cast<Operator>(pick), tree, rng, config);
                if (applied.empty()) {
                    exhausted[pick] = true;
                    continue;
                }
                ++used[pick];
                for (auto& a : applied) v.plan.steps.push_back(std::move(a));
                break;
            }
        }
        v.source = py::print_module(tree);
        out.push_back(std::move(v));
    }
    return out;
}

std::string replay(std::string_view source, const MutationPlan& plan) {
    py::Node tree = parse_clean(source);
    for (const auto& step : plan.steps) apply(tree, step);
    return py::print_module(tree);
}

void to_json(nlohmann::json& j, const OperatorApplication& step) {
    j = nlohmann::json{{"op", operator_name(step.op)}, {"site", step.site}};
    switch (step.op) {
        case Operator::Substitute:
            j["template"] = step.template_id;
            break;
        case Operator::Permute:
            j["order"] = step.order;
            break;
        case Operator::Rename:
            j["from"] = step.from;
            j["to"] = step.to;
            break;
        case Operator::DeadCode:
        case Operator::Unreachable:
            j["index"] = step.index;
            j["inserted"] = step.inserted;
            break;
    }
}

void from_json(const nlohmann::json& j, OperatorApplication& step) {
    auto op = parse_operator(j.at("op").get<std::string>());
    if (!op) throw std::invalid_argument("unknown operator " + j.at("op").get<std::string>());
    step = OperatorApplication{};
    step.op = *op;
    step.site = j.at("site").get<py::NodePath>();
    step.template_id = j.value("template", "");
    step.order = j.value("order", std::vector<std::size_t>{});
    step.from = j.value("from", "");
    step.to = j.value("to", "");
    step.index = j.value("index", std::size_t{0});
    step.inserted = j.value("inserted", "");
}

void to_json(nlohmann::json& j, const MutationPlan& plan) {
    nlohmann::json weights = nlohmann::json::object();
    for (std::size_t i = 0; i < kOperatorCount; ++i) weights[std::string(kNames[i])] = plan.operator_weights[i];
    j = nlohmann::json{{"seed", plan.seed}, {"operator_weights", weights}, {"steps", plan.steps}};
}

void from_json(const nlohmann::json& j, MutationPlan& plan) {
    plan = MutationPlan{};
    plan.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("operator_weights")) {
        for (std::size_t i = 0; i < kOperatorCount; ++i) {
            plan.operator_weights[i] = j["operator_weights"].value(std::string(kNames[i]), 0.0);
        }
    }
    plan.steps = j.value("steps", std::vector<OperatorApplication>{});
}

void to_json(nlohmann::json& j, const MutationConfig& config) {
    nlohmann::json ops = nlohmann::json::object();
    for (std::size_t i = 0; i < kOperatorCount; ++i) {
        ops[std::string(kNames[i])] = {{"weight", config.operators[i].weight},
                                       {"max_applications", config.operators[i].max_applications}};
    }
    j = nlohmann::json{{"operators", ops},
                       {"max_steps", config.max_steps},
                       {"site_probability", config.site_probability},
                       {"max_dead_code", config.max_dead_code},
                       {"max_unreachable", config.max_unreachable}};
}

void from_json(const nlohmann::json& j, MutationConfig& config) {
    config = MutationConfig{};
    if (j.contains("operators")) {
        for (auto& [name, settings] : j["operators"].items()) {
            auto op = parse_operator(name);
            if (!op) throw std::invalid_argument("unknown operator " + name);
            config[*op].weight = settings.value("weight", 1.0);
            config[*op].max_applications = settings.value("max_applications", 2);
        }
    }
    config.max_steps = j.value("max_steps", config.max_steps);
    config.site_probability = j.value("site_probability", config.site_probability);
    config.max_dead_code = j.value("max_dead_code", config.max_dead_code);
    config.max_unreachable = j.value("max_unreachable", config.max_unreachable);
}

}  // namespace mutabench::rulemut
