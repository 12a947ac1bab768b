#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "analysis.hpp"
#include "mutabench/py/parser.hpp"
#include "mutabench/py/printer.hpp"
#include "mutabench/rulemut.hpp"

namespace mutabench::rulemut {

using py::Kind;
using py::Node;
using py::NodePath;

namespace {

bool is_prefix(const NodePath& a, const NodePath& b) {
    return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

std::set<std::string> deleted_names(const Node& body) {
    std::set<std::string> out;
    py::walk(body, [&](const Node& n, const NodePath&) {
        if (n.kind != Kind::Delete) return;
        for (const auto& t : n.kids) {
            std::vector<std::string> names;
            detail::target_names(t, names);
            out.insert(names.begin(), names.end());
        }
    });
    return out;
}

// Names an earlier insertion introduced; dead code never reads them.
bool is_inserted_name(const std::string& name) {
    if (name.size() != 6 || (name[0] != 'd' && name[0] != 'u') || name[1] != '_') return false;
    return std::all_of(name.begin() + 2, name.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || (c >= 'a' && c <= 'f'); });
}

// Names certainly bound when control reaches position `index` of the block
// at `block_path` inside the function at `fn`.
std::vector<std::string> defined_names(const Node& module, const NodePath& fn, const detail::BlockSite& block,
                                       std::size_t index) {
    const Node& def = *py::node_at(module, fn);
    std::set<std::string> names(block.loop_targets.begin(), block.loop_targets.end());
    for (const auto& a : def.kids[0].kids) {
        if (!a.text.empty()) names.insert(a.text);
    }
    for (std::size_t depth = fn.size() + 1; depth <= block.path.size(); ++depth) {
        NodePath prefix(block.path.begin(), block.path.begin() + static_cast<std::ptrdiff_t>(depth));
        const Node* n = py::node_at(module, prefix);
        if (n == nullptr || n->kind != Kind::Block) continue;
        std::size_t limit = depth == block.path.size() ? index : block.path[depth];
        for (std::size_t i = 0; i < limit && i < n->kids.size(); ++i) {
            const Node& s = n->kids[i];
            std::vector<std::string> bound;
            if (s.kind == Kind::Assign) {
                for (std::size_t t = 0; t + 1 < s.kids.size(); ++t) detail::target_names(s.kids[t], bound);
            } else if (s.kind == Kind::AnnAssign && !s.kids[2].empty()) {
                detail::target_names(s.kids[0], bound);
            }
            names.insert(bound.begin(), bound.end());
        }
    }
    for (const auto& d : deleted_names(def.kids[2])) names.erase(d);
    std::erase_if(names, is_inserted_name);
    return {names.begin(), names.end()};
}

Node small_int(Rng& rng) { return py::make_int(static_cast<long long>(rng.between(0, 99))); }

Node literal_arithmetic(Rng& rng) {
    static const char* ops[] = {"+", "-", "*"};
    return py::make_binop(ops[rng.below(3)], small_int(rng), small_int(rng));
}

Node dead_value(Rng& rng, const std::vector<std::string>& names) {
    std::size_t choices = names.empty() ? 2 : 5;
    switch (rng.below(choices)) {
        case 0:
            return literal_arithmetic(rng);
        case 1: {
            Node t(Kind::Tuple);
            t.kids = {small_int(rng), small_int(rng)};
            return t;
        }
        case 2:
            return py::make_name(names[rng.below(names.size())]);
        case 3:
        default: {
            Node none(Kind::Constant, "None");
            none.flags = py::flag::kKeyword;
            return py::make_compare(rng.chance(0.5) ? "is" : "is not", py::make_name(names[rng.below(names.size())]),
                                    std::move(none));
        }
    }
}

struct Placement {
    detail::BlockSite block;
    std::size_t index;
};

Placement pick_placement(const Node& module, const NodePath& fn, Rng& rng) {
    auto blocks = detail::own_blocks(module, fn);
    auto& block = blocks[rng.below(blocks.size())];
    std::size_t size = py::node_at(module, block.path)->kids.size();
    return Placement{std::move(block), static_cast<std::size_t>(rng.below(size + 1))};
}

// Functions chosen for insertion, innermost first so that earlier insertions
// never shift the paths of later ones.
std::vector<NodePath> choose_functions(const Node& module, Rng& rng, double p) {
    auto fns = detail::functions(module);
    std::vector<NodePath> chosen;
    for (const auto& f : fns) {
        if (rng.chance(p)) chosen.push_back(f.path);
    }
    if (chosen.empty() && !fns.empty()) chosen.push_back(fns[rng.below(fns.size())].path);
    std::reverse(chosen.begin(), chosen.end());
    return chosen;
}

std::vector<OperatorApplication> insert(Node& module, Rng& rng, const MutationConfig& config, Operator op) {
    int max_per_function = op == Operator::DeadCode ? config.max_dead_code : config.max_unreachable;
    if (max_per_function < 1) return {};
    auto taken = detail::all_identifiers(module);
    std::vector<OperatorApplication> out;
    for (const auto& fn : choose_functions(module, rng, config.site_probability)) {
        auto count = rng.between(1, max_per_function);
        for (std::int64_t c = 0; c < count; ++c) {
            Placement at = pick_placement(module, fn, rng);
            Node stmt;
            if (op == Operator::DeadCode) {
                auto names = defined_names(module, fn, at.block, at.index);
                stmt = py::make_assign(py::make_name(detail::fresh_name("d_", rng, taken)), dead_value(rng, names));
            } else {
                const auto& catalog = opaque_false_catalog();
                Node guard = py::parse_expression(catalog[rng.below(catalog.size())]);
                Node body(Kind::Block);
                body.kids.push_back(
                    py::make_assign(py::make_name(detail::fresh_name("u_", rng, taken)), literal_arithmetic(rng)));
                stmt = Node(Kind::If);
                stmt.kids = {std::move(guard), std::move(body), Node(Kind::Empty)};
            }
            OperatorApplication app;
            app.op = op;
            app.site = at.block.path;
            app.index = at.index;
            app.inserted = py::print_statement(stmt);
            apply(module, app);
            out.push_back(std::move(app));
        }
    }
    return out;
}

}  // namespace

std::vector<OperatorApplication> insert_dead_code(Node& module, Rng& rng, const MutationConfig& config) {
    return insert(module, rng, config, Operator::DeadCode);
}

std::vector<OperatorApplication> insert_unreachable(Node& module, Rng& rng, const MutationConfig& config) {
    return insert(module, rng, config, Operator::Unreachable);
}

const std::vector<std::string>& opaque_false_catalog() {
    static const std::vector<std::string> catalog = {
        "(1 + 1) == 3", "2 * 3 < 5",        "7 % 3 == 2",        "9 // 2 == 5",     "3 ** 2 < 8",
        "(5 - 5) != 0", "not (4 > 3)",      "(6 & 1) == 1",      "(2 << 3) < 10",   "1 > 2 and 3 < 4",
    };
    return catalog;
}

namespace detail {

void apply_insertion(Node& module, const OperatorApplication& step) {
    Node* block = py::node_at(module, step.site);
    if (block == nullptr || block->kind != Kind::Block) throw std::invalid_argument("insertion site is not a block");
    if (step.index > block->kids.size()) throw std::invalid_argument("insertion index out of range");
    Node parsed = py::parse_module(step.inserted);
    Kind expected = step.op == Operator::DeadCode ? Kind::Assign : Kind::If;
    if (parsed.kids.size() != 1 || parsed.kids[0].kind != expected) {
        throw std::invalid_argument("inserted text is not a single " + std::string(py::kind_name(expected)));
    }
    bool inside_function = false;
    for (const auto& fn : functions(module)) {
        if (is_prefix(fn.path, step.site)) inside_function = true;
    }
    if (!inside_function) throw std::invalid_argument("insertion site is outside every function");
    block->kids.insert(block->kids.begin() + static_cast<std::ptrdiff_t>(step.index), std::move(parsed.kids[0]));
}

}  // namespace detail

}  // namespace mutabench::rulemut
