#include <algorithm>
#include <set>
#include <stdexcept>

#include "analysis.hpp"
#include "mutabench/rulemut.hpp"

namespace mutabench::rulemut {

using py::Kind;
using py::Node;
using py::NodePath;

namespace {

bool is_additive(const std::string& op) { return op == "+" || op == "-"; }

bool is_aug_operator(const std::string& op) { return op == "+" || op == "-" || op == "*"; }

bool is_negated_literal(const Node& n) {
    return n.kind == Kind::UnaryOp && n.text == "-" && detail::is_numeric_literal(n.kids[0]);
}

bool is_numeric_operand(const Node& n) { return detail::is_numeric_literal(n) || is_negated_literal(n); }

bool is_simple_operand(const Node& n) {
    return n.kind == Kind::Name || (n.kind == Kind::Constant && !(n.flags & py::flag::kFString));
}

std::string mirrored(const std::string& op) {
    if (op == "<") return ">";
    if (op == ">") return "<";
    if (op == "<=") return ">=";
    if (op == ">=") return "<=";
    return {};
}

bool is_not(const Node& n) { return n.kind == Kind::UnaryOp && n.text == "not"; }

bool is_loop_or_branch(const Node* parent) {
    return parent != nullptr && (parent->kind == Kind::If || parent->kind == Kind::While);
}

// Templates that apply at `n` (parameter checks are made during site
// collection).
std::vector<std::string> templates_at(const Node& n, const Node* parent, std::size_t slot) {
    std::vector<std::string> out;
    switch (n.kind) {
        case Kind::AugAssign:
            if (is_aug_operator(n.text) && n.kids[0].kind == Kind::Name && detail::is_numeric_literal(n.kids[1])) {
                out.push_back("aug_to_binary");
            }
            break;
        case Kind::Assign:
            if (n.kids.size() == 2 && n.kids[0].kind == Kind::Name && n.kids[1].kind == Kind::BinOp) {
                const Node& v = n.kids[1];
                if (is_aug_operator(v.text) && v.kids[0].kind == Kind::Name && v.kids[0].text == n.kids[0].text &&
                    detail::is_numeric_literal(v.kids[1])) {
                    out.push_back("binary_to_aug");
                }
            }
            break;
        case Kind::BinOp:
            if (is_additive(n.text) && is_numeric_operand(n.kids[1])) out.push_back("negate_operand");
            break;
        case Kind::Compare:
            if (n.names.size() == 1 && !mirrored(n.names[0]).empty() && is_simple_operand(n.kids[0]) &&
                is_simple_operand(n.kids[1])) {
                out.push_back("mirror_compare");
            }
            break;
        default:
            break;
    }
    if (slot == 0 && is_loop_or_branch(parent) && n.kind != Kind::NamedExpr) {
        out.push_back(is_not(n) && is_not(n.kids[0]) ? "drop_double_negation" : "double_negation");
    }
    return out;
}

void rewrite(Node& n, const std::string& id) {
    if (id == "aug_to_binary") {
        Node target = n.kids[0];
        Node value = py::make_binop(n.text, target, n.kids[1]);
        Node out = py::make_assign(std::move(target), std::move(value));
        out.begin = n.begin;
        out.end = n.end;
        out.line = n.line;
        n = std::move(out);
    } else if (id == "binary_to_aug") {
        Node out(Kind::AugAssign, n.kids[1].text);
        out.kids = {n.kids[0], n.kids[1].kids[1]};
        out.begin = n.begin;
        out.end = n.end;
        out.line = n.line;
        n = std::move(out);
    } else if (id == "negate_operand") {
        n.text = n.text == "+" ? "-" : "+";
        Node& right = n.kids[1];
        if (is_negated_literal(right)) {
            Node inner = std::move(right.kids[0]);
            right = std::move(inner);
        } else {
            right = py::make_unary("-", std::move(right));
        }
    } else if (id == "mirror_compare") {
        n.names[0] = mirrored(n.names[0]);
        std::swap(n.kids[0], n.kids[1]);
    } else if (id == "double_negation") {
        n = py::make_unary("not", py::make_unary("not", std::move(n)));
    } else if (id == "drop_double_negation") {
        Node inner = std::move(n.kids[0].kids[0]);
        n = std::move(inner);
    } else {
        throw std::invalid_argument("unknown substitution template: " + id);
    }
}

std::set<std::string> parameter_names(const Node& def) {
    std::set<std::string> out;
    for (const auto& a : def.kids[0].kids) {
        if (!a.text.empty()) out.insert(a.text);
    }
    return out;
}

struct Site {
    NodePath path;
    std::string id;
};

void collect(const Node& n, const Node* parent, NodePath& path, const std::set<std::string>* params,
             std::vector<Site>& out) {
    if (!path.empty()) {
        for (auto& id : templates_at(n, parent, path.back())) {
            bool blocked = (id == "aug_to_binary" || id == "binary_to_aug") && params != nullptr &&
                           params->count(n.kids[0].text) > 0;
            if (!blocked) out.push_back(Site{path, std::move(id)});
        }
    }
    std::set<std::string> own;
    if (n.kind == Kind::FunctionDef) {
        own = parameter_names(n);
        params = &own;
    }
    for (std::size_t i = 0; i < n.kids.size(); ++i) {
        path.push_back(i);
        collect(n.kids[i], &n, path, params, out);
        path.pop_back();
    }
}

bool is_prefix(const NodePath& a, const NodePath& b) {
    return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

std::vector<OperatorApplication> substitute_instructions(Node& module, Rng& rng, const MutationConfig& config) {
    std::vector<Site> sites;
    NodePath path;
    collect(module, nullptr, path, nullptr, sites);
    if (sites.empty()) return {};

    std::vector<const Site*> chosen;
    for (const auto& s : sites) {
        bool nested = std::any_of(chosen.begin(), chosen.end(), [&](const Site* c) { return is_prefix(c->path, s.path); });
        if (!nested && rng.chance(config.site_probability)) chosen.push_back(&s);
    }
    if (chosen.empty()) chosen.push_back(&sites[rng.below(sites.size())]);

    std::vector<OperatorApplication> out;
    for (const Site* s : chosen) {
        OperatorApplication app;
        app.op = Operator::Substitute;
        app.site = s->path;
        app.template_id = s->id;
        apply(module, app);
        out.push_back(std::move(app));
    }
    return out;
}

namespace detail {

void apply_substitution(Node& module, const OperatorApplication& step) {
    if (step.site.empty()) throw std::invalid_argument("substitution site is the module");
    NodePath parent_path(step.site.begin(), step.site.end() - 1);
    Node* parent = py::node_at(module, parent_path);
    Node* n = py::node_at(module, step.site);
    if (parent == nullptr || n == nullptr) throw std::invalid_argument("substitution site out of range");
    auto ids = templates_at(*n, parent, step.site.back());
    if (std::find(ids.begin(), ids.end(), step.template_id) == ids.end()) {
        throw std::invalid_argument("template " + step.template_id + " does not match its site");
    }
    rewrite(*n, step.template_id);
}

}  // namespace detail

}  // namespace mutabench::rulemut
