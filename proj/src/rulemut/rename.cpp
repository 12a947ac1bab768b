#include <algorithm>
#include <stdexcept>

#include "analysis.hpp"
#include "mutabench/rulemut.hpp"

namespace mutabench::rulemut {

using py::Kind;
using py::Node;
using py::NodePath;

namespace {

bool is_dunder(const std::string& name) {
    return name.size() > 4 && name.starts_with("__") && name.ends_with("__");
}

bool uses_dynamic_scope(const Node& body) {
    bool found = false;
    py::walk(body, [&](const Node& n, const NodePath&) {
        if (n.kind == Kind::ClassDef) found = true;
        if (n.kind == Kind::Call && n.kids[0].kind == Kind::Name) {
            const std::string& f = n.kids[0].text;
            if (f == "locals" || f == "vars" || f == "eval" || f == "exec" || f == "dir" || f == "globals") {
                found = true;
            }
        }
    });
    return found;
}

struct Scope {
    std::set<std::string> bound;
    std::set<std::string> excluded;
};

void bind_target(const Node& t, std::set<std::string>& out) {
    std::vector<std::string> names;
    detail::target_names(t, names);
    out.insert(names.begin(), names.end());
}

// `own` is false inside nested functions and lambdas, whose bindings are
// separate variables. Comprehension targets never bind in the function.
void scan(const Node& n, Scope& scope, bool own) {
    std::set<std::string> ignored;
    std::set<std::string>& bound = own ? scope.bound : ignored;
    switch (n.kind) {
        case Kind::Assign:
            for (std::size_t i = 0; i + 1 < n.kids.size(); ++i) bind_target(n.kids[i], bound);
            break;
        case Kind::AugAssign:
        case Kind::AnnAssign:
        case Kind::For:
        case Kind::NamedExpr:
            bind_target(n.kids[0], bound);
            break;
        case Kind::WithItem:
            bind_target(n.kids[1], bound);
            break;
        case Kind::Delete:
            for (const auto& t : n.kids) bind_target(t, bound);
            break;
        case Kind::ExceptHandler:
            if (!n.text.empty()) bound.insert(n.text);
            break;
        case Kind::Global:
        case Kind::Nonlocal:
            scope.excluded.insert(n.names.begin(), n.names.end());
            break;
        case Kind::Import:
        case Kind::ImportFrom:
            for (const auto& alias : n.kids) {
                if (!alias.names.empty()) {
                    scope.excluded.insert(alias.names[0]);
                } else {
                    scope.excluded.insert(alias.text.substr(0, alias.text.find('.')));
                }
            }
            break;
        case Kind::FunctionDef:
        case Kind::ClassDef:
            scope.excluded.insert(n.text);
            break;
        case Kind::Arg:
            // Parameters of nested functions and lambdas.
            if (!n.text.empty()) scope.excluded.insert(n.text);
            break;
        default:
            break;
    }
    bool inner = own && n.kind != Kind::FunctionDef && n.kind != Kind::Lambda;
    for (const auto& k : n.kids) scan(k, scope, inner);
}

void rename_in(Node& n, const std::string& from, const std::string& to) {
    if ((n.kind == Kind::Name || n.kind == Kind::ExceptHandler) && n.text == from) n.text = to;
    for (auto& k : n.kids) rename_in(k, from, to);
}

// Names that can be renamed inside the function body without changing
// behaviour; sorted.
std::vector<std::string> renamable(const Node& def) {
    const Node& body = def.kids[2];
    if (uses_dynamic_scope(body)) return {};
    Scope scope;
    scan(body, scope, true);
    for (const auto& a : def.kids[0].kids) scope.excluded.insert(a.text);
    auto fs = detail::fstring_identifiers(body);
    std::vector<std::string> out;
    for (const auto& name : scope.bound) {
        if (scope.excluded.count(name) || fs.count(name) || is_dunder(name)) continue;
        out.push_back(name);
    }
    return out;
}

Node& function_at(Node& module, const NodePath& site) {
    Node* def = py::node_at(module, site);
    if (def == nullptr || def->kind != Kind::FunctionDef) throw std::invalid_argument("rename site is not a function");
    return *def;
}

}  // namespace

std::vector<OperatorApplication> rename_variables(Node& module, Rng& rng, const MutationConfig& config) {
    struct Candidate {
        NodePath path;
        std::string name;
    };
    std::vector<Candidate> candidates;
    for (const auto& fn : detail::functions(module)) {
        if (fn.nested) continue;
        for (auto& name : renamable(*py::node_at(module, fn.path))) candidates.push_back(Candidate{fn.path, name});
    }
    if (candidates.empty()) return {};

    std::vector<const Candidate*> chosen;
    for (const auto& c : candidates) {
        if (rng.chance(config.site_probability)) chosen.push_back(&c);
    }
    if (chosen.empty()) chosen.push_back(&candidates[rng.below(candidates.size())]);

    auto taken = detail::all_identifiers(module);
    std::vector<OperatorApplication> out;
    for (const Candidate* c : chosen) {
        OperatorApplication app;
        app.op = Operator::Rename;
        app.site = c->path;
        app.from = c->name;
        app.to = detail::fresh_name("v_", rng, taken);
        apply(module, app);
        out.push_back(std::move(app));
    }
    return out;
}

namespace detail {

void apply_rename(Node& module, const OperatorApplication& step) {
    Node& def = function_at(module, step.site);
    auto names = renamable(def);
    if (!std::binary_search(names.begin(), names.end(), step.from)) {
        throw std::invalid_argument("cannot rename " + step.from);
    }
    if (all_identifiers(module).count(step.to)) throw std::invalid_argument("rename target " + step.to + " is taken");
    rename_in(def.kids[2], step.from, step.to);
}

}  // namespace detail

}  // namespace mutabench::rulemut
