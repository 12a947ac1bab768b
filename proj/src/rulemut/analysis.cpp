#include "analysis.hpp"

#include <cctype>
#include <cstdio>

namespace mutabench::rulemut::detail {

using py::Kind;
using py::Node;
using py::NodePath;

namespace {

bool raising_operator(const std::string& op) {
    return op == "/" || op == "//" || op == "%" || op == "**" || op == "<<" || op == ">>" || op == "@";
}

// Expression walk for one statement: collects loads and flags constructs
// that make the statement a barrier or a potential raiser.
void scan_expression(const Node& n, Effects& fx) {
    switch (n.kind) {
        case Kind::Name:
            fx.reads.insert(n.text);
            return;
        case Kind::Call:
        case Kind::Attribute:
        case Kind::Yield:
        case Kind::YieldFrom:
        case Kind::Await:
        case Kind::NamedExpr:
            fx.barrier = true;
            break;
        case Kind::Subscript:
            fx.may_raise = true;
            break;
        case Kind::BinOp:
            if (raising_operator(n.text)) fx.may_raise = true;
            break;
        case Kind::Constant:
            if (n.flags & py::flag::kFString) {
                for (const auto& id : fstring_identifiers(n)) fx.reads.insert(id);
            }
            return;
        default:
            break;
    }
    for (const auto& kid : n.kids) scan_expression(kid, fx);
}

void scan_target(const Node& t, Effects& fx) {
    switch (t.kind) {
        case Kind::Name:
            fx.writes.insert(t.text);
            return;
        case Kind::Tuple:
        case Kind::List:
            // Unpacking raises on length mismatch.
            fx.may_raise = true;
            for (const auto& k : t.kids) scan_target(k, fx);
            return;
        case Kind::Starred:
            scan_target(t.kids[0], fx);
            return;
        default:
            // Attribute or subscript stores mutate shared state.
            fx.barrier = true;
            scan_expression(t, fx);
            return;
    }
}

void scan_fstring(std::string_view raw, std::set<std::string>& out) {
    // Identifiers inside {...} fields, skipping {{ escapes and string quotes
    // nested in the field.
    int depth = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        char c = raw[i];
        if (depth == 0) {
            if (c == '{') {
                if (i + 1 < raw.size() && raw[i + 1] == '{') {
                    ++i;
                    continue;
                }
                depth = 1;
            }
            continue;
        }
        if (c == '{') {
            ++depth;
        } else if (c == '}') {
            --depth;
        } else if (c == '\'' || c == '"') {
            std::size_t close = raw.find(c, i + 1);
            if (close == std::string_view::npos) return;
            i = close;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < raw.size() && (std::isalnum(static_cast<unsigned char>(raw[j])) || raw[j] == '_')) ++j;
            bool attribute = i > 0 && raw[i - 1] == '.';
            if (!attribute) out.emplace(raw.substr(i, j - i));
            i = j - 1;
        }
    }
}

void collect_functions(const Node& n, NodePath& path, bool inside_function, std::vector<FunctionSite>& out) {
    bool is_fn = n.kind == Kind::FunctionDef;
    if (is_fn) out.push_back(FunctionSite{path, inside_function});
    for (std::size_t i = 0; i < n.kids.size(); ++i) {
        path.push_back(i);
        collect_functions(n.kids[i], path, inside_function || is_fn, out);
        path.pop_back();
    }
}

void collect_blocks(const Node& block, NodePath& path, bool guarded, std::vector<std::string>& loops,
                    std::vector<BlockSite>& out) {
    out.push_back(BlockSite{path, guarded, loops});
    for (std::size_t i = 0; i < block.kids.size(); ++i) {
        const Node& s = block.kids[i];
        path.push_back(i);
        auto child_block = [&](std::size_t slot, bool g) {
            if (slot < s.kids.size() && s.kids[slot].kind == Kind::Block) {
                path.push_back(slot);
                collect_blocks(s.kids[slot], path, g, loops, out);
                path.pop_back();
            }
        };
        switch (s.kind) {
            case Kind::If:
            case Kind::While:
                child_block(1, guarded);
                child_block(2, guarded);
                break;
            case Kind::For: {
                std::vector<std::string> names;
                target_names(s.kids[0], names);
                std::size_t before = loops.size();
                loops.insert(loops.end(), names.begin(), names.end());
                child_block(2, guarded);
                loops.resize(before);
                child_block(3, guarded);
                break;
            }
            case Kind::With:
                child_block(0, true);
                break;
            case Kind::Try:
                child_block(0, true);
                child_block(1, true);
                child_block(2, true);
                for (std::size_t h = 3; h < s.kids.size(); ++h) {
                    path.push_back(h);
                    path.push_back(1);
                    collect_blocks(s.kids[h].kids[1], path, true, loops, out);
                    path.pop_back();
                    path.pop_back();
                }
                break;
            default:
                break;
        }
        path.pop_back();
    }
}

}  // namespace

Effects statement_effects(const Node& stmt) {
    Effects fx;
    switch (stmt.kind) {
        case Kind::Assign:
            for (std::size_t i = 0; i + 1 < stmt.kids.size(); ++i) scan_target(stmt.kids[i], fx);
            scan_expression(stmt.kids.back(), fx);
            break;
        case Kind::AugAssign:
            scan_target(stmt.kids[0], fx);
            scan_expression(stmt.kids[0], fx);
            scan_expression(stmt.kids[1], fx);
            if (raising_operator(stmt.text)) fx.may_raise = true;
            break;
        case Kind::AnnAssign:
            if (stmt.kids[2].empty()) {
                fx.barrier = true;
                break;
            }
            scan_target(stmt.kids[0], fx);
            scan_expression(stmt.kids[1], fx);
            scan_expression(stmt.kids[2], fx);
            break;
        case Kind::ExprStmt:
            scan_expression(stmt.kids[0], fx);
            break;
        case Kind::Pass:
            break;
        default:
            fx.barrier = true;
            break;
    }
    return fx;
}

void target_names(const Node& target, std::vector<std::string>& out) {
    switch (target.kind) {
        case Kind::Name:
            out.push_back(target.text);
            return;
        case Kind::Tuple:
        case Kind::List:
            for (const auto& k : target.kids) target_names(k, out);
            return;
        case Kind::Starred:
            target_names(target.kids[0], out);
            return;
        default:
            return;
    }
}

std::set<std::string> fstring_identifiers(const Node& tree) {
    std::set<std::string> out;
    py::walk(tree, [&](const Node& n, const NodePath&) {
        if (n.kind == Kind::Constant && (n.flags & py::flag::kFString)) {
            for (const auto& part : n.names) scan_fstring(part, out);
        }
    });
    return out;
}

std::set<std::string> all_identifiers(const Node& tree) {
    std::set<std::string> out;
    py::walk(tree, [&](const Node& n, const NodePath&) {
        switch (n.kind) {
            case Kind::Name:
            case Kind::Attribute:
            case Kind::Keyword:
            case Kind::FunctionDef:
            case Kind::ClassDef:
            case Kind::Arg:
            case Kind::ExceptHandler:
            case Kind::Alias:
                if (!n.text.empty()) out.insert(n.text);
                for (const auto& a : n.names) out.insert(a);
                break;
            case Kind::Global:
            case Kind::Nonlocal:
                out.insert(n.names.begin(), n.names.end());
                break;
            default:
                break;
        }
    });
    auto fs = fstring_identifiers(tree);
    out.insert(fs.begin(), fs.end());
    return out;
}

std::vector<FunctionSite> functions(const Node& module) {
    std::vector<FunctionSite> out;
    NodePath path;
    collect_functions(module, path, false, out);
    return out;
}

std::vector<BlockSite> own_blocks(const Node& module, const NodePath& fn) {
    std::vector<BlockSite> out;
    const Node* def = py::node_at(module, fn);
    if (def == nullptr || def->kind != Kind::FunctionDef) return out;
    NodePath path = fn;
    path.push_back(2);
    std::vector<std::string> loops;
    collect_blocks(def->kids[2], path, false, loops, out);
    return out;
}

std::string fresh_name(std::string_view prefix, Rng& rng, std::set<std::string>& taken) {
    while (true) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "%04x", static_cast<unsigned>(rng.below(0x10000)));
        std::string name = std::string(prefix) + buf;
        if (taken.insert(name).second) return name;
    }
}

bool is_numeric_literal(const Node& n) {
    return n.kind == Kind::Constant && (n.flags & py::flag::kNumber) && !(n.flags & py::flag::kImaginary);
}

}  // namespace mutabench::rulemut::detail
