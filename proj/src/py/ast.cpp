#include "mutabench/py/ast.hpp"

#include <string>

namespace mutabench::py {

const char* kind_name(Kind kind) {
    switch (kind) {
        case Kind::Empty: return "Empty";
        case Kind::Module: return "Module";
        case Kind::Block: return "Block";
        case Kind::FunctionDef: return "FunctionDef";
        case Kind::ClassDef: return "ClassDef";
        case Kind::Bases: return "Bases";
        case Kind::Return: return "Return";
        case Kind::Delete: return "Delete";
        case Kind::Assign: return "Assign";
        case Kind::AugAssign: return "AugAssign";
        case Kind::AnnAssign: return "AnnAssign";
        case Kind::For: return "For";
        case Kind::While: return "While";
        case Kind::If: return "If";
        case Kind::With: return "With";
        case Kind::WithItem: return "WithItem";
        case Kind::Try: return "Try";
        case Kind::ExceptHandler: return "ExceptHandler";
        case Kind::Raise: return "Raise";
        case Kind::Assert: return "Assert";
        case Kind::Import: return "Import";
        case Kind::ImportFrom: return "ImportFrom";
        case Kind::Alias: return "Alias";
        case Kind::Global: return "Global";
        case Kind::Nonlocal: return "Nonlocal";
        case Kind::ExprStmt: return "ExprStmt";
        case Kind::Pass: return "Pass";
        case Kind::Break: return "Break";
        case Kind::Continue: return "Continue";
        case Kind::BoolOp: return "BoolOp";
        case Kind::NamedExpr: return "NamedExpr";
        case Kind::BinOp: return "BinOp";
        case Kind::UnaryOp: return "UnaryOp";
        case Kind::Lambda: return "Lambda";
        case Kind::IfExp: return "IfExp";
        case Kind::Dict: return "Dict";
        case Kind::Set: return "Set";
        case Kind::List: return "List";
        case Kind::Tuple: return "Tuple";
        case Kind::ListComp: return "ListComp";
        case Kind::SetComp: return "SetComp";
        case Kind::DictComp: return "DictComp";
        case Kind::GeneratorExp: return "GeneratorExp";
        case Kind::Comprehension: return "Comprehension";
        case Kind::Await: return "Await";
        case Kind::Yield: return "Yield";
        case Kind::YieldFrom: return "YieldFrom";
        case Kind::Compare: return "Compare";
        case Kind::Call: return "Call";
        case Kind::Keyword: return "Keyword";
        case Kind::Constant: return "Constant";
        case Kind::Attribute: return "Attribute";
        case Kind::Subscript: return "Subscript";
        case Kind::Slice: return "Slice";
        case Kind::Starred: return "Starred";
        case Kind::DoubleStarred: return "DoubleStarred";
        case Kind::Name: return "Name";
        case Kind::Arguments: return "Arguments";
        case Kind::Arg: return "Arg";
    }
    return "?";
}

bool Node::is_statement() const noexcept {
    switch (kind) {
        case Kind::FunctionDef:
        case Kind::ClassDef:
        case Kind::Return:
        case Kind::Delete:
        case Kind::Assign:
        case Kind::AugAssign:
        case Kind::AnnAssign:
        case Kind::For:
        case Kind::While:
        case Kind::If:
        case Kind::With:
        case Kind::Try:
        case Kind::Raise:
        case Kind::Assert:
        case Kind::Import:
        case Kind::ImportFrom:
        case Kind::Global:
        case Kind::Nonlocal:
        case Kind::ExprStmt:
        case Kind::Pass:
        case Kind::Break:
        case Kind::Continue:
            return true;
        default:
            return false;
    }
}

bool same_tree(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.text != b.text || a.flags != b.flags || a.names != b.names ||
        a.kids.size() != b.kids.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.kids.size(); ++i) {
        if (!same_tree(a.kids[i], b.kids[i])) return false;
    }
    return true;
}

Node make_name(std::string id) {
    return Node(Kind::Name, std::move(id));
}

Node make_int(long long value) {
    Node c(Kind::Constant, std::to_string(value));
    c.flags = flag::kNumber;
    if (value < 0) {
        c.text = std::to_string(-value);
        return make_unary("-", std::move(c));
    }
    return c;
}

Node make_binop(std::string op, Node left, Node right) {
    Node n(Kind::BinOp, std::move(op));
    n.kids.push_back(std::move(left));
    n.kids.push_back(std::move(right));
    return n;
}

Node make_unary(std::string op, Node operand) {
    Node n(Kind::UnaryOp, std::move(op));
    n.kids.push_back(std::move(operand));
    return n;
}

Node make_compare(std::string op, Node left, Node right) {
    Node n(Kind::Compare);
    n.names.push_back(std::move(op));
    n.kids.push_back(std::move(left));
    n.kids.push_back(std::move(right));
    return n;
}

Node make_assign(Node target, Node value) {
    Node n(Kind::Assign);
    n.kids.push_back(std::move(target));
    n.kids.push_back(std::move(value));
    return n;
}

Node* node_at(Node& root, const NodePath& path) {
    Node* n = &root;
    for (std::size_t i : path) {
        if (i >= n->kids.size()) return nullptr;
        n = &n->kids[i];
    }
    return n;
}

const Node* node_at(const Node& root, const NodePath& path) {
    const Node* n = &root;
    for (std::size_t i : path) {
        if (i >= n->kids.size()) return nullptr;
        n = &n->kids[i];
    }
    return n;
}

}  // namespace mutabench::py
