#pragma once

// Syntax tree for the Python subset the harness reads and rewrites.
//
// Every node is the same value type; the meaning of `text`, `names` and each
// child slot depends on `kind` (see the layout table below). Optional slots
// hold an `Empty` node so child positions stay fixed, which keeps node paths
// stable under rewriting.
//
//   Module/Block      kids: statements
//   FunctionDef       text: name, flags: kAsync, kids: [Arguments, returns, Block, decorators...]
//   ClassDef          text: name, kids: [Bases, Block, decorators...]
//   Bases             kids: call-style arguments
//   Return            kids: [value]
//   Delete            kids: targets
//   Assign            kids: [targets..., value]
//   AugAssign         text: operator ("+", "//", ...), kids: [target, value]
//   AnnAssign         kids: [target, annotation, value]
//   For               flags: kAsync, kids: [target, iter, body, orelse]
//   While / If        kids: [test, body, orelse]
//   With              flags: kAsync, kids: [body, WithItem...]
//   WithItem          kids: [context, vars]
//   Try               kids: [body, orelse, finalbody, ExceptHandler...]
//   ExceptHandler     text: bound name, kids: [type, body]
//   Raise             kids: [exc, cause]
//   Assert            kids: [test, msg]
//   Import            kids: Alias...
//   ImportFrom        text: module, flags: level, kids: Alias...
//   Alias             text: dotted name, names: [asname] (optional)
//   Global/Nonlocal   names: identifiers
//   ExprStmt          kids: [value]
//
//   BoolOp            text: "and" | "or", kids: values
//   NamedExpr         kids: [target, value]
//   BinOp             text: operator, kids: [left, right]
//   UnaryOp           text: "not" | "-" | "+" | "~", kids: [operand]
//   Lambda            kids: [Arguments, body]
//   IfExp             kids: [body, test, orelse]
//   Dict              kids: key/value pairs; an Empty key marks `**value`
//   Set/List/Tuple    kids: elements
//   ListComp/SetComp/GeneratorExp  kids: [elt, Comprehension...]
//   DictComp          kids: [key, value, Comprehension...]
//   Comprehension     flags: kAsync, kids: [target, iter, ifs...]
//   Await/YieldFrom   kids: [value]
//   Yield             kids: [value]
//   Compare           names: operators, kids: operands (names.size() + 1)
//   Call              kids: [func, args...]; args are expressions, Starred,
//                     Keyword (text: name, kids: [value]) or DoubleStarred
//   Constant          text: literal spelling, flags: kString/kBytes/kFString/kNumber/kImaginary;
//                     string constants keep each adjacent literal token in names
//   Attribute         text: attribute, kids: [value]
//   Subscript         kids: [value, index]
//   Slice             kids: [lower, upper, step]
//   Starred/DoubleStarred kids: [value]
//   Name              text: identifier
//   Arguments         kids: Arg...
//   Arg               text: name, flags: ArgKind, kids: [annotation, default]

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mutabench::py {

enum class Kind : std::uint8_t {
    Empty,
    Module,
    Block,
    FunctionDef,
    ClassDef,
    Bases,
    Return,
    Delete,
    Assign,
    AugAssign,
    AnnAssign,
    For,
    While,
    If,
    With,
    WithItem,
    Try,
    ExceptHandler,
    Raise,
    Assert,
    Import,
    ImportFrom,
    Alias,
    Global,
    Nonlocal,
    ExprStmt,
    Pass,
    Break,
    Continue,
    BoolOp,
    NamedExpr,
    BinOp,
    UnaryOp,
    Lambda,
    IfExp,
    Dict,
    Set,
    List,
    Tuple,
    ListComp,
    SetComp,
    DictComp,
    GeneratorExp,
    Comprehension,
    Await,
    Yield,
    YieldFrom,
    Compare,
    Call,
    Keyword,
    Constant,
    Attribute,
    Subscript,
    Slice,
    Starred,
    DoubleStarred,
    Name,
    Arguments,
    Arg,
};

const char* kind_name(Kind kind);

namespace flag {
inline constexpr int kAsync = 1;

inline constexpr int kString = 1;
inline constexpr int kBytes = 2;
inline constexpr int kFString = 4;
inline constexpr int kNumber = 8;
inline constexpr int kImaginary = 16;
inline constexpr int kKeyword = 32;  // None / True / False / ...
}  // namespace flag

enum class ArgKind : int { Plain = 0, VarArgs, KwArgs, BareStar, Slash };

struct Node {
    Kind kind = Kind::Empty;
    std::string text;
    std::vector<std::string> names;
    std::vector<Node> kids;
    int flags = 0;
    // Byte range of the node in the parsed source; only statements carry it.
    std::size_t begin = 0;
    std::size_t end = 0;
    int line = 0;

    Node() = default;
    explicit Node(Kind k) : kind(k) {}
    Node(Kind k, std::string t) : kind(k), text(std::move(t)) {}

    bool empty() const noexcept { return kind == Kind::Empty; }
    bool is_statement() const noexcept;
    bool is_block() const noexcept { return kind == Kind::Block || kind == Kind::Module; }
};

// Position of a node relative to the tree root, as successive child indices.
using NodePath = std::vector<std::size_t>;

// Structural equality; ignores source positions.
bool same_tree(const Node& a, const Node& b);

Node make_name(std::string id);
Node make_int(long long value);
Node make_binop(std::string op, Node left, Node right);
Node make_unary(std::string op, Node operand);
Node make_compare(std::string op, Node left, Node right);
Node make_assign(Node target, Node value);

Node* node_at(Node& root, const NodePath& path);
const Node* node_at(const Node& root, const NodePath& path);

// Depth-first, parent before children; the visitor receives each node and its path.
template <typename Visitor>
void walk(const Node& node, Visitor&& visit, NodePath& path) {
    visit(node, path);
    for (std::size_t i = 0; i < node.kids.size(); ++i) {
        path.push_back(i);
        walk(node.kids[i], visit, path);
        path.pop_back();
    }
}

template <typename Visitor>
void walk(const Node& node, Visitor&& visit) {
    NodePath path;
    walk(node, visit, path);
}

}  // namespace mutabench::py
