#include "mutabench/py/printer.hpp"

#include <stdexcept>

#include "mutabench/py/literals.hpp"

namespace mutabench::py {
namespace {

// Binding strength, weakest first.
enum Prec : int {
    kNamedExpr = 1,
    kTuple,
    kYield,
    kTest,
    kOr,
    kAnd,
    kNot,
    kCmp,
    kBor,
    kBxor,
    kBand,
    kShift,
    kArith,
    kTerm,
    kFactor,
    kPower,
    kAwait,
    kAtom,
};

int binop_prec(const std::string& op) {
    if (op == "|") return kBor;
    if (op == "^") return kBxor;
    if (op == "&") return kBand;
    if (op == "<<" || op == ">>") return kShift;
    if (op == "+" || op == "-") return kArith;
    if (op == "**") return kPower;
    return kTerm;
}

int precedence(const Node& n) {
    switch (n.kind) {
        case Kind::NamedExpr: return kNamedExpr;
        case Kind::Yield:
        case Kind::YieldFrom: return kYield;
        case Kind::Lambda:
        case Kind::IfExp: return kTest;
        case Kind::BoolOp: return n.text == "or" ? kOr : kAnd;
        case Kind::UnaryOp: return n.text == "not" ? kNot : kFactor;
        case Kind::Compare: return kCmp;
        case Kind::BinOp: return binop_prec(n.text);
        case Kind::Await: return kAwait;
        case Kind::Starred: return kBor;
        default: return kAtom;
    }
}

class Printer {
public:
    std::string module(const Node& mod) {
        for (const auto& s : mod.kids) statement(s, 0);
        return finish();
    }

    std::string lone_statement(const Node& s) {
        statement(s, 0);
        return finish();
    }

    std::string expr(const Node& n, int ctx) {
        std::string body = expr_body(n);
        if (precedence(n) < ctx) return "(" + body + ")";
        return body;
    }

private:
    std::string finish() {
        if (!out_.empty() && out_.back() == '\n') out_.pop_back();
        return std::move(out_);
    }

    void line(int indent, const std::string& text) {
        out_.append(static_cast<std::size_t>(indent) * 4, ' ');
        out_ += text;
        out_ += '\n';
    }

    void body(const Node& block, int indent) {
        if (block.kids.empty()) {
            line(indent, "pass");
            return;
        }
        for (const auto& s : block.kids) statement(s, indent);
    }

    std::string opt(const Node& n, int ctx) { return n.empty() ? std::string() : expr(n, ctx); }

    std::string comma_list(const std::vector<Node>& items, std::size_t from, int ctx) {
        std::string out;
        for (std::size_t i = from; i < items.size(); ++i) {
            if (i > from) out += ", ";
            out += expr(items[i], ctx);
        }
        return out;
    }

    void statement(const Node& s, int indent) {
        switch (s.kind) {
            case Kind::FunctionDef: {
                for (std::size_t i = 3; i < s.kids.size(); ++i) line(indent, "@" + expr(s.kids[i], kTest));
                std::string head = (s.flags & flag::kAsync) ? "async def " : "def ";
                head += s.text + "(" + arguments(s.kids[0]) + ")";
                if (!s.kids[1].empty()) head += " -> " + expr(s.kids[1], kTest);
                line(indent, head + ":");
                body(s.kids[2], indent + 1);
                return;
            }
            case Kind::ClassDef: {
                for (std::size_t i = 2; i < s.kids.size(); ++i) line(indent, "@" + expr(s.kids[i], kTest));
                std::string head = "class " + s.text;
                if (!s.kids[0].kids.empty()) head += "(" + call_args(s.kids[0].kids, 0) + ")";
                line(indent, head + ":");
                body(s.kids[1], indent + 1);
                return;
            }
            case Kind::Return:
                line(indent, s.kids[0].empty() ? "return" : "return " + expr(s.kids[0], kTest));
                return;
            case Kind::Delete:
                line(indent, "del " + comma_list(s.kids, 0, kTest));
                return;
            case Kind::Assign: {
                std::string text;
                for (std::size_t i = 0; i + 1 < s.kids.size(); ++i) text += expr(s.kids[i], kTest) + " = ";
                text += expr(s.kids.back(), kYield);
                line(indent, text);
                return;
            }
            case Kind::AugAssign:
                line(indent, expr(s.kids[0], kTest) + " " + s.text + "= " + expr(s.kids[1], kYield));
                return;
            case Kind::AnnAssign: {
                std::string text = expr(s.kids[0], kTest) + ": " + expr(s.kids[1], kTest);
                if (!s.kids[2].empty()) text += " = " + expr(s.kids[2], kYield);
                line(indent, text);
                return;
            }
            case Kind::For: {
                std::string head = (s.flags & flag::kAsync) ? "async for " : "for ";
                line(indent, head + expr(s.kids[0], kTest) + " in " + expr(s.kids[1], kTest) + ":");
                body(s.kids[2], indent + 1);
                orelse(s.kids[3], indent);
                return;
            }
            case Kind::While:
                line(indent, "while " + expr(s.kids[0], kTest) + ":");
                body(s.kids[1], indent + 1);
                orelse(s.kids[2], indent);
                return;
            case Kind::If:
                if_chain(s, indent, "if ");
                return;
            case Kind::With: {
                std::string head = (s.flags & flag::kAsync) ? "async with " : "with ";
                for (std::size_t i = 1; i < s.kids.size(); ++i) {
                    if (i > 1) head += ", ";
                    head += expr(s.kids[i].kids[0], kTest);
                    if (!s.kids[i].kids[1].empty()) head += " as " + expr(s.kids[i].kids[1], kTest);
                }
                line(indent, head + ":");
                body(s.kids[0], indent + 1);
                return;
            }
            case Kind::Try: {
                line(indent, "try:");
                body(s.kids[0], indent + 1);
                for (std::size_t i = 3; i < s.kids.size(); ++i) {
                    const Node& h = s.kids[i];
                    std::string head = "except";
                    if (!h.kids[0].empty()) head += " " + expr(h.kids[0], kTest);
                    if (!h.text.empty()) head += " as " + h.text;
                    line(indent, head + ":");
                    body(h.kids[1], indent + 1);
                }
                orelse(s.kids[1], indent);
                if (!s.kids[2].empty()) {
                    line(indent, "finally:");
                    body(s.kids[2], indent + 1);
                }
                return;
            }
            case Kind::Raise: {
                std::string text = "raise";
                if (!s.kids[0].empty()) text += " " + expr(s.kids[0], kTest);
                if (!s.kids[1].empty()) text += " from " + expr(s.kids[1], kTest);
                line(indent, text);
                return;
            }
            case Kind::Assert: {
                std::string text = "assert " + expr(s.kids[0], kTest);
                if (!s.kids[1].empty()) text += ", " + expr(s.kids[1], kTest);
                line(indent, text);
                return;
            }
            case Kind::Import:
                line(indent, "import " + aliases(s));
                return;
            case Kind::ImportFrom:
                line(indent, "from " + std::string(static_cast<std::size_t>(s.flags), '.') + s.text + " import " + aliases(s));
                return;
            case Kind::Global:
            case Kind::Nonlocal: {
                std::string text = s.kind == Kind::Global ? "global " : "nonlocal ";
                for (std::size_t i = 0; i < s.names.size(); ++i) text += (i ? ", " : "") + s.names[i];
                line(indent, text);
                return;
            }
            case Kind::ExprStmt:
                line(indent, expr(s.kids[0], kYield));
                return;
            case Kind::Pass:
                line(indent, "pass");
                return;
            case Kind::Break:
                line(indent, "break");
                return;
            case Kind::Continue:
                line(indent, "continue");
                return;
            default:
                throw std::logic_error(std::string("not a statement: ") + kind_name(s.kind));
        }
    }

    void orelse(const Node& block, int indent) {
        if (block.empty()) return;
        line(indent, "else:");
        body(block, indent + 1);
    }

    void if_chain(const Node& s, int indent, const char* keyword) {
        line(indent, keyword + expr(s.kids[0], kTest) + ":");
        body(s.kids[1], indent + 1);
        const Node& rest = s.kids[2];
        if (rest.empty()) return;
        if (rest.kids.size() == 1 && rest.kids[0].kind == Kind::If) {
            if_chain(rest.kids[0], indent, "elif ");
            return;
        }
        line(indent, "else:");
        body(rest, indent + 1);
    }

    std::string aliases(const Node& s) {
        std::string out;
        for (std::size_t i = 0; i < s.kids.size(); ++i) {
            if (i) out += ", ";
            out += s.kids[i].text;
            if (!s.kids[i].names.empty()) out += " as " + s.kids[i].names[0];
        }
        return out;
    }

    std::string arguments(const Node& args) {
        std::string out;
        for (std::size_t i = 0; i < args.kids.size(); ++i) {
            const Node& a = args.kids[i];
            if (i) out += ", ";
            switch (static_cast<ArgKind>(a.flags)) {
                case ArgKind::Slash: out += "/"; continue;
                case ArgKind::BareStar: out += "*"; continue;
                case ArgKind::VarArgs: out += "*"; break;
                case ArgKind::KwArgs: out += "**"; break;
                case ArgKind::Plain: break;
            }
            out += a.text;
            bool annotated = !a.kids[0].empty();
            if (annotated) out += ": " + expr(a.kids[0], kTest);
            if (!a.kids[1].empty()) out += (annotated ? " = " : "=") + expr(a.kids[1], kTest);
        }
        return out;
    }

    std::string call_args(const std::vector<Node>& args, std::size_t from) {
        std::string out;
        for (std::size_t i = from; i < args.size(); ++i) {
            if (i > from) out += ", ";
            const Node& a = args[i];
            if (a.kind == Kind::Keyword) {
                out += a.text + "=" + expr(a.kids[0], kTest);
            } else if (a.kind == Kind::DoubleStarred) {
                out += "**" + expr(a.kids[0], kBor);
            } else if (a.kind == Kind::Starred) {
                out += "*" + expr(a.kids[0], kBor);
            } else {
                out += expr(a, kTest);
            }
        }
        return out;
    }

    std::string comprehensions(const Node& n, std::size_t from) {
        std::string out;
        for (std::size_t i = from; i < n.kids.size(); ++i) {
            const Node& c = n.kids[i];
            out += (c.flags & flag::kAsync) ? " async for " : " for ";
            out += expr(c.kids[0], kTest) + " in " + expr(c.kids[1], kOr);
            for (std::size_t j = 2; j < c.kids.size(); ++j) out += " if " + expr(c.kids[j], kOr);
        }
        return out;
    }

    std::string constant(const Node& n) {
        if (n.flags & flag::kNumber) return normalize_number_literal(n.text);
        if (n.flags & (flag::kString | flag::kBytes)) {
            if (auto norm = normalize_string_literal(n.names)) return *norm;
        }
        return n.text;
    }

    std::string subscript_index(const Node& idx) {
        if (idx.kind == Kind::Tuple && !idx.kids.empty()) {
            bool starred = false;
            for (const auto& k : idx.kids) starred = starred || k.kind == Kind::Starred;
            if (!starred) {
                std::string out;
                for (std::size_t i = 0; i < idx.kids.size(); ++i) {
                    if (i) out += ", ";
                    out += slice_part(idx.kids[i]);
                }
                if (idx.kids.size() == 1) out += ",";
                return out;
            }
        }
        return slice_part(idx);
    }

    std::string slice_part(const Node& n) {
        if (n.kind != Kind::Slice) return expr(n, kTest);
        std::string out = opt(n.kids[0], kTest) + ":" + opt(n.kids[1], kTest);
        if (!n.kids[2].empty()) out += ":" + expr(n.kids[2], kTest);
        return out;
    }

    std::string expr_body(const Node& n) {
        switch (n.kind) {
            case Kind::Name:
                return n.text;
            case Kind::Constant:
                return constant(n);
            case Kind::NamedExpr:
                return expr(n.kids[0], kAtom) + " := " + expr(n.kids[1], kTest);
            case Kind::Yield:
                return n.kids[0].empty() ? "yield" : "yield " + expr(n.kids[0], kTest);
            case Kind::YieldFrom:
                return "yield from " + expr(n.kids[0], kTest);
            case Kind::Lambda: {
                std::string params = arguments(n.kids[0]);
                return (params.empty() ? "lambda" : "lambda " + params) + ": " + expr(n.kids[1], kTest);
            }
            case Kind::IfExp:
                return expr(n.kids[0], kOr) + " if " + expr(n.kids[1], kOr) + " else " + expr(n.kids[2], kTest);
            case Kind::BoolOp: {
                int p = precedence(n) + 1;
                std::string out;
                for (std::size_t i = 0; i < n.kids.size(); ++i) {
                    if (i) out += " " + n.text + " ";
                    out += expr(n.kids[i], p);
                }
                return out;
            }
            case Kind::UnaryOp: {
                if (n.text == "not") return "not " + expr(n.kids[0], kNot);
                return n.text + expr(n.kids[0], kFactor);
            }
            case Kind::BinOp: {
                int p = precedence(n);
                bool right_assoc = n.text == "**";
                std::string left = expr(n.kids[0], right_assoc ? p + 1 : p);
                const Node& r = n.kids[1];
                std::string right = (right_assoc && r.kind == Kind::UnaryOp && r.text != "not")
                                        ? "(" + expr_body(r) + ")"
                                        : expr(r, right_assoc ? p : p + 1);
                return left + " " + n.text + " " + right;
            }
            case Kind::Compare: {
                std::string out = expr(n.kids[0], kCmp + 1);
                for (std::size_t i = 0; i < n.names.size(); ++i) {
                    out += " " + n.names[i] + " " + expr(n.kids[i + 1], kCmp + 1);
                }
                return out;
            }
            case Kind::Await:
                return "await " + expr(n.kids[0], kAtom);
            case Kind::Starred:
                return "*" + expr(n.kids[0], kBor);
            case Kind::Call: {
                std::string func = expr(n.kids[0], kAtom);
                if (n.kids.size() == 2 && n.kids[1].kind == Kind::GeneratorExp) {
                    const Node& g = n.kids[1];
                    return func + "(" + expr(g.kids[0], kTest) + comprehensions(g, 1) + ")";
                }
                return func + "(" + call_args(n.kids, 1) + ")";
            }
            case Kind::Attribute: {
                const Node& v = n.kids[0];
                std::string base = expr(v, kAtom);
                if (v.kind == Kind::Constant && (v.flags & flag::kNumber)) base = "(" + base + ")";
                return base + "." + n.text;
            }
            case Kind::Subscript:
                return expr(n.kids[0], kAtom) + "[" + subscript_index(n.kids[1]) + "]";
            case Kind::Slice:
                return slice_part(n);
            case Kind::Tuple: {
                if (n.kids.empty()) return "()";
                std::string out = "(" + comma_list(n.kids, 0, kTest);
                if (n.kids.size() == 1) out += ",";
                return out + ")";
            }
            case Kind::List:
                return "[" + comma_list(n.kids, 0, kTest) + "]";
            case Kind::Set:
                return "{" + comma_list(n.kids, 0, kTest) + "}";
            case Kind::Dict: {
                std::string out = "{";
                for (std::size_t i = 0; i + 1 < n.kids.size(); i += 2) {
                    if (i) out += ", ";
                    if (n.kids[i].empty()) {
                        out += "**" + expr(n.kids[i + 1], kBor);
                    } else {
                        out += expr(n.kids[i], kTest) + ": " + expr(n.kids[i + 1], kTest);
                    }
                }
                return out + "}";
            }
            case Kind::ListComp:
                return "[" + expr(n.kids[0], kTest) + comprehensions(n, 1) + "]";
            case Kind::SetComp:
                return "{" + expr(n.kids[0], kTest) + comprehensions(n, 1) + "}";
            case Kind::GeneratorExp:
                return "(" + expr(n.kids[0], kTest) + comprehensions(n, 1) + ")";
            case Kind::DictComp:
                return "{" + expr(n.kids[0], kTest) + ": " + expr(n.kids[1], kTest) + comprehensions(n, 2) + "}";
            default:
                throw std::logic_error(std::string("not an expression: ") + kind_name(n.kind));
        }
    }

    std::string out_;
};

}  // namespace

std::string print_module(const Node& module) {
    return Printer().module(module);
}

std::string print_statement(const Node& stmt) {
    return Printer().lone_statement(stmt);
}

std::string print_expression(const Node& expr) {
    return Printer().expr(expr, kTest);
}

}  // namespace mutabench::py
