#include "mutabench/py/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "mutabench/error.hpp"
#include "mutabench/py/lexer.hpp"

namespace mutabench::py {
namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",   "assert", "async", "await", "break",
    "class", "continue", "def",   "del",      "elif", "else",   "except", "finally", "for",
    "from",  "global", "if",      "import",   "in",   "is",     "lambda", "nonlocal", "not",
    "or",    "pass",   "raise",   "return",   "try",  "while",  "with",  "yield",
};

bool is_keyword(std::string_view word) {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

constexpr std::array<std::string_view, 13> kAugOps = {
    "+=", "-=", "*=", "/=", "//=", "%=", "**=", ">>=", "<<=", "&=", "|=", "^=", "@=",
};

int string_flags(std::string_view token) {
    int flags = flag::kString;
    for (char c : token) {
        if (c == '\'' || c == '"') break;
        char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (lower == 'b') flags = (flags & ~flag::kString) | flag::kBytes;
        if (lower == 'f') flags |= flag::kFString;
    }
    return flags;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src), toks_(tokenize(src)) {}

    Node module() {
        Node mod(Kind::Module);
        while (!at_type(TokenType::End)) {
            if (accept_type(TokenType::Newline)) continue;
            statement_into(mod.kids);
        }
        return mod;
    }

    Node lone_expression() {
        while (accept_type(TokenType::Newline)) {
        }
        Node e = star_expressions();
        while (accept_type(TokenType::Newline)) {
        }
        if (!at_type(TokenType::End)) fail("unexpected trailing input");
        return e;
    }

private:
    // ---- token helpers -------------------------------------------------

    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(std::size_t ahead = 1) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    bool at_type(TokenType t) const { return cur().type == t; }
    bool at_op(std::string_view op) const { return cur().type == TokenType::Op && cur().text == op; }
    bool at_kw(std::string_view kw) const { return cur().type == TokenType::Name && cur().text == kw; }
    bool at_name() const { return cur().type == TokenType::Name && !is_keyword(cur().text); }

    const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    bool accept_type(TokenType t) {
        if (!at_type(t)) return false;
        advance();
        return true;
    }
    bool accept_op(std::string_view op) {
        if (!at_op(op)) return false;
        advance();
        return true;
    }
    bool accept_kw(std::string_view kw) {
        if (!at_kw(kw)) return false;
        advance();
        return true;
    }

    [[noreturn]] void fail(const std::string& reason) const {
        const Token& t = cur();
        std::string near = t.type == TokenType::End      ? "end of input"
                           : t.type == TokenType::Newline ? "end of line"
                           : t.type == TokenType::Indent  ? "indent"
                           : t.type == TokenType::Dedent  ? "dedent"
                                                          : "'" + t.text + "'";
        throw ParseError(reason + " near " + near, t.line, t.column);
    }

    void expect_op(std::string_view op) {
        if (!accept_op(op)) fail("expected '" + std::string(op) + "'");
    }
    void expect_kw(std::string_view kw) {
        if (!accept_kw(kw)) fail("expected '" + std::string(kw) + "'");
    }
    std::string expect_name() {
        if (!at_name()) fail("expected identifier");
        return advance().text;
    }

    std::size_t prev_end() const { return pos_ == 0 ? 0 : toks_[pos_ - 1].end; }

    // Last real token before the current position (skipping layout tokens).
    std::size_t last_code_end() const {
        for (std::size_t i = pos_; i-- > 0;) {
            TokenType t = toks_[i].type;
            if (t != TokenType::Newline && t != TokenType::Indent && t != TokenType::Dedent) return toks_[i].end;
        }
        return 0;
    }

    // ---- statements ----------------------------------------------------

    void statement_into(std::vector<Node>& out) {
        if (at_op("@") || at_kw("def") || at_kw("class") || at_kw("if") || at_kw("while") || at_kw("for") ||
            at_kw("try") || at_kw("with") || (at_kw("async") && (peek().text == "def" || peek().text == "for" || peek().text == "with"))) {
            out.push_back(compound_statement());
            return;
        }
        simple_statements_into(out);
    }

    void simple_statements_into(std::vector<Node>& out) {
        while (true) {
            std::size_t begin = cur().begin;
            int line = cur().line;
            Node s = small_statement();
            s.begin = begin;
            s.end = prev_end();
            s.line = line;
            out.push_back(std::move(s));
            if (!accept_op(";")) break;
            if (at_type(TokenType::Newline) || at_type(TokenType::End)) break;
        }
        if (!accept_type(TokenType::Newline) && !at_type(TokenType::End)) fail("expected end of statement");
    }

    Node block() {
        expect_op(":");
        Node body(Kind::Block);
        if (accept_type(TokenType::Newline)) {
            if (!accept_type(TokenType::Indent)) fail("expected an indented block");
            while (!accept_type(TokenType::Dedent)) {
                if (at_type(TokenType::End)) fail("unexpected end of input in block");
                statement_into(body.kids);
            }
        } else {
            simple_statements_into(body.kids);
        }
        return body;
    }

    Node compound_statement() {
        std::size_t begin = cur().begin;
        int line = cur().line;
        std::vector<Node> decorators;
        while (accept_op("@")) {
            decorators.push_back(named_expression());
            if (!accept_type(TokenType::Newline)) fail("expected newline after decorator");
        }
        bool is_async = accept_kw("async");
        Node s;
        if (at_kw("def")) {
            s = function_def();
        } else if (at_kw("class")) {
            if (is_async) fail("invalid async class");
            s = class_def();
        } else if (!decorators.empty()) {
            fail("decorator must precede def or class");
        } else if (at_kw("if")) {
            s = if_statement();
        } else if (at_kw("while")) {
            advance();
            s = Node(Kind::While);
            s.kids.push_back(named_expression());
            s.kids.push_back(block());
            s.kids.push_back(accept_else());
        } else if (at_kw("for")) {
            advance();
            s = Node(Kind::For);
            s.kids.push_back(target_list());
            expect_kw("in");
            s.kids.push_back(star_expressions());
            s.kids.push_back(block());
            s.kids.push_back(accept_else());
        } else if (at_kw("try")) {
            if (is_async) fail("invalid async try");
            s = try_statement();
        } else if (at_kw("with")) {
            s = with_statement();
        } else {
            fail("expected compound statement");
        }
        if (is_async) {
            if (s.kind != Kind::FunctionDef && s.kind != Kind::For && s.kind != Kind::With) fail("invalid async");
            s.flags |= flag::kAsync;
        }
        for (auto& d : decorators) s.kids.push_back(std::move(d));
        s.begin = begin;
        s.end = last_code_end();
        s.line = line;
        return s;
    }

    Node accept_else() {
        if (accept_kw("else")) return block();
        return Node(Kind::Empty);
    }

    Node if_statement() {
        // at 'if' or 'elif'
        std::size_t begin = cur().begin;
        int line = cur().line;
        advance();
        Node s(Kind::If);
        s.kids.push_back(named_expression());
        s.kids.push_back(block());
        if (at_kw("elif")) {
            Node orelse(Kind::Block);
            Node nested = if_statement();
            orelse.kids.push_back(std::move(nested));
            s.kids.push_back(std::move(orelse));
        } else {
            s.kids.push_back(accept_else());
        }
        s.begin = begin;
        s.end = last_code_end();
        s.line = line;
        return s;
    }

    Node function_def() {
        expect_kw("def");
        Node s(Kind::FunctionDef, expect_name());
        expect_op("(");
        s.kids.push_back(parameters(")", true));
        expect_op(")");
        if (accept_op("->")) {
            s.kids.push_back(expression());
        } else {
            s.kids.emplace_back(Kind::Empty);
        }
        s.kids.push_back(block());
        return s;
    }

    Node class_def() {
        expect_kw("class");
        Node s(Kind::ClassDef, expect_name());
        Node bases(Kind::Bases);
        if (accept_op("(")) {
            call_arguments_into(bases.kids);
            expect_op(")");
        }
        s.kids.push_back(std::move(bases));
        s.kids.push_back(block());
        return s;
    }

    Node try_statement() {
        expect_kw("try");
        Node s(Kind::Try);
        s.kids.push_back(block());
        s.kids.emplace_back(Kind::Empty);
        s.kids.emplace_back(Kind::Empty);
        std::vector<Node> handlers;
        while (at_kw("except")) {
            advance();
            Node h(Kind::ExceptHandler);
            if (at_op(":")) {
                h.kids.emplace_back(Kind::Empty);
            } else {
                h.kids.push_back(expression());
                if (accept_op(",")) {
                    // `except A, B:` is Python 2; reject rather than misparse.
                    fail("multiple exception types must be parenthesized");
                }
                if (accept_kw("as")) h.text = expect_name();
            }
            h.kids.push_back(block());
            handlers.push_back(std::move(h));
        }
        if (!handlers.empty() && accept_kw("else")) s.kids[1] = block();
        if (accept_kw("finally")) s.kids[2] = block();
        if (handlers.empty() && s.kids[2].empty()) fail("expected 'except' or 'finally' block");
        for (auto& h : handlers) s.kids.push_back(std::move(h));
        return s;
    }

    Node with_statement() {
        expect_kw("with");
        Node s(Kind::With);
        std::vector<Node> items;
        do {
            Node item(Kind::WithItem);
            item.kids.push_back(expression());
            if (accept_kw("as")) {
                item.kids.push_back(star_target());
            } else {
                item.kids.emplace_back(Kind::Empty);
            }
            items.push_back(std::move(item));
        } while (accept_op(","));
        s.kids.push_back(block());
        for (auto& it : items) s.kids.push_back(std::move(it));
        return s;
    }

    Node small_statement() {
        if (accept_kw("pass")) return Node(Kind::Pass);
        if (accept_kw("break")) return Node(Kind::Break);
        if (accept_kw("continue")) return Node(Kind::Continue);
        if (accept_kw("return")) {
            Node s(Kind::Return);
            s.kids.push_back(at_statement_end() ? Node(Kind::Empty) : star_expressions());
            return s;
        }
        if (accept_kw("raise")) {
            Node s(Kind::Raise);
            if (at_statement_end()) {
                s.kids.emplace_back(Kind::Empty);
                s.kids.emplace_back(Kind::Empty);
            } else {
                s.kids.push_back(expression());
                s.kids.push_back(accept_kw("from") ? expression() : Node(Kind::Empty));
            }
            return s;
        }
        if (at_kw("global") || at_kw("nonlocal")) {
            Node s(advance().text == "global" ? Kind::Global : Kind::Nonlocal);
            do {
                s.names.push_back(expect_name());
            } while (accept_op(","));
            return s;
        }
        if (accept_kw("del")) {
            Node s(Kind::Delete);
            do {
                if (at_statement_end()) break;
                s.kids.push_back(bitwise_or());
            } while (accept_op(","));
            if (s.kids.empty()) fail("expected target after 'del'");
            return s;
        }
        if (accept_kw("assert")) {
            Node s(Kind::Assert);
            s.kids.push_back(expression());
            s.kids.push_back(accept_op(",") ? expression() : Node(Kind::Empty));
            return s;
        }
        if (at_kw("import")) return import_name();
        if (at_kw("from")) return import_from();
        return expression_statement();
    }

    bool at_statement_end() const {
        return at_type(TokenType::Newline) || at_type(TokenType::End) || at_op(";");
    }

    std::string dotted_name() {
        std::string name = expect_name();
        while (accept_op(".")) name += "." + expect_name();
        return name;
    }

    Node import_name() {
        expect_kw("import");
        Node s(Kind::Import);
        do {
            Node alias(Kind::Alias, dotted_name());
            if (accept_kw("as")) alias.names.push_back(expect_name());
            s.kids.push_back(std::move(alias));
        } while (accept_op(","));
        return s;
    }

    Node import_from() {
        expect_kw("from");
        Node s(Kind::ImportFrom);
        int level = 0;
        while (at_op(".") || at_op("...")) level += static_cast<int>(advance().text.size());
        if (!at_kw("import")) s.text = dotted_name();
        s.flags = level;
        if (level == 0 && s.text.empty()) fail("expected module name");
        expect_kw("import");
        if (accept_op("*")) {
            s.kids.emplace_back(Kind::Alias, "*");
            return s;
        }
        bool paren = accept_op("(");
        do {
            if (paren && at_op(")")) break;
            Node alias(Kind::Alias, expect_name());
            if (accept_kw("as")) alias.names.push_back(expect_name());
            s.kids.push_back(std::move(alias));
        } while (accept_op(","));
        if (paren) expect_op(")");
        if (s.kids.empty()) fail("expected import names");
        return s;
    }

    Node expression_statement() {
        Node first = at_kw("yield") ? yield_expression() : star_expressions();
        if (at_op("=")) {
            Node s(Kind::Assign);
            s.kids.push_back(std::move(first));
            while (accept_op("=")) {
                s.kids.push_back(at_kw("yield") ? yield_expression() : star_expressions());
            }
            for (std::size_t i = 0; i + 1 < s.kids.size(); ++i) check_target(s.kids[i]);
            return s;
        }
        if (cur().type == TokenType::Op &&
            std::find(kAugOps.begin(), kAugOps.end(), cur().text) != kAugOps.end()) {
            std::string op = advance().text;
            op.pop_back();
            if (first.kind != Kind::Name && first.kind != Kind::Attribute && first.kind != Kind::Subscript) {
                fail("illegal target for augmented assignment");
            }
            Node s(Kind::AugAssign, op);
            s.kids.push_back(std::move(first));
            s.kids.push_back(at_kw("yield") ? yield_expression() : star_expressions());
            return s;
        }
        if (accept_op(":")) {
            if (first.kind != Kind::Name && first.kind != Kind::Attribute && first.kind != Kind::Subscript) {
                fail("illegal target for annotation");
            }
            Node s(Kind::AnnAssign);
            s.kids.push_back(std::move(first));
            s.kids.push_back(expression());
            s.kids.push_back(accept_op("=") ? (at_kw("yield") ? yield_expression() : star_expressions())
                                            : Node(Kind::Empty));
            return s;
        }
        Node s(Kind::ExprStmt);
        s.kids.push_back(std::move(first));
        return s;
    }

    void check_target(const Node& t) {
        switch (t.kind) {
            case Kind::Name:
            case Kind::Attribute:
            case Kind::Subscript:
                return;
            case Kind::Starred:
                check_target(t.kids[0]);
                return;
            case Kind::Tuple:
            case Kind::List:
                for (const auto& k : t.kids) check_target(k);
                return;
            default:
                fail(std::string("cannot assign to ") + kind_name(t.kind));
        }
    }

    // ---- parameters ----------------------------------------------------

    Node parameters(std::string_view closer, bool annotations) {
        Node args(Kind::Arguments);
        bool seen_default = false;
        bool seen_star = false;
        while (!at_op(closer)) {
            Node arg(Kind::Arg);
            arg.kids.emplace_back(Kind::Empty);
            arg.kids.emplace_back(Kind::Empty);
            if (accept_op("/")) {
                arg.flags = static_cast<int>(ArgKind::Slash);
            } else if (accept_op("**")) {
                arg.flags = static_cast<int>(ArgKind::KwArgs);
                arg.text = expect_name();
                if (annotations && accept_op(":")) arg.kids[0] = expression();
            } else if (accept_op("*")) {
                if (seen_star) fail("duplicate '*' in parameters");
                seen_star = true;
                if (at_name()) {
                    arg.flags = static_cast<int>(ArgKind::VarArgs);
                    arg.text = expect_name();
                    if (annotations && accept_op(":")) arg.kids[0] = expression();
                } else {
                    arg.flags = static_cast<int>(ArgKind::BareStar);
                }
            } else {
                arg.text = expect_name();
                if (annotations && accept_op(":")) arg.kids[0] = expression();
                if (accept_op("=")) {
                    arg.kids[1] = expression();
                    seen_default = true;
                } else if (seen_default && !seen_star) {
                    fail("non-default argument follows default argument");
                }
            }
            args.kids.push_back(std::move(arg));
            if (!accept_op(",")) break;
        }
        return args;
    }

    // ---- expressions ---------------------------------------------------

    Node star_expressions() {
        Node first = star_or_named();
        if (!at_op(",")) return first;
        Node tup(Kind::Tuple);
        tup.kids.push_back(std::move(first));
        while (accept_op(",")) {
            if (!starts_expression()) break;
            tup.kids.push_back(star_or_named());
        }
        return tup;
    }

    Node star_or_named() {
        if (accept_op("*")) {
            Node s(Kind::Starred);
            s.kids.push_back(bitwise_or());
            return s;
        }
        return named_expression();
    }

    bool starts_expression() const {
        const Token& t = cur();
        switch (t.type) {
            case TokenType::Name:
                return !is_keyword(t.text) || t.text == "None" || t.text == "True" || t.text == "False" ||
                       t.text == "not" || t.text == "lambda" || t.text == "await" || t.text == "yield";
            case TokenType::Number:
            case TokenType::String:
                return true;
            case TokenType::Op:
                return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" || t.text == "+" ||
                       t.text == "~" || t.text == "*" || t.text == "..." || t.text == "**";
            default:
                return false;
        }
    }

    // Targets of `for` and comprehensions: bitwise_or level, so `in` stops them.
    Node target_list() {
        Node first = star_target();
        if (!at_op(",")) {
            check_target(first);
            return first;
        }
        Node tup(Kind::Tuple);
        tup.kids.push_back(std::move(first));
        while (accept_op(",")) {
            if (at_kw("in") || at_op("=")) break;
            tup.kids.push_back(star_target());
        }
        check_target(tup);
        return tup;
    }

    Node star_target() {
        if (accept_op("*")) {
            Node s(Kind::Starred);
            s.kids.push_back(bitwise_or());
            return s;
        }
        return bitwise_or();
    }

    Node named_expression() {
        if (at_name() && peek().type == TokenType::Op && peek().text == ":=") {
            Node target = make_name(advance().text);
            advance();
            Node n(Kind::NamedExpr);
            n.kids.push_back(std::move(target));
            n.kids.push_back(expression());
            return n;
        }
        return expression();
    }

    Node expression() {
        if (at_kw("lambda")) return lambda_expression(false);
        Node body = disjunction();
        if (at_kw("if")) {
            advance();
            Node test = disjunction();
            expect_kw("else");
            Node orelse = expression();
            Node n(Kind::IfExp);
            n.kids.push_back(std::move(body));
            n.kids.push_back(std::move(test));
            n.kids.push_back(std::move(orelse));
            return n;
        }
        return body;
    }

    // Expression without conditional (comprehension `if` clauses).
    Node expression_nocond() {
        if (at_kw("lambda")) return lambda_expression(true);
        return disjunction();
    }

    Node lambda_expression(bool nocond) {
        expect_kw("lambda");
        Node n(Kind::Lambda);
        n.kids.push_back(parameters(":", false));
        expect_op(":");
        n.kids.push_back(nocond ? expression_nocond() : expression());
        return n;
    }

    Node disjunction() {
        Node first = conjunction();
        if (!at_kw("or")) return first;
        Node n(Kind::BoolOp, "or");
        n.kids.push_back(std::move(first));
        while (accept_kw("or")) n.kids.push_back(conjunction());
        return n;
    }

    Node conjunction() {
        Node first = inversion();
        if (!at_kw("and")) return first;
        Node n(Kind::BoolOp, "and");
        n.kids.push_back(std::move(first));
        while (accept_kw("and")) n.kids.push_back(inversion());
        return n;
    }

    Node inversion() {
        if (accept_kw("not")) return make_unary("not", inversion());
        return comparison();
    }

    bool comparison_operator(std::string& op) {
        const Token& t = cur();
        if (t.type == TokenType::Op &&
            (t.text == "<" || t.text == ">" || t.text == "==" || t.text == ">=" || t.text == "<=" || t.text == "!=")) {
            op = advance().text;
            return true;
        }
        if (at_kw("in")) {
            advance();
            op = "in";
            return true;
        }
        if (at_kw("not") && peek().type == TokenType::Name && peek().text == "in") {
            advance();
            advance();
            op = "not in";
            return true;
        }
        if (at_kw("is")) {
            advance();
            op = accept_kw("not") ? "is not" : "is";
            return true;
        }
        return false;
    }

    Node comparison() {
        Node first = bitwise_or();
        std::string op;
        if (!comparison_operator(op)) return first;
        Node n(Kind::Compare);
        n.kids.push_back(std::move(first));
        do {
            n.names.push_back(op);
            n.kids.push_back(bitwise_or());
        } while (comparison_operator(op));
        return n;
    }

    template <typename Next>
    Node left_assoc(std::initializer_list<std::string_view> ops, Next next) {
        Node left = (this->*next)();
        while (cur().type == TokenType::Op &&
               std::find(ops.begin(), ops.end(), cur().text) != ops.end()) {
            std::string op = advance().text;
            Node right = (this->*next)();
            left = make_binop(op, std::move(left), std::move(right));
        }
        return left;
    }

    Node bitwise_or() { return left_assoc({"|"}, &Parser::bitwise_xor); }
    Node bitwise_xor() { return left_assoc({"^"}, &Parser::bitwise_and); }
    Node bitwise_and() { return left_assoc({"&"}, &Parser::shift_expr); }
    Node shift_expr() { return left_assoc({"<<", ">>"}, &Parser::sum); }
    Node sum() { return left_assoc({"+", "-"}, &Parser::term); }
    Node term() { return left_assoc({"*", "/", "//", "%", "@"}, &Parser::factor); }

    Node factor() {
        if (at_op("-") || at_op("+") || at_op("~")) {
            std::string op = advance().text;
            return make_unary(op, factor());
        }
        return power();
    }

    Node power() {
        Node base = await_primary();
        if (accept_op("**")) return make_binop("**", std::move(base), factor());
        return base;
    }

    Node await_primary() {
        if (accept_kw("await")) {
            Node n(Kind::Await);
            n.kids.push_back(primary());
            return n;
        }
        return primary();
    }

    Node primary() {
        Node node = atom();
        while (true) {
            if (accept_op(".")) {
                Node attr(Kind::Attribute, expect_name());
                attr.kids.push_back(std::move(node));
                node = std::move(attr);
            } else if (accept_op("(")) {
                Node call(Kind::Call);
                call.kids.push_back(std::move(node));
                call_arguments_into(call.kids);
                expect_op(")");
                node = std::move(call);
            } else if (accept_op("[")) {
                Node sub(Kind::Subscript);
                sub.kids.push_back(std::move(node));
                sub.kids.push_back(slices());
                expect_op("]");
                node = std::move(sub);
            } else {
                return node;
            }
        }
    }

    void call_arguments_into(std::vector<Node>& out) {
        std::size_t first_index = out.size();
        while (!at_op(")")) {
            if (accept_op("**")) {
                Node d(Kind::DoubleStarred);
                d.kids.push_back(expression());
                out.push_back(std::move(d));
            } else if (accept_op("*")) {
                Node s(Kind::Starred);
                s.kids.push_back(expression());
                out.push_back(std::move(s));
            } else if (at_name() && peek().type == TokenType::Op && peek().text == "=") {
                Node kw(Kind::Keyword, advance().text);
                advance();
                kw.kids.push_back(expression());
                out.push_back(std::move(kw));
            } else {
                Node value = named_expression();
                if (at_kw("for") || at_kw("async")) {
                    if (out.size() != first_index) fail("generator expression must be parenthesized");
                    Node gen(Kind::GeneratorExp);
                    gen.kids.push_back(std::move(value));
                    comprehension_clauses_into(gen.kids);
                    out.push_back(std::move(gen));
                    if (!at_op(")")) fail("generator expression must be parenthesized");
                    break;
                }
                out.push_back(std::move(value));
            }
            if (!accept_op(",")) break;
        }
    }

    Node slices() {
        Node first = slice_item();
        if (!at_op(",")) return first;
        Node tup(Kind::Tuple);
        tup.kids.push_back(std::move(first));
        while (accept_op(",")) {
            if (at_op("]")) break;
            tup.kids.push_back(slice_item());
        }
        return tup;
    }

    Node slice_item() {
        Node lower(Kind::Empty);
        if (!at_op(":")) {
            lower = star_or_named();
            if (!at_op(":")) return lower;
        }
        expect_op(":");
        Node s(Kind::Slice);
        s.kids.push_back(std::move(lower));
        s.kids.push_back(at_op(":") || at_op("]") || at_op(",") ? Node(Kind::Empty) : expression());
        if (accept_op(":")) {
            s.kids.push_back(at_op("]") || at_op(",") ? Node(Kind::Empty) : expression());
        } else {
            s.kids.emplace_back(Kind::Empty);
        }
        return s;
    }

    void comprehension_clauses_into(std::vector<Node>& out) {
        while (at_kw("for") || (at_kw("async") && peek().text == "for")) {
            Node comp(Kind::Comprehension);
            if (accept_kw("async")) comp.flags |= flag::kAsync;
            expect_kw("for");
            comp.kids.push_back(target_list());
            expect_kw("in");
            comp.kids.push_back(disjunction());
            while (accept_kw("if")) comp.kids.push_back(expression_nocond());
            out.push_back(std::move(comp));
        }
    }

    Node yield_expression() {
        expect_kw("yield");
        if (accept_kw("from")) {
            Node n(Kind::YieldFrom);
            n.kids.push_back(expression());
            return n;
        }
        Node n(Kind::Yield);
        bool closes = at_statement_end() || at_op(")") || at_op("]") || at_op("}") || at_op("=");
        n.kids.push_back(closes ? Node(Kind::Empty) : star_expressions());
        return n;
    }

    Node atom() {
        const Token& t = cur();
        switch (t.type) {
            case TokenType::Name: {
                if (t.text == "None" || t.text == "True" || t.text == "False") {
                    Node c(Kind::Constant, advance().text);
                    c.flags = flag::kKeyword;
                    return c;
                }
                if (is_keyword(t.text)) fail("unexpected keyword");
                return make_name(advance().text);
            }
            case TokenType::Number: {
                Node c(Kind::Constant, advance().text);
                char last = c.text.back();
                c.flags = flag::kNumber | ((last == 'j' || last == 'J') ? flag::kImaginary : 0);
                return c;
            }
            case TokenType::String: {
                Node c(Kind::Constant);
                int flags = 0;
                bool saw_bytes = false;
                bool saw_text = false;
                while (at_type(TokenType::String)) {
                    int f = string_flags(cur().text);
                    (f & flag::kBytes ? saw_bytes : saw_text) = true;
                    flags |= f;
                    if (!c.text.empty()) c.text += ' ';
                    c.names.push_back(advance().text);
                    c.text += c.names.back();
                }
                if (saw_bytes && saw_text) fail("cannot mix bytes and nonbytes literals");
                c.flags = flags;
                return c;
            }
            case TokenType::Op:
                break;
            default:
                fail("expected expression");
        }
        if (accept_op("...")) {
            Node c(Kind::Constant, "...");
            c.flags = flag::kKeyword;
            return c;
        }
        if (accept_op("(")) return paren_atom();
        if (accept_op("[")) return list_atom();
        if (accept_op("{")) return brace_atom();
        fail("expected expression");
    }

    Node paren_atom() {
        if (accept_op(")")) return Node(Kind::Tuple);
        if (at_kw("yield")) {
            Node y = yield_expression();
            expect_op(")");
            return y;
        }
        Node first = star_or_named();
        if (at_kw("for") || at_kw("async")) {
            Node gen(Kind::GeneratorExp);
            gen.kids.push_back(std::move(first));
            comprehension_clauses_into(gen.kids);
            expect_op(")");
            return gen;
        }
        if (accept_op(")")) {
            if (first.kind == Kind::Starred) fail("cannot use starred expression here");
            return first;
        }
        Node tup(Kind::Tuple);
        tup.kids.push_back(std::move(first));
        while (accept_op(",")) {
            if (at_op(")")) break;
            tup.kids.push_back(star_or_named());
        }
        expect_op(")");
        return tup;
    }

    Node list_atom() {
        Node list(Kind::List);
        if (accept_op("]")) return list;
        Node first = star_or_named();
        if (at_kw("for") || at_kw("async")) {
            Node comp(Kind::ListComp);
            comp.kids.push_back(std::move(first));
            comprehension_clauses_into(comp.kids);
            expect_op("]");
            return comp;
        }
        list.kids.push_back(std::move(first));
        while (accept_op(",")) {
            if (at_op("]")) break;
            list.kids.push_back(star_or_named());
        }
        expect_op("]");
        return list;
    }

    Node brace_atom() {
        if (accept_op("}")) return Node(Kind::Dict);
        if (accept_op("**")) {
            Node dict(Kind::Dict);
            dict.kids.emplace_back(Kind::Empty);
            dict.kids.push_back(bitwise_or());
            dict_rest(dict);
            return dict;
        }
        Node first = star_or_named();
        if (accept_op(":")) {
            Node value = expression();
            if (at_kw("for") || at_kw("async")) {
                Node comp(Kind::DictComp);
                comp.kids.push_back(std::move(first));
                comp.kids.push_back(std::move(value));
                comprehension_clauses_into(comp.kids);
                expect_op("}");
                return comp;
            }
            Node dict(Kind::Dict);
            dict.kids.push_back(std::move(first));
            dict.kids.push_back(std::move(value));
            dict_rest(dict);
            return dict;
        }
        if (at_kw("for") || at_kw("async")) {
            Node comp(Kind::SetComp);
            comp.kids.push_back(std::move(first));
            comprehension_clauses_into(comp.kids);
            expect_op("}");
            return comp;
        }
        Node set(Kind::Set);
        set.kids.push_back(std::move(first));
        while (accept_op(",")) {
            if (at_op("}")) break;
            set.kids.push_back(star_or_named());
        }
        expect_op("}");
        return set;
    }

    void dict_rest(Node& dict) {
        while (accept_op(",")) {
            if (at_op("}")) break;
            if (accept_op("**")) {
                dict.kids.emplace_back(Kind::Empty);
                dict.kids.push_back(bitwise_or());
                continue;
            }
            dict.kids.push_back(expression());
            expect_op(":");
            dict.kids.push_back(expression());
        }
        expect_op("}");
    }

    std::string_view src_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

Node parse_module(std::string_view source) {
    return Parser(source).module();
}

Node parse_expression(std::string_view source) {
    return Parser(source).lone_expression();
}

}  // namespace mutabench::py
