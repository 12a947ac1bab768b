#include "mutabench/py/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>

#include "mutabench/error.hpp"

namespace mutabench::py {
namespace {

constexpr std::array<std::string_view, 47> kOperators = {
    "**=", "//=", ">>=", "<<=", "...", "->", ":=", "**", "//", "<<", ">>", "<=",
    ">=",  "==",  "!=",  "+=",  "-=",  "*=", "/=", "%=", "&=", "|=", "^=", "@=",
    "+",   "-",   "*",   "/",   "%",   "@",  "&",  "|",  "^",  "~",  "<",  ">",
    "(",   ")",   "[",   "]",   "{",   "}",  ",",  ":",  ".",  ";",  "=",
};

bool is_ident_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c >= 0x80;
}

bool is_ident_char(unsigned char c) {
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        indents_.push_back(0);
        bool at_line_start = true;
        while (pos_ < src_.size()) {
            if (at_line_start && depth_ == 0) {
                if (!handle_indentation()) continue;
                at_line_start = false;
            }
            char c = src_[pos_];
            if (c == '\n' || c == '\r') {
                std::size_t start = pos_;
                consume_newline();
                if (depth_ == 0) {
                    if (!last_was_newline()) emit(TokenType::Newline, "", start, start, line_ - 1, col_of(start));
                    at_line_start = true;
                }
                continue;
            }
            if (c == ' ' || c == '\t' || c == '\f') {
                ++pos_;
                continue;
            }
            if (c == '#') {
                skip_comment();
                continue;
            }
            if (c == '\\') {
                std::size_t next = pos_ + 1;
                if (next < src_.size() && (src_[next] == '\n' || src_[next] == '\r')) {
                    pos_ = next;
                    consume_newline();
                    continue;
                }
                fail("unexpected character after line continuation");
            }
            lex_token();
        }
        if (!tokens_.empty() && !last_was_newline()) {
            emit(TokenType::Newline, "", pos_, pos_, line_, col_of(pos_));
        }
        if (depth_ != 0) fail("unexpected end of input inside brackets");
        while (indents_.size() > 1) {
            indents_.pop_back();
            emit(TokenType::Dedent, "", pos_, pos_, line_, 0);
        }
        emit(TokenType::End, "", pos_, pos_, line_, 0);
        return std::move(tokens_);
    }

private:
    [[noreturn]] void fail(const std::string& reason) const {
        throw ParseError(reason, line_, col_of(pos_));
    }

    int col_of(std::size_t offset) const { return static_cast<int>(offset - line_start_); }

    bool last_was_newline() const {
        return tokens_.empty() || tokens_.back().type == TokenType::Newline ||
               tokens_.back().type == TokenType::Indent || tokens_.back().type == TokenType::Dedent;
    }

    void emit(TokenType type, std::string text, std::size_t begin, std::size_t end, int line, int col) {
        tokens_.push_back(Token{type, std::move(text), begin, end, line, col});
    }

    void consume_newline() {
        if (src_[pos_] == '\r' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') ++pos_;
        ++pos_;
        ++line_;
        line_start_ = pos_;
    }

    void skip_comment() {
        while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '\r') ++pos_;
    }

    // Measures indentation of a logical line; returns false when the line is
    // blank or comment-only (and has been consumed).
    bool handle_indentation() {
        int width = 0;
        std::size_t p = pos_;
        while (p < src_.size()) {
            char c = src_[p];
            if (c == ' ') {
                ++width;
            } else if (c == '\t') {
                width = (width / 8 + 1) * 8;
            } else if (c == '\f') {
                width = 0;
            } else {
                break;
            }
            ++p;
        }
        if (p >= src_.size()) {
            pos_ = p;
            return false;
        }
        char c = src_[p];
        if (c == '#' || c == '\n' || c == '\r') {
            pos_ = p;
            if (c == '#') skip_comment();
            if (pos_ < src_.size()) consume_newline();
            return false;
        }
        if (c == '\\' && p + 1 < src_.size() && (src_[p + 1] == '\n' || src_[p + 1] == '\r')) {
            // A continuation at the start of a line keeps the indentation measured so far.
            pos_ = p + 1;
            consume_newline();
            return false;
        }
        pos_ = p;
        if (width > indents_.back()) {
            indents_.push_back(width);
            emit(TokenType::Indent, "", pos_, pos_, line_, col_of(pos_));
        } else {
            while (width < indents_.back()) {
                indents_.pop_back();
                emit(TokenType::Dedent, "", pos_, pos_, line_, col_of(pos_));
            }
            if (width != indents_.back()) fail("unindent does not match any outer indentation level");
        }
        return true;
    }

    void lex_token() {
        std::size_t start = pos_;
        int line = line_;
        int col = col_of(start);
        auto c = static_cast<unsigned char>(src_[pos_]);

        if (is_ident_start(c)) {
            while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            std::string_view word = src_.substr(start, pos_ - start);
            if (pos_ < src_.size() && (src_[pos_] == '\'' || src_[pos_] == '"') && is_string_prefix(word)) {
                lex_string(start, line, col);
                return;
            }
            emit(TokenType::Name, std::string(word), start, pos_, line, col);
            return;
        }
        if (c == '\'' || c == '"') {
            lex_string(start, line, col);
            return;
        }
        if (std::isdigit(c) || (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
            lex_number(start, line, col);
            return;
        }
        for (std::string_view op : kOperators) {
            if (src_.substr(pos_, op.size()) == op) {
                pos_ += op.size();
                if (op == "(" || op == "[" || op == "{") ++depth_;
                if (op == ")" || op == "]" || op == "}") {
                    if (depth_ == 0) fail("unmatched '" + std::string(op) + "'");
                    --depth_;
                }
                emit(TokenType::Op, std::string(op), start, pos_, line, col);
                return;
            }
        }
        fail(std::string("invalid character '") + static_cast<char>(c) + "'");
    }

    static bool is_string_prefix(std::string_view word) {
        if (word.size() > 2) return false;
        std::string lower;
        for (char ch : word) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        static constexpr std::array<std::string_view, 8> kPrefixes = {"r", "u", "b", "f", "br", "rb", "fr", "rf"};
        return std::find(kPrefixes.begin(), kPrefixes.end(), lower) != kPrefixes.end();
    }

    void lex_string(std::size_t start, int line, int col) {
        char quote = src_[pos_];
        bool triple = src_.substr(pos_, 3) == std::string(3, quote);
        pos_ += triple ? 3 : 1;
        while (true) {
            if (pos_ >= src_.size()) fail("unterminated string literal");
            char ch = src_[pos_];
            if (ch == '\\') {
                if (pos_ + 1 < src_.size() && (src_[pos_ + 1] == '\n' || src_[pos_ + 1] == '\r')) {
                    ++pos_;
                    consume_newline();
                } else {
                    pos_ += 2;
                }
                continue;
            }
            if (ch == '\n' || ch == '\r') {
                if (!triple) fail("unterminated string literal");
                consume_newline();
                continue;
            }
            if (ch == quote) {
                if (!triple) {
                    ++pos_;
                    break;
                }
                if (src_.substr(pos_, 3) == std::string(3, quote)) {
                    pos_ += 3;
                    break;
                }
            }
            ++pos_;
        }
        emit(TokenType::String, std::string(src_.substr(start, pos_ - start)), start, pos_, line, col);
    }

    void lex_number(std::size_t start, int line, int col) {
        auto digit_run = [&](auto pred) {
            while (pos_ < src_.size() && (pred(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
        };
        auto is_dec = [](unsigned char ch) { return std::isdigit(ch) != 0; };
        if (src_[pos_] == '0' && pos_ + 1 < src_.size() && std::strchr("xXoObB", src_[pos_ + 1]) != nullptr) {
            pos_ += 2;
            digit_run([](unsigned char ch) { return std::isxdigit(ch) != 0; });
        } else {
            digit_run(is_dec);
            if (pos_ < src_.size() && src_[pos_] == '.') {
                ++pos_;
                digit_run(is_dec);
            }
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                std::size_t save = pos_;
                ++pos_;
                if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
                if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                    digit_run(is_dec);
                } else {
                    pos_ = save;
                }
            }
            if (pos_ < src_.size() && (src_[pos_] == 'j' || src_[pos_] == 'J')) ++pos_;
        }
        if (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) fail("invalid number literal");
        emit(TokenType::Number, std::string(src_.substr(start, pos_ - start)), start, pos_, line, col);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_start_ = 0;
    int line_ = 1;
    int depth_ = 0;
    std::vector<int> indents_;
    std::vector<Token> tokens_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) {
    return Lexer(source).run();
}

}  // namespace mutabench::py
