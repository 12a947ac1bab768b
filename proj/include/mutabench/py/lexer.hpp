#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mutabench::py {

enum class TokenType { Name, Number, String, Op, Newline, Indent, Dedent, End };

struct Token {
    TokenType type = TokenType::End;
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;
    int line = 1;
    int column = 0;
};

// Tokenizes Python source. Comments and blank lines are dropped; INDENT,
// DEDENT and NEWLINE follow CPython's tokenizer rules, including implicit
// line joining inside brackets. Throws ParseError on malformed input.
std::vector<Token> tokenize(std::string_view source);

}  // namespace mutabench::py
