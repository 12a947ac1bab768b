#pragma once

#include <string>

#include "mutabench/py/ast.hpp"

namespace mutabench::py {

// Deterministic tree-to-source rendering: one statement per line, four
// spaces per indentation level, single spaces around binary operators,
// parentheses only where precedence needs them. No trailing newline.
std::string print_module(const Node& module);
std::string print_statement(const Node& stmt);
std::string print_expression(const Node& expr);

}  // namespace mutabench::py
