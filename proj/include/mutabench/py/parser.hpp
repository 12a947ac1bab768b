#pragma once

#include <string_view>

#include "mutabench/py/ast.hpp"

namespace mutabench::py {

// Parses a complete module. Throws ParseError with the offending location.
Node parse_module(std::string_view source);

// Parses a single expression (used by template catalogs and tests).
Node parse_expression(std::string_view source);

}  // namespace mutabench::py
