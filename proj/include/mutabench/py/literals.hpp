#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mutabench::py {

// Renders adjacent string literal tokens as one literal in repr() style.
// Returns nullopt for f-strings and escapes it does not model (\N{...}),
// which are then printed as written.
std::optional<std::string> normalize_string_literal(const std::vector<std::string>& parts);

// Decoded value of adjacent plain string literal tokens, as code points.
std::optional<std::u32string> string_literal_value(const std::vector<std::string>& parts);

// Integers in decimal, floats in shortest round-trip repr() form; imaginary
// literals only lose digit separators.
std::string normalize_number_literal(std::string_view text);

}  // namespace mutabench::py
