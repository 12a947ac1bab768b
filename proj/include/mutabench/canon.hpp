#pragma once

#include <string>
#include <string_view>

#include "mutabench/py/ast.hpp"

namespace mutabench::canon {

// Normalized source plus its fingerprint. `digest` is the lowercase hex
// SHA-256 of the UTF-8 `text`.
struct CanonicalForm {
    std::string text;
    std::string digest;

    friend bool operator==(const CanonicalForm&, const CanonicalForm&) = default;
};

std::string sha256_hex(std::string_view data);

// Removes docstring statements from module, class and function bodies
// (recursively). A body left empty receives `pass`.
void strip_docstrings(py::Node& tree);

// Parses, drops comments and docstrings, and re-emits with the canonical
// printer. Throws ParseError for invalid source.
CanonicalForm canonicalize(std::string_view source);

// Same, for an already-parsed tree.
CanonicalForm canonicalize_tree(py::Node tree);

inline bool is_syntactically_distinct(const CanonicalForm& a, const CanonicalForm& b) {
    return a.digest != b.digest;
}

}  // namespace mutabench::canon
