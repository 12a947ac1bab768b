#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mutabench/py/ast.hpp"
#include "mutabench/rng.hpp"
#include "mutabench/rulemut.hpp"

namespace mutabench::rulemut::detail {

struct Effects {
    std::set<std::string> reads;
    std::set<std::string> writes;
    bool barrier = false;    // ordered against every other statement
    bool may_raise = false;  // ordered against other raising statements
};

Effects statement_effects(const py::Node& stmt);

// Names bound by an assignment target (through tuples, lists and stars).
void target_names(const py::Node& target, std::vector<std::string>& out);

// Every identifier spelled anywhere in the tree, including attribute and
// keyword names and identifiers inside f-string replacement fields.
std::set<std::string> all_identifiers(const py::Node& tree);

// Identifiers that occur inside f-string replacement fields.
std::set<std::string> fstring_identifiers(const py::Node& tree);

struct FunctionSite {
    py::NodePath path;
    bool nested = false;  // defined inside another function
};

std::vector<FunctionSite> functions(const py::Node& module);

struct BlockSite {
    py::NodePath path;
    bool guarded = false;  // inside a try or with statement
    // Loop targets of enclosing `for` statements within the function.
    std::vector<std::string> loop_targets;
};

// Blocks that belong to the function at `fn` itself (not to nested
// functions or classes), outermost first. Paths are absolute.
std::vector<BlockSite> own_blocks(const py::Node& module, const py::NodePath& fn);

// `prefix` followed by four hex digits, not in `taken`; the result is added to `taken`.
std::string fresh_name(std::string_view prefix, Rng& rng, std::set<std::string>& taken);

bool is_numeric_literal(const py::Node& n);

// Per-operator replay of one recorded step; each throws std::invalid_argument
// when the step does not fit the tree.
void apply_substitution(py::Node& module, const OperatorApplication& step);
void apply_permutation(py::Node& module, const OperatorApplication& step);
void apply_rename(py::Node& module, const OperatorApplication& step);
void apply_insertion(py::Node& module, const OperatorApplication& step);

}  // namespace mutabench::rulemut::detail
