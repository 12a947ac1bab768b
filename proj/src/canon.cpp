#include "mutabench/canon.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>
#include <stdexcept>

#include "mutabench/py/parser.hpp"
#include "mutabench/py/printer.hpp"

namespace mutabench::canon {
namespace {

bool is_docstring(const py::Node& stmt) {
    if (stmt.kind != py::Kind::ExprStmt) return false;
    const py::Node& v = stmt.kids[0];
    return v.kind == py::Kind::Constant && (v.flags & py::flag::kString) && !(v.flags & py::flag::kFString);
}

void strip_body(py::Node& body) {
    if (!body.kids.empty() && is_docstring(body.kids.front())) {
        body.kids.erase(body.kids.begin());
        if (body.kids.empty() && body.kind == py::Kind::Block) body.kids.emplace_back(py::Kind::Pass);
    }
}

}  // namespace

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 computation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[md[i] >> 4]);
        out.push_back(kHex[md[i] & 0xf]);
    }
    return out;
}

void strip_docstrings(py::Node& tree) {
    switch (tree.kind) {
        case py::Kind::Module:
            strip_body(tree);
            break;
        case py::Kind::FunctionDef:
            strip_body(tree.kids[2]);
            break;
        case py::Kind::ClassDef:
            strip_body(tree.kids[1]);
            break;
        default:
            break;
    }
    for (auto& kid : tree.kids) strip_docstrings(kid);
}

CanonicalForm canonicalize_tree(py::Node tree) {
    strip_docstrings(tree);
    CanonicalForm form;
    form.text = py::print_module(tree);
    form.digest = sha256_hex(form.text);
    return form;
}

CanonicalForm canonicalize(std::string_view source) {
    return canonicalize_tree(py::parse_module(source));
}

}  // namespace mutabench::canon
