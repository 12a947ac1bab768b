#include "mutabench/verdict.hpp"

#include <stdexcept>

namespace mutabench {

const char* to_string(VerdictKind kind) {
    switch (kind) {
        case VerdictKind::Pass: return "pass";
        case VerdictKind::Fail: return "fail";
        case VerdictKind::Timeout: return "timeout";
        case VerdictKind::RuntimeError: return "runtime_error";
        case VerdictKind::NonParse: return "non_parse";
    }
    return "fail";
}

std::optional<VerdictKind> parse_verdict_kind(std::string_view text) {
    for (auto k : {VerdictKind::Pass, VerdictKind::Fail, VerdictKind::Timeout, VerdictKind::RuntimeError,
                   VerdictKind::NonParse}) {
        if (text == to_string(k)) return k;
    }
    return std::nullopt;
}

void to_json(nlohmann::json& j, const Verdict& v) {
    j = nlohmann::json{{"kind", to_string(v.kind)}, {"detail", v.detail}, {"wall_ms", v.wall_ms}};
}

void from_json(const nlohmann::json& j, Verdict& v) {
    auto kind = parse_verdict_kind(j.at("kind").get<std::string>());
    if (!kind) throw std::invalid_argument("unknown verdict kind");
    v.kind = *kind;
    v.detail = j.value("detail", "");
    v.wall_ms = j.value("wall_ms", std::int64_t{0});
}

}  // namespace mutabench
