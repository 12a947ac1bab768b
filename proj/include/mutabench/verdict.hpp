#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace mutabench {

enum class VerdictKind { Pass, Fail, Timeout, RuntimeError, NonParse };

const char* to_string(VerdictKind kind);
std::optional<VerdictKind> parse_verdict_kind(std::string_view text);

// Sandbox classification of one candidate. Only Pass counts as correct.
struct Verdict {
    VerdictKind kind = VerdictKind::Fail;
    std::string detail;
    std::int64_t wall_ms = 0;

    bool passed() const noexcept { return kind == VerdictKind::Pass; }
};

void to_json(nlohmann::json& j, const Verdict& v);
void from_json(const nlohmann::json& j, Verdict& v);

}  // namespace mutabench
