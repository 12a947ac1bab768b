#include "mutabench/py/literals.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <system_error>

namespace mutabench::py {
namespace {

struct LiteralParts {
    bool raw = false;
    bool bytes = false;
    bool fstring = false;
    std::string_view body;
};

std::optional<LiteralParts> split_literal(std::string_view token) {
    LiteralParts parts;
    std::size_t i = 0;
    while (i < token.size() && token[i] != '\'' && token[i] != '"') {
        char c = static_cast<char>(std::tolower(static_cast<unsigned char>(token[i])));
        if (c == 'r') parts.raw = true;
        if (c == 'b') parts.bytes = true;
        if (c == 'f') parts.fstring = true;
        ++i;
    }
    if (i >= token.size()) return std::nullopt;
    char quote = token[i];
    std::size_t qlen = token.substr(i, 3) == std::string(3, quote) && token.size() - i >= 6 ? 3 : 1;
    if (token.size() < i + 2 * qlen) return std::nullopt;
    parts.body = token.substr(i + qlen, token.size() - i - 2 * qlen);
    return parts;
}

void append_utf8(std::u32string& out, std::string_view text, bool& ok) {
    for (std::size_t i = 0; i < text.size();) {
        auto c = static_cast<unsigned char>(text[i]);
        char32_t cp;
        std::size_t len;
        if (c < 0x80) {
            cp = c;
            len = 1;
        } else if ((c >> 5) == 0x6) {
            cp = c & 0x1f;
            len = 2;
        } else if ((c >> 4) == 0xe) {
            cp = c & 0x0f;
            len = 3;
        } else if ((c >> 3) == 0x1e) {
            cp = c & 0x07;
            len = 4;
        } else {
            ok = false;
            return;
        }
        if (i + len > text.size()) {
            ok = false;
            return;
        }
        for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(text[i + k]) & 0x3f);
        out.push_back(cp);
        i += len;
    }
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

// Decodes one literal body into code points (bytes use the low 8 bits).
std::optional<std::u32string> decode_body(const LiteralParts& parts) {
    std::u32string out;
    bool ok = true;
    if (parts.raw) {
        append_utf8(out, parts.body, ok);
        if (!ok) return std::nullopt;
        return out;
    }
    std::string_view b = parts.body;
    std::size_t i = 0;
    while (i < b.size()) {
        std::size_t next = b.find('\\', i);
        std::size_t stop = next == std::string_view::npos ? b.size() : next;
        append_utf8(out, b.substr(i, stop - i), ok);
        if (!ok) return std::nullopt;
        if (next == std::string_view::npos) break;
        i = next + 1;
        if (i >= b.size()) return std::nullopt;
        char e = b[i];
        auto hex_escape = [&](std::size_t digits) -> bool {
            if (i + 1 + digits > b.size()) return false;
            char32_t cp = 0;
            for (std::size_t k = 0; k < digits; ++k) {
                int v = hex_value(b[i + 1 + k]);
                if (v < 0) return false;
                cp = cp * 16 + static_cast<char32_t>(v);
            }
            out.push_back(cp);
            i += 1 + digits;
            return true;
        };
        switch (e) {
            case '\n': ++i; break;
            case '\r':
                ++i;
                if (i < b.size() && b[i] == '\n') ++i;
                break;
            case '\\': out.push_back('\\'); ++i; break;
            case '\'': out.push_back('\''); ++i; break;
            case '"': out.push_back('"'); ++i; break;
            case 'a': out.push_back(7); ++i; break;
            case 'b': out.push_back(8); ++i; break;
            case 'f': out.push_back(12); ++i; break;
            case 'n': out.push_back(10); ++i; break;
            case 'r': out.push_back(13); ++i; break;
            case 't': out.push_back(9); ++i; break;
            case 'v': out.push_back(11); ++i; break;
            case 'x':
                if (!hex_escape(2)) return std::nullopt;
                break;
            case 'u':
                if (parts.bytes) {
                    out.push_back('\\');
                    out.push_back('u');
                    ++i;
                } else if (!hex_escape(4)) {
                    return std::nullopt;
                }
                break;
            case 'U':
                if (parts.bytes) {
                    out.push_back('\\');
                    out.push_back('U');
                    ++i;
                } else if (!hex_escape(8)) {
                    return std::nullopt;
                }
                break;
            case 'N':
                // Named escapes need the Unicode name table; leave such literals as written.
                return std::nullopt;
            default:
                if (e >= '0' && e <= '7') {
                    char32_t cp = 0;
                    std::size_t k = 0;
                    while (k < 3 && i < b.size() && b[i] >= '0' && b[i] <= '7') {
                        cp = cp * 8 + static_cast<char32_t>(b[i] - '0');
                        ++i;
                        ++k;
                    }
                    out.push_back(cp);
                } else {
                    out.push_back('\\');
                }
                break;
        }
    }
    return out;
}

void append_encoded(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

void append_hex_escape(std::string& out, char prefix, char32_t cp, int digits) {
    static const char* kHex = "0123456789abcdef";
    out.push_back('\\');
    out.push_back(prefix);
    for (int shift = (digits - 1) * 4; shift >= 0; shift -= 4) out.push_back(kHex[(cp >> shift) & 0xf]);
}

std::string repr_text(const std::u32string& value, bool bytes) {
    bool has_single = value.find(U'\'') != std::u32string::npos;
    bool has_double = value.find(U'"') != std::u32string::npos;
    char quote = (has_single && !has_double) ? '"' : '\'';
    std::string out;
    if (bytes) out.push_back('b');
    out.push_back(quote);
    for (char32_t cp : value) {
        if (cp == static_cast<char32_t>(quote) || cp == U'\\') {
            out.push_back('\\');
            out.push_back(static_cast<char>(cp));
        } else if (cp == U'\n') {
            out += "\\n";
        } else if (cp == U'\r') {
            out += "\\r";
        } else if (cp == U'\t') {
            out += "\\t";
        } else if (cp < 0x20 || cp == 0x7f) {
            append_hex_escape(out, 'x', cp, 2);
        } else if (cp < 0x7f) {
            out.push_back(static_cast<char>(cp));
        } else if (bytes) {
            append_hex_escape(out, 'x', cp & 0xff, 2);
        } else if (cp <= 0xa0 || cp == 0xad) {
            append_hex_escape(out, 'x', cp, 2);
        } else if ((cp >= 0xd800 && cp <= 0xdfff) || cp == 0xfeff) {
            append_hex_escape(out, 'u', cp, 4);
        } else if (cp > 0x10ffff) {
            append_hex_escape(out, 'U', cp, 8);
        } else {
            append_encoded(out, cp);
        }
    }
    out.push_back(quote);
    return out;
}

std::string strip_underscores(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (c != '_') out.push_back(c);
    }
    return out;
}

// Converts digits in `base` to a decimal string, arbitrary precision.
std::string to_decimal(std::string_view digits, int base) {
    std::vector<std::uint32_t> limbs{0};  // little-endian base 1e9
    for (char c : digits) {
        int v = hex_value(c);
        std::uint64_t carry = static_cast<std::uint64_t>(v);
        for (auto& limb : limbs) {
            std::uint64_t cur = static_cast<std::uint64_t>(limb) * static_cast<std::uint64_t>(base) + carry;
            limb = static_cast<std::uint32_t>(cur % 1000000000ULL);
            carry = cur / 1000000000ULL;
        }
        while (carry > 0) {
            limbs.push_back(static_cast<std::uint32_t>(carry % 1000000000ULL));
            carry /= 1000000000ULL;
        }
    }
    std::string out = std::to_string(limbs.back());
    for (std::size_t i = limbs.size() - 1; i-- > 0;) {
        std::string part = std::to_string(limbs[i]);
        out += std::string(9 - part.size(), '0') + part;
    }
    return out;
}

// Python's repr() for finite doubles: shortest round-trip digits, fixed
// notation for decimal exponents in [-4, 16), scientific otherwise.
std::string float_repr(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::scientific);
    std::string sci(buf, res.ptr);
    bool negative = !sci.empty() && sci[0] == '-';
    if (negative) sci.erase(0, 1);
    std::size_t e = sci.find('e');
    std::string mantissa = sci.substr(0, e);
    int exponent = std::atoi(sci.c_str() + e + 1);
    std::string digits;
    for (char c : mantissa) {
        if (c != '.') digits.push_back(c);
    }
    std::string out;
    if (exponent >= -4 && exponent < 16) {
        if (exponent >= 0) {
            std::size_t int_len = static_cast<std::size_t>(exponent) + 1;
            if (digits.size() <= int_len) {
                out = digits + std::string(int_len - digits.size(), '0') + ".0";
            } else {
                out = digits.substr(0, int_len) + "." + digits.substr(int_len);
            }
        } else {
            out = "0." + std::string(static_cast<std::size_t>(-exponent - 1), '0') + digits;
        }
    } else {
        out = digits.substr(0, 1);
        if (digits.size() > 1) out += "." + digits.substr(1);
        char exp_buf[16];
        std::snprintf(exp_buf, sizeof(exp_buf), "e%c%02d", exponent < 0 ? '-' : '+', std::abs(exponent));
        out += exp_buf;
    }
    return negative ? "-" + out : out;
}

}  // namespace

std::optional<std::string> normalize_string_literal(const std::vector<std::string>& parts) {
    if (parts.empty()) return std::nullopt;
    std::u32string value;
    bool bytes = false;
    for (const auto& token : parts) {
        auto split = split_literal(token);
        if (!split || split->fstring) return std::nullopt;
        bytes = split->bytes;
        auto decoded = decode_body(*split);
        if (!decoded) return std::nullopt;
        value += *decoded;
    }
    return repr_text(value, bytes);
}

std::optional<std::u32string> string_literal_value(const std::vector<std::string>& parts) {
    std::u32string value;
    for (const auto& token : parts) {
        auto split = split_literal(token);
        if (!split || split->fstring) return std::nullopt;
        auto decoded = decode_body(*split);
        if (!decoded) return std::nullopt;
        value += *decoded;
    }
    return value;
}

std::string normalize_number_literal(std::string_view text) {
    std::string clean = strip_underscores(text);
    if (clean.empty()) return std::string(text);
    char last = clean.back();
    if (last == 'j' || last == 'J') return clean.substr(0, clean.size() - 1) + "j";
    if (clean.size() > 2 && clean[0] == '0') {
        char b = static_cast<char>(std::tolower(static_cast<unsigned char>(clean[1])));
        if (b == 'x') return to_decimal(std::string_view(clean).substr(2), 16);
        if (b == 'o') return to_decimal(std::string_view(clean).substr(2), 8);
        if (b == 'b') return to_decimal(std::string_view(clean).substr(2), 2);
    }
    bool is_float = clean.find_first_of(".eE") != std::string::npos;
    if (!is_float) return to_decimal(clean, 10);
    double value = std::strtod(clean.c_str(), nullptr);
    if (!std::isfinite(value)) return clean;
    return float_repr(value);
}

}  // namespace mutabench::py
