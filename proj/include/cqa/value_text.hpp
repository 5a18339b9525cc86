#pragma once

// Text <-> Value conversion driven by the declared attribute type.

#include <string>

#include "schema.hpp"

namespace cqa {

// Parses `text` as a value of type `type`.  `context` names the source spot
// for error messages.  Decimal inputs may carry fewer fraction digits than
// the declared scale but never more.
inline Value parse_typed_value(const std::string& text, AttrType type, int scale,
                               const std::string& context) {
    auto bad = [&](const std::string& why) -> ParseError {
        return ParseError(context + ": " + why + " ('" + text + "')");
    };
    switch (type) {
        case AttrType::Text:
            return Value::text(text);
        case AttrType::Integer: {
            if (text.empty()) throw bad("empty integer");
            std::size_t i = text[0] == '-' ? 1 : 0;
            if (i == text.size()) throw bad("malformed integer");
            for (; i < text.size(); ++i)
                if (!std::isdigit((unsigned char)text[i])) throw bad("malformed integer");
            try {
                return Value::integer(std::stoll(text));
            } catch (const std::exception&) {
                throw bad("integer out of range");
            }
        }
        case AttrType::Decimal: {
            if (text.empty()) throw bad("empty decimal");
            std::size_t i = text[0] == '-' ? 1 : 0;
            std::string digits = text[0] == '-' ? "-" : "";
            int frac = -1;  // fraction digits seen so far (-1: before the dot)
            for (; i < text.size(); ++i) {
                char c = text[i];
                if (c == '.') {
                    if (frac >= 0) throw bad("malformed decimal");
                    frac = 0;
                } else if (std::isdigit((unsigned char)c)) {
                    digits += c;
                    if (frac >= 0) ++frac;
                } else {
                    throw bad("malformed decimal");
                }
            }
            if (frac < 0) frac = 0;
            if (digits.empty() || digits == "-") throw bad("malformed decimal");
            if (frac > scale)
                throw bad("more than " + std::to_string(scale) + " fraction digits");
            try {
                std::int64_t num = std::stoll(digits);
                return Value::decimal(checked_mul(num, pow10_or_throw(scale - frac, "decimal"), "decimal"), scale);
            } catch (const Error&) {
                throw;
            } catch (const std::exception&) {
                throw bad("decimal out of range");
            }
        }
        case AttrType::Date: {
            int y, m, d;
            if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
                std::sscanf(text.c_str(), "%4d-%2d-%2d", &y, &m, &d) != 3)
                throw bad("malformed date, expected YYYY-MM-DD");
            if (m < 1 || m > 12 || d < 1 || d > 31) throw bad("date out of range");
            return Value::integer(days_from_civil(y, m, d));
        }
    }
    throw bad("unknown type");
}

inline std::string format_typed_value(const Value& v, AttrType type) {
    if (type == AttrType::Date && v.is_numeric()) return format_date(v.num());
    return v.to_string();
}

}  // namespace cqa
