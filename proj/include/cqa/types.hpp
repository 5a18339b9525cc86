#pragma once

// Base value model and error taxonomy.
//
// Every value is either text or an exact scaled integer: integers carry
// scale 0, decimals carry `num * 10^-scale`, and dates are stored as days
// since 1970-01-01 (scale 0).  Numeric values are normalized to the
// smallest scale that represents them exactly, so plain field equality is
// value equality and hashing needs no rescaling.

#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>

namespace cqa {

// ===========================================================================
// Errors
// ===========================================================================
// The CLI maps UnsupportedError to exit code 2 and every other Error to 1.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {           // malformed query / schema / data text
    using Error::Error;
};
struct ValidationError : Error {      // structurally valid input, bad semantics
    using Error::Error;
};
struct IoError : Error {              // filesystem / CSV problems
    using Error::Error;
};
struct EncodingError : Error {        // clause construction, weight overflow
    using Error::Error;
};
struct SolverError : Error {          // external solver launch / output issues
    using Error::Error;
};
struct LimitError : Error {           // enumeration caps (repair oracle)
    using Error::Error;
};
struct UnsupportedError : Error {     // recognized but out-of-scope feature
    using Error::Error;
};

// ===========================================================================
// Checked 64-bit arithmetic
// ===========================================================================

inline std::int64_t checked_add(std::int64_t a, std::int64_t b, const char* what = "arithmetic") {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw EncodingError(std::string("integer overflow in ") + what);
    return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b, const char* what = "arithmetic") {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw EncodingError(std::string("integer overflow in ") + what);
    return r;
}

// 10^k for rescaling; k is small (attribute scales), but stay checked anyway.
inline std::int64_t pow10_or_throw(int k, const char* what) {
    std::int64_t r = 1;
    for (int i = 0; i < k; ++i) r = checked_mul(r, 10, what);
    return r;
}

// ===========================================================================
// Value
// ===========================================================================

class Value {
public:
    Value() : text_(false), num_(0), scale_(0) {}

    static Value integer(std::int64_t v) { return Value(v, 0); }

    // `num * 10^-scale`; normalized so that num % 10 != 0 or scale == 0.
    static Value decimal(std::int64_t num, int scale) { return Value(num, scale); }

    static Value text(std::string s) {
        Value v;
        v.text_ = true;
        v.str_ = std::move(s);
        return v;
    }

    bool is_text() const { return text_; }
    bool is_numeric() const { return !text_; }

    const std::string& str() const { return str_; }
    std::int64_t num() const { return num_; }
    int scale() const { return scale_; }

    // Numeric value rescaled to `scale` digits (exact; throws on overflow).
    std::int64_t num_at_scale(int scale) const {
        if (scale < scale_) throw EncodingError("cannot rescale below stored precision");
        return checked_mul(num_, pow10_or_throw(scale - scale_, "rescale"), "rescale");
    }

    bool operator==(const Value& o) const {
        if (text_ != o.text_) return false;
        if (text_) return str_ == o.str_;
        return num_ == o.num_ && scale_ == o.scale_;
    }
    bool operator!=(const Value& o) const { return !(*this == o); }

    // Total order: numerics before text; numerics by magnitude, text bytewise.
    bool operator<(const Value& o) const {
        if (text_ != o.text_) return !text_;
        if (text_) return str_ < o.str_;
        int s = scale_ > o.scale_ ? scale_ : o.scale_;
        return num_at_scale(s) < o.num_at_scale(s);
    }
    bool operator<=(const Value& o) const { return *this == o || *this < o; }
    bool operator>(const Value& o) const { return o < *this; }
    bool operator>=(const Value& o) const { return o <= *this; }

    // Canonical text form: decimals keep exactly `scale` fraction digits.
    std::string to_string() const {
        if (text_) return str_;
        if (scale_ == 0) return std::to_string(num_);
        std::int64_t n = num_;
        bool neg = n < 0;
        std::string digits = std::to_string(neg ? -n : n);
        if ((int)digits.size() <= scale_) digits.insert(0, scale_ + 1 - digits.size(), '0');
        digits.insert(digits.size() - scale_, ".");
        return (neg ? "-" : "") + digits;
    }

    std::size_t hash() const {
        if (text_) return std::hash<std::string>()(str_) * 3 + 1;
        return std::hash<std::int64_t>()(num_) * 31 + std::hash<int>()(scale_);
    }

private:
    Value(std::int64_t num, int scale) : text_(false), num_(num), scale_(scale) {
        while (scale_ > 0 && num_ % 10 == 0) {
            num_ /= 10;
            --scale_;
        }
    }

    bool text_;
    std::int64_t num_;
    int scale_;
    std::string str_;
};

struct ValueHash {
    std::size_t operator()(const Value& v) const { return v.hash(); }
};

// Renders `num * 10^-scale` with exactly `scale` fraction digits.
inline std::string format_scaled(std::int64_t num, int scale) {
    if (scale == 0) return std::to_string(num);
    bool neg = num < 0;
    std::string digits = std::to_string(neg ? -num : num);
    if ((int)digits.size() <= scale) digits.insert(0, scale + 1 - digits.size(), '0');
    digits.insert(digits.size() - scale, ".");
    return (neg ? "-" : "") + digits;
}

// ===========================================================================
// Dates  (days since 1970-01-01, proleptic Gregorian)
// ===========================================================================

inline std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097LL + static_cast<int>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

inline std::string format_date(std::int64_t days) {
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
    return buf;
}

}  // namespace cqa
