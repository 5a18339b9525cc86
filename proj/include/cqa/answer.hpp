#pragma once

// Result shapes shared by the SAT-backed engine and the brute-force oracle.
//
// A range answer is the tight interval [glb, lub] the aggregate takes over
// the repairs.  Endpoints are scaled integers (ResultType says how to render
// them).  For MIN/MAX the endpoints cover the repairs where the query returns
// rows; empty_possible records whether some repair returns none.  COUNT and
// SUM treat an empty result as 0, so their endpoints always exist.

#include <optional>

#include "query.hpp"

namespace cqa {

struct RangeAnswer {
    ResultType type;
    std::optional<std::int64_t> glb;
    std::optional<std::int64_t> lub;
    bool empty_possible = false;

    bool operator==(const RangeAnswer&) const = default;
};

struct GroupRange {
    std::vector<Value> key;
    RangeAnswer range;

    bool operator==(const GroupRange&) const = default;
};

// Renders a scaled endpoint the way the result type dictates.
inline std::string format_endpoint(std::int64_t num, const ResultType& t) {
    if (t.is_date) return format_date(num);
    return format_scaled(num, t.scale);
}

}  // namespace cqa
