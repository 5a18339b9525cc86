#pragma once

// Result reporting: one RunReport shape serves the table printer and the
// JSON emitter, for both the SAT-backed engine and the brute-force oracle.
//
// JSON layout (stable, golden-file tested):
//   {
//     "query":   <query text>,
//     "backend": "internal" | "external: <cmd>" | "oracle",
//     "seed":    <integer>,              -- only when a generator seed applies
//     "group_by": [<name>, ...],         -- only for grouped queries
//     "answers": [
//       { "group_key": null | [<value>, ...],
//         "glb": <endpoint>, "lub": <endpoint>,
//         "empty_possible": <bool>,
//         "stats": { "vars":.., "clauses":.., "soft":.., "sat_calls":..,
//                    "encode_ms":.., "solve_ms":.. } },
//       ...
//     ],
//     "stats": { ...same six keys, totals across answers... }
//   }
//
// Endpoints are JSON integers when the result type is a plain integer and
// rendered strings otherwise (fixed-point decimals, dates); a missing bound
// (MIN/MAX over a possibly-empty result) is null.  Group-key values follow
// the grouping attribute's type: dates render as YYYY-MM-DD strings, text
// stays text, scale-0 numerics are JSON integers, scaled decimals are
// fixed-point strings.

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "answer.hpp"
#include "engine.hpp"
#include "value_text.hpp"

namespace cqa {

struct RunReport {
    std::string query;                    // query text as submitted
    std::string backend;                  // solver identity or "oracle"
    std::optional<std::uint64_t> seed;    // generator seed, when one applies
    bool grouped = false;
    std::vector<std::string> group_names;  // grouping column display names
    std::vector<AttrType> group_types;     // parallel to group_names
    std::vector<GroupRange> answers;       // scalar reports hold one entry
    std::vector<SolveStats> per_answer;    // parallel to answers; may be empty
    SolveStats stats;                      // totals across the whole run
};

inline RunReport make_report(std::string query_text, std::string backend,
                             const EngineResult& r) {
    RunReport rep;
    rep.query = std::move(query_text);
    rep.backend = std::move(backend);
    rep.answers.push_back(GroupRange{{}, r.range});
    rep.per_answer.push_back(r.stats);
    rep.stats = r.stats;
    return rep;
}

inline RunReport make_report(std::string query_text, std::string backend, const AggQuery& q,
                             const GroupedResult& g) {
    RunReport rep;
    rep.query = std::move(query_text);
    rep.backend = std::move(backend);
    rep.grouped = true;
    rep.group_names = q.group_names;
    rep.group_types = q.group_types;
    rep.answers = g.groups;
    rep.per_answer = g.per_group;
    rep.stats = g.stats;
    return rep;
}

inline RunReport make_oracle_report(std::string query_text, const RangeAnswer& r) {
    RunReport rep;
    rep.query = std::move(query_text);
    rep.backend = "oracle";
    rep.answers.push_back(GroupRange{{}, r});
    return rep;
}

inline RunReport make_oracle_report(std::string query_text, const AggQuery& q,
                                    std::vector<GroupRange> groups) {
    RunReport rep;
    rep.query = std::move(query_text);
    rep.backend = "oracle";
    rep.grouped = true;
    rep.group_names = q.group_names;
    rep.group_types = q.group_types;
    rep.answers = std::move(groups);
    return rep;
}

namespace reportdetail {

inline nlohmann::ordered_json endpoint_json(const std::optional<std::int64_t>& v,
                                            const ResultType& t) {
    if (!v) return nullptr;
    if (t.scale == 0 && !t.is_date) return *v;
    return format_endpoint(*v, t);
}

inline nlohmann::ordered_json key_value_json(const Value& v, AttrType type) {
    if (type == AttrType::Date && v.is_numeric()) return format_date(v.num());
    if (v.is_text()) return v.str();
    if (v.scale() == 0) return v.num();
    return v.to_string();
}

inline nlohmann::ordered_json stats_json(const SolveStats& s) {
    nlohmann::ordered_json j;
    j["vars"] = s.vars;
    j["clauses"] = s.clauses;
    j["soft"] = s.soft;
    j["sat_calls"] = s.sat_calls;
    j["encode_ms"] = s.encode_ms;
    j["solve_ms"] = s.solve_ms;
    return j;
}

// Key type for rendering: reports built without type metadata fall back to
// the value's own representation.
inline AttrType key_type(const RunReport& rep, std::size_t col, const Value& v) {
    if (col < rep.group_types.size()) return rep.group_types[col];
    if (v.is_text()) return AttrType::Text;
    return v.scale() == 0 ? AttrType::Integer : AttrType::Decimal;
}

inline std::string key_text(const RunReport& rep, const std::vector<Value>& key) {
    std::string out;
    for (std::size_t i = 0; i < key.size(); ++i) {
        if (i) out += ", ";
        out += format_typed_value(key[i], key_type(rep, i, key[i]));
    }
    return out;
}

inline std::string range_text(const RangeAnswer& r) {
    std::string out;
    if (!r.glb && !r.lub) {
        out = "no value";
    } else {
        out = "[";
        out += r.glb ? format_endpoint(*r.glb, r.type) : "none";
        out += ", ";
        out += r.lub ? format_endpoint(*r.lub, r.type) : "none";
        out += "]";
    }
    if (r.empty_possible) out += " (empty possible)";
    return out;
}

inline std::string stats_text(const SolveStats& s) {
    std::ostringstream os;
    os << "stats: vars=" << s.vars << " clauses=" << s.clauses << " soft=" << s.soft
       << " sat_calls=" << s.sat_calls << " encode_ms=" << s.encode_ms
       << " solve_ms=" << s.solve_ms;
    return os.str();
}

}  // namespace reportdetail

inline nlohmann::ordered_json report_json(const RunReport& rep) {
    using reportdetail::endpoint_json;
    using reportdetail::key_type;
    using reportdetail::key_value_json;
    using reportdetail::stats_json;

    nlohmann::ordered_json j;
    j["query"] = rep.query;
    j["backend"] = rep.backend;
    if (rep.seed) j["seed"] = *rep.seed;
    if (rep.grouped) j["group_by"] = rep.group_names;
    nlohmann::ordered_json answers = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < rep.answers.size(); ++i) {
        const GroupRange& g = rep.answers[i];
        nlohmann::ordered_json a;
        if (rep.grouped) {
            nlohmann::ordered_json key = nlohmann::ordered_json::array();
            for (std::size_t c = 0; c < g.key.size(); ++c)
                key.push_back(key_value_json(g.key[c], key_type(rep, c, g.key[c])));
            a["group_key"] = std::move(key);
        } else {
            a["group_key"] = nullptr;
        }
        a["glb"] = endpoint_json(g.range.glb, g.range.type);
        a["lub"] = endpoint_json(g.range.lub, g.range.type);
        a["empty_possible"] = g.range.empty_possible;
        a["stats"] = stats_json(i < rep.per_answer.size() ? rep.per_answer[i] : SolveStats{});
        answers.push_back(std::move(a));
    }
    j["answers"] = std::move(answers);
    j["stats"] = stats_json(rep.stats);
    return j;
}

// Plain-text rendering for terminals.  Scalar queries print one `range:`
// line; grouped queries print an aligned key/range table.
inline std::string report_table(const RunReport& rep) {
    using reportdetail::key_text;
    using reportdetail::range_text;
    using reportdetail::stats_text;

    std::ostringstream os;
    if (!rep.grouped) {
        const RangeAnswer& r =
            rep.answers.empty() ? RangeAnswer{} : rep.answers.front().range;
        os << "range: " << range_text(r) << "\n";
    } else {
        std::string header;
        for (std::size_t i = 0; i < rep.group_names.size(); ++i) {
            if (i) header += ", ";
            header += rep.group_names[i];
        }
        if (header.empty()) header = "group";
        std::size_t width = header.size();
        std::vector<std::string> keys;
        keys.reserve(rep.answers.size());
        for (const GroupRange& g : rep.answers) {
            keys.push_back(key_text(rep, g.key));
            width = std::max(width, keys.back().size());
        }
        os << header << std::string(width - header.size() + 2, ' ') << "range\n";
        for (std::size_t i = 0; i < rep.answers.size(); ++i) {
            os << keys[i] << std::string(width - keys[i].size() + 2, ' ')
               << range_text(rep.answers[i].range) << "\n";
        }
        if (rep.answers.empty()) os << "(no group is present in every repair)\n";
    }
    os << stats_text(rep.stats) << "\n";
    return os.str();
}

}  // namespace cqa
