#pragma once

// Brute-force ground truth: enumerate every repair explicitly, aggregate over
// each, and take the envelope.  Exponential by nature — guarded by a repair
// budget — but authoritative, so the SAT-backed engine is tested against it.
//
// Without denial constraints the repairs are the choices of one fact per
// key-equal group (a product enumeration).  With denial constraints they are
// the maximal subinstances containing no minimal violation, enumerated by an
// include/exclude search with a leaf maximality check.

#include "answer.hpp"
#include "violations.hpp"

namespace cqa {

namespace oracledetail {

template <class F>
void for_each_key_repair(const Instance& inst, std::int64_t limit, F&& fn) {
    std::vector<KeyEqualGroup> groups = key_equal_groups(inst);
    std::int64_t product = 1;
    for (const auto& g : groups) {
        product = checked_mul(product, (std::int64_t)g.facts.size(), "repair count");
        if (product > limit)
            throw LimitError("repair count exceeds the limit of " + std::to_string(limit));
    }
    std::vector<std::size_t> pick(groups.size(), 0);
    for (;;) {
        std::vector<FactId> repair;
        repair.reserve(groups.size());
        for (std::size_t i = 0; i < groups.size(); ++i) repair.push_back(groups[i].facts[pick[i]]);
        std::sort(repair.begin(), repair.end());
        fn(repair);
        std::size_t i = 0;
        while (i < groups.size() && ++pick[i] == groups[i].facts.size()) pick[i++] = 0;
        if (i == groups.size()) break;
    }
}

template <class F>
void for_each_general_repair(const Instance& inst, std::int64_t limit, F&& fn) {
    const int n = inst.fact_count();
    std::vector<std::vector<FactId>> viol = minimal_violations(inst);
    std::vector<std::vector<int>> viol_of(n + 1);  // fact -> violation indices
    for (std::size_t vi = 0; vi < viol.size(); ++vi)
        for (FactId f : viol[vi]) viol_of[f].push_back((int)vi);
    std::vector<int> inc_count(viol.size(), 0);
    std::vector<bool> included(n + 1, false);
    std::int64_t emitted = 0;

    std::function<void(FactId)> rec = [&](FactId f) {
        if (f > (FactId)n) {
            // Maximality: every excluded fact must be blocked by a violation
            // whose other members are all present.
            for (FactId g = 1; g <= (FactId)n; ++g) {
                if (included[g]) continue;
                bool blocked = false;
                for (int vi : viol_of[g])
                    if (inc_count[vi] == (int)viol[vi].size() - 1) {
                        blocked = true;
                        break;
                    }
                if (!blocked) return;
            }
            if (++emitted > limit)
                throw LimitError("repair count exceeds the limit of " + std::to_string(limit));
            std::vector<FactId> repair;
            repair.reserve(n);
            for (FactId g = 1; g <= (FactId)n; ++g)
                if (included[g]) repair.push_back(g);
            fn(repair);
            return;
        }
        // Include f unless that completes a violation.
        bool completes = false;
        for (int vi : viol_of[f])
            if (inc_count[vi] == (int)viol[vi].size() - 1) {
                completes = true;
                break;
            }
        if (!completes) {
            included[f] = true;
            for (int vi : viol_of[f]) ++inc_count[vi];
            rec(f + 1);
            for (int vi : viol_of[f]) --inc_count[vi];
            included[f] = false;
        }
        // Exclude f only if something could ever justify dropping it.
        if (!viol_of[f].empty()) rec(f + 1);
    };
    rec(1);
}

}  // namespace oracledetail

// Calls fn with each repair (sorted fact ids).  Throws LimitError when the
// number of repairs exceeds `limit`.
template <class F>
void for_each_repair(const Instance& inst, std::int64_t limit, F&& fn) {
    if (inst.schema.has_dcs())
        oracledetail::for_each_general_repair(inst, limit, std::forward<F>(fn));
    else
        oracledetail::for_each_key_repair(inst, limit, std::forward<F>(fn));
}

inline std::vector<std::vector<FactId>> enumerate_repairs(const Instance& inst, std::int64_t limit) {
    std::vector<std::vector<FactId>> out;
    for_each_repair(inst, limit, [&](const std::vector<FactId>& r) { out.push_back(r); });
    return out;
}

inline std::int64_t count_repairs(const Instance& inst, std::int64_t limit) {
    std::int64_t n = 0;
    for_each_repair(inst, limit, [&](const std::vector<FactId>&) { ++n; });
    return n;
}

// ---------------------------------------------------------------------------
// Aggregation over enumerated repairs
// ---------------------------------------------------------------------------

namespace oracledetail {

// Per-repair aggregate of the witnesses present in it, keyed by group.
// Returns pairs (group key, scaled value); groups without a present witness
// do not appear.
inline std::map<std::vector<Value>, std::int64_t> aggregate_repair(
    const AggQuery& q, const std::vector<Witness>& ws, const std::vector<bool>& in_repair,
    int scale) {
    auto present = [&](const Witness& w) {
        for (FactId f : w.facts)
            if (!in_repair[f]) return false;
        return true;
    };
    std::map<std::vector<Value>, std::int64_t> out;
    switch (q.op) {
        case AggOp::CountStar:
        case AggOp::Count:
            if (!q.distinct) {
                for (const auto& w : ws)
                    if (present(w)) {
                        auto [it, fresh] = out.emplace(w.group, 0);
                        it->second = checked_add(it->second, w.mult, "oracle count");
                    }
                break;
            }
            [[fallthrough]];
        case AggOp::Sum: {
            if (q.distinct) {
                std::map<std::vector<Value>, std::set<Value>> vals;
                for (const auto& w : ws)
                    if (present(w)) vals[w.group].insert(w.value);
                for (const auto& [g, set] : vals) {
                    std::int64_t acc = 0;
                    if (q.op == AggOp::Sum)
                        for (const Value& v : set)
                            acc = checked_add(acc, v.num_at_scale(scale), "oracle sum distinct");
                    else
                        acc = (std::int64_t)set.size();
                    out[g] = acc;
                }
            } else {
                for (const auto& w : ws)
                    if (present(w)) {
                        auto [it, fresh] = out.emplace(w.group, 0);
                        it->second = checked_add(
                            it->second, checked_mul(w.mult, w.value.num_at_scale(scale), "oracle sum"),
                            "oracle sum");
                    }
            }
            break;
        }
        case AggOp::Min:
        case AggOp::Max: {
            std::map<std::vector<Value>, std::int64_t> best;
            for (const auto& w : ws) {
                if (!present(w)) continue;
                std::int64_t v = w.value.num_at_scale(scale);
                auto [it, fresh] = best.emplace(w.group, v);
                if (!fresh) {
                    if (q.op == AggOp::Min ? v < it->second : v > it->second) it->second = v;
                }
            }
            out = std::move(best);
            break;
        }
    }
    return out;
}

}  // namespace oracledetail

// Scalar range answer by full enumeration.
inline RangeAnswer oracle_range_scalar(const AggQuery& q, const Instance& inst,
                                       std::int64_t limit) {
    RangeAnswer out;
    out.type = q.result_type();
    const int scale = out.type.scale;
    std::vector<Witness> ws = witness_bag(q, inst);
    const bool zero_when_empty = q.op == AggOp::CountStar || q.op == AggOp::Count || q.op == AggOp::Sum;
    for_each_repair(inst, limit, [&](const std::vector<FactId>& rep) {
        std::vector<bool> mask(inst.fact_count() + 1, false);
        for (FactId f : rep) mask[f] = true;
        auto agg = oracledetail::aggregate_repair(q, ws, mask, scale);
        std::optional<std::int64_t> val;
        if (!agg.empty()) val = agg.begin()->second;
        else if (zero_when_empty) val = 0;
        if (!val) {
            out.empty_possible = true;
            return;
        }
        if (!out.glb || *val < *out.glb) out.glb = *val;
        if (!out.lub || *val > *out.lub) out.lub = *val;
    });
    return out;
}

// Grouped range answers: only groups present in every repair qualify; their
// interval is the envelope of the per-repair aggregates.  Sorted by key.
inline std::vector<GroupRange> oracle_range_grouped(const AggQuery& q, const Instance& inst,
                                                    std::int64_t limit) {
    struct Acc {
        std::int64_t seen = 0;
        std::int64_t glb = 0, lub = 0;
    };
    std::map<std::vector<Value>, Acc> acc;
    std::int64_t repairs = 0;
    const int scale = q.result_type().scale;
    std::vector<Witness> ws = witness_bag(q, inst);
    for_each_repair(inst, limit, [&](const std::vector<FactId>& rep) {
        ++repairs;
        std::vector<bool> mask(inst.fact_count() + 1, false);
        for (FactId f : rep) mask[f] = true;
        for (const auto& [g, v] : oracledetail::aggregate_repair(q, ws, mask, scale)) {
            auto [it, fresh] = acc.emplace(g, Acc{});
            Acc& a = it->second;
            if (fresh || a.seen == 0) {
                a.glb = a.lub = v;
            } else {
                if (v < a.glb) a.glb = v;
                if (v > a.lub) a.lub = v;
            }
            ++a.seen;
        }
    });
    std::vector<GroupRange> out;
    for (const auto& [g, a] : acc) {
        if (a.seen != repairs) continue;  // missing from some repair
        GroupRange gr;
        gr.key = g;
        gr.range.type = q.result_type();
        gr.range.glb = a.glb;
        gr.range.lub = a.lub;
        out.push_back(std::move(gr));
    }
    return out;
}

// Consistent answers of a plain query: tuples in the answer over every repair.
inline std::vector<std::vector<Value>> oracle_consistent_answers(const UnionQuery& q,
                                                                 const Instance& inst,
                                                                 std::int64_t limit) {
    std::map<std::vector<std::vector<Value>>::value_type, std::int64_t> count;
    std::int64_t repairs = 0;
    for_each_repair(inst, limit, [&](const std::vector<FactId>& rep) {
        ++repairs;
        std::vector<bool> mask(inst.fact_count() + 1, false);
        for (FactId f : rep) mask[f] = true;
        FactPredicate in_repair = [&](FactId f) { return mask[f]; };
        for (auto& row : evaluate(q, inst, &in_repair)) ++count[row];
    });
    std::vector<std::vector<Value>> out;
    for (const auto& [row, c] : count)
        if (c == repairs) out.push_back(row);
    return out;
}

}  // namespace cqa
