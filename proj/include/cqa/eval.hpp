#pragma once

// Query evaluation over an Instance: a backtracking index-nested-loop join.
//
// for_each_match enumerates every assignment of one fact per atom (a join
// row) satisfying the conjunctive query; witness_bag turns those join rows
// into aggregation witnesses (fact set, value, group key, multiplicity).
// Join rows satisfying several OR-blocks of one statement are counted once,
// matching SQL's row-at-a-time disjunctive WHERE.

#include <functional>
#include <map>
#include <set>
#include <tuple>

#include "instance.hpp"
#include "query.hpp"

namespace cqa {

using Binding = std::vector<Value>;  // var -> value
using FactPredicate = std::function<bool(FactId)>;

namespace evaldetail {

inline bool filter_passes(const QFilter& f, const Binding& b) {
    auto resolve = [&](const QTerm& t) -> const Value& { return t.is_var() ? b[t.var] : t.constant; };
    switch (f.kind) {
        case FilterKind::Cmp:
            return cmp_apply(f.op, resolve(f.lhs), resolve(f.rhs));
        case FilterKind::In:
            return std::binary_search(f.set.begin(), f.set.end(), resolve(f.lhs));
        case FilterKind::Like: {
            const Value& v = resolve(f.lhs);
            return v.is_text() && like_match(v.str(), f.pattern);
        }
    }
    return false;
}

struct JoinPlan {
    std::vector<int> atom_order;                  // positions into cq.atoms
    std::vector<std::vector<int>> filters_after;  // per order slot, filter indices
    std::vector<int> upfront_filters;             // variable-free filters
};

inline JoinPlan plan_join(const Instance& inst, const ConjunctiveQuery& cq) {
    JoinPlan plan;
    const std::size_t n = cq.atoms.size();
    std::vector<bool> used(n, false);
    std::vector<bool> var_bound(cq.nvars, false);
    for (std::size_t step = 0; step < n; ++step) {
        int best = -1;
        std::size_t best_bound = 0, best_size = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i]) continue;
            std::size_t bound = 0;
            for (const QTerm& t : cq.atoms[i].args)
                if (!t.is_var() || var_bound[t.var]) ++bound;
            std::size_t size = inst.relation_facts(cq.atoms[i].relation).size();
            if (best < 0 || bound > best_bound || (bound == best_bound && size < best_size)) {
                best = (int)i;
                best_bound = bound;
                best_size = size;
            }
        }
        used[best] = true;
        plan.atom_order.push_back(best);
        for (const QTerm& t : cq.atoms[best].args)
            if (t.is_var()) var_bound[t.var] = true;
    }
    // Attach each filter to the earliest slot where all its variables exist.
    plan.filters_after.resize(n);
    std::vector<bool> bound_now(cq.nvars, false);
    std::vector<bool> filter_done(cq.filters.size(), false);
    auto ready = [&](const QFilter& f) {
        auto term_ok = [&](const QTerm& t) { return !t.is_var() || bound_now[t.var]; };
        if (!term_ok(f.lhs)) return false;
        if (f.kind == FilterKind::Cmp && !term_ok(f.rhs)) return false;
        return true;
    };
    for (std::size_t fi = 0; fi < cq.filters.size(); ++fi)
        if (ready(cq.filters[fi])) {
            plan.upfront_filters.push_back((int)fi);
            filter_done[fi] = true;
        }
    for (std::size_t slot = 0; slot < n; ++slot) {
        for (const QTerm& t : cq.atoms[plan.atom_order[slot]].args)
            if (t.is_var()) bound_now[t.var] = true;
        for (std::size_t fi = 0; fi < cq.filters.size(); ++fi)
            if (!filter_done[fi] && ready(cq.filters[fi])) {
                plan.filters_after[slot].push_back((int)fi);
                filter_done[fi] = true;
            }
    }
    return plan;
}

}  // namespace evaldetail

// Enumerates join rows of one conjunctive query.  `fn` receives the chosen
// fact per atom (in cq.atoms order) and the variable binding; returning false
// stops the enumeration.  `filter` restricts which facts may participate.
template <class F>
void for_each_match(const Instance& inst, const ConjunctiveQuery& cq, F&& fn,
                    const FactPredicate* filter = nullptr) {
    if (cq.never_matches) return;
    Binding binding(cq.nvars);
    std::vector<bool> bound(cq.nvars, false);
    std::vector<FactId> chosen(cq.atoms.size(), 0);

    evaldetail::JoinPlan plan = evaldetail::plan_join(inst, cq);
    for (int fi : plan.upfront_filters)
        if (!evaldetail::filter_passes(cq.filters[fi], binding)) return;

    if (cq.atoms.empty()) {
        fn(chosen, binding);
        return;
    }

    // Iterative backtracking over plan.atom_order.
    struct Frame {
        std::vector<FactId> candidates;
        std::size_t next = 0;
        std::vector<int> bound_here;  // vars this atom bound (to undo)
    };
    std::vector<Frame> stack(plan.atom_order.size());

    auto candidates_for = [&](int atom_idx) -> std::vector<FactId> {
        const QAtom& atom = cq.atoms[atom_idx];
        // Prefer an index lookup on some already-determined argument.
        for (std::size_t p = 0; p < atom.args.size(); ++p) {
            const QTerm& t = atom.args[p];
            if (!t.is_var())
                return inst.lookup(atom.relation, (int)p, t.constant);
            if (bound[t.var])
                return inst.lookup(atom.relation, (int)p, binding[t.var]);
        }
        return inst.relation_facts(atom.relation);
    };

    auto try_fact = [&](int atom_idx, FactId id, std::vector<int>& bound_here) -> bool {
        const QAtom& atom = cq.atoms[atom_idx];
        const Fact& f = inst.fact(id);
        for (std::size_t p = 0; p < atom.args.size(); ++p) {
            const QTerm& t = atom.args[p];
            if (!t.is_var()) {
                if (f.values[p] != t.constant) goto fail;
            } else if (bound[t.var]) {
                if (f.values[p] != binding[t.var]) goto fail;
            } else {
                binding[t.var] = f.values[p];
                bound[t.var] = true;
                bound_here.push_back(t.var);
            }
        }
        return true;
    fail:
        for (int v : bound_here) bound[v] = false;
        bound_here.clear();
        return false;
    };

    std::size_t depth = 0;
    stack[0].candidates = candidates_for(plan.atom_order[0]);
    stack[0].next = 0;
    for (;;) {
        Frame& fr = stack[depth];
        // Undo bindings from the previous fact at this depth.
        for (int v : fr.bound_here) bound[v] = false;
        fr.bound_here.clear();

        bool advanced = false;
        while (fr.next < fr.candidates.size()) {
            FactId id = fr.candidates[fr.next++];
            if (filter && !(*filter)(id)) continue;
            if (!try_fact(plan.atom_order[depth], id, fr.bound_here)) continue;
            bool ok = true;
            for (int fi : plan.filters_after[depth])
                if (!evaldetail::filter_passes(cq.filters[fi], binding)) {
                    ok = false;
                    break;
                }
            if (!ok) {
                for (int v : fr.bound_here) bound[v] = false;
                fr.bound_here.clear();
                continue;
            }
            chosen[plan.atom_order[depth]] = id;
            advanced = true;
            break;
        }

        if (!advanced) {
            if (depth == 0) return;
            --depth;
            continue;
        }
        if (depth + 1 == stack.size()) {
            bool keep_going = true;
            if constexpr (std::is_void_v<decltype(fn(chosen, binding))>)
                fn(chosen, binding);
            else
                keep_going = fn(chosen, binding);
            if (!keep_going) return;
            // stay at this depth; next loop iteration tries the next candidate
        } else {
            ++depth;
            stack[depth].candidates = candidates_for(plan.atom_order[depth]);
            stack[depth].next = 0;
            stack[depth].bound_here.clear();
        }
    }
}

// Set-semantics answers of a union of conjunctive queries.
inline std::vector<std::vector<Value>> evaluate(const UnionQuery& q, const Instance& inst,
                                                const FactPredicate* filter = nullptr) {
    std::set<std::vector<Value>> rows;
    for (const auto& cq : q.disjuncts) {
        for_each_match(
            inst, cq,
            [&](const std::vector<FactId>&, const Binding& b) {
                std::vector<Value> row;
                row.reserve(cq.head.size());
                for (const QTerm& t : cq.head) row.push_back(t.is_var() ? b[t.var] : t.constant);
                rows.insert(std::move(row));
                return true;
            },
            filter);
    }
    return {rows.begin(), rows.end()};
}

inline bool exists_match(const UnionQuery& q, const Instance& inst,
                         const FactPredicate* filter = nullptr) {
    for (const auto& cq : q.disjuncts) {
        bool found = false;
        for_each_match(
            inst, cq,
            [&](const std::vector<FactId>&, const Binding&) {
                found = true;
                return false;
            },
            filter);
        if (found) return true;
    }
    return false;
}

// The value a join row contributes: bare columns keep their stored value
// (text allowed for COUNT); arithmetic evaluates at the expression's scale.
inline Value witness_value(const AggExpr& e, const Binding& b) {
    const ExprNode& root = e.nodes[e.root];
    if (root.kind == ExprNode::Kind::Col) return b[root.var];
    if (root.kind == ExprNode::Kind::Lit) return root.lit;
    return Value::decimal(eval_expr(e, b), e.scale());
}

// One aggregation witness: a set of facts whose joint survival in a repair
// makes the underlying query produce at least one matching join row.
struct Witness {
    std::vector<FactId> facts;  // sorted, duplicates removed, elided facts dropped
    Value value;                // default-constructed for COUNT(*)
    std::vector<Value> group;   // grouping key; empty for scalar queries
    std::int64_t mult = 0;      // number of join rows behind this witness

    bool operator==(const Witness&) const = default;
};

// Collects the witness bag of an aggregation query.  `elide` names facts that
// belong to every repair and may be dropped from witness sets; `filter`
// restricts matching to a sub-instance (e.g. one repair).
inline std::vector<Witness> witness_bag(const AggQuery& q, const Instance& inst,
                                        const FactPredicate* elide = nullptr,
                                        const FactPredicate* filter = nullptr) {
    std::map<std::tuple<std::vector<Value>, std::vector<FactId>, Value>, std::int64_t> acc;
    std::set<std::vector<FactId>> seen;  // join-row dedup across OR-blocks
    const bool multi = q.underlying.disjuncts.size() > 1;
    for (std::size_t d = 0; d < q.underlying.disjuncts.size(); ++d) {
        const ConjunctiveQuery& cq = q.underlying.disjuncts[d];
        for_each_match(
            inst, cq,
            [&](const std::vector<FactId>& facts, const Binding& b) {
                if (multi && !seen.insert(facts).second) return true;
                std::vector<FactId> key = facts;
                std::sort(key.begin(), key.end());
                key.erase(std::unique(key.begin(), key.end()), key.end());
                if (elide)
                    key.erase(std::remove_if(key.begin(), key.end(),
                                             [&](FactId id) { return (*elide)(id); }),
                              key.end());
                Value val;
                if (q.op != AggOp::CountStar) val = witness_value(q.exprs[d], b);
                std::vector<Value> group;
                if (d < q.group_terms.size())
                    for (const QTerm& t : q.group_terms[d])
                        group.push_back(t.is_var() ? b[t.var] : t.constant);
                acc[{std::move(group), std::move(key), std::move(val)}] += 1;
                return true;
            },
            filter);
    }
    std::vector<Witness> out;
    out.reserve(acc.size());
    for (auto& [k, mult] : acc) {
        Witness w;
        w.group = std::get<0>(k);
        w.facts = std::get<1>(k);
        w.value = std::get<2>(k);
        w.mult = mult;
        out.push_back(std::move(w));
    }
    return out;
}

}  // namespace cqa
