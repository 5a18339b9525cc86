#pragma once

// Constraint violations.
//
// A violation is a set of facts that jointly break a constraint: two facts
// agreeing on a relation's key, or an instantiation of a denial constraint.
// Repairs are exactly the maximal subinstances containing no violation, so
// everything downstream (encodings, the repair oracle, elision) is driven by
// the inclusion-minimal violation sets computed here.

#include <set>

#include "eval.hpp"

namespace cqa {

// Translates a denial constraint into a conjunctive query whose join rows are
// exactly the forbidden instantiations.  Equality comparisons become shared
// variables so the join planner can use index lookups; other comparisons
// become filters.
inline ConjunctiveQuery dc_query(const Schema& schema, const DenialConstraint& dc) {
    ConjunctiveQuery cq;
    std::vector<int> off;
    int ncols = 0;
    for (int rel : dc.atom_relations) {
        off.push_back(ncols);
        ncols += (int)schema.relations[rel].attrs.size();
    }
    auto col_of = [&](const DcTerm& t) { return off[t.atom] + t.attr; };

    std::vector<int> parent(ncols);
    for (int i = 0; i < ncols; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };

    std::map<int, Value> bound;
    for (const auto& c : dc.comparisons) {
        if (c.op != CmpOp::Eq) continue;
        if (!c.lhs.is_const() && !c.rhs.is_const())
            parent[find(col_of(c.lhs))] = find(col_of(c.rhs));
    }
    for (const auto& c : dc.comparisons) {
        if (c.op != CmpOp::Eq) continue;
        const DcTerm *colside = nullptr, *litside = nullptr;
        if (!c.lhs.is_const() && c.rhs.is_const()) colside = &c.lhs, litside = &c.rhs;
        else if (!c.rhs.is_const() && c.lhs.is_const()) colside = &c.rhs, litside = &c.lhs;
        else continue;
        int root = find(col_of(*colside));
        auto it = bound.find(root);
        if (it == bound.end()) bound.emplace(root, litside->constant);
        else if (it->second != litside->constant) cq.never_matches = true;
    }

    std::vector<int> var_of(ncols, -1);
    cq.col_term.resize(ncols);
    for (int c = 0; c < ncols; ++c) {
        int root = find(c);
        auto it = bound.find(root);
        if (it != bound.end()) {
            cq.col_term[c] = QTerm::lit(it->second);
        } else {
            if (var_of[root] < 0) var_of[root] = cq.nvars++;
            cq.col_term[c] = QTerm::variable(var_of[root]);
        }
    }
    for (std::size_t a = 0; a < dc.atom_relations.size(); ++a) {
        QAtom atom;
        atom.relation = dc.atom_relations[a];
        int arity = (int)schema.relations[atom.relation].attrs.size();
        for (int p = 0; p < arity; ++p) atom.args.push_back(cq.col_term[off[a] + p]);
        cq.atoms.push_back(std::move(atom));
    }
    auto term_of = [&](const DcTerm& t) {
        return t.is_const() ? QTerm::lit(t.constant) : cq.col_term[col_of(t)];
    };
    for (const auto& c : dc.comparisons) {
        if (c.op == CmpOp::Eq && !(c.lhs.is_const() && c.rhs.is_const())) continue;  // absorbed
        QFilter f;
        f.kind = FilterKind::Cmp;
        f.op = c.op;
        f.lhs = term_of(c.lhs);
        f.rhs = term_of(c.rhs);
        if (!f.lhs.is_var() && !f.rhs.is_var()) {
            if (!cmp_apply(f.op, f.lhs.constant, f.rhs.constant)) cq.never_matches = true;
            continue;
        }
        cq.filters.push_back(std::move(f));
    }
    return cq;
}

// All inclusion-minimal violation sets, sorted lexicographically.  Key
// violations are pairs of distinct facts in one key-equal group; denial
// constraint violations are the fact sets of forbidden instantiations.
inline std::vector<std::vector<FactId>> minimal_violations(const Instance& inst) {
    std::set<std::vector<FactId>> sets;
    bool only_pairs = true;
    for (const auto& g : key_equal_groups(inst)) {
        for (std::size_t i = 0; i < g.facts.size(); ++i)
            for (std::size_t j = i + 1; j < g.facts.size(); ++j)
                sets.insert({g.facts[i], g.facts[j]});
    }
    for (const auto& dc : inst.schema.dcs) {
        ConjunctiveQuery cq = dc_query(inst.schema, dc);
        for_each_match(inst, cq, [&](const std::vector<FactId>& facts, const Binding&) {
            std::vector<FactId> s = facts;
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
            if (s.size() != 2) only_pairs = false;
            sets.insert(std::move(s));
            return true;
        });
    }
    std::vector<std::vector<FactId>> all(sets.begin(), sets.end());
    if (only_pairs) return all;  // equal-size sets are mutually incomparable

    // Keep the inclusion-minimal sets.
    std::stable_sort(all.begin(), all.end(),
                     [](const auto& a, const auto& b) { return a.size() < b.size(); });
    std::vector<std::vector<FactId>> kept;
    std::map<FactId, std::vector<int>> containing;  // fact -> indices into kept
    for (auto& s : all) {
        bool minimal = true;
        std::set<int> checked;
        for (FactId f : s) {
            auto it = containing.find(f);
            if (it == containing.end()) continue;
            for (int idx : it->second) {
                if (!checked.insert(idx).second) continue;
                if (std::includes(s.begin(), s.end(), kept[idx].begin(), kept[idx].end())) {
                    minimal = false;
                    break;
                }
            }
            if (!minimal) break;
        }
        if (!minimal) continue;
        int idx = (int)kept.size();
        kept.push_back(std::move(s));
        for (FactId f : kept.back()) containing[f].push_back(idx);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

// For each given fact: the minimal violations containing it, with the fact
// itself removed (the sets of companions that together kill the fact).
inline std::vector<std::vector<FactId>> near_violations(
    FactId f, const std::vector<std::vector<FactId>>& minimal) {
    std::vector<std::vector<FactId>> out;
    for (const auto& v : minimal) {
        auto it = std::find(v.begin(), v.end(), f);
        if (it == v.end()) continue;
        std::vector<FactId> rest;
        rest.reserve(v.size() - 1);
        for (FactId g : v)
            if (g != f) rest.push_back(g);
        out.push_back(std::move(rest));
    }
    return out;
}

inline bool is_consistent(const Instance& inst) {
    for (const auto& g : key_equal_groups(inst))
        if (!g.consistent()) return false;
    for (const auto& dc : inst.schema.dcs) {
        ConjunctiveQuery cq = dc_query(inst.schema, dc);
        bool hit = false;
        for_each_match(inst, cq, [&](const std::vector<FactId>&, const Binding&) {
            hit = true;
            return false;
        });
        if (hit) return false;
    }
    return true;
}

// Relations touched by at least one minimal violation.  Facts of the other
// relations belong to every repair and are elided from witness sets.
inline std::vector<bool> violating_relations(const Instance& inst,
                                             const std::vector<std::vector<FactId>>& minimal) {
    std::vector<bool> out(inst.schema.relations.size(), false);
    for (const auto& v : minimal)
        for (FactId f : v) out[inst.fact(f).relation] = true;
    return out;
}

}  // namespace cqa
