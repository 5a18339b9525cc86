#pragma once

// Weighted partial CNF: hard clauses plus positive-weight soft clauses over
// variables 1..nvars.  Literals follow the DIMACS convention (+v / -v).
//
// Encodings identify variables 1..fact_count with fact ids; auxiliary
// variables are allocated above that range in deterministic order, so a
// formula built twice from the same inputs is identical clause for clause.

#include <cstdint>
#include <vector>

#include "types.hpp"

namespace cqa {

using Lit = int;

inline int lit_var(Lit l) { return l < 0 ? -l : l; }

struct SoftClause {
    std::vector<Lit> lits;
    std::int64_t weight = 0;
};

struct WcnfFormula {
    int nvars = 0;
    std::vector<std::vector<Lit>> hard;
    std::vector<SoftClause> soft;

    int alloc_var() { return ++nvars; }

    void ensure_var(int v) {
        if (v > nvars) nvars = v;
    }

    void add_hard(std::vector<Lit> lits) {
        for (Lit l : lits) ensure_var(lit_var(l));
        hard.push_back(std::move(lits));
    }

    void add_soft(std::vector<Lit> lits, std::int64_t weight) {
        if (weight <= 0) throw EncodingError("soft clause weight must be positive");
        for (Lit l : lits) ensure_var(lit_var(l));
        soft.push_back({std::move(lits), weight});
    }

    std::int64_t soft_total() const {
        std::int64_t t = 0;
        for (const auto& s : soft) t = checked_add(t, s.weight);
        return t;
    }

    // Classic-format hard-clause weight: one more than the soft total.
    std::int64_t top() const { return checked_add(soft_total(), (std::int64_t)1); }
};

// A (possibly partial) assignment: values indexed by variable, entry 0 unused.
using Model = std::vector<bool>;

inline bool clause_satisfied(const std::vector<Lit>& lits, const Model& m) {
    for (Lit l : lits) {
        int v = lit_var(l);
        if (v < (int)m.size() && m[v] == (l > 0)) return true;
    }
    return false;
}

inline std::int64_t satisfied_soft_weight(const WcnfFormula& f, const Model& m) {
    std::int64_t t = 0;
    for (const auto& s : f.soft)
        if (clause_satisfied(s.lits, m)) t = checked_add(t, s.weight);
    return t;
}

}  // namespace cqa
