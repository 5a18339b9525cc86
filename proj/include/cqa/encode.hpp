#pragma once

// CNF encodings of repairs and aggregation witnesses.
//
// Variables 1..fact_count stand for the facts; a model's true fact variables
// name a subinstance.  Hard clauses pin the models to repairs (or to a sound
// relaxation for the MIN/MAX scan); soft clauses score witnesses so that
//
//     Q(J) = base + offset - satisfied_soft_weight(model of J)
//
// holds for every repair J.  Maximizing satisfied weight therefore yields the
// greatest lower bound; the least upper bound comes from minimizing, which
// min_sat_transform turns back into a maximization.

#include "violations.hpp"
#include "wcnf.hpp"

namespace cqa {

inline WcnfFormula make_fact_formula(const Instance& inst) {
    WcnfFormula f;
    f.nvars = inst.fact_count();
    return f;
}

// The clause "some fact of this witness is missing".
inline std::vector<Lit> exclusion_clause(const std::vector<FactId>& facts) {
    std::vector<Lit> lits;
    lits.reserve(facts.size());
    for (FactId id : facts) lits.push_back(-(Lit)id);
    return lits;
}

// ---------------------------------------------------------------------------
// Hard sides
// ---------------------------------------------------------------------------

// Key constraints, exact: pick exactly one fact per key-equal group of each
// selected relation.  Models restricted to those relations' facts correspond
// one-to-one with their repairs.
inline void encode_key_hard(WcnfFormula& f, const Instance& inst,
                            const std::vector<bool>& relations) {
    for (const auto& g : key_equal_groups(inst)) {
        if (!relations[g.relation]) continue;
        std::vector<Lit> alo;
        alo.reserve(g.facts.size());
        for (FactId id : g.facts) alo.push_back((Lit)id);
        f.add_hard(std::move(alo));
        for (std::size_t i = 0; i < g.facts.size(); ++i)
            for (std::size_t j = i + 1; j < g.facts.size(); ++j)
                f.add_hard({-(Lit)g.facts[i], -(Lit)g.facts[j]});
    }
}

// Key constraints, relaxed to "at least one per group".  Satisfiability
// together with witness exclusions is unchanged (dropping extra facts from a
// model only removes witnesses), and the formula stays linear in the data.
// Used by the MIN/MAX scans, which only ask satisfiability questions.
inline void encode_key_hard_relaxed(WcnfFormula& f, const Instance& inst,
                                    const std::vector<bool>& relations) {
    for (const auto& g : key_equal_groups(inst)) {
        if (!relations[g.relation]) continue;
        std::vector<Lit> alo;
        alo.reserve(g.facts.size());
        for (FactId id : g.facts) alo.push_back((Lit)id);
        f.add_hard(std::move(alo));
    }
}

// Denial constraints (and keys, via their violation pairs), exact: models of
// the formula restricted to fact variables are exactly the repairs.
//
//   - one always-true variable serves empty companion sets
//   - per minimal violation V: not all of V            (alpha)
//   - per fact f and near-violation S of f: p <-> all of S   (theta)
//   - per fact f: f in the model, or some companion set S fully present,
//     i.e. dropping f is justified by an otherwise-complete violation (gamma)
inline void encode_denial(WcnfFormula& f, const Instance& inst,
                          const std::vector<std::vector<FactId>>& minimal) {
    int x_true = f.alloc_var();
    f.add_hard({x_true});
    for (const auto& v : minimal) f.add_hard(exclusion_clause(v));
    for (FactId id = 1; id <= (FactId)inst.fact_count(); ++id) {
        std::vector<Lit> gamma{(Lit)id};
        for (const auto& s : near_violations(id, minimal)) {
            if (s.empty()) {  // singleton violation: dropping is always justified
                gamma.push_back(x_true);
                continue;
            }
            int p = f.alloc_var();
            std::vector<Lit> back{p};
            for (FactId d : s) {
                f.add_hard({-p, (Lit)d});
                back.push_back(-(Lit)d);
            }
            f.add_hard(std::move(back));
            gamma.push_back(p);
        }
        f.add_hard(std::move(gamma));
    }
}

// ---------------------------------------------------------------------------
// Soft sides
// ---------------------------------------------------------------------------

inline std::int64_t witness_contribution(const Witness& w, AggOp op, int scale) {
    if (op == AggOp::CountStar || op == AggOp::Count) return w.mult;
    if (w.value.is_text()) throw EncodingError("text value in numeric aggregation");
    return checked_mul(w.mult, w.value.num_at_scale(scale));
}

// COUNT / SUM soft clauses.  Positive contributions score the witness's
// exclusion clause; negative ones get a presence variable y <-> witness
// present so their weight is counted when the witness survives.  Returns the
// offset (the sum of positive contributions).
inline std::int64_t encode_count_sum(WcnfFormula& f, const std::vector<Witness>& witnesses,
                                     AggOp op, int scale) {
    std::int64_t offset = 0;
    for (const auto& w : witnesses) {
        if (w.facts.empty()) throw EncodingError("witness with empty fact set reached the encoder");
        std::int64_t c = witness_contribution(w, op, scale);
        if (c == 0) continue;
        if (c > 0) {
            f.add_soft(exclusion_clause(w.facts), c);
            offset = checked_add(offset, c);
        } else {
            int y = f.alloc_var();
            std::vector<Lit> excl = exclusion_clause(w.facts);
            excl.push_back(y);
            f.add_hard(std::move(excl));
            for (FactId id : w.facts) f.add_hard({-y, (Lit)id});
            f.add_soft({y}, -c);
        }
    }
    return offset;
}

// One candidate answer value of a DISTINCT aggregation: the witness sets able
// to produce it (nonempty, deduplicated) and its contribution (+1 per answer
// for COUNT DISTINCT, the value itself for SUM DISTINCT).
struct DistinctAnswer {
    std::vector<std::vector<FactId>> witness_sets;
    std::int64_t contribution = 0;
};

// COUNT/SUM DISTINCT soft clauses: per answer, z_j <-> witness j absent,
// v <-> all witnesses absent (the answer is missing).  Soft (v, c) counts an
// absence for positive contributions; soft (-v, |c|) counts a presence for
// negative ones.  Returns the offset.
inline std::int64_t encode_distinct(WcnfFormula& f, const std::vector<DistinctAnswer>& answers) {
    std::int64_t offset = 0;
    for (const auto& a : answers) {
        if (a.contribution == 0) continue;
        std::vector<Lit> z_lits;  // literal meaning "witness j absent"
        for (const auto& s : a.witness_sets) {
            if (s.empty()) throw EncodingError("witness with empty fact set reached the encoder");
            if (s.size() == 1) {
                z_lits.push_back(-(Lit)s[0]);
                continue;
            }
            int z = f.alloc_var();
            std::vector<Lit> fwd{-z};
            for (FactId id : s) {
                fwd.push_back(-(Lit)id);
                f.add_hard({z, (Lit)id});
            }
            f.add_hard(std::move(fwd));
            z_lits.push_back(z);
        }
        int v = f.alloc_var();
        std::vector<Lit> back{v};
        for (Lit z : z_lits) {
            f.add_hard({-v, z});
            back.push_back(-z);
        }
        f.add_hard(std::move(back));
        if (a.contribution > 0) {
            f.add_soft({v}, a.contribution);
            offset = checked_add(offset, a.contribution);
        } else {
            f.add_soft({-v}, -a.contribution);
        }
    }
    return offset;
}

// ---------------------------------------------------------------------------
// Minimum satisfiability via maximum satisfiability
// ---------------------------------------------------------------------------

struct MinSatTransform {
    WcnfFormula formula;
    std::int64_t constant = 0;  // min-sat(original) = constant - max-sat(formula)
};

// Chain transformation: (l1 v ... v lk, w) becomes the k clauses
// (-l1, w), (l1 v -l2, w), ..., (l1 v ... v l_{k-1} v -lk, w); each
// assignment satisfies k-1 of them plus one more iff the original clause is
// falsified.  Hard clauses carry over unchanged.
inline MinSatTransform min_sat_transform(const WcnfFormula& in) {
    MinSatTransform out;
    out.formula.nvars = in.nvars;
    out.formula.hard = in.hard;
    for (const auto& s : in.soft) {
        std::vector<Lit> prefix;
        for (std::size_t i = 0; i < s.lits.size(); ++i) {
            std::vector<Lit> c = prefix;
            c.push_back(-s.lits[i]);
            out.formula.add_soft(std::move(c), s.weight);
            prefix.push_back(s.lits[i]);
        }
        out.constant = checked_add(out.constant, checked_mul((std::int64_t)s.lits.size(), s.weight));
    }
    return out;
}

}  // namespace cqa
