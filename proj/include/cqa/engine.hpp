#pragma once

// The range-consistent-answer engine.
//
// Scalar COUNT/SUM run through the weighted-partial-MaxSAT reduction: hard
// clauses pin models to repairs, soft clauses score witnesses, and
//     Q(J) = base + offset - satisfied_soft_weight(J)
// turns the greatest lower bound into a maximization and the least upper
// bound into a minimization (solved as maximization of the chain transform).
// DISTINCT variants score candidate answer values instead of witnesses.
// MIN/MAX take a polynomial bound from conflict-free witnesses plus an
// iterative SAT scan over the sorted distinct values.  Grouping first
// computes the consistent answers of the grouping view, then specializes the
// scalar pipeline per group.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "answer.hpp"
#include "encode.hpp"
#include "eval.hpp"
#include "sat.hpp"
#include "solver.hpp"

namespace cqa {

struct SolveStats {
    std::int64_t vars = 0;
    std::int64_t clauses = 0;  // hard clauses
    std::int64_t soft = 0;
    std::int64_t sat_calls = 0;  // SAT probes + MaxSAT solves
    std::int64_t encode_ms = 0;
    std::int64_t solve_ms = 0;
    bool shortcut = false;  // answered entirely from the consistent part

    void absorb(const SolveStats& o) {
        vars += o.vars;
        clauses += o.clauses;
        soft += o.soft;
        sat_calls += o.sat_calls;
        encode_ms += o.encode_ms;
        solve_ms += o.solve_ms;
        shortcut = shortcut && o.shortcut;
    }
};

enum class TopKOrder { Group, Answer };

struct EngineConfig {
    SolverConfig solver;
    bool shortcut = true;        // fold consistent-part-only queries without solving
    bool binary_search = false;  // MIN/MAX scan strategy
    int jobs = 1;                // per-group parallelism
    TopKOrder top_k_order = TopKOrder::Group;
    std::string wcnf_dir;  // dump every MaxSAT formula here when non-empty
    WcnfFormat wcnf_format = WcnfFormat::Classic;
};

struct EngineResult {
    RangeAnswer range;
    SolveStats stats;
};

struct GroupedResult {
    std::vector<GroupRange> groups;
    std::vector<SolveStats> per_group;  // parallel to groups
    SolveStats stats;                   // totals, including the consistency phase
};

// A built scalar reduction (COUNT/SUM, plain or DISTINCT).
struct EncodedScalar {
    WcnfFormula formula;
    std::int64_t base = 0;    // contribution of witnesses inside the consistent part
    std::int64_t offset = 0;  // sum of positive encoded contributions
};

// Presentation order for grouped answers, shared by the engine and the
// brute-force oracle so verification compares like with like.  An explicit
// ORDER BY wins; otherwise TopKOrder::Answer ranks by glb descending (groups
// with no lower bound last, ties by key); the default is group-key order.
// Returns the permutation to apply.
inline std::vector<std::size_t> group_order(const AggQuery& q, TopKOrder order,
                                            const std::vector<GroupRange>& groups) {
    std::vector<std::size_t> idx(groups.size());
    std::iota(idx.begin(), idx.end(), 0);
    auto key_of = [&](std::size_t i) -> const std::vector<Value>& { return groups[i].key; };
    if (!q.order_cols.empty()) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            for (int oc : q.order_cols) {
                const Value& va = key_of(a)[oc];
                const Value& vb = key_of(b)[oc];
                if (!(va == vb)) return q.order_desc ? vb < va : va < vb;
            }
            return key_of(a) < key_of(b);
        });
    } else if (order == TopKOrder::Answer) {
        auto glb_of = [&](std::size_t i) {
            return groups[i].range.glb ? *groups[i].range.glb
                                       : std::numeric_limits<std::int64_t>::min();
        };
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            if (glb_of(a) != glb_of(b)) return glb_of(a) > glb_of(b);
            return key_of(a) < key_of(b);
        });
    } else {
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return key_of(a) < key_of(b); });
    }
    return idx;
}

// Applies group_order and the TOP-k cut to an oracle-side result.
inline void order_and_truncate(const AggQuery& q, TopKOrder order,
                               std::vector<GroupRange>& groups) {
    std::vector<std::size_t> idx = group_order(q, order, groups);
    std::vector<GroupRange> g;
    g.reserve(idx.size());
    for (std::size_t i : idx) g.push_back(std::move(groups[i]));
    groups = std::move(g);
    if (q.top_k && (std::int64_t)groups.size() > *q.top_k) groups.resize((std::size_t)*q.top_k);
}

namespace enginedetail {

class Stopwatch {
  public:
    Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
    std::int64_t lap_ms() {
        auto t1 = std::chrono::steady_clock::now();
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0_).count();
        t0_ = t1;
        return ms;
    }

  private:
    std::chrono::steady_clock::time_point t0_;
};

}  // namespace enginedetail

class CqaEngine {
  public:
    explicit CqaEngine(const Instance& inst, EngineConfig cfg = {})
        : inst_(inst), cfg_(std::move(cfg)) {
        inst_.build_indexes();  // concurrent lookups must not build lazily
        minimal_ = minimal_violations(inst_);
        violating_ = violating_relations(inst_, minimal_);
        elide_ = [this](FactId id) { return !violating_[inst_.fact(id).relation]; };
    }

    bool instance_consistent() const { return minimal_.empty(); }
    const std::vector<std::vector<FactId>>& minimal() const { return minimal_; }

    // ------------------------------------------------------------------
    // Scalar queries
    // ------------------------------------------------------------------

    EngineResult scalar(const AggQuery& q) const { return scalar_impl(q, "scalar"); }

    // The WPMaxSAT reduction of a scalar COUNT/SUM query (the glb formula);
    // MIN/MAX have no single formula and are rejected.
    EncodedScalar encode_scalar(const AggQuery& q) const {
        if (q.grouped()) throw ValidationError("encode expects a scalar query");
        if (q.op == AggOp::Min || q.op == AggOp::Max)
            throw UnsupportedError("MIN/MAX solve by iterative SAT scans, not a single formula");
        return q.distinct ? build_distinct(q) : build_count_sum(q);
    }

    // ------------------------------------------------------------------
    // Consistent answers of a plain query (true in every repair)
    // ------------------------------------------------------------------

    std::vector<std::vector<Value>> consistent_answers(const UnionQuery& q,
                                                       SolveStats* stats = nullptr) const {
        SolveStats local;
        SolveStats& st = stats ? *stats : local;
        enginedetail::Stopwatch sw;

        // Candidate rows and the witness sets backing them.
        std::map<std::vector<Value>, std::set<std::vector<FactId>>> cand;
        for (const auto& cq : q.disjuncts) {
            for_each_match(inst_, cq, [&](const std::vector<FactId>& facts, const Binding& b) {
                std::vector<Value> row;
                row.reserve(cq.head.size());
                for (const QTerm& t : cq.head) row.push_back(t.is_var() ? b[t.var] : t.constant);
                std::vector<FactId> key = facts;
                std::sort(key.begin(), key.end());
                key.erase(std::unique(key.begin(), key.end()), key.end());
                key.erase(std::remove_if(key.begin(), key.end(),
                                         [&](FactId id) { return elide_(id); }),
                          key.end());
                cand[std::move(row)].insert(std::move(key));
                return true;
            });
        }

        WcnfFormula hardf = make_fact_formula(inst_);
        add_hard(hardf, q, /*relaxed=*/true);
        st.encode_ms += sw.lap_ms();

        std::vector<std::vector<Value>> out;
        for (const auto& [row, sets] : cand) {
            // A witness entirely inside the consistent part survives every
            // repair: the row is consistent, no solver needed.
            bool sure = false;
            for (const auto& s : sets)
                if (s.empty()) {
                    sure = true;
                    break;
                }
            if (!sure) {
                SatSolver solver;
                solver.ensure_vars(hardf.nvars);
                for (const auto& c : hardf.hard) solver.add_clause(c);
                for (const auto& s : sets) solver.add_clause(exclusion_clause(s));
                ++st.sat_calls;
                sure = !solver.solve();  // no repair avoids every witness
                st.solve_ms += sw.lap_ms();
            }
            if (sure) out.push_back(row);
        }
        st.vars = std::max(st.vars, (std::int64_t)hardf.nvars);
        st.clauses = std::max(st.clauses, (std::int64_t)hardf.hard.size());
        return out;
    }

    // ------------------------------------------------------------------
    // Grouped queries
    // ------------------------------------------------------------------

    GroupedResult grouped(const AggQuery& q) const {
        if (!q.grouped()) throw ValidationError("grouped path requires GROUP BY");
        GroupedResult out;

        // The underlying query's heads are the grouping terms: its consistent
        // answers are exactly the groups reportable in every repair.
        std::vector<std::vector<Value>> keys = consistent_answers(q.underlying, &out.stats);

        const std::size_t n = keys.size();
        out.groups.resize(n);
        out.per_group.resize(n);

        auto work = [&](std::size_t i) {
            AggQuery qi = specialize_to_group(q, keys[i]);
            EngineResult r = scalar_impl(qi, "group" + std::to_string(i));
            out.groups[i].key = keys[i];
            out.groups[i].range = r.range;
            out.per_group[i] = r.stats;
        };

        int jobs = std::max(1, cfg_.jobs);
        if (jobs == 1 || n <= 1) {
            for (std::size_t i = 0; i < n; ++i) work(i);
        } else {
            std::atomic<std::size_t> next{0};
            std::exception_ptr err;
            std::mutex err_mu;
            auto runner = [&] {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= n) return;
                    try {
                        work(i);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(err_mu);
                        if (!err) err = std::current_exception();
                    }
                }
            };
            std::vector<std::thread> pool;
            for (int t = 0; t < std::min<int>(jobs, (int)n); ++t) pool.emplace_back(runner);
            for (auto& t : pool) t.join();
            if (err) std::rethrow_exception(err);
        }

        order_groups(q, out);
        if (q.top_k && (std::int64_t)out.groups.size() > *q.top_k) {
            out.groups.resize((std::size_t)*q.top_k);
            out.per_group.resize((std::size_t)*q.top_k);
        }
        for (const auto& s : out.per_group) out.stats.absorb(s);
        return out;
    }

  private:
    // ------------------------------------------------------------------
    // Shared pieces
    // ------------------------------------------------------------------

    std::vector<bool> query_relations(const UnionQuery& q) const {
        std::vector<bool> rels(inst_.schema.relations.size(), false);
        for (const auto& d : q.disjuncts)
            for (const auto& a : d.atoms) rels[a.relation] = true;
        return rels;
    }

    // Hard side: exact repairs, or the at-least-one relaxation for pure
    // satisfiability questions (sound: removing facts from a model never adds
    // witnesses).  Denial constraints always get the exact encoding.
    void add_hard(WcnfFormula& f, const UnionQuery& q, bool relaxed) const {
        if (inst_.schema.has_dcs()) {
            encode_denial(f, inst_, minimal_);
            return;
        }
        std::vector<bool> rels = query_relations(q);
        for (std::size_t r = 0; r < rels.size(); ++r)
            rels[r] = rels[r] && violating_[r];
        if (relaxed)
            encode_key_hard_relaxed(f, inst_, rels);
        else
            encode_key_hard(f, inst_, rels);
    }

    void dump_formula(const WcnfFormula& f, const std::string& label) const {
        if (cfg_.wcnf_dir.empty()) return;
        std::filesystem::create_directories(cfg_.wcnf_dir);
        std::ofstream os(std::filesystem::path(cfg_.wcnf_dir) / (label + ".wcnf"));
        if (!os) throw IoError("cannot write WCNF dump for " + label);
        write_wcnf(os, f, cfg_.wcnf_format);
    }

    std::int64_t run_maxsat(const WcnfFormula& f, SolveStats& st, const std::string& label) const {
        dump_formula(f, label);
        enginedetail::Stopwatch sw;
        ++st.sat_calls;
        MaxSatOutcome out = solve_wpmaxsat(f, cfg_.solver);
        st.solve_ms += sw.lap_ms();
        if (!out.satisfiable)
            throw SolverError("hard clauses are unsatisfiable: no repair exists");
        return out.satisfied_weight;
    }

    // ------------------------------------------------------------------
    // Scalar dispatch
    // ------------------------------------------------------------------

    EngineResult scalar_impl(const AggQuery& q, const std::string& label) const {
        if (q.grouped()) throw ValidationError("scalar path requires no grouping");
        if (q.op == AggOp::Min || q.op == AggOp::Max) return scalar_minmax(q);
        return scalar_maxsat(q, label);
    }

    // COUNT/SUM and their DISTINCT variants: one WPMaxSAT formula, solved
    // twice (maximize for glb, chain-transformed minimize for lub).
    EngineResult scalar_maxsat(const AggQuery& q, const std::string& label) const {
        EngineResult r;
        r.range.type = q.result_type();
        enginedetail::Stopwatch sw;

        EncodedScalar enc = q.distinct ? build_distinct(q) : build_count_sum(q);
        r.stats.vars = enc.formula.nvars;
        r.stats.clauses = (std::int64_t)enc.formula.hard.size();
        r.stats.soft = (std::int64_t)enc.formula.soft.size();
        r.stats.encode_ms += sw.lap_ms();

        if (enc.formula.soft.empty() && cfg_.shortcut) {
            // Nothing uncertain: every repair yields the same value.
            r.range.glb = r.range.lub = checked_add(enc.base, enc.offset);
            r.stats.shortcut = true;
            return r;
        }

        std::int64_t max_sat = run_maxsat(enc.formula, r.stats, label + "_glb");

        sw.lap_ms();
        MinSatTransform tr = min_sat_transform(enc.formula);
        r.stats.encode_ms += sw.lap_ms();
        std::int64_t min_sat = tr.constant - run_maxsat(tr.formula, r.stats, label + "_lub");

        std::int64_t fixed = checked_add(enc.base, enc.offset);
        r.range.glb = checked_add(fixed, -max_sat);
        r.range.lub = checked_add(fixed, -min_sat);
        return r;
    }

    EncodedScalar build_count_sum(const AggQuery& q) const {
        const int scale = q.result_type().scale;
        std::vector<Witness> witnesses = witness_bag(q, inst_, &elide_);
        EncodedScalar out;
        std::vector<Witness> enc;
        for (auto& w : witnesses) {
            if (w.facts.empty())
                out.base = checked_add(out.base, witness_contribution(w, q.op, scale));
            else
                enc.push_back(std::move(w));
        }
        out.formula = make_fact_formula(inst_);
        add_hard(out.formula, q.underlying, /*relaxed=*/false);
        out.offset = encode_count_sum(out.formula, enc, q.op, scale);
        return out;
    }

    EncodedScalar build_distinct(const AggQuery& q) const {
        const int scale = q.result_type().scale;
        std::vector<Witness> witnesses = witness_bag(q, inst_, &elide_);
        // Candidate answer values and the witness sets able to produce them.
        std::map<Value, std::set<std::vector<FactId>>> by_value;
        std::set<Value> always;  // witnessed inside the consistent part
        for (auto& w : witnesses) {
            if (w.facts.empty())
                always.insert(w.value);
            else
                by_value[w.value].insert(w.facts);
        }
        EncodedScalar out;
        auto contribution = [&](const Value& v) -> std::int64_t {
            if (q.op == AggOp::Count) return 1;
            if (v.is_text()) throw EncodingError("text value in numeric aggregation");
            return v.num_at_scale(scale);
        };
        for (const Value& v : always) out.base = checked_add(out.base, contribution(v));
        std::vector<DistinctAnswer> answers;
        for (const auto& [v, sets] : by_value) {
            if (always.count(v)) continue;  // present in every repair regardless
            DistinctAnswer a;
            a.witness_sets.assign(sets.begin(), sets.end());
            a.contribution = contribution(v);
            if (a.contribution == 0) continue;  // value 0 never moves a SUM
            answers.push_back(std::move(a));
        }
        out.formula = make_fact_formula(inst_);
        add_hard(out.formula, q.underlying, /*relaxed=*/false);
        out.offset = encode_distinct(out.formula, answers);
        return out;
    }

    // ------------------------------------------------------------------
    // MIN / MAX
    // ------------------------------------------------------------------

    // Internally everything is a MIN over `val` (MAX negates values, then the
    // interval flips back).  Per distinct witness set only the smallest value
    // matters; sets containing a violation can never survive into a repair
    // and are dropped (required for the polynomial bound and the terminal
    // scan, which force sets to be present).
    EngineResult scalar_minmax(const AggQuery& q) const {
        EngineResult r;
        r.range.type = q.result_type();
        const int scale = r.range.type.scale;
        const bool neg = q.op == AggOp::Max;
        enginedetail::Stopwatch sw;

        std::vector<Witness> witnesses = witness_bag(q, inst_, &elide_);
        std::optional<std::int64_t> sure;  // consistent-part value present in every repair
        std::map<std::vector<FactId>, std::int64_t> sets;
        for (const auto& w : witnesses) {
            std::int64_t v = w.value.num_at_scale(scale);
            if (neg) v = -v;
            if (w.facts.empty()) {
                if (!sure || v < *sure) sure = v;
            } else {
                auto [it, fresh] = sets.emplace(w.facts, v);
                if (!fresh && v < it->second) it->second = v;
            }
        }
        for (auto it = sets.begin(); it != sets.end();)
            it = set_consistent(it->first) ? std::next(it) : sets.erase(it);

        // Polynomial lower bound: the smallest value over witnesses that fit
        // inside some repair (every consistent set extends to one).
        std::optional<std::int64_t> lo = sure;
        for (const auto& [s, v] : sets)
            if (!lo || v < *lo) lo = v;

        // Distinct values ascending; under a sure value only smaller ones can
        // matter for the upper bound.
        std::map<std::int64_t, std::vector<const std::vector<FactId>*>> batches;
        for (const auto& [s, v] : sets)
            if (!sure || v < *sure) batches[v].push_back(&s);

        std::optional<std::int64_t> hi;
        bool exhausted = false;  // all batched exclusions simultaneously satisfiable
        if (batches.empty()) {
            exhausted = true;
        } else {
            WcnfFormula hardf = make_fact_formula(inst_);
            add_hard(hardf, q.underlying, /*relaxed=*/true);
            r.stats.vars = hardf.nvars;
            r.stats.clauses = (std::int64_t)hardf.hard.size();
            r.stats.encode_ms += sw.lap_ms();
            if (cfg_.binary_search)
                hi = scan_binary(hardf, batches, r.stats, exhausted);
            else
                hi = scan_linear(hardf, batches, r.stats, exhausted);
            r.stats.solve_ms += sw.lap_ms();
        }
        if (exhausted) {
            if (sure) {
                hi = sure;  // repairs avoiding every batched witness still hold it
            } else {
                // Some repair has no witness at all.
                r.range.empty_possible = true;
                sw.lap_ms();
                hi = terminal_lub(q, batches, r.stats);
                r.stats.solve_ms += sw.lap_ms();
            }
        }

        if (neg) {
            if (hi) r.range.glb = -*hi;
            if (lo) r.range.lub = -*lo;
        } else {
            r.range.glb = lo;
            r.range.lub = hi;
        }
        if (!lo) r.range.empty_possible = true;  // no repair holds any value
        return r;
    }

    using Batches = std::map<std::int64_t, std::vector<const std::vector<FactId>*>>;

    // Ascending scan: after excluding every witness of value <= v, a repair
    // without smaller witnesses exists iff SAT; the first UNSAT value is the
    // least upper bound.
    std::optional<std::int64_t> scan_linear(const WcnfFormula& hardf, const Batches& batches,
                                            SolveStats& st, bool& exhausted) const {
        SatSolver s;
        s.ensure_vars(hardf.nvars);
        for (const auto& c : hardf.hard) s.add_clause(c);
        for (const auto& [v, sets] : batches) {
            for (const auto* set : sets) s.add_clause(exclusion_clause(*set));
            ++st.sat_calls;
            if (!s.solve()) {
                exhausted = false;
                return v;
            }
        }
        exhausted = true;
        return std::nullopt;
    }

    // Binary search over the same monotone predicate (UNSAT once the prefix
    // grows long enough stays UNSAT).
    std::optional<std::int64_t> scan_binary(const WcnfFormula& hardf, const Batches& batches,
                                            SolveStats& st, bool& exhausted) const {
        std::vector<const Batches::value_type*> order;
        order.reserve(batches.size());
        for (const auto& b : batches) order.push_back(&b);
        auto unsat_upto = [&](std::size_t j) {
            SatSolver s;
            s.ensure_vars(hardf.nvars);
            for (const auto& c : hardf.hard) s.add_clause(c);
            for (std::size_t i = 0; i <= j; ++i)
                for (const auto* set : order[i]->second) s.add_clause(exclusion_clause(*set));
            ++st.sat_calls;
            return !s.solve();
        };
        if (!unsat_upto(order.size() - 1)) {
            exhausted = true;
            return std::nullopt;
        }
        exhausted = false;
        std::size_t lo = 0, hi = order.size() - 1;
        while (lo < hi) {  // invariant: unsat_upto(hi) holds
            std::size_t mid = lo + (hi - lo) / 2;
            if (unsat_upto(mid))
                hi = mid;
            else
                lo = mid + 1;
        }
        return order[hi]->first;
    }

    // All witnesses can be avoided at once, so the scan never turned UNSAT:
    // the largest value v for which some repair holds a value-v witness and
    // no smaller one is the upper bound over non-empty repairs (none SAT
    // means every repair is empty-valued).
    std::optional<std::int64_t> terminal_lub(const AggQuery& q, const Batches& batches,
                                             SolveStats& st) const {
        std::vector<const Batches::value_type*> order;
        order.reserve(batches.size());
        for (const auto& b : batches) order.push_back(&b);
        for (std::size_t j = order.size(); j-- > 0;) {
            WcnfFormula f = make_fact_formula(inst_);
            add_hard(f, q.underlying, /*relaxed=*/true);
            for (std::size_t i = 0; i < j; ++i)
                for (const auto* set : order[i]->second)
                    f.add_hard(exclusion_clause(*set));
            std::vector<Lit> any;
            for (const auto* set : order[j]->second) {
                int d = f.alloc_var();  // d -> the whole witness is present
                for (FactId id : *set) f.add_hard({-d, (Lit)id});
                any.push_back(d);
            }
            f.add_hard(std::move(any));
            SatSolver s;
            s.ensure_vars(f.nvars);
            for (const auto& c : f.hard) s.add_clause(c);
            ++st.sat_calls;
            if (s.solve()) return order[j]->first;
        }
        return std::nullopt;
    }

    bool set_consistent(const std::vector<FactId>& facts) const {
        for (const auto& v : minimal_)
            if (std::includes(facts.begin(), facts.end(), v.begin(), v.end())) return false;
        return true;
    }

    void order_groups(const AggQuery& q, GroupedResult& out) const {
        std::vector<std::size_t> idx = group_order(q, cfg_.top_k_order, out.groups);
        std::vector<GroupRange> g;
        std::vector<SolveStats> s;
        g.reserve(idx.size());
        s.reserve(idx.size());
        for (std::size_t i : idx) {
            g.push_back(std::move(out.groups[i]));
            s.push_back(out.per_group[i]);
        }
        out.groups = std::move(g);
        out.per_group = std::move(s);
    }

    const Instance& inst_;
    EngineConfig cfg_;
    std::vector<std::vector<FactId>> minimal_;
    std::vector<bool> violating_;
    FactPredicate elide_;
};

}  // namespace cqa
