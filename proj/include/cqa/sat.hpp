#pragma once

// A small deterministic SAT solver: iterative DPLL with two watched literals
// and chronological backtracking.  Clauses may be added between solve()
// calls; each call restarts the search from scratch, so monotone growth of
// the clause set (the satisfiability scans) needs no incremental machinery.
//
// Branching is lowest-index-first with the positive phase tried first, which
// makes both the verdict and the reported model deterministic functions of
// the clause set.

#include <cstdint>

#include "wcnf.hpp"

namespace cqa {

class SatSolver {
public:
    explicit SatSolver(int nvars = 0) { ensure_vars(nvars); }

    void ensure_vars(int n) {
        if (n > nvars_) nvars_ = n;
        if ((int)value_.size() < nvars_ + 1) value_.resize(nvars_ + 1, 0);
        if (watches_.size() < 2 * (std::size_t)(nvars_ + 1)) watches_.resize(2 * (nvars_ + 1));
    }

    void add_clause(std::vector<Lit> c) {
        for (Lit l : c) {
            if (lit_var(l) <= 0) throw SolverError("literal with variable 0");
            ensure_vars(lit_var(l));
        }
        std::sort(c.begin(), c.end(), [](Lit a, Lit b) {
            return lit_var(a) != lit_var(b) ? lit_var(a) < lit_var(b) : a < b;
        });
        c.erase(std::unique(c.begin(), c.end()), c.end());
        for (std::size_t i = 0; i + 1 < c.size(); ++i)
            if (c[i] == -c[i + 1]) return;  // tautology
        if (c.empty()) {
            unsat_ = true;
            return;
        }
        if (c.size() == 1) {
            units_.push_back(c[0]);
            return;
        }
        clauses_.push_back(c);
        watches_[widx(c[0])].push_back((int)clauses_.size() - 1);
        watches_[widx(c[1])].push_back((int)clauses_.size() - 1);
    }

    void add_formula_hard(const WcnfFormula& f) {
        ensure_vars(f.nvars);
        for (const auto& c : f.hard) add_clause(c);
    }

    bool solve() {
        ++solve_calls_;
        if (unsat_) return false;
        std::fill(value_.begin(), value_.end(), (std::int8_t)0);
        trail_.clear();
        qhead_ = 0;
        lims_.clear();
        flipped_.clear();
        for (Lit u : units_)
            if (!enqueue(u)) return false;
        if (!propagate()) return false;

        int cursor = 1;
        for (;;) {
            while (cursor <= nvars_ && value_[cursor] != 0) ++cursor;
            if (cursor > nvars_) return true;
            ++decisions_;
            lims_.push_back(trail_.size());
            flipped_.push_back(false);
            enqueue_unchecked(cursor);
            while (!propagate()) {
                ++conflicts_;
                bool resolved = false;
                while (!resolved) {
                    if (lims_.empty()) return false;
                    if (!flipped_.back()) {
                        Lit dec = trail_[lims_.back()];
                        backtrack_to(lims_.back());
                        flipped_.back() = true;
                        enqueue_unchecked(-dec);
                        resolved = true;
                    } else {
                        backtrack_to(lims_.back());
                        lims_.pop_back();
                        flipped_.pop_back();
                    }
                }
                cursor = 1;
            }
        }
    }

    // Variable values after a successful solve; vars in no clause read false.
    Model model() const {
        Model m(nvars_ + 1, false);
        for (int v = 1; v <= nvars_; ++v) m[v] = value_[v] == 1;
        return m;
    }

    bool value_of(int var) const { return value_[var] == 1; }

    std::int64_t decisions() const { return decisions_; }
    std::int64_t conflicts() const { return conflicts_; }
    std::int64_t solve_calls() const { return solve_calls_; }

private:
    static std::size_t widx(Lit l) { return 2 * (std::size_t)lit_var(l) + (l < 0 ? 1 : 0); }

    int val(Lit l) const {
        std::int8_t v = value_[lit_var(l)];
        if (v == 0) return 0;
        return (v == 1) == (l > 0) ? 1 : -1;
    }

    bool enqueue(Lit l) {
        int v = val(l);
        if (v == 1) return true;
        if (v == -1) return false;
        enqueue_unchecked(l);
        return true;
    }

    void enqueue_unchecked(Lit l) {
        value_[lit_var(l)] = l > 0 ? 1 : -1;
        trail_.push_back(l);
    }

    void backtrack_to(std::size_t pos) {
        for (std::size_t t = trail_.size(); t > pos; --t) value_[lit_var(trail_[t - 1])] = 0;
        trail_.resize(pos);
        qhead_ = pos;
    }

    bool propagate() {
        while (qhead_ < trail_.size()) {
            Lit p = trail_[qhead_++];
            std::vector<int>& ws = watches_[widx(-p)];
            std::size_t i = 0, j = 0;
            bool conflict = false;
            for (; i < ws.size(); ++i) {
                int ci = ws[i];
                std::vector<Lit>& lits = clauses_[ci];
                if (lits[0] == -p) std::swap(lits[0], lits[1]);
                if (val(lits[0]) == 1) {  // satisfied by the other watch
                    ws[j++] = ci;
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < lits.size(); ++k) {
                    if (val(lits[k]) != -1) {
                        std::swap(lits[1], lits[k]);
                        watches_[widx(lits[1])].push_back(ci);
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                ws[j++] = ci;  // stays watched here
                if (val(lits[0]) == -1) {
                    for (++i; i < ws.size(); ++i) ws[j++] = ws[i];
                    conflict = true;
                    break;
                }
                enqueue_unchecked(lits[0]);
            }
            ws.resize(j);
            if (conflict) return false;
        }
        return true;
    }

    int nvars_ = 0;
    bool unsat_ = false;
    std::vector<std::vector<Lit>> clauses_;
    std::vector<Lit> units_;
    std::vector<std::vector<int>> watches_;  // literal -> clause indices
    std::vector<std::int8_t> value_;         // var -> 0 unknown, 1 true, -1 false
    std::vector<Lit> trail_;
    std::size_t qhead_ = 0;
    std::vector<std::size_t> lims_;  // decision level -> trail position
    std::vector<bool> flipped_;      // decision level -> second phase tried
    std::int64_t decisions_ = 0, conflicts_ = 0, solve_calls_ = 0;
};

}  // namespace cqa
