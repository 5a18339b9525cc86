#pragma once

// Internal exact weighted partial MaxSAT.
//
// Pipeline: propagate hard units to fixpoint, simplify both clause lists
// under the fixed assignment, split the residual formula into connected
// components (variables linked by co-occurrence), and run an exact
// branch-and-bound per component.  The bound is the component's soft weight
// minus the weight already dead on the current branch; hard-clause unit
// propagation inside the search keeps the tree small for the group-shaped
// formulas the encoders produce.
//
// Everything is deterministic: ascending variable order, true branch first,
// strict improvements only.

#include <algorithm>
#include <deque>
#include <functional>
#include <map>

#include "wcnf.hpp"

namespace cqa {

struct MaxSatResult {
    bool satisfiable = false;  // of the hard part
    std::int64_t best = 0;     // maximum satisfiable soft weight
    Model model;
    std::int64_t nodes = 0;
};

namespace maxsatdetail {

struct BnbClause {
    std::vector<Lit> lits;
    std::int64_t weight = 0;  // 0 = hard
    int sat_count = 0;
    int unassigned = 0;
};

class ComponentSolver {
public:
    ComponentSolver(std::vector<BnbClause> clauses, std::vector<int> vars,
                    std::int64_t& node_budget)
        : clauses_(std::move(clauses)), vars_(std::move(vars)), budget_(node_budget) {
        for (std::size_t v = 0; v < vars_.size(); ++v) local_of_[vars_[v]] = (int)v;
        occurrences_.resize(vars_.size());
        for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
            clauses_[ci].unassigned = (int)clauses_[ci].lits.size();
            for (Lit l : clauses_[ci].lits)
                occurrences_[local_of_.at(lit_var(l))].push_back({(int)ci, l > 0});
            if (clauses_[ci].weight > 0) total_soft_ = checked_add(total_soft_, clauses_[ci].weight);
        }
        value_.assign(vars_.size(), 0);
        best_model_.assign(vars_.size(), false);
    }

    // Returns false if the hard clauses are unsatisfiable.
    bool run() {
        search(0);
        return found_;
    }

    std::int64_t best() const { return best_; }
    std::int64_t nodes() const { return nodes_; }
    const std::vector<int>& vars() const { return vars_; }
    const std::vector<bool>& best_model() const { return best_model_; }

private:
    struct Occ {
        int clause;
        bool positive;
    };

    // Assigns local var v; returns false on an immediate hard conflict.
    // Forced literals found on the way are pushed onto the trail too.
    bool assign(int v, bool val) {
        std::deque<std::pair<int, bool>> queue{{v, val}};
        while (!queue.empty()) {
            auto [var, b] = queue.front();
            queue.pop_front();
            if (value_[var] != 0) {
                if ((value_[var] == 1) != b) return false;
                continue;
            }
            value_[var] = b ? 1 : -1;
            trail_.push_back(var);
            for (const Occ& o : occurrences_[var]) {
                BnbClause& c = clauses_[o.clause];
                --c.unassigned;
                if (o.positive == b) {
                    ++c.sat_count;
                    continue;
                }
                if (c.sat_count > 0) continue;
                if (c.unassigned == 0) {
                    if (c.weight == 0) return false;  // hard conflict
                    dead_ = checked_add(dead_, c.weight);
                    dead_trail_.push_back(o.clause);
                    continue;
                }
                if (c.weight == 0 && c.unassigned == 1) {
                    for (Lit l : c.lits) {
                        int lv = local_of_.at(lit_var(l));
                        if (value_[lv] == 0) {
                            queue.push_back({lv, l > 0});
                            break;
                        }
                    }
                }
            }
        }
        return true;
    }

    void undo_to(std::size_t trail_pos, std::size_t dead_pos) {
        while (dead_trail_.size() > dead_pos) {
            dead_ -= clauses_[dead_trail_.back()].weight;
            dead_trail_.pop_back();
        }
        while (trail_.size() > trail_pos) {
            int var = trail_.back();
            trail_.pop_back();
            bool b = value_[var] == 1;
            value_[var] = 0;
            for (const Occ& o : occurrences_[var]) {
                BnbClause& c = clauses_[o.clause];
                ++c.unassigned;
                if (o.positive == b) --c.sat_count;
            }
        }
    }

    void search(int from) {
        if (--budget_ < 0) throw SolverError("internal MaxSAT search budget exhausted");
        ++nodes_;
        if (found_ && total_soft_ - dead_ <= best_) return;  // bound
        int v = -1;
        for (int i = from; i < (int)vars_.size(); ++i)
            if (value_[i] == 0) {
                v = i;
                break;
            }
        if (v < 0) {  // leaf: hard all satisfied (conflicts pruned on the way)
            std::int64_t got = total_soft_ - dead_;
            if (!found_ || got > best_) {
                found_ = true;
                best_ = got;
                for (std::size_t i = 0; i < vars_.size(); ++i) best_model_[i] = value_[i] == 1;
            }
            return;
        }
        for (bool b : {true, false}) {
            std::size_t tp = trail_.size(), dp = dead_trail_.size();
            if (assign(v, b)) search(v + 1);
            undo_to(tp, dp);
        }
    }

    std::vector<BnbClause> clauses_;
    std::vector<int> vars_;  // global var per local index, ascending
    std::map<int, int> local_of_;
    std::vector<std::vector<Occ>> occurrences_;
    std::vector<std::int8_t> value_;
    std::vector<int> trail_;
    std::vector<int> dead_trail_;
    std::int64_t total_soft_ = 0, dead_ = 0, best_ = 0, nodes_ = 0;
    std::int64_t& budget_;
    std::vector<bool> best_model_;
    bool found_ = false;
};

}  // namespace maxsatdetail

inline MaxSatResult solve_wpmaxsat_internal(const WcnfFormula& f,
                                            std::int64_t node_budget = (std::int64_t)1 << 27) {
    MaxSatResult res;
    std::vector<std::int8_t> value(f.nvars + 1, 0);

    // Hard unit propagation to fixpoint (quadratic worst case, linear in
    // practice: each pass fixes the units the previous pass created).
    {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& c : f.hard) {
                Lit unit = 0;
                bool satisfied = false;
                int unassigned = 0;
                for (Lit l : c) {
                    std::int8_t v = value[lit_var(l)];
                    if (v == 0) {
                        ++unassigned;
                        unit = l;
                    } else if ((v == 1) == (l > 0)) {
                        satisfied = true;
                        break;
                    }
                }
                if (satisfied) continue;
                if (unassigned == 0) return res;  // hard conflict at level 0
                if (unassigned == 1) {
                    value[lit_var(unit)] = unit > 0 ? 1 : -1;
                    changed = true;
                }
            }
        }
    }

    // Simplify both lists under the fixed assignment.
    std::int64_t base = 0;
    std::vector<maxsatdetail::BnbClause> residual;
    auto reduce = [&](const std::vector<Lit>& lits, std::int64_t weight) {
        maxsatdetail::BnbClause c;
        c.weight = weight;
        for (Lit l : lits) {
            std::int8_t v = value[lit_var(l)];
            if (v == 0) c.lits.push_back(l);
            else if ((v == 1) == (l > 0)) return std::pair<int, maxsatdetail::BnbClause>{1, {}};
        }
        if (c.lits.empty()) return std::pair<int, maxsatdetail::BnbClause>{-1, {}};  // falsified
        return std::pair<int, maxsatdetail::BnbClause>{0, std::move(c)};
    };
    for (const auto& c : f.hard) {
        auto [state, cl] = reduce(c, 0);
        if (state == -1) return res;  // cannot happen after fixpoint, defensive
        if (state == 0) residual.push_back(std::move(cl));
    }
    for (const auto& s : f.soft) {
        if (s.lits.empty()) continue;  // never satisfiable
        auto [state, cl] = reduce(s.lits, s.weight);
        if (state == 1) base = checked_add(base, s.weight);
        else if (state == 0) residual.push_back(std::move(cl));
    }

    // Connected components over co-occurring variables.
    std::map<int, int> parent;
    std::function<int(int)> find = [&](int x) {
        auto it = parent.find(x);
        if (it == parent.end() || it->second == x) return x;
        return it->second = find(it->second);
    };
    for (const auto& c : residual) {
        int first = lit_var(c.lits[0]);
        parent.emplace(first, first);
        for (std::size_t i = 1; i < c.lits.size(); ++i) {
            int v = lit_var(c.lits[i]);
            parent.emplace(v, v);
            parent[find(v)] = find(first);
        }
    }
    std::map<int, std::vector<int>> comp_clauses;  // root -> residual indices
    for (std::size_t ci = 0; ci < residual.size(); ++ci)
        comp_clauses[find(lit_var(residual[ci].lits[0]))].push_back((int)ci);
    std::map<int, std::vector<int>> comp_vars;  // root -> global vars
    for (const auto& [v, _] : parent) comp_vars[find(v)].push_back(v);

    Model model(f.nvars + 1, false);
    for (int v = 1; v <= f.nvars; ++v) model[v] = value[v] == 1;

    std::int64_t best = base;
    std::int64_t budget = node_budget;
    for (auto& [root, clause_idx] : comp_clauses) {
        std::vector<maxsatdetail::BnbClause> cls;
        cls.reserve(clause_idx.size());
        for (int ci : clause_idx) cls.push_back(residual[ci]);
        std::vector<int>& vars = comp_vars[root];
        std::sort(vars.begin(), vars.end());
        maxsatdetail::ComponentSolver solver(std::move(cls), vars, budget);
        if (!solver.run()) return res;  // hard part unsatisfiable
        best = checked_add(best, solver.best());
        res.nodes += solver.nodes();
        for (std::size_t i = 0; i < solver.vars().size(); ++i)
            model[solver.vars()[i]] = solver.best_model()[i];
    }

    res.satisfiable = true;
    res.best = best;
    res.model = std::move(model);
    return res;
}

}  // namespace cqa
