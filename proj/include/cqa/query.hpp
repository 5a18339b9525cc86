#pragma once

// Query model: unions of conjunctive queries with filters, and aggregation
// queries on top of them.
//
// Variables are numbered per disjunct (dense, first-use order over the
// flattened FROM columns), because each OR block may merge a different set
// of columns.  Whatever is shared across disjuncts therefore lives either
// in flattened-column space (FROM items) or as parallel per-disjunct
// vectors (aggregation expressions, grouping terms).

#include <optional>
#include <string>
#include <vector>

#include "instance.hpp"

namespace cqa {

// ===========================================================================
// Terms, atoms, filters
// ===========================================================================

struct QTerm {
    int var = -1;  // >= 0: variable id; < 0: constant
    Value constant;

    bool is_var() const { return var >= 0; }

    static QTerm variable(int v) {
        QTerm t;
        t.var = v;
        return t;
    }
    static QTerm lit(Value v) {
        QTerm t;
        t.constant = std::move(v);
        return t;
    }

    bool operator==(const QTerm&) const = default;
};

struct QAtom {
    int relation = -1;
    std::vector<QTerm> args;  // one per attribute

    bool operator==(const QAtom&) const = default;
};

enum class FilterKind { Cmp, In, Like };

struct QFilter {
    FilterKind kind = FilterKind::Cmp;
    CmpOp op = CmpOp::Eq;        // Cmp only
    QTerm lhs, rhs;              // Cmp: both; In/Like: lhs only
    std::vector<Value> set;      // In (deduplicated, sorted)
    std::string pattern;         // Like (% = any run, _ = any one char)

    bool operator==(const QFilter&) const = default;
};

// Simple SQL LIKE matcher.
inline bool like_match(const std::string& s, const std::string& pat) {
    std::size_t si = 0, pi = 0, star_s = std::string::npos, star_p = 0;
    while (si < s.size()) {
        if (pi < pat.size() && (pat[pi] == '_' || pat[pi] == s[si])) {
            ++si, ++pi;
        } else if (pi < pat.size() && pat[pi] == '%') {
            star_p = ++pi;
            star_s = si;
        } else if (star_s != std::string::npos) {
            pi = star_p;
            si = ++star_s;
        } else {
            return false;
        }
    }
    while (pi < pat.size() && pat[pi] == '%') ++pi;
    return pi == pat.size();
}

// ===========================================================================
// Conjunctive queries
// ===========================================================================

struct ConjunctiveQuery {
    int nvars = 0;
    std::vector<QAtom> atoms;
    std::vector<QFilter> filters;
    std::vector<QTerm> head;      // answer terms, in output order
    std::vector<QTerm> col_term;  // flattened FROM column -> term (SQL-derived; may be empty)
    bool never_matches = false;   // contradictory constant equalities

    bool operator==(const ConjunctiveQuery&) const = default;
};

struct UnionQuery {
    std::vector<ConjunctiveQuery> disjuncts;

    bool operator==(const UnionQuery&) const = default;

    // Invariant: every disjunct exposes the same head arity.
    void validate() const {
        if (disjuncts.empty()) throw ValidationError("query without disjuncts");
        for (const auto& d : disjuncts)
            if (d.head.size() != disjuncts[0].head.size())
                throw ValidationError("disjuncts expose different head arities");
    }
};

// ===========================================================================
// Aggregation expressions
// ===========================================================================

struct ExprNode {
    enum class Kind { Col, Lit, Add, Sub, Mul, Neg };
    Kind kind = Kind::Lit;
    int var = -1;                       // Col
    Value lit;                          // Lit
    int a = -1, b = -1;                 // children
    AttrType col_type = AttrType::Integer;  // Col
    int scale = 0;                      // static result scale of this node

    bool operator==(const ExprNode&) const = default;
};

struct AggExpr {
    std::vector<ExprNode> nodes;
    int root = -1;

    bool empty() const { return root < 0; }
    int scale() const { return empty() ? 0 : nodes[root].scale; }

    // Distinct variables referenced, ascending.
    std::vector<int> vars() const {
        std::vector<int> out;
        for (const auto& n : nodes)
            if (n.kind == ExprNode::Kind::Col && n.var >= 0) out.push_back(n.var);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    bool operator==(const AggExpr&) const = default;
};

// Evaluates at the root's static scale.  `binding[v]` must be numeric for
// every referenced variable.
inline std::int64_t eval_expr(const AggExpr& e, const std::vector<Value>& binding) {
    struct Rec {
        const AggExpr& e;
        const std::vector<Value>& b;
        std::int64_t at(int idx, int want_scale) const {
            const ExprNode& n = e.nodes[idx];
            std::int64_t v;
            switch (n.kind) {
                case ExprNode::Kind::Col:
                    v = b[n.var].num_at_scale(n.scale);
                    break;
                case ExprNode::Kind::Lit:
                    v = n.lit.num_at_scale(n.scale);
                    break;
                case ExprNode::Kind::Add:
                    v = checked_add(at(n.a, n.scale), at(n.b, n.scale), "aggregation expression");
                    break;
                case ExprNode::Kind::Sub:
                    v = checked_add(at(n.a, n.scale), -at(n.b, n.scale), "aggregation expression");
                    break;
                case ExprNode::Kind::Mul:
                    v = checked_mul(at(n.a, e.nodes[n.a].scale) , at(n.b, e.nodes[n.b].scale), "aggregation expression");
                    break;
                case ExprNode::Kind::Neg:
                    v = -at(n.a, n.scale);
                    break;
                default:
                    throw EncodingError("bad expression node");
            }
            if (want_scale == n.scale) return v;
            return checked_mul(v, pow10_or_throw(want_scale - n.scale, "rescale"), "rescale");
        }
    };
    return Rec{e, binding}.at(e.root, e.nodes[e.root].scale);
}

// ===========================================================================
// Aggregation queries
// ===========================================================================

enum class AggOp { CountStar, Count, Sum, Min, Max };

inline const char* agg_op_name(AggOp op) {
    switch (op) {
        case AggOp::CountStar: return "COUNT(*)";
        case AggOp::Count: return "COUNT";
        case AggOp::Sum: return "SUM";
        case AggOp::Min: return "MIN";
        case AggOp::Max: return "MAX";
    }
    return "?";
}

// How to render interval endpoints of the answer.
struct ResultType {
    int scale = 0;
    bool is_date = false;

    bool operator==(const ResultType&) const = default;
};

struct AggQuery {
    AggOp op = AggOp::CountStar;
    bool distinct = false;            // COUNT/SUM only; normalized false for MIN/MAX
    UnionQuery underlying;            // head per disjunct = grouping terms (the q(Z) view)
    std::vector<AggExpr> exprs;       // per disjunct; empty vector for COUNT(*)
    std::vector<std::vector<QTerm>> group_terms;  // per disjunct, per grouping column
    std::vector<int> order_cols;      // indices into the grouping list
    bool order_desc = false;
    std::optional<std::int64_t> top_k;

    // Display metadata (filled by the SQL parser; optional for hand-built ASTs)
    std::vector<std::string> group_names;
    std::vector<AttrType> group_types;      // rendering hint per grouping column
    std::vector<std::string> var_names_d0;  // disjunct-0 variable -> column display name

    bool grouped() const { return !group_terms.empty() && !group_terms[0].empty(); }

    ResultType result_type() const {
        ResultType rt;
        if (op == AggOp::CountStar || op == AggOp::Count) return rt;
        if (!exprs.empty() && !exprs[0].empty()) {
            rt.scale = exprs[0].scale();
            const ExprNode& root = exprs[0].nodes[exprs[0].root];
            rt.is_date = (op == AggOp::Min || op == AggOp::Max) &&
                         root.kind == ExprNode::Kind::Col && root.col_type == AttrType::Date;
        }
        return rt;
    }

    void validate() const {
        underlying.validate();
        if (op == AggOp::CountStar) {
            if (distinct) throw ValidationError("COUNT(*) cannot be DISTINCT");
            if (!exprs.empty() && !exprs[0].empty())
                throw ValidationError("COUNT(*) carries no expression");
        } else {
            if (exprs.size() != underlying.disjuncts.size())
                throw ValidationError("one aggregation expression per disjunct required");
            for (const auto& e : exprs)
                if (e.empty()) throw ValidationError("missing aggregation expression");
        }
        if ((op == AggOp::Min || op == AggOp::Max) && distinct)
            throw ValidationError("DISTINCT is not meaningful for MIN/MAX");
        if (group_terms.size() != underlying.disjuncts.size() && !group_terms.empty())
            throw ValidationError("grouping terms must cover every disjunct");
        for (std::size_t d = 0; d < group_terms.size(); ++d)
            if (group_terms[d].size() != group_terms[0].size())
                throw ValidationError("disjuncts disagree on grouping arity");
        for (int oc : order_cols)
            if (oc < 0 || group_terms.empty() || oc >= (int)group_terms[0].size())
                throw ValidationError("ORDER BY column is not a grouping column");
    }

    bool operator==(const AggQuery&) const = default;
};

// The witness query q*: grouping terms stay free, and for value-carrying
// operators the aggregation expression's variables stay free as well.
inline UnionQuery derive_witness_query(const AggQuery& q) {
    UnionQuery out;
    for (std::size_t d = 0; d < q.underlying.disjuncts.size(); ++d) {
        ConjunctiveQuery cq = q.underlying.disjuncts[d];
        cq.head.clear();
        if (d < q.group_terms.size())
            for (const QTerm& t : q.group_terms[d]) cq.head.push_back(t);
        if (q.op != AggOp::CountStar)
            for (int v : q.exprs[d].vars()) cq.head.push_back(QTerm::variable(v));
        out.disjuncts.push_back(std::move(cq));
    }
    return out;
}

// Substitutes variable `var` with a constant everywhere in the disjunct.
inline void substitute_var(ConjunctiveQuery& cq, int var, const Value& val) {
    auto fix = [&](QTerm& t) {
        if (t.is_var() && t.var == var) t = QTerm::lit(val);
    };
    for (auto& atom : cq.atoms)
        for (auto& arg : atom.args) fix(arg);
    for (auto& f : cq.filters) {
        fix(f.lhs);
        fix(f.rhs);
    }
    for (auto& t : cq.head) fix(t);
    for (auto& t : cq.col_term) fix(t);
}

inline void substitute_var(AggExpr& e, int var, const Value& val) {
    for (auto& n : e.nodes)
        if (n.kind == ExprNode::Kind::Col && n.var == var) {
            n.kind = ExprNode::Kind::Lit;
            n.lit = val;
            n.var = -1;
        }
}

// Specializes a grouped query to one group key: grouping variables become
// constants and the result is a scalar query over the same FROM shape.
inline AggQuery specialize_to_group(const AggQuery& q, const std::vector<Value>& key) {
    AggQuery out = q;
    for (std::size_t d = 0; d < out.underlying.disjuncts.size(); ++d) {
        ConjunctiveQuery& cq = out.underlying.disjuncts[d];
        for (std::size_t k = 0; k < out.group_terms[d].size(); ++k) {
            const QTerm& t = out.group_terms[d][k];
            if (t.is_var()) {
                substitute_var(cq, t.var, key[k]);
                if (!out.exprs.empty()) substitute_var(out.exprs[d], t.var, key[k]);
            } else if (t.constant != key[k]) {
                cq.never_matches = true;
            }
        }
        cq.head.clear();
    }
    out.group_terms.assign(out.underlying.disjuncts.size(), {});
    out.group_names.clear();
    out.group_types.clear();
    out.order_cols.clear();
    out.top_k.reset();
    return out;
}

}  // namespace cqa
