#pragma once

// SQL-subset front end (grammar in docs/query_language.md):
//
//   SELECT [TOP k] item, ... FROM rel [alias], ...
//     [WHERE block [OR block]...] [GROUP BY col, ...] [ORDER BY col, ... [ASC|DESC]]
//
// At most one aggregate (COUNT(*), COUNT/SUM [DISTINCT] expr, MIN/MAX expr);
// without one the statement is a plain union-of-conjunctive-queries whose
// answers are set-semantics tuples.  OR is allowed between full conjunctive
// blocks at the top of WHERE; a parenthesized OR inside a block is accepted
// only as an OR of equalities on one column (it desugars to IN).  IN, LIKE,
// and BETWEEN desugar to filters; everything else recognized but out of
// scope (subqueries, explicit JOIN, HAVING, NOT, functions) raises
// UnsupportedError.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>

#include "lex.hpp"
#include "query.hpp"
#include "value_text.hpp"

namespace cqa {

struct Statement {
    bool is_aggregate = false;
    AggQuery agg;                           // when is_aggregate
    UnionQuery ucq;                         // when !is_aggregate
    std::vector<std::string> output_names;  // select-list display names
    std::vector<AttrType> output_types;     // per select-list column (plain SELECT only)
    std::string source;

    // Display metadata for the canonical printer.
    std::vector<int> from_relations;
    std::vector<std::string> from_displays;
    AggExpr expr_cols;  // aggregate expression over flattened FROM columns

    const UnionQuery& union_query() const { return is_aggregate ? agg.underlying : ucq; }
};

namespace sqldetail {

struct FromItem {
    int relation = -1;
    std::string display;  // alias if given, else schema casing of the name
    bool aliased = false;
};

// One side of a surface condition: a flattened FROM column or a literal.
struct SurfTerm {
    int col = -1;  // >= 0: column
    bool is_string = false;
    std::string text;  // literal body (number text or string body)
};

struct SurfCond {
    enum class Kind { Cmp, In, Like, Between };
    Kind kind = Kind::Cmp;
    CmpOp op = CmpOp::Eq;
    SurfTerm lhs, rhs;
    std::vector<SurfTerm> list;  // In
    std::string pattern;         // Like
    SurfTerm lo, hi;             // Between
};

class Parser {
public:
    Parser(const std::string& text, const Schema& schema)
        : lex_(text, "query"), schema_(schema), source_(text) {}

    Statement parse() {
        lex_.expect_keyword("select");
        Statement stmt;
        stmt.source = source_;

        std::optional<std::int64_t> top_k;
        if (lex_.accept_keyword("top")) {
            if (lex_.peek().kind != TokKind::Number) lex_.fail("expected TOP count");
            top_k = std::stoll(lex_.next().text);
            if (*top_k < 1) lex_.fail("TOP count must be positive");
        }
        bool select_distinct = lex_.accept_keyword("distinct");

        // --- select list (surface) ----------------------------------------
        struct SelectItem {
            bool is_agg = false;
            std::string col_qual, col_name;  // plain column
            int col = -1;
            // aggregate
            AggOp op = AggOp::CountStar;
            bool agg_distinct = false;
            bool has_expr = false;
        };
        std::vector<SelectItem> select_items;
        std::vector<Token> agg_expr_toks;  // re-parsed after FROM resolution
        int agg_index = -1;
        do {
            SelectItem item;
            const Token& t = lex_.peek();
            if (t.kind == TokKind::Ident && is_agg_name(t.text) &&
                lex_.peek(1).kind == TokKind::Punct && lex_.peek(1).text == "(") {
                item.is_agg = true;
                item.op = agg_op_of(lex_.next().text);
                lex_.expect_punct("(");
                if (item.op == AggOp::CountStar && lex_.accept_punct("*")) {
                    // COUNT(*)
                } else {
                    if (item.op == AggOp::CountStar) item.op = AggOp::Count;
                    if (lex_.accept_keyword("distinct")) item.agg_distinct = true;
                    item.has_expr = true;
                    capture_expr_tokens(agg_expr_toks);
                }
                lex_.expect_punct(")");
                if (agg_index >= 0) throw UnsupportedError("more than one aggregate in the select list");
                agg_index = (int)select_items.size();
            } else if (t.kind == TokKind::Punct && t.text == "*") {
                throw UnsupportedError("SELECT * (project named columns instead)");
            } else {
                if (t.kind == TokKind::Ident && lex_.peek(1).kind == TokKind::Punct &&
                    lex_.peek(1).text == "(")
                    throw UnsupportedError("aggregate or function '" + t.raw +
                                           "' in the select list");
                parse_colref(item.col_qual, item.col_name);
            }
            select_items.push_back(std::move(item));
        } while (lex_.accept_punct(","));

        // --- FROM ----------------------------------------------------------
        lex_.expect_keyword("from");
        do {
            std::string name = lex_.expect_ident("relation name");
            if (RelationDef::iequal(name, "join"))
                throw UnsupportedError("explicit JOIN syntax (use FROM lists with WHERE equalities)");
            int rel = schema_.relation_index(name);
            if (rel < 0) throw ParseError("unknown relation " + name);
            FromItem item;
            item.relation = rel;
            item.display = schema_.relations[rel].name;
            if (lex_.accept_keyword("as")) {
                item.display = lex_.expect_ident("alias");
                item.aliased = true;
            } else if (lex_.peek().kind == TokKind::Ident && !is_clause_keyword(lex_.peek().text)) {
                item.display = lex_.expect_ident("alias");
                item.aliased = true;
            }
            items_.push_back(std::move(item));
        } while (lex_.accept_punct(","));
        col_offset_.resize(items_.size());
        ncols_ = 0;
        for (std::size_t i = 0; i < items_.size(); ++i) {
            col_offset_[i] = ncols_;
            ncols_ += (int)schema_.relations[items_[i].relation].attrs.size();
        }

        // --- WHERE ---------------------------------------------------------
        std::vector<std::vector<SurfCond>> blocks;
        if (lex_.accept_keyword("where")) {
            blocks = parse_or_blocks();
        } else {
            blocks.push_back({});
        }

        // --- GROUP BY / ORDER BY --------------------------------------------
        std::vector<int> group_by_cols;
        bool saw_group_by = false;
        if (lex_.accept_keyword("group")) {
            lex_.expect_keyword("by");
            saw_group_by = true;
            do {
                group_by_cols.push_back(parse_resolved_colref());
            } while (lex_.accept_punct(","));
        }
        std::vector<int> order_by_cols;
        bool order_desc = false;
        if (lex_.accept_keyword("order")) {
            lex_.expect_keyword("by");
            do {
                order_by_cols.push_back(parse_resolved_colref());
            } while (lex_.accept_punct(","));
            if (lex_.accept_keyword("desc"))
                order_desc = true;
            else
                lex_.accept_keyword("asc");
        }
        if (lex_.accept_keyword("having")) throw UnsupportedError("HAVING");
        if (!lex_.at_end()) lex_.fail("unexpected trailing input");

        // --- resolve select list against FROM --------------------------------
        std::vector<int> plain_cols;
        for (auto& item : select_items) {
            if (item.is_agg) continue;
            item.col = resolve_colref(item.col_qual, item.col_name);
            plain_cols.push_back(item.col);
        }

        // Grouping columns: the non-aggregate select items, in select order.
        if (agg_index >= 0) {
            std::vector<int> sorted_a = plain_cols, sorted_b = group_by_cols;
            std::sort(sorted_a.begin(), sorted_a.end());
            std::sort(sorted_b.begin(), sorted_b.end());
            if (!plain_cols.empty() && !saw_group_by)
                throw ValidationError("non-aggregate select columns require GROUP BY");
            if (saw_group_by && sorted_a != sorted_b)
                throw ValidationError("GROUP BY must list exactly the non-aggregate select columns");
        } else {
            if (saw_group_by) {
                std::vector<int> sorted_a = plain_cols, sorted_b = group_by_cols;
                std::sort(sorted_a.begin(), sorted_a.end());
                std::sort(sorted_b.begin(), sorted_b.end());
                if (sorted_a != sorted_b)
                    throw ValidationError("GROUP BY must list exactly the select columns");
            }
            if (!order_by_cols.empty())
                throw UnsupportedError("ORDER BY without aggregation");
            if (top_k) throw UnsupportedError("TOP without aggregation");
        }
        (void)select_distinct;  // plain answers are set-semantics already

        // --- aggregate expression (column space) ----------------------------
        AggExpr expr_cols;
        AggOp op = AggOp::CountStar;
        bool agg_distinct = false;
        if (agg_index >= 0) {
            op = select_items[agg_index].op;
            agg_distinct = select_items[agg_index].agg_distinct;
            if (select_items[agg_index].has_expr) expr_cols = parse_expr_tokens(agg_expr_toks, op);
            if (op == AggOp::Min || op == AggOp::Max) agg_distinct = false;  // no-op there
        }

        // --- build disjuncts ---------------------------------------------------
        Statement out;
        out.source = source_;
        out.is_aggregate = agg_index >= 0;
        for (const auto& item : items_) {
            out.from_relations.push_back(item.relation);
            out.from_displays.push_back(item.display);
        }
        std::vector<ConjunctiveQuery> cqs;
        for (const auto& block : blocks) cqs.push_back(build_cq(block));

        if (!out.is_aggregate) {
            for (auto& cq : cqs) {
                for (int c : plain_cols) cq.head.push_back(cq.col_term[c]);
                out.ucq.disjuncts.push_back(std::move(cq));
            }
            out.ucq.validate();
            for (const auto& item : select_items) {
                out.output_names.push_back(col_display(item.col));
                out.output_types.push_back(col_attr(item.col).type);
            }
            return out;
        }

        AggQuery& q = out.agg;
        q.op = op;
        q.distinct = agg_distinct;
        q.top_k = top_k;
        q.order_desc = order_desc;
        for (auto& cq : cqs) {
            std::vector<QTerm> gt;
            for (int c : plain_cols) gt.push_back(cq.col_term[c]);
            if (op != AggOp::CountStar) q.exprs.push_back(instantiate_expr(expr_cols, cq));
            cq.head = gt;
            q.group_terms.push_back(std::move(gt));
            q.underlying.disjuncts.push_back(std::move(cq));
        }
        for (int c : plain_cols) {
            q.group_names.push_back(col_display(c));
            q.group_types.push_back(col_attr(c).type);
        }
        for (int oc : order_by_cols) {
            auto it = std::find(plain_cols.begin(), plain_cols.end(), oc);
            if (it == plain_cols.end())
                throw ValidationError("ORDER BY column must be a grouping column");
            q.order_cols.push_back((int)(it - plain_cols.begin()));
        }
        out.expr_cols = expr_cols;
        if (!q.underlying.disjuncts.empty()) {
            const auto& cq0 = q.underlying.disjuncts[0];
            q.var_names_d0.assign(cq0.nvars, "");
            for (int c = 0; c < ncols_; ++c)
                if (cq0.col_term[c].is_var() && q.var_names_d0[cq0.col_term[c].var].empty())
                    q.var_names_d0[cq0.col_term[c].var] = col_display(c);
        }
        for (const auto& item : select_items)
            out.output_names.push_back(item.is_agg ? agg_item_display(q.op, q.distinct, expr_cols)
                                                   : col_display(item.col));
        q.validate();
        return out;
    }

    // Canonical display of the aggregate item, e.g. "SUM(ACCOUNTS.BAL)".
    std::string agg_item_display(AggOp op, bool distinct, const AggExpr& expr_cols) const {
        if (op == AggOp::CountStar) return "COUNT(*)";
        std::string inner = distinct ? "DISTINCT " : "";
        return std::string(agg_op_name(op)) + "(" + inner + expr_display(expr_cols, expr_cols.root) + ")";
    }

    std::string expr_display(const AggExpr& e, int idx) const {
        const ExprNode& n = e.nodes[idx];
        switch (n.kind) {
            case ExprNode::Kind::Col: return col_display(n.var);
            case ExprNode::Kind::Lit: return n.lit.to_string();
            case ExprNode::Kind::Add: return "(" + expr_display(e, n.a) + " + " + expr_display(e, n.b) + ")";
            case ExprNode::Kind::Sub: return "(" + expr_display(e, n.a) + " - " + expr_display(e, n.b) + ")";
            case ExprNode::Kind::Mul: return "(" + expr_display(e, n.a) + " * " + expr_display(e, n.b) + ")";
            case ExprNode::Kind::Neg: return "(- " + expr_display(e, n.a) + ")";
        }
        return "?";
    }

private:
    // --- helpers ------------------------------------------------------------
    static bool is_agg_name(const std::string& s) {
        return s == "count" || s == "sum" || s == "min" || s == "max";
    }
    static AggOp agg_op_of(const std::string& s) {
        if (s == "count") return AggOp::CountStar;  // refined to Count if an expr follows
        if (s == "sum") return AggOp::Sum;
        if (s == "min") return AggOp::Min;
        return AggOp::Max;
    }
    static bool is_clause_keyword(const std::string& s) {
        return s == "where" || s == "group" || s == "order" || s == "having" ||
               s == "on" || s == "join" || s == "inner" || s == "left" || s == "right" ||
               s == "as" || s == "and" || s == "or" || s == "from";
    }

    void parse_colref(std::string& qual, std::string& name) {
        name = lex_.expect_ident("column name");
        if (lex_.accept_punct(".")) {
            qual = name;
            name = lex_.expect_ident("column name");
        }
    }

    int resolve_colref(const std::string& qual, const std::string& name) {
        int found = -1;
        for (std::size_t i = 0; i < items_.size(); ++i) {
            if (!qual.empty() && !RelationDef::iequal(items_[i].display, qual)) continue;
            int a = schema_.relations[items_[i].relation].attr_index(name);
            if (a < 0) continue;
            if (found >= 0) throw ParseError("ambiguous column " + (qual.empty() ? name : qual + "." + name));
            found = col_offset_[i] + a;
        }
        if (found < 0)
            throw ParseError("unknown column " + (qual.empty() ? name : qual + "." + name));
        return found;
    }

    int parse_resolved_colref() {
        std::string qual, name;
        parse_colref(qual, name);
        return resolve_colref(qual, name);
    }

    int col_item(int col) const {
        int item = 0;
        while (item + 1 < (int)items_.size() && col_offset_[item + 1] <= col) ++item;
        return item;
    }
    const AttributeDef& col_attr(int col) const {
        int item = col_item(col);
        return schema_.relations[items_[item].relation].attrs[col - col_offset_[item]];
    }
    std::string col_display(int col) const {
        return items_[col_item(col)].display + "." + col_attr(col).name;
    }

    // --- WHERE --------------------------------------------------------------

    std::vector<std::vector<SurfCond>> parse_or_blocks() {
        std::vector<std::vector<SurfCond>> blocks;
        blocks.push_back(parse_and_block());
        while (lex_.accept_keyword("or")) blocks.push_back(parse_and_block());
        return blocks;
    }

    // A conjunction; a parenthesized group either splices (no inner OR) or
    // must match the IN pattern (OR of equalities on one column).
    std::vector<SurfCond> parse_and_block() {
        std::vector<SurfCond> conds;
        do {
            if (lex_.accept_punct("(")) {
                auto inner = parse_or_blocks();
                lex_.expect_punct(")");
                if (inner.size() == 1)
                    for (auto& c : inner[0]) conds.push_back(std::move(c));
                else
                    conds.push_back(in_pattern_or_fail(inner));
                continue;
            }
            conds.push_back(parse_condition());
        } while (lex_.accept_keyword("and"));
        return conds;
    }

    SurfCond in_pattern_or_fail(const std::vector<std::vector<SurfCond>>& inner) {
        // (col = v1 OR col = v2 OR ...) inside a conjunction -> IN filter
        SurfCond in;
        in.kind = SurfCond::Kind::In;
        int col = -1;
        for (const auto& block : inner) {
            if (block.size() != 1 || block[0].kind != SurfCond::Kind::Cmp || block[0].op != CmpOp::Eq)
                throw UnsupportedError("OR nested inside a conjunction (only OR of equalities on one column)");
            const SurfCond& c = block[0];
            const SurfTerm *colside = nullptr, *litside = nullptr;
            if (c.lhs.col >= 0 && c.rhs.col < 0) {
                colside = &c.lhs;
                litside = &c.rhs;
            } else if (c.rhs.col >= 0 && c.lhs.col < 0) {
                colside = &c.rhs;
                litside = &c.lhs;
            } else {
                throw UnsupportedError("OR nested inside a conjunction (only OR of equalities on one column)");
            }
            if (col < 0) col = colside->col;
            if (col != colside->col)
                throw UnsupportedError("OR of equalities over different columns");
            in.list.push_back(*litside);
        }
        in.lhs.col = col;
        return in;
    }

    SurfTerm parse_term() {
        SurfTerm t;
        const Token& tok = lex_.peek();
        if (tok.kind == TokKind::Number || (tok.kind == TokKind::Punct && tok.text == "-")) {
            std::string num;
            if (lex_.accept_punct("-")) num = "-";
            if (lex_.peek().kind != TokKind::Number) lex_.fail("expected number");
            num += lex_.next().text;
            t.text = num;
            return t;
        }
        if (tok.kind == TokKind::String) {
            t.is_string = true;
            t.text = lex_.next().text;
            return t;
        }
        if (tok.kind == TokKind::Punct && tok.text == "(")
            throw UnsupportedError("subquery or expression in comparison");
        std::string qual, name;
        parse_colref(qual, name);
        if (lex_.peek().kind == TokKind::Punct && lex_.peek().text == "(")
            throw UnsupportedError("function call '" + name + "'");
        t.col = resolve_colref(qual, name);
        return t;
    }

    SurfCond parse_condition() {
        if (lex_.peek().kind == TokKind::Ident && lex_.peek().text == "not")
            throw UnsupportedError("NOT");
        if (lex_.peek().kind == TokKind::Ident && lex_.peek().text == "exists")
            throw UnsupportedError("EXISTS subquery");
        SurfCond c;
        c.lhs = parse_term();
        if (lex_.accept_keyword("between")) {
            c.kind = SurfCond::Kind::Between;
            c.lo = parse_term();
            lex_.expect_keyword("and");
            c.hi = parse_term();
            return c;
        }
        if (lex_.accept_keyword("in")) {
            c.kind = SurfCond::Kind::In;
            lex_.expect_punct("(");
            if (lex_.peek().kind == TokKind::Ident && lex_.peek().text == "select")
                throw UnsupportedError("IN subquery");
            do {
                c.list.push_back(parse_term());
            } while (lex_.accept_punct(","));
            lex_.expect_punct(")");
            return c;
        }
        if (lex_.accept_keyword("like")) {
            c.kind = SurfCond::Kind::Like;
            if (lex_.peek().kind != TokKind::String) lex_.fail("expected LIKE pattern string");
            c.pattern = lex_.next().text;
            return c;
        }
        c.kind = SurfCond::Kind::Cmp;
        if (lex_.accept_punct("=")) c.op = CmpOp::Eq;
        else if (lex_.accept_punct("!=") || lex_.accept_punct("<>")) c.op = CmpOp::Ne;
        else if (lex_.accept_punct("<=")) c.op = CmpOp::Le;
        else if (lex_.accept_punct(">=")) c.op = CmpOp::Ge;
        else if (lex_.accept_punct("<")) c.op = CmpOp::Lt;
        else if (lex_.accept_punct(">")) c.op = CmpOp::Gt;
        else lex_.fail("expected comparison operator");
        c.rhs = parse_term();
        return c;
    }

    // --- aggregate expression ------------------------------------------------

    // Captures the raw tokens of the aggregate argument (balanced parens).
    void capture_expr_tokens(std::vector<Token>& out) {
        int depth = 0;
        for (;;) {
            const Token& t = lex_.peek();
            if (t.kind == TokKind::End) lex_.fail("unterminated aggregate expression");
            if (t.kind == TokKind::Punct && t.text == "(") ++depth;
            if (t.kind == TokKind::Punct && t.text == ")") {
                if (depth == 0) return;
                --depth;
            }
            out.push_back(lex_.next());
        }
    }

    // Recursive-descent over the captured tokens; Col nodes live in column space.
    AggExpr parse_expr_tokens(const std::vector<Token>& toks, AggOp op) {
        std::size_t pos = 0;
        AggExpr e;
        std::function<int()> parse_add, parse_mul, parse_unary;
        auto peek = [&]() -> const Token& {
            static Token end;
            return pos < toks.size() ? toks[pos] : end;
        };
        auto accept = [&](const char* p) {
            if (peek().kind == TokKind::Punct && peek().text == p) {
                ++pos;
                return true;
            }
            return false;
        };
        auto mk = [&](ExprNode n) {
            e.nodes.push_back(std::move(n));
            return (int)e.nodes.size() - 1;
        };
        parse_unary = [&]() -> int {
            if (accept("-")) {
                int a = parse_unary();
                ExprNode n;
                n.kind = ExprNode::Kind::Neg;
                n.a = a;
                n.scale = e.nodes[a].scale;
                return mk(n);
            }
            if (accept("(")) {
                int a = parse_add();
                if (!accept(")")) throw ParseError("query: expected ')' in aggregate expression");
                return a;
            }
            const Token& t = peek();
            if (t.kind == TokKind::Number) {
                ++pos;
                std::string digits = t.text;
                std::size_t dot = digits.find('.');
                int frac = dot == std::string::npos ? 0 : (int)(digits.size() - dot - 1);
                Value v = parse_typed_value(digits, frac ? AttrType::Decimal : AttrType::Integer,
                                             frac, "aggregate literal");
                ExprNode n;
                n.kind = ExprNode::Kind::Lit;
                n.lit = v;
                n.scale = v.scale();
                return mk(n);
            }
            if (t.kind == TokKind::Ident) {
                ++pos;
                std::string qual, name = t.raw;
                if (peek().kind == TokKind::Punct && peek().text == ".") {
                    ++pos;
                    if (peek().kind != TokKind::Ident) throw ParseError("query: expected column name after '.'");
                    qual = name;
                    name = peek().raw;
                    ++pos;
                }
                if (peek().kind == TokKind::Punct && peek().text == "(")
                    throw UnsupportedError("function call '" + name + "' in aggregate");
                int col = resolve_colref(qual, name);
                const AttributeDef& a = col_attr(col);
                ExprNode n;
                n.kind = ExprNode::Kind::Col;
                n.var = col;  // column space; remapped per disjunct
                n.col_type = a.type;
                n.scale = a.type == AttrType::Decimal ? a.scale : 0;
                return mk(n);
            }
            throw ParseError("query: malformed aggregate expression");
        };
        parse_mul = [&]() -> int {
            int a = parse_unary();
            for (;;) {
                if (accept("*")) {
                    int b = parse_unary();
                    ExprNode n;
                    n.kind = ExprNode::Kind::Mul;
                    n.a = a;
                    n.b = b;
                    n.scale = e.nodes[a].scale + e.nodes[b].scale;
                    a = mk(n);
                } else if (peek().kind == TokKind::Punct && peek().text == "/") {
                    throw UnsupportedError("division in aggregate expression");
                } else {
                    break;
                }
            }
            return a;
        };
        parse_add = [&]() -> int {
            int a = parse_mul();
            for (;;) {
                bool add = false;
                if (accept("+")) add = true;
                else if (accept("-")) add = false;
                else break;
                int b = parse_mul();
                ExprNode n;
                n.kind = add ? ExprNode::Kind::Add : ExprNode::Kind::Sub;
                n.a = a;
                n.b = b;
                n.scale = std::max(e.nodes[a].scale, e.nodes[b].scale);
                a = mk(n);
            }
            return a;
        };
        e.root = parse_add();
        if (pos != toks.size()) throw ParseError("query: trailing input in aggregate expression");

        // Type discipline: text columns only as a bare COUNT argument;
        // MIN/MAX need an ordered numeric (or date) value.
        bool bare_col = e.nodes[e.root].kind == ExprNode::Kind::Col;
        for (const auto& n : e.nodes)
            if (n.kind == ExprNode::Kind::Col && n.col_type == AttrType::Text &&
                !(bare_col && op == AggOp::Count))
                throw ValidationError("text column in aggregation expression");
        if ((op == AggOp::Sum || op == AggOp::Min || op == AggOp::Max) &&
            bare_col && e.nodes[e.root].col_type == AttrType::Text)
            throw ValidationError("text column in aggregation expression");
        return e;
    }

    // Column-space expression -> per-disjunct expression over its variables.
    AggExpr instantiate_expr(const AggExpr& cols, const ConjunctiveQuery& cq) const {
        AggExpr out = cols;
        for (auto& n : out.nodes) {
            if (n.kind != ExprNode::Kind::Col) continue;
            const QTerm& t = cq.col_term[n.var];
            if (t.is_var()) {
                n.var = t.var;
            } else {
                n.kind = ExprNode::Kind::Lit;
                n.lit = t.constant;
                n.var = -1;
                // keep the declared column scale so every disjunct agrees
            }
        }
        return out;
    }

    // --- one conjunctive block -> ConjunctiveQuery ----------------------------

    ConjunctiveQuery build_cq(const std::vector<SurfCond>& conds) {
        ConjunctiveQuery cq;
        std::vector<int> parent(ncols_);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };

        auto compatible = [&](const AttributeDef& a, const AttributeDef& b) {
            return (attr_type_numeric(a.type) && attr_type_numeric(b.type)) || a.type == b.type;
        };

        // Pass 1: column=column equalities merge classes.
        for (const auto& c : conds) {
            if (c.kind != SurfCond::Kind::Cmp || c.op != CmpOp::Eq) continue;
            if (c.lhs.col >= 0 && c.rhs.col >= 0) {
                if (!compatible(col_attr(c.lhs.col), col_attr(c.rhs.col)))
                    throw ValidationError("join between incompatible column types: " +
                                          col_display(c.lhs.col) + " = " + col_display(c.rhs.col));
                parent[find(c.lhs.col)] = find(c.rhs.col);
            }
        }
        // Pass 2: column=literal equalities bind class constants.
        std::map<int, Value> bound;
        for (const auto& c : conds) {
            if (c.kind != SurfCond::Kind::Cmp || c.op != CmpOp::Eq) continue;
            const SurfTerm *colside = nullptr, *litside = nullptr;
            if (c.lhs.col >= 0 && c.rhs.col < 0) colside = &c.lhs, litside = &c.rhs;
            else if (c.rhs.col >= 0 && c.lhs.col < 0) colside = &c.rhs, litside = &c.lhs;
            else continue;
            Value v = type_literal(*litside, colside->col);
            int root = find(colside->col);
            auto it = bound.find(root);
            if (it == bound.end())
                bound.emplace(root, std::move(v));
            else if (it->second != v)
                cq.never_matches = true;  // contradictory constants
        }

        // Variable numbering: flattened column order, first use of each class.
        std::vector<int> var_of(ncols_, -1);
        cq.col_term.resize(ncols_);
        for (int c = 0; c < ncols_; ++c) {
            int root = find(c);
            auto it = bound.find(root);
            if (it != bound.end()) {
                cq.col_term[c] = QTerm::lit(it->second);
            } else {
                if (var_of[root] < 0) var_of[root] = cq.nvars++;
                cq.col_term[c] = QTerm::variable(var_of[root]);
            }
        }
        for (std::size_t i = 0; i < items_.size(); ++i) {
            QAtom atom;
            atom.relation = items_[i].relation;
            int arity = (int)schema_.relations[items_[i].relation].attrs.size();
            for (int p = 0; p < arity; ++p) atom.args.push_back(cq.col_term[col_offset_[i] + p]);
            cq.atoms.push_back(std::move(atom));
        }

        // Pass 3: remaining conditions become filters.
        auto term_of = [&](const SurfTerm& t, int type_col) -> QTerm {
            if (t.col >= 0) return cq.col_term[t.col];
            return QTerm::lit(type_literal(t, type_col));
        };
        for (const auto& c : conds) {
            switch (c.kind) {
                case SurfCond::Kind::Cmp: {
                    if (c.op == CmpOp::Eq && ((c.lhs.col >= 0) != (c.rhs.col >= 0))) continue;  // absorbed
                    if (c.op == CmpOp::Eq && c.lhs.col >= 0 && c.rhs.col >= 0) continue;         // absorbed
                    if (c.lhs.col >= 0 && c.rhs.col >= 0 &&
                        !compatible(col_attr(c.lhs.col), col_attr(c.rhs.col)))
                        throw ValidationError("comparison between incompatible column types");
                    QFilter f;
                    f.kind = FilterKind::Cmp;
                    f.op = c.op;
                    int tcol = c.lhs.col >= 0 ? c.lhs.col : c.rhs.col;
                    if (tcol < 0) {
                        // literal-literal comparison: resolved statically below
                        Value a = untyped_literal(c.lhs), b = untyped_literal(c.rhs);
                        if (a.is_text() != b.is_text())
                            throw ValidationError("comparison between incompatible literals");
                        f.lhs = QTerm::lit(a);
                        f.rhs = QTerm::lit(b);
                    } else {
                        f.lhs = term_of(c.lhs, tcol);
                        f.rhs = term_of(c.rhs, tcol);
                    }
                    cq.filters.push_back(std::move(f));
                    break;
                }
                case SurfCond::Kind::Between: {
                    if (c.lhs.col < 0) throw ValidationError("BETWEEN needs a column on the left");
                    QFilter lo, hi;
                    lo.kind = hi.kind = FilterKind::Cmp;
                    lo.op = CmpOp::Ge;
                    hi.op = CmpOp::Le;
                    lo.lhs = hi.lhs = cq.col_term[c.lhs.col];
                    lo.rhs = QTerm::lit(type_literal(c.lo, c.lhs.col));
                    hi.rhs = QTerm::lit(type_literal(c.hi, c.lhs.col));
                    cq.filters.push_back(std::move(lo));
                    cq.filters.push_back(std::move(hi));
                    break;
                }
                case SurfCond::Kind::In: {
                    if (c.lhs.col < 0) throw ValidationError("IN needs a column on the left");
                    QFilter f;
                    f.kind = FilterKind::In;
                    f.lhs = cq.col_term[c.lhs.col];
                    for (const auto& t : c.list) f.set.push_back(type_literal(t, c.lhs.col));
                    std::sort(f.set.begin(), f.set.end());
                    f.set.erase(std::unique(f.set.begin(), f.set.end()), f.set.end());
                    cq.filters.push_back(std::move(f));
                    break;
                }
                case SurfCond::Kind::Like: {
                    if (c.lhs.col < 0 || col_attr(c.lhs.col).type != AttrType::Text)
                        throw ValidationError("LIKE needs a text column on the left");
                    QFilter f;
                    f.kind = FilterKind::Like;
                    f.lhs = cq.col_term[c.lhs.col];
                    f.pattern = c.pattern;
                    cq.filters.push_back(std::move(f));
                    break;
                }
            }
        }
        // Constant-fold filters whose terms all resolved to constants; a block
        // found statically false ends with one canonical contradiction filter
        // so the fact survives printing and re-parsing.
        std::vector<QFilter> kept;
        for (auto& f : cq.filters) {
            if (f.kind == FilterKind::Cmp && !f.lhs.is_var() && !f.rhs.is_var()) {
                if (!cmp_apply(f.op, f.lhs.constant, f.rhs.constant)) cq.never_matches = true;
                continue;
            }
            if (f.kind == FilterKind::In && !f.lhs.is_var()) {
                if (!std::binary_search(f.set.begin(), f.set.end(), f.lhs.constant))
                    cq.never_matches = true;
                continue;
            }
            if (f.kind == FilterKind::Like && !f.lhs.is_var()) {
                if (!like_match(f.lhs.constant.str(), f.pattern)) cq.never_matches = true;
                continue;
            }
            kept.push_back(std::move(f));
        }
        cq.filters = std::move(kept);
        if (cq.never_matches) cq.filters.push_back(contradiction_filter());
        return cq;
    }

    static QFilter contradiction_filter() {
        QFilter f;
        f.kind = FilterKind::Cmp;
        f.op = CmpOp::Eq;
        f.lhs = QTerm::lit(Value::integer(0));
        f.rhs = QTerm::lit(Value::integer(1));
        return f;
    }

    Value type_literal(const SurfTerm& t, int col) {
        const AttributeDef& a = col_attr(col);
        if (t.is_string && attr_type_numeric(a.type))
            throw ValidationError("string literal compared with numeric column " + col_display(col));
        if (!t.is_string && !attr_type_numeric(a.type))
            throw ValidationError("numeric literal compared with " + std::string(attr_type_name(a.type)) +
                                  " column " + col_display(col));
        return parse_typed_value(t.text, a.type, a.scale, "query literal for " + col_display(col));
    }

    static Value untyped_literal(const SurfTerm& t) {
        if (t.is_string) return Value::text(t.text);
        std::size_t dot = t.text.find('.');
        int frac = dot == std::string::npos ? 0 : (int)(t.text.size() - dot - 1);
        return parse_typed_value(t.text, frac ? AttrType::Decimal : AttrType::Integer, frac, "query literal");
    }

    Lexer lex_;
    const Schema& schema_;
    std::string source_;
    std::vector<FromItem> items_;
    std::vector<int> col_offset_;
    int ncols_ = 0;
};

}  // namespace sqldetail

inline Statement parse_query(const std::string& text, const Schema& schema) {
    return sqldetail::Parser(text, schema).parse();
}

// Canonical text form of a parsed statement.  parse_query(print_query(s)) has
// the same query structure as s: FROM columns, equality classes, constant
// bindings and filters all reconstruct.
inline std::string print_query(const Statement& stmt, const Schema& schema) {
    std::vector<int> off;
    int ncols = 0;
    for (int r : stmt.from_relations) {
        off.push_back(ncols);
        ncols += (int)schema.relations[r].attrs.size();
    }
    auto col_item = [&](int col) {
        int item = 0;
        while (item + 1 < (int)off.size() && off[item + 1] <= col) ++item;
        return item;
    };
    auto col_attr = [&](int col) -> const AttributeDef& {
        int item = col_item(col);
        return schema.relations[stmt.from_relations[item]].attrs[col - off[item]];
    };
    auto col_display = [&](int col) {
        return stmt.from_displays[col_item(col)] + "." + col_attr(col).name;
    };
    auto quote = [](const std::string& s) {
        std::string out = "'";
        for (char ch : s) {
            out += ch;
            if (ch == '\'') out += ch;
        }
        out += "'";
        return out;
    };
    auto fmt_lit = [&](const Value& v, const AttributeDef* attr) {
        if (v.is_text()) return quote(v.str());
        if (attr && attr->type == AttrType::Date) return quote(format_typed_value(v, AttrType::Date));
        return v.to_string();
    };

    std::string out = "SELECT ";
    if (stmt.is_aggregate && stmt.agg.top_k) out += "TOP " + std::to_string(*stmt.agg.top_k) + " ";
    for (std::size_t i = 0; i < stmt.output_names.size(); ++i) {
        if (i) out += ", ";
        out += stmt.output_names[i];
    }
    out += " FROM ";
    for (std::size_t i = 0; i < stmt.from_relations.size(); ++i) {
        if (i) out += ", ";
        const std::string& rel = schema.relations[stmt.from_relations[i]].name;
        out += rel;
        if (!RelationDef::iequal(stmt.from_displays[i], rel)) out += " " + stmt.from_displays[i];
    }

    const UnionQuery& u = stmt.union_query();
    std::vector<std::string> block_texts;
    for (const auto& cq : u.disjuncts) {
        std::vector<std::string> conds;
        // Equality chains per variable class (classes in first-column order).
        std::map<int, std::vector<int>> cols_of_var;
        for (int c = 0; c < (int)cq.col_term.size(); ++c)
            if (cq.col_term[c].is_var()) cols_of_var[cq.col_term[c].var].push_back(c);
        std::vector<int> var_order;
        for (int c = 0; c < (int)cq.col_term.size(); ++c)
            if (cq.col_term[c].is_var() && cols_of_var[cq.col_term[c].var][0] == c)
                var_order.push_back(cq.col_term[c].var);
        for (int v : var_order) {
            const auto& cols = cols_of_var[v];
            for (std::size_t i = 0; i + 1 < cols.size(); ++i)
                conds.push_back(col_display(cols[i]) + " = " + col_display(cols[i + 1]));
        }
        // Constant bindings.
        for (int c = 0; c < (int)cq.col_term.size(); ++c)
            if (!cq.col_term[c].is_var())
                conds.push_back(col_display(c) + " = " +
                                fmt_lit(cq.col_term[c].constant, &col_attr(c)));
        // Filters.
        auto first_col_of_var = [&](int v) { return cols_of_var.at(v)[0]; };
        auto term_text = [&](const QTerm& t, const AttributeDef* attr) {
            return t.is_var() ? col_display(first_col_of_var(t.var)) : fmt_lit(t.constant, attr);
        };
        for (const auto& f : cq.filters) {
            switch (f.kind) {
                case FilterKind::Cmp: {
                    const AttributeDef* la = f.lhs.is_var() ? &col_attr(first_col_of_var(f.lhs.var)) : nullptr;
                    const AttributeDef* ra = f.rhs.is_var() ? &col_attr(first_col_of_var(f.rhs.var)) : nullptr;
                    conds.push_back(term_text(f.lhs, ra) + " " + cmp_op_text(f.op) + " " +
                                    term_text(f.rhs, la));
                    break;
                }
                case FilterKind::In: {
                    const AttributeDef* a = f.lhs.is_var() ? &col_attr(first_col_of_var(f.lhs.var)) : nullptr;
                    std::string t = term_text(f.lhs, nullptr) + " IN (";
                    for (std::size_t i = 0; i < f.set.size(); ++i) {
                        if (i) t += ", ";
                        t += fmt_lit(f.set[i], a);
                    }
                    conds.push_back(t + ")");
                    break;
                }
                case FilterKind::Like:
                    conds.push_back(term_text(f.lhs, nullptr) + " LIKE " + quote(f.pattern));
                    break;
            }
        }
        std::string block;
        for (std::size_t i = 0; i < conds.size(); ++i) {
            if (i) block += " AND ";
            block += conds[i];
        }
        if (block.empty()) block = "1 = 1";  // placeholder for an unconstrained disjunct
        block_texts.push_back(std::move(block));
    }
    bool all_trivial = block_texts.size() == 1 && block_texts[0] == "1 = 1";
    if (!all_trivial) {
        out += " WHERE ";
        for (std::size_t i = 0; i < block_texts.size(); ++i) {
            if (i) out += " OR ";
            if (block_texts.size() > 1) out += "(" + block_texts[i] + ")";
            else out += block_texts[i];
        }
    }
    if (stmt.is_aggregate && stmt.agg.grouped()) {
        out += " GROUP BY ";
        for (std::size_t i = 0; i < stmt.agg.group_names.size(); ++i) {
            if (i) out += ", ";
            out += stmt.agg.group_names[i];
        }
        if (!stmt.agg.order_cols.empty()) {
            out += " ORDER BY ";
            for (std::size_t i = 0; i < stmt.agg.order_cols.size(); ++i) {
                if (i) out += ", ";
                out += stmt.agg.group_names[stmt.agg.order_cols[i]];
            }
            if (stmt.agg.order_desc) out += " DESC";
        }
    }
    return out;
}

}  // namespace cqa
