#pragma once

// Schema text format (see docs/schema_format.md):
//
//   relation CUSTOMER ( CID text, CNAME text, CITY text, key(CID) );
//   relation ACCOUNTS ( ACCID text, TYPE text, CITY text, BAL integer, key(ACCID) );
//   dc !( ACCOUNTS(t1) and ACCOUNTS(t2) and t1.ACCID = t2.ACCID and t1.TYPE != t2.TYPE );
//
// Types: integer, text, date, decimal(<scale>).  `key(...)` is optional; a
// relation without it carries no key constraint.  A dc block is the negated
// conjunction form: tuple-variable atoms plus comparisons.

#include <fstream>
#include <sstream>
#include <string>

#include "lex.hpp"
#include "value_text.hpp"

namespace cqa {

namespace detail {

inline AttrType parse_attr_type(Lexer& lex, int& scale) {
    scale = 0;
    if (lex.accept_keyword("integer")) return AttrType::Integer;
    if (lex.accept_keyword("text")) return AttrType::Text;
    if (lex.accept_keyword("date")) return AttrType::Date;
    if (lex.accept_keyword("decimal")) {
        lex.expect_punct("(");
        if (lex.peek().kind != TokKind::Number) lex.fail("expected decimal scale");
        scale = std::stoi(lex.next().text);
        if (scale < 0 || scale > 18) lex.fail("decimal scale out of range");
        lex.expect_punct(")");
        return AttrType::Decimal;
    }
    lex.fail("expected attribute type (integer, text, date, decimal(k))");
}

inline void parse_relation(Lexer& lex, Schema& schema) {
    RelationDef rel;
    rel.name = lex.expect_ident("relation name");
    lex.expect_punct("(");
    std::vector<std::string> key_names;
    bool saw_key = false;
    for (;;) {
        if (lex.accept_keyword("key")) {
            if (saw_key) lex.fail("duplicate key clause");
            saw_key = true;
            lex.expect_punct("(");
            do {
                key_names.push_back(lex.expect_ident("key attribute"));
            } while (lex.accept_punct(","));
            lex.expect_punct(")");
        } else {
            AttributeDef attr;
            attr.name = lex.expect_ident("attribute name");
            attr.type = parse_attr_type(lex, attr.scale);
            rel.attrs.push_back(std::move(attr));
        }
        if (!lex.accept_punct(",")) break;
    }
    lex.expect_punct(")");
    for (const auto& kn : key_names) {
        int idx = rel.attr_index(kn);
        if (idx < 0) lex.fail("key references unknown attribute '" + kn + "'");
        rel.key.push_back(idx);
    }
    schema.relations.push_back(std::move(rel));
}

// term := tuplevar '.' attr | literal.  Returns an untyped literal as a text
// Value plus a marker; typing is resolved once the comparison is complete.
struct RawDcTerm {
    bool is_column = false;
    int atom = -1, attr = -1;
    bool is_number = false;
    std::string literal;  // number text or string body
};

inline RawDcTerm parse_dc_term(Lexer& lex, const Schema& schema,
                               const std::vector<std::string>& var_names,
                               const std::vector<int>& var_rels) {
    RawDcTerm t;
    if (lex.peek().kind == TokKind::Number ||
        (lex.peek().kind == TokKind::Punct && lex.peek().text == "-")) {
        std::string num;
        if (lex.accept_punct("-")) num = "-";
        if (lex.peek().kind != TokKind::Number) lex.fail("expected number");
        num += lex.next().text;
        t.is_number = true;
        t.literal = num;
        return t;
    }
    if (lex.peek().kind == TokKind::String) {
        t.literal = lex.next().text;
        return t;
    }
    std::string var = lex.expect_ident("tuple variable");
    for (std::size_t i = 0; i < var_names.size(); ++i)
        if (RelationDef::iequal(var_names[i], var)) t.atom = (int)i;
    if (t.atom < 0) lex.fail("unknown tuple variable '" + var + "'");
    lex.expect_punct(".");
    std::string attr = lex.expect_ident("attribute name");
    t.attr = schema.relations[var_rels[t.atom]].attr_index(attr);
    if (t.attr < 0) lex.fail("unknown attribute '" + attr + "'");
    t.is_column = true;
    return t;
}

inline CmpOp parse_cmp_op(Lexer& lex) {
    if (lex.accept_punct("=")) return CmpOp::Eq;
    if (lex.accept_punct("!=") || lex.accept_punct("<>")) return CmpOp::Ne;
    if (lex.accept_punct("<=")) return CmpOp::Le;
    if (lex.accept_punct(">=")) return CmpOp::Ge;
    if (lex.accept_punct("<")) return CmpOp::Lt;
    if (lex.accept_punct(">")) return CmpOp::Gt;
    lex.fail("expected comparison operator");
}

inline void parse_dc(Lexer& lex, Schema& schema) {
    DenialConstraint dc;
    lex.expect_punct("!");
    lex.expect_punct("(");
    std::vector<std::string> var_names;
    do {
        // Atom (Rel(t)) or comparison; atoms look like IDENT '('.
        if (lex.peek().kind == TokKind::Ident && lex.peek(1).kind == TokKind::Punct &&
            lex.peek(1).text == "(" && schema.relation_index(lex.peek().raw) >= 0) {
            std::string rel_name = lex.expect_ident("relation name");
            int rel = schema.relation_index(rel_name);
            lex.expect_punct("(");
            std::string var = lex.expect_ident("tuple variable");
            lex.expect_punct(")");
            for (const auto& existing : var_names)
                if (RelationDef::iequal(existing, var)) lex.fail("duplicate tuple variable '" + var + "'");
            var_names.push_back(var);
            dc.atom_relations.push_back(rel);
            dc.atom_names.push_back(var);
            continue;
        }
        RawDcTerm lhs = parse_dc_term(lex, schema, var_names, dc.atom_relations);
        CmpOp op = parse_cmp_op(lex);
        RawDcTerm rhs = parse_dc_term(lex, schema, var_names, dc.atom_relations);
        if (!lhs.is_column && !rhs.is_column) lex.fail("comparison between two literals");
        auto typed = [&](const RawDcTerm& lit, const RawDcTerm& col) -> DcTerm {
            const AttributeDef& a = schema.relations[dc.atom_relations[col.atom]].attrs[col.attr];
            return DcTerm::lit(parse_typed_value(lit.literal, a.type, a.scale, "denial constraint"));
        };
        DcComparison cmp;
        cmp.op = op;
        if (lhs.is_column && rhs.is_column) {
            const AttributeDef& a = schema.relations[dc.atom_relations[lhs.atom]].attrs[lhs.attr];
            const AttributeDef& b = schema.relations[dc.atom_relations[rhs.atom]].attrs[rhs.attr];
            bool ok = (attr_type_numeric(a.type) && attr_type_numeric(b.type)) || a.type == b.type;
            if (!ok) lex.fail("comparison between incompatible attribute types");
            cmp.lhs = DcTerm::column(lhs.atom, lhs.attr);
            cmp.rhs = DcTerm::column(rhs.atom, rhs.attr);
        } else if (lhs.is_column) {
            cmp.lhs = DcTerm::column(lhs.atom, lhs.attr);
            cmp.rhs = typed(rhs, lhs);
        } else {
            cmp.lhs = typed(lhs, rhs);
            cmp.rhs = DcTerm::column(rhs.atom, rhs.attr);
        }
        dc.comparisons.push_back(std::move(cmp));
    } while (lex.accept_keyword("and"));
    lex.expect_punct(")");
    if (dc.atom_relations.empty()) lex.fail("denial constraint needs at least one atom");
    schema.dcs.push_back(std::move(dc));
}

}  // namespace detail

// Parseable source form of a denial constraint (used by write_instance).
inline std::string dc_source(const Schema& schema, const DenialConstraint& dc) {
    std::ostringstream out;
    out << "!( ";
    for (std::size_t i = 0; i < dc.atom_relations.size(); ++i) {
        if (i) out << " and ";
        out << schema.relations[dc.atom_relations[i]].name << "("
            << (i < dc.atom_names.size() ? dc.atom_names[i] : "t" + std::to_string(i + 1)) << ")";
    }
    auto term_type = [&](const DcTerm& t) {
        return schema.relations[dc.atom_relations[t.atom]].attrs[t.attr];
    };
    for (const DcComparison& c : dc.comparisons) {
        out << " and ";
        const AttributeDef col = c.lhs.is_const() ? term_type(c.rhs) : term_type(c.lhs);
        auto emit = [&](const DcTerm& t) {
            if (!t.is_const()) {
                out << dc.atom_names[t.atom] << "." << term_type(t).name;
            } else if (t.constant.is_text() || col.type == AttrType::Text) {
                std::string s = t.constant.str();
                std::string quoted;
                for (char ch : s) {
                    if (ch == '\'') quoted += '\'';
                    quoted += ch;
                }
                out << "'" << quoted << "'";
            } else if (col.type == AttrType::Date) {
                out << "'" << format_date(t.constant.num()) << "'";
            } else {
                out << t.constant.to_string();
            }
        };
        emit(c.lhs);
        out << " " << cmp_op_text(c.op) << " ";
        emit(c.rhs);
    }
    out << " )";
    return out.str();
}

inline Schema parse_schema(const std::string& text, const std::string& origin = "schema") {
    Lexer lex(text, origin);
    Schema schema;
    while (!lex.at_end()) {
        if (lex.accept_keyword("relation")) {
            detail::parse_relation(lex, schema);
        } else if (lex.accept_keyword("dc")) {
            detail::parse_dc(lex, schema);
            schema.dcs.back().text = dc_source(schema, schema.dcs.back());
        } else {
            lex.fail("expected 'relation' or 'dc'");
        }
        lex.accept_punct(";");
    }
    schema.validate();
    return schema;
}

inline Schema load_schema(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_schema(ss.str(), path);
}

}  // namespace cqa
