#pragma once

// Schema model: typed relations with optional key constraints, plus denial
// constraints over tuple variables.
//
// A key is a set of attribute positions; an empty key set means the relation
// has no key constraint (each tuple is then its own key-equal group).  Denial
// constraints are universally quantified negated conjunctions: a set of tuple
// variables, one relation each, plus comparisons between attributes of those
// variables or against constants.

#include <cctype>
#include <string>
#include <vector>

#include "types.hpp"

namespace cqa {

enum class AttrType { Integer, Decimal, Text, Date };

inline const char* attr_type_name(AttrType t) {
    switch (t) {
        case AttrType::Integer: return "integer";
        case AttrType::Decimal: return "decimal";
        case AttrType::Text: return "text";
        case AttrType::Date: return "date";
    }
    return "?";
}

inline bool attr_type_numeric(AttrType t) {
    return t == AttrType::Integer || t == AttrType::Decimal;
}

struct AttributeDef {
    std::string name;
    AttrType type = AttrType::Text;
    int scale = 0;  // meaningful for Decimal only
};

struct RelationDef {
    std::string name;
    std::vector<AttributeDef> attrs;
    std::vector<int> key;  // attribute positions; empty = no key constraint

    bool has_key() const { return !key.empty(); }

    int attr_index(const std::string& name) const {
        for (int i = 0; i < (int)attrs.size(); ++i)
            if (iequal(attrs[i].name, name)) return i;
        return -1;
    }

    static bool iequal(const std::string& a, const std::string& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::tolower((unsigned char)a[i]) != std::tolower((unsigned char)b[i])) return false;
        return true;
    }
};

// ===========================================================================
// Denial constraints
// ===========================================================================

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

inline const char* cmp_op_text(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "!=";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

template <typename T>
bool cmp_apply(CmpOp op, const T& a, const T& b) {
    switch (op) {
        case CmpOp::Eq: return a == b;
        case CmpOp::Ne: return a != b;
        case CmpOp::Lt: return a < b;
        case CmpOp::Le: return a <= b;
        case CmpOp::Gt: return a > b;
        case CmpOp::Ge: return a >= b;
    }
    return false;
}

// One side of a denial-constraint comparison: either attribute `attr` of the
// tuple bound to `atom` (atom >= 0), or a constant (atom < 0).
struct DcTerm {
    int atom = -1;
    int attr = -1;
    Value constant;

    bool is_const() const { return atom < 0; }

    static DcTerm column(int atom, int attr) {
        DcTerm t;
        t.atom = atom;
        t.attr = attr;
        return t;
    }
    static DcTerm lit(Value v) {
        DcTerm t;
        t.constant = std::move(v);
        return t;
    }
};

struct DcComparison {
    CmpOp op = CmpOp::Eq;
    DcTerm lhs, rhs;
};

// forall t1..tk : not ( R1(t1) and ... and Rk(tk) and comparisons )
struct DenialConstraint {
    std::vector<int> atom_relations;      // relation index per tuple variable
    std::vector<std::string> atom_names;  // tuple variable names (for display)
    std::vector<DcComparison> comparisons;
    std::string text;                     // original source form, if parsed
};

// ===========================================================================
// Schema
// ===========================================================================

struct Schema {
    std::vector<RelationDef> relations;
    std::vector<DenialConstraint> dcs;

    int relation_index(const std::string& name) const {
        for (int i = 0; i < (int)relations.size(); ++i)
            if (RelationDef::iequal(relations[i].name, name)) return i;
        return -1;
    }

    const RelationDef& relation(int idx) const { return relations.at(idx); }

    bool has_dcs() const { return !dcs.empty(); }

    // Structural sanity: unique names, key positions in range, DC terms typed
    // against their relations.  Throws ValidationError.
    void validate() const {
        for (std::size_t i = 0; i < relations.size(); ++i) {
            const auto& r = relations[i];
            if (r.name.empty()) throw ValidationError("relation with empty name");
            if (r.attrs.empty()) throw ValidationError("relation " + r.name + " has no attributes");
            for (std::size_t j = i + 1; j < relations.size(); ++j)
                if (RelationDef::iequal(r.name, relations[j].name))
                    throw ValidationError("duplicate relation name " + r.name);
            for (std::size_t a = 0; a < r.attrs.size(); ++a)
                for (std::size_t b = a + 1; b < r.attrs.size(); ++b)
                    if (RelationDef::iequal(r.attrs[a].name, r.attrs[b].name))
                        throw ValidationError("duplicate attribute " + r.attrs[a].name + " in " + r.name);
            for (int k : r.key)
                if (k < 0 || k >= (int)r.attrs.size())
                    throw ValidationError("key position out of range in " + r.name);
        }
        for (const auto& dc : dcs) {
            if (dc.atom_relations.empty()) throw ValidationError("denial constraint without atoms");
            for (int rel : dc.atom_relations)
                if (rel < 0 || rel >= (int)relations.size())
                    throw ValidationError("denial constraint references unknown relation");
            for (const auto& c : dc.comparisons) {
                for (const DcTerm* t : {&c.lhs, &c.rhs}) {
                    if (t->is_const()) continue;
                    if (t->atom >= (int)dc.atom_relations.size())
                        throw ValidationError("denial constraint comparison references unknown tuple variable");
                    const auto& rel = relations[dc.atom_relations[t->atom]];
                    if (t->attr < 0 || t->attr >= (int)rel.attrs.size())
                        throw ValidationError("denial constraint references unknown attribute of " + rel.name);
                }
            }
        }
    }
};

}  // namespace cqa
