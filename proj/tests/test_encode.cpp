// CNF encodings: hard repair clauses, soft witness scoring, DISTINCT
// answer variables, and the min-sat chain transformation.
//
// The three bank-scenario encodings are checked clause-for-clause.  Auxiliary
// variables get canonical signatures (the multiset of clauses they appear in,
// with the aux literal abstracted) so the comparison is independent of
// allocation order.

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "cqa/encode.hpp"
#include "cqa/engine.hpp"
#include "cqa/instance_io.hpp"
#include "cqa/sql_parser.hpp"

using namespace cqa;

namespace {
const std::string kFixtures = CQA_FIXTURE_DIR;

Instance table1() { return load_instance(kFixtures + "/table1/schema.txt", kFixtures + "/table1"); }

using Clause = std::vector<Lit>;

Clause sorted(Clause c) {
    std::sort(c.begin(), c.end(), [](Lit a, Lit b) { return std::abs(a) != std::abs(b)
                                                                ? std::abs(a) < std::abs(b)
                                                                : a < b; });
    return c;
}

// Canonical view of a formula whose auxiliary variables (> nfacts) never
// co-occur: fact-only clauses as sorted multisets, aux variables as
// signatures over the clauses containing them.
struct CanonicalFormula {
    std::vector<Clause> fact_hard;                       // sorted clauses, sorted
    std::vector<std::pair<Clause, std::int64_t>> fact_soft;
    std::vector<std::string> aux_signatures;             // sorted

    bool operator==(const CanonicalFormula&) const = default;
};

std::string lit_text(Lit l) { return (l < 0 ? "-" : "") + std::to_string(std::abs(l)); }

CanonicalFormula canonicalize(const WcnfFormula& f, int nfacts) {
    CanonicalFormula out;
    std::map<int, std::vector<std::string>> sig;  // aux var -> clause descriptions

    auto handle = [&](const Clause& lits, bool hard, std::int64_t weight) {
        int aux = 0;
        Lit aux_lit = 0;
        for (Lit l : lits)
            if (std::abs(l) > nfacts) {
                ++aux;
                aux_lit = l;
            }
        REQUIRE(aux <= 1);  // these encodings never mix two aux vars in a clause
        if (aux == 0) {
            if (hard)
                out.fact_hard.push_back(sorted(lits));
            else
                out.fact_soft.push_back({sorted(lits), weight});
            return;
        }
        std::string d = hard ? "h" : "s" + std::to_string(weight);
        d += aux_lit > 0 ? "+A" : "-A";
        Clause rest;
        for (Lit l : lits)
            if (std::abs(l) <= nfacts) rest.push_back(l);
        for (Lit l : sorted(rest)) d += "," + lit_text(l);
        sig[std::abs(aux_lit)].push_back(std::move(d));
    };

    for (const auto& c : f.hard) handle(c, true, 0);
    for (const auto& s : f.soft) handle(s.lits, false, s.weight);

    for (auto& [var, parts] : sig) {
        std::sort(parts.begin(), parts.end());
        std::string joined;
        for (const auto& p : parts) joined += p + ";";
        out.aux_signatures.push_back(std::move(joined));
    }
    std::sort(out.fact_hard.begin(), out.fact_hard.end());
    std::sort(out.fact_soft.begin(), out.fact_soft.end());
    std::sort(out.aux_signatures.begin(), out.aux_signatures.end());
    return out;
}

CanonicalFormula expected(std::vector<Clause> hard,
                          std::vector<std::pair<Clause, std::int64_t>> soft,
                          std::vector<std::string> aux = {}) {
    CanonicalFormula out;
    for (auto& c : hard) out.fact_hard.push_back(sorted(std::move(c)));
    for (auto& [c, w] : soft) out.fact_soft.push_back({sorted(std::move(c)), w});
    out.aux_signatures = std::move(aux);
    std::sort(out.fact_hard.begin(), out.fact_hard.end());
    std::sort(out.fact_soft.begin(), out.fact_soft.end());
    std::sort(out.aux_signatures.begin(), out.aux_signatures.end());
    return out;
}
}  // namespace

// ---------------------------------------------------------------------------
// Reference encodings of the bank scenario
// ---------------------------------------------------------------------------

TEST_CASE("COUNT(*) over the three-way city join encodes to the reference clauses") {
    Instance inst = table1();
    Statement st = parse_query(
        "SELECT COUNT(*) FROM CUSTOMER, CUSTACC, ACCOUNTS "
        "WHERE CUSTOMER.CID = CUSTACC.CID AND CUSTACC.ACCID = ACCOUNTS.ACCID "
        "AND CUSTOMER.CITY = ACCOUNTS.CITY",
        inst.schema);
    CqaEngine engine(inst);
    EncodedScalar enc = engine.encode_scalar(st.agg);

    REQUIRE(enc.base == 0);
    REQUIRE(enc.offset == 3);
    CanonicalFormula got = canonicalize(enc.formula, inst.fact_count());
    CanonicalFormula want = expected(
        // Pick exactly one per key-equal group of CUSTOMER and ACCOUNTS.
        {{1}, {2, 3}, {4}, {5}, {6}, {7}, {8, 9}, {10}, {-2, -3}, {-8, -9}},
        // One exclusion clause per surviving witness, weight 1 each.
        {{{-1, -6}, 1}, {{-2, -7}, 1}, {{-3, -9}, 1}});
    REQUIRE(got == want);
}

TEST_CASE("SUM over Mary's balances encodes negative witnesses with presence variables") {
    Instance inst = table1();
    Statement st = parse_query(
        "SELECT SUM(ACCOUNTS.BAL) FROM CUSTOMER, CUSTACC, ACCOUNTS "
        "WHERE CUSTOMER.CID = CUSTACC.CID AND CUSTACC.ACCID = ACCOUNTS.ACCID "
        "AND CUSTOMER.CNAME = 'Mary'",
        inst.schema);
    CqaEngine engine(inst);
    EncodedScalar enc = engine.encode_scalar(st.agg);

    REQUIRE(enc.base == 0);
    REQUIRE(enc.offset == 4400);  // 1000 + 1000 + 1200 + 1200
    CanonicalFormula got = canonicalize(enc.formula, inst.fact_count());
    // The -100 witnesses {2,9} and {3,9} each get y <-> both present,
    // soft (y, 100); the positive witnesses keep plain exclusion softs.
    CanonicalFormula want = expected(
        {{1}, {2, 3}, {4}, {5}, {6}, {7}, {8, 9}, {10}, {-2, -3}, {-8, -9}},
        {{{-2, -7}, 1000}, {{-3, -7}, 1000}, {{-2, -8}, 1200}, {{-3, -8}, 1200}},
        {"h+A,-2,-9;h-A,2;h-A,9;s100+A;", "h+A,-3,-9;h-A,3;h-A,9;s100+A;"});
    REQUIRE(got == want);
}

TEST_CASE("COUNT DISTINCT of account types encodes answer-missing variables") {
    Instance inst = table1();
    Statement st = parse_query("SELECT COUNT(DISTINCT ACCOUNTS.TYPE) FROM ACCOUNTS",
                               inst.schema);
    CqaEngine engine(inst);
    EncodedScalar enc = engine.encode_scalar(st.agg);

    REQUIRE(enc.base == 0);
    REQUIRE(enc.offset == 2);
    CanonicalFormula got = canonicalize(enc.formula, inst.fact_count());
    // Checking = {6},{7}; Saving = {8},{9},{10}.  Singleton witness sets use
    // the fact literal directly, so each answer value contributes one v with
    // v <-> all witnesses absent, scored soft (v, 1).
    CanonicalFormula want = expected(
        {{6}, {7}, {8, 9}, {10}, {-8, -9}},
        {},
        {"h+A,6,7;h-A,-6;h-A,-7;s1+A;", "h+A,8,9,10;h-A,-10;h-A,-8;h-A,-9;s1+A;"});
    REQUIRE(got == want);
}

// ---------------------------------------------------------------------------
// Building blocks
// ---------------------------------------------------------------------------

TEST_CASE("encode_key_hard covers only the selected relations; relaxed drops pair clauses") {
    Instance inst = table1();
    std::vector<bool> rels(3, false);
    rels[inst.schema.relation_index("ACCOUNTS")] = true;

    WcnfFormula exact = make_fact_formula(inst);
    encode_key_hard(exact, inst, rels);
    CanonicalFormula got = canonicalize(exact, inst.fact_count());
    REQUIRE(got == expected({{6}, {7}, {8, 9}, {10}, {-8, -9}}, {}));

    WcnfFormula relaxed = make_fact_formula(inst);
    encode_key_hard_relaxed(relaxed, inst, rels);
    REQUIRE(canonicalize(relaxed, inst.fact_count()) ==
            expected({{6}, {7}, {8, 9}, {10}}, {}));
}

TEST_CASE("exclusion_clause negates every fact") {
    REQUIRE(exclusion_clause({3, 7, 1}) == Clause{-3, -7, -1});
}

TEST_CASE("encode_count_sum skips zeros, scores positives, flags negatives") {
    Witness pos;
    pos.facts = {1, 2};
    pos.value = Value::integer(5);
    pos.mult = 2;
    Witness zero;
    zero.facts = {3};
    zero.value = Value::integer(0);
    zero.mult = 1;
    Witness neg;
    neg.facts = {3, 4};
    neg.value = Value::integer(-7);
    neg.mult = 1;

    WcnfFormula f;
    f.nvars = 4;
    std::int64_t offset = encode_count_sum(f, {pos, zero, neg}, AggOp::Sum, 0);
    REQUIRE(offset == 10);  // only the positive contribution
    CanonicalFormula got = canonicalize(f, 4);
    REQUIRE(got == expected({}, {{{-1, -2}, 10}}, {"h+A,-3,-4;h-A,3;h-A,4;s7+A;"}));

    // COUNT ignores values and weighs by multiplicity.
    WcnfFormula fc;
    fc.nvars = 4;
    REQUIRE(encode_count_sum(fc, {pos, zero, neg}, AggOp::Count, 0) == 4);
    REQUIRE(fc.soft.size() == 3);

    Witness bad;
    bad.value = Value::integer(1);
    bad.mult = 1;
    WcnfFormula fb;
    REQUIRE_THROWS_AS(encode_count_sum(fb, {bad}, AggOp::Sum, 0), EncodingError);
}

TEST_CASE("witness_contribution scales decimal values and rejects text") {
    Witness w;
    w.facts = {1};
    w.value = Value::decimal(15, 1);  // 1.5
    w.mult = 3;
    REQUIRE(witness_contribution(w, AggOp::Sum, 2) == 450);
    REQUIRE(witness_contribution(w, AggOp::Count, 2) == 3);
    w.value = Value::text("oops");
    REQUIRE(witness_contribution(w, AggOp::Count, 0) == 3);
    REQUIRE_THROWS_AS(witness_contribution(w, AggOp::Sum, 0), EncodingError);
}

TEST_CASE("encode_distinct collapses singleton witness sets and skips zero values") {
    DistinctAnswer multi;
    multi.witness_sets = {{1, 2}, {3}};
    multi.contribution = 4;
    DistinctAnswer zero;
    zero.witness_sets = {{4}};
    zero.contribution = 0;  // SUM DISTINCT of value 0 changes nothing
    DistinctAnswer negative;
    negative.witness_sets = {{4}};
    negative.contribution = -2;

    WcnfFormula f;
    f.nvars = 4;
    std::int64_t offset = encode_distinct(f, {multi, zero, negative});
    REQUIRE(offset == 4);

    // multi: z <-> {1,2} absent, v <-> (z and -3); negative: v' <-> -4.
    // The z/v pair for `multi` co-occurs in one clause, so check the
    // construction semantically over every assignment.
    int vvar = -1;
    for (const auto& s : f.soft)
        if (s.weight == 4) vvar = std::abs(s.lits[0]);
    REQUIRE(vvar > 4);

    // Exhaustive: in every hard-satisfying assignment, v holds exactly when
    // facts 1,2 are not both present and fact 3 is absent.
    bool saw_model = false;
    for (int bits = 0; bits < (1 << f.nvars); ++bits) {
        auto val = [&](int var) { return ((bits >> (var - 1)) & 1) != 0; };
        bool ok = true;
        for (const auto& c : f.hard) {
            bool sat = false;
            for (Lit l : c) sat = sat || (l > 0 ? val(l) : !val(-l));
            ok = ok && sat;
        }
        if (!ok) continue;
        saw_model = true;
        bool answer_missing = !(val(1) && val(2)) && !val(3);
        REQUIRE(val(vvar) == answer_missing);
    }
    REQUIRE(saw_model);

    // The negative answer has a singleton set: v' <-> -4 directly, soft (-v', 2).
    bool saw_negative_soft = false;
    for (const auto& s : f.soft)
        if (s.weight == 2) {
            REQUIRE(s.lits.size() == 1);
            REQUIRE(s.lits[0] < 0);
            saw_negative_soft = true;
        }
    REQUIRE(saw_negative_soft);
    REQUIRE(f.soft.size() == 2);  // zero-contribution answer adds nothing
}

TEST_CASE("encode_denial turns minimal violations into justification clauses") {
    Schema s = parse_schema(
        "relation T ( X integer, Y integer );\n"
        "dc !( T(t) and t.X > 2 );\n");
    Instance inst;
    inst.schema = s;
    inst.add_fact(0, {Value::integer(1), Value::integer(0)});
    inst.add_fact(0, {Value::integer(3), Value::integer(0)});

    auto minimal = minimal_violations(inst);
    REQUIRE(minimal == std::vector<std::vector<FactId>>{{2}});

    WcnfFormula f = make_fact_formula(inst);
    encode_denial(f, inst, minimal);
    // x_true (var 3), alpha (-2), gamma (1) for the untouched fact, and
    // gamma (2 v x_true) for the singleton violation.
    std::vector<Clause> got;
    for (auto c : f.hard) got.push_back(sorted(std::move(c)));
    std::sort(got.begin(), got.end());
    REQUIRE(got == std::vector<Clause>{{-2}, {1}, {2, 3}, {3}});
    REQUIRE(f.nvars == 3);
}

TEST_CASE("encode_denial links companion sets with p variables") {
    Schema s = parse_schema(
        "relation T ( X integer, Y integer );\n"
        "dc !( T(t1) and T(t2) and t1.X = t2.X and t1.Y < t2.Y );\n");
    Instance inst;
    inst.schema = s;
    inst.add_fact(0, {Value::integer(1), Value::integer(5)});
    inst.add_fact(0, {Value::integer(1), Value::integer(9)});

    auto minimal = minimal_violations(inst);
    REQUIRE(minimal == std::vector<std::vector<FactId>>{{1, 2}});

    WcnfFormula f = make_fact_formula(inst);
    encode_denial(f, inst, minimal);
    CanonicalFormula got = canonicalize(f, inst.fact_count());
    // x_true unit (fact-free aux gets a signature of its own), alpha
    // (-1 v -2), and per fact one p <-> companion plus the gamma clause.
    REQUIRE(got.fact_hard == std::vector<Clause>{{-1, -2}});
    std::vector<std::string> want_aux = {
        "h+A;",                     // x_true: single unit clause
        "h+A,-2;h-A,2;h+A,1;",      // p1 <-> fact 2 present; gamma (1 v p1)
        "h+A,-1;h-A,1;h+A,2;",      // p2 <-> fact 1 present; gamma (2 v p2)
    };
    for (auto& x : want_aux) {
        std::vector<std::string> parts;
        std::string item;
        std::istringstream is(x);
        while (std::getline(is, item, ';'))
            if (!item.empty()) parts.push_back(item);
        std::sort(parts.begin(), parts.end());
        x.clear();
        for (auto& p : parts) x += p + ";";
    }
    std::sort(want_aux.begin(), want_aux.end());
    REQUIRE(got.aux_signatures == want_aux);
}

// ---------------------------------------------------------------------------
// Min-sat transformation
// ---------------------------------------------------------------------------

TEST_CASE("min_sat_transform chains one clause into per-literal pieces") {
    WcnfFormula f;
    f.nvars = 2;
    f.add_hard({1, 2});
    f.add_soft({1, 2}, 3);
    MinSatTransform t = min_sat_transform(f);
    REQUIRE(t.constant == 6);
    REQUIRE(t.formula.hard == f.hard);
    REQUIRE(t.formula.soft.size() == 2);
    REQUIRE(t.formula.soft[0].lits == Clause{-1});
    REQUIRE(t.formula.soft[0].weight == 3);
    REQUIRE(t.formula.soft[1].lits == Clause{1, -2});
    REQUIRE(t.formula.soft[1].weight == 3);
}

TEST_CASE("min-sat via the transform equals exhaustive minimum") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        int nvars = 2 + (int)(rng() % 9);
        WcnfFormula f;
        f.nvars = nvars;
        int nhard = (int)(rng() % 3);
        int nsoft = 1 + (int)(rng() % 5);
        auto random_clause = [&](int max_len) {
            Clause c;
            int len = 1 + (int)(rng() % max_len);
            for (int i = 0; i < len; ++i) {
                int v = 1 + (int)(rng() % nvars);
                c.push_back(rng() % 2 ? v : -v);
            }
            std::sort(c.begin(), c.end());
            c.erase(std::unique(c.begin(), c.end()), c.end());
            return c;
        };
        for (int i = 0; i < nhard; ++i) f.add_hard(random_clause(3));
        for (int i = 0; i < nsoft; ++i) f.add_soft(random_clause(3), 1 + (std::int64_t)(rng() % 9));

        // Exhaustive min and max satisfied soft weight over hard-satisfying
        // assignments.
        std::int64_t min_sat = -1, max_sat = -1;
        for (int bits = 0; bits < (1 << nvars); ++bits) {
            Model m(nvars + 1, false);
            for (int v = 1; v <= nvars; ++v) m[v] = (bits >> (v - 1)) & 1;
            bool ok = true;
            for (const auto& c : f.hard) ok = ok && clause_satisfied(c, m);
            if (!ok) continue;
            std::int64_t w = satisfied_soft_weight(f, m);
            if (min_sat < 0 || w < min_sat) min_sat = w;
            if (max_sat < 0 || w > max_sat) max_sat = w;
        }
        if (min_sat < 0) continue;  // hard side unsatisfiable; nothing to compare

        MinSatTransform t = min_sat_transform(f);
        std::int64_t best_transformed = -1;
        for (int bits = 0; bits < (1 << nvars); ++bits) {
            Model m(nvars + 1, false);
            for (int v = 1; v <= nvars; ++v) m[v] = (bits >> (v - 1)) & 1;
            bool ok = true;
            for (const auto& c : t.formula.hard) ok = ok && clause_satisfied(c, m);
            if (!ok) continue;
            std::int64_t w = satisfied_soft_weight(t.formula, m);
            if (best_transformed < 0 || w > best_transformed) best_transformed = w;
        }
        INFO("trial " << trial);
        REQUIRE(min_sat == t.constant - best_transformed);
    }
}
