// End-to-end engine checks: hand-verified ranges on the bank fixture,
// randomized equivalence against the repair-enumeration oracle (key and
// denial-constraint inconsistency, scalar and grouped, every aggregate),
// MIN/MAX scan behavior, grouped ordering and TOP-k, and the maximum-cut
// construction.

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "cqa/engine.hpp"
#include "cqa/generate.hpp"
#include "cqa/instance_io.hpp"
#include "cqa/oracle.hpp"
#include "cqa/sql_parser.hpp"

using namespace cqa;

namespace {

Instance table1() {
    return load_instance(CQA_FIXTURE_DIR "/table1/schema.txt", CQA_FIXTURE_DIR "/table1");
}

AggQuery agg(const Instance& inst, const std::string& sql) {
    Statement st = parse_query(sql, inst.schema);
    REQUIRE(st.is_aggregate);
    return st.agg;
}

UnionQuery plain(const Instance& inst, const std::string& sql) {
    Statement st = parse_query(sql, inst.schema);
    REQUIRE_FALSE(st.is_aggregate);
    return st.ucq;
}

RangeAnswer solve(const Instance& inst, const std::string& sql, EngineConfig cfg = {}) {
    CqaEngine eng(inst, cfg);
    return eng.scalar(agg(inst, sql)).range;
}

}  // namespace

// ---------------------------------------------------------------------------
// Hand-verified ranges on the bank fixture
// ---------------------------------------------------------------------------

TEST_CASE("bank fixture scalar ranges") {
    Instance inst = table1();
    CqaEngine eng(inst);
    REQUIRE_FALSE(eng.instance_consistent());

    SECTION("customers with an account in their own city") {
        RangeAnswer r = eng.scalar(agg(inst,
                                       "SELECT COUNT(*) FROM CUSTOMER, ACCOUNTS, CUSTACC "
                                       "WHERE CUSTACC.CID = CUSTOMER.CID "
                                       "AND CUSTACC.ACCID = ACCOUNTS.ACCID "
                                       "AND CUSTOMER.CITY = ACCOUNTS.CITY"))
                            .range;
        REQUIRE(r.glb == 1);
        REQUIRE(r.lub == 2);
        REQUIRE_FALSE(r.empty_possible);
    }

    SECTION("total balance of customer C2") {
        EngineResult r = eng.scalar(agg(inst,
                                        "SELECT SUM(ACCOUNTS.BAL) FROM ACCOUNTS, CUSTACC "
                                        "WHERE CUSTACC.ACCID = ACCOUNTS.ACCID "
                                        "AND CUSTACC.CID = 'C2'"));
        REQUIRE(r.range.glb == 900);
        REQUIRE(r.range.lub == 2200);
        REQUIRE_FALSE(r.range.empty_possible);
        REQUIRE_FALSE(r.stats.shortcut);
        REQUIRE(r.stats.sat_calls == 2);  // one maximization each way
        REQUIRE(r.stats.vars > 0);
        REQUIRE(r.stats.clauses > 0);
        REQUIRE(r.stats.soft > 0);
    }

    SECTION("distinct account types") {
        RangeAnswer r =
            eng.scalar(agg(inst, "SELECT COUNT(DISTINCT ACCOUNTS.TYPE) FROM ACCOUNTS")).range;
        REQUIRE(r.glb == 2);
        REQUIRE(r.lub == 2);
    }

    SECTION("distinct balance sum") {
        RangeAnswer r =
            eng.scalar(agg(inst, "SELECT SUM(DISTINCT ACCOUNTS.BAL) FROM ACCOUNTS")).range;
        REQUIRE(r.glb == 2100);
        REQUIRE(r.lub == 3400);
    }

    SECTION("minimum over the doubtful SF account") {
        RangeAnswer r = eng.scalar(agg(inst,
                                       "SELECT MIN(ACCOUNTS.BAL) FROM ACCOUNTS "
                                       "WHERE ACCOUNTS.CITY = 'SF'"))
                            .range;
        REQUIRE(r.glb == -100);
        REQUIRE(r.lub == -100);
        REQUIRE(r.empty_possible);
    }

    SECTION("balance extrema") {
        RangeAnswer mx = eng.scalar(agg(inst, "SELECT MAX(ACCOUNTS.BAL) FROM ACCOUNTS")).range;
        REQUIRE(mx.glb == 1000);
        REQUIRE(mx.lub == 1200);
        REQUIRE_FALSE(mx.empty_possible);

        RangeAnswer mn = eng.scalar(agg(inst, "SELECT MIN(ACCOUNTS.BAL) FROM ACCOUNTS")).range;
        REQUIRE(mn.glb == -100);
        REQUIRE(mn.lub == 300);
    }

    SECTION("disjunction counts each customer once") {
        RangeAnswer r = eng.scalar(agg(inst,
                                       "SELECT COUNT(*) FROM CUSTOMER "
                                       "WHERE CUSTOMER.CITY = 'LA' OR CUSTOMER.CNAME = 'Mary'"))
                            .range;
        REQUIRE(r.glb == 3);
        REQUIRE(r.lub == 3);
    }
}

TEST_CASE("bank fixture matches the oracle on every aggregate") {
    Instance inst = table1();
    CqaEngine eng(inst);
    for (const std::string op : {"COUNT(*)", "COUNT(ACCOUNTS.BAL)", "SUM(ACCOUNTS.BAL)",
                                 "MIN(ACCOUNTS.BAL)", "MAX(ACCOUNTS.BAL)",
                                 "COUNT(DISTINCT ACCOUNTS.BAL)", "SUM(DISTINCT ACCOUNTS.BAL)"}) {
        std::string sql = "SELECT " + op +
                          " FROM ACCOUNTS, CUSTACC WHERE CUSTACC.ACCID = ACCOUNTS.ACCID";
        CAPTURE(sql);
        AggQuery q = agg(inst, sql);
        REQUIRE(eng.scalar(q).range == oracle_range_scalar(q, inst, 1000));
    }
}

// ---------------------------------------------------------------------------
// Randomized equivalence with the oracle: key-constraint instances
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string> kOps = {
    "COUNT(*)",      "COUNT(R.A)",          "SUM(R.A)",          "MIN(R.A)",
    "MAX(R.A)",      "COUNT(DISTINCT R.A)", "SUM(DISTINCT R.A)",
};

}  // namespace

TEST_CASE("random key instances: engine equals oracle") {
    for (std::uint64_t seed = 1; seed <= 150; ++seed) {
        RandomInstanceConfig cfg;
        cfg.seed = seed;
        Instance inst = random_instance(cfg);
        CqaEngine eng(inst);

        EngineConfig alt;
        alt.binary_search = true;
        alt.shortcut = false;
        CqaEngine eng_alt(inst, alt);
        const bool deep = seed % 4 == 0;

        for (const std::string& op : kOps) {
            std::string scalar_sql = "SELECT " + op + " FROM R, S WHERE R.B = S.K";
            CAPTURE(seed, scalar_sql);
            AggQuery q = agg(inst, scalar_sql);
            RangeAnswer want = oracle_range_scalar(q, inst, 1'000'000);
            REQUIRE(eng.scalar(q).range == want);
            if (deep) REQUIRE(eng_alt.scalar(q).range == want);

            std::string grouped_sql =
                "SELECT R.G, " + op + " FROM R, S WHERE R.B = S.K GROUP BY R.G";
            CAPTURE(grouped_sql);
            AggQuery gq = agg(inst, grouped_sql);
            std::vector<GroupRange> gwant = oracle_range_grouped(gq, inst, 1'000'000);
            order_and_truncate(gq, TopKOrder::Group, gwant);
            REQUIRE(eng.grouped(gq).groups == gwant);
            if (deep) {
                EngineConfig par = alt;
                par.jobs = 4;
                CqaEngine eng_par(inst, par);
                REQUIRE(eng_par.grouped(gq).groups == gwant);
            }
        }

        // Single-relation filtered variants, including possibly-empty MIN.
        for (const std::string& sql :
             {std::string("SELECT SUM(R.A) FROM R WHERE R.A > 0"),
              std::string("SELECT MIN(R.A) FROM R WHERE R.G = 'g0'"),
              std::string("SELECT MAX(R.B) FROM R WHERE R.A <= 2")}) {
            CAPTURE(seed, sql);
            AggQuery q = agg(inst, sql);
            REQUIRE(eng.scalar(q).range == oracle_range_scalar(q, inst, 1'000'000));
        }
    }
}

TEST_CASE("random key instances: consistent answers equal the oracle") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        RandomInstanceConfig cfg;
        cfg.seed = seed;
        Instance inst = random_instance(cfg);
        CqaEngine eng(inst);
        UnionQuery q = plain(inst, "SELECT R.G FROM R, S WHERE R.B = S.K");
        CAPTURE(seed);
        REQUIRE(eng.consistent_answers(q) == oracle_consistent_answers(q, inst, 1'000'000));
    }
}

TEST_CASE("disjunctive consistent answers equal the oracle") {
    Instance inst = table1();
    CqaEngine eng(inst);
    UnionQuery q = plain(inst,
                         "SELECT CUSTOMER.CNAME FROM CUSTOMER "
                         "WHERE CUSTOMER.CITY = 'LA' OR CUSTOMER.CITY = 'SF'");
    auto got = eng.consistent_answers(q);
    REQUIRE(got == oracle_consistent_answers(q, inst, 100));
    REQUIRE(got == std::vector<std::vector<Value>>{{Value::text("Don")},
                                                   {Value::text("Jen")},
                                                   {Value::text("John")},
                                                   {Value::text("Mary")}});
}

// ---------------------------------------------------------------------------
// Randomized equivalence with the oracle: denial-constraint instances
// ---------------------------------------------------------------------------

TEST_CASE("random denial-constraint instances: engine equals oracle") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        Instance inst = random_dc_instance(seed);
        CqaEngine eng(inst);
        for (const std::string op : {"COUNT(*)", "SUM(T.X)", "MIN(T.Y)", "MAX(T.X)",
                                     "COUNT(DISTINCT T.X)", "SUM(DISTINCT T.Y)"}) {
            std::string sql = "SELECT " + std::string(op) + " FROM T";
            CAPTURE(seed, sql);
            AggQuery q = agg(inst, sql);
            REQUIRE(eng.scalar(q).range == oracle_range_scalar(q, inst, 1'000'000));
        }
        for (const std::string sql :
             {std::string("SELECT T.X, COUNT(*) FROM T GROUP BY T.X"),
              std::string("SELECT T.Y, MAX(T.X) FROM T GROUP BY T.Y")}) {
            CAPTURE(seed, sql);
            AggQuery gq = agg(inst, sql);
            std::vector<GroupRange> want = oracle_range_grouped(gq, inst, 1'000'000);
            order_and_truncate(gq, TopKOrder::Group, want);
            REQUIRE(eng.grouped(gq).groups == want);
        }
    }
}

// ---------------------------------------------------------------------------
// Consistent instances and the shortcut
// ---------------------------------------------------------------------------

TEST_CASE("consistent instances fold without any solver call") {
    Schema s = parse_schema("relation T ( X integer, key(X) );");
    Instance inst;
    inst.schema = s;
    for (int i = 1; i <= 3; ++i) inst.add_fact(0, {Value::integer(i)});

    CqaEngine eng(inst);
    REQUIRE(eng.instance_consistent());
    EngineResult r = eng.scalar(agg(inst, "SELECT COUNT(*) FROM T"));
    REQUIRE(r.range.glb == 3);
    REQUIRE(r.range.lub == 3);
    REQUIRE(r.stats.shortcut);
    REQUIRE(r.stats.sat_calls == 0);

    // Disabling the shortcut reaches the same interval through the solver.
    EngineConfig cfg;
    cfg.shortcut = false;
    CqaEngine eng2(inst, cfg);
    EngineResult r2 = eng2.scalar(agg(inst, "SELECT COUNT(*) FROM T"));
    REQUIRE(r2.range == r.range);
    REQUIRE_FALSE(r2.stats.shortcut);
    REQUIRE(r2.stats.sat_calls == 2);
}

TEST_CASE("encode_scalar exposes the reduction and its bookkeeping") {
    Instance inst = table1();
    CqaEngine eng(inst);

    EncodedScalar enc = eng.encode_scalar(agg(inst,
                                              "SELECT SUM(ACCOUNTS.BAL) FROM ACCOUNTS, CUSTACC "
                                              "WHERE CUSTACC.ACCID = ACCOUNTS.ACCID "
                                              "AND CUSTACC.CID = 'C2'"));
    REQUIRE(enc.base == 0);
    REQUIRE(enc.offset == 2200);  // the two positive balances 1000 + 1200
    REQUIRE(enc.formula.soft.size() == 3);  // two exclusions plus the -100 witness

    REQUIRE_THROWS_AS(eng.encode_scalar(agg(inst, "SELECT MIN(ACCOUNTS.BAL) FROM ACCOUNTS")),
                      UnsupportedError);
    REQUIRE_THROWS_AS(
        eng.encode_scalar(agg(
            inst, "SELECT ACCOUNTS.CITY, COUNT(*) FROM ACCOUNTS GROUP BY ACCOUNTS.CITY")),
        ValidationError);
}

// ---------------------------------------------------------------------------
// MIN/MAX scan behavior
// ---------------------------------------------------------------------------

TEST_CASE("the upper-bound scan walks values upward") {
    // Key group {1,2} from below: some repair keeps 20 but none avoids both 10
    // and 20, so Poss(MIN) tops out at 20.  A downward scan would stop at 30
    // because fact 3 is alone in its group and can never be excluded.
    Schema s = parse_schema("relation T ( K integer, A integer, key(K) );");
    Instance inst;
    inst.schema = s;
    inst.add_fact(0, {Value::integer(1), Value::integer(10)});
    inst.add_fact(0, {Value::integer(1), Value::integer(20)});
    inst.add_fact(0, {Value::integer(2), Value::integer(30)});

    for (bool binary : {false, true}) {
        EngineConfig cfg;
        cfg.binary_search = binary;
        CqaEngine eng(inst, cfg);
        CAPTURE(binary);
        EngineResult r = eng.scalar(agg(inst, "SELECT MIN(T.A) FROM T"));
        REQUIRE(r.range.glb == 10);
        REQUIRE(r.range.lub == 20);
        REQUIRE_FALSE(r.range.empty_possible);
        AggQuery mq = agg(inst, "SELECT MAX(T.A) FROM T");
        REQUIRE(eng.scalar(mq).range == oracle_range_scalar(mq, inst, 100));
    }

    // The linear scan stops at the first contradiction: probes for 10 and 20,
    // never 30.  Three distinct values, at most four calls by the contract.
    CqaEngine eng(inst);
    EngineResult r = eng.scalar(agg(inst, "SELECT MIN(T.A) FROM T"));
    REQUIRE(r.stats.sat_calls == 2);
}

TEST_CASE("scan call counts stay within one probe per distinct value") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        RandomInstanceConfig cfg;
        cfg.seed = seed;
        Instance inst = random_instance(cfg);
        CqaEngine eng(inst);
        AggQuery q = agg(inst, "SELECT MIN(R.A) FROM R, S WHERE R.B = S.K");

        std::set<std::int64_t> values;
        for (const auto& w : witness_bag(q, inst)) values.insert(w.value.num_at_scale(0));
        EngineResult r = eng.scalar(q);
        CAPTURE(seed, values.size(), r.stats.sat_calls);
        std::int64_t k = (std::int64_t)values.size();
        if (r.range.empty_possible)
            REQUIRE(r.stats.sat_calls <= 2 * k + 1);  // exhausted scan plus terminal probes
        else
            REQUIRE(r.stats.sat_calls <= k + 1);
    }
}

TEST_CASE("minimum over an empty relation") {
    Schema s = parse_schema("relation T ( X integer, key(X) );");
    Instance inst;
    inst.schema = s;
    CqaEngine eng(inst);
    AggQuery q = agg(inst, "SELECT MIN(T.X) FROM T");
    EngineResult r = eng.scalar(q);
    REQUIRE_FALSE(r.range.glb.has_value());
    REQUIRE_FALSE(r.range.lub.has_value());
    REQUIRE(r.range.empty_possible);
    REQUIRE(r.range == oracle_range_scalar(q, inst, 10));
}

// ---------------------------------------------------------------------------
// Grouped ordering, TOP-k, and parallelism
// ---------------------------------------------------------------------------

namespace {

Instance two_label_instance() {
    Schema s = parse_schema("relation U ( K integer, G text, key(K) );");
    Instance inst;
    inst.schema = s;
    inst.add_fact(0, {Value::integer(1), Value::text("aa")});
    inst.add_fact(0, {Value::integer(2), Value::text("zz")});
    inst.add_fact(0, {Value::integer(3), Value::text("zz")});
    return inst;
}

std::vector<std::string> keys_of(const GroupedResult& r) {
    std::vector<std::string> out;
    for (const auto& g : r.groups) out.push_back(g.key.at(0).str());
    return out;
}

}  // namespace

TEST_CASE("grouped ordering and TOP-k") {
    Instance inst = two_label_instance();  // aa -> [1,1], zz -> [2,2]

    SECTION("default order is by group key") {
        CqaEngine eng(inst);
        GroupedResult r = eng.grouped(agg(inst, "SELECT U.G, COUNT(*) FROM U GROUP BY U.G"));
        REQUIRE(keys_of(r) == std::vector<std::string>{"aa", "zz"});
        REQUIRE(r.groups[0].range.glb == 1);
        REQUIRE(r.groups[1].range.glb == 2);
    }

    SECTION("answer order ranks by lower bound, descending") {
        EngineConfig cfg;
        cfg.top_k_order = TopKOrder::Answer;
        CqaEngine eng(inst, cfg);
        GroupedResult r = eng.grouped(agg(inst, "SELECT U.G, COUNT(*) FROM U GROUP BY U.G"));
        REQUIRE(keys_of(r) == std::vector<std::string>{"zz", "aa"});
    }

    SECTION("TOP k truncates after ordering") {
        CqaEngine eng(inst);
        GroupedResult top_key =
            eng.grouped(agg(inst, "SELECT TOP 1 U.G, COUNT(*) FROM U GROUP BY U.G"));
        REQUIRE(keys_of(top_key) == std::vector<std::string>{"aa"});

        EngineConfig cfg;
        cfg.top_k_order = TopKOrder::Answer;
        CqaEngine eng2(inst, cfg);
        GroupedResult top_ans =
            eng2.grouped(agg(inst, "SELECT TOP 1 U.G, COUNT(*) FROM U GROUP BY U.G"));
        REQUIRE(keys_of(top_ans) == std::vector<std::string>{"zz"});
        REQUIRE(top_ans.per_group.size() == 1);
    }

    SECTION("an explicit ORDER BY overrides the answer ranking") {
        EngineConfig cfg;
        cfg.top_k_order = TopKOrder::Answer;
        CqaEngine eng(inst, cfg);
        GroupedResult r =
            eng.grouped(agg(inst, "SELECT U.G, COUNT(*) FROM U GROUP BY U.G ORDER BY U.G ASC"));
        REQUIRE(keys_of(r) == std::vector<std::string>{"aa", "zz"});
    }
}

TEST_CASE("grouped ordering on the bank fixture") {
    Instance inst = table1();
    CqaEngine eng(inst);
    GroupedResult r = eng.grouped(agg(inst,
                                      "SELECT ACCOUNTS.CITY, COUNT(*) FROM ACCOUNTS "
                                      "GROUP BY ACCOUNTS.CITY ORDER BY ACCOUNTS.CITY DESC"));
    REQUIRE(keys_of(r) == std::vector<std::string>{"SJ", "LA"});

    GroupedResult top = eng.grouped(agg(inst,
                                        "SELECT TOP 1 ACCOUNTS.CITY, COUNT(*) FROM ACCOUNTS "
                                        "GROUP BY ACCOUNTS.CITY ORDER BY ACCOUNTS.CITY DESC"));
    REQUIRE(keys_of(top) == std::vector<std::string>{"SJ"});
    REQUIRE(top.groups[0].range.glb == 1);
    REQUIRE(top.groups[0].range.lub == 2);
}

TEST_CASE("parallel grouping returns the sequential answer") {
    Instance inst = table1();
    AggQuery q = agg(inst,
                     "SELECT CUSTOMER.CITY, COUNT(*) FROM CUSTOMER GROUP BY CUSTOMER.CITY");
    CqaEngine seq(inst);
    EngineConfig cfg;
    cfg.jobs = 4;
    CqaEngine par(inst, cfg);
    REQUIRE(par.grouped(q).groups == seq.grouped(q).groups);
}

// ---------------------------------------------------------------------------
// Formula dumps
// ---------------------------------------------------------------------------

TEST_CASE("wcnf dumps land in the requested directory") {
    Instance inst = table1();
    std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "cqa_wcnf_dump_test";
    std::filesystem::remove_all(dir);

    EngineConfig cfg;
    cfg.wcnf_dir = dir.string();
    CqaEngine eng(inst, cfg);
    eng.scalar(agg(inst,
                   "SELECT SUM(ACCOUNTS.BAL) FROM ACCOUNTS, CUSTACC "
                   "WHERE CUSTACC.ACCID = ACCOUNTS.ACCID AND CUSTACC.CID = 'C2'"));

    for (const char* name : {"scalar_glb.wcnf", "scalar_lub.wcnf"}) {
        std::ifstream in(dir / name);
        REQUIRE(in.good());
        std::string first;
        std::getline(in, first);
        CAPTURE(name, first);
        REQUIRE(first.rfind("p wcnf ", 0) == 0);
    }

    EngineConfig cfg2 = cfg;
    cfg2.wcnf_format = WcnfFormat::New;
    CqaEngine eng2(inst, cfg2);
    eng2.scalar(agg(inst,
                    "SELECT SUM(ACCOUNTS.BAL) FROM ACCOUNTS, CUSTACC "
                    "WHERE CUSTACC.ACCID = ACCOUNTS.ACCID AND CUSTACC.CID = 'C2'"));
    std::ifstream in(dir / "scalar_glb.wcnf");
    std::string first;
    std::getline(in, first);
    REQUIRE(first.rfind("h ", 0) == 0);
    std::filesystem::remove_all(dir);
}

// ---------------------------------------------------------------------------
// Maximum cut
// ---------------------------------------------------------------------------

namespace {

int brute_maxcut(const Graph& g) {
    int best = 0;
    for (int mask = 0; mask < (1 << g.vertices); ++mask) {
        int cut = 0;
        for (auto [u, v] : g.edges)
            if (((mask >> (u - 1)) & 1) != ((mask >> (v - 1)) & 1)) ++cut;
        best = std::max(best, cut);
    }
    return best;
}

}  // namespace

TEST_CASE("the cut construction's upper bound is the maximum cut") {
    for (const std::string text : {
             "p 3 3\n1 2\n1 3\n2 3\n",        // triangle: max cut 2
             "p 4 3\n1 2\n2 3\n3 4\n",        // path: bipartite, max cut 3
             "p 4 6\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n",  // K4: max cut 4
             "p 2 1\n1 2\n",                  // single edge
         }) {
        Graph g = parse_graph(text);
        Instance inst = maxcut_instance(g);
        AggQuery q = agg(inst, maxcut_query());
        CqaEngine eng(inst);
        EngineResult r = eng.scalar(q);
        CAPTURE(text);
        REQUIRE(r.range.lub == brute_maxcut(g));
        REQUIRE(r.range == oracle_range_scalar(q, inst, 1'000'000));
    }
}

TEST_CASE("graph parsing rejects malformed input") {
    REQUIRE_THROWS_AS(parse_graph("q 3 1\n1 2\n"), ParseError);
    REQUIRE_THROWS_AS(parse_graph("p 3 2\n1 2\n"), ParseError);
    REQUIRE_THROWS_AS(parse_graph("p 3 1\n1 1\n"), ParseError);
    REQUIRE_THROWS_AS(parse_graph("p 3 1\n1 4\n"), ParseError);
}

// ---------------------------------------------------------------------------
// Determinism
// ---------------------------------------------------------------------------

TEST_CASE("repeated solves are bit-for-bit identical") {
    Instance inst = table1();
    CqaEngine eng(inst);
    AggQuery q = agg(inst,
                     "SELECT SUM(ACCOUNTS.BAL) FROM ACCOUNTS, CUSTACC "
                     "WHERE CUSTACC.ACCID = ACCOUNTS.ACCID AND CUSTACC.CID = 'C2'");
    EngineResult a = eng.scalar(q);
    EngineResult b = eng.scalar(q);
    REQUIRE(a.range == b.range);
    REQUIRE(a.stats.vars == b.stats.vars);
    REQUIRE(a.stats.clauses == b.stats.clauses);
    REQUIRE(a.stats.soft == b.stats.soft);
    REQUIRE(a.stats.sat_calls == b.stats.sat_calls);
}
