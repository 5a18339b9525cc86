#pragma once

// Test-data generation: a consistent two-relation base, controlled key
// inconsistency injection, seeded random instances (key-only and
// denial-constraint flavors), and the graph construction whose SUM upper
// bound equals a maximum cut.
//
// All generators draw from a seeded mt19937_64 through plain modulo, so the
// produced instances are identical across standard libraries and platforms.

#include <random>
#include <set>
#include <sstream>

#include "instance.hpp"
#include "schema_parse.hpp"

namespace cqa {

struct GeneratorConfig {
    std::int64_t size = 1000;     // facts per relation of the consistent base
    int inconsistency_pct = 10;   // share of base facts drawn into key violations
    int group_min = 2;            // key-equal group size bounds for injected groups
    int group_max = 7;
    std::uint64_t seed = 1;

    void validate() const {
        if (size < 1) throw ValidationError("generator size must be positive");
        if (inconsistency_pct < 0 || inconsistency_pct > 100)
            throw ValidationError("inconsistency percentage must lie in [0, 100]");
        if (group_min < 2 || group_max < group_min)
            throw ValidationError("group size bounds need 2 <= min <= max");
    }
};

namespace gendetail {

inline std::int64_t pick(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    return lo + (std::int64_t)(rng() % (std::uint64_t)(hi - lo + 1));
}

inline RelationDef make_relation(std::string name, std::vector<AttributeDef> attrs,
                                 std::vector<int> key) {
    RelationDef r;
    r.name = std::move(name);
    r.attrs = std::move(attrs);
    r.key = std::move(key);
    return r;
}

}  // namespace gendetail

// ---------------------------------------------------------------------------
// Synthetic base: R1(K1, J, V) joining R2(K2, C) via J = K2
// ---------------------------------------------------------------------------

inline Schema synthetic_schema() {
    Schema s;
    s.relations.push_back(gendetail::make_relation(
        "R1",
        {{"K1", AttrType::Integer, 0}, {"J", AttrType::Integer, 0}, {"V", AttrType::Integer, 0}},
        {0}));
    s.relations.push_back(gendetail::make_relation(
        "R2", {{"K2", AttrType::Integer, 0}, {"C", AttrType::Integer, 0}}, {0}));
    s.validate();
    return s;
}

// A consistent instance of synthetic_schema with `size` facts per relation.
inline Instance synthetic_instance(const GeneratorConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    Instance inst;
    inst.schema = synthetic_schema();
    for (std::int64_t i = 1; i <= cfg.size; ++i)
        inst.add_fact(0, {Value::integer(i), Value::integer(gendetail::pick(rng, 1, cfg.size)),
                          Value::integer(gendetail::pick(rng, 1, 100))});
    for (std::int64_t i = 1; i <= cfg.size; ++i)
        inst.add_fact(1, {Value::integer(i), Value::integer(gendetail::pick(rng, 0, 9))});
    return inst;
}

// The benchmark query over the synthetic base: a two-relation join SUM with
// moderate selectivity.
inline std::string synthetic_query() {
    return "SELECT SUM(R1.V) FROM R1, R2 WHERE R1.J = R2.K2 AND R2.C < 5";
}

// ---------------------------------------------------------------------------
// Inconsistency injection
// ---------------------------------------------------------------------------

// Duplicates the keys of randomly chosen facts into fresh tuples until the
// requested share of the original facts sits in multi-fact key-equal groups.
// Non-key values are perturbed (counter-suffixed text, counter-shifted
// numerics) so duplicates are genuinely distinct; every repair of the result
// keeps exactly the original instance's cardinality.
inline Instance inject_inconsistency(const Instance& in, const GeneratorConfig& cfg) {
    cfg.validate();
    if (in.schema.has_dcs())
        throw ValidationError("inconsistency injection expects a key-only schema");
    Instance out;
    out.schema = in.schema;
    for (const Fact& f : in.facts) out.add_fact(f.relation, f.values);
    if (cfg.inconsistency_pct == 0) return out;

    std::vector<FactId> remaining;  // originals eligible to seed a group
    for (const Fact& f : in.facts)
        if (in.schema.relation(f.relation).has_key()) remaining.push_back(f.id);

    const std::int64_t total = (std::int64_t)in.facts.size();
    const std::int64_t target = (total * cfg.inconsistency_pct + 99) / 100;
    std::mt19937_64 rng(cfg.seed);
    std::int64_t violating = 0;
    std::int64_t counter = 0;  // keeps perturbed values distinct within a group

    while (violating < target) {
        if (remaining.empty())
            throw ValidationError("requested inconsistency percentage is infeasible: "
                                  "no keyed facts left to duplicate");
        std::size_t at = (std::size_t)gendetail::pick(rng, 0, (std::int64_t)remaining.size() - 1);
        FactId seed_fact = remaining[at];
        remaining[at] = remaining.back();
        remaining.pop_back();

        const Fact& f = out.fact(seed_fact);
        const RelationDef& rel = out.schema.relation(f.relation);
        std::int64_t group = gendetail::pick(rng, cfg.group_min, cfg.group_max);
        const int relation = f.relation;
        const std::vector<Value> base = f.values;  // add_fact may reallocate
        for (std::int64_t d = 1; d < group; ++d) {
            ++counter;
            std::vector<Value> vals = base;
            for (std::size_t a = 0; a < vals.size(); ++a) {
                bool is_key = std::find(rel.key.begin(), rel.key.end(), (int)a) != rel.key.end();
                if (is_key) continue;
                const AttributeDef& attr = rel.attrs[a];
                if (attr.type == AttrType::Text)
                    vals[a] = Value::text(vals[a].str() + "~" + std::to_string(counter));
                else
                    vals[a] = Value::decimal(
                        checked_add(vals[a].num_at_scale(attr.scale), counter, "perturbation"),
                        attr.scale);
            }
            out.add_fact(relation, std::move(vals));
        }
        violating += group;  // the original plus its duplicates now conflict
    }
    return out;
}

// ---------------------------------------------------------------------------
// Seeded random instances for verification
// ---------------------------------------------------------------------------

// Key-only shape: R(K, G, A, B) with key K and grouping label G, joined to
// S(K, H) through R.B = S.K.  Sizes stay within brute-force oracle reach.
struct RandomInstanceConfig {
    std::uint64_t seed = 1;
    int r_groups = 8;  // key-equal groups in R
    int group_min = 1, group_max = 3;
    int s_groups = 3;  // key-equal groups in S
    int s_group_max = 2;
    int value_lo = -3, value_hi = 6;
    int labels = 2;  // distinct G values
};

inline Instance random_instance(const RandomInstanceConfig& c) {
    Schema s;
    s.relations.push_back(gendetail::make_relation("R",
                                                   {{"K", AttrType::Integer, 0},
                                                    {"G", AttrType::Text, 0},
                                                    {"A", AttrType::Integer, 0},
                                                    {"B", AttrType::Integer, 0}},
                                                   {0}));
    s.relations.push_back(gendetail::make_relation(
        "S", {{"K", AttrType::Integer, 0}, {"H", AttrType::Integer, 0}}, {0}));
    s.validate();
    Instance inst;
    inst.schema = std::move(s);
    std::mt19937_64 rng(c.seed);
    for (int g = 1; g <= c.r_groups; ++g) {
        std::int64_t size = gendetail::pick(rng, c.group_min, c.group_max);
        for (std::int64_t m = 0; m < size; ++m)
            inst.add_fact(0, {Value::integer(g),
                              Value::text("g" + std::to_string(gendetail::pick(rng, 0, c.labels - 1))),
                              Value::integer(gendetail::pick(rng, c.value_lo, c.value_hi)),
                              Value::integer(gendetail::pick(rng, 1, c.s_groups))});
    }
    for (int g = 1; g <= c.s_groups; ++g) {
        std::int64_t size = gendetail::pick(rng, 1, c.s_group_max);
        for (std::int64_t m = 0; m < size; ++m)
            inst.add_fact(1, {Value::integer(g),
                              Value::integer(gendetail::pick(rng, c.value_lo, c.value_hi))});
    }
    return inst;
}

// Denial-constraint shape: keyless T(X, Y) over a small domain plus one or
// two constraints drawn from a fixed template pool.
inline Instance random_dc_instance(std::uint64_t seed) {
    Schema s;
    s.relations.push_back(gendetail::make_relation(
        "T", {{"X", AttrType::Integer, 0}, {"Y", AttrType::Integer, 0}}, {}));

    std::mt19937_64 rng(seed);
    auto make_dc = [&](int shape) {
        DenialConstraint dc;
        const int t = 0;  // T's relation index
        switch (shape) {
            case 0:  // no two tuples share X with increasing Y (key-like)
                dc.atom_relations = {t, t};
                dc.atom_names = {"t1", "t2"};
                dc.comparisons = {{CmpOp::Eq, DcTerm::column(0, 0), DcTerm::column(1, 0)},
                                  {CmpOp::Lt, DcTerm::column(0, 1), DcTerm::column(1, 1)}};
                break;
            case 1:  // X capped by a constant
                dc.atom_relations = {t};
                dc.atom_names = {"t1"};
                dc.comparisons = {
                    {CmpOp::Gt, DcTerm::column(0, 0), DcTerm::lit(Value::integer(2))}};
                break;
            case 2:  // no diagonal tuples
                dc.atom_relations = {t};
                dc.atom_names = {"t1"};
                dc.comparisons = {{CmpOp::Eq, DcTerm::column(0, 0), DcTerm::column(0, 1)}};
                break;
            default:  // no chain from Y into a larger X
                dc.atom_relations = {t, t};
                dc.atom_names = {"t1", "t2"};
                dc.comparisons = {{CmpOp::Eq, DcTerm::column(0, 1), DcTerm::column(1, 0)},
                                  {CmpOp::Lt, DcTerm::column(0, 0), DcTerm::column(1, 1)}};
                break;
        }
        dc.text = dc_source(s, dc);
        return dc;
    };

    int first = (int)gendetail::pick(rng, 0, 3);
    s.dcs.push_back(make_dc(first));
    if (gendetail::pick(rng, 0, 1) == 1) {
        int second = (int)gendetail::pick(rng, 0, 3);
        if (second == first) second = (second + 1) % 4;
        s.dcs.push_back(make_dc(second));
    }
    s.validate();

    Instance inst;
    inst.schema = std::move(s);
    std::int64_t rows = gendetail::pick(rng, 4, 12);
    std::set<std::pair<std::int64_t, std::int64_t>> seen;  // relations are sets
    for (std::int64_t i = 0; i < rows; ++i) {
        std::int64_t x = gendetail::pick(rng, 0, 4), y = gendetail::pick(rng, 0, 4);
        if (!seen.insert({x, y}).second) continue;
        inst.add_fact(0, {Value::integer(x), Value::integer(y)});
    }
    if (inst.fact_count() == 0) inst.add_fact(0, {Value::integer(0), Value::integer(1)});
    return inst;
}

// ---------------------------------------------------------------------------
// Maximum-cut construction
// ---------------------------------------------------------------------------

struct Graph {
    int vertices = 0;
    std::vector<std::pair<int, int>> edges;  // 1-based endpoints
};

// Format: first line "p <vertices> <edges>", then one "u v" line per edge.
inline Graph parse_graph(const std::string& text) {
    std::istringstream is(text);
    std::string tag;
    Graph g;
    if (!(is >> tag) || tag != "p")
        throw ParseError("graph file must start with a 'p <vertices> <edges>' line");
    std::int64_t m = 0;
    if (!(is >> g.vertices >> m) || g.vertices < 1)
        throw ParseError("graph header needs a positive vertex count and an edge count");
    for (std::int64_t i = 0; i < m; ++i) {
        int u = 0, v = 0;
        if (!(is >> u >> v)) throw ParseError("graph file ends before all edges are listed");
        if (u < 1 || u > g.vertices || v < 1 || v > g.vertices || u == v)
            throw ParseError("edge " + std::to_string(u) + " " + std::to_string(v) +
                             " is not a simple edge over the declared vertices");
        g.edges.push_back({u, v});
    }
    return g;
}

// The coloring instance: choosing 'red' in R1 and 'blue' in R2 partitions the
// vertices; each edge contributes weight-1 tuples in both orientations and
// each vertex a penalty tuple of weight m = -|E| - 1, so the best repairs
// avoid every penalty and the SUM's upper bound is the maximum cut size.
inline Instance maxcut_instance(const Graph& g) {
    Schema s;
    s.relations.push_back(gendetail::make_relation(
        "R1", {{"A1", AttrType::Integer, 0}, {"B1", AttrType::Text, 0}}, {0}));
    s.relations.push_back(gendetail::make_relation(
        "R2", {{"A2", AttrType::Integer, 0}, {"B2", AttrType::Text, 0}}, {0}));
    s.relations.push_back(gendetail::make_relation("R3",
                                                   {{"A1", AttrType::Integer, 0},
                                                    {"B1", AttrType::Text, 0},
                                                    {"A2", AttrType::Integer, 0},
                                                    {"B2", AttrType::Text, 0},
                                                    {"C", AttrType::Integer, 0}},
                                                   {0, 1, 2, 3, 4}));
    s.validate();
    Instance inst;
    inst.schema = std::move(s);
    const Value red = Value::text("red"), blue = Value::text("blue");
    const std::int64_t m = -(std::int64_t)g.edges.size() - 1;
    for (int v = 1; v <= g.vertices; ++v) {
        inst.add_fact(0, {Value::integer(v), red});
        inst.add_fact(0, {Value::integer(v), blue});
        inst.add_fact(1, {Value::integer(v), red});
        inst.add_fact(1, {Value::integer(v), blue});
    }
    for (int v = 1; v <= g.vertices; ++v)
        inst.add_fact(2, {Value::integer(v), red, Value::integer(v), blue, Value::integer(m)});
    for (auto [u, v] : g.edges) {
        inst.add_fact(2, {Value::integer(u), red, Value::integer(v), blue, Value::integer(1)});
        inst.add_fact(2, {Value::integer(v), red, Value::integer(u), blue, Value::integer(1)});
    }
    return inst;
}

inline std::string maxcut_query() {
    return "SELECT SUM(R3.C) FROM R1, R2, R3 "
           "WHERE R1.A1 = R3.A1 AND R2.A2 = R3.A2 "
           "AND R1.B1 = 'red' AND R3.B1 = 'red' AND R2.B2 = 'blue' AND R3.B2 = 'blue'";
}

}  // namespace cqa
