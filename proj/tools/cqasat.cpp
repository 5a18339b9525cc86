// cqasat: range consistent answers for aggregation queries over relational
// data that violates its integrity constraints.
//
// Subcommands:
//   query     SAT-backed glb/lub pipeline (the real thing)
//   oracle    brute-force repair enumeration (ground truth at small scale)
//   verify    run both paths and compare, or sweep seeded random instances
//   generate  write synthetic instances (key violations or max-cut graphs)
//   bench     inconsistency sweep, CSV on stdout
//   encode    dump the WCNF reduction of a COUNT/SUM query
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error or unsupported
// query feature.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cqa/engine.hpp"
#include "cqa/generate.hpp"
#include "cqa/instance_io.hpp"
#include "cqa/oracle.hpp"
#include "cqa/report.hpp"
#include "cqa/sql_parser.hpp"

namespace {

// Command-line misuse that CLI11's own validation cannot express.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputOpts {
    std::string schema;
    std::string data;
    std::string query;
    std::string query_file;
};

struct EngineOpts {
    std::string solver;        // external command prefix; empty = internal
    std::string wcnf_out;      // dump directory
    std::string wcnf_format = "classic";
    std::string top_k_order = "group";
    bool no_shortcut = false;
    bool binary_search = false;
    int jobs = 1;
};

void add_input_opts(CLI::App* cmd, InputOpts& in) {
    cmd->add_option("--schema", in.schema, "Schema definition file")->required();
    cmd->add_option("--data", in.data, "Directory holding one CSV per relation")->required();
    cmd->add_option("--query", in.query, "Query text");
    cmd->add_option("--query-file", in.query_file, "File holding the query text");
}

void add_engine_opts(CLI::App* cmd, EngineOpts& eng, bool with_wcnf = true) {
    cmd->add_option("--solver", eng.solver,
                    "External MaxSAT solver command (reads a WCNF path argument); "
                    "default: built-in solver")
        ->envname("CQASAT_SOLVER");
    if (with_wcnf) {
        cmd->add_option("--wcnf-out", eng.wcnf_out, "Dump every solved formula into this directory");
        cmd->add_option("--wcnf-format", eng.wcnf_format, "WCNF dialect: classic or new")
            ->check(CLI::IsMember({"classic", "new"}));
    }
    cmd->add_flag("--no-shortcut", eng.no_shortcut,
                  "Always solve, even when the consistent part already decides the answer");
    cmd->add_flag("--binary-search", eng.binary_search,
                  "Binary instead of linear search in the MIN/MAX value scan");
    cmd->add_option("--top-k-order", eng.top_k_order,
                    "TOP-k tie order when the query has no ORDER BY: group | answer")
        ->check(CLI::IsMember({"group", "answer"}));
    cmd->add_option("--jobs", eng.jobs, "Worker threads for per-group solving")
        ->check(CLI::Range(1, 256));
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw cqa::IoError("cannot open '" + path + "'");
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
        s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && (s[i] == '\n' || s[i] == '\r' || s[i] == ' ' || s[i] == '\t')) ++i;
    return s.substr(i);
}

std::string query_text(const InputOpts& in) {
    if (!in.query.empty() && !in.query_file.empty())
        throw UsageError("--query and --query-file are mutually exclusive");
    if (!in.query.empty()) return in.query;
    if (!in.query_file.empty()) return trim(read_file(in.query_file));
    throw UsageError("one of --query / --query-file is required");
}

cqa::EngineConfig engine_config(const EngineOpts& o) {
    cqa::EngineConfig cfg;
    cfg.solver.external = o.solver;
    cfg.solver.format = cqa::wcnf_format_of(o.wcnf_format);
    cfg.shortcut = !o.no_shortcut;
    cfg.binary_search = o.binary_search;
    cfg.jobs = o.jobs;
    cfg.top_k_order = o.top_k_order == "answer" ? cqa::TopKOrder::Answer : cqa::TopKOrder::Group;
    if (!o.wcnf_out.empty()) {
        std::filesystem::create_directories(o.wcnf_out);
        cfg.wcnf_dir = o.wcnf_out;
        cfg.wcnf_format = cqa::wcnf_format_of(o.wcnf_format);
    }
    return cfg;
}

std::string backend_name(const cqa::EngineConfig& cfg) {
    return cfg.solver.external.empty() ? "internal" : "external: " + cfg.solver.external;
}

cqa::AttrType output_type(const cqa::Statement& stmt, std::size_t col, const cqa::Value& v) {
    if (col < stmt.output_types.size()) return stmt.output_types[col];
    return v.is_text() ? cqa::AttrType::Text : cqa::AttrType::Integer;
}

void emit_report(const cqa::RunReport& rep, bool json) {
    if (json)
        std::cout << cqa::report_json(rep).dump(2) << "\n";
    else
        std::cout << cqa::report_table(rep);
}

// Consistent answers of a non-aggregate query: every repair returns each of
// these rows.
void emit_rows(const std::string& text, const std::string& backend, const cqa::Statement& stmt,
               const std::vector<std::vector<cqa::Value>>& rows, const cqa::SolveStats& st,
               bool json) {
    if (json) {
        nlohmann::ordered_json j;
        j["query"] = text;
        j["backend"] = backend;
        j["columns"] = stmt.output_names;
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& row : rows) {
            nlohmann::ordered_json jr = nlohmann::ordered_json::array();
            for (std::size_t c = 0; c < row.size(); ++c)
                jr.push_back(cqa::reportdetail::key_value_json(row[c], output_type(stmt, c, row[c])));
            arr.push_back(std::move(jr));
        }
        j["rows"] = std::move(arr);
        j["stats"] = cqa::reportdetail::stats_json(st);
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::vector<std::string> header = stmt.output_names;
    std::vector<std::vector<std::string>> cells;
    cells.reserve(rows.size());
    for (const auto& row : rows) {
        std::vector<std::string> line;
        line.reserve(row.size());
        for (std::size_t c = 0; c < row.size(); ++c)
            line.push_back(cqa::format_typed_value(row[c], output_type(stmt, c, row[c])));
        if (header.size() < line.size()) header.resize(line.size(), "?");
        cells.push_back(std::move(line));
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& line : cells)
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
    auto put = [&](const std::vector<std::string>& line) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            std::cout << line[c];
            if (c + 1 < line.size()) std::cout << std::string(width[c] - line[c].size() + 2, ' ');
        }
        std::cout << "\n";
    };
    put(header);
    for (const auto& line : cells) put(line);
    std::cout << "(" << cells.size() << (cells.size() == 1 ? " row" : " rows")
              << " in every repair)\n";
    std::cout << cqa::reportdetail::stats_text(st) << "\n";
}

// ---------------------------------------------------------------------------
// query / oracle
// ---------------------------------------------------------------------------

int cmd_query(const InputOpts& in, const EngineOpts& engo, bool json) {
    cqa::Schema schema = cqa::load_schema(in.schema);
    cqa::Instance inst = cqa::load_instance(schema, in.data);
    std::string text = query_text(in);
    cqa::Statement stmt = cqa::parse_query(text, schema);
    cqa::EngineConfig cfg = engine_config(engo);
    cqa::CqaEngine eng(inst, cfg);
    if (stmt.is_aggregate) {
        if (stmt.agg.grouped()) {
            cqa::GroupedResult g = eng.grouped(stmt.agg);
            emit_report(cqa::make_report(text, backend_name(cfg), stmt.agg, g), json);
        } else {
            cqa::EngineResult r = eng.scalar(stmt.agg);
            emit_report(cqa::make_report(text, backend_name(cfg), r), json);
        }
    } else {
        cqa::SolveStats st;
        auto rows = eng.consistent_answers(stmt.ucq, &st);
        emit_rows(text, backend_name(cfg), stmt, rows, st, json);
    }
    return 0;
}

int cmd_oracle(const InputOpts& in, std::int64_t limit, const std::string& top_k_order,
               bool json) {
    cqa::Schema schema = cqa::load_schema(in.schema);
    cqa::Instance inst = cqa::load_instance(schema, in.data);
    std::string text = query_text(in);
    cqa::Statement stmt = cqa::parse_query(text, schema);
    cqa::TopKOrder ord =
        top_k_order == "answer" ? cqa::TopKOrder::Answer : cqa::TopKOrder::Group;
    if (stmt.is_aggregate) {
        if (stmt.agg.grouped()) {
            std::vector<cqa::GroupRange> groups = cqa::oracle_range_grouped(stmt.agg, inst, limit);
            cqa::order_and_truncate(stmt.agg, ord, groups);
            emit_report(cqa::make_oracle_report(text, stmt.agg, std::move(groups)), json);
        } else {
            emit_report(cqa::make_oracle_report(text, cqa::oracle_range_scalar(stmt.agg, inst, limit)),
                        json);
        }
    } else {
        auto rows = cqa::oracle_consistent_answers(stmt.ucq, inst, limit);
        emit_rows(text, "oracle", stmt, rows, cqa::SolveStats{}, json);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

std::string key_str(const std::vector<cqa::Value>& key, const std::vector<cqa::AttrType>& types) {
    if (key.empty()) return "()";
    std::string out;
    for (std::size_t i = 0; i < key.size(); ++i) {
        if (i) out += ", ";
        cqa::AttrType t = i < types.size()
                              ? types[i]
                              : (key[i].is_text() ? cqa::AttrType::Text : cqa::AttrType::Integer);
        out += cqa::format_typed_value(key[i], t);
    }
    return out;
}

// Compares the SAT pipeline against the brute-force oracle on one parsed
// query.  Returns true when both agree; prints the first difference.
bool verify_statement(const cqa::Instance& inst, const cqa::Statement& stmt,
                      const std::string& text, const cqa::EngineConfig& cfg, std::int64_t limit) {
    cqa::CqaEngine eng(inst, cfg);
    auto complain = [&](const std::string& what) {
        std::cout << "verify: FAIL\n  query: " << text << "\n  " << what << "\n";
        return false;
    };
    auto range_str = [](const cqa::RangeAnswer& r) { return cqa::reportdetail::range_text(r); };
    if (stmt.is_aggregate && stmt.agg.grouped()) {
        cqa::GroupedResult got = eng.grouped(stmt.agg);
        std::vector<cqa::GroupRange> want = cqa::oracle_range_grouped(stmt.agg, inst, limit);
        cqa::order_and_truncate(stmt.agg, cfg.top_k_order, want);
        if (got.groups.size() != want.size())
            return complain("pipeline reports " + std::to_string(got.groups.size()) +
                            " groups, oracle " + std::to_string(want.size()));
        for (std::size_t i = 0; i < want.size(); ++i) {
            if (got.groups[i].key != want[i].key)
                return complain("group #" + std::to_string(i) + " key: pipeline " +
                                key_str(got.groups[i].key, stmt.agg.group_types) + ", oracle " +
                                key_str(want[i].key, stmt.agg.group_types));
            if (!(got.groups[i].range == want[i].range))
                return complain("group " + key_str(want[i].key, stmt.agg.group_types) +
                                ": pipeline " + range_str(got.groups[i].range) + ", oracle " +
                                range_str(want[i].range));
        }
        return true;
    }
    if (stmt.is_aggregate) {
        cqa::EngineResult got = eng.scalar(stmt.agg);
        cqa::RangeAnswer want = cqa::oracle_range_scalar(stmt.agg, inst, limit);
        if (!(got.range == want))
            return complain("pipeline " + range_str(got.range) + ", oracle " + range_str(want));
        return true;
    }
    auto got = eng.consistent_answers(stmt.ucq);
    auto want = cqa::oracle_consistent_answers(stmt.ucq, inst, limit);
    if (!(got == want))
        return complain("pipeline reports " + std::to_string(got.size()) +
                        " consistent rows, oracle " + std::to_string(want.size()) +
                        (got.size() == want.size() ? " (same count, different rows)" : ""));
    return true;
}

// Fixed query battery for seeded sweeps: every operator, scalar and grouped.
std::vector<std::string> verify_battery() {
    std::vector<std::string> ops = {"COUNT(*)",           "COUNT(R.A)",        "SUM(R.A)",
                                    "MIN(R.A)",           "MAX(R.A)",          "COUNT(DISTINCT R.A)",
                                    "SUM(DISTINCT R.A)"};
    std::vector<std::string> out;
    for (const std::string& op : ops) {
        out.push_back("SELECT " + op + " FROM R, S WHERE R.B = S.K");
        out.push_back("SELECT R.G, " + op + " FROM R, S WHERE R.B = S.K GROUP BY R.G");
    }
    return out;
}

int cmd_verify(const InputOpts& in, const EngineOpts& engo, std::int64_t limit,
               std::optional<std::uint64_t> seed, int trials) {
    cqa::EngineConfig cfg = engine_config(engo);
    int checks = 0;
    if (seed) {
        for (int t = 0; t < trials; ++t) {
            cqa::RandomInstanceConfig rc;
            rc.seed = *seed + (std::uint64_t)t;
            cqa::Instance inst = cqa::random_instance(rc);
            for (const std::string& text : verify_battery()) {
                cqa::Statement stmt = cqa::parse_query(text, inst.schema);
                if (!verify_statement(inst, stmt, text, cfg, limit)) {
                    std::cout << "  seed: " << rc.seed << "\n";
                    return 1;
                }
                ++checks;
            }
        }
        std::cout << "verify: PASS (" << checks << " checks, " << trials << " seeded instances)\n";
        return 0;
    }
    if (in.schema.empty() || in.data.empty())
        throw UsageError("verify needs either --schema/--data/--query or --seed");
    cqa::Schema schema = cqa::load_schema(in.schema);
    cqa::Instance inst = cqa::load_instance(schema, in.data);
    std::string text = query_text(in);
    cqa::Statement stmt = cqa::parse_query(text, schema);
    if (!verify_statement(inst, stmt, text, cfg, limit)) return 1;
    std::cout << "verify: PASS (1 check)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

int cmd_generate(const std::string& out_dir, const std::string& graph_file,
                 const cqa::GeneratorConfig& gc) {
    cqa::Instance inst;
    std::string query;
    if (!graph_file.empty()) {
        cqa::Graph g = cqa::parse_graph(read_file(graph_file));
        inst = cqa::maxcut_instance(g);
        query = cqa::maxcut_query();
    } else {
        inst = cqa::synthetic_instance(gc);
        inst = cqa::inject_inconsistency(inst, gc);
        query = cqa::synthetic_query();
    }
    cqa::write_instance(inst, out_dir);
    {
        std::ofstream qf(std::filesystem::path(out_dir) / "query.sql");
        qf << query << "\n";
    }
    auto minimal = cqa::minimal_violations(inst);
    std::cout << "wrote " << inst.fact_count() << " facts, " << minimal.size()
              << " minimal violations to " << out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

int cmd_bench(const std::vector<std::int64_t>& sizes, std::uint64_t seed, int from, int to,
              int step, const EngineOpts& engo) {
    if (step <= 0) throw UsageError("--step must be positive");
    if (from > to) throw UsageError("--from must not exceed --to");
    cqa::EngineConfig cfg = engine_config(engo);
    std::cout << "size,inconsistency_pct,facts,vars,clauses,soft,sat_calls,encode_ms,solve_ms,"
                 "glb,lub\n";
    for (std::int64_t size : sizes) {
        for (int pct = from; pct <= to; pct += step) {
            cqa::GeneratorConfig gc;
            gc.size = size;
            gc.inconsistency_pct = pct;
            gc.seed = seed;
            cqa::Instance inst = cqa::synthetic_instance(gc);
            inst = cqa::inject_inconsistency(inst, gc);
            cqa::Statement stmt = cqa::parse_query(cqa::synthetic_query(), inst.schema);
            cqa::CqaEngine eng(inst, cfg);
            cqa::EngineResult r = eng.scalar(stmt.agg);
            std::cout << size << ',' << pct << ',' << inst.fact_count() << ',' << r.stats.vars
                      << ',' << r.stats.clauses << ',' << r.stats.soft << ',' << r.stats.sat_calls
                      << ',' << r.stats.encode_ms << ',' << r.stats.solve_ms << ','
                      << (r.range.glb ? std::to_string(*r.range.glb) : std::string("none")) << ','
                      << (r.range.lub ? std::to_string(*r.range.lub) : std::string("none"))
                      << "\n";
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// encode
// ---------------------------------------------------------------------------

int cmd_encode(const InputOpts& in, const std::string& out_path, const std::string& format) {
    cqa::Schema schema = cqa::load_schema(in.schema);
    cqa::Instance inst = cqa::load_instance(schema, in.data);
    std::string text = query_text(in);
    cqa::Statement stmt = cqa::parse_query(text, schema);
    if (!stmt.is_aggregate)
        throw cqa::UnsupportedError("plain SELECT queries have no single-formula reduction");
    cqa::CqaEngine eng(inst);
    cqa::EncodedScalar es = eng.encode_scalar(stmt.agg);  // rejects MIN/MAX
    cqa::WcnfFormat fmt = cqa::wcnf_format_of(format);
    if (out_path.empty() || out_path == "-") {
        cqa::write_wcnf(std::cout, es.formula, fmt);
    } else {
        std::ofstream os(out_path, std::ios::binary);
        if (!os) throw cqa::IoError("cannot write '" + out_path + "'");
        cqa::write_wcnf(os, es.formula, fmt);
    }
    std::cerr << "vars=" << es.formula.nvars << " hard=" << es.formula.hard.size()
              << " soft=" << es.formula.soft.size() << " base=" << es.base
              << " offset=" << es.offset << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Range consistent answers for aggregation queries over inconsistent databases"};
    app.require_subcommand(1);

    InputOpts q_in, o_in, v_in, e_in;
    EngineOpts q_eng, v_eng, b_eng;
    bool q_json = false, o_json = false;
    std::int64_t o_limit = 1000000, v_limit = 1000000;
    std::string o_order = "group";
    std::uint64_t v_seed = 0;
    int v_trials = 1;

    std::string g_out, g_graph;
    cqa::GeneratorConfig g_cfg;

    std::vector<std::int64_t> b_sizes{10000};
    std::uint64_t b_seed = 1;
    int b_from = 5, b_to = 35, b_step = 5;

    std::string e_out = "-", e_format = "classic";

    CLI::App* query = app.add_subcommand("query", "Compute range consistent answers");
    add_input_opts(query, q_in);
    add_engine_opts(query, q_eng);
    query->add_flag("--json", q_json, "Machine-readable output");
    query->set_config("--config", "", "Read options from a key=value file");

    CLI::App* oracle = app.add_subcommand("oracle", "Answer by enumerating every repair");
    add_input_opts(oracle, o_in);
    oracle->add_option("--limit", o_limit, "Refuse instances with more repairs than this");
    oracle->add_option("--top-k-order", o_order, "TOP-k tie order: group | answer")
        ->check(CLI::IsMember({"group", "answer"}));
    oracle->add_flag("--json", o_json, "Machine-readable output");
    oracle->set_config("--config", "", "Read options from a key=value file");

    CLI::App* verify = app.add_subcommand("verify", "Cross-check the pipeline against the oracle");
    add_input_opts(verify, v_in);
    add_engine_opts(verify, v_eng);
    verify->add_option("--limit", v_limit, "Oracle repair-count limit");
    CLI::Option* seed_opt =
        verify->add_option("--seed", v_seed, "Verify seeded random instances instead of files");
    verify->add_option("--trials", v_trials, "Number of consecutive seeds to sweep")
        ->check(CLI::Range(1, 1000000));
    verify->set_config("--config", "", "Read options from a key=value file");
    // --schema/--data become optional in seeded mode; enforced in cmd_verify.
    verify->get_option("--schema")->required(false);
    verify->get_option("--data")->required(false);

    CLI::App* generate = app.add_subcommand("generate", "Write a synthetic instance");
    generate->add_option("--out", g_out, "Output directory")->required();
    generate->add_option("--graph", g_graph,
                         "Graph file ('p V E' header + edge lines): emit the max-cut instance");
    generate->add_option("--size", g_cfg.size, "Facts per relation of the consistent base");
    generate->add_option("--inconsistency", g_cfg.inconsistency_pct,
                         "Percent of facts drawn into key violations")
        ->check(CLI::Range(0, 100));
    generate->add_option("--group-min", g_cfg.group_min, "Smallest injected key-equal group");
    generate->add_option("--group-max", g_cfg.group_max, "Largest injected key-equal group");
    generate->add_option("--seed", g_cfg.seed, "Generator seed");
    generate->set_config("--config", "", "Read options from a key=value file");

    CLI::App* bench = app.add_subcommand("bench", "Sweep inconsistency, print CSV");
    bench->add_option("--size", b_sizes, "Base sizes to sweep (repeatable)");
    bench->add_option("--seed", b_seed, "Generator seed");
    bench->add_option("--from", b_from, "Lowest inconsistency percent")->check(CLI::Range(0, 100));
    bench->add_option("--to", b_to, "Highest inconsistency percent")->check(CLI::Range(0, 100));
    bench->add_option("--step", b_step, "Sweep step");
    add_engine_opts(bench, b_eng, /*with_wcnf=*/false);
    bench->set_config("--config", "", "Read options from a key=value file");

    CLI::App* encode = app.add_subcommand("encode", "Dump the WCNF reduction of a COUNT/SUM query");
    add_input_opts(encode, e_in);
    encode->add_option("--out", e_out, "Output file; '-' for stdout");
    encode->add_option("--wcnf-format", e_format, "WCNF dialect: classic or new")
        ->check(CLI::IsMember({"classic", "new"}));
    encode->set_config("--config", "", "Read options from a key=value file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(query)) return cmd_query(q_in, q_eng, q_json);
        if (app.got_subcommand(oracle)) return cmd_oracle(o_in, o_limit, o_order, o_json);
        if (app.got_subcommand(verify)) {
            std::optional<std::uint64_t> seed;
            if (seed_opt->count() > 0) seed = v_seed;
            return cmd_verify(v_in, v_eng, v_limit, seed, v_trials);
        }
        if (app.got_subcommand(generate)) return cmd_generate(g_out, g_graph, g_cfg);
        if (app.got_subcommand(bench)) return cmd_bench(b_sizes, b_seed, b_from, b_to, b_step, b_eng);
        if (app.got_subcommand(encode)) return cmd_encode(e_in, e_out, e_format);
    } catch (const cqa::UnsupportedError& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;  // unreachable with require_subcommand(1)
}
