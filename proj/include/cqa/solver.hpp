#pragma once

// MaxSAT solving entry point.
//
// By default the internal branch-and-bound solver runs in process.  An
// external MaxSAT solver can be configured instead (--solver on the CLI, or
// the CQASAT_SOLVER environment variable): the formula is written to a
// temporary WCNF file, the solver is invoked on it, and its s/o/v output is
// parsed back.  Plain satisfiability probes (the MIN/MAX scans, consistency
// checks) always use the internal SAT solver.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "dimacs.hpp"
#include "maxsat.hpp"

namespace cqa {

struct SolverConfig {
    std::string external;  // empty = internal; otherwise a command prefix
    WcnfFormat format = WcnfFormat::Classic;
    int timeout_sec = 0;                              // external runs only; 0 = none
    std::int64_t node_budget = (std::int64_t)1 << 27;  // internal search cap
};

struct MaxSatOutcome {
    bool satisfiable = false;
    std::int64_t satisfied_weight = 0;  // maximum satisfiable soft weight
    Model model;
    std::int64_t nodes = 0;  // internal search nodes (0 when external)
};

namespace solverdetail {

inline std::filesystem::path temp_path(const char* suffix) {
    static std::atomic<int> counter{0};  // per-group work may solve concurrently
    return std::filesystem::temp_directory_path() /
           ("cqasat-" + std::to_string(::getpid()) + "-" + std::to_string(++counter) + suffix);
}

inline MaxSatOutcome solve_external(const WcnfFormula& f, const SolverConfig& cfg) {
    namespace fs = std::filesystem;
    fs::path in = temp_path(".wcnf"), out = temp_path(".out");
    {
        std::ofstream os(in);
        if (!os) throw IoError("cannot write temporary WCNF file " + in.string());
        write_wcnf(os, f, cfg.format);
    }
    std::string cmd;
    if (cfg.timeout_sec > 0) cmd += "timeout " + std::to_string(cfg.timeout_sec) + "s ";
    cmd += cfg.external + " " + in.string() + " > " + out.string() + " 2>/dev/null";
    int rc = std::system(cmd.c_str());

    std::string text;
    {
        std::ifstream is(out);
        std::ostringstream buf;
        buf << is.rdbuf();
        text = buf.str();
    }
    std::error_code ec;
    fs::remove(in, ec);
    fs::remove(out, ec);

    SolverOutput parsed = parse_solver_output(text, f.nvars);
    if (parsed.status.empty()) {
        std::string hint = rc == 124 * 256 ? " (timed out)" : "";
        throw SolverError("external solver produced no status line" + hint + ": " + cfg.external);
    }
    MaxSatOutcome outcome;
    if (parsed.status == "UNSATISFIABLE") return outcome;
    if (parsed.status != "OPTIMUM FOUND")
        throw SolverError("external solver did not reach an optimum (status '" + parsed.status + "')");
    outcome.satisfiable = true;
    if (parsed.has_model) {
        outcome.model = parsed.model;
        outcome.model.resize(f.nvars + 1, false);
        outcome.satisfied_weight = satisfied_soft_weight(f, outcome.model);
    } else if (parsed.has_cost) {
        outcome.satisfied_weight = checked_add(f.soft_total(), -parsed.cost);
    } else {
        throw SolverError("external solver reported an optimum without cost or model");
    }
    return outcome;
}

}  // namespace solverdetail

inline MaxSatOutcome solve_wpmaxsat(const WcnfFormula& f, const SolverConfig& cfg = {}) {
    if (!cfg.external.empty()) return solverdetail::solve_external(f, cfg);
    MaxSatResult r = solve_wpmaxsat_internal(f, cfg.node_budget);
    MaxSatOutcome outcome;
    outcome.satisfiable = r.satisfiable;
    outcome.satisfied_weight = r.best;
    outcome.model = std::move(r.model);
    outcome.nodes = r.nodes;
    return outcome;
}

}  // namespace cqa
