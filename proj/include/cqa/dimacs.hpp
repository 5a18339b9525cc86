#pragma once

// WCNF serialization and MaxSAT solver output parsing.
//
// Two WCNF dialects are supported: the classic header form
//     p wcnf <nvars> <nclauses> <top>
// where hard clauses carry the top weight, and the newer headerless form
// where hard clauses start with 'h' and soft clauses with their weight.
// Output is byte-deterministic: clauses appear exactly in stored order, with
// single spaces and a trailing "0" per line.

#include <ostream>
#include <sstream>
#include <string>

#include "wcnf.hpp"

namespace cqa {

enum class WcnfFormat { Classic, New };

inline WcnfFormat wcnf_format_of(const std::string& s) {
    if (s == "classic") return WcnfFormat::Classic;
    if (s == "new") return WcnfFormat::New;
    throw ValidationError("unknown WCNF format '" + s + "' (expected classic or new)");
}

inline void write_wcnf(std::ostream& os, const WcnfFormula& f, WcnfFormat fmt) {
    auto put_lits = [&](const std::vector<Lit>& lits) {
        for (Lit l : lits) os << l << ' ';
        os << "0\n";
    };
    if (fmt == WcnfFormat::Classic) {
        std::int64_t top = f.top();
        os << "p wcnf " << f.nvars << ' ' << f.hard.size() + f.soft.size() << ' ' << top << '\n';
        for (const auto& c : f.hard) {
            os << top << ' ';
            put_lits(c);
        }
        for (const auto& s : f.soft) {
            os << s.weight << ' ';
            put_lits(s.lits);
        }
    } else {
        for (const auto& c : f.hard) {
            os << "h ";
            put_lits(c);
        }
        for (const auto& s : f.soft) {
            os << s.weight << ' ';
            put_lits(s.lits);
        }
    }
}

inline std::string wcnf_text(const WcnfFormula& f, WcnfFormat fmt) {
    std::ostringstream os;
    write_wcnf(os, f, fmt);
    return os.str();
}

// ---------------------------------------------------------------------------
// Solver output
// ---------------------------------------------------------------------------

struct SolverOutput {
    std::string status;         // text after "s " (e.g. "OPTIMUM FOUND")
    bool has_cost = false;
    std::int64_t cost = 0;      // last "o" line: total weight of falsified softs
    bool has_model = false;
    Model model;                // var -> value, index 0 unused
};

// Parses s/o/v lines.  Models come in two shapes: a literal list
// ("v -1 2 -3 0", possibly over several lines) or the compact binary form
// ("v 0101...", one char per variable).  All-[01] tokens totalling exactly
// `nvars` characters are read as the binary form; anything else is read as
// literals, ignoring "0" terminators.
inline SolverOutput parse_solver_output(const std::string& text, int nvars) {
    SolverOutput out;
    std::vector<std::string> vtokens;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.size() < 2 || line[1] != ' ') continue;
        std::istringstream body(line.substr(2));
        if (line[0] == 's') {
            std::string rest;
            std::getline(body, rest);
            while (!rest.empty() && rest.front() == ' ') rest.erase(rest.begin());
            while (!rest.empty() && rest.back() == ' ') rest.pop_back();
            out.status = rest;
        } else if (line[0] == 'o') {
            std::int64_t c;
            if (body >> c) {
                out.cost = c;
                out.has_cost = true;
            }
        } else if (line[0] == 'v') {
            std::string tok;
            while (body >> tok) vtokens.push_back(tok);
        }
    }
    if (vtokens.empty()) return out;

    bool binary = true;
    std::size_t total_chars = 0;
    for (const auto& t : vtokens) {
        total_chars += t.size();
        for (char ch : t)
            if (ch != '0' && ch != '1') binary = false;
    }
    binary = binary && (int)total_chars == nvars;

    out.model.assign(nvars + 1, false);
    if (binary) {
        int v = 1;
        for (const auto& t : vtokens)
            for (char ch : t) out.model[v++] = ch == '1';
    } else {
        for (const auto& t : vtokens) {
            long long l;
            try {
                l = std::stoll(t);
            } catch (const std::exception&) {
                throw SolverError("unparseable token in solver model line: '" + t + "'");
            }
            if (l == 0) continue;
            int var = (int)(l < 0 ? -l : l);
            if (var > nvars) {
                if (var > (int)out.model.size() - 1) out.model.resize(var + 1, false);
            }
            out.model[var] = l > 0;
        }
    }
    out.has_model = true;
    return out;
}

}  // namespace cqa
