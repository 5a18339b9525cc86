// End-to-end command-line tests: run the installed binary through a shell,
// capture stdout/stderr/exit code, and check output contracts byte for byte
// where they are documented as stable (range lines, JSON layout, CSV header,
// WCNF dumps).  The external-solver plumbing is exercised with a tiny
// brute-force WCNF solver binary built alongside the tests.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch_root() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "cqa_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path fresh_dir(const std::string& hint) {
    static int counter = 0;
    fs::path d = scratch_root() / (hint + "_" + std::to_string(++counter));
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    os << text;
}

// Runs `argline` against the CLI binary; `prefix` may carry environment
// assignments (the command goes through /bin/sh).
RunResult run(const std::string& argline, const std::string& prefix = "") {
    static int counter = 0;
    fs::path out = scratch_root() / ("out_" + std::to_string(++counter));
    fs::path err = scratch_root() / ("err_" + std::to_string(counter));
    std::string cmd = prefix + "\"" CQA_BINARY_PATH "\" " + argline + " > \"" + out.string() +
                      "\" 2> \"" + err.string() + "\"";
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

const std::string kFixture = "--schema \"" CQA_FIXTURE_DIR "/table1/schema.txt\" "
                             "--data \"" CQA_FIXTURE_DIR "/table1\" ";

const std::string kSumC2 =
    "SELECT SUM(ACCOUNTS.BAL) FROM ACCOUNTS, CUSTACC "
    "WHERE CUSTACC.ACCID = ACCOUNTS.ACCID AND CUSTACC.CID = 'C2'";

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string line;
    while (std::getline(is, line)) out.push_back(line);
    return out;
}

nlohmann::ordered_json parse_json(const std::string& s) {
    return nlohmann::ordered_json::parse(s);
}

void zero_ms(nlohmann::ordered_json& j) {
    j["stats"]["encode_ms"] = 0;
    j["stats"]["solve_ms"] = 0;
    for (auto& a : j["answers"]) {
        a["stats"]["encode_ms"] = 0;
        a["stats"]["solve_ms"] = 0;
    }
}

nlohmann::ordered_json stats_obj(std::int64_t vars, std::int64_t clauses, std::int64_t soft,
                                 std::int64_t sat_calls) {
    nlohmann::ordered_json s;
    s["vars"] = vars;
    s["clauses"] = clauses;
    s["soft"] = soft;
    s["sat_calls"] = sat_calls;
    s["encode_ms"] = 0;
    s["solve_ms"] = 0;
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// query: table and JSON output
// ---------------------------------------------------------------------------

TEST_CASE("cli: scalar table output") {
    RunResult r = run("query " + kFixture + "--query \"" + kSumC2 + "\"");
    REQUIRE(r.code == 0);
    REQUIRE(first_line(r.out) == "range: [900, 2200]");
    auto ls = lines_of(r.out);
    REQUIRE(ls.size() == 2);
    REQUIRE(ls[1].rfind("stats: vars=15 clauses=7 soft=3 sat_calls=2", 0) == 0);
}

TEST_CASE("cli: scalar JSON output matches the documented layout") {
    RunResult r = run("query " + kFixture + "--query \"" + kSumC2 + "\" --json");
    REQUIRE(r.code == 0);
    nlohmann::ordered_json j = parse_json(r.out);
    zero_ms(j);

    nlohmann::ordered_json want;
    want["query"] = kSumC2;
    want["backend"] = "internal";
    nlohmann::ordered_json a;
    a["group_key"] = nullptr;
    a["glb"] = 900;
    a["lub"] = 2200;
    a["empty_possible"] = false;
    a["stats"] = stats_obj(15, 7, 3, 2);
    want["answers"] = nlohmann::ordered_json::array({a});
    want["stats"] = stats_obj(15, 7, 3, 2);

    REQUIRE(j.dump(2) == want.dump(2));
}

TEST_CASE("cli: MIN over a possibly-empty result renders the empty marker") {
    RunResult r = run("query " + kFixture +
                      "--query \"SELECT MIN(ACCOUNTS.BAL) FROM ACCOUNTS "
                      "WHERE ACCOUNTS.CITY = 'SF'\"");
    REQUIRE(r.code == 0);
    REQUIRE(first_line(r.out) == "range: [-100, -100] (empty possible)");

    RunResult j = run("query " + kFixture +
                      "--query \"SELECT MIN(ACCOUNTS.BAL) FROM ACCOUNTS "
                      "WHERE ACCOUNTS.CITY = 'SF'\" --json");
    nlohmann::ordered_json doc = parse_json(j.out);
    REQUIRE(doc["answers"][0]["glb"] == -100);
    REQUIRE(doc["answers"][0]["empty_possible"] == true);
}

TEST_CASE("cli: grouped table output") {
    RunResult r = run("query " + kFixture +
                      "--query \"SELECT CUSTOMER.CITY, COUNT(*) FROM CUSTOMER "
                      "GROUP BY CUSTOMER.CITY\"");
    REQUIRE(r.code == 0);
    auto ls = lines_of(r.out);
    REQUIRE(ls.size() == 4);
    REQUIRE(ls[0] == "CUSTOMER.CITY  range");
    REQUIRE(ls[1] == "LA             [2, 3]");
    REQUIRE(ls[2] == "SF             [1, 2]");
    REQUIRE(ls[3].rfind("stats: ", 0) == 0);
}

TEST_CASE("cli: grouped JSON carries group_by and per-group answers") {
    RunResult r = run("query " + kFixture +
                      "--query \"SELECT ACCOUNTS.CITY, COUNT(*) FROM ACCOUNTS "
                      "GROUP BY ACCOUNTS.CITY\" --json");
    REQUIRE(r.code == 0);
    nlohmann::ordered_json j = parse_json(r.out);
    REQUIRE(j["group_by"] == nlohmann::ordered_json::array({"ACCOUNTS.CITY"}));
    REQUIRE(j["answers"].size() == 2);
    REQUIRE(j["answers"][0]["group_key"] == nlohmann::ordered_json::array({"LA"}));
    REQUIRE(j["answers"][0]["glb"] == 2);
    REQUIRE(j["answers"][0]["lub"] == 2);
    REQUIRE(j["answers"][1]["group_key"] == nlohmann::ordered_json::array({"SJ"}));
    REQUIRE(j["answers"][1]["glb"] == 1);
    REQUIRE(j["answers"][1]["lub"] == 2);
}

TEST_CASE("cli: plain SELECT prints the rows held in every repair") {
    RunResult r = run("query " + kFixture +
                      "--query \"SELECT CUSTOMER.CNAME FROM CUSTOMER "
                      "WHERE CUSTOMER.CITY = 'LA'\"");
    REQUIRE(r.code == 0);
    auto ls = lines_of(r.out);
    REQUIRE(ls.size() == 5);
    REQUIRE(ls[0] == "CUSTOMER.CNAME");
    REQUIRE(ls[1] == "Jen");
    REQUIRE(ls[2] == "John");
    REQUIRE(ls[3] == "(2 rows in every repair)");
    REQUIRE(ls[4].rfind("stats: ", 0) == 0);
}

TEST_CASE("cli: decimal endpoints render at the declared scale") {
    fs::path dir = fresh_dir("decimals");
    spit(dir / "schema.txt", "relation P ( ID integer, AMT decimal(2), key(ID) );\n");
    spit(dir / "P.csv", "ID,AMT\n1,10.00\n1,12.50\n2,0.25\n");
    std::string base = "--schema \"" + (dir / "schema.txt").string() + "\" --data \"" +
                       dir.string() + "\" ";
    RunResult r = run("query " + base + "--query \"SELECT SUM(P.AMT) FROM P\"");
    REQUIRE(r.code == 0);
    REQUIRE(first_line(r.out) == "range: [10.25, 12.75]");

    RunResult j = run("query " + base + "--query \"SELECT SUM(P.AMT) FROM P\" --json");
    nlohmann::ordered_json doc = parse_json(j.out);
    REQUIRE(doc["answers"][0]["glb"] == "10.25");
    REQUIRE(doc["answers"][0]["lub"] == "12.75");
}

// ---------------------------------------------------------------------------
// query inputs: files, config, validation
// ---------------------------------------------------------------------------

TEST_CASE("cli: --query-file is equivalent to --query") {
    fs::path qf = fresh_dir("queryfile") / "q.sql";
    spit(qf, kSumC2 + "\n");
    RunResult r = run("query " + kFixture + "--query-file \"" + qf.string() + "\"");
    REQUIRE(r.code == 0);
    REQUIRE(first_line(r.out) == "range: [900, 2200]");
}

TEST_CASE("cli: --config supplies options from a file") {
    fs::path cfg = fresh_dir("config") / "run.ini";
    spit(cfg, std::string("schema=\"") + CQA_FIXTURE_DIR "/table1/schema.txt" + "\"\n" +
                  "data=\"" + CQA_FIXTURE_DIR "/table1" + "\"\n" +
                  "query=\"SELECT COUNT(*) FROM ACCOUNTS\"\n");
    RunResult r = run("query --config \"" + cfg.string() + "\"");
    REQUIRE(r.code == 0);
    REQUIRE(first_line(r.out) == "range: [4, 4]");
}

TEST_CASE("cli: usage and input errors exit with the documented codes") {
    // Unsupported SQL surface: exit 2 with an 'unsupported:' diagnostic.
    RunResult avg =
        run("query " + kFixture + "--query \"SELECT AVG(ACCOUNTS.BAL) FROM ACCOUNTS\"");
    REQUIRE(avg.code == 2);
    REQUIRE(avg.err.rfind("unsupported: aggregate or function 'AVG'", 0) == 0);

    RunResult having = run("query " + kFixture +
                           "--query \"SELECT COUNT(*) FROM ACCOUNTS GROUP BY ACCOUNTS.CITY "
                           "HAVING COUNT(*) > 1\"");
    REQUIRE(having.code == 2);
    REQUIRE(having.err.rfind("unsupported: HAVING", 0) == 0);

    // Mutually exclusive inputs: exit 2.
    RunResult both = run("query " + kFixture + "--query \"SELECT COUNT(*) FROM ACCOUNTS\" "
                         "--query-file /nonexistent.sql");
    REQUIRE(both.code == 2);
    REQUIRE(both.err.rfind("error: --query and --query-file are mutually exclusive", 0) == 0);

    // Neither input: exit 2.
    RunResult none = run("query " + kFixture);
    REQUIRE(none.code == 2);

    // Command-line parse failures: exit 2.
    REQUIRE(run("query --no-such-flag").code == 2);
    REQUIRE(run("nosuchcommand").code == 2);

    // Runtime failures (missing file): exit 1.
    RunResult io = run("query --schema /nonexistent/schema.txt --data /nonexistent "
                       "--query \"SELECT COUNT(*) FROM ACCOUNTS\"");
    REQUIRE(io.code == 1);
    REQUIRE(io.err.rfind("error: ", 0) == 0);

    // Malformed SQL: exit 2.
    RunResult parse = run("query " + kFixture + "--query \"SELECT FROM ACCOUNTS\"");
    REQUIRE(parse.code == 2);
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

TEST_CASE("cli: oracle answers agree with the pipeline") {
    RunResult eng = run("query " + kFixture + "--query \"" + kSumC2 + "\" --json");
    RunResult orc = run("oracle " + kFixture + "--query \"" + kSumC2 + "\" --json");
    REQUIRE(orc.code == 0);
    nlohmann::ordered_json je = parse_json(eng.out);
    nlohmann::ordered_json jo = parse_json(orc.out);
    REQUIRE(jo["backend"] == "oracle");
    REQUIRE(jo["answers"][0]["glb"] == je["answers"][0]["glb"]);
    REQUIRE(jo["answers"][0]["lub"] == je["answers"][0]["lub"]);
}

TEST_CASE("cli: oracle enforces its repair budget") {
    RunResult r = run("oracle " + kFixture + "--query \"" + kSumC2 + "\" --limit 3");
    REQUIRE(r.code == 1);
    REQUIRE(r.err == "error: repair count exceeds the limit of 3\n");
}

// ---------------------------------------------------------------------------
// external solver plumbing
// ---------------------------------------------------------------------------

TEST_CASE("cli: an external solver reproduces the internal answers") {
    for (const std::string prefix :
         {std::string(""), std::string("FAKE_VLINE=binary "), std::string("FAKE_MODE=cost ")}) {
        RunResult r = run("query " + kFixture + "--query \"" + kSumC2 +
                          "\" --json --solver \"" + prefix + CQA_FAKE_SOLVER "\"");
        CAPTURE(prefix, r.err);
        REQUIRE(r.code == 0);
        nlohmann::ordered_json j = parse_json(r.out);
        REQUIRE(j["backend"] == "external: " + prefix + CQA_FAKE_SOLVER);
        REQUIRE(j["answers"][0]["glb"] == 900);
        REQUIRE(j["answers"][0]["lub"] == 2200);
    }
}

TEST_CASE("cli: the solver option also comes from the environment") {
    RunResult r = run("query " + kFixture + "--query \"" + kSumC2 + "\" --json",
                      "CQASAT_SOLVER=\"" CQA_FAKE_SOLVER "\" ");
    REQUIRE(r.code == 0);
    nlohmann::ordered_json j = parse_json(r.out);
    REQUIRE(j["backend"] == "external: " CQA_FAKE_SOLVER);
    REQUIRE(j["answers"][0]["glb"] == 900);
    REQUIRE(j["answers"][0]["lub"] == 2200);
}

TEST_CASE("cli: unusable solver output is a runtime failure") {
    for (const std::string mode : {std::string("silent"), std::string("unknown")}) {
        RunResult r = run("query " + kFixture + "--query \"" + kSumC2 +
                          "\" --solver \"FAKE_MODE=" + mode + " " CQA_FAKE_SOLVER "\"");
        CAPTURE(mode, r.err);
        REQUIRE(r.code == 1);
        REQUIRE(r.err.rfind("error: ", 0) == 0);
    }
    RunResult missing =
        run("query " + kFixture + "--query \"" + kSumC2 + "\" --solver /no/such/solver");
    REQUIRE(missing.code == 1);
    REQUIRE(missing.err.rfind("error: ", 0) == 0);
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

TEST_CASE("cli: verify passes on the bank fixture") {
    RunResult r = run("verify " + kFixture + "--query \"" + kSumC2 + "\"");
    REQUIRE(r.code == 0);
    REQUIRE(r.out == "verify: PASS (1 check)\n");
}

TEST_CASE("cli: seeded verify sweeps the operator battery") {
    RunResult r = run("verify --seed 1 --trials 3");
    REQUIRE(r.code == 0);
    REQUIRE(r.out == "verify: PASS (42 checks, 3 seeded instances)\n");
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

TEST_CASE("cli: generated instances load and solve") {
    fs::path dir = fresh_dir("gen");
    RunResult g = run("generate --out \"" + dir.string() +
                      "\" --size 40 --inconsistency 10 --seed 7");
    REQUIRE(g.code == 0);
    REQUIRE(g.out.find("facts") != std::string::npos);
    REQUIRE(fs::exists(dir / "schema.txt"));
    REQUIRE(fs::exists(dir / "query.sql"));

    std::string base =
        "--schema \"" + (dir / "schema.txt").string() + "\" --data \"" + dir.string() + "\" ";
    RunResult q = run("query " + base + "--query-file \"" + (dir / "query.sql").string() +
                      "\" --json");
    REQUIRE(q.code == 0);
    nlohmann::ordered_json j = parse_json(q.out);
    REQUIRE(j["answers"].size() == 1);
    REQUIRE(j["answers"][0]["glb"].is_number_integer());
    REQUIRE(j["answers"][0]["lub"].is_number_integer());
    REQUIRE(j["answers"][0]["glb"].get<std::int64_t>() <=
            j["answers"][0]["lub"].get<std::int64_t>());

    RunResult v = run("verify " + base + "--query-file \"" + (dir / "query.sql").string() + "\"");
    REQUIRE(v.code == 0);
    REQUIRE(v.out == "verify: PASS (1 check)\n");
}

TEST_CASE("cli: graph generation produces the max-cut instance") {
    fs::path dir = fresh_dir("graph");
    spit(dir / "triangle.txt", "p 3 3\n1 2\n1 3\n2 3\n");
    RunResult g = run("generate --out \"" + dir.string() + "\" --graph \"" +
                      (dir / "triangle.txt").string() + "\"");
    REQUIRE(g.code == 0);

    RunResult q = run("query --schema \"" + (dir / "schema.txt").string() + "\" --data \"" +
                      dir.string() + "\" --query-file \"" + (dir / "query.sql").string() +
                      "\" --json");
    REQUIRE(q.code == 0);
    nlohmann::ordered_json j = parse_json(q.out);
    REQUIRE(j["answers"][0]["lub"] == 2);  // the triangle's maximum cut
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

namespace {

std::string zero_ms_csv(const std::string& csv) {
    std::ostringstream os;
    bool header = true;
    for (const std::string& line : lines_of(csv)) {
        if (header) {
            os << line << "\n";
            header = false;
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream is(line);
        std::string cell;
        while (std::getline(is, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() == 11);
        cells[7] = cells[8] = "0";  // encode_ms, solve_ms
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << "\n";
    }
    return os.str();
}

}  // namespace

TEST_CASE("cli: bench emits a deterministic CSV sweep") {
    std::string args = "bench --size 60 --seed 3 --from 0 --to 10 --step 5";
    RunResult a = run(args);
    REQUIRE(a.code == 0);
    auto ls = lines_of(a.out);
    REQUIRE(ls.size() == 4);  // header + 0/5/10 percent
    REQUIRE(ls[0] ==
            "size,inconsistency_pct,facts,vars,clauses,soft,sat_calls,encode_ms,solve_ms,glb,lub");

    // A fully consistent sweep point answers without any solver call.
    std::istringstream first(ls[1]);
    std::vector<std::string> cells;
    std::string cell;
    while (std::getline(first, cell, ',')) cells.push_back(cell);
    REQUIRE(cells[1] == "0");
    REQUIRE(cells[6] == "0");  // sat_calls

    RunResult b = run(args);
    REQUIRE(zero_ms_csv(a.out) == zero_ms_csv(b.out));
}

// ---------------------------------------------------------------------------
// encode
// ---------------------------------------------------------------------------

TEST_CASE("cli: encode writes byte-identical WCNF on repeated runs") {
    fs::path dir = fresh_dir("encode");
    std::string args = "encode " + kFixture + "--query \"" + kSumC2 + "\" --out \"";
    RunResult a = run(args + (dir / "a.wcnf").string() + "\"");
    RunResult b = run(args + (dir / "b.wcnf").string() + "\"");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    REQUIRE(a.err == "vars=15 hard=7 soft=3 base=0 offset=2200\n");
    std::string fa = slurp(dir / "a.wcnf");
    REQUIRE(fa == slurp(dir / "b.wcnf"));
    REQUIRE(first_line(fa) == "p wcnf 15 7 2301");

    RunResult n = run("encode " + kFixture + "--query \"" + kSumC2 +
                      "\" --wcnf-format new --out \"" + (dir / "n.wcnf").string() + "\"");
    REQUIRE(n.code == 0);
    std::string fn = slurp(dir / "n.wcnf");
    REQUIRE(fn.rfind("h ", 0) == 0);
    REQUIRE(fn.find("p wcnf") == std::string::npos);
}

TEST_CASE("cli: encode rejects queries without a single-formula reduction") {
    RunResult minq =
        run("encode " + kFixture + "--query \"SELECT MIN(ACCOUNTS.BAL) FROM ACCOUNTS\"");
    REQUIRE(minq.code == 2);
    REQUIRE(minq.err.rfind("unsupported: ", 0) == 0);

    RunResult plainq =
        run("encode " + kFixture + "--query \"SELECT CUSTOMER.CNAME FROM CUSTOMER\"");
    REQUIRE(plainq.code == 2);
    REQUIRE(plainq.err.rfind("unsupported: plain SELECT", 0) == 0);
}

TEST_CASE("cli: query dumps every solved formula when asked") {
    fs::path dir = fresh_dir("dump");
    RunResult r = run("query " + kFixture + "--query \"" + kSumC2 + "\" --wcnf-out \"" +
                      dir.string() + "\"");
    REQUIRE(r.code == 0);
    REQUIRE(fs::exists(dir / "scalar_glb.wcnf"));
    REQUIRE(fs::exists(dir / "scalar_lub.wcnf"));
}
