#include "absde/commands.hpp"
#include "absde/config.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace absde;
namespace fs = std::filesystem;

namespace {

// minimal document with the mandatory sections, patched by `patch`
std::string doc(const std::string& patch = "{}") {
    auto base = nlohmann::json::parse(R"({"problem": {}, "terminal": {}, "generator": {"builtin": "zero"}})");
    base.merge_patch(nlohmann::json::parse(patch));
    return base.dump();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <class E = Error>
E expect_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const E& e) {
        return e;
    }
    FAIL("config was accepted: " << text);
    throw;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("absde_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args, const fs::path& dir) {
    const std::string cmd = std::string(ABSDE_CLI) + " " + args + " > " + (dir / "stdout").string() + " 2> " +
                            (dir / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("mandatory sections and defaults") {
    CHECK(expect_error<SchemaError>("{}").path() == "$.problem");
    CHECK(expect_error<SchemaError>(R"({"problem": {}, "generator": {}})").path() == "$.terminal");
    const RunConfig c = parse_config(doc());
    RunConfig expected;
    expected.generator.builtin = "zero";
    CHECK(c == expected);
    CHECK(c.solver.paths == 10000);
    CHECK(c.solver.z_max == 25.0);
    CHECK(c.problem.steps_per_unit == 100);
    CHECK(c.convergence.pairs.size() == 4);
}

TEST_CASE("unknown keys are rejected with their path") {
    CHECK(expect_error<SchemaError>(doc(R"({"solverr": {}})")).path() == "$.solverr");
    CHECK(expect_error<SchemaError>(doc(R"({"solver": {"pathz": 5}})")).path() == "$.solver.pathz");
    CHECK(expect_error<SchemaError>(doc(R"({"problem": {"delta": {"kind": "constant", "valu": 1}}})")).path() ==
          "$.problem.delta.valu");
}

TEST_CASE("type and range errors name the field") {
    CHECK(expect_error<SchemaError>(doc(R"({"solver": {"paths": "many"}})")).path() == "$.solver.paths");
    CHECK(expect_error<SchemaError>(doc(R"({"solver": {"paths": -3}})")).path() == "$.solver.paths");
    CHECK(expect_error<SchemaError>(doc(R"({"problem": {"n": 0}})")).path() == "$.problem.n");
    CHECK(expect_error<SchemaError>(doc(R"({"solver": {"basis": "splines"}})")).path() == "$.solver.basis");
    CHECK(expect_error<SchemaError>(doc(R"({"generator": {"claimed_assumption": "9.9"}})")).path() ==
          "$.generator.claimed_assumption");
    CHECK(expect_error(R"({"solver": )").code() == ErrorCode::SchemaError);
}

TEST_CASE("builtin and parameter names are checked") {
    CHECK(expect_error(doc(R"({"generator": {"builtin": "nope"}})")).code() == ErrorCode::UnknownBuiltin);
    CHECK(expect_error(doc(R"({"generator": {"builtin": "zero", "params": {"Gamma": 1}}})")).code() ==
          ErrorCode::SchemaError);
}

TEST_CASE("split contraction claim needs a split generator") {
    const auto e = expect_error<SchemaError>(
        doc(R"({"generator": {"builtin": null, "expressions": ["0.5*z11^2"], "claimed_assumption": "5.3"}})"));
    CHECK(e.path() == "$.generator.claimed_assumption");
    CHECK_NOTHROW(parse_config(
        doc(R"({"generator": {"builtin": null, "expressions": ["0.5*z11^2"], "split_g": ["p1"], "claimed_assumption": "5.3"}})")));
}

TEST_CASE("malformed expressions report their position") {
    const auto e = expect_error<ParseError>(doc(R"({"generator": {"builtin": null, "expressions": ["y1 + * 2"]}})"));
    CHECK(e.position() == 5);
    CHECK(expect_error<ParseError>(doc(R"({"terminal": {"xi": ["sin(w1"]}})")).position() == 6);
    CHECK(expect_error<ParseError>(doc(R"({"problem": {"delta": {"kind": "expression", "value": "0.5 - "}}})"))
              .position() == 6);
}

TEST_CASE("delays accept numbers and expressions") {
    const RunConfig c = parse_config(doc(
        R"j({"problem": {"K": 0.5, "delta": 0.25, "zeta": {"kind": "expression", "value": "0.25*(1+t)"}}})j"));
    CHECK(c.problem.delta.kind == "constant");
    CHECK(c.problem.delta.value == 0.25);
    const DelayFn z = make_delay(c.problem.zeta);
    CHECK(z(0.0) == 0.25);
    CHECK(z(1.0) == 0.5);
    const TimeGrid g = make_grid(c.problem);
    CHECK(g.terminal_index == 100);
    CHECK(g.node_count == 151);
}

TEST_CASE("shipped configs round-trip through the echo") {
    int seen = 0;
    for (const auto& entry : fs::directory_iterator(ABSDE_CONFIG_DIR)) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path().string());
        const RunConfig c = parse_config(slurp(entry.path()));
        const std::string echo = echo_config(c);
        CHECK(parse_config(echo) == c);
        CHECK(echo_config(parse_config(echo)) == echo);
        ++seen;
    }
    CHECK(seen >= 8);
}

TEST_CASE("bounds command prints the Q1 line") {
    const RunConfig c = parse_config(slurp(fs::path(ABSDE_CONFIG_DIR) / "bounds_q1.json"));
    const fs::path dir = scratch("bounds");
    std::ostringstream log;
    CHECK(run_command("bounds", c, dir, log) == 0);
    CHECK(log.str().find("Q1 = 6\n") != std::string::npos);
    CHECK(slurp(dir / "bounds.txt").find("Q1 = 6\n") != std::string::npos);
    CHECK(slurp(dir / "bounds.csv").find("\nQ1,6\n") != std::string::npos);
    CHECK_THROWS_AS(run_command("frobnicate", c, dir, log), Error);
}

TEST_CASE("exit codes by error class") {
    CHECK(exit_status(ErrorCode::SchemaError) == 2);
    CHECK(exit_status(ErrorCode::ParseError) == 2);
    CHECK(exit_status(ErrorCode::UnknownBuiltin) == 2);
    CHECK(exit_status(ErrorCode::MissingParams) == 2);
    CHECK(exit_status(ErrorCode::SingularRegression) == 3);
    CHECK(exit_status(ErrorCode::EvalError) == 3);
    CHECK(exit_status(ErrorCode::DivergedSweep) == 3);
    CHECK(exit_status(ErrorCode::NoConvergence) == 3);
}

TEST_CASE("command line exit codes") {
    const fs::path dir = scratch("cli");
    const std::string cfg = std::string(ABSDE_CONFIG_DIR);
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    };

    CHECK(run_cli("solve --config " + cfg + "/minimal.json --paths 2000 --steps 10 --out " + dir.string(), dir) == 0);
    CHECK(slurp(dir / "summary.csv").rfind("# absde-lab v1\n", 0) == 0);
    CHECK(fs::exists(dir / "report.txt"));

    CHECK(run_cli("bounds --config " + cfg + "/bounds_q1.json --out " + dir.string(), dir) == 0);
    CHECK(slurp(dir / "stdout").find("Q1 = 6") != std::string::npos);

    CHECK(run_cli("solve", dir) == 2);
    CHECK(run_cli("launch --config " + cfg + "/minimal.json", dir) == 2);

    CHECK(run_cli("solve --config " + write("typo.json", doc(R"({"solverr": {}})")) + " --out " + dir.string(), dir) == 2);
    CHECK(slurp(dir / "stderr").rfind("error: SchemaError: at $.solverr", 0) == 0);

    CHECK(run_cli("solve --config " + write("expr.json", doc(R"({"generator": {"builtin": null, "expressions": ["y1 + * 2"]}})")) +
                      " --out " + dir.string(),
                  dir) == 2);
    CHECK(slurp(dir / "stderr").rfind("error: ParseError: ", 0) == 0);

    CHECK(run_cli("solve --config " + (dir / "absent.json").string(), dir) == 2);

    const std::string blowup = write(
        "blowup.json", R"({"generator": {"expressions": ["20*y1"]}, "terminal": {"xi": ["1"], "eta": ["0"]},
                           "problem": {"steps_per_unit": 10}, "solver": {"paths": 200, "max_iter": 3}})");
    CHECK(run_cli("solve --config " + blowup + " --out " + dir.string(), dir) == 3);
    CHECK(slurp(dir / "stderr").rfind("error: NoConvergence: ", 0) == 0);
}
