#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* cli_path() { return ISOSHELL_CLI_PATH; }
const char* schema_dir() { return ISOSHELL_SCHEMA_DIR; }

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
    fs::create_directories(dir);
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string(cli_path()) + " " + args + " >" + out.string() + " 2>" +
                            err.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(status);
    std::stringstream so, se;
    so << std::ifstream(out).rdbuf();
    se << std::ifstream(err).rdbuf();
    r.out = so.str();
    r.err = se.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::stringstream ss;
    ss << std::ifstream(p).rdbuf();
    return ss.str();
}

bool type_matches(const json& value, const std::string& type) {
    if (type == "number") return value.is_number();
    if (type == "integer") return value.is_number_integer();
    if (type == "string") return value.is_string();
    if (type == "boolean") return value.is_boolean();
    if (type == "array") return value.is_array();
    if (type == "object") return value.is_object();
    return true;
}

// Structural validation against the shipped schema: required keys exist and
// declared property types match, recursing through objects and array items.
void check_against_schema(const json& instance, const json& schema) {
    if (schema.contains("type")) {
        CHECK(type_matches(instance, schema["type"].get<std::string>()));
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& v : schema["enum"]) found = found || v == instance;
        CHECK(found);
    }
    if (instance.is_object()) {
        if (schema.contains("required"))
            for (const auto& key : schema["required"])
                CHECK(instance.contains(key.get<std::string>()));
        if (schema.contains("properties"))
            for (const auto& [key, sub] : schema["properties"].items())
                if (instance.contains(key)) check_against_schema(instance.at(key), sub);
    }
    if (instance.is_array() && schema.contains("items"))
        for (const auto& element : instance) check_against_schema(element, schema["items"]);
}

void validate_file(const fs::path& instance_file, const std::string& schema_name) {
    const json instance = json::parse(slurp(instance_file));
    const json schema = json::parse(slurp(fs::path(schema_dir()) / schema_name));
    check_against_schema(instance, schema);
}

fs::path sandbox(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "isoshell_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("thresholds: values, schema, and byte-identical reruns") {
    const auto dir = sandbox("thresholds");
    const auto r1 = run_cli("--out-dir " + (dir / "a").string() + " thresholds", dir / "r1");
    REQUIRE(r1.exit_code == 0);
    const json j = json::parse(r1.out);
    CHECK(std::abs(j["N2"].get<double>() - 2.51755148) < 1e-5);
    CHECK(std::abs(j["N1"].get<double>() - 1.8427) < 5e-4);
    validate_file(dir / "a" / "thresholds.json", "thresholds.schema.json");

    const auto r2 = run_cli("--out-dir " + (dir / "b").string() + " thresholds", dir / "r2");
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(dir / "a" / "thresholds.json") == slurp(dir / "b" / "thresholds.json"));
    CHECK(r1.out == r2.out);
}

TEST_CASE("wfun exports the profile CSV") {
    const auto dir = sandbox("wfun");
    const auto r =
        run_cli("--out-dir " + dir.string() + " wfun --n 3 --t-max 50 --out w.csv", dir / "run");
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp(dir / "w.csv");
    CHECK(csv.rfind("t,u,uprime,w\n", 0) == 0);
    CHECK(csv.find("0,0,0,0\n") != std::string::npos);
}

TEST_CASE("solve writes solution and stats with the declared schema") {
    const auto dir = sandbox("solve");
    const auto r = run_cli("--out-dir " + dir.string() + " solve --N 1.9", dir / "run");
    REQUIRE(r.exit_code == 0);
    validate_file(dir / "stats.json", "stats.schema.json");
    const json stats = json::parse(slurp(dir / "stats.json"));
    CHECK(std::abs(stats["y0"].get<double>() - 2.6618) < 5e-4);
    const std::string csv = slurp(dir / "solution.csv");
    CHECK(csv.rfind("eta,y,yprime\n", 0) == 0);
}

TEST_CASE("enumerate at N = 0.5 finds the unique solution") {
    const auto dir = sandbox("enum05");
    const auto r = run_cli("--out-dir " + dir.string() + " enumerate --N 0.5", dir / "run");
    REQUIRE(r.exit_code == 0);
    validate_file(dir / "summary.json", "summary.schema.json");
    const json summary = json::parse(slurp(dir / "summary.json"));
    CHECK(summary["count"].get<int>() == 1);
    CHECK(summary["stopped_reason"].get<std::string>() == "event-exhausted");
    CHECK(fs::exists(dir / "solution_01.csv"));
    CHECK(fs::exists(dir / "branch.csv"));
}

TEST_CASE("enumerate above N2 exits with code 2 and a JSON diagnostic") {
    const auto dir = sandbox("enum30");
    const auto r = run_cli("--out-dir " + dir.string() + " enumerate --N 3.0", dir / "run");
    CHECK(r.exit_code == 2);
    const json diag = json::parse(r.err);
    CHECK(diag["error"].get<std::string>() == "domain");
    CHECK(diag["detail"].get<std::string>().find("N exceeds N2") != std::string::npos);
}

TEST_CASE("usage errors exit with code 1") {
    const auto dir = sandbox("usage");
    CHECK(run_cli("enumerate", dir / "r1").exit_code == 1);           // missing --N
    CHECK(run_cli("no-such-command", dir / "r2").exit_code == 1);     // unknown subcommand
    CHECK(run_cli("solve --N 1.0 --bogus 2", dir / "r3").exit_code == 1);  // unknown flag
    // domain validation of flag values
    const auto r =
        run_cli("gelfand --n 3 --kind neumann --level 0.5", dir / "r4");  // gamma must be < 0
    CHECK(r.exit_code == 1);
}

TEST_CASE("gelfand counting through the CLI") {
    const auto dir = sandbox("gelfand");
    const auto r = run_cli("--out-dir " + dir.string() +
                               " gelfand --n 2 --kind neumann --level -3 --curve curve.csv",
                           dir / "run");
    REQUIRE(r.exit_code == 0);
    validate_file(dir / "gelfand.json", "gelfand.schema.json");
    const json j = json::parse(slurp(dir / "gelfand.json"));
    CHECK(j["count"].get<int>() == 1);
    CHECK_FALSE(j["truncated"].get<bool>());
    const std::string curve = slurp(dir / "curve.csv");
    CHECK(curve.rfind("sigma,value\n", 0) == 0);
}

TEST_CASE("fields pipeline: solve then map to dimensional profiles") {
    const auto dir = sandbox("fields");
    REQUIRE(run_cli("--out-dir " + dir.string() + " solve --N 1.9", dir / "r1").exit_code == 0);

    const double G = 6.67428e-11, R = 287.0, T = 300.0, m_g = 5.0e18;
    const double a = G * m_g / (1.9 * R * T);
    json params;
    params["R"] = R;
    params["T"] = T;
    params["a"] = a;
    params["m_g"] = m_g;
    {
        std::ofstream out(dir / "params.json");
        out << params.dump(2);
    }
    const auto r = run_cli("--out-dir " + dir.string() + " fields --solution " +
                               (dir / "solution.csv").string() + " --params " +
                               (dir / "params.json").string(),
                           dir / "r2");
    REQUIRE(r.exit_code == 0);
    std::ifstream csv(dir / "fields.csv");
    std::string header, first, last, line;
    std::getline(csv, header);
    CHECK(header == "r,rho,p,g");
    while (std::getline(csv, line))
        if (!line.empty()) last = line;
    // last column of the last row approximates -G m_g / a^2
    const double g_wall = -G * m_g / (a * a);
    const auto pos = last.rfind(',');
    const double g_val = std::stod(last.substr(pos + 1));
    CHECK(std::abs(g_val - g_wall) < 1e-6 * std::abs(g_wall));
}

TEST_CASE("branch tracing with fold refinement") {
    const auto dir = sandbox("branch");
    const auto r = run_cli(
        "--out-dir " + dir.string() + " branch --from 2.3 --folds 2 --refine-folds", dir / "run");
    REQUIRE(r.exit_code == 0);
    validate_file(dir / "branch.json", "branch.schema.json");
    const json j = json::parse(slurp(dir / "branch.json"));
    CHECK(std::abs(j["N2_fold"].get<double>() - 2.51755148) < 1e-5);
    CHECK(std::abs(j["N1_fold"].get<double>() - 1.8427) < 5e-4);
}

TEST_CASE("config file values are applied and overridden by flags") {
    const auto dir = sandbox("config");
    {
        std::ofstream out(dir / "run.cfg");
        out << "out-dir=" << (dir / "from_config").string() << "\n";
        out << "order=4\n";
    }
    const auto r = run_cli("--config " + (dir / "run.cfg").string() + " thresholds", dir / "r1");
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(dir / "from_config" / "thresholds.json"));

    // flag wins over the config file
    const auto r2 = run_cli("--config " + (dir / "run.cfg").string() + " --out-dir " +
                                (dir / "flag_wins").string() + " thresholds",
                            dir / "r2");
    REQUIRE(r2.exit_code == 0);
    CHECK(fs::exists(dir / "flag_wins" / "thresholds.json"));
}

TEST_CASE("reproduce-paper smoke run (thresholds only)") {
    const auto dir = sandbox("repro");
    const auto r = run_cli("--out-dir " + dir.string() + " reproduce-paper --only thresholds",
                           dir / "run");
    REQUIRE(r.exit_code == 0);
    validate_file(dir / "report.json", "report.schema.json");
    CHECK(r.out.find("[PASS] thresholds.N2") != std::string::npos);
    CHECK(r.out.find("[PASS] thresholds.N1") != std::string::npos);
}
