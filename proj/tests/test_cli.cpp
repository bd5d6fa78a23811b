#include "blowup/commands.hpp"
#include "blowup/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace blowup;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("blowup_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const auto path = dir / "scenario.toml";
    std::ofstream(path) << text;
    return path;
}

const char* kPredictCubic = R"(command = "predict"
[problem]
p = 2
alpha = 0
[nonlinearity]
power_q = 3
[constants]
gamma = 0
)";

}  // namespace

TEST_CASE("config parsing") {
    const auto c = Config::parse(R"(top = 1
[a]
x = 2.5   # trailing comment
flag = true
name = "with # hash"
list = [1, 2, 3.5]
)");
    CHECK(c.number("", "top") == 1.0);
    CHECK(c.number("a", "x") == 2.5);
    CHECK(c.boolean("a", "flag", false));
    CHECK(c.string("a", "name") == "with # hash");
    CHECK(c.numbers("a", "list", {}) == std::vector<double>{1, 2, 3.5});
    CHECK(c.number("a", "missing", 7.0) == 7.0);
    CHECK_NOTHROW(c.reject_unknown());
}

TEST_CASE("config errors carry line numbers") {
    auto message = [](const std::string& text) {
        try {
            Config::parse(text, "s.toml");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ConfigError);
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("[a]\nx = 1\nx = 2\n").find("s.toml:3") != std::string::npos);
    CHECK(message("[a]\nx = oops\n").find("s.toml:2") != std::string::npos);
    CHECK(message("[a\n").find("s.toml:1") != std::string::npos);
    CHECK(message("[a]\nv = [1, x]\n").find("array") != std::string::npos);

    const auto c = Config::parse("[a]\nx = \"text\"\n", "s.toml");
    try {
        c.number("a", "x");
        FAIL("expected a type error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("s.toml:2: field 'a.x'") != std::string::npos);
    }
}

TEST_CASE("unknown keys are rejected") {
    const auto c = Config::parse("[a]\nx = 1\ntypo = 2\n", "s.toml");
    c.number("a", "x");
    try {
        c.reject_unknown();
        FAIL("expected rejection");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("'a.typo' (line 3)") != std::string::npos);
    }
}

TEST_CASE("overrides") {
    auto c = Config::parse("[tolerances]\nbeta_rel = 0.02\n");
    c.apply_overrides("tolerances.beta_rel=0.5, tolerances.C_rel=0.1");
    CHECK(c.number("tolerances", "beta_rel") == 0.5);
    CHECK(c.number("tolerances", "C_rel") == 0.1);
    CHECK_THROWS_AS(c.apply_overrides("nodot=1"), Error);
}

TEST_CASE("predict reproduces closed forms") {
    const auto rep = run_command("predict", Config::parse(kPredictCubic), {});
    const auto j = rep.to_json();
    CHECK(j["predictions"]["beta"].get<double>() == doctest::Approx(1.0));
    CHECK(j["predictions"]["psi_R"].get<double>() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(rep.exit_code() == 0);

    const auto xi = run_command("predict", Config::parse(R"([problem]
p = 2
[nonlinearity]
sigma = 2
[constants]
l1 = 0
c = 1
)"),
                                {});
    CHECK(xi.to_json()["predictions"]["xi0"].get<double>() == doctest::Approx(0.70710678).epsilon(1e-8));
}

TEST_CASE("exit codes") {
    const auto bad = run_command("predict", Config::parse("[problem]\np = 2\n[nonlinearity]\npower_q = 1\n"), {});
    CHECK(bad.exit_code() == 1);
    CHECK(bad.to_json()["errors"][0]["kind"] == "ConfigError");

    const auto miss = run_command(
        "predict", Config::parse("[problem]\np = 2\n[nonlinearity]\npower_q = 3\n[expect]\nbeta = 1.1\n"), {});
    CHECK(miss.exit_code() == 2);
    CHECK(miss.to_json()["overall"] == "fail");

    const auto unknown = run_command("ko-check", Config::parse("[ko]\npower_q = [3]\nbogus = 1\n"), {});
    CHECK(unknown.exit_code() == 1);
    CHECK_THROWS_AS(run_command("nonsense", Config::parse(""), {}), Error);
    CHECK_THROWS_AS(run_command("solve", Config::parse("command = \"predict\"\n"), {}), Error);
}

TEST_CASE("ko-check and karamata-probe") {
    const auto conv = run_command("ko-check", Config::parse("[ko]\np = [2]\npower_q = [3]\n"), {});
    CHECK(conv.exit_code() == 0);
    CHECK(conv.to_json()["fits"]["cases"][0]["convergent"] == true);
    const auto div = run_command("ko-check", Config::parse("[ko]\np = [2]\npower_q = [1]\n"), {});
    CHECK(div.to_json()["fits"]["cases"][0]["convergent"] == false);
    const auto integral = run_command(
        "ko-check", Config::parse("[ko]\np = [2]\npower_q = [3]\n[expect]\nintegral = 1.4142135623730951\n"), {});
    CHECK(integral.exit_code() == 0);

    const auto k = run_command("karamata-probe", Config::parse("[karamata]\nkind = \"power\"\nq = 1\nalpha = 0\n"), {});
    CHECK(k.exit_code() == 0);
    CHECK(k.to_json()["fits"]["l1"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("report is byte-identical across runs and matches the golden file") {
    const auto a = scratch("det_a"), b = scratch("det_b");
    const auto cfg_path = write_config(a, kPredictCubic);
    std::ostringstream log;
    CHECK(run_cli("predict", cfg_path.string(), {a.string()}, log) == 0);
    CHECK(run_cli("predict", cfg_path.string(), {b.string()}, log) == 0);
    const std::string ra = slurp(a / "report.json");
    CHECK(ra == slurp(b / "report.json"));
    CHECK(fs::exists(a / "timing.json"));
    CHECK(ra == slurp(fs::path(BLOWUP_GOLDEN_DIR) / "predict_cubic.json"));
}

TEST_CASE("the variant switch changes the hash and the xi prediction") {
    const auto cfg = Config::parse("[problem]\np = 3\n[nonlinearity]\npower_q = 4\n[constants]\nl1 = 0.5\nc = 1\n");
    CommandOptions th, pr;
    pr.variant = XiVariant::ProofNumeratorP;
    const auto a = run_command("predict", cfg, th).to_json();
    const auto b = run_command("predict", cfg, pr).to_json();
    CHECK(a["input_hash"] != b["input_hash"]);
    CHECK(a["predictions"]["xi0"] != b["predictions"]["xi0"]);
    CHECK(a["predictions"]["xi0"] == b["predictions"]["xi0_other_variant"]);
}

TEST_CASE("solve writes the profile with its sidecar") {
    const auto dir = scratch("solve");
    const auto cfg = write_config(dir, "[problem]\np = 2\n[nonlinearity]\npower_q = 3\n[solve]\nmode = \"dirichlet\"\nk = 2\n");
    CommandOptions opt;
    opt.out_dir = (dir / "out").string();
    std::ostringstream log;
    CHECK(run_cli("solve", cfg.string(), opt, log) == 0);
    CHECK(fs::exists(dir / "out" / "profile.csv"));
    CHECK(fs::exists(dir / "out" / "profile.meta.json"));
    std::ifstream csv(dir / "out" / "profile.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header.rfind("r,", 0) == 0);
}

TEST_CASE("missing config file is an execution error") {
    std::ostringstream log;
    CHECK(run_cli("predict", "/nonexistent/scenario.toml", {}, log) == 1);
    CHECK(log.str().find("cannot open") != std::string::npos);
}
