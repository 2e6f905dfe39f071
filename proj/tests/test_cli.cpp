#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ehpc/cli.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

using namespace ehpc;
using Json = nlohmann::json;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    Run r;
    r.code = cli_main(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("threshold summary for the two-point law") {
    const Run r = run({"threshold", "--dist", "bernoulli:xlo=0,xhi=5,p=0.5", "--reward", "awgn"});
    REQUIRE(r.code == kExitOk);
    const Json j = Json::parse(r.out);
    CHECK(j["c_star"].get<double>() == 1.0);
    CHECK(j["c_upper"].get<double>() == doctest::Approx(11.0 / 3.0).epsilon(1e-12));
    CHECK(j["method"] == "discrete-exact");
}

TEST_CASE("bounds include the closed forms for two-point laws") {
    const Run r = run({"bounds", "--dist", "bernoulli:xlo=0,xhi=5,p=0.5"});
    REQUIRE(r.code == kExitOk);
    const Json j = Json::parse(r.out);
    CHECK(j["c_lower"].get<double>() == doctest::Approx(1.0));
    CHECK(j["c_upper"]["value"].get<double>() == doctest::Approx(j["closed_form"]["c_upper"].get<double>()));
    CHECK_FALSE(j["c_upper"]["unbounded_within_cap"].get<bool>());
}

TEST_CASE("sweep emits one CSV row per mean") {
    const Run r = run({"sweep", "--family", "geometric", "--regime", "small", "--mu", "0.01,0.1,1"});
    REQUIRE(r.code == kExitOk);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "mu,c_star,psi,ratio");
    CHECK(rows[1] == "0.01,0.01,0.01,1");
    CHECK(rows[3] == "1,1,1,1");
    CHECK(r.out.find('\r') == std::string::npos);
}

TEST_CASE("simulate is reproducible and seed-sensitive") {
    const std::vector<std::string> args{"simulate", "--dist", "bernoulli:xlo=0,xhi=5,p=0.5", "--capacity", "2",
                                        "--policy", "modified:eps=0.25", "--steps", "100000", "--seed", "7"};
    const Run a = run(args), b = run(args);
    REQUIRE(a.code == kExitOk);
    CHECK(a.out == b.out);
    const Json j = Json::parse(a.out);
    CHECK(j["seed"] == 7);
    CHECK(j["policy"] == "modified:eps=0.25");
    CHECK(j["avg_reward"].get<double>() == doctest::Approx(0.2777).epsilon(0.01));
    auto other = args;
    other.back() = "8";
    CHECK(run(other).out != a.out);
}

TEST_CASE("simulate defaults to seed 42") {
    const Run r = run({"simulate", "--dist", "exponential:eta=1", "--capacity", "1", "--steps", "1000"});
    REQUIRE(r.code == kExitOk);
    CHECK(Json::parse(r.out)["seed"] == 42);
}

TEST_CASE("paired comparison through the command line") {
    const Run r = run({"simulate", "--dist", "exponential:eta=1", "--capacity", "2.2", "--policy", "modified",
                       "--compare", "greedy", "--steps", "50000", "--replicates", "10"});
    REQUIRE(r.code == kExitOk);
    const Json j = Json::parse(r.out);
    CHECK(j["replicates"] == 10);
    CHECK(j["mean_difference"].get<double>() > 0.0);
}

TEST_CASE("solve and curves CSV layouts") {
    const Run s = run({"solve", "--dist", "uniform:omega=2", "--capacity", "1", "--grid", "64"});
    REQUIRE(s.code == kExitOk);
    auto rows = lines(s.out);
    REQUIRE(rows.size() == 65);
    CHECK(rows[0] == "b,h,g_opt");
    CHECK(rows[1] == "0,0,0");

    const Run c = run({"curves", "--dist", "uniform:omega=2", "--cmin", "0.5", "--cmax", "2", "--points", "4"});
    REQUIRE(c.code == kExitOk);
    rows = lines(c.out);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == "c,gamma_star,gamma_greedy,gamma_upper");
    CHECK(rows[1].rfind("0.5,", 0) == 0);
    CHECK(rows[4].rfind("2,", 0) == 0);
}

TEST_CASE("--out writes the table to a file") {
    const auto path = std::filesystem::temp_directory_path() / "ehpc_cli_test_sweep.csv";
    const Run r = run({"sweep", "--family", "poisson", "--regime", "small", "--mu", "0.5", "--out", path.string()});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.empty());
    std::ifstream f(path);
    const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(text.rfind("mu,c_star,psi,ratio\n0.5,0.6487212707,", 0) == 0);
    std::filesystem::remove(path);
}

TEST_CASE("--json switches tables to JSON") {
    const Run r = run({"sweep", "--family", "poisson", "--regime", "small", "--mu", "0.5", "--json"});
    REQUIRE(r.code == kExitOk);
    const Json j = Json::parse(r.out);
    CHECK(j[0]["closed_form"].get<double>() == doctest::Approx(std::expm1(0.5)));
}

TEST_CASE("phicheck reports monotonicity") {
    const Run r = run({"phicheck", "--dist", "exponential:eta=1", "--capacity", "0.9", "--b-points", "5",
                       "--g-points", "20"});
    REQUIRE(r.code == kExitOk);
    CHECK(Json::parse(r.out)["nondecreasing"].get<bool>());
}

TEST_CASE("verify runs selected criteria") {
    const Run r = run({"verify", "--only", "3"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.rfind("[PASS] 3 ", 0) == 0);
}

TEST_CASE("exit codes") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"threshold", "--dist", "uniform:omega=2", "--bogus"}).code == kExitUsage);
    CHECK(run({"threshold"}).code == kExitUsage);
    CHECK(run({"simulate", "--dist", "uniform:omega=2", "--capacity", "abc"}).code == kExitUsage);

    CHECK(run({"threshold", "--dist", "uniform:omega=-1"}).code == kExitDomain);
    CHECK(run({"threshold", "--dist", "nosuch:x=1"}).code == kExitDomain);
    CHECK(run({"simulate", "--dist", "uniform:omega=2", "--capacity", "-1"}).code == kExitDomain);
    CHECK(run({"simulate", "--dist", "uniform:omega=2", "--capacity", "1", "--policy", "modified:eps=0.9"}).code ==
          kExitDomain);
    CHECK(run({"sweep", "--family", "geometric", "--regime", "large", "--mu", "2"}).code == kExitDomain);
    CHECK(run({"threshold", "--dist", "uniform:omega=2", "--reward", "linear:slope=1"}).code == kExitDomain);

    const Run slow = run({"solve", "--dist", "exponential:eta=1", "--capacity", "3", "--max-sweeps", "1"});
    CHECK(slow.code == kExitConvergence);
    CHECK_FALSE(slow.err.empty());

    const Run help = run({"--help"});
    CHECK(help.code == kExitOk);
    CHECK(help.out.find("threshold") != std::string::npos);
}
