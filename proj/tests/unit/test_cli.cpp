#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "mmse/cli.hpp"

using namespace mmse;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("coeffs --r 4") {
    const Run r = run({"coeffs", "--r", "4"});
    REQUIRE(r.code == kExitOk);
    const json j = json::parse(r.out);
    CHECK(j["r"] == 4);
    CHECK(j["C_r"] == "4");
    REQUIRE(j["terms"].size() == 2);
    CHECK(j["terms"][0]["lambda"] == json::array({0, 0, 1}));
    CHECK(j["terms"][0]["e"] == "1");
    CHECK(j["terms"][1]["lambda"] == json::array({2}));
    CHECK(j["terms"][1]["e"] == "-3");
  }

  TEST_CASE("coeffs --check-recurrence") {
    const Run r = run({"coeffs", "--r", "9", "--check-recurrence"});
    CHECK(r.code == kExitOk);
    const json j = json::parse(r.out);
    CHECK(j["recurrence_matches"] == true);
    CHECK(j["symbolic_matches"] == true);
    const Run csv = run({"coeffs", "--r", "4", "--format", "csv"});
    CHECK(csv.out == "lambda,e\n\"(0,0,1)\",1\n\"(2)\",-3\n");
  }

  TEST_CASE("approx on Gaussian input") {
    const Run r = run({"approx", "--dist", "gaussian", "--n", "1"});
    REQUIRE(r.code == kExitOk);
    const json j = json::parse(r.out);
    CHECK(j["error"].get<double>() <= 1e-10);
    CHECK(std::fabs(j["coeffs"][0].get<double>()) < 1e-8);
    CHECK(j["coeffs"][1].get<double>() == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(j["slope"].is_null());
  }

  TEST_CASE("approx lists, rate and csv") {
    const Run r = run({"approx", "--n", "4,8,12,16", "--rate", "--precision", "extended", "-q"});
    REQUIRE(r.code == kExitOk);
    const json j = json::parse(r.out);
    CHECK(j["n"].size() == 4);
    CHECK(j["slope"].get<double>() < -2);
    const Run dflt = run({"approx", "--rate", "-q"});
    REQUIRE(dflt.code == kExitOk);
    CHECK(json::parse(dflt.out)["n"] == json::parse("[2,4,6,8,10,12,14,16]"));
    const Run g = run({"approx", "--dist", "gaussian", "--rate", "-q"});
    CHECK(json::parse(g.out)["note"] == "exact at n=2");
    const Run csv = run({"approx", "--n", "2,4", "--format", "csv"});
    CHECK(csv.out.rfind("n,error\n2,", 0) == 0);
    const Run h = run({"approx", "--n", "40", "--method", "hankel"});
    CHECK(h.code == kExitInvariant);
    CHECK(h.err.find("ill-conditioned") != std::string::npos);
  }

  TEST_CASE("eval and deriv") {
    const Run e = run({"eval", "--dist", "twopoint", "--what", "f", "--grid", "-1:1:3"});
    REQUIRE(e.code == kExitOk);
    std::istringstream rows(e.out);
    std::string header, line;
    std::getline(rows, header);
    CHECK(header == "y,value");
    for (double y : {-1.0, 0.0, 1.0}) {
      REQUIRE(std::getline(rows, line));
      const auto comma = line.find(',');
      CHECK(std::stod(line.substr(0, comma)) == y);
      CHECK(std::stod(line.substr(comma + 1)) == doctest::Approx(std::tanh(y)).epsilon(1e-15));
    }
    const Run g = run({"eval", "--what", "gk", "--k", "2", "--grid", "0:1:2", "--format", "json"});
    CHECK(json::parse(g.out)["value"].size() == 2);
    const Run d = run({"deriv", "--dist", "uniform", "--r", "4", "--check-fd", "--bound", "-q"});
    CHECK(d.code == kExitOk);
    CHECK(d.out.rfind("y,value,fd,abs_diff\n", 0) == 0);
    CHECK(d.out.find("\"holds\": true") != std::string::npos);
    const Run dj = run({"deriv", "--r", "3", "--bound", "--format", "json", "-q"});
    CHECK(json::parse(dj.out)["bound"]["q_r"] == 1);
  }

  TEST_CASE("freud") {
    const Run f = run({"freud", "--dist", "uniform", "--mrs", "1,4,9", "--check"});
    REQUIRE(f.code == kExitOk);
    const json j = json::parse(f.out);
    CHECK(j["freud"]["pass"] == true);
    CHECK(j["mrs"].size() == 3);
    CHECK(j["mrs"][2]["a_n"].get<double>() <= j["mrs"][2]["upper_bound"].get<double>());
    const Run s = run({"freud", "--dist", "shifted-uniform"});
    CHECK(s.code == kExitOk);
    CHECK(json::parse(s.out)["freud"]["conditions"][0]["verdict"] == "fail");
  }

  TEST_CASE("usage errors exit 2") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"coeffs"}).code == kExitUsage);
    CHECK(run({"coeffs", "--r", "1"}).code == kExitUsage);
    CHECK(run({"eval", "--grid", "1:0:4"}).code == kExitUsage);
    CHECK(run({"eval", "--what", "nope"}).code == kExitUsage);
    CHECK(run({"approx", "--n", "3,2"}).code == kExitUsage);
    CHECK(run({"approx", "--precision", "quad"}).code == kExitUsage);
    CHECK(run({"approx", "--format", "xml"}).code == kExitUsage);

    const auto path = std::filesystem::temp_directory_path() / "mmse_cli_bad_spec.json";
    {
      std::ofstream f(path);
      f << "{\"type\": \"uniform\", \"width\": 1}";
    }
    const Run bad = run({"eval", "--dist", path.string()});
    CHECK(bad.code == kExitUsage);
    CHECK(bad.err.find("halfwidth") != std::string::npos);
    std::filesystem::remove(path);
  }

  TEST_CASE("output is deterministic and can go to a file") {
    const std::vector<std::string> args{"approx", "--dist", "triangular", "--n", "2,4,6", "--rate", "-q"};
    const Run a = run(args), b = run(args);
    CHECK(a.out == b.out);
    const auto path = std::filesystem::temp_directory_path() / "mmse_cli_out.json";
    auto with_output = args;
    with_output.insert(with_output.end(), {"--output", path.string()});
    const Run c = run(with_output);
    CHECK(c.out.empty());
    std::ifstream f(path);
    const std::string written((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(written == a.out);
    std::filesystem::remove(path);
  }
}

TEST_SUITE("verify") {
  TEST_CASE("battery passes on the built-in families") {
    const Run r = run({"verify", "-q"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("FAIL") == std::string::npos);
  }

  TEST_CASE("a corrupted coefficient flips the exit code") {
    const Run r = run({"verify", "-q", "--inject", "corrupt-e"});
    CHECK(r.code == kExitInvariant);
    CHECK(r.out.find("FAIL") != std::string::npos);
  }
}
