#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "stratwave/cli/cli.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using stratwave::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("stratwave_cli_" + std::to_string(std::rand()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("catalog prints dimensions") {
    auto r = call({"catalog", "heisenberg:2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("p=1,d=2,k=0") != std::string::npos);
    auto split = call({"catalog", "diamond", "1", "2"});
    CHECK(split.code == 0);
    CHECK(split.out.find("p=1,d=2,k=1") != std::string::npos);
    auto j = call({"catalog", "htype:4,3", "--as-json"});
    CHECK(json::parse(j.out)["p"] == 3);
  }

  TEST_CASE("exit codes") {
    CHECK(call({"decay", "--no-such-flag"}).code == 64);
    CHECK(call({}).code == 64);
    CHECK(call({"frobnicate"}).code == 64);
    CHECK(call({"--help"}).code == 0);
    auto zero = call({"kernel", "--t", "0"});
    CHECK(zero.code == 1);
    CHECK(zero.err.find("t = 0") != std::string::npos);
    CHECK(call({"catalog", "heisenberg:0"}).code == 1);
  }

  TEST_CASE("rank verdicts") {
    auto bad = call({"rank", "--group", "tensor_heisenberg:1,1", "--samples", "4"});
    CHECK(bad.code == 2);
    CHECK(json::parse(bad.out)["verdict"] == "fail");
    auto good = call({"rank", "--group", "htype:4,2", "--samples", "4"});
    CHECK(good.code == 0);
    CHECK(json::parse(good.out)["verdict"] == "pass");
  }

  TEST_CASE("selftest csv") {
    auto r = call({"special", "--selftest"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("check,value,threshold,pass\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 15);
  }

  TEST_CASE("kernel json keys") {
    auto r = call({"kernel", "--group", "heisenberg:1", "--t", "2", "--point", "0.1,0.2,0.3"});
    REQUIRE(r.code == 0);
    auto res = json::parse(r.out)["result"];
    for (const char* key : {"value_re", "value_im", "tail_bound", "quad_error", "nodes"}) CHECK(res.contains(key));
    CHECK(call({"kernel", "--group", "heisenberg:1", "--point", "1,2"}).code == 1);
  }

  TEST_CASE("decay csv is reproducible") {
    TempDir dir;
    auto a = dir.path / "a.csv", b = dir.path / "b.csv", j = dir.path / "s.json";
    std::vector<std::string> base{"decay", "--group", "heisenberg:1", "--t", "2:20:4log", "--mmax", "3"};
    auto first = base, second = base;
    first.insert(first.end(), {"--csv", a.string(), "--json", j.string()});
    second.insert(second.end(), {"--csv", b.string(), "--jobs", "2"});
    auto r1 = call(first);
    auto r2 = call(second);
    CHECK(r1.code != 1);
    CHECK(r2.code == r1.code);
    std::string csv = slurp(a);
    CHECK(!csv.empty());
    CHECK(csv == slurp(b));
    CHECK(csv.rfind("t,Z1,re,im,modulus,tail_bound,quad_error,nodes,status\n", 0) == 0);
    auto summary = json::parse(slurp(j));
    for (const char* key : {"slope", "ci", "theory"}) CHECK(summary["result"].contains(key));
    CHECK(summary.contains("verdict"));
    CHECK(summary["config"]["m_max"] == 3);
    CHECK(summary["config"]["tol"] == 1e-6);
  }

  TEST_CASE("config file and precedence") {
    TempDir dir;
    auto cfg = dir.path / "run.json";
    std::ofstream(cfg) << R"({"group": "htype:4,2", "samples": 3, "seed": 7})";
    auto r = call({"--config", cfg.string(), "rank", "--samples", "2"});
    CHECK(r.code == 0);
    auto s = json::parse(r.out);
    CHECK(s["config"]["group"] == "htype:4,2");
    CHECK(s["config"]["samples"] == 2);
    CHECK(s["config"]["seed"] == 7);

    // A summary can be fed back and reproduces the run.
    auto echo = dir.path / "echo.json";
    std::ofstream(echo) << r.out;
    auto again = call({"rank", "--config", echo.string()});
    CHECK(again.out == r.out);

    std::ofstream(dir.path / "broken.json") << "{\"samples\": \"many\"}";
    CHECK(call({"rank", "--config", (dir.path / "broken.json").string()}).code == 1);
  }
}
