#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/output.hpp"
#include "cli/run.hpp"
#include "wavebound/errors.hpp"

using namespace wavebound;
using namespace wavebound::cli;
namespace fs = std::filesystem;

namespace {

int run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "wavebound");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "wavebound_cli_tests";
  fs::create_directories(d);
  const fs::path p = d / name;
  fs::remove(p);
  fs::remove(p.string() + ".json");
  return p;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("grid flags") {
    const Grid a = parse_grid_flag("0.5");
    CHECK(a.start == 0.5);
    CHECK(a.count == 1);
    const Grid b = parse_grid_flag("1e-1:1e-3:5:log");
    CHECK(b.spacing == Grid::Spacing::log);
    CHECK(b.count == 5);
    CHECK(b.values().back() == doctest::Approx(1e-3));
    CHECK(parse_grid_flag("0:1:3").spacing == Grid::Spacing::linear);
    CHECK_THROWS_AS(parse_grid_flag("a:b"), ValidationError);
    CHECK_THROWS_AS(parse_grid_flag("1:2:0"), ValidationError);
    CHECK_THROWS_AS(parse_grid_flag("-1:2:3:log"), ValidationError);
  }

  TEST_CASE("strict config parsing") {
    const nlohmann::json j = {{"command", "profile"},
                              {"operator", {{"family", "random"}, {"width", 2.0}, {"seed", 4}}},
                              {"grids", {{"T", {{"start", 1.0}, {"stop", 100.0}, {"count", 3}, {"spacing", "log"}}}}},
                              {"params", {{"route", "propagation"}}}};
    const RunConfig c = parse_config(j);
    CHECK(c.op.family == "random");
    CHECK(c.op.seed == 4);
    REQUIRE(c.T.has_value());
    CHECK(c.T->values()[1] == doctest::Approx(10.0));
    CHECK(c.params.route == "propagation");
    CHECK(parse_config(to_json(c)).op.width == 2.0);
    CHECK_THROWS_AS(parse_config({{"bogus", 1}}), ValidationError);
    CHECK_THROWS_AS(parse_config({{"operator", {{"colour", "red"}}}}), ValidationError);
    CHECK_THROWS_AS(parse_config({{"operator", {{"seed", -3}}}}), ValidationError);
    CHECK_THROWS_AS(parse_config({{"operator", {{"width", "wide"}}}}), ValidationError);
  }

  TEST_CASE("config hash ignores output paths and threads") {
    RunConfig a;
    a.command = "scales";
    RunConfig b = a;
    b.out_csv = "x.csv";
    b.threads = 7;
    CHECK(config_hash(a) == config_hash(b));
    // parameters of another family do not enter the hash
    b.op.lambda = 3.0;
    CHECK(config_hash(a) == config_hash(b));
    b.op.family = "fibonacci";
    const std::uint64_t h3 = config_hash(b);
    CHECK(h3 != config_hash(a));
    b.op.lambda = 4.0;
    CHECK(config_hash(b) != h3);
  }

  TEST_CASE("csv rendering") {
    Table t;
    t.columns = {"x", "n", "s"};
    t.add({0.1, 3L, std::string("ok")});
    t.add({std::numeric_limits<double>::infinity(), -1L, std::string("")});
    const std::string csv = render_csv(t, 0xabcULL);
    CHECK(csv.rfind("# wavebound 0.1.0 config-hash=0000000000000abc\n", 0) == 0);
    CHECK(csv.find("x,n,s\n") != std::string::npos);
    CHECK(csv.find("0.10000000000000001,3,ok\n") != std::string::npos);
    CHECK(csv.find("inf,-1,\n") != std::string::npos);
    CHECK(csv.find('\r') == std::string::npos);
  }

  TEST_CASE("validation rejects bad inputs") {
    RunConfig c;
    c.command = "profile";
    c.T = Grid{-1.0, -1.0, 1};
    CHECK_THROWS_AS(validate(c), ValidationError);
    c.T = Grid{1.0, 1.0, 1};
    c.op.family = "martian";
    CHECK_THROWS_AS(validate(c), ValidationError);
  }

  TEST_CASE("repeated runs produce byte-identical output") {
    const fs::path a = scratch("scales_a.csv"), b = scratch("scales_b.csv");
    const std::vector<std::string> args = {"scales", "--op", "fibonacci", "--lambda", "5", "--E", "0.5", "--eps", "1e-1:1e-3:4:log"};
    auto with = [&](const fs::path& p) {
      auto v = args;
      v.push_back("--out");
      v.push_back(p.string());
      return v;
    };
    CHECK(run_args(with(a)) == 0);
    CHECK(run_args(with(b)) == 0);
    CHECK(fs::exists(a.string() + ".json"));
    const std::string ca = slurp(a);
    CHECK(ca == slurp(b));
    CHECK(ca.rfind("# wavebound 0.1.0 config-hash=", 0) == 0);
    const auto sa = nlohmann::json::parse(slurp(a.string() + ".json"));
    CHECK(sa["command"] == "scales");
    CHECK(sa["exit_code"] == 0);
    CHECK(sa["config_hash"].get<std::string>().size() == 16);
  }

  TEST_CASE("thread count does not change results") {
    const fs::path a = scratch("prof_1.csv"), b = scratch("prof_3.csv");
    CHECK(run_args({"profile", "--op", "random", "--width", "2", "--seed", "3", "--T", "5", "--L", "2:20:4", "--threads",
                    "1", "--out", a.string()}) == 0);
    CHECK(run_args({"profile", "--op", "random", "--width", "2", "--seed", "3", "--T", "5", "--L", "2:20:4", "--threads",
                    "3", "--out", b.string()}) == 0);
    CHECK(slurp(a) == slurp(b));
  }

  TEST_CASE("exit codes and no partial output on errors") {
    const fs::path p = scratch("bad.csv");
    CHECK(run_args({"profile", "--op", "free", "--T", "-1", "--out", p.string()}) == 2);
    CHECK_FALSE(fs::exists(p));
    CHECK_FALSE(fs::exists(p.string() + ".json"));
    CHECK(run_args({"nonsense"}) == 2);
    CHECK(run_args({"profile", "--no-such-flag", "1"}) == 2);
    CHECK(run_args({"verify", "--suite", "unknown", "--out", p.string()}) == 2);
    CHECK_FALSE(fs::exists(p));
    const fs::path cfg = scratch("cfg.json");
    std::ofstream(cfg) << R"({"command": "profile", "operator": {"family": "free", "typo": 1}})";
    CHECK(run_args({"profile", "--config", cfg.string(), "--out", p.string()}) == 2);
    CHECK_FALSE(fs::exists(p));
  }

  TEST_CASE("config file with flag override") {
    const fs::path cfg = scratch("cfg2.json"), p = scratch("cfg2.csv");
    std::ofstream(cfg) << R"({"command": "fib", "operator": {"family": "fibonacci", "lambda": 10}, "params": {"bands": 4}})";
    CHECK(run_args({"fib", "--config", cfg.string(), "--bands", "5", "--out", p.string()}) == 0);
    const auto s = nlohmann::json::parse(slurp(p.string() + ".json"));
    CHECK(s["config"]["params"]["bands"] == 5);
    CHECK(s["results"]["totals_match_q"] == true);
  }

  TEST_CASE("commands run in process") {
    RunConfig c;
    c.command = "lanczos";
    c.lattice.lanczos_size = 12;
    const CommandResult r = run_command(c);
    CHECK_FALSE(r.table.rows.empty());
    RunConfig v;
    v.command = "verify";
    v.params.suite = "lanczos";
    v.lattice.lanczos_size = 20;
    const CommandResult vr = run_command(v);
    CHECK_FALSE(vr.verification_failed);
    CHECK(vr.summary["passed"] == true);
  }
}
