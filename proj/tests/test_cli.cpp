#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gbam/commands.hpp"
#include "gbam/metrics.hpp"
#include "gbam/scenario_file.hpp"

using namespace gbam;
using namespace gbam::literals;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("gbam_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& body) {
  const auto p = dir / name;
  std::ofstream(p, std::ios::binary) << body;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

// Every problem text from a document that should not parse.
std::string problems_of(const std::string& json) {
  try {
    parse_scenario_json(json, "doc");
  } catch (const ScenarioFileError& e) {
    std::string all;
    for (const auto& p : e.problems()) all += p + "\n";
    return all;
  }
  return "";
}

const std::string kSmallWorkloads = R"("workloads": [
    {"count": 150, "start_delay_s": 0},
    {"count": 150, "start_delay_s": 100},
    {"count": 150, "start_delay_s": 200}])";

std::string three_class_doc(const std::string& factory) {
  return R"({"capacity_kbps": 622000, "factory": ")" + factory +
         R"(", "classes": [{"bc_percent": 40}, {"bc_percent": 35}, {"bc_percent": 25}], )" +
         kSmallWorkloads + "}";
}

}  // namespace

TEST_CASE("percent conversion is exact") {
  CHECK(percent_of(622000_kbps, "40") == 248800_kbps);
  CHECK(percent_of(622000_kbps, "35") == 217700_kbps);
  CHECK(percent_of(622000_kbps, "12.5") == 77750_kbps);
  CHECK(percent_of(622000_kbps, "0") == 0_kbps);
  CHECK(percent_of(622000_kbps, "100") == 622000_kbps);
  // 0.01% of 622000 is 62.2 kbps.
  CHECK_FALSE(percent_of(622000_kbps, "0.01"));
  CHECK_FALSE(percent_of(622000_kbps, "-5"));
  CHECK_FALSE(percent_of(622000_kbps, "abc"));
}

TEST_CASE("scenario documents") {
  SUBCASE("explicit caps") {
    const auto s = parse_scenario_json(R"({
      "name": "two", "seed": 9, "capacity_kbps": 1000,
      "classes": [{"bc_kbps": 600, "htl_kbps": 100, "lth_percent": 0},
                  {"bc_percent": 40, "htl_kbps": 0, "lth_percent": 20}]})",
                                       "ignored");
    CHECK(s.name == "two");
    CHECK(s.seed == 9);
    const auto cfg = s.bam_config();
    CHECK(cfg.bc(1) == 400_kbps);
    CHECK(cfg.lth_cap(1) == 200_kbps);  // percents are of capacity, not BC
    CHECK(cfg.htl_cap(0) == 100_kbps);
    REQUIRE(s.workloads.size() == 2);
    CHECK(s.workloads[0].count == 1000);
    CHECK(s.workloads[1].holding_mean_s == 250.0);
  }
  SUBCASE("name defaults to the given stem") {
    const auto s = parse_scenario_json(three_class_doc("rdm"), "stem");
    CHECK(s.name == "stem");
    CHECK(s.seed == 1);
    CHECK(static_max_allocation(s.bam_config(), 1) == 373200_kbps);
  }
  SUBCASE("problems are reported with their location") {
    CHECK(contains(problems_of(R"({"capacity_kbps": 10, "classes": [{"bc_kbps": 5,
        "htl_kbps": 0, "lth_kbps": 0, "colour": 1}]})"),
                   "$.classes[0]"));
    CHECK(contains(problems_of(R"({"capacity_kbps": 10, "classes": [{"bc_kbps": 5,
        "htl_kbps": 0, "lth_kbps": 0, "colour": 1}]})"),
                   "colour"));
    CHECK(contains(problems_of(R"({"capacity_kbps": 10, "classes": [{"bc_kbps": 5,
        "bc_percent": 50, "htl_kbps": 0, "lth_kbps": 0}]})"),
                   "$.classes[0]"));
    CHECK(contains(problems_of(R"({"capacity_kbps": 10, "factory": "rdm",
        "classes": [{"bc_kbps": 5, "htl_kbps": 1}]})"),
                   "cap keys are not allowed"));
    CHECK(contains(problems_of(R"({"capacity_kbps": 10, "classes": [{"bc_kbps": 5,
        "lth_kbps": 0}]})"),
                   "$.classes[0]: missing htl_kbps or htl_percent"));
    CHECK(contains(problems_of(R"({"capacity_kbps": 10, "factory": "grdm",
        "classes": [{"bc_kbps": 5}]})"),
                   "private"));
    CHECK(contains(problems_of(R"({"classes": []})"), "capacity_kbps"));
    CHECK(contains(problems_of(R"({"capacity_kbps": 10, "factory": "mam",
        "classes": [{"bc_kbps": 5}], "workloads": [{}, {}]})"),
                   "workloads"));
    CHECK(contains(problems_of(R"({"capacity_kbps": 10, "factory": "mam",
        "classes": [{"bc_percent": 33.3}]})"),
                   "$.classes[0]"));
  }
  SUBCASE("syntax errors carry a position") {
    const auto p = problems_of("{\n  \"capacity_kbps\": 10,\n  oops\n}");
    CHECK(contains(p, "JSON syntax error"));
    CHECK(contains(p, "line 3"));
  }
}

TEST_CASE("validate") {
  const auto dir = scratch("validate");
  std::ostringstream out, err;

  SUBCASE("MAM fixture") {
    const auto rc = cli::cmd_validate(fs::path(GBAM_TEST_DATA_DIR) / "fixtures/scenario_01.json",
                                      out, err);
    CHECK(rc == cli::kExitOk);
    CHECK(contains(out.str(), "TC0    248800    0    0   248800  248800           248800"));
    CHECK(contains(out.str(), "sum of BCs: 622000 kbps"));
    CHECK(err.str().empty());
  }
  SUBCASE("RDM maxima") {
    const auto p = write_file(dir, "rdm.json", three_class_doc("rdm"));
    CHECK(cli::cmd_validate(p, out, err) == cli::kExitOk);
    CHECK(contains(out.str(), "TC0    248800       0    0   248800  622000           622000"));
    CHECK(contains(out.str(), "TC1    217700  217700    0        0  373200           373200"));
    CHECK(contains(out.str(), "TC2    155500  155500    0        0  155500           155500"));
  }
  SUBCASE("BCs above capacity") {
    const auto p = write_file(dir, "over.json", R"({"capacity_kbps": 622000, "factory": "mam",
      "classes": [{"bc_percent": 41}, {"bc_percent": 35}, {"bc_percent": 25}]})");
    CHECK(cli::cmd_validate(p, out, err) == cli::kExitFailure);
    CHECK(contains(err.str(), "SumExceedsCapacity"));
    CHECK(out.str().empty());
  }
  SUBCASE("schema errors fail with content status") {
    const auto p = write_file(dir, "bad.json", R"({"capacity_kbps": "lots", "classes": []})");
    CHECK(cli::cmd_validate(p, out, err) == cli::kExitFailure);
    CHECK(contains(err.str(), "capacity_kbps"));
  }
  SUBCASE("missing file is a usage error") {
    CHECK(cli::cmd_validate(dir / "nope.json", out, err) == cli::kExitUsage);
    CHECK(contains(err.str(), "nope.json"));
  }
}

TEST_CASE("tables match the golden file") {
  const auto tables = cli::render_tables();
  CHECK(tables == slurp(fs::path(GBAM_TEST_DATA_DIR) / "golden/tables.txt"));
  std::ostringstream out;
  CHECK(cli::cmd_tables(out) == cli::kExitOk);
  CHECK(out.str() == tables);
  CHECK(contains(tables, "248.80"));
  CHECK(contains(tables, "622.00"));
}

TEST_CASE("run writes the CSV files") {
  const auto dir = scratch("run");
  const auto scenario = write_file(dir, "s.json", three_class_doc("mam"));
  cli::RunOptions opts;
  opts.out_dir = dir / "out";
  std::ostringstream out, err;
  REQUIRE(cli::cmd_run(scenario, opts, out, err) == cli::kExitOk);
  CHECK(err.str().empty());
  CHECK(contains(out.str(), "engine: gbam:mam"));

  const auto series = parse_load_csv(opts.out_dir / "load.csv", 3);
  Bandwidth peak;
  for (const auto& s : series.per_class[0]) peak = std::max(peak, s.load);
  CHECK(peak <= 248800_kbps);
  CHECK(peak > 0_kbps);
  CHECK(slurp(opts.out_dir / "summary.csv").rfind("class,offered,", 0) == 0);
  CHECK(contains(slurp(opts.out_dir / "meta.csv"), "engine,gbam:mam\n"));

  SUBCASE("the oracle gives the same summary") {
    cli::RunOptions o2 = opts;
    o2.engine = "mam";
    o2.out_dir = dir / "oracle";
    REQUIRE(cli::cmd_run(scenario, o2, out, err) == cli::kExitOk);
    CHECK(slurp(o2.out_dir / "summary.csv") == slurp(opts.out_dir / "summary.csv"));
    CHECK(slurp(o2.out_dir / "load.csv") == slurp(opts.out_dir / "load.csv"));
  }
  SUBCASE("bad engine") {
    cli::RunOptions o2 = opts;
    o2.engine = "fifo";
    CHECK(cli::cmd_run(scenario, o2, out, err) == cli::kExitUsage);
  }
  SUBCASE("unwritable output") {
    cli::RunOptions o2 = opts;
    o2.out_dir = scenario / "sub";
    CHECK(cli::cmd_run(scenario, o2, out, err) == cli::kExitUsage);
  }
}

TEST_CASE("compare") {
  const auto dir = scratch("compare");
  const auto scenario = write_file(dir, "s.json", three_class_doc("mam"));
  std::ostringstream out, err;

  SUBCASE("default pairs agree") {
    cli::CompareOptions opts;
    opts.seeds = 2;
    CHECK(cli::cmd_compare(scenario, opts, out, err) == cli::kExitOk);
    CHECK(contains(out.str(), "gbam:rdm=rdm: equivalent on 2 seed(s)"));
  }
  SUBCASE("mismatched engines diverge") {
    cli::CompareOptions opts;
    opts.pairs = "gbam:mam=rdm";
    opts.seeds = 1;
    CHECK(cli::cmd_compare(scenario, opts, out, err) == cli::kExitFailure);
    CHECK(contains(out.str(), "diverged on 1 of 1"));
    CHECK(contains(err.str(), "first divergence at event"));
  }
  SUBCASE("zero seeds") {
    cli::CompareOptions opts;
    opts.seeds = 0;
    CHECK(cli::cmd_compare(scenario, opts, out, err) == cli::kExitOk);
    CHECK(out.str() == "no runs\n");
  }
  SUBCASE("malformed pairs") {
    CHECK_FALSE(cli::parse_pairs("gbam:mam"));
    CHECK_FALSE(cli::parse_pairs("gbam:mam=lru"));
    CHECK(cli::parse_pairs("gbam=mam,rdm=gbam:rdm")->size() == 2);
    cli::CompareOptions opts;
    opts.pairs = "x";
    CHECK(cli::cmd_compare(scenario, opts, out, err) == cli::kExitUsage);
  }
}

TEST_CASE("the executable maps errors to exit codes") {
  const auto dir = scratch("exe");
  const std::string cli = GBAM_CLI_PATH;
  auto status = [&](const std::string& args) {
    const auto rc = std::system((cli + " " + args + " >" + (dir / "o").string() + " 2>&1").c_str());
    return WEXITSTATUS(rc);
  };
  CHECK(status("tables") == 0);
  CHECK(status("--help") == 0);
  CHECK(status("frobnicate") == 2);
  CHECK(status("validate") == 2);
  CHECK(status("validate " + (dir / "absent.json").string()) == 2);
  const auto bad = write_file(dir, "bad.json", "{}");
  CHECK(status("validate " + bad.string()) == 1);
}
