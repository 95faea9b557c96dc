#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "trilinear/cli.hpp"
#include "trilinear/csv.hpp"

using namespace trilinear;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "trilinear");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

csv::Table parse(const std::string& text) {
  std::istringstream in(text);
  return csv::read(in);
}

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("trilinear_test_" + name);
}

}  // namespace

TEST_CASE("simulate exact") {
  const auto r = invoke({"simulate", "--n-excited", "100", "--method", "exact", "--tau-max", "2",
                         "--samples", "2000"});
  REQUIRE(r.status == 0);
  CHECK(r.out.rfind("tau,mean_ne,delta_e\n", 0) == 0);
  const auto t = parse(r.out);
  CHECK(t.rows() == 2000);
  CHECK(t.column("mean_ne")[0] == 100.0);
  CHECK(t.column("tau").back() == 2.0);
}

TEST_CASE("simulate with seconds column") {
  const auto r = invoke({"simulate", "--n-excited", "4", "--method", "closed_form", "--samples", "3",
                         "--tau-max", "1", "--rabi-hz", "0.5"});
  REQUIRE(r.status == 0);
  const auto t = parse(r.out);
  CHECK(t.header.back() == "t_seconds");
  CHECK(t.column("t_seconds")[2] == doctest::Approx(1.0 / 3.141592653589793));
}

TEST_CASE("predict") {
  const auto r = invoke({"predict", "--nbar", "100"});
  REQUIRE(r.status == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("t_period").get<double>() == doctest::Approx(0.6619).epsilon(1e-4));
  CHECK(doc.at("t_revival").get<double>() == doctest::Approx(190.8).epsilon(1e-3));
  CHECK(doc.at("plateau").get<double>() == doctest::Approx(85.04).epsilon(1e-4));
  CHECK(doc.at("fractional").at("2").get<double>() == doctest::Approx(95.38).epsilon(1e-3));
  CHECK(doc.contains("provenance"));
  CHECK(doc.at("provenance").at("elliptic_params").at("residual_first").get<double>() < 1e-9);

  const auto c = invoke({"predict", "--nbar", "100", "--format", "csv"});
  REQUIRE(c.status == 0);
  const auto t = parse(c.out);
  CHECK(t.rows() == 1);
  CHECK(t.column("t_revival_2")[0] == doctest::Approx(95.38).epsilon(1e-3));
}

TEST_CASE("compare overlays four curves") {
  const auto r = invoke({"compare", "--n-excited", "100", "--tau-max", "2"});
  REQUIRE(r.status == 0);
  const auto t = parse(r.out);
  for (const char* name : {"exact", "vanishing_variance", "vanishing_asymmetry", "closed_form"}) {
    CHECK(t.column(name)[0] == 100.0);
  }
  CHECK(min_of(t.column("vanishing_variance")) < min_of(t.column("closed_form")));

  const auto j = invoke({"compare", "--n-excited", "20", "--tau-max", "1", "--samples", "11",
                         "--format", "json"});
  REQUIRE(j.status == 0);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc.at("columns").at("exact").size() == 11);
  CHECK(doc.at("provenance").contains("elliptic_params"));
}

TEST_CASE("ensemble with revivals file") {
  const auto rev = scratch("revivals.csv");
  const auto r = invoke({"ensemble", "--nbar", "30", "--tau-max", "20", "--samples", "2001",
                         "--revivals", rev.string()});
  REQUIRE(r.status == 0);
  const auto t = parse(r.out);
  CHECK(t.column("mean_ne")[0] == doctest::Approx(30.0).epsilon(1e-8));
  std::ifstream in(rev);
  const auto revivals = csv::read(in);
  CHECK(revivals.header == std::vector<std::string>{"tau_center", "prominence", "height"});
  std::filesystem::remove(rev);
}

TEST_CASE("ensemble from a weights file") {
  const auto w = scratch("weights.csv");
  {
    std::ofstream f(w);
    f << "l,weight\n20,0.5\n40,0.5\n";
  }
  const auto r = invoke({"ensemble", "--weights", w.string(), "--tau-max", "1", "--samples", "5",
                         "--per-l", "exact"});
  REQUIRE(r.status == 0);
  const auto t = parse(r.out);
  CHECK(t.column("mean_ne")[0] == doctest::Approx(30.0));
  CHECK(t.column("delta_e")[0] == doctest::Approx(10.0));
  std::filesystem::remove(w);
}

TEST_CASE("every emitted CSV round-trips byte for byte") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"simulate", "--n-excited", "12", "--method", "vanishing_asymmetry", "--samples", "200"},
           {"simulate", "--n-excited", "3", "--n-ground", "2", "--n-photons", "1", "--samples", "50"},
           {"compare", "--n-excited", "30", "--samples", "300"},
           {"ensemble", "--nbar", "20", "--tau-max", "5", "--samples", "400"},
           {"predict", "--nbar", "50", "--format", "csv"}}) {
    const auto r = invoke(args);
    REQUIRE(r.status == 0);
    const auto table = parse(r.out);
    std::ostringstream again;
    csv::write(again, table);
    CHECK(again.str() == r.out);
  }
}

TEST_CASE("identical configuration gives identical bytes") {
  const std::vector<std::string> args{"ensemble", "--nbar", "40", "--tau-max", "30", "--samples", "3001"};
  CHECK(invoke(args).out == invoke(args).out);
  const std::vector<std::string> cmp{"compare", "--n-excited", "50", "--samples", "500"};
  CHECK(invoke(cmp).out == invoke(cmp).out);
}

TEST_CASE("output file and config file") {
  const auto cfg = scratch("run.cfg");
  const auto out = scratch("out.csv");
  {
    std::ofstream f(cfg);
    f << "command=simulate\nn-excited=10\nmethod=quartic\nsamples=25\ntau-max=0.5\n";
  }
  const auto r = invoke({"--config", cfg.string(), "-o", out.string()});
  REQUIRE(r.status == 0);
  CHECK(r.out.empty());
  std::ifstream in(out);
  const auto t = csv::read(in);
  CHECK(t.rows() == 25);
  // flags override the file
  const auto r2 = invoke({"--config", cfg.string(), "--samples", "7"});
  REQUIRE(r2.status == 0);
  CHECK(parse(r2.out).rows() == 7);
  std::filesystem::remove(cfg);
  std::filesystem::remove(out);
}

TEST_CASE("exit codes") {
  CHECK(invoke({}).status == 2);
  CHECK(invoke({"frobnicate"}).status == 2);
  CHECK(invoke({"simulate"}).status == 2);
  CHECK(invoke({"simulate", "--n-excited", "5", "--samples", "1"}).status == 2);
  CHECK(invoke({"simulate", "--n-excited", "5", "--tau-max", "-1"}).status == 2);
  CHECK(invoke({"simulate", "--n-excited", "5", "--method", "magic"}).status == 2);
  CHECK(invoke({"predict"}).status == 2);
  CHECK(invoke({"--help"}).status == 0);

  const auto small = invoke({"simulate", "--n-excited", "3", "--method", "closed_form"});
  CHECK(small.status == 1);
  CHECK(small.err.find("[closedform]") != std::string::npos);
  const auto low = invoke({"predict", "--nbar", "0.5"});
  CHECK(low.status == 1);
}

TEST_CASE("thread cap from the environment") {
  const std::vector<std::string> args{"ensemble", "--nbar", "25", "--tau-max", "4", "--samples", "101"};
  const auto base = invoke(args);
  ::setenv("TRILINEAR_THREADS", "1", 1);
  const auto one = invoke(args);
  CHECK(one.status == 0);
  CHECK(one.out == base.out);
  ::setenv("TRILINEAR_THREADS", "zero", 1);
  CHECK(invoke(args).status == 2);
  ::unsetenv("TRILINEAR_THREADS");
}

TEST_CASE("installed binary") {
  const std::string cmd = std::string(TRILINEAR_CLI_PATH) + " predict --nbar 100 > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
  const std::string bad = std::string(TRILINEAR_CLI_PATH) + " simulate --samples 0 2> /dev/null";
  const int status = std::system(bad.c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
