#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "msgkit/cli.hpp"

using namespace msgkit;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

bool has_line(const std::string& text, const std::string& line) {
  std::istringstream in(text);
  std::string cur;
  while (std::getline(in, cur))
    if (cur == line) return true;
  return false;
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

/// Drops the one nondeterministic metadata line.
std::string strip_wall_time(const std::string& text) {
  std::istringstream in(text);
  std::string cur, out;
  while (std::getline(in, cur)) {
    if (cur.rfind("# wall_time_s:", 0) == 0) continue;
    out += cur;
    out += '\n';
  }
  return out;
}

int data_rows(const std::string& text) {
  std::istringstream in(text);
  std::string cur;
  int rows = 0;
  bool header_seen = false;
  while (std::getline(in, cur)) {
    if (cur.empty() || cur[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    ++rows;
  }
  return rows;
}

}  // namespace

TEST_CASE("angle literals", "[cli]") {
  CHECK(cli::parse_angle("pi") == pi);
  CHECK(cli::parse_angle("2pi") == two_pi);
  CHECK(cli::parse_angle("0.5pi") == 0.5 * pi);
  CHECK(cli::parse_angle("-pi") == -pi);
  CHECK(cli::parse_angle("1.5") == 1.5);
  CHECK(cli::parse_angle("1e2") == 100.0);
  CHECK(cli::parse_angle(" pi ") == pi);
  CHECK_THROWS_AS(cli::parse_angle("abc"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_angle(""), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_angle("3pi/2"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_angle("pi2"), std::invalid_argument);
}

TEST_CASE("shortest round-trip double formatting", "[cli]") {
  CHECK(cli::format_double(0.1) == "0.1");
  CHECK(cli::format_double(2.0) == "2");
  CHECK(cli::format_double(-0.6) == "-0.6");
  CHECK(cli::format_double(8.111557351947223) == "8.111557351947223");

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 50; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 13) - 6);
    const std::string s = cli::format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("version, help and unknown commands", "[cli]") {
  const auto version = run_cli({"--version"});
  CHECK(version.code == 0);
  CHECK(contains(version.out, "0.1.0"));

  const auto help = run_cli({"--help"});
  CHECK(help.code == 0);
  CHECK(contains(help.out, "msgkit"));
  CHECK(contains(help.out, "potential"));

  const auto sub_help = run_cli({"kink", "--help"});
  CHECK(sub_help.code == 0);
  CHECK(contains(sub_help.out, "--eps"));

  CHECK(run_cli({}).code == 1);
  const auto unknown = run_cli({"frobnicate"});
  CHECK(unknown.code == 1);
  CHECK(contains(unknown.err, "usage error"));

  const auto missing = run_cli({"potential", "--n", "2"});
  CHECK(missing.code == 1);
  CHECK(contains(missing.err, "usage error"));
}

TEST_CASE("potential table and metadata", "[cli]") {
  const auto r = run_cli({"potential", "--n", "6", "--eps", "0", "--samples", "3",
                          "--phi-max", "6.283185307"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# msgkit 0.1.0\n", 0) == 0);
  CHECK(has_line(r.out, "# subcommand: potential"));
  CHECK(contains(r.out, "# args: --n 6 --eps 0 --samples 3"));
  CHECK(has_line(r.out, "# columns: phi,V,dV,d2V"));
  CHECK(has_line(r.out, "phi,V,dV,d2V"));
  CHECK(has_line(r.out, "0,0,0,1"));
  CHECK(contains(r.out, "\n3.1415926535,2,"));
  CHECK(data_rows(r.out) == 3);
}

TEST_CASE("dispersion single-mode row is exact", "[cli]") {
  const auto r = run_cli(
      {"dispersion", "--n", "2", "--eps", "0.1", "--phi-n", "pi", "--k", "0"});
  REQUIRE(r.code == 0);
  CHECK(has_line(r.out, "# curvature: -0.6"));
  CHECK(has_line(r.out, "# critical_wavelength: 8.111557351947223"));
  CHECK(has_line(r.out, "k,omega_sq,stable"));
  CHECK(has_line(r.out, "0,-0.6,false"));

  // a stable equilibrium reports no finite critical wavelength
  const auto s = run_cli(
      {"dispersion", "--n", "2", "--eps", "0.1", "--phi-n", "0", "--k", "1"});
  REQUIRE(s.code == 0);
  CHECK(has_line(s.out, "# critical_wavelength: none"));
  CHECK(has_line(s.out, "1,2.4,true"));
}

TEST_CASE("dispersion grid mode", "[cli]") {
  const auto r = run_cli({"dispersion", "--n", "2", "--eps", "0.1", "--k-min", "0",
                          "--k-max", "2", "--points", "5"});
  REQUIRE(r.code == 0);
  CHECK(data_rows(r.out) == 5);
  // mixing single-k and grid flags is rejected
  CHECK(run_cli({"dispersion", "--n", "2", "--eps", "0.1", "--k", "1", "--k-max",
                 "2"})
            .code == 1);
}

TEST_CASE("launch pressure maps onto the slope", "[cli]") {
  const auto r = run_cli({"static", "--n", "3", "--eps", "10", "--p", "-17.5",
                          "--x-max", "20", "--stride", "1000"});
  REQUIRE(r.code == 0);
  CHECK(has_line(r.out, "# slope0: 3"));
  CHECK(has_line(r.out, "# classification: periodic"));
  CHECK(has_line(r.out, "# subkinks: 0"));

  const auto multi = run_cli({"static", "--n", "3", "--eps", "10", "--p", "-0.875",
                              "--x-max", "30", "--stride", "1000"});
  REQUIRE(multi.code == 0);
  CHECK(has_line(multi.out, "# slope0: 6.5"));
  CHECK(has_line(multi.out, "# subkinks: 3"));

  // P = -V(pi) exactly: the launch degenerates onto the equilibrium
  const auto edge = run_cli({"static", "--n", "4", "--eps", "10", "--p", "-2"});
  CHECK(edge.code == 2);
  CHECK(contains(edge.err, "error:"));
  CHECK(contains(edge.err, "equilibrium"));

  // below every admissible launch: rejected as a usage error
  const auto below = run_cli({"static", "--n", "4", "--eps", "10", "--p", "-2.1"});
  CHECK(below.code == 1);
  CHECK(contains(below.err, "usage error"));

  // exactly one of --p / --slope0 must be given
  CHECK(run_cli({"static", "--n", "1", "--eps", "0"}).code == 1);
  CHECK(run_cli({"static", "--n", "1", "--eps", "0", "--p", "-1", "--slope0", "1"})
            .code == 1);
}

TEST_CASE("infeasible physics maps to exit code 2", "[cli]") {
  const auto r = run_cli({"phase", "--n", "1", "--eps", "0", "--p", "0.5"});
  CHECK(r.code == 2);
  CHECK(contains(r.err, "error:"));

  const auto cfl = run_cli({"evolve", "--n", "1", "--eps", "0", "--phi-n", "0",
                            "--dt", "0.05"});
  CHECK(cfl.code == 2);
  CHECK(contains(cfl.err, "stability"));
}

TEST_CASE("scan output is deterministic and thread-count independent", "[cli]") {
  const std::vector<std::string> base{"scan-eos", "--n", "3",    "--eps", "10",
                                      "--p-min",  "-2", "--p-max", "-0.2", "--points",
                                      "7"};
  auto serial = base;
  serial.push_back("--jobs");
  serial.push_back("1");
  auto threaded = base;
  threaded.push_back("--jobs");
  threaded.push_back("4");

  const auto a = run_cli(serial);
  const auto b = run_cli(serial);
  const auto c = run_cli(threaded);
  REQUIRE(a.code == 0);
  CHECK(strip_wall_time(a.out) == strip_wall_time(b.out));
  // the wall time and the jobs argument are the only differences
  CHECK(data_rows(a.out) == data_rows(c.out));
  CHECK(a.out.substr(a.out.find("# columns:")) ==
        c.out.substr(c.out.find("# columns:")));
  CHECK(has_line(a.out, "# columns: P,rho_bar,subkinks,chi"));
  CHECK(data_rows(a.out) == 7);
}

TEST_CASE("energy scan emits the chain table", "[cli]") {
  const auto r = run_cli({"scan-energy", "--n", "2", "--eps", "0.1", "--p-min",
                          "-1.5", "--p-max", "-0.5", "--points", "5"});
  REQUIRE(r.code == 0);
  CHECK(has_line(r.out, "# columns: P,E,L,subkinks"));
  CHECK(data_rows(r.out) == 5);
  CHECK(run_cli({"scan-energy", "--n", "2", "--eps", "0.1", "--p-min", "-0.5",
                 "--p-max", "-1.5"})
            .code == 1);
}

TEST_CASE("kink summary and file output", "[cli]") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "msgkit_cli_test_kink.csv";
  const auto r = run_cli({"kink", "--n", "1", "--eps", "0", "--out", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("energy=8.00000000000002", 0) == 0);
  CHECK(contains(r.out, "charge=1"));
  CHECK(contains(r.out, "subkinks=0"));

  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string file = buf.str();
  CHECK(file.rfind("# msgkit 0.1.0\n", 0) == 0);
  CHECK(has_line(file, "# energy: 8.000000000000023"));
  CHECK(has_line(file, "# charge: 1"));
  CHECK(has_line(file, "# columns: x,phi,slope,rho,pressure"));
  fs::remove(path);

  // unwritable target is a usage error
  CHECK(run_cli({"kink", "--n", "1", "--eps", "0", "--out",
                 "/nonexistent-dir/x.csv"})
            .code == 1);
}

TEST_CASE("fixed point tables", "[cli]") {
  const auto single = run_cli({"fixed-points", "--n", "3", "--eps", "0.5"});
  REQUIRE(single.code == 0);
  CHECK(has_line(single.out, "# columns: epsilon,phi,curvature,kind"));
  CHECK(data_rows(single.out) == 7);
  CHECK(contains(single.out, "potential_minimum"));
  CHECK(contains(single.out, "potential_maximum"));

  const auto grid = run_cli({"fixed-points", "--n", "1", "--eps-min", "0",
                             "--eps-max", "0.2", "--points", "3"});
  REQUIRE(grid.code == 0);
  CHECK(data_rows(grid.out) == 9);

  CHECK(run_cli({"fixed-points", "--n", "1", "--eps", "0.5", "--points", "3"})
            .code == 1);
}

TEST_CASE("phase loop table", "[cli]") {
  const auto r = run_cli({"phase", "--n", "2", "--eps", "0.1", "--p", "-1",
                          "--samples", "16"});
  REQUIRE(r.code == 0);
  CHECK(has_line(r.out, "# columns: phi,slope"));
  CHECK(data_rows(r.out) == 31);
}

TEST_CASE("evolution tables", "[cli]") {
  const auto snap = run_cli({"evolve", "--n", "1", "--eps", "0", "--phi-n", "0",
                             "--length", "2pi", "--steps", "20", "--stride", "10"});
  REQUIRE(snap.code == 0);
  CHECK(has_line(snap.out, "# columns: t,x,phi"));
  CHECK(has_line(snap.out, "# k_effective: 1"));
  CHECK(contains(snap.out, "# energy_initial:"));
  CHECK(contains(snap.out, "# energy_drift_rel:"));

  const auto spec = run_cli({"evolve", "--n", "1", "--eps", "0", "--phi-n", "0",
                             "--length", "2pi", "--steps", "20", "--stride", "10",
                             "--table", "spectrum"});
  REQUIRE(spec.code == 0);
  CHECK(has_line(spec.out, "# columns: t,k,amplitude"));

  CHECK(run_cli({"evolve", "--n", "1", "--eps", "0", "--table", "bogus"}).code == 1);
}

TEST_CASE("shape expansion table", "[cli]") {
  const auto r = run_cli({"expand", "--shape", "triangle", "--eps", "1", "--terms",
                          "8"});
  REQUIRE(r.code == 0);
  CHECK(has_line(r.out, "# shape: triangle"));
  // eight cosine terms leave a ~0.08 tail at phi = 0, honestly reported
  CHECK(has_line(r.out, "# boundary_ok: false"));
  CHECK(has_line(r.out, "# columns: index,b,a"));
  CHECK(data_rows(r.out) == 9);
  CHECK(contains(r.out, "# coeff_sum: 0.785398163"));

  const auto rc = run_cli({"expand", "--shape", "raised-cosine", "--eps", "0.5",
                           "--terms", "6", "--center", "pi", "--width", "0.5pi"});
  CHECK(rc.code == 0);

  CHECK(run_cli({"expand", "--shape", "sawtooth"}).code == 1);
}
