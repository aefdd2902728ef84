// Runs the qcr executable end to end. QCR_CLI_PATH is set by the build.

#include "qcr/io.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("qcr_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  static const struct Cleanup {
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(dir, ec);
    }
  } cleanup;
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Run run_cli(const std::string& args) {
  const fs::path err = workdir() / "stderr.txt";
  const std::string cmd = "cd '" + workdir().string() + "' && '" QCR_CLI_PATH "' " + args + " 2>'" + err.string() + "'";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int st = ::pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  r.err = slurp(err);
  return r;
}

// "key = value" lines.
std::map<std::string, double> values(const std::string& text) {
  std::map<std::string, double> kv;
  std::istringstream is(text);
  std::string line;
  static const std::regex re(R"(^(\w+) = (\S+)$)");
  std::smatch m;
  while (std::getline(is, line)) {
    if (std::regex_match(line, m, re)) {
      try {
        kv[m[1]] = std::stod(m[2]);
      } catch (const std::exception&) {
      }
    }
  }
  return kv;
}

bool is_error_record(const std::string& err, const std::string& code) {
  return std::regex_search(err, std::regex("^error code=" + code + " message=\"[^\"]*\"\n$"));
}

}  // namespace

TEST_CASE("energy and areas of fixtures") {
  REQUIRE(run_cli("fixture identity -o id.txt --grid 128").status == 0);
  const auto e = run_cli("energy -i id.txt -o id_out");
  REQUIRE(e.status == 0);
  CHECK(values(e.out).at("energy") == doctest::Approx(M_PI).epsilon(0.02));
  CHECK(fs::exists(workdir() / "id_out" / "energy_density.csv"));

  REQUIRE(run_cli("fixture linf-identity -o linf.txt --grid 128").status == 0);
  const auto c = run_cli("compare-areas -i linf.txt");
  REQUIRE(c.status == 0);
  CHECK(std::abs(values(c.out).at("ratio") - M_PI / 4) <= 1e-3);

  REQUIRE(run_cli("fixture stretch -o st.txt --grid 128").status == 0);
  const auto a = values(run_cli("area -i st.txt -o st_out").out);
  CHECK(a.at("area_intrinsic") == doctest::Approx(2 * M_PI).epsilon(0.02));
  CHECK(a.at("area_hausdorff") == doctest::Approx(2 * M_PI).epsilon(0.02));

  const auto d = run_cli("defect-map -i st.txt -o st_out");
  REQUIRE(d.status == 0);
  CHECK(values(d.out).at("max_defect") > 0.1);
  const std::string csv = slurp(workdir() / "st_out" / "isotropy_defect.csv");
  CHECK(csv.rfind("i,j,x,y,value\n", 0) == 0);
}

TEST_CASE("identity suites") {
  const auto r = run_cli("identities --count 200 --seed 5");
  CHECK(r.status == 0);
  CHECK(r.out.find("status = ok") != std::string::npos);
  CHECK(values(r.out).at("distortion_identity_max_residual") <= 1e-9);
}

TEST_CASE("solve a bump coefficient") {
  REQUIRE(run_cli("fixture bump -o bump.bin --grid 128 --k 0.2").status == 0);
  const auto r = run_cli("solve -i bump.bin -o bump_out");
  REQUIRE(r.status == 0);
  const auto v = values(r.out);
  CHECK(v.at("residual_l2") <= 1e-3);
  CHECK(v.at("min_det") > 0.0);
  const qcr::QCMap f = qcr::io::load_qcmap(workdir() / "bump_out" / "f.bin");
  CHECK(f.grid.n == 128);
  CHECK(f.k_certified == v.at("k_certified"));
  for (const char* name : {"residual.csv", "mu_abs.csv", "mu_arg.csv", "det.csv", "dilatation.csv"}) {
    CHECK(fs::exists(workdir() / "bump_out" / name));
  }
}

TEST_CASE("reparam writes a reproducible certified report") {
  REQUIRE(run_cli("fixture stretch -o st.txt --grid 128").status == 0);
  const auto r = run_cli("reparam -i st.txt -e 0.6283185307179586 -o rep1");
  REQUIRE(r.status == 0);
  const auto v = values(r.out);
  CHECK(v.at("energy_after") <= 2 * M_PI + 0.2 * M_PI + v.at("quad_budget"));

  const std::string report = slurp(workdir() / "rep1" / "report.txt");
  CHECK(report.find("status = ok") != std::string::npos);
  static const std::regex ineq(R"(^inequality \w+ lhs=\S+ rhs=\S+ slack=\S+ (ok|FAIL)$)");
  std::istringstream is(report);
  std::string line;
  int count = 0;
  while (std::getline(is, line)) {
    if (line.rfind("inequality ", 0) == 0) {
      CHECK(std::regex_match(line, ineq));
      ++count;
    }
  }
  CHECK(count >= 5);

  const qcr::QCMap phi = qcr::io::load_qcmap(workdir() / "rep1" / "phi.bin");
  CHECK(phi.active_count() > 0);
  const std::string boundary = slurp(workdir() / "rep1" / "omega_boundary.csv");
  CHECK(std::count(boundary.begin(), boundary.end(), '\n') == 513);

  REQUIRE(run_cli("reparam -i st.txt -e 0.6283185307179586 -o rep2 --report rep2.txt").status == 0);
  CHECK(slurp(workdir() / "rep2.txt") == report);
}

TEST_CASE("errors exit with a machine-parsable record") {
  std::ofstream(workdir() / "bad.txt") << "16 2 euclidean\n0 0 1 2\n";
  auto r = run_cli("energy -i bad.txt");
  CHECK(r.status == 2);
  CHECK(is_error_record(r.err, "InputError"));

  r = run_cli("energy -i missing.txt");
  CHECK(r.status == 2);
  CHECK(is_error_record(r.err, "InputError"));

  REQUIRE(run_cli("fixture identity -o id64.txt --grid 64").status == 0);
  r = run_cli("reparam -i id64.txt -e 0");
  CHECK(r.status == 2);
  CHECK(is_error_record(r.err, "InputError"));
  r = run_cli("reparam -i id64.txt -e 0.1 --grid 96");
  CHECK(r.status == 2);

  REQUIRE(run_cli("fixture bump -o b9.bin --grid 64 --k 0.9").status == 0);
  r = run_cli("solve -i b9.bin --max-iter 2 -o b9_out");
  CHECK(r.status == 3);
  CHECK(is_error_record(r.err, "NoConvergence"));

  r = run_cli("fixture sphere -o s.txt");
  CHECK(r.status == 2);
  CHECK(is_error_record(r.err, "InputError"));
}
