#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "unsat/certificates.hpp"
#include "unsat/cli.hpp"
#include "unsat/matrix.hpp"
#include "unsat/scan.hpp"

using namespace unsat;
using nlohmann::json;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args, const std::string& stdin_text = "") {
  std::ostringstream out, err;
  std::istringstream in(stdin_text);
  CliRun r;
  r.code = run_cli(std::move(args), out, err, in);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("unsat_lab_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) const {
    auto p = path / name;
    std::ofstream f(p);
    f << content;
    return p.string();
  }
  std::string name(const std::string& n) const { return (path / n).string(); }
};

}  // namespace

TEST_CASE("build emits the displayed depth-2 matrix") {
  CliRun r = run({"build", "--complete", "2", "--emit", "matrix"});
  CHECK(r.code == 0);
  CHECK(r.out == "4 4\n1 1 1 0\n1 1 -1 0\n1 -1 0 1\n1 -1 0 -1\n");
}

TEST_CASE("build at depth zero emits the dummy-only matrix") {
  CliRun r = run({"build", "--complete", "0", "--emit", "matrix"});
  CHECK(r.code == 0);
  CHECK(r.out == "1 1\n1\n");
}

TEST_CASE("build guard maps to exit code 2") {
  CliRun r = run({"build", "--complete", "25", "--emit", "matrix"});
  CHECK(r.code == 2);
  CHECK(r.err.find("guard") != std::string::npos);
}

TEST_CASE("build tree and dimacs round trip through files") {
  TempDir dir;
  std::string tree = dir.file("fig1.tree", "(w (x () (z () ())) (y () ()))");
  CliRun dimacs = run({"build", "--tree", tree, "--emit", "dimacs"});
  CHECK(dimacs.code == 0);
  CHECK(dimacs.out == "p cnf 4 5\n1 2 0\n1 -2 3 0\n1 -2 -3 0\n-1 4 0\n-1 -4 0\n");

  CliRun nae = run({"build", "--tree", tree, "--emit", "naecnf"});
  CHECK(nae.out.find("p naecnf 5 5") != std::string::npos);
  CHECK(nae.out.find("c dummy 5") != std::string::npos);

  CliRun echo = run({"build", "--tree", tree, "--emit", "tree"});
  CHECK(echo.out == "(w (x () (z () ())) (y () ()))\n");
}

TEST_CASE("analyze reports the expected fields") {
  TempDir dir;
  CliRun norm = run({"build", "--complete", "3", "--emit", "normalized"});
  std::string matrix = dir.file("t3.mat", norm.out);
  CliRun r = run({"analyze", "--matrix", matrix});
  REQUIRE(r.code == 0);
  json report = json::parse(r.out);
  CHECK(std::abs(report["delta"].get<double>() - haar_family_delta(3)) < 1e-12);
  CHECK(report["unsat"].get<bool>());
  CHECK(report["partition"].get<bool>());
  CHECK(report["discrepancy"].get<double>() >= report["delta"].get<double>() - 1e-12);
}

TEST_CASE("analyze on the second displayed example matrix") {
  TempDir dir;
  std::string matrix =
      dir.file("ex2.mat", "4 4\n1 0 1 1\n0 1 1 -1\n1 1 -1 0\n1 -1 0 -1\n");
  CliRun r = run({"analyze", "--matrix", matrix});
  json report = json::parse(r.out);
  CHECK(report["unsat"].get<bool>());
  CHECK(report["partition"].get<bool>());
}

TEST_CASE("analyze on the identity matrix") {
  TempDir dir;
  std::string matrix = dir.file("eye.mat", "2 2\n1 0\n0 1\n");
  json report = json::parse(run({"analyze", "--matrix", matrix}).out);
  CHECK(report["delta"].get<double>() == 1.0);
  CHECK(report["discrepancy"].get<double>() == 1.0);
}

TEST_CASE("analyze skips enumeration beyond the guard") {
  std::ostringstream big;
  big << "1 25\n";
  for (int j = 0; j < 25; ++j) big << (j ? " 1" : "1");
  big << "\n";
  TempDir dir;
  std::string matrix = dir.file("wide.mat", big.str());
  json report = json::parse(run({"analyze", "--matrix", matrix}).out);
  CHECK(report.contains("delta"));
  CHECK_FALSE(report.contains("discrepancy"));
  CHECK(report["note"].get<std::string>().find("24") != std::string::npos);
}

TEST_CASE("normalize on a tree hits the closed form") {
  TempDir dir;
  CliRun built = run({"build", "--complete", "6", "--emit", "tree"});
  std::string tree = dir.file("t6.tree", built.out);
  CliRun r = run({"normalize", "--tree", tree});
  REQUIRE(r.code == 0);
  json report = json::parse(r.out);
  CHECK(std::abs(report["dual_value"].get<double>() - haar_family_delta(6)) < 1e-4);
  CHECK(report["converged"].get<bool>());
}

TEST_CASE("normalize a single-clause formula exactly") {
  TempDir dir;
  std::string cnf = dir.file("one.cnf", "p cnf 3 1\n1 2 3 0\n");
  json report = json::parse(run({"normalize", "--cnf", cnf}).out);
  CHECK(report["gap"].get<double>() <= 1e-12);
  CHECK(report["converged"].get<bool>());
}

TEST_CASE("normalize can emit the realized matrix") {
  TempDir dir;
  CliRun built = run({"build", "--complete", "2", "--emit", "tree"});
  std::string tree = dir.file("t2.tree", built.out);
  std::string out_path = dir.name("t2norm.mat");
  CliRun r = run({"normalize", "--tree", tree, "--emit-matrix", out_path});
  REQUIRE(r.code == 0);
  std::ifstream f(out_path);
  std::stringstream ss;
  ss << f.rdbuf();
  RealMatrix realized = parse_matrix(ss.str());
  // the optimal normalization of the complete tree is the uniform one
  RealMatrix uniform = column_normalize(haar_matrix(2));
  REQUIRE(realized.m == uniform.m);
  for (std::size_t i = 0; i < uniform.a.size(); ++i)
    CHECK(std::abs(realized.a[i] - uniform.a[i]) < 1e-4);
}

TEST_CASE("certify a tree") {
  TempDir dir;
  std::string tree = dir.file("t2.tree", "(a (b () ()) (c () ()))");
  json report = json::parse(run({"certify", "--tree", tree}).out);
  CHECK(std::abs(report["bound"].get<double>() - 1.7071067811865475) < 1e-12);
  CHECK_FALSE(report["finding"].get<bool>());
}

TEST_CASE("certify a formula with its proof") {
  TempDir dir;
  std::string cnf = dir.file("contra.cnf", "p cnf 1 2\n1 0\n-1 0\n");
  std::string proof = dir.file("contra.proof", "(res z1 (leaf 1) (leaf 2))");
  CliRun r = run({"certify", "--cnf", cnf, "--proof", proof});
  REQUIRE(r.code == 0);
  json report = json::parse(r.out);
  CHECK(report["value"].get<double>() < kOnePlusSqrt2);
  CHECK(report["weak_value"].get<double>() >= report["value"].get<double>() - 1e-10);
}

TEST_CASE("certified tree bound equals the analyzed delta on complete trees") {
  TempDir dir;
  for (int k : {1, 2, 3, 4, 5, 6, 10}) {
    std::string tree = dir.file("tk.tree", run({"build", "--complete", std::to_string(k),
                                                "--emit", "tree"}).out);
    std::string matrix = dir.file("tk.mat", run({"build", "--complete", std::to_string(k),
                                                 "--emit", "normalized"}).out);
    json cert = json::parse(run({"certify", "--tree", tree}).out);
    json ana = json::parse(run({"analyze", "--matrix", matrix}).out);
    CHECK(std::abs(cert["bound"].get<double>() - ana["delta"].get<double>()) < 1e-12);
  }
}

TEST_CASE("scan trees finds no violations on a small run") {
  TempDir dir;
  std::string out_path = dir.name("scan.jsonl");
  CliRun r = run({"scan", "trees", "--count", "25", "--seed", "7", "--max-leaves", "24",
                  "--out", out_path, "--strict-findings"});
  CHECK(r.code == 0);
  json summary = json::parse(r.out);
  CHECK(summary["instances"].get<long>() == 25);
  CHECK(summary["findings"].get<long>() == 0);

  std::ifstream f(out_path);
  std::string line;
  long lines = 0;
  while (std::getline(f, line)) {
    json rec = json::parse(line);
    CHECK(rec["kind"] == "trees");
    CHECK(rec["value"].get<double>() < kOnePlusSqrt2);
    CHECK_FALSE(rec["finding"].get<bool>());
    ++lines;
  }
  CHECK(lines == 25);
}

TEST_CASE("scan conjecture emits records with weak values") {
  CliRun r = run({"scan", "conjecture", "--count", "5", "--nvars", "6", "--seed", "3"});
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  int records = 0;
  while (std::getline(lines, line)) {
    json rec = json::parse(line);
    if (!rec.contains("instance_id")) continue;  // summary line
    CHECK(rec["kind"] == "conjecture");
    CHECK(rec["value"].get<double>() < kOnePlusSqrt2);
    CHECK(rec["weak_value"].get<double>() >= rec["value"].get<double>() - 1e-10);
    ++records;
  }
  CHECK(records == 5);
}

TEST_CASE("scan search starts from the complete-tree value") {
  CliRun r = run({"scan", "search", "--count", "10", "--nvars", "8", "--seed", "5"});
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  REQUIRE(std::getline(lines, line));
  json seed_record = json::parse(line);
  CHECK(seed_record["kind"] == "search");
  // depth-3 complete tree at 8 variables
  CHECK(std::abs(seed_record["value"].get<double>() - haar_family_delta(3)) < 1e-3);
}

TEST_CASE("scan determinism") {
  CliRun a = run({"scan", "trees", "--count", "8", "--seed", "11"});
  CliRun b = run({"scan", "trees", "--count", "8", "--seed", "11"});
  CHECK(a.out == b.out);
}

TEST_CASE("game replays the scripted session") {
  TempDir dir;
  std::string script = dir.file("moves.txt", "0: 1/3\n0: 1/4 1/2\n");
  CliRun r = run({"game", "--script", script});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("(1/3) (2/3)") != std::string::npos);
  CHECK(r.out.find("(1/12, 1/2) (1/4, 1/2) (2/3)") != std::string::npos);
}

TEST_CASE("interactive game accepts moves from stdin") {
  CliRun r = run({"game"}, "0: 1/2\nq\n");
  CHECK(r.code == 0);
  CHECK(r.out.find("(1/2) (1/2)") != std::string::npos);
}

TEST_CASE("unknown arguments fail cleanly") {
  CliRun r = run({"analyze"});
  CHECK(r.code == 1);
  CliRun r2 = run({"frobnicate"});
  CHECK(r2.code == 1);
}
