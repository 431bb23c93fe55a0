#include "unsat/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "unsat/certificates.hpp"
#include "unsat/matrix.hpp"
#include "unsat/normopt.hpp"
#include "unsat/resolution.hpp"
#include "unsat/scan.hpp"
#include "unsat/stick_game.hpp"

namespace unsat {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + out_path);
  f << text;
}

struct BuildArgs {
  int complete = -1;
  std::string tree_path;
  int random_leaves = 0;
  std::uint64_t seed = 1;
  std::string emit_kind = "matrix";
  std::string out_path;
};

int cmd_build(const BuildArgs& args, std::ostream& out) {
  BinaryTree tree = [&] {
    if (!args.tree_path.empty()) return parse_tree(slurp(args.tree_path));
    if (args.random_leaves > 0) {
      Rng rng(args.seed);
      return random_tree(args.random_leaves, rng);
    }
    if (args.complete >= 0) return complete_tree(args.complete);
    throw CLI::ValidationError("build", "one of --complete/--tree/--random-leaves is required");
  }();

  if (args.emit_kind == "tree") {
    emit(serialize_tree(tree) + "\n", args.out_path, out);
  } else if (args.emit_kind == "dimacs") {
    emit(write_dimacs(formula_of_tree(tree)), args.out_path, out);
  } else if (args.emit_kind == "naecnf") {
    emit(write_dimacs(cnf_to_nae(formula_of_tree(tree))), args.out_path, out);
  } else if (args.emit_kind == "matrix") {
    emit(write_matrix(matrix_of_tree(tree)), args.out_path, out);
  } else if (args.emit_kind == "normalized") {
    emit(write_matrix(column_normalize(matrix_of_tree(tree))), args.out_path, out);
  } else {
    throw CLI::ValidationError("build", "unknown --emit kind '" + args.emit_kind + "'");
  }
  return 0;
}

int cmd_analyze(const std::string& matrix_path, bool pretty, std::ostream& out) {
  RealMatrix a = parse_matrix(slurp(matrix_path));
  nlohmann::json report;
  report["m"] = a.m;
  report["n"] = a.n;
  report["delta"] = delta(a);
  if (a.n <= kEnumerationGuard) {
    DiscrepancyResult disc = discrepancy_bruteforce(a);
    report["discrepancy"] = disc.value;
    std::vector<int> mins;
    for (auto s : disc.minimizer.signs) mins.push_back(s);
    report["minimizer"] = mins;
    SignMatrix sign;
    sign.m = a.m;
    sign.n = a.n;
    sign.a.resize(a.a.size());
    for (std::size_t i = 0; i < a.a.size(); ++i)
      sign.a[i] = a.a[i] > 0 ? 1 : (a.a[i] < 0 ? -1 : 0);
    report["unsat"] = is_unsatisfiable_bruteforce(sign);
    report["partition"] = is_disjoint_partition(sign);
  } else {
    report["note"] = "enumeration fields skipped: n exceeds the guard of " +
                     std::to_string(kEnumerationGuard) + " columns";
  }
  out << (pretty ? report.dump(2) : report.dump()) << '\n';
  return 0;
}

struct NormalizeArgs {
  std::string cnf_path, naecnf_path, tree_path;
  double tol = 1e-6;
  long max_iter = 200000;
  std::uint64_t seed = 0;
  bool strict = false;
  std::string emit_matrix_path;
};

int cmd_normalize(const NormalizeArgs& args, std::ostream& out) {
  NaeFormula nae = [&] {
    if (!args.tree_path.empty())
      return cnf_to_nae(formula_of_tree(parse_tree(slurp(args.tree_path))));
    if (!args.cnf_path.empty())
      return cnf_to_nae(std::get<CnfFormula>(parse_dimacs(slurp(args.cnf_path))));
    if (!args.naecnf_path.empty())
      return std::get<NaeFormula>(parse_dimacs(slurp(args.naecnf_path)));
    throw CLI::ValidationError("normalize", "one of --tree/--cnf/--naecnf is required");
  }();

  NormProblem problem = NormProblem::from(nae);
  SolveOptions opts;
  opts.tol = args.tol;
  opts.max_iter = args.max_iter;
  opts.seed = args.seed;
  NormalizationResult res = optimal_normalization(problem, opts);
  out << report_to_json(res.report) << '\n';
  if (!args.emit_matrix_path.empty())
    emit(write_matrix(normalized_matrix_from_weights(nae, res.primal)), args.emit_matrix_path, out);
  return args.strict && !res.report.converged ? 1 : 0;
}

struct CertifyArgs {
  std::string tree_path, cnf_path, proof_path;
  bool strict_findings = false;
};

int cmd_certify(const CertifyArgs& args, std::ostream& out) {
  nlohmann::json report;
  bool finding = false;
  if (!args.tree_path.empty()) {
    BinaryTree tree = parse_tree(slurp(args.tree_path));
    double bound = tree_dual_bound(tree);
    report["kind"] = "tree";
    report["bound"] = bound;
    report["limit"] = kOnePlusSqrt2;
    finding = bound >= kOnePlusSqrt2;
  } else if (!args.cnf_path.empty() && !args.proof_path.empty()) {
    CnfFormula f = std::get<CnfFormula>(parse_dimacs(slurp(args.cnf_path)));
    ResolutionTree proof = parse_proof(slurp(args.proof_path), f);
    auto [restricted, remapped] = restrict_to_used_clauses(f, proof);
    if (restricted.clauses.size() < f.clauses.size())
      report["note"] = "restricted to the " + std::to_string(restricted.clauses.size()) +
                       " clauses used by the proof";
    ConjectureValue cv = conjecture_value(restricted, remapped);
    report["kind"] = "proof";
    report["value"] = cv.value;
    report["weak_value"] = cv.weak_value;
    report["limit"] = kOnePlusSqrt2;
    finding = cv.value >= kOnePlusSqrt2;
  } else {
    throw CLI::ValidationError("certify", "expected --tree, or --cnf with --proof");
  }
  report["finding"] = finding;
  out << report.dump() << '\n';
  return finding && args.strict_findings ? 3 : 0;
}

struct ScanArgs {
  ScanConfig config;
  std::string out_path;
  bool strict_findings = false;
};

int cmd_scan(const ScanArgs& args, std::ostream& out) {
  ScanSummary summary;
  if (args.out_path.empty()) {
    summary = run_scan(args.config, out);
  } else {
    std::ofstream f(args.out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + args.out_path);
    summary = run_scan(args.config, f);
  }
  nlohmann::json j{{"instances", summary.instances},
                   {"findings", summary.findings},
                   {"best_value", summary.best_value}};
  out << j.dump() << '\n';
  return args.strict_findings && summary.findings > 0 ? 3 : 0;
}

void print_game_state(const StickGame& game, std::ostream& out) {
  out << "piles:";
  for (int p = 0; p < game.n_piles(); ++p) {
    out << " (";
    auto sticks = game.pile(p);
    for (std::size_t i = 0; i < sticks.size(); ++i) {
      if (i) out << ", ";
      out << sticks[i].num << '/' << sticks[i].den;
    }
    out << ')';
  }
  out << '\n';
  out << "scores:";
  for (int p = 0; p < game.n_piles(); ++p) out << ' ' << game.pile_score_with_dummy(p);
  out << "  min=" << game.min_score_with_dummy() << "  tree-bound=" << game.dual_bound()
      << "  limit=" << kOnePlusSqrt2 << '\n';
}

int cmd_game(const std::string& script_path, std::ostream& out, std::istream& in) {
  StickGame game;
  if (!script_path.empty()) {
    auto moves = parse_game_script(slurp(script_path));
    for (const GameMove& mv : moves) {
      game.apply(mv);
      game.verify_state();
      out << "move " << game.n_moves() << ": ";
      print_game_state(game, out);
    }
    return 0;
  }
  out << "stick game: enter moves as `pile: f1 f2 ... fk` (q quits)\n";
  print_game_state(game, out);
  std::string line;
  while (out << "> " && std::getline(in, line)) {
    if (line == "q" || line == "quit") break;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto moves = parse_game_script(line + "\n");
      for (const GameMove& mv : moves) game.apply(mv);
      game.verify_state();
      print_game_state(game, out);
    } catch (const std::exception& e) {
      out << "rejected: " << e.what() << '\n';
    }
  }
  return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err,
            std::istream& in) {
  CLI::App app{"unsatisfiable-matrix laboratory"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "construct trees, formulas and matrices");
  build_cmd->add_option("--complete", build.complete, "complete tree of this depth");
  build_cmd->add_option("--tree", build.tree_path, "tree s-expression file");
  build_cmd->add_option("--random-leaves", build.random_leaves, "random tree with this many leaves");
  build_cmd->add_option("--seed", build.seed, "seed for --random-leaves");
  build_cmd->add_option("--emit", build.emit_kind, "tree|dimacs|naecnf|matrix|normalized");
  build_cmd->add_option("--out", build.out_path, "output file (stdout otherwise)");

  std::string analyze_matrix;
  bool analyze_pretty = false;
  auto* analyze_cmd = app.add_subcommand("analyze", "delta, discrepancy and matching reports");
  analyze_cmd->add_option("--matrix", analyze_matrix, "matrix text file")->required();
  analyze_cmd->add_flag("--pretty", analyze_pretty, "indent the JSON report");

  NormalizeArgs normalize;
  auto* normalize_cmd = app.add_subcommand("normalize", "optimal normalization via the dual solver");
  normalize_cmd->add_option("--tree", normalize.tree_path, "tree file");
  normalize_cmd->add_option("--cnf", normalize.cnf_path, "DIMACS cnf file");
  normalize_cmd->add_option("--naecnf", normalize.naecnf_path, "DIMACS naecnf file");
  normalize_cmd->add_option("--tol", normalize.tol, "relative duality gap target");
  normalize_cmd->add_option("--max-iter", normalize.max_iter, "iteration budget");
  normalize_cmd->add_option("--seed", normalize.seed, "restart seed");
  normalize_cmd->add_flag("--strict", normalize.strict, "exit nonzero when not converged");
  normalize_cmd->add_option("--emit-matrix", normalize.emit_matrix_path, "write the normalized matrix");

  CertifyArgs certify;
  auto* certify_cmd = app.add_subcommand("certify", "dual-certificate bounds");
  certify_cmd->add_option("--tree", certify.tree_path, "tree file");
  certify_cmd->add_option("--cnf", certify.cnf_path, "DIMACS cnf file");
  certify_cmd->add_option("--proof", certify.proof_path, "resolution proof file");
  certify_cmd->add_flag("--strict-findings", certify.strict_findings, "exit 3 on findings");

  ScanArgs scan;
  auto* scan_cmd = app.add_subcommand("scan", "randomized scans (trees|conjecture|search)");
  scan_cmd->add_option("mode", scan.config.mode, "trees|conjecture|search")->required();
  scan_cmd->add_option("--count", scan.config.count, "instance count");
  scan_cmd->add_option("--seed", scan.config.seed, "base seed");
  scan_cmd->add_option("--max-leaves", scan.config.max_leaves, "tree size cap (trees mode)");
  scan_cmd->add_option("--nvars", scan.config.n_vars, "variable count (conjecture/search)");
  scan_cmd->add_option("--tol", scan.config.tol, "solver tolerance");
  scan_cmd->add_option("--out", scan.out_path, "JSON-lines output file");
  scan_cmd->add_flag("--pretty", scan.config.pretty, "human-readable records");
  scan_cmd->add_flag("--strict-findings", scan.strict_findings, "exit 3 on findings");

  std::string game_script;
  auto* game_cmd = app.add_subcommand("game", "stick-splitting solitaire");
  game_cmd->add_option("--script", game_script, "replay moves from a file");

  try {
    std::vector<const char*> argv{"unsat_lab"};
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    int code = app.exit(e, msg, msg);
    (code == 0 ? out : err) << msg.str();
    return code == 0 ? 0 : 1;
  }

  try {
    if (build_cmd->parsed()) return cmd_build(build, out);
    if (analyze_cmd->parsed()) return cmd_analyze(analyze_matrix, analyze_pretty, out);
    if (normalize_cmd->parsed()) return cmd_normalize(normalize, out);
    if (certify_cmd->parsed()) return cmd_certify(certify, out);
    if (scan_cmd->parsed()) return cmd_scan(scan, out);
    if (game_cmd->parsed()) return cmd_game(game_script, out, in);
  } catch (const GuardError& e) {
    err << "guard: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << "no subcommand\n";
  return 1;
}

}  // namespace unsat
