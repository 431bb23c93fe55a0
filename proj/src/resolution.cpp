#include "unsat/resolution.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace unsat {

int ResolutionTree::add_leaf(int clause_index) {
  nodes.push_back(Node{0, -1, -1, clause_index});
  return static_cast<int>(nodes.size() - 1);
}

int ResolutionTree::add_res(int pivot, int left, int right) {
  nodes.push_back(Node{pivot, left, right, -1});
  return static_cast<int>(nodes.size() - 1);
}

ResolutionTree ResolutionTree::leaf_only(int clause_index) {
  ResolutionTree t;
  t.root = t.add_leaf(clause_index);
  return t;
}

int ResolutionTree::n_leaves() const {
  int k = 0;
  for (const Node& nd : nodes)
    if (nd.is_leaf()) ++k;
  return k;
}

namespace {

// children in post-order, with tree-shape validation
std::vector<int> postorder(const ResolutionTree& proof, ValidityReport* report) {
  std::vector<int> order;
  std::vector<char> visited(proof.nodes.size(), 0);
  if (proof.root < 0 || proof.root >= static_cast<int>(proof.nodes.size())) {
    if (report) {
      report->message = "proof has no root";
      report->node = proof.root;
    }
    return order;
  }
  std::vector<std::pair<int, bool>> stack{{proof.root, false}};
  while (!stack.empty()) {
    auto [id, expanded] = stack.back();
    stack.pop_back();
    if (id < 0 || id >= static_cast<int>(proof.nodes.size())) {
      if (report) {
        report->message = "child index out of range";
        report->node = id;
      }
      return {};
    }
    if (expanded) {
      order.push_back(id);
      continue;
    }
    if (visited[static_cast<std::size_t>(id)]) {
      if (report) {
        report->message = "node appears in two branches (proof is not a tree)";
        report->node = id;
      }
      return {};
    }
    visited[static_cast<std::size_t>(id)] = 1;
    stack.push_back({id, true});
    const auto& nd = proof.nodes[static_cast<std::size_t>(id)];
    if (!nd.is_leaf()) {
      stack.push_back({nd.right, false});
      stack.push_back({nd.left, false});
    }
  }
  return order;
}

}  // namespace

ValidityReport check_resolution(const CnfFormula& f, const ResolutionTree& proof) {
  ValidityReport report;
  report.derived.resize(proof.nodes.size());
  auto order = postorder(proof, &report);
  if (order.empty()) {
    if (report.message.empty()) report.message = "empty proof";
    return report;
  }
  for (int id : order) {
    const auto& nd = proof.nodes[static_cast<std::size_t>(id)];
    if (nd.is_leaf()) {
      if (nd.clause < 0 || nd.clause >= static_cast<int>(f.clauses.size())) {
        report.message = "leaf references clause " + std::to_string(nd.clause + 1) +
                         " outside the formula";
        report.node = id;
        return report;
      }
      report.derived[static_cast<std::size_t>(id)] = f.clauses[static_cast<std::size_t>(nd.clause)];
      continue;
    }
    const Clause& left = report.derived[static_cast<std::size_t>(nd.left)];
    const Clause& right = report.derived[static_cast<std::size_t>(nd.right)];
    if (left.polarity(nd.pivot) != 1) {
      report.message = "pivot " + std::to_string(nd.pivot) +
                       " does not occur positively in the left child";
      report.node = id;
      return report;
    }
    if (right.polarity(nd.pivot) != -1) {
      report.message = "pivot " + std::to_string(nd.pivot) +
                       " does not occur negatively in the right child";
      report.node = id;
      return report;
    }
    std::vector<Literal> lits;
    for (const Literal& l : left.literals())
      if (l.var != nd.pivot) lits.push_back(l);
    for (const Literal& l : right.literals())
      if (l.var != nd.pivot) lits.push_back(l);
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 0; i + 1 < lits.size(); ++i)
      if (lits[i].var == lits[i + 1].var) {
        report.message = "tautological resolvent on variable " + std::to_string(lits[i].var);
        report.node = id;
        return report;
      }
    report.derived[static_cast<std::size_t>(id)] = Clause(std::move(lits));
  }
  if (!report.derived[static_cast<std::size_t>(proof.root)].empty()) {
    report.message = "root clause is not empty";
    report.node = proof.root;
    return report;
  }
  report.valid = true;
  report.message = "VALID";
  return report;
}

bool is_read_once(const CnfFormula& f, const ResolutionTree& proof) {
  ValidityReport r = check_resolution(f, proof);
  if (!r.valid) throw std::invalid_argument("is_read_once on invalid proof: " + r.message);
  std::set<int> seen;
  for (const auto& nd : proof.nodes)
    if (nd.is_leaf() && !seen.insert(nd.clause).second) return false;
  return true;
}

namespace {

struct DpllState {
  const CnfFormula& f;
  std::vector<std::int8_t> assign;  // 0 unassigned
  ResolutionTree proof;
  std::vector<Clause> derived;
  std::optional<Assignment> model;

  explicit DpllState(const CnfFormula& formula)
      : f(formula), assign(static_cast<std::size_t>(formula.n_vars), 0) {}

  int make_leaf(int clause_index) {
    int id = proof.add_leaf(clause_index);
    derived.push_back(f.clauses[static_cast<std::size_t>(clause_index)]);
    return id;
  }

  // proof node refuting f under the current partial assignment, or
  // nullopt when a model is found
  std::optional<int> refute() {
    // falsified clause?
    for (std::size_t c = 0; c < f.clauses.size(); ++c) {
      bool falsified = true;
      for (const Literal& l : f.clauses[c].literals()) {
        std::int8_t s = assign[static_cast<std::size_t>(l.var) - 1];
        if (s == 0 || (s > 0) == l.positive) {
          falsified = false;
          break;
        }
      }
      if (falsified) return make_leaf(static_cast<int>(c));
    }
    // branch variable: lowest index occurring unassigned in a clause with
    // no true literal yet
    int branch = 0;
    for (const Clause& c : f.clauses) {
      bool satisfied = false;
      int lowest = 0;
      for (const Literal& l : c.literals()) {
        std::int8_t s = assign[static_cast<std::size_t>(l.var) - 1];
        if (s != 0 && (s > 0) == l.positive) {
          satisfied = true;
          break;
        }
        if (s == 0 && (lowest == 0 || l.var < lowest)) lowest = l.var;
      }
      if (!satisfied && lowest != 0 && (branch == 0 || lowest < branch)) branch = lowest;
    }
    if (branch == 0) {
      Assignment x;
      x.signs.resize(static_cast<std::size_t>(f.n_vars));
      for (int v = 1; v <= f.n_vars; ++v)
        x.signs[static_cast<std::size_t>(v) - 1] = assign[static_cast<std::size_t>(v) - 1] == 0
                                                       ? std::int8_t{1}
                                                       : assign[static_cast<std::size_t>(v) - 1];
      model = std::move(x);
      return std::nullopt;
    }

    assign[static_cast<std::size_t>(branch) - 1] = 1;
    auto true_branch = refute();
    if (!true_branch) return std::nullopt;
    assign[static_cast<std::size_t>(branch) - 1] = -1;
    auto false_branch = refute();
    assign[static_cast<std::size_t>(branch) - 1] = 0;
    if (!false_branch) return std::nullopt;

    // hoist a child that never used the branch variable
    if (!derived[static_cast<std::size_t>(*false_branch)].contains_var(branch)) return false_branch;
    if (!derived[static_cast<std::size_t>(*true_branch)].contains_var(branch)) return true_branch;
    int id = proof.add_res(branch, *false_branch, *true_branch);
    std::vector<Literal> lits;
    for (const Literal& l : derived[static_cast<std::size_t>(*false_branch)].literals())
      if (l.var != branch) lits.push_back(l);
    for (const Literal& l : derived[static_cast<std::size_t>(*true_branch)].literals())
      if (l.var != branch) lits.push_back(l);
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    derived.push_back(Clause(std::move(lits)));
    return id;
  }
};

// drop proof nodes orphaned by hoisting
ResolutionTree compact(const ResolutionTree& proof) {
  ResolutionTree out;
  std::vector<int> remap(proof.nodes.size(), -1);
  // post-order copy keeps children before parents
  std::vector<std::pair<int, bool>> stack{{proof.root, false}};
  while (!stack.empty()) {
    auto [id, expanded] = stack.back();
    stack.pop_back();
    const auto& nd = proof.nodes[static_cast<std::size_t>(id)];
    if (expanded) {
      remap[static_cast<std::size_t>(id)] =
          nd.is_leaf() ? out.add_leaf(nd.clause)
                       : out.add_res(nd.pivot, remap[static_cast<std::size_t>(nd.left)],
                                     remap[static_cast<std::size_t>(nd.right)]);
      continue;
    }
    stack.push_back({id, true});
    if (!nd.is_leaf()) {
      stack.push_back({nd.right, false});
      stack.push_back({nd.left, false});
    }
  }
  out.root = remap[static_cast<std::size_t>(proof.root)];
  return out;
}

}  // namespace

RefutationResult dpll_refute(const CnfFormula& f) {
  if (f.n_vars > kEnumerationGuard)
    throw GuardError("dpll_refute limited to " + std::to_string(kEnumerationGuard) + " variables");
  f.validate();
  DpllState state(f);
  auto root = state.refute();
  RefutationResult result;
  if (root) {
    state.proof.root = *root;
    result.proof = compact(state.proof);
  } else {
    result.assignment = state.model;
  }
  return result;
}

SplitResult split_repeated_variables(const CnfFormula& f, const ResolutionTree& proof) {
  ValidityReport check = check_resolution(f, proof);
  if (!check.valid) throw std::invalid_argument("split requires a valid proof: " + check.message);
  if (!is_read_once(f, proof)) throw std::invalid_argument("split requires a read-once proof");

  CnfFormula formula = f;
  ResolutionTree tree = proof;
  int n_vars = f.n_vars;

  while (true) {
    auto order = postorder(tree, nullptr);
    // pivot occurrences in post-order
    std::map<int, std::vector<int>> occurrences;
    for (int id : order) {
      const auto& nd = tree.nodes[static_cast<std::size_t>(id)];
      if (!nd.is_leaf()) occurrences[nd.pivot].push_back(id);
    }
    int chosen = -1, pivot = 0;
    for (const auto& [var, nodes] : occurrences) {
      if (nodes.size() < 2) continue;
      // first post-order occurrence whose subtree holds no other one
      for (int candidate : nodes) {
        std::set<int> inside;
        std::vector<int> stack{candidate};
        while (!stack.empty()) {
          int id = stack.back();
          stack.pop_back();
          inside.insert(id);
          const auto& nd = tree.nodes[static_cast<std::size_t>(id)];
          if (!nd.is_leaf()) {
            stack.push_back(nd.left);
            stack.push_back(nd.right);
          }
        }
        bool lowest = true;
        for (int other : nodes)
          if (other != candidate && inside.count(other)) lowest = false;
        if (lowest) {
          chosen = candidate;
          pivot = var;
          break;
        }
      }
      if (chosen >= 0) break;
    }
    if (chosen < 0) break;

    int fresh = ++n_vars;
    formula.n_vars = n_vars;
    std::vector<int> stack{chosen};
    while (!stack.empty()) {
      int id = stack.back();
      stack.pop_back();
      auto& nd = tree.nodes[static_cast<std::size_t>(id)];
      if (nd.is_leaf()) {
        Clause& c = formula.clauses[static_cast<std::size_t>(nd.clause)];
        int pol = c.polarity(pivot);
        if (pol != 0) c = c.without_var(pivot).with_literal(Literal{fresh, pol > 0});
        continue;
      }
      if (nd.pivot == pivot) nd.pivot = fresh;
      stack.push_back(nd.left);
      stack.push_back(nd.right);
    }
  }

  auto [restricted, remapped] = restrict_to_used_clauses(formula, tree);
  ValidityReport post = check_resolution(restricted, remapped);
  if (!post.valid) throw std::logic_error("variable splitting broke the proof: " + post.message);
  return {std::move(restricted), std::move(remapped)};
}

OccurrenceStats occurrence_stats(const CnfFormula& f, const ResolutionTree& proof) {
  ValidityReport check = check_resolution(f, proof);
  if (!check.valid) throw std::invalid_argument("occurrence_stats on invalid proof: " + check.message);
  OccurrenceStats stats;
  stats.occ.resize(f.clauses.size());
  stats.node_depth.assign(proof.nodes.size(), 0);
  std::vector<int> stack{proof.root};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    const auto& nd = proof.nodes[static_cast<std::size_t>(id)];
    if (nd.is_leaf()) {
      stats.occ[static_cast<std::size_t>(nd.clause)].push_back(id);
      continue;
    }
    stats.var_pivot_depths[nd.pivot].push_back(stats.node_depth[static_cast<std::size_t>(id)]);
    stats.node_depth[static_cast<std::size_t>(nd.left)] = stats.node_depth[static_cast<std::size_t>(id)] + 1;
    stats.node_depth[static_cast<std::size_t>(nd.right)] = stats.node_depth[static_cast<std::size_t>(id)] + 1;
    stack.push_back(nd.left);
    stack.push_back(nd.right);
  }
  for (auto& leaf_list : stats.occ) std::sort(leaf_list.begin(), leaf_list.end());
  return stats;
}

std::pair<CnfFormula, ResolutionTree> restrict_to_used_clauses(const CnfFormula& f,
                                                               const ResolutionTree& proof) {
  std::set<int> used;
  for (const auto& nd : proof.nodes)
    if (nd.is_leaf()) used.insert(nd.clause);
  std::vector<int> remap(f.clauses.size(), -1);
  CnfFormula out;
  out.n_vars = f.n_vars;
  for (int c : used) {
    remap[static_cast<std::size_t>(c)] = static_cast<int>(out.clauses.size());
    out.clauses.push_back(f.clauses[static_cast<std::size_t>(c)]);
  }
  ResolutionTree tree = proof;
  for (auto& nd : tree.nodes)
    if (nd.is_leaf()) nd.clause = remap[static_cast<std::size_t>(nd.clause)];
  return {std::move(out), std::move(tree)};
}

namespace {

struct ProofParser {
  const std::string& text;
  std::size_t pos = 0;
  ResolutionTree tree = {};

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  void expect(char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c)
      throw ParseError(std::string("expected '") + c + "'", pos);
    ++pos;
  }

  std::string token() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    if (pos == start) throw ParseError("expected token", pos);
    return text.substr(start, pos - start);
  }

  int variable_token() {
    std::size_t at = pos;
    std::string t = token();
    std::string digits = (t.size() > 1 && t[0] == 'z') ? t.substr(1) : t;
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(),
                                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw ParseError("expected variable id, got '" + t + "'", at);
    return std::stoi(digits);
  }

  int parse_node() {
    expect('(');
    std::size_t at = pos;
    std::string kind = token();
    int id;
    if (kind == "leaf") {
      std::size_t num_at = pos;
      std::string t = token();
      int k;
      try {
        k = std::stoi(t);
      } catch (const std::exception&) {
        throw ParseError("expected clause index", num_at);
      }
      id = tree.add_leaf(k - 1);
    } else if (kind == "res") {
      int pivot = variable_token();
      int left = parse_node();
      int right = parse_node();
      id = tree.add_res(pivot, left, right);
    } else {
      throw ParseError("expected 'leaf' or 'res', got '" + kind + "'", at);
    }
    expect(')');
    return id;
  }
};

}  // namespace

ResolutionTree parse_proof(const std::string& text, const CnfFormula& f) {
  ProofParser p{text};
  p.tree.root = p.parse_node();
  p.skip_ws();
  if (p.pos != text.size()) throw ParseError("trailing input after proof", p.pos);
  ValidityReport report = check_resolution(f, p.tree);
  if (!report.valid)
    throw std::invalid_argument("parsed proof is invalid: " + report.message +
                                " (node " + std::to_string(report.node) + ")");
  return p.tree;
}

namespace {
void serialize_node(const ResolutionTree& proof, int id, std::ostringstream& out) {
  const auto& nd = proof.nodes[static_cast<std::size_t>(id)];
  if (nd.is_leaf()) {
    out << "(leaf " << nd.clause + 1 << ')';
    return;
  }
  out << "(res z" << nd.pivot << ' ';
  serialize_node(proof, nd.left, out);
  out << ' ';
  serialize_node(proof, nd.right, out);
  out << ')';
}
}  // namespace

std::string serialize_proof(const ResolutionTree& proof) {
  std::ostringstream out;
  serialize_node(proof, proof.root, out);
  return out.str();
}

ResolutionTree proof_of_tree(const BinaryTree& t) {
  ResolutionTree proof;
  // post-order construction; left subtree carries the positive literal of
  // each vertex, matching the pivot orientation convention
  std::vector<int> remap(static_cast<std::size_t>(t.size()), -1);
  std::vector<std::pair<int, bool>> stack{{t.root(), false}};
  while (!stack.empty()) {
    auto [id, expanded] = stack.back();
    stack.pop_back();
    const auto& nd = t.node(id);
    if (expanded) {
      remap[static_cast<std::size_t>(id)] =
          proof.add_res(nd.var, remap[static_cast<std::size_t>(nd.left)],
                        remap[static_cast<std::size_t>(nd.right)]);
      continue;
    }
    if (nd.is_leaf()) {
      remap[static_cast<std::size_t>(id)] = proof.add_leaf(t.leaf_index(id));
      continue;
    }
    stack.push_back({id, true});
    stack.push_back({nd.right, false});
    stack.push_back({nd.left, false});
  }
  proof.root = remap[static_cast<std::size_t>(t.root())];
  return proof;
}

CnfFormula random_unsat_formula(int n_vars, Rng& rng) {
  if (n_vars < 3) throw std::invalid_argument("random_unsat_formula needs at least 3 variables");
  if (n_vars > kEnumerationGuard) throw GuardError("random_unsat_formula limited to 24 variables");
  const int m = 8 * n_vars;
  while (true) {
    CnfFormula f;
    f.n_vars = n_vars;
    f.clauses.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      std::set<int> vars;
      while (static_cast<int>(vars.size()) < 3)
        vars.insert(1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_vars))));
      std::vector<Literal> lits;
      for (int v : vars) lits.push_back(Literal{v, rng.coin()});
      f.clauses.push_back(Clause(std::move(lits)));
    }
    if (brute_force_unsat(f).unsatisfiable) return f;
  }
}

}  // namespace unsat
