#include "unsat/tree.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <sstream>
#include <stdexcept>

#include "unsat/errors.hpp"

namespace unsat {

BinaryTree BinaryTree::single_leaf() {
  BinaryTree t;
  t.nodes_.push_back(Node{});
  t.root_ = 0;
  t.reindex();
  return t;
}

BinaryTree BinaryTree::from_structure(std::vector<Node> nodes, int root) {
  BinaryTree t;
  t.nodes_ = std::move(nodes);
  t.root_ = root;
  t.reindex();
  return t;
}

void BinaryTree::reindex() {
  leaves_.clear();
  internals_.clear();
  max_var_ = 0;
  leaf_index_.assign(nodes_.size(), -1);
  if (root_ < 0 || root_ >= static_cast<int>(nodes_.size()))
    throw std::invalid_argument("tree has no root");

  std::set<int> seen_vars;
  nodes_[root_].parent = -1;
  nodes_[root_].depth = 0;

  // depth-first for leaf order, iterative to survive deep caterpillars
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    Node& nd = nodes_[static_cast<std::size_t>(id)];
    if ((nd.left < 0) != (nd.right < 0))
      throw std::invalid_argument("tree is not full: vertex has exactly one child");
    if (nd.is_leaf()) {
      if (nd.var != 0) throw std::invalid_argument("leaf carries a variable label");
      leaf_index_[id] = static_cast<int>(leaves_.size());
      leaves_.push_back(id);
      continue;
    }
    if (nd.var < 1) throw std::invalid_argument("internal vertex lacks a variable label");
    if (!seen_vars.insert(nd.var).second)
      throw std::invalid_argument("duplicate internal label " + std::to_string(nd.var));
    max_var_ = std::max(max_var_, nd.var);
    nodes_[nd.left].parent = id;
    nodes_[nd.left].depth = nd.depth + 1;
    nodes_[nd.right].parent = id;
    nodes_[nd.right].depth = nd.depth + 1;
    stack.push_back(nd.right);
    stack.push_back(nd.left);
  }

  std::deque<int> queue{root_};
  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    const Node& nd = nodes_[static_cast<std::size_t>(id)];
    if (nd.is_leaf()) continue;
    internals_.push_back(id);
    queue.push_back(nd.left);
    queue.push_back(nd.right);
  }
}

int BinaryTree::leaf_index(int node_id) const {
  int idx = leaf_index_[static_cast<std::size_t>(node_id)];
  if (idx < 0) throw std::invalid_argument("node is not a leaf");
  return idx;
}

int BinaryTree::node_of_var(int var) const {
  for (int id : internals_)
    if (node(id).var == var) return id;
  return -1;
}

int BinaryTree::split_leaf(int leaf_node_id, int var, std::string name) {
  Node& nd = nodes_[static_cast<std::size_t>(leaf_node_id)];
  if (!nd.is_leaf()) throw std::invalid_argument("split_leaf target is not a leaf");
  int l = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{});
  int r = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{});
  Node& nd2 = nodes_[static_cast<std::size_t>(leaf_node_id)];
  nd2.var = var;
  nd2.name = std::move(name);
  nd2.left = l;
  nd2.right = r;
  reindex();
  return leaf_node_id;
}

BinaryTree complete_tree(int depth) {
  if (depth < 0) throw std::invalid_argument("negative depth");
  if (depth > kTreeDepthGuard)
    throw GuardError("complete_tree limited to depth " + std::to_string(kTreeDepthGuard));
  // heap layout: vertex i has children 2i+1, 2i+2; internal vertices are
  // exactly the first 2^depth - 1, in breadth-first order
  std::int64_t n_internal = (std::int64_t{1} << depth) - 1;
  std::int64_t total = 2 * n_internal + 1;
  std::vector<BinaryTree::Node> nodes(static_cast<std::size_t>(total));
  for (std::int64_t i = 0; i < n_internal; ++i) {
    auto& nd = nodes[static_cast<std::size_t>(i)];
    nd.var = static_cast<int>(i + 1);
    nd.name = "z" + std::to_string(i + 1);
    nd.left = static_cast<int>(2 * i + 1);
    nd.right = static_cast<int>(2 * i + 2);
  }
  return BinaryTree::from_structure(std::move(nodes), 0);
}

BinaryTree random_tree(int n_leaves, Rng& rng) {
  if (n_leaves < 1) throw std::invalid_argument("need at least one leaf");
  std::vector<BinaryTree::Node> nodes(1);
  std::vector<int> leaf_ids{0};
  for (int step = 1; step < n_leaves; ++step) {
    std::size_t pick = static_cast<std::size_t>(rng.next_below(leaf_ids.size()));
    int id = leaf_ids[pick];
    int l = static_cast<int>(nodes.size());
    nodes.push_back({});
    int r = static_cast<int>(nodes.size());
    nodes.push_back({});
    nodes[static_cast<std::size_t>(id)].left = l;
    nodes[static_cast<std::size_t>(id)].right = r;
    nodes[static_cast<std::size_t>(id)].var = 1;  // placeholder until relabel
    leaf_ids[pick] = l;
    leaf_ids.push_back(r);
  }
  // canonical labels: breadth-first order, root = 1
  std::deque<int> queue{0};
  int next = 1;
  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    auto& nd = nodes[static_cast<std::size_t>(id)];
    if (nd.left < 0) continue;
    nd.var = next++;
    nd.name = "z" + std::to_string(nd.var);
    queue.push_back(nd.left);
    queue.push_back(nd.right);
  }
  return BinaryTree::from_structure(std::move(nodes), 0);
}

CnfFormula formula_of_tree(const BinaryTree& t, const LiteralMask& mask) {
  // mask pairs must reference (leaf, ancestor variable)
  for (auto [leaf_idx, var] : mask.removed) {
    if (leaf_idx < 0 || leaf_idx >= t.n_leaves())
      throw std::invalid_argument("mask leaf index out of range");
    int id = t.leaves()[static_cast<std::size_t>(leaf_idx)];
    bool ancestor = false;
    for (int p = t.node(id).parent; p >= 0; p = t.node(p).parent)
      if (t.node(p).var == var) {
        ancestor = true;
        break;
      }
    if (!ancestor)
      throw std::invalid_argument("mask pair (" + std::to_string(leaf_idx) + ", " +
                                  std::to_string(var) + ") does not name an ancestor");
  }

  CnfFormula f;
  f.n_vars = t.max_var();
  std::map<int, int> pos_left, neg_left;  // surviving occurrences per variable
  for (int leaf : t.leaves()) {
    int leaf_idx = t.leaf_index(leaf);
    std::vector<Literal> lits;
    int child = leaf;
    for (int p = t.node(leaf).parent; p >= 0; child = p, p = t.node(child).parent) {
      const auto& pn = t.node(p);
      bool positive = pn.left == child;
      if (!mask.removed.count({leaf_idx, pn.var})) {
        lits.push_back(Literal{pn.var, positive});
        (positive ? pos_left : neg_left)[pn.var]++;
      }
    }
    f.clauses.push_back(Clause(std::move(lits)));
  }
  for (int id : t.internals()) {
    int v = t.node(id).var;
    if (pos_left[v] == 0 || neg_left[v] == 0)
      throw std::invalid_argument("mask removes every " + std::string(pos_left[v] == 0 ? "positive" : "negative") +
                                  " occurrence of variable " + std::to_string(v));
  }
  return f;
}

int falsified_leaf(const BinaryTree& t, const Assignment& x) {
  if (x.n_vars() < t.max_var()) throw std::invalid_argument("assignment does not cover tree labels");
  int id = t.root();
  while (!t.node(id).is_leaf()) {
    const auto& nd = t.node(id);
    // follow the falsified edge label: left edge is the positive literal
    id = x.sign(nd.var) > 0 ? nd.right : nd.left;
  }
  return t.leaf_index(id);
}

namespace {

struct TreeParser {
  const std::string& text;
  std::size_t pos = 0;
  std::vector<BinaryTree::Node> nodes = {};
  std::map<std::string, int> name_to_var = {};

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  void expect(char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c)
      throw ParseError(std::string("expected '") + c + "'", pos);
    ++pos;
  }

  std::string name_token() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    if (pos == start) throw ParseError("expected label token", pos);
    return text.substr(start, pos - start);
  }

  int parse_node() {
    expect('(');
    skip_ws();
    if (pos < text.size() && text[pos] == ')') {
      ++pos;
      nodes.push_back({});
      return static_cast<int>(nodes.size() - 1);
    }
    std::size_t name_at = pos;
    std::string name = name_token();
    if (name_to_var.count(name)) throw ParseError("duplicate label '" + name + "'", name_at);
    int var = static_cast<int>(name_to_var.size()) + 1;
    name_to_var[name] = var;
    int self = static_cast<int>(nodes.size());
    nodes.push_back({});
    nodes[static_cast<std::size_t>(self)].var = var;
    nodes[static_cast<std::size_t>(self)].name = name;
    int left = parse_node();
    int right = parse_node();
    nodes[static_cast<std::size_t>(self)].left = left;
    nodes[static_cast<std::size_t>(self)].right = right;
    expect(')');
    return self;
  }
};

void serialize_node(const BinaryTree& t, int id, std::ostringstream& out) {
  const auto& nd = t.node(id);
  if (nd.is_leaf()) {
    out << "()";
    return;
  }
  out << '(' << (nd.name.empty() ? "z" + std::to_string(nd.var) : nd.name) << ' ';
  serialize_node(t, nd.left, out);
  out << ' ';
  serialize_node(t, nd.right, out);
  out << ')';
}

}  // namespace

BinaryTree parse_tree(const std::string& text) {
  TreeParser p{text};
  int root = p.parse_node();
  p.skip_ws();
  if (p.pos != text.size()) throw ParseError("trailing input after tree", p.pos);
  return BinaryTree::from_structure(std::move(p.nodes), root);
}

std::string serialize_tree(const BinaryTree& t) {
  std::ostringstream out;
  serialize_node(t, t.root(), out);
  return out.str();
}

}  // namespace unsat
