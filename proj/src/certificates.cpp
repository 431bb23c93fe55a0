#include "unsat/certificates.hpp"

#include <bit>
#include <cmath>

#include "unsat/parallel.hpp"

namespace unsat {

namespace {

double half_power(int d) { return std::exp2(-d / 2.0); }

double leaf_half_power_sum(const BinaryTree& t) {
  double s = 0;
  for (int id : t.leaves()) s += half_power(t.depth(id));
  return s;
}

double internal_half_power_sum(const BinaryTree& t) {
  double s = 0;
  for (int id : t.internals()) s += half_power(t.depth(id));
  return s;
}

}  // namespace

TreeCertificate tree_certificate(const BinaryTree& t) {
  double z = leaf_half_power_sum(t);
  TreeCertificate cert;
  cert.mu.mu.reserve(static_cast<std::size_t>(t.n_leaves()));
  for (int id : t.leaves()) cert.mu.mu.push_back(half_power(t.depth(id)) / z);
  cert.bound = tree_dual_bound(t);
  return cert;
}

double tree_dual_bound(const BinaryTree& t) {
  return (1.0 + internal_half_power_sum(t)) / leaf_half_power_sum(t);
}

double closed_form_bound(double x) {
  if (x <= 0) throw std::invalid_argument("closed_form_bound requires X > 0");
  return (1.0 + x) / (1.0 + (std::sqrt(2.0) - 1.0) * x);
}

bool l_i_identity_check(const BinaryTree& t, double tol) {
  double lhs = leaf_half_power_sum(t);
  double rhs = 1.0 + (std::sqrt(2.0) - 1.0) * internal_half_power_sum(t);
  return std::abs(lhs - rhs) <= tol;
}

double PathPartitionMap::weight(int leaf_node) const {
  int p = path_len_of_leaf[static_cast<std::size_t>(leaf_node)];
  return p == kUnmapped ? 0.0 : std::exp2(p / 2.0);
}

PathPartitionMap sample_path_partition(const BinaryTree& t, Rng& rng) {
  if (t.n_internal() < 1)
    throw std::invalid_argument("path partition needs at least one internal vertex");
  PathPartitionMap map;
  map.leaf_of_internal.assign(static_cast<std::size_t>(t.size()), -1);
  map.path_len_of_leaf.assign(static_cast<std::size_t>(t.size()), PathPartitionMap::kUnmapped);

  int root_leaves[2] = {-1, -1};
  // stack of (node, path start); left child pushed last so coins are
  // consumed in depth-first left-to-right order
  std::vector<std::pair<int, int>> stack;
  const auto& root_node = t.node(t.root());
  stack.push_back({root_node.right, t.root()});
  stack.push_back({root_node.left, t.root()});
  while (!stack.empty()) {
    auto [id, start] = stack.back();
    stack.pop_back();
    const auto& nd = t.node(id);
    if (nd.is_leaf()) {
      if (start == t.root()) {
        (root_leaves[0] < 0 ? root_leaves[0] : root_leaves[1]) = id;
      } else {
        map.leaf_of_internal[static_cast<std::size_t>(start)] = id;
        map.path_len_of_leaf[static_cast<std::size_t>(id)] = nd.depth - t.depth(start);
      }
      continue;
    }
    bool continue_left = rng.coin();
    stack.push_back({nd.right, continue_left ? id : start});
    stack.push_back({nd.left, continue_left ? start : id});
  }

  int keep = rng.coin() ? 0 : 1;
  int kept_leaf = root_leaves[keep];
  map.unmapped_leaf = root_leaves[1 - keep];
  map.leaf_of_internal[static_cast<std::size_t>(t.root())] = kept_leaf;
  map.path_len_of_leaf[static_cast<std::size_t>(kept_leaf)] = t.depth(kept_leaf);
  return map;
}

LeafMomentEstimate estimate_path_moments(const BinaryTree& t, long samples, std::uint64_t seed) {
  const int n_leaves = t.n_leaves();
  const long shards = 64;
  std::vector<std::vector<double>> sums(shards, std::vector<double>(n_leaves, 0.0));
  std::vector<std::vector<double>> sqsums(shards, std::vector<double>(n_leaves, 0.0));
  std::vector<long> violations(shards, 0);

  // per-node 2^(-depth/2) and per-length 2^(p/2) lookup tables
  std::vector<double> node_mass(static_cast<std::size_t>(t.size()));
  int max_depth = 0;
  for (int id = 0; id < t.size(); ++id) {
    node_mass[static_cast<std::size_t>(id)] = half_power(t.depth(id));
    max_depth = std::max(max_depth, t.depth(id));
  }
  std::vector<double> len_weight(static_cast<std::size_t>(max_depth) + 1);
  for (int p = 0; p <= max_depth; ++p) len_weight[static_cast<std::size_t>(p)] = std::exp2(p / 2.0);

  double internal_total = internal_half_power_sum(t);
  const int threads = thread_cap();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long shard = 0; shard < shards; ++shard) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(shard)));
    long count = samples / shards + (shard < samples % shards ? 1 : 0);
    auto& sum = sums[static_cast<std::size_t>(shard)];
    auto& sq = sqsums[static_cast<std::size_t>(shard)];
    for (long it = 0; it < count; ++it) {
      PathPartitionMap map = sample_path_partition(t, rng);
      double rhs = 0;
      bool structural_ok = map.unmapped_leaf >= 0;
      for (int idx = 0; idx < n_leaves; ++idx) {
        int leaf = t.leaves()[static_cast<std::size_t>(idx)];
        int p = map.path_len_of_leaf[static_cast<std::size_t>(leaf)];
        double w = p == PathPartitionMap::kUnmapped
                       ? 0.0
                       : len_weight[static_cast<std::size_t>(p)];
        sum[static_cast<std::size_t>(idx)] += w;
        sq[static_cast<std::size_t>(idx)] += w * w;
        rhs += node_mass[static_cast<std::size_t>(leaf)] * w;
      }
      for (int internal : t.internals()) {
        int leaf = map.leaf_of_internal[static_cast<std::size_t>(internal)];
        if (leaf < 0 ||
            map.path_len_of_leaf[static_cast<std::size_t>(leaf)] !=
                t.depth(leaf) - t.depth(internal))
          structural_ok = false;
      }
      if (!structural_ok || std::abs(rhs - internal_total) > 1e-9)
        ++violations[static_cast<std::size_t>(shard)];
    }
  }

  LeafMomentEstimate est;
  est.samples = samples;
  est.mean.assign(static_cast<std::size_t>(n_leaves), 0.0);
  est.std_error.assign(static_cast<std::size_t>(n_leaves), 0.0);
  for (long shard = 0; shard < shards; ++shard) {
    est.identity_violations += violations[static_cast<std::size_t>(shard)];
    for (int idx = 0; idx < n_leaves; ++idx) {
      est.mean[static_cast<std::size_t>(idx)] += sums[static_cast<std::size_t>(shard)][static_cast<std::size_t>(idx)];
      est.std_error[static_cast<std::size_t>(idx)] += sqsums[static_cast<std::size_t>(shard)][static_cast<std::size_t>(idx)];
    }
  }
  for (int idx = 0; idx < n_leaves; ++idx) {
    double sum = est.mean[static_cast<std::size_t>(idx)];
    double sq = est.std_error[static_cast<std::size_t>(idx)];
    double mean = sum / static_cast<double>(samples);
    double var = (sq - static_cast<double>(samples) * mean * mean) /
                 static_cast<double>(samples - 1);
    est.mean[static_cast<std::size_t>(idx)] = mean;
    est.std_error[static_cast<std::size_t>(idx)] = std::sqrt(std::max(var, 0.0) / static_cast<double>(samples));
  }
  return est;
}

GeomEstimate geom_identity_estimate(int cap, long samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  const int hard_cap = 64;
  const int effective_cap = cap < 0 ? hard_cap : std::min(cap, hard_cap);
  std::vector<double> value(static_cast<std::size_t>(effective_cap) + 1);
  for (int j = 0; j <= effective_cap; ++j) value[static_cast<std::size_t>(j)] = std::exp2(j / 2.0);

  const long shards = 64;
  std::vector<double> sums(shards, 0.0), sqsums(shards, 0.0);
  const int threads = thread_cap();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long shard = 0; shard < shards; ++shard) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(shard)));
    long count = samples / shards + (shard < samples % shards ? 1 : 0);
    double s = 0, sq = 0;
    for (long it = 0; it < count; ++it) {
      std::uint64_t u = rng.next_u64();
      int x = u == 0 ? hard_cap : std::countr_zero(u) + 1;
      int capped = std::min(x, effective_cap);
      double w = value[static_cast<std::size_t>(capped)];
      s += w;
      sq += w * w;
    }
    sums[static_cast<std::size_t>(shard)] = s;
    sqsums[static_cast<std::size_t>(shard)] = sq;
  }
  double total = 0, total_sq = 0;
  for (long shard = 0; shard < shards; ++shard) {
    total += sums[static_cast<std::size_t>(shard)];
    total_sq += sqsums[static_cast<std::size_t>(shard)];
  }
  GeomEstimate est;
  est.estimate = total / static_cast<double>(samples);
  double var = (total_sq - static_cast<double>(samples) * est.estimate * est.estimate) /
               static_cast<double>(std::max<long>(samples - 1, 1));
  est.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(samples));
  return est;
}

EffectiveDepths effective_depths(const CnfFormula& f, const ResolutionTree& proof) {
  OccurrenceStats stats = occurrence_stats(f, proof);
  EffectiveDepths ed;
  ed.clause_mass.assign(f.clauses.size(), 0.0);
  ed.clause_depth.assign(f.clauses.size(), std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < f.clauses.size(); ++c) {
    for (int leaf : stats.occ[c])
      ed.clause_mass[c] += std::exp2(-stats.node_depth[static_cast<std::size_t>(leaf)]);
    if (ed.clause_mass[c] > 0) ed.clause_depth[c] = -std::log2(ed.clause_mass[c]);
  }
  for (const auto& [var, depths] : stats.var_pivot_depths) {
    double mass = 0;
    for (int d : depths) mass += std::exp2(-d);
    ed.var_mass[var] = mass;
    ed.var_depth[var] = -std::log2(mass);
  }
  return ed;
}

DualWeights conjecture_certificate(const CnfFormula& f, const ResolutionTree& proof) {
  EffectiveDepths ed = effective_depths(f, proof);
  double z = 0;
  for (double mass : ed.clause_mass) {
    if (mass == 0)
      throw std::invalid_argument(
          "clause labels no proof leaf (restrict_to_used_clauses first)");
    z += std::sqrt(mass);
  }
  DualWeights mu;
  mu.mu.reserve(ed.clause_mass.size());
  for (double mass : ed.clause_mass) mu.mu.push_back(std::sqrt(mass) / z);
  return mu;
}

ConjectureValue conjecture_value(const CnfFormula& f, const ResolutionTree& proof) {
  EffectiveDepths ed = effective_depths(f, proof);
  double denom = 0, total_mass = 0;
  for (double mass : ed.clause_mass) {
    if (mass == 0)
      throw std::invalid_argument(
          "clause labels no proof leaf (restrict_to_used_clauses first)");
    denom += std::sqrt(mass);
    total_mass += mass;
  }

  Incidence inc = incidence(f);
  double var_group_sum = 0;   // sum_z sqrt(sum_{C in dz} 2^-d(C))
  double weak_var_sum = 0;    // sum_z 2^(-d(z)/2)
  for (int v = 1; v <= f.n_vars; ++v) {
    const auto& clauses = inc.var_clauses[static_cast<std::size_t>(v) - 1];
    if (clauses.empty()) continue;
    double group = 0;
    for (int c : clauses) group += ed.clause_mass[static_cast<std::size_t>(c)];
    var_group_sum += std::sqrt(group);
    auto it = ed.var_mass.find(v);
    if (it == ed.var_mass.end())
      throw std::logic_error("variable " + std::to_string(v) + " occurs but is never resolved");
    weak_var_sum += std::sqrt(it->second);
  }

  ConjectureValue cv;
  cv.value = (1.0 + var_group_sum) / denom;
  cv.weak_value = (1.0 + weak_var_sum) / denom;
  cv.nae_objective = (std::sqrt(total_mass) + var_group_sum) / denom;
  if (std::abs(cv.nae_objective - cv.value) > 1e-10)
    throw std::logic_error("certificate objective disagrees with the closed form");
  return cv;
}

}  // namespace unsat
