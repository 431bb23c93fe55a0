#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "unsat/certificates.hpp"
#include "unsat/normopt.hpp"

namespace unsat {

struct ScanConfig {
  std::string mode;  // trees | conjecture | search
  long count = 100;
  std::uint64_t seed = 1;
  int max_leaves = 64;  // trees mode
  int n_vars = 12;      // conjecture/search modes
  double tol = 1e-6;
  bool pretty = false;
};

struct ScanRecord {
  long instance_id = 0;
  std::string kind;
  double value = 0.0;
  std::optional<double> weak_value;
  double bound = 0.0;
  std::uint64_t seed = 0;
  bool finding = false;
  std::string note;

  std::string to_json() const;
  std::string to_pretty() const;
};

struct ScanSummary {
  long instances = 0;
  long findings = 0;
  double best_value = 0.0;
};

// Runs instances in parallel with per-instance derived seeds; records are
// emitted in instance order.  A FINDING marks an observation that would
// contradict the certified bound; findings are reported, never suppressed.
ScanSummary run_scan(const ScanConfig& config, std::ostream& out);

}  // namespace unsat
