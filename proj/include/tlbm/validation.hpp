#pragma once

#include <string>
#include <vector>

#include "tlbm/field.hpp"
#include "tlbm/velocity_set.hpp"

namespace tlbm {

struct Check {
  std::string name;
  double value = 0;      // measured quantity
  double tolerance = 0;  // pass iff value <= tolerance (or the check is boolean)
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  bool passed = true;
  double seconds = 0;
  std::vector<Check> checks;

  void add(Check c);
  /// Machine-readable form: {"suite", "passed", "seconds", "checks": [...]}.
  std::string to_json() const;
};

const std::vector<std::string>& suite_names();

/// Runs one named suite. Throws ConfigError for an unknown name.
SuiteReport run_suite(const std::string& name);

/// Sum of populations and of c * populations over the physical sites.
struct GlobalTotals {
  double mass = 0;
  double px = 0;
  double py = 0;
};
GlobalTotals global_totals(const PopulationField& f, const VelocitySet& vs);

SuiteReport validate_moments();
/// 32 x 32 D2Q37, periodic, no gravity, 100 steps.
SuiteReport validate_conservation(int L = 32, long long steps = 100);
/// 64 x 64 D2Q37 with walls and gravity over several decompositions and both schedules.
SuiteReport validate_rank_invariance(int L = 64, long long steps = 20);
/// Np in 1..max_np, `tuples` random cost-model inputs.
SuiteReport validate_planner_oracle(int max_np = 64, int tuples = 20);
/// D2Q9 decaying vortex on L x L; measured energy decay rate against 2 nu k^2.
SuiteReport validate_taylor_green(int L = 64, long long steps = 2000, double tau = 0.8);

/// Result of a Taylor-Green run: fitted and expected ln(KE) slopes.
struct DecayFit {
  double measured_rate = 0;
  double expected_rate = 0;
  double relative_error = 0;
};
DecayFit taylor_green_decay(int L, long long steps, double tau, double u0 = 0.01);

}  // namespace tlbm
