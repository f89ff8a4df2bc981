#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "subsample/barrier.hpp"
#include "subsample/function_system.hpp"

namespace subsample {

enum class EpsilonMode { exact, relaxed, custom };
enum class WeightRule { minimal, maximal, midpoint };
enum class OracleKind { finite_scan, iid_measure, christoffel };

struct SelectionConfig {
  int n = 0;
  EpsilonMode epsilon_mode = EpsilonMode::exact;
  double epsilon_custom = 0.0;
  WeightRule weight_rule = WeightRule::minimal;
  bool retest_previous = false;
  OracleKind oracle = OracleKind::finite_scan;
  int scan_grid = 0;  // per-axis resolution when scanning an analytic system
  std::uint64_t rng_seed = 0;
  long max_proposals = 0;  // 0 -> 200 * n * m
  int dense_threshold = 256;
  int threads = 1;
  int snapshot_every = 0;  // 0 -> initial and final states only
};

struct IterationRecord {
  double lower_value = 0.0;   // L at acceptance
  double upper_value = 0.0;   // U at acceptance
  double inv_weight = 0.0;    // 1/w, inside [U, L]
  long proposals = 0;         // oracle draws spent on this iteration
  int point = -1;             // index into points
  bool retest = false;
};

struct SelectionRun {
  int m = 0;
  int n = 0;
  int upper_dim = 0;
  double effective_dim = 0.0;
  double r = 0.0;
  double s = 0.0;
  double delta = 0.0;
  double delta_eff = 0.0;
  double zeta = 0.0;
  double epsilon = 0.0;
  bool lower_edge = false;
  bool upper_edge = false;
  bool woodbury = false;

  std::vector<Point> points;
  std::vector<double> weights;
  std::vector<IterationRecord> iterations;
  std::vector<double> phi_trace;   // length n+1, NaN in edge mode
  std::vector<double> psi_trace;   // length n+1, NaN in edge mode
  std::vector<double> master_lhs;  // 1/delta - Phi, standard modes only
  std::vector<double> master_rhs;  // 1/zeta + Psi

  long proposals_total = 0;
  long christoffel_rejections = 0;

  // certification
  double lower_bound_certified = 0.0;
  double lower_bound_certified_whitened = 0.0;
  double upper_bound_certified = 0.0;
  double target_lower = 0.0;
  double target_lower_whitened = 0.0;
  double target_upper = 0.0;
  double lambda_min_gram = 1.0;
  double lambda_max_j = 0.0;
  double weight_sum = 0.0;
  bool certified = false;

  // barrier snapshots for blocked-region grids (iteration 0 = fresh barriers)
  std::vector<int> snapshot_iterations;
  std::vector<LowerBarrier> snapshot_lower;
  std::vector<UpperBarrier> snapshot_upper;

  const LowerBarrier& snapshot_lower_at(int iteration) const;
  const UpperBarrier& snapshot_upper_at(int iteration) const;
};

// Barrier setup per the induction start: A0 = (delta m / r) I and
// B0 = (zeta Tr(J)/s) I, so that 1/delta - Phi(A0) = n = 1/zeta + Psi(B0).
// Dispatches the m = 1 and M_eff < 1 + 1/n edge modes.
std::pair<LowerBarrier, UpperBarrier> initialize_barriers(
    const SelectionConfig& cfg, const FunctionSystem& system);

// Runs the full greedy loop: suggest, test L >= U, pick 1/w in [U, L],
// rank-one update, repeat n times; then certifies the frame bounds.
SelectionRun select(const SelectionConfig& cfg, const FunctionSystem& system);

// Recomputes the certified bounds and targets on a finished run.
void certify(SelectionRun& run, const FunctionSystem& system);

double epsilon_for(const SelectionConfig& cfg, int m, int n);

}  // namespace subsample
