#pragma once

#include <string>
#include <utility>
#include <vector>

#include "subsample/sparsifier.hpp"

#include "json.hpp"

namespace subsample {
namespace oracles {

// Row-major Hermitian matrix for the brute-force routines. Everything in
// this namespace is deliberately hand-rolled scalar arithmetic so the checks
// share no linear-algebra kernels with the implementation they audit.
using HermMatrix = std::vector<std::vector<Complex>>;

HermMatrix to_herm(const Matrix& m);

struct OracleReport {
  std::string name;
  double max_abs_dev = 0.0;
  double max_rel_dev = 0.0;
  bool pass = false;
  long cases = 0;
};

// Extreme eigenvalues by cyclic Jacobi rotations, iterated until the
// off-diagonal norm falls below 1e-13 (relative); dim <= 64.
std::pair<double, double> eig_extremes_bruteforce(const HermMatrix& a);

// All eigenvalues, same engine; ascending.
std::vector<double> eig_all_bruteforce(const HermMatrix& a);

// Eigenvalues by Sturm-style bisection: the inertia of A - x I read off an
// LDL* factorization counts eigenvalues below x. Second, independent route
// used to audit the Jacobi engine itself.
std::vector<double> eig_all_bisection(const HermMatrix& a);

// Draws random coefficient vectors in the whitened lower family and checks
//   sqrt(lo) ||f||_2 <= sqrt(sum_i w_i |f(x_i)|^2) <= sqrt(hi) ||f||_2
// with the run's certified constants lo, hi; ||f||_2 via Parseval.
OracleReport discretization_check(const SelectionRun& run,
                                  const FunctionSystem& system, long trials,
                                  std::uint64_t seed);

struct AcceptanceProbe {
  double empirical_rate = 0.0;
  double floor = 0.0;  // epsilon / m
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  long accepted = 0;
  long proposals = 0;
  bool consistent = false;  // interval not entirely below the floor
};

// Runs a relaxed-mode Christoffel-driven selection and compares the pooled
// acceptance frequency against the theoretical floor, with a 99% Wilson
// interval. One-sided sanity check, not a sharp test.
AcceptanceProbe acceptance_rate_probe(const SelectionConfig& cfg,
                                      const FunctionSystem& system);

// The battery behind the `verify` CLI subcommand.
std::vector<OracleReport> run_oracle_battery(std::uint64_t seed);
nlohmann::ordered_json battery_to_json(const std::vector<OracleReport>& reports);

}  // namespace oracles
}  // namespace subsample
