#pragma once

#include <vector>

#include "subsample/function_system.hpp"
#include "subsample/sparsifier.hpp"

namespace subsample {

struct RecoveryProblem {
  const FunctionSystem* system = nullptr;
  std::vector<Point> points;
  std::vector<double> weights;
  Vector observations;     // y_i = f(x_i) + e_i
  double noise_sup = 0.0;  // known bound on |e_i|, 0 if exact
  // Solve over V_m + span{1} instead of V_m, for systems whose lower family
  // does not already contain the constant; the extra coefficient comes last.
  bool augment_constant = false;
};

// argmin over V_m of sum_i w_i |y_i - g(x_i)|^2, solved by normal equations
// on the m x m weighted Gram. The Gram must be positive definite, which a
// certified point set guarantees.
Vector weighted_least_squares(const RecoveryProblem& problem);

// Same with unit weights.
Vector plain_least_squares(const RecoveryProblem& problem);

// Singular values sigma_0 >= sigma_1 >= ... of the embedding H -> L2.
struct SpectralProfile {
  RealVector sigmas;

  double lambda_m(int m) const;      // sigma_m^2
  double trace_tail(int m) const;    // sum_{k > m} sigma_k^2
  double trace_km(int m) const { return lambda_m(m) + trace_tail(m); }
};

enum class RecoveryMode { exact, noisy };

struct RecoveryCertificate {
  double r = 0.0;
  double s = 0.0;        // sqrt((Tr K_m - lambda_m) / (n lambda_m))
  double s_tilde = 0.0;  // sqrt(Tr K_m / (n lambda_m))
  double lambda_m = 0.0;
  double prefactor = 0.0;  // multiplies ||f - P_m f||_H (exact mode)
  double bound = 0.0;      // full bound given the norms below
};

// exact:  ||f - f~||_2 <= (1 + (1+s)/(1-r)) sqrt(lambda_m) ||f - P_m f||_H
// noisy:  ||f - f~||_2 <= (1+s~)/(1-r) (2 sqrt(lambda_m) ||f - P_m f||_H + ||e||_inf)
RecoveryCertificate recovery_certificate(const SpectralProfile& profile, int m,
                                         int n, RecoveryMode mode,
                                         double h_norm, double noise_sup = 0.0);

// (1 + 1/(1-r)) (sigma_m + sqrt(tail/n)), with the printed integer
// prefactors 2m+1 at n = m and 5 at n = 2m.
double sampling_number_bound(const SpectralProfile& profile, int m, int n);

struct TruncationBounds {
  double c_h = 0.0;      // 2^(t+beta) (1 + sum 2^(l(2t-2a)) l^(2b))^(1/2)
  double c_inf = 0.0;    // C_eta 2^theta (1 + sum 2^(l(theta-a)) l^b)
  double c_total = 0.0;  // (1 + 32 c_h + 16 c_inf) (2a0/(a0-theta))^(b+1/2)
  double h_norm_bound = 0.0;  // C_f c_h m^(t-a) log2^b m
  double sup_bound = 0.0;     // C_f c_inf N^(theta-a) log2^b N
};

// All logarithms base 2. Requires alpha > t for the series to converge.
TruncationBounds truncation_error_bounds(const TruncationPlan& plan, double c_f,
                                         double alpha, double beta);

struct CoefficientTarget {
  // f = sum_k coeffs[k-1] eta_k over the ordered basis, ranks 1..K.
  std::vector<Complex> coeffs;
  double alpha = 0.0;
  double beta = 0.0;
  double c_f = 0.0;  // <= 0 -> computed exactly from the coefficients
};

struct RecoveryReport {
  SelectionRun run;
  // exact-data solve
  double measured_error = 0.0;        // ||f - f~||_2 via Parseval
  double certificate_thm = 0.0;       // C C_f m^-alpha log2^beta m
  double certificate_cor_exact = 0.0; // from the true spectral profile
  double h_norm = 0.0;                // ||f - P_m f||_H
  double c_f_used = 0.0;
  bool pass_thm = false;
  bool pass_cor = false;
  // noisy solve on the same points (skipped when noise_sup = 0)
  double noise_sup = 0.0;
  double measured_error_noisy = 0.0;
  double certificate_cor_noisy = 0.0;
  bool pass_noisy = true;
};

// Full constructive pipeline: build the truncated system, select n = 2m
// points with the relaxed increment and Christoffel proposals, solve the
// weighted least squares problem, and measure the error exactly in
// coefficient space.
RecoveryReport end_to_end_recover(const UnivariateBasis& basis,
                                  const IndexOrdering& ordering,
                                  const TruncationPlan& plan,
                                  const CoefficientTarget& target,
                                  double noise_sup, std::uint64_t seed,
                                  int threads = 1);

}  // namespace subsample
