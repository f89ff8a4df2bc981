#include "subsample/recovery.hpp"

#include <cmath>

namespace subsample {

namespace {

Vector solve_least_squares(const RecoveryProblem& problem, bool weighted) {
  const FunctionSystem& sys = *problem.system;
  const int m = sys.lower_dim() + (problem.augment_constant ? 1 : 0);
  const std::size_t count = problem.points.size();
  if (problem.weights.size() != count ||
      problem.observations.size() != static_cast<Eigen::Index>(count)) {
    fail(ErrorCode::config, "recovery problem size mismatch");
  }
  Matrix gram = Matrix::Zero(m, m);
  Vector rhs = Vector::Zero(m);
  Vector a;
  for (std::size_t i = 0; i < count; ++i) {
    const double w = weighted ? problem.weights[i] : 1.0;
    if (weighted && !(problem.weights[i] > 0.0)) {
      fail(ErrorCode::config, "weights must be strictly positive");
    }
    sys.eval_lower(problem.points[i], a);
    if (problem.augment_constant) {
      a.conservativeResize(m);
      a[m - 1] = 1.0;
    }
    gram += w * a.conjugate() * a.transpose();
    rhs += w * problem.observations[static_cast<Eigen::Index>(i)] *
           a.conjugate();
  }
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::selection,
         "least-squares design is rank deficient; the points do not certify "
         "a positive lower frame bound");
  }
  return llt.solve(rhs);
}

double log2_pow(double x, double beta) {
  // log2(x)^beta with the convention 0^0 = 1.
  return std::pow(std::log2(x), beta);
}

}  // namespace

Vector weighted_least_squares(const RecoveryProblem& problem) {
  return solve_least_squares(problem, true);
}

Vector plain_least_squares(const RecoveryProblem& problem) {
  return solve_least_squares(problem, false);
}

double SpectralProfile::lambda_m(int m) const {
  if (m < 0 || m >= sigmas.size()) {
    fail(ErrorCode::config, "spectral profile is too short for this m");
  }
  return sigmas[m] * sigmas[m];
}

double SpectralProfile::trace_tail(int m) const {
  double tail = 0.0;
  for (Eigen::Index k = sigmas.size() - 1; k > m; --k) {
    tail += sigmas[k] * sigmas[k];
  }
  return tail;
}

RecoveryCertificate recovery_certificate(const SpectralProfile& profile, int m,
                                         int n, RecoveryMode mode,
                                         double h_norm, double noise_sup) {
  if (n < m) fail(ErrorCode::config, "recovery certificate needs n >= m");
  RecoveryCertificate cert;
  cert.r = std::sqrt(double(m - 1) / double(n));
  cert.lambda_m = profile.lambda_m(m);
  const double tail = profile.trace_tail(m);
  cert.s = std::sqrt(tail / (n * cert.lambda_m));
  cert.s_tilde = std::sqrt((cert.lambda_m + tail) / (n * cert.lambda_m));
  const double root = std::sqrt(cert.lambda_m);
  if (mode == RecoveryMode::exact) {
    cert.prefactor = (1.0 + (1.0 + cert.s) / (1.0 - cert.r)) * root;
    cert.bound = cert.prefactor * h_norm;
  } else {
    cert.prefactor = (1.0 + cert.s_tilde) / (1.0 - cert.r);
    cert.bound = cert.prefactor * (2.0 * root * h_norm + noise_sup);
  }
  return cert;
}

double sampling_number_bound(const SpectralProfile& profile, int m, int n) {
  if (n < m) fail(ErrorCode::config, "sampling number bound needs n >= m");
  const double sigma_m = m < profile.sigmas.size() ? profile.sigmas[m] : 0.0;
  double tail = 0.0;
  for (Eigen::Index k = profile.sigmas.size() - 1; k > m; --k) {
    tail += profile.sigmas[k] * profile.sigmas[k];
  }
  const double body = sigma_m + std::sqrt(tail / double(n));
  double prefactor;
  if (n == m) {
    prefactor = 2.0 * m + 1.0;
  } else if (n == 2 * m) {
    prefactor = 5.0;
  } else {
    const double r = std::sqrt(double(m - 1) / double(n));
    prefactor = 1.0 + 1.0 / (1.0 - r);
  }
  return prefactor * body;
}

TruncationBounds truncation_error_bounds(const TruncationPlan& plan, double c_f,
                                         double alpha, double beta) {
  if (!(alpha >= plan.alpha0)) {
    fail(ErrorCode::config, "decay alpha must be at least alpha0");
  }
  if (!(alpha > plan.t)) {
    fail(ErrorCode::config,
         "decay alpha must exceed t = (alpha0+theta)/2, the series diverges");
  }
  if (beta < 0.0) fail(ErrorCode::config, "beta must be nonnegative");
  TruncationBounds out;

  double series_h = 0.0;
  for (long l = 1;; ++l) {
    const double term =
        std::pow(2.0, l * (2.0 * plan.t - 2.0 * alpha)) * std::pow(double(l), 2.0 * beta);
    series_h += term;
    if (term < 1e-16) break;
    if (l > 100000) break;
  }
  out.c_h = std::pow(2.0, plan.t + beta) * std::sqrt(1.0 + series_h);

  double series_inf = 0.0;
  for (long l = 1;; ++l) {
    const double term =
        std::pow(2.0, l * (plan.theta - alpha)) * std::pow(double(l), beta);
    series_inf += term;
    if (term < 1e-16) break;
    if (l > 100000) break;
  }
  out.c_inf = plan.c_eta * std::pow(2.0, plan.theta) * (1.0 + series_inf);

  const double ratio = 2.0 * plan.alpha0 / (plan.alpha0 - plan.theta);
  out.c_total =
      (1.0 + 32.0 * out.c_h + 16.0 * out.c_inf) * std::pow(ratio, beta + 0.5);

  out.h_norm_bound = c_f * out.c_h * std::pow(double(plan.m), plan.t - alpha) *
                     log2_pow(double(plan.m), beta);
  out.sup_bound = c_f * out.c_inf *
                  std::pow(double(plan.n_trunc), plan.theta - alpha) *
                  log2_pow(double(plan.n_trunc), beta);
  return out;
}

RecoveryReport end_to_end_recover(const UnivariateBasis& basis,
                                  const IndexOrdering& ordering,
                                  const TruncationPlan& plan,
                                  const CoefficientTarget& target,
                                  double noise_sup, std::uint64_t seed,
                                  int threads) {
  const long support = static_cast<long>(target.coeffs.size());
  if (support > plan.n_trunc) {
    fail(ErrorCode::config,
         "target coefficients extend beyond the truncated family");
  }
  const TensorBasisSystem system =
      build_constructive_system(basis, ordering, plan, /*adjoin_constant=*/true);

  SelectionConfig cfg;
  cfg.n = 2 * plan.m;
  cfg.epsilon_mode = EpsilonMode::relaxed;
  cfg.oracle = OracleKind::christoffel;
  cfg.rng_seed = seed;
  cfg.retest_previous = false;
  cfg.threads = threads;

  RecoveryReport report;
  report.run = select(cfg, system);
  if (!report.run.certified) {
    fail(ErrorCode::certification,
         "selection did not certify its frame bounds; recovery aborted");
  }

  const std::size_t count = report.run.points.size();
  Vector exact_obs(static_cast<Eigen::Index>(count));
  Vector ordered;
  for (std::size_t i = 0; i < count; ++i) {
    system.eval_ordered(report.run.points[i], support, ordered);
    Complex y = 0.0;
    for (long k = 0; k < support; ++k) {
      y += target.coeffs[static_cast<std::size_t>(k)] * ordered[k];
    }
    exact_obs[static_cast<Eigen::Index>(i)] = y;
  }

  RecoveryProblem problem;
  problem.system = &system;
  problem.points = report.run.points;
  problem.weights = report.run.weights;
  problem.observations = exact_obs;

  const int m = plan.m;
  const Vector fitted = weighted_least_squares(problem);

  // Parseval, against the finitely supported truth: no quadrature layer.
  const auto parseval_error = [&](const Vector& coeffs) {
    double err2 = 0.0;
    for (long k = 0; k < std::max<long>(support, m); ++k) {
      const Complex truth =
          k < support ? target.coeffs[static_cast<std::size_t>(k)] : 0.0;
      const Complex est = k < m ? coeffs[k] : 0.0;
      err2 += std::norm(truth - est);
    }
    return std::sqrt(err2);
  };
  report.measured_error = parseval_error(fitted);

  double c_f = target.c_f;
  if (!(c_f > 0.0)) {
    // Smallest constant with ||f - f_l||_2 <= C_f l^-alpha log2^beta(l);
    // beta > 0 starts at l = 2 since log2(1) = 0.
    double tail2 = 0.0;
    std::vector<double> tails(static_cast<std::size_t>(support) + 1, 0.0);
    for (long l = support - 1; l >= 0; --l) {
      tail2 += std::norm(target.coeffs[static_cast<std::size_t>(l)]);
      tails[static_cast<std::size_t>(l)] = tail2;
    }
    const long start = target.beta > 0.0 ? 2 : 1;
    for (long l = start; l <= support; ++l) {
      const double denom = std::pow(double(l), -target.alpha) *
                           log2_pow(double(l), target.beta);
      if (denom > 0.0) {
        c_f = std::max(c_f, std::sqrt(tails[static_cast<std::size_t>(l)]) / denom);
      }
    }
    if (!(c_f > 0.0)) c_f = 1.0;
  }
  report.c_f_used = c_f;

  const TruncationBounds tb =
      truncation_error_bounds(plan, c_f, target.alpha, target.beta);
  report.certificate_thm = tb.c_total * c_f *
                           std::pow(double(m), -target.alpha) *
                           log2_pow(double(m), target.beta);

  double h_norm2 = 0.0;
  for (long k = m; k < support; ++k) {
    h_norm2 += std::pow(double(k + 1), 2.0 * plan.t) *
               std::norm(target.coeffs[static_cast<std::size_t>(k)]);
  }
  report.h_norm = std::sqrt(h_norm2);

  SpectralProfile profile{system.constructive_sigmas()};
  const RecoveryCertificate exact_cert = recovery_certificate(
      profile, m, cfg.n, RecoveryMode::exact, report.h_norm);
  report.certificate_cor_exact = exact_cert.bound;
  // absolute floor: a target inside V_m has a zero corollary bound while the
  // solve still carries ~1e-15 of roundoff
  report.pass_thm = report.measured_error <= report.certificate_thm + 1e-12;
  report.pass_cor =
      report.measured_error <= report.certificate_cor_exact + 1e-12;

  report.noise_sup = noise_sup;
  if (noise_sup > 0.0) {
    Rng noise_rng(seed ^ 0x6e6f697365ull);
    Vector noisy = exact_obs;
    for (Eigen::Index i = 0; i < noisy.size(); ++i) {
      noisy[i] += std::polar(noise_sup, kTwoPi * noise_rng.uniform());
    }
    problem.observations = noisy;
    problem.noise_sup = noise_sup;
    const Vector fitted_noisy = weighted_least_squares(problem);
    report.measured_error_noisy = parseval_error(fitted_noisy);
    const RecoveryCertificate noisy_cert = recovery_certificate(
        profile, m, cfg.n, RecoveryMode::noisy, report.h_norm, noise_sup);
    report.certificate_cor_noisy = noisy_cert.bound;
    report.pass_noisy = report.measured_error_noisy <= report.certificate_cor_noisy;
  }
  return report;
}

}  // namespace subsample
