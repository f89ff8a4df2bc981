#include "subsample/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace subsample {
namespace oracles {

namespace {

double off_diagonal_norm(const HermMatrix& a) {
  const std::size_t n = a.size();
  double sum = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      sum += std::norm(a[p][q]);
    }
  }
  return std::sqrt(2.0 * sum);
}

double diagonal_scale(const HermMatrix& a) {
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max(scale, std::abs(a[i][i]));
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      scale = std::max(scale, std::abs(a[i][j]));
    }
  }
  return scale > 0.0 ? scale : 1.0;
}

void check_input(const HermMatrix& a) {
  const std::size_t n = a.size();
  if (n == 0 || n > 64) {
    fail(ErrorCode::config, "brute-force eigensolver handles 1 <= dim <= 64");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) fail(ErrorCode::config, "matrix is not square");
    for (std::size_t j = 0; j < n; ++j) {
      const Complex diff = a[i][j] - std::conj(a[j][i]);
      if (std::abs(diff) > 1e-10 * diagonal_scale(a)) {
        fail(ErrorCode::config, "matrix is not Hermitian");
      }
    }
  }
}

}  // namespace

HermMatrix to_herm(const Matrix& m) {
  HermMatrix out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    }
  }
  return out;
}

std::vector<double> eig_all_bruteforce(const HermMatrix& input) {
  check_input(input);
  HermMatrix a = input;
  const std::size_t n = a.size();
  const double scale = diagonal_scale(a);

  for (int sweep = 0; sweep < 100; ++sweep) {
    if (off_diagonal_norm(a) < 1e-13 * scale) break;
    if (sweep == 99) {
      fail(ErrorCode::internal, "Jacobi sweeps did not converge in 100 passes");
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a[p][q];
        const double mag = std::abs(apq);
        if (mag < 1e-300) continue;
        // Phase rotation makes the pivot real, then a plain Jacobi rotation
        // annihilates it: U = [[c, s e^{i phi}], [-s e^{-i phi}, c]].
        const Complex phase = apq / mag;
        const double app = a[p][p].real();
        const double aqq = a[q][q].real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex u_pq = s * phase;

        // rows/columns p and q of A <- U* A U
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a[k][p];
          const Complex akq = a[k][q];
          a[k][p] = c * akp - std::conj(u_pq) * akq;
          a[k][q] = u_pq * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a[p][k];
          const Complex aqk = a[q][k];
          a[p][k] = c * apk - u_pq * aqk;
          a[q][k] = std::conj(u_pq) * apk + c * aqk;
        }
        a[p][q] = std::conj(a[q][p]);
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a[i][i].real();
  std::sort(eig.begin(), eig.end());
  return eig;
}

std::pair<double, double> eig_extremes_bruteforce(const HermMatrix& a) {
  const auto eig = eig_all_bruteforce(a);
  return {eig.front(), eig.back()};
}

namespace {

// Number of eigenvalues of A strictly below x, via the inertia of the LDL*
// factorization of A - x I (computed without pivoting; x is nudged when a
// pivot collapses).
long count_below(const HermMatrix& a, double x) {
  const std::size_t n = a.size();
  for (int attempt = 0; attempt < 8; ++attempt) {
    HermMatrix work = a;
    for (std::size_t i = 0; i < n; ++i) work[i][i] -= x;
    bool ok = true;
    long negatives = 0;
    for (std::size_t k = 0; k < n && ok; ++k) {
      const double d = work[k][k].real();
      if (std::abs(d) < 1e-14 * diagonal_scale(a)) {
        ok = false;
        break;
      }
      if (d < 0.0) ++negatives;
      for (std::size_t i = k + 1; i < n; ++i) {
        const Complex factor = work[i][k] / d;
        for (std::size_t j = k; j < n; ++j) {
          work[i][j] -= factor * work[k][j];
        }
      }
    }
    if (ok) return negatives;
    x += (attempt + 1) * 1e-12 * diagonal_scale(a);
  }
  fail(ErrorCode::internal, "LDL* inertia kept hitting zero pivots");
}

}  // namespace

std::vector<double> eig_all_bisection(const HermMatrix& a) {
  check_input(a);
  const std::size_t n = a.size();
  // Gershgorin interval encloses the whole spectrum.
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) radius += std::abs(a[i][j]);
    }
    lo = std::min(lo, a[i][i].real() - radius);
    hi = std::max(hi, a[i][i].real() + radius);
  }
  lo -= 1.0;
  hi += 1.0;
  std::vector<double> eig(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    double left = lo, right = hi;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (left + right);
      if (count_below(a, mid) <= static_cast<long>(idx)) {
        left = mid;
      } else {
        right = mid;
      }
      if (right - left < 1e-12 * std::max(1.0, std::abs(mid))) break;
    }
    eig[idx] = 0.5 * (left + right);
  }
  return eig;
}

OracleReport discretization_check(const SelectionRun& run,
                                  const FunctionSystem& system, long trials,
                                  std::uint64_t seed) {
  OracleReport report;
  report.name = "discretization_check";
  const int m = system.lower_dim();
  const int nb = system.upper_dim();
  Rng rng(seed);
  const double lo_const =
      std::sqrt(std::max(run.lower_bound_certified_whitened, 0.0));
  const double hi_const = std::sqrt(std::max(run.upper_bound_certified, 0.0));

  std::vector<std::vector<Complex>> a_evals(run.points.size());
  std::vector<std::vector<Complex>> b_evals(run.points.size());
  Vector buf;
  for (std::size_t i = 0; i < run.points.size(); ++i) {
    system.eval_lower(run.points[i], buf);
    a_evals[i].assign(buf.data(), buf.data() + buf.size());
    if (nb > 0) {
      system.eval_upper(run.points[i], buf);
      b_evals[i].assign(buf.data(), buf.data() + buf.size());
    }
  }

  report.pass = true;
  const auto record = [&](double gap, double norm) {
    const double tolerance = 1e-9 * std::max(1.0, norm);
    if (gap < -tolerance) report.pass = false;
    report.max_abs_dev = std::max(report.max_abs_dev, -gap);
    ++report.cases;
  };

  for (long trial = 0; trial < trials; ++trial) {
    // Lower family: f = sum_k c_k a_k with ||f||_2 = |c| (whitened Parseval);
    // the certified lower constant bounds the weighted sum from below.
    std::vector<Complex> coeff(static_cast<std::size_t>(m));
    double norm2 = 0.0;
    for (int k = 0; k < m; ++k) {
      coeff[static_cast<std::size_t>(k)] = Complex(rng.normal(), rng.normal());
      norm2 += std::norm(coeff[static_cast<std::size_t>(k)]);
    }
    const double f_norm = std::sqrt(norm2);
    double discrete2 = 0.0;
    for (std::size_t i = 0; i < run.points.size(); ++i) {
      Complex v = 0.0;
      for (int k = 0; k < m; ++k) {
        v += coeff[static_cast<std::size_t>(k)] *
             a_evals[i][static_cast<std::size_t>(k)];
      }
      discrete2 += run.weights[i] * std::norm(v);
    }
    record(std::sqrt(discrete2) - lo_const * f_norm, f_norm);

    // Upper family: g = sum_k c_k b_k; the certified upper constant bounds
    // the weighted sum by sqrt(upper) |c|.
    if (nb > 0) {
      std::vector<Complex> cb(static_cast<std::size_t>(nb));
      double cb_norm2 = 0.0;
      for (int k = 0; k < nb; ++k) {
        cb[static_cast<std::size_t>(k)] = Complex(rng.normal(), rng.normal());
        cb_norm2 += std::norm(cb[static_cast<std::size_t>(k)]);
      }
      const double cb_norm = std::sqrt(cb_norm2);
      double disc_up2 = 0.0;
      for (std::size_t i = 0; i < run.points.size(); ++i) {
        Complex v = 0.0;
        for (int k = 0; k < nb; ++k) {
          v += cb[static_cast<std::size_t>(k)] *
               b_evals[i][static_cast<std::size_t>(k)];
        }
        disc_up2 += run.weights[i] * std::norm(v);
      }
      record(hi_const * cb_norm - std::sqrt(disc_up2), cb_norm);
    }
  }
  report.max_rel_dev = report.max_abs_dev;
  return report;
}

AcceptanceProbe acceptance_rate_probe(const SelectionConfig& cfg,
                                      const FunctionSystem& system) {
  if (cfg.oracle != OracleKind::christoffel ||
      cfg.epsilon_mode == EpsilonMode::exact) {
    fail(ErrorCode::config,
         "the acceptance floor holds for Christoffel proposals with a "
         "relaxed increment");
  }
  const SelectionRun run = select(cfg, system);
  AcceptanceProbe probe;
  probe.accepted = run.n;
  probe.proposals = run.proposals_total;
  probe.empirical_rate = double(run.n) / double(run.proposals_total);
  probe.floor = run.epsilon / double(run.m);
  const double z = 2.5758293035489004;  // 99% two-sided normal quantile
  const double nn = double(probe.proposals);
  const double p = probe.empirical_rate;
  const double denom = 1.0 + z * z / nn;
  const double center = (p + z * z / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
  probe.wilson_low = std::max(0.0, center - half);
  probe.wilson_high = std::min(1.0, center + half);
  probe.consistent = probe.wilson_high >= probe.floor;
  return probe;
}

namespace {

OracleReport jacobi_fixture_report() {
  OracleReport report;
  report.name = "jacobi_fixtures";
  report.pass = true;
  // identity
  {
    HermMatrix id(3, std::vector<Complex>(3, 0.0));
    for (int i = 0; i < 3; ++i) id[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
    const auto [mn, mx] = eig_extremes_bruteforce(id);
    const double dev = std::max(std::abs(mn - 1.0), std::abs(mx - 1.0));
    report.max_abs_dev = std::max(report.max_abs_dev, dev);
    if (dev > 1e-12) report.pass = false;
    ++report.cases;
  }
  // diag(-2, 5)
  {
    HermMatrix d(2, std::vector<Complex>(2, 0.0));
    d[0][0] = -2.0;
    d[1][1] = 5.0;
    const auto [mn, mx] = eig_extremes_bruteforce(d);
    const double dev = std::max(std::abs(mn + 2.0), std::abs(mx - 5.0));
    report.max_abs_dev = std::max(report.max_abs_dev, dev);
    if (dev > 1e-12) report.pass = false;
    ++report.cases;
  }
  return report;
}

OracleReport jacobi_vs_bisection_report(std::uint64_t seed) {
  OracleReport report;
  report.name = "jacobi_vs_sturm_bisection";
  report.pass = true;
  Rng rng(seed);
  for (int rep = 0; rep < 5; ++rep) {
    const std::size_t n = 8;
    HermMatrix a(n, std::vector<Complex>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      a[i][i] = rng.normal();
      for (std::size_t j = i + 1; j < n; ++j) {
        a[i][j] = 0.5 * Complex(rng.normal(), rng.normal());
        a[j][i] = std::conj(a[i][j]);
      }
    }
    const auto jac = eig_all_bruteforce(a);
    const auto bis = eig_all_bisection(a);
    for (std::size_t i = 0; i < n; ++i) {
      const double dev = std::abs(jac[i] - bis[i]);
      report.max_abs_dev = std::max(report.max_abs_dev, dev);
      if (dev > 1e-8) report.pass = false;
    }
    ++report.cases;
  }
  return report;
}

}  // namespace

std::vector<OracleReport> run_oracle_battery(std::uint64_t seed) {
  std::vector<OracleReport> reports;
  reports.push_back(jacobi_fixture_report());
  reports.push_back(jacobi_vs_bisection_report(seed));

  // Fresh small selection run, then the discretization oracle on it.
  {
    Rng rng(seed ^ 0xd15c);
    const int d = 60, m = 3;
    std::vector<Point> pts(d);
    RealVector mu(d);
    for (int i = 0; i < d; ++i) {
      pts[static_cast<std::size_t>(i)] = Point{(i + 0.5) / d, 0.0};
      mu[i] = 1.0 / d;
    }
    Matrix raw(m, d);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < d; ++c) raw(r, c) = Complex(rng.normal(), rng.normal());
    }
    DiscreteSystem sys(pts, mu, raw, orthonormalize_rows(raw, mu));
    SelectionConfig cfg;
    cfg.n = 9;
    cfg.oracle = OracleKind::finite_scan;
    cfg.rng_seed = seed ^ 0x5e1ec7;
    const SelectionRun run = select(cfg, sys);
    OracleReport disc = discretization_check(run, sys, 200, seed ^ 0x0bb5);
    reports.push_back(disc);

    OracleReport frame;
    frame.name = "frame_bounds_vs_jacobi";
    frame.cases = 1;
    Matrix gram = Matrix::Zero(m, m);
    Vector a;
    for (std::size_t i = 0; i < run.points.size(); ++i) {
      sys.eval_lower(run.points[i], a);
      gram += run.weights[i] * a * a.adjoint();
    }
    const auto [mn, mx] = eig_extremes_bruteforce(to_herm(gram));
    frame.max_abs_dev =
        std::max(std::abs(mn - run.lower_bound_certified_whitened), 0.0);
    frame.pass = mn >= run.target_lower_whitened - tol::certification &&
                 std::abs(mn - run.lower_bound_certified_whitened) < 1e-9;
    (void)mx;
    reports.push_back(frame);
  }

  // Acceptance floor on a small Fourier tensor config.
  {
    const UnivariateBasis basis = make_basis(BasisFamily::fourier);
    IndexOrdering ordering{OrderingKind::isotropic, 2, true};
    const TensorBasisSystem sys =
        build_frame_system(basis, ordering, 9, 40, true);
    SelectionConfig cfg;
    cfg.n = 18;
    cfg.oracle = OracleKind::christoffel;
    cfg.epsilon_mode = EpsilonMode::relaxed;
    cfg.rng_seed = seed ^ 0xacce97;
    const AcceptanceProbe probe = acceptance_rate_probe(cfg, sys);
    OracleReport rate;
    rate.name = "acceptance_rate_floor";
    rate.cases = probe.proposals;
    rate.max_abs_dev = std::max(0.0, probe.floor - probe.wilson_high);
    rate.pass = probe.consistent;
    reports.push_back(rate);
  }
  return reports;
}

nlohmann::ordered_json battery_to_json(
    const std::vector<OracleReport>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  bool all = true;
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["max_abs_dev"] = r.max_abs_dev;
    j["max_rel_dev"] = r.max_rel_dev;
    j["pass"] = r.pass;
    j["cases"] = r.cases;
    arr.push_back(j);
    all = all && r.pass;
  }
  nlohmann::ordered_json out;
  out["schema_version"] = 1;
  out["oracles"] = arr;
  out["pass"] = all;
  return out;
}

}  // namespace oracles
}  // namespace subsample
