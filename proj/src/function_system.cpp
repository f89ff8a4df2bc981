#include "subsample/function_system.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace subsample {

namespace {

constexpr long kChristoffelRejectionCap = 1000000;

double legendre_shifted(long k, double x) {
  // Shifted Legendre P_k(2x - 1) by the three-term recurrence.
  const double u = 2.0 * x - 1.0;
  if (k == 0) return 1.0;
  double pm1 = 1.0, p = u;
  for (long j = 1; j < k; ++j) {
    const double pn = ((2 * j + 1) * u * p - j * pm1) / double(j + 1);
    pm1 = p;
    p = pn;
  }
  return p;
}

double measured_legendre_c_eta() {
  // The uniform bound sum_{k < l} |eta_k|^2 <= C^2 l^2 peaks at x = 1; the
  // measured grid maximum (endpoints included) times 1.05 is recorded.
  double worst = 0.0;
  for (long level : {1L, 2L, 4L, 8L, 16L, 32L}) {
    double sup = 0.0;
    const int grid = 2048;
    for (int g = 0; g <= grid; ++g) {
      const double x = double(g) / grid;
      double sum = 0.0;
      for (long k = 0; k < level; ++k) {
        const double v = std::sqrt(2.0 * k + 1.0) * legendre_shifted(k, x);
        sum += v * v;
      }
      sup = std::max(sup, sum);
    }
    worst = std::max(worst, std::sqrt(sup) / double(level));
  }
  return 1.05 * worst;
}

}  // namespace

Complex UnivariateBasis::eval(long k, double x) const {
  switch (family) {
    case BasisFamily::fourier:
      return std::polar(1.0, kTwoPi * double(k) * x);
    case BasisFamily::legendre:
      return std::sqrt(2.0 * k + 1.0) * legendre_shifted(k, x);
    case BasisFamily::chebyshev: {
      if (k == 0) return 1.0;
      const double u = std::clamp(2.0 * x - 1.0, -1.0, 1.0);
      return std::sqrt(2.0) * std::cos(double(k) * std::acos(u));
    }
  }
  fail(ErrorCode::internal, "unknown basis family");
}

double UnivariateBasis::sup_abs(long k) const {
  switch (family) {
    case BasisFamily::fourier:
      return 1.0;
    case BasisFamily::legendre:
      return std::sqrt(2.0 * k + 1.0);
    case BasisFamily::chebyshev:
      return k == 0 ? 1.0 : std::sqrt(2.0);
  }
  return 1.0;
}

UnivariateBasis make_basis(BasisFamily family) {
  UnivariateBasis b;
  b.family = family;
  switch (family) {
    case BasisFamily::fourier:
      b.theta = 0.5;
      b.c_eta = 1.0;
      break;
    case BasisFamily::chebyshev:
      b.theta = 0.5;
      b.c_eta = std::sqrt(2.0);
      break;
    case BasisFamily::legendre: {
      b.theta = 1.0;
      static const double measured = measured_legendre_c_eta();
      b.c_eta = measured;
      break;
    }
  }
  return b;
}

double IndexOrdering::sigma(const MultiIndex& idx) const {
  const double aj = std::abs(double(idx.j));
  const double ak = std::abs(double(idx.k));
  switch (kind) {
    case OrderingKind::univariate:
      return std::max(1.0, kTwoPi * aj);
    case OrderingKind::isotropic:
      return std::max(1.0, kTwoPi * (aj * aj + ak * ak));
    case OrderingKind::mixed:
      return std::max(1.0, kTwoPi * aj) * std::max(1.0, kTwoPi * ak);
  }
  fail(ErrorCode::internal, "unknown ordering kind");
}

std::vector<MultiIndex> IndexOrdering::first(long count) const {
  if (count < 0) fail(ErrorCode::config, "ordering prefix length must be >= 0");
  if ((kind == OrderingKind::univariate) != (dimension == 1)) {
    fail(ErrorCode::config,
         "univariate ordering requires dimension 1; isotropic/mixed require 2");
  }
  std::vector<std::pair<double, MultiIndex>> pool;
  double bound = 16.0;
  const long lo_j = signed_frequencies ? -1 : 0;
  while (true) {
    pool.clear();
    const auto push = [&](long j, long k) {
      MultiIndex idx{j, k};
      const double s = sigma(idx);
      if (s <= bound) pool.emplace_back(s, idx);
    };
    if (dimension == 1) {
      const long jmax = static_cast<long>(bound / kTwoPi) + 1;
      for (long j = lo_j * jmax; j <= jmax; ++j) push(j, 0);
    } else {
      long jmax = 0;
      if (kind == OrderingKind::isotropic) {
        jmax = static_cast<long>(std::sqrt(bound / kTwoPi)) + 1;
      } else {
        jmax = static_cast<long>(bound / kTwoPi) + 1;
      }
      for (long j = lo_j * jmax; j <= jmax; ++j) {
        for (long k = lo_j * jmax; k <= jmax; ++k) push(j, k);
      }
    }
    if (static_cast<long>(pool.size()) >= count) break;
    bound *= 2.0;
    if (bound > 1e18) fail(ErrorCode::internal, "ordering enumeration overflow");
  }
  std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    if (a.second.j != b.second.j) return a.second.j < b.second.j;
    return a.second.k < b.second.k;
  });
  std::vector<MultiIndex> out;
  out.reserve(count);
  for (long i = 0; i < count; ++i) out.push_back(pool[i].second);
  return out;
}

TruncationPlan TruncationPlan::make(double theta, double alpha0, int m,
                                    double c_eta) {
  if (!(theta >= 0.5)) fail(ErrorCode::config, "theta must be >= 1/2");
  if (!(alpha0 > theta)) {
    fail(ErrorCode::config, "alpha0 must exceed theta (N undefined otherwise)");
  }
  if (m < 1) fail(ErrorCode::config, "truncation plan needs m >= 1");
  TruncationPlan plan;
  plan.theta = theta;
  plan.alpha0 = alpha0;
  plan.t = 0.5 * (alpha0 + theta);
  plan.m = m;
  plan.c_eta = c_eta;
  const double raw = std::pow(double(m), alpha0 / (alpha0 - theta));
  plan.n_trunc = static_cast<long>(std::ceil(raw - 1e-9 * raw));
  if (plan.n_trunc < m) plan.n_trunc = m;
  return plan;
}

void TensorBasisSystem::finalize() {
  domain_dim_ = ordering_.dimension;
  lower_dim_ = static_cast<int>(lower_idx_.size());
  j_diag_ = upper_scale_.array().square();
  gram_lower_ = Matrix::Identity(lower_dim_, lower_dim_);
  whitening_ = Matrix::Identity(lower_dim_, lower_dim_);
  lambda_min_gram_ = 1.0;
  whitened_ = true;

  max_abs_freq_[0] = max_abs_freq_[1] = 0;
  const auto absorb = [&](const MultiIndex& idx) {
    max_abs_freq_[0] = std::max(max_abs_freq_[0], std::abs(idx.j));
    max_abs_freq_[1] = std::max(max_abs_freq_[1], std::abs(idx.k));
  };
  for (const auto& idx : lower_idx_) absorb(idx);
  for (const auto& idx : upper_idx_) absorb(idx);

  if (basis_.family == BasisFamily::fourier) {
    envelope_ = double(lower_dim_);
  } else if (domain_dim_ == 1) {
    envelope_ = basis_.c_eta * basis_.c_eta *
                std::pow(double(lower_dim_), 2.0 * basis_.theta);
  } else {
    double sum = 0.0;
    for (const auto& idx : lower_idx_) {
      const double s1 = basis_.sup_abs(idx.j);
      const double s2 = basis_.sup_abs(idx.k);
      sum += s1 * s1 * s2 * s2;
    }
    envelope_ = sum;
  }
}

void TensorBasisSystem::eval_indices(const Point& x,
                                     const std::vector<MultiIndex>& idx,
                                     Vector& out) const {
  out.resize(static_cast<Eigen::Index>(idx.size()));
  thread_local std::vector<Complex> buf0, buf1;
  const bool sgn = basis_.signed_frequencies();
  const auto fill = [&](std::vector<Complex>& buf, long maxf, double coord) {
    const long lo = sgn ? -maxf : 0;
    buf.resize(static_cast<std::size_t>(maxf - lo + 1));
    if (basis_.family == BasisFamily::fourier) {
      for (long k = lo; k <= maxf; ++k) {
        buf[static_cast<std::size_t>(k - lo)] = basis_.eval(k, coord);
      }
    } else {
      // polynomial families share the recurrence prefix
      const double u = 2.0 * coord - 1.0;
      if (basis_.family == BasisFamily::legendre) {
        double pm1 = 1.0, p = u;
        for (long k = 0; k <= maxf; ++k) {
          double val;
          if (k == 0) {
            val = 1.0;
          } else if (k == 1) {
            val = u;
          } else {
            val = ((2 * (k - 1) + 1) * u * p - (k - 1) * pm1) / double(k);
            pm1 = p;
            p = val;
          }
          buf[static_cast<std::size_t>(k)] = std::sqrt(2.0 * k + 1.0) * val;
        }
      } else {
        const double th = std::acos(std::clamp(u, -1.0, 1.0));
        for (long k = 0; k <= maxf; ++k) {
          buf[static_cast<std::size_t>(k)] =
              k == 0 ? 1.0 : std::sqrt(2.0) * std::cos(double(k) * th);
        }
      }
    }
  };
  fill(buf0, max_abs_freq_[0], x[0]);
  const long off0 = sgn ? max_abs_freq_[0] : 0;
  if (domain_dim_ == 1) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out[static_cast<Eigen::Index>(i)] =
          buf0[static_cast<std::size_t>(idx[i].j + off0)];
    }
    return;
  }
  fill(buf1, max_abs_freq_[1], x[1]);
  const long off1 = sgn ? max_abs_freq_[1] : 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] =
        buf0[static_cast<std::size_t>(idx[i].j + off0)] *
        buf1[static_cast<std::size_t>(idx[i].k + off1)];
  }
}

void TensorBasisSystem::eval_lower(const Point& x, Vector& out) const {
  eval_indices(x, lower_idx_, out);
}

void TensorBasisSystem::eval_lower_raw(const Point& x, Vector& out) const {
  eval_indices(x, lower_idx_, out);
}

void TensorBasisSystem::eval_upper(const Point& x, Vector& out) const {
  eval_indices(x, upper_idx_, out);
  out.array() *= upper_scale_.cast<Complex>().array();
}

Point TensorBasisSystem::sample_mu(Rng& rng) const {
  Point x{0.0, 0.0};
  for (int c = 0; c < domain_dim_; ++c) {
    const double u = rng.uniform();
    if (basis_.arcsine_measure()) {
      const double s = std::sin(0.5 * kPi * u);
      x[static_cast<std::size_t>(c)] = s * s;
    } else {
      x[static_cast<std::size_t>(c)] = u;
    }
  }
  return x;
}

Point TensorBasisSystem::christoffel_sample(Rng& rng, long& rejections) const {
  thread_local Vector a;
  for (long trial = 0; trial < kChristoffelRejectionCap; ++trial) {
    const Point x = sample_mu(rng);
    eval_lower(x, a);
    const double ratio = a.squaredNorm();
    if (rng.uniform() * envelope_ <= ratio) return x;
    ++rejections;
  }
  fail(ErrorCode::selection,
       "Christoffel rejection sampling exceeded its cap; envelope is broken");
}

void TensorBasisSystem::eval_ordered(const Point& x, long count,
                                     Vector& out) const {
  const long total = lower_dim_ + static_cast<long>(upper_idx_.size()) -
                     (constant_adjoined_ ? 1 : 0);
  if (count > total) {
    fail(ErrorCode::config, "ordered evaluation beyond the truncated family");
  }
  thread_local std::vector<MultiIndex> prefix;
  prefix.clear();
  for (long i = 0; i < count; ++i) {
    if (i < lower_dim_) {
      prefix.push_back(lower_idx_[static_cast<std::size_t>(i)]);
    } else {
      prefix.push_back(upper_idx_[static_cast<std::size_t>(i - lower_dim_)]);
    }
  }
  eval_indices(x, prefix, out);
}

RealVector TensorBasisSystem::constructive_sigmas() const {
  if (!plan_) {
    fail(ErrorCode::config, "spectral profile requires a constructive system");
  }
  RealVector s(plan_->n_trunc);
  for (long k = 0; k < plan_->n_trunc; ++k) {
    s[k] = std::pow(double(k + 1), -plan_->t);
  }
  return s;
}

TensorBasisSystem build_constructive_system(const UnivariateBasis& basis,
                                            const IndexOrdering& ordering,
                                            const TruncationPlan& plan,
                                            bool adjoin_constant) {
  TensorBasisSystem sys;
  sys.basis_ = basis;
  sys.ordering_ = ordering;
  sys.ordering_.signed_frequencies = basis.signed_frequencies();
  const long n_total = plan.n_trunc;
  auto ordered = sys.ordering_.first(n_total);
  if (ordered.empty() || !(ordered[0] == MultiIndex{0, 0})) {
    fail(ErrorCode::config,
         "constructive construction requires the constant function first");
  }
  sys.lower_idx_.assign(ordered.begin(), ordered.begin() + plan.m);
  const long n_up = n_total - plan.m;
  sys.upper_idx_.assign(ordered.begin() + plan.m, ordered.end());
  sys.upper_scale_.resize(n_up + (adjoin_constant ? 1 : 0));
  for (long i = 0; i < n_up; ++i) {
    sys.upper_scale_[i] = std::pow(double(plan.m + 1 + i), -plan.t);
  }
  if (adjoin_constant) {
    // Prop-style weight-sum control: the constant at scale sqrt(lambda_m)
    // ties the largest J entry.
    sys.upper_idx_.push_back(MultiIndex{0, 0});
    sys.upper_scale_[n_up] = std::pow(double(plan.m + 1), -plan.t);
    sys.constant_adjoined_ = true;
  }
  sys.plan_ = plan;
  sys.finalize();
  return sys;
}

TensorBasisSystem build_frame_system(const UnivariateBasis& basis,
                                     const IndexOrdering& ordering, int m_count,
                                     long upper_count, bool adjoin_constant) {
  if (m_count < 1) fail(ErrorCode::config, "frame system needs m >= 1");
  if (upper_count < 0) fail(ErrorCode::config, "upper count must be >= 0");
  TensorBasisSystem sys;
  sys.basis_ = basis;
  sys.ordering_ = ordering;
  sys.ordering_.signed_frequencies = basis.signed_frequencies();
  auto ordered = sys.ordering_.first(m_count + upper_count);
  sys.lower_idx_.assign(ordered.begin(), ordered.begin() + m_count);
  sys.upper_idx_.assign(ordered.begin() + m_count, ordered.end());
  sys.upper_scale_.resize(upper_count + (adjoin_constant ? 1 : 0));
  for (long i = 0; i < upper_count; ++i) {
    sys.upper_scale_[i] =
        1.0 / sys.ordering_.sigma(sys.upper_idx_[static_cast<std::size_t>(i)]);
  }
  if (adjoin_constant) {
    sys.upper_idx_.push_back(MultiIndex{0, 0});
    sys.upper_scale_[upper_count] = 1.0;
    sys.constant_adjoined_ = true;
  }
  sys.finalize();
  return sys;
}

Matrix orthonormalize_rows(const Matrix& table, const RealVector& mu) {
  const Eigen::Index rows = table.rows(), cols = table.cols();
  if (mu.size() != cols) fail(ErrorCode::config, "measure length mismatch");
  Matrix q = table;
  const auto inner = [&](const Eigen::Index a, const Eigen::Index b) {
    Complex s = 0.0;
    for (Eigen::Index x = 0; x < cols; ++x) {
      s += mu[x] * q(a, x) * std::conj(q(b, x));
    }
    return s;
  };
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (Eigen::Index j = 0; j < i; ++j) {
        const Complex c = inner(i, j);
        q.row(i) -= c * q.row(j);
      }
    }
    const double norm = std::sqrt(std::real(inner(i, i)));
    if (!(norm > 1e-12)) {
      fail(ErrorCode::config, "family row collapsed during orthonormalization");
    }
    q.row(i) /= norm;
  }
  return q;
}

Matrix inverse_sqrt(const Matrix& gram) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  if (es.info() != Eigen::Success) {
    fail(ErrorCode::internal, "eigendecomposition of the Gram failed");
  }
  const double lam_min = es.eigenvalues().minCoeff();
  if (!(lam_min > 0.0)) {
    fail(ErrorCode::config, "Gram is not positive definite; smallest eigenvalue = " +
                                std::to_string(lam_min));
  }
  const RealVector inv_sqrt = es.eigenvalues().array().rsqrt();
  return es.eigenvectors() * inv_sqrt.cast<Complex>().asDiagonal() *
         es.eigenvectors().adjoint();
}

DiscreteSystem::DiscreteSystem(std::vector<Point> points, RealVector mu,
                               Matrix a_table, Matrix b_table, bool whiten_now,
                               bool adjoin_constant) {
  const Eigen::Index d = static_cast<Eigen::Index>(points.size());
  if (mu.size() != d || a_table.cols() != d ||
      (b_table.rows() > 0 && b_table.cols() != d)) {
    fail(ErrorCode::config, "discrete system size mismatch");
  }
  if ((mu.array() <= 0.0).any()) {
    fail(ErrorCode::config, "discrete measure weights must be strictly positive");
  }
  points_ = std::move(points);
  mu_ = std::move(mu);
  a_raw_ = std::move(a_table);
  b_tab_ = std::move(b_table);
  domain_dim_ = 2;
  lower_dim_ = static_cast<int>(a_raw_.rows());

  if (adjoin_constant) {
    double lam = 0.0;
    for (Eigen::Index r = 0; r < b_tab_.rows(); ++r) {
      double nrm = 0.0;
      for (Eigen::Index x = 0; x < d; ++x) nrm += mu_[x] * std::norm(b_tab_(r, x));
      lam = std::max(lam, nrm);
    }
    if (lam == 0.0) lam = 1.0;
    b_tab_.conservativeResize(b_tab_.rows() + 1, d);
    b_tab_.row(b_tab_.rows() - 1).setConstant(std::sqrt(lam));
    constant_adjoined_ = true;
  }

  // J must be diagonal in the chosen b basis.
  const Eigen::Index nb = b_tab_.rows();
  Matrix gram_b = Matrix::Zero(nb, nb);
  for (Eigen::Index x = 0; x < d; ++x) {
    gram_b += mu_[x] * b_tab_.col(x) * b_tab_.col(x).adjoint();
  }
  j_diag_.resize(nb);
  double scale = 1e-300;
  for (Eigen::Index r = 0; r < nb; ++r) {
    j_diag_[r] = real_checked(gram_b(r, r));
    scale = std::max(scale, j_diag_[r]);
  }
  for (Eigen::Index r = 0; r < nb; ++r) {
    if (!(j_diag_[r] > 0.0)) {
      fail(ErrorCode::config, "upper family contains a null function");
    }
    for (Eigen::Index c = 0; c < nb; ++c) {
      if (r != c && std::abs(gram_b(r, c)) > 1e-10 * scale) {
        if (constant_adjoined_ && (r == nb - 1 || c == nb - 1)) {
          fail(ErrorCode::config,
               "adjoining the constant requires a mean-zero upper family");
        }
        fail(ErrorCode::config,
             "upper family Gram is not diagonal; orthogonalize it first");
      }
    }
  }

  gram_lower_ = Matrix::Zero(lower_dim_, lower_dim_);
  for (Eigen::Index x = 0; x < d; ++x) {
    gram_lower_ += mu_[x] * a_raw_.col(x) * a_raw_.col(x).adjoint();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram_lower_);
  lambda_min_gram_ = es.eigenvalues().minCoeff();
  a_white_ = a_raw_;
  whitening_ = Matrix::Identity(lower_dim_, lower_dim_);
  if (whiten_now) {
    whiten();
  } else {
    rebuild_sampling_tables();
  }
}

void DiscreteSystem::whiten() {
  const Eigen::Index d = static_cast<Eigen::Index>(points_.size());
  Matrix gram = Matrix::Zero(lower_dim_, lower_dim_);
  for (Eigen::Index x = 0; x < d; ++x) {
    gram += mu_[x] * a_white_.col(x) * a_white_.col(x).adjoint();
  }
  const Matrix t = inverse_sqrt(gram);
  a_white_ = t * a_white_;
  whitening_ = t * whitening_;
  whitened_ = true;
  rebuild_sampling_tables();
}

void DiscreteSystem::rebuild_sampling_tables() {
  const std::size_t d = points_.size();
  mu_cdf_.resize(d);
  christoffel_cdf_.resize(d);
  double acc_mu = 0.0, acc_ch = 0.0;
  for (std::size_t x = 0; x < d; ++x) {
    acc_mu += mu_[static_cast<Eigen::Index>(x)];
    acc_ch += mu_[static_cast<Eigen::Index>(x)] *
              a_white_.col(static_cast<Eigen::Index>(x)).squaredNorm();
    mu_cdf_[x] = acc_mu;
    christoffel_cdf_[x] = acc_ch;
  }
  for (std::size_t x = 0; x < d; ++x) {
    mu_cdf_[x] /= acc_mu;
    christoffel_cdf_[x] /= acc_ch;
  }
  mu_cdf_.back() = christoffel_cdf_.back() = 1.0;
}

int DiscreteSystem::point_index(const Point& x) const {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i] == x) return static_cast<int>(i);
  }
  fail(ErrorCode::config, "point is not a member of the discrete domain");
}

void DiscreteSystem::eval_lower(const Point& x, Vector& out) const {
  out = a_white_.col(point_index(x));
}

void DiscreteSystem::eval_lower_raw(const Point& x, Vector& out) const {
  out = a_raw_.col(point_index(x));
}

void DiscreteSystem::eval_upper(const Point& x, Vector& out) const {
  out = b_tab_.col(point_index(x));
}

Point DiscreteSystem::sample_mu(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::lower_bound(mu_cdf_.begin(), mu_cdf_.end(), u);
  return points_[static_cast<std::size_t>(it - mu_cdf_.begin())];
}

Point DiscreteSystem::christoffel_sample(Rng& rng, long& rejections) const {
  (void)rejections;  // exact categorical sampling, nothing rejected
  const double u = rng.uniform();
  const auto it =
      std::lower_bound(christoffel_cdf_.begin(), christoffel_cdf_.end(), u);
  return points_[static_cast<std::size_t>(it - christoffel_cdf_.begin())];
}

}  // namespace subsample
