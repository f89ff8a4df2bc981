#include "subsample/barrier.hpp"

#include <cmath>
#include <limits>

namespace subsample {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_hermitian(const Matrix& a, const char* who) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i; j < a.cols(); ++j) {
      if (std::abs(a(i, j) - std::conj(a(j, i))) > tol::hermitian) {
        fail(ErrorCode::internal,
             std::string(who) + ": state drifted from Hermitian symmetry");
      }
    }
  }
}

void symmetrize(Matrix& a) {
  a = 0.5 * (a + a.adjoint()).eval();
}

double trace_inverse(const Eigen::LLT<Matrix>& llt, Eigen::Index dim) {
  const Matrix inv = llt.solve(Matrix::Identity(dim, dim));
  Complex tr = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) tr += inv(i, i);
  return real_checked(tr, std::abs(tr));
}

}  // namespace

LowerBarrier LowerBarrier::standard(int m, int n, double epsilon) {
  if (m < 2) fail(ErrorCode::config, "lower barrier standard mode needs m >= 2");
  if (n < m) fail(ErrorCode::config, "lower barrier needs n >= m");
  const double r = std::sqrt(double(m - 1) / double(n));
  if (epsilon < 0.0 || epsilon >= (1.0 - r) * (1.0 - r)) {
    fail(ErrorCode::config,
         "relaxation epsilon must lie in [0, (1-r)^2), got " +
             std::to_string(epsilon));
  }
  LowerBarrier lb;
  lb.edge_ = false;
  lb.m_ = m;
  lb.n_ = n;
  lb.delta_ = (1.0 - r) / n;
  lb.delta_eff_ = (1.0 - r - epsilon) / n;
  lb.state_ = (lb.delta_ * m / r) * Matrix::Identity(m, m);
  lb.refresh();
  return lb;
}

LowerBarrier LowerBarrier::edge(int n) {
  LowerBarrier lb;
  lb.edge_ = true;
  lb.m_ = 1;
  lb.n_ = n;
  lb.potential_ = kNaN;
  return lb;
}

LowerBarrier LowerBarrier::from_state(Matrix a, int n, double delta,
                                      double delta_eff) {
  LowerBarrier lb;
  lb.edge_ = false;
  lb.m_ = static_cast<int>(a.rows());
  lb.n_ = n;
  lb.delta_ = delta;
  lb.delta_eff_ = delta_eff;
  lb.state_ = std::move(a);
  lb.refresh();
  return lb;
}

void LowerBarrier::refresh() {
  check_hermitian(state_, "lower barrier");
  Eigen::LLT<Matrix> llt(state_);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::internal, "lower barrier state is not positive definite");
  }
  potential_ = trace_inverse(llt, m_);
  if (!(potential_ > 0.0)) {
    fail(ErrorCode::internal, "lower potential is not positive");
  }
  // Strict slack delta_eff < 1/Phi(A) is guaranteed by the theory; hitting
  // this guard indicates tolerance accumulation, not a bad candidate.
  const double inv_phi = 1.0 / potential_;
  if (inv_phi - delta_eff_ < tol::near_singular_rel * inv_phi) {
    fail(ErrorCode::selection,
         "lower verifier ill-conditioned: 1/Phi(A) - delta_eff = " +
             std::to_string(inv_phi - delta_eff_));
  }
  shifted_llt_.compute(state_ - delta_eff_ * Matrix::Identity(m_, m_));
  if (shifted_llt_.info() != Eigen::Success) {
    fail(ErrorCode::selection,
         "lower barrier shifted state A - delta_eff I lost definiteness");
  }
  trace_shifted_ = trace_inverse(shifted_llt_, m_);
  denom_ = trace_shifted_ - potential_;
  if (!(denom_ > 0.0)) {
    fail(ErrorCode::internal, "Tr(Z - Y) is not positive");
  }
}

double LowerBarrier::verifier(const Vector& a) const {
  if (edge_) return double(n_) * a.squaredNorm();
  const Vector z = shifted_llt_.solve(a);
  const double zz = z.squaredNorm();                    // a* Z^2 a
  const double az = real_checked(a.dot(z), zz);         // a* Z a
  return zz / denom_ - az;
}

double LowerBarrier::updated_potential(const Vector& a, double w) const {
  if (edge_) return kNaN;
  const Vector z = shifted_llt_.solve(a);
  const double zz = z.squaredNorm();
  const double az = real_checked(a.dot(z), zz);
  const double gate = 1.0 / w + az;
  if (!(gate > 0.0)) {
    fail(ErrorCode::internal,
         "lower update breach: 1 + w a*Za <= 0 (verifier sandwich violated)");
  }
  return trace_shifted_ - zz / gate;
}

void LowerBarrier::update(const Vector& a, double w) {
  if (edge_) return;
  if (!(w > 0.0)) fail(ErrorCode::internal, "weights must be positive");
  const double predicted = updated_potential(a, w);
  state_ -= delta_eff_ * Matrix::Identity(m_, m_);
  state_ += w * a * a.adjoint();
  symmetrize(state_);
  refresh();
  // Tripwire for tolerance accumulation: the closed form and the fresh
  // refactorization agree to kappa(A) * eps on a healthy state, so a gap
  // here means the state has degenerated numerically (e.g. unbounded
  // weights when nothing constrains 1/w from below).
  if (std::abs(predicted - potential_) >
      1e-6 * std::max(1.0, std::abs(potential_))) {
    fail(ErrorCode::selection,
         "lower barrier state is numerically degenerate: closed-form "
         "potential " +
             std::to_string(predicted) + " vs refactorized " +
             std::to_string(potential_));
  }
}

nlohmann::ordered_json LowerBarrier::to_json() const {
  nlohmann::ordered_json j;
  j["mode"] = edge_ ? "edge" : "standard";
  j["m"] = m_;
  j["n"] = n_;
  j["delta"] = delta_;
  j["delta_eff"] = delta_eff_;
  if (!edge_) {
    j["potential"] = potential_;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < state_.rows(); ++r) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (Eigen::Index c = 0; c < state_.cols(); ++c) {
        row.push_back({state_(r, c).real(), state_(r, c).imag()});
      }
      rows.push_back(row);
    }
    j["state"] = rows;
  }
  return j;
}

UpperBarrier UpperBarrier::standard(const RealVector& j_diag, int n,
                                    Representation rep) {
  if (j_diag.size() == 0) {
    fail(ErrorCode::config, "upper barrier standard mode needs a nonempty J");
  }
  if ((j_diag.array() <= 0.0).any()) {
    fail(ErrorCode::config, "J diagonal entries must be strictly positive");
  }
  UpperBarrier ub;
  ub.edge_ = false;
  ub.rep_ = rep;
  ub.n_ = n;
  ub.j_diag_ = j_diag;
  ub.trace_j_ = j_diag.sum();
  const double m_eff = ub.trace_j_ / j_diag.maxCoeff();
  if (m_eff < 1.0 + 1.0 / n) {
    fail(ErrorCode::config,
         "upper barrier standard mode needs M_eff >= 1 + 1/n; use edge mode");
  }
  const double s = std::sqrt((m_eff - 1.0) / n);
  ub.zeta_ = (1.0 + s) / n;
  const double b0 = ub.zeta_ * ub.trace_j_ / s;
  const Eigen::Index dim = j_diag.size();
  if (rep == Representation::dense) {
    ub.state_ = b0 * Matrix::Identity(dim, dim);
  } else {
    ub.diag_ = RealVector::Constant(dim, b0);
    ub.cols_ = Matrix::Zero(dim, 0);
  }
  ub.refresh();
  return ub;
}

UpperBarrier UpperBarrier::edge(const RealVector& j_diag, int n) {
  if ((j_diag.array() <= 0.0).any()) {
    fail(ErrorCode::config, "J diagonal entries must be strictly positive");
  }
  UpperBarrier ub;
  ub.edge_ = true;
  ub.n_ = n;
  ub.j_diag_ = j_diag;
  ub.trace_j_ = j_diag.size() ? j_diag.sum() : 0.0;
  const double m_eff =
      j_diag.size() ? ub.trace_j_ / j_diag.maxCoeff() : 1.0;
  const double s = std::sqrt(std::max(m_eff - 1.0, 0.0) / n);
  ub.zeta_ = (1.0 + s) / n;
  ub.potential_ = kNaN;
  return ub;
}

UpperBarrier UpperBarrier::from_state_dense(Matrix b, RealVector j_diag, int n,
                                            double zeta) {
  UpperBarrier ub;
  ub.edge_ = false;
  ub.rep_ = Representation::dense;
  ub.n_ = n;
  ub.zeta_ = zeta;
  ub.j_diag_ = std::move(j_diag);
  ub.trace_j_ = ub.j_diag_.sum();
  ub.state_ = std::move(b);
  ub.refresh();
  return ub;
}

UpperBarrier UpperBarrier::from_state_woodbury(RealVector diag, Matrix cols,
                                               RealVector j_diag, int n,
                                               double zeta) {
  UpperBarrier ub;
  ub.edge_ = false;
  ub.rep_ = Representation::woodbury;
  ub.n_ = n;
  ub.zeta_ = zeta;
  ub.j_diag_ = std::move(j_diag);
  ub.trace_j_ = ub.j_diag_.sum();
  ub.diag_ = std::move(diag);
  ub.cols_ = std::move(cols);
  ub.refresh();
  return ub;
}

void UpperBarrier::refresh() {
  const Eigen::Index dim = j_diag_.size();
  if (rep_ == Representation::dense) {
    check_hermitian(state_, "upper barrier");
    Eigen::LLT<Matrix> llt(state_);
    if (llt.info() != Eigen::Success) {
      fail(ErrorCode::internal, "upper barrier state is not positive definite");
    }
    const Matrix w_full = llt.solve(Matrix::Identity(dim, dim));
    Complex tr_jw = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) tr_jw += j_diag_(i) * w_full(i, i);
    potential_ = real_checked(tr_jw, std::abs(tr_jw));

    Matrix shifted = state_;
    shifted += (zeta_ * j_diag_).asDiagonal().toDenseMatrix().cast<Complex>();
    x_llt_.compute(shifted);
    if (x_llt_.info() != Eigen::Success) {
      fail(ErrorCode::internal, "upper barrier shifted state B + zeta J failed");
    }
    const Matrix x_full = x_llt_.solve(Matrix::Identity(dim, dim));
    Complex tr_jx = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) tr_jx += j_diag_(i) * x_full(i, i);
    trace_jx_ = real_checked(tr_jx, std::abs(tr_jx));
  } else {
    dprime_ = diag_ + zeta_ * j_diag_;
    if ((diag_.array() <= 0.0).any()) {
      fail(ErrorCode::internal, "Woodbury diagonal lost positivity");
    }
    dinv_c_ = diag_.cwiseInverse().cast<Complex>();
    dpinv_c_ = dprime_.cwiseInverse().cast<Complex>();
    const Eigen::Index i = cols_.cols();

    potential_ = (j_diag_.array() / diag_.array()).sum();
    trace_jx_ = (j_diag_.array() / dprime_.array()).sum();
    if (i > 0) {
      // gram_inv for W: (I - M* D^-1 M)^-1, rebuilt every iteration.
      const Matrix tw = cols_.adjoint() * dinv_c_.asDiagonal() * cols_;
      Eigen::LLT<Matrix> gram_w((Matrix::Identity(i, i) - tw).eval());
      if (gram_w.info() != Eigen::Success) {
        fail(ErrorCode::internal,
             "upper barrier state is not positive definite (Woodbury gram)");
      }
      const RealVector jw = j_diag_.array() / diag_.array().square();
      const Matrix pw = cols_.adjoint() * jw.cast<Complex>().asDiagonal() * cols_;
      Complex corr = (gram_w.solve(pw)).trace();
      potential_ += real_checked(corr, potential_);

      const Matrix tx = cols_.adjoint() * dpinv_c_.asDiagonal() * cols_;
      gram_x_llt_.compute((Matrix::Identity(i, i) - tx).eval());
      if (gram_x_llt_.info() != Eigen::Success) {
        fail(ErrorCode::internal,
             "upper barrier shifted state failed (Woodbury gram)");
      }
      const RealVector jx = j_diag_.array() / dprime_.array().square();
      const Matrix px = cols_.adjoint() * jx.cast<Complex>().asDiagonal() * cols_;
      corr = (gram_x_llt_.solve(px)).trace();
      trace_jx_ += real_checked(corr, trace_jx_);
    } else {
      gram_x_llt_ = Eigen::LLT<Matrix>();
    }
  }
  if (!(potential_ > 0.0) || !std::isfinite(potential_)) {
    fail(ErrorCode::internal, "upper potential must be positive and finite");
  }
  denom_ = potential_ - trace_jx_;
  if (!(denom_ > 0.0)) {
    fail(ErrorCode::internal, "Tr(JW - JX) is not positive");
  }
}

Vector UpperBarrier::apply_x(const Vector& b) const {
  if (rep_ == Representation::dense) return x_llt_.solve(b);
  const Vector u = dpinv_c_.cwiseProduct(b);
  if (cols_.cols() == 0) return u;
  const Vector v = cols_.adjoint() * u;
  const Vector g = gram_x_llt_.solve(v);
  return u + dpinv_c_.cwiseProduct(cols_ * g);
}

double UpperBarrier::verifier(const Vector& b) const {
  if (edge_) {
    if (trace_j_ <= 0.0) return 0.0;
    return double(n_) / trace_j_ * b.squaredNorm();
  }
  const Vector x = apply_x(b);
  const double xjx = (j_diag_.array() * x.cwiseAbs2().array()).sum();
  const double bx = real_checked(b.dot(x), xjx);
  return xjx / denom_ + bx;
}

double UpperBarrier::updated_potential(const Vector& b, double w) const {
  if (edge_) return kNaN;
  const Vector x = apply_x(b);
  const double xjx = (j_diag_.array() * x.cwiseAbs2().array()).sum();
  const double bx = real_checked(b.dot(x), xjx);
  const double gate = 1.0 / w - bx;
  if (!(gate > 0.0)) {
    fail(ErrorCode::internal,
         "upper update breach: 1 - w b*Xb <= 0 (verifier sandwich violated)");
  }
  return trace_jx_ + xjx / gate;
}

void UpperBarrier::update(const Vector& b, double w) {
  if (edge_) return;
  if (!(w > 0.0)) fail(ErrorCode::internal, "weights must be positive");
  const double predicted = updated_potential(b, w);
  if (rep_ == Representation::dense) {
    state_ += (zeta_ * j_diag_).asDiagonal().toDenseMatrix().cast<Complex>();
    state_ -= w * b * b.adjoint();
    symmetrize(state_);
  } else {
    diag_ += zeta_ * j_diag_;
    cols_.conservativeResize(Eigen::NoChange, cols_.cols() + 1);
    cols_.col(cols_.cols() - 1) = std::sqrt(w) * b;
  }
  refresh();
  if (std::abs(predicted - potential_) >
      1e-6 * std::max(1.0, std::abs(potential_))) {
    fail(ErrorCode::selection,
         "upper barrier state is numerically degenerate: closed-form "
         "potential " +
             std::to_string(predicted) + " vs refactorized " +
             std::to_string(potential_));
  }
}

Matrix UpperBarrier::dense_state() const {
  if (edge_) fail(ErrorCode::internal, "edge-mode upper barrier has no state");
  if (rep_ == Representation::dense) return state_;
  Matrix b = diag_.cast<Complex>().asDiagonal();
  if (cols_.cols() > 0) b -= cols_ * cols_.adjoint();
  return b;
}

nlohmann::ordered_json UpperBarrier::to_json() const {
  nlohmann::ordered_json j;
  j["mode"] = edge_ ? "edge" : "standard";
  j["representation"] =
      edge_ ? "none"
            : (rep_ == Representation::dense ? "dense" : "woodbury");
  j["n"] = n_;
  j["zeta"] = zeta_;
  j["trace_j"] = trace_j_;
  j["j_diag"] = std::vector<double>(j_diag_.data(), j_diag_.data() + j_diag_.size());
  if (!edge_) {
    j["potential"] = potential_;
    if (rep_ == Representation::dense) {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (Eigen::Index r = 0; r < state_.rows(); ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (Eigen::Index c = 0; c < state_.cols(); ++c) {
          row.push_back({state_(r, c).real(), state_(r, c).imag()});
        }
        rows.push_back(row);
      }
      j["state"] = rows;
    } else {
      j["diag"] = std::vector<double>(diag_.data(), diag_.data() + diag_.size());
      nlohmann::ordered_json cols = nlohmann::ordered_json::array();
      for (Eigen::Index c = 0; c < cols_.cols(); ++c) {
        nlohmann::ordered_json col = nlohmann::ordered_json::array();
        for (Eigen::Index r = 0; r < cols_.rows(); ++r) {
          col.push_back({cols_(r, c).real(), cols_(r, c).imag()});
        }
        cols.push_back(col);
      }
      j["factor_columns"] = cols;
    }
  }
  return j;
}

}  // namespace subsample
