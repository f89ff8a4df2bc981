#pragma once

#include <optional>

#include "subsample/types.hpp"

#include "json.hpp"

namespace subsample {

// Lower barrier state A with increment delta. Holds the potential
// Phi(A) = Tr(A^-1) and evaluates the lower verifier
//   L(a) = a* Z^2 a / Tr(Z - Y) - a* Z a,   Z = (A - delta_eff I)^-1, Y = A^-1,
// against a frozen factorization that is rebuilt after every update.
// The m = 1 edge mode has no matrix state and uses L(a) = n |a|^2.
class LowerBarrier {
 public:
  // Standard mode, m >= 2: A0 = (delta m / r) I with r = sqrt((m-1)/n),
  // delta = (1-r)/n and delta_eff = (1-r-epsilon)/n. The relaxation must
  // satisfy 0 <= epsilon < (1-r)^2.
  static LowerBarrier standard(int m, int n, double epsilon);

  // Edge mode for m = 1: L(a) = n |a|^2, no state, no potential.
  static LowerBarrier edge(int n);

  // Arbitrary state, for cross-checks and snapshot replay.
  static LowerBarrier from_state(Matrix a, int n, double delta,
                                 double delta_eff);

  bool edge_mode() const { return edge_; }
  int dim() const { return m_; }
  double increment() const { return delta_; }
  double increment_eff() const { return delta_eff_; }

  // Tr(A^-1); NaN in edge mode.
  double potential() const { return potential_; }

  // Read-only between updates; safe to call concurrently.
  double verifier(const Vector& a) const;

  // Closed-form Phi(A - delta_eff I + w a a*) without touching the state.
  double updated_potential(const Vector& a, double w) const;

  // A <- A - delta_eff I + w a a*, then refreshes factorizations.
  // Signals a contract breach if the Sherman-Morrison denominator is not
  // positive (the caller violated the verifier sandwich).
  void update(const Vector& a, double w);

  const Matrix& state() const { return state_; }

  nlohmann::ordered_json to_json() const;

 private:
  LowerBarrier() = default;
  void refresh();

  bool edge_ = false;
  int m_ = 0;
  int n_ = 0;
  double delta_ = 0.0;
  double delta_eff_ = 0.0;
  Matrix state_;  // A, m x m Hermitian positive definite

  // frozen per-iteration data
  double potential_ = 0.0;        // Tr(Y)
  double trace_shifted_ = 0.0;    // Tr(Z)
  double denom_ = 0.0;            // Tr(Z - Y)
  Eigen::LLT<Matrix> shifted_llt_;
};

// Upper barrier state B with increment zeta and diagonal weight J. Holds
// Psi(B) = Tr(J B^-1) and evaluates the upper verifier
//   U(b) = b* X J X b / Tr(JW - JX) + b* X b,  W = B^-1, X = (B + zeta J)^-1.
// Representations: dense (B materialized) or Woodbury (B = D - M M* with
// diagonal D and thin M; X and the traces are applied implicitly, never
// materialized). The M_eff < 1 + 1/n edge mode has no state and uses
// U(b) = (n / Tr J) sum_k |b_k|^2.
class UpperBarrier {
 public:
  enum class Representation { dense, woodbury };

  // Standard mode, requires M_eff = Tr(J)/max(J) >= 1 + 1/n:
  // B0 = (zeta Tr(J) / s) I with s = sqrt((M_eff-1)/n), zeta = (1+s)/n.
  static UpperBarrier standard(const RealVector& j_diag, int n,
                               Representation rep);

  // Edge mode: fixed verifier, no state. An empty upper family gives U = 0.
  static UpperBarrier edge(const RealVector& j_diag, int n);

  // Arbitrary states, for cross-checks between the two representations.
  static UpperBarrier from_state_dense(Matrix b, RealVector j_diag, int n,
                                       double zeta);
  static UpperBarrier from_state_woodbury(RealVector diag, Matrix cols,
                                          RealVector j_diag, int n,
                                          double zeta);

  bool edge_mode() const { return edge_; }
  Representation representation() const { return rep_; }
  int ambient_dim() const { return static_cast<int>(j_diag_.size()); }
  int selected_count() const { return static_cast<int>(cols_.cols()); }
  double increment() const { return zeta_; }
  double trace_j() const { return trace_j_; }

  // Tr(J B^-1); NaN in edge mode.
  double potential() const { return potential_; }

  double verifier(const Vector& b) const;

  // Closed-form Psi(B + zeta J - w b b*) without touching the state.
  double updated_potential(const Vector& b, double w) const;

  // B <- B + zeta J - w b b* (Woodbury: diag gains zeta J, the factor gains
  // the column sqrt(w) b), then refreshes.
  void update(const Vector& b, double w);

  // Materializes B; intended for small N cross-checks.
  Matrix dense_state() const;

  nlohmann::ordered_json to_json() const;

 private:
  UpperBarrier() = default;
  void refresh();
  Vector apply_x(const Vector& b) const;  // X b in either representation

  bool edge_ = false;
  Representation rep_ = Representation::dense;
  int n_ = 0;
  double zeta_ = 0.0;
  double trace_j_ = 0.0;
  RealVector j_diag_;

  Matrix state_;     // dense B
  RealVector diag_;  // Woodbury D
  Matrix cols_;      // Woodbury M, N x i

  // frozen per-iteration data
  double potential_ = 0.0;  // Tr(JW)
  double trace_jx_ = 0.0;   // Tr(JX)
  double denom_ = 0.0;      // Tr(JW - JX)
  Eigen::LLT<Matrix> x_llt_;          // dense: B + zeta J
  RealVector dprime_;                 // Woodbury: D + zeta J
  Vector dinv_c_, dpinv_c_;           // cached 1/D, 1/D' as complex
  Eigen::LLT<Matrix> gram_x_llt_;     // I - M* D'^-1 M
};

}  // namespace subsample
