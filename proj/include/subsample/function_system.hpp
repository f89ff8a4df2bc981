#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "subsample/types.hpp"

namespace subsample {

enum class BasisFamily { fourier, legendre, chebyshev };
enum class OrderingKind { univariate, isotropic, mixed };

// Univariate orthonormal family on [0,1] together with its orthogonality
// measure (uniform for Fourier/Legendre, arcsine for Chebyshev) and the
// uniform-bound data (theta, C_eta) used for Christoffel envelopes.
struct UnivariateBasis {
  BasisFamily family = BasisFamily::fourier;
  double theta = 0.5;
  double c_eta = 1.0;

  bool signed_frequencies() const { return family == BasisFamily::fourier; }
  bool arcsine_measure() const { return family == BasisFamily::chebyshev; }

  Complex eval(long k, double x) const;
  // sup over [0,1] of |eta_k|; exact for all three families.
  double sup_abs(long k) const;
};

// Fourier and Chebyshev carry the known constants (1, sqrt(2)); the Legendre
// constant is measured on a dense grid and inflated by 5%.
UnivariateBasis make_basis(BasisFamily family);

struct MultiIndex {
  long j = 0;
  long k = 0;
  bool operator==(const MultiIndex&) const = default;
};

// Total order on tensor indices: ascending sigma, ties broken
// lexicographically on (j, k). Prefixes of the order are the nested sets
// I_1 c I_2 c ... with |I_l| = l.
struct IndexOrdering {
  OrderingKind kind = OrderingKind::univariate;
  int dimension = 1;
  bool signed_frequencies = false;

  double sigma(const MultiIndex& idx) const;
  // The `count` smallest indices in the total order.
  std::vector<MultiIndex> first(long count) const;
};

// Bookkeeping for truncating the upper family at N = ceil(m^(a0/(a0-theta)))
// with scaling exponent t = (a0 + theta)/2.
struct TruncationPlan {
  double theta = 0.0;
  double alpha0 = 0.0;
  double t = 0.0;
  int m = 0;
  long n_trunc = 0;  // N
  double c_eta = 1.0;

  static TruncationPlan make(double theta, double alpha0, int m, double c_eta);
};

// Evaluates the lower family a(x) in C^m and the upper family b(x) in C^N at
// a point, and knows the Gram operators I (lower, pre-whitening) and J
// (upper, diagonal by construction).
class FunctionSystem {
 public:
  virtual ~FunctionSystem() = default;

  int domain_dim() const { return domain_dim_; }
  int lower_dim() const { return lower_dim_; }
  int upper_dim() const { return static_cast<int>(j_diag_.size()); }

  const RealVector& j_diag() const { return j_diag_; }
  double trace_j() const { return j_diag_.size() ? j_diag_.sum() : 0.0; }
  double lambda_max_j() const {
    return j_diag_.size() ? j_diag_.maxCoeff() : 0.0;
  }
  double effective_dim() const {
    return j_diag_.size() ? trace_j() / lambda_max_j() : 1.0;
  }

  // Gram of the original (unwhitened) lower family.
  const Matrix& lower_gram() const { return gram_lower_; }
  double lambda_min_gram() const { return lambda_min_gram_; }
  // Whitening transform T with a_white = T a_raw.
  const Matrix& whitening() const { return whitening_; }
  bool is_whitened() const { return whitened_; }
  bool constant_adjoined() const { return constant_adjoined_; }

  // Whitened lower family; this is what the selection loop consumes.
  virtual void eval_lower(const Point& x, Vector& out) const = 0;
  // Original lower family, for certifying bounds in the original coordinates.
  virtual void eval_lower_raw(const Point& x, Vector& out) const = 0;
  virtual void eval_upper(const Point& x, Vector& out) const = 0;

  virtual Point sample_mu(Rng& rng) const = 0;
  // Draws from d rho = (1/m) sum_k |a_k|^2 d mu; adds the number of
  // rejected mu-draws to `rejections`.
  virtual Point christoffel_sample(Rng& rng, long& rejections) const = 0;

  // Non-null for systems backed by a finite point list.
  virtual const std::vector<Point>* scan_points() const { return nullptr; }

 protected:
  int domain_dim_ = 1;
  int lower_dim_ = 0;
  RealVector j_diag_;
  Matrix gram_lower_;
  Matrix whitening_;
  double lambda_min_gram_ = 1.0;
  bool whitened_ = false;
  bool constant_adjoined_ = false;
};

// Tensor-product analytic system on [0,1]^d, d in {1,2}. The lower family is
// the first m functions of the ordering; the upper family is a contiguous
// range of ordered functions with per-entry scalings (J = diag(scale^2)).
class TensorBasisSystem : public FunctionSystem {
 public:
  void eval_lower(const Point& x, Vector& out) const override;
  void eval_lower_raw(const Point& x, Vector& out) const override;
  void eval_upper(const Point& x, Vector& out) const override;
  Point sample_mu(Rng& rng) const override;
  Point christoffel_sample(Rng& rng, long& rejections) const override;

  const UnivariateBasis& basis() const { return basis_; }
  const IndexOrdering& ordering() const { return ordering_; }
  const std::optional<TruncationPlan>& plan() const { return plan_; }
  double christoffel_envelope() const { return envelope_; }

  // Unscaled ordered basis values eta_{rank} for ranks 1..count; used by the
  // recovery pipeline to evaluate coefficient targets.
  void eval_ordered(const Point& x, long count, Vector& out) const;

  // Singular values of the truncated embedding, sigma_k = (k+1)^-t for
  // k = 0..N-1 (constructive systems only).
  RealVector constructive_sigmas() const;

  friend TensorBasisSystem build_constructive_system(const UnivariateBasis&,
                                                     const IndexOrdering&,
                                                     const TruncationPlan&,
                                                     bool adjoin_constant);
  friend TensorBasisSystem build_frame_system(const UnivariateBasis&,
                                              const IndexOrdering&, int m_count,
                                              long upper_count,
                                              bool adjoin_constant);

 private:
  void finalize();
  void eval_indices(const Point& x, const std::vector<MultiIndex>& idx,
                    Vector& out) const;

  UnivariateBasis basis_;
  IndexOrdering ordering_;
  std::vector<MultiIndex> lower_idx_;
  std::vector<MultiIndex> upper_idx_;
  RealVector upper_scale_;
  std::optional<TruncationPlan> plan_;
  double envelope_ = 1.0;
  long max_abs_freq_[2] = {0, 0};
};

// Lower family = first m ordered functions; upper family = ordered functions
// with ranks m < k <= N scaled by rank^-t (J entries rank^-2t), optionally
// with the constant adjoined at scale sqrt(lambda_m) so the weight sum is
// controlled. Requires the constant to sit among the first m functions.
TensorBasisSystem build_constructive_system(const UnivariateBasis& basis,
                                            const IndexOrdering& ordering,
                                            const TruncationPlan& plan,
                                            bool adjoin_constant = true);

// Lower family = first m_count ordered functions; upper family = the next
// upper_count ordered functions scaled by 1/sigma, optionally with the
// constant adjoined at scale 1.
TensorBasisSystem build_frame_system(const UnivariateBasis& basis,
                                     const IndexOrdering& ordering, int m_count,
                                     long upper_count,
                                     bool adjoin_constant = true);

// System backed by a finite point set with a discrete measure. Function
// families are value tables; the lower family is whitened against the
// discrete Gram, the upper family must come with a diagonal Gram.
class DiscreteSystem : public FunctionSystem {
 public:
  // mu: strictly positive measure weights. b_table rows must be mutually
  // orthogonal under mu (J diagonal); this is checked.
  DiscreteSystem(std::vector<Point> points, RealVector mu, Matrix a_table,
                 Matrix b_table, bool whiten_now = true,
                 bool adjoin_constant = false);

  // Applies (another) whitening transform computed from the current Gram.
  void whiten();

  void eval_lower(const Point& x, Vector& out) const override;
  void eval_lower_raw(const Point& x, Vector& out) const override;
  void eval_upper(const Point& x, Vector& out) const override;
  Point sample_mu(Rng& rng) const override;
  Point christoffel_sample(Rng& rng, long& rejections) const override;
  const std::vector<Point>* scan_points() const override { return &points_; }

  const RealVector& measure() const { return mu_; }
  int point_index(const Point& x) const;

 private:
  void rebuild_sampling_tables();

  std::vector<Point> points_;
  RealVector mu_;
  Matrix a_raw_;    // m x |D|
  Matrix a_white_;  // m x |D|
  Matrix b_tab_;    // N x |D|
  std::vector<double> mu_cdf_;
  std::vector<double> christoffel_cdf_;
};

// Gram-Schmidt of table rows under the discrete inner product
// <f, g> = sum_x mu(x) f(x) conj(g(x)); rows that collapse are rejected.
Matrix orthonormalize_rows(const Matrix& table, const RealVector& mu);

// T = gram^{-1/2}; rejects grams that are not positive definite, naming the
// offending smallest eigenvalue.
Matrix inverse_sqrt(const Matrix& gram);

}  // namespace subsample
