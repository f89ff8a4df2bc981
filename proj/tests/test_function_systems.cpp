#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "quadrature.hpp"
#include "subsample/function_system.hpp"
#include "support.hpp"

using namespace subsample;
namespace st = subsample::testing;

namespace {

// pushes the integrand through the arcsine substitution for Chebyshev so the
// quadrature oracle never sees the endpoint singularity
double inner_product_01(const UnivariateBasis& basis, long j, long k,
                        bool real_part) {
  const auto f = [&](double u) {
    double x = u;
    if (basis.arcsine_measure()) {
      const double s = std::sin(0.5 * 3.14159265358979323846 * u);
      x = s * s;
    }
    const Complex v = basis.eval(j, x) * std::conj(basis.eval(k, x));
    return real_part ? v.real() : v.imag();
  };
  return st::integrate_01(f, 64, 24);
}

}  // namespace

TEST_CASE("families are orthonormal under their measures") {
  for (auto family :
       {BasisFamily::fourier, BasisFamily::legendre, BasisFamily::chebyshev}) {
    const UnivariateBasis basis = make_basis(family);
    const long lo = basis.signed_frequencies() ? -16 : 0;
    const long hi = basis.signed_frequencies() ? 16 : 32;
    for (long j = lo; j <= hi; j += 4) {
      for (long k = j; k <= hi; k += 4) {
        const double re = inner_product_01(basis, j, k, true);
        const double im = inner_product_01(basis, j, k, false);
        const double expected = (j == k) ? 1.0 : 0.0;
        CHECK(re == doctest::Approx(expected).epsilon(1e-8));
        CHECK(std::abs(im) < 1e-8);
      }
    }
  }
}

TEST_CASE("uniform bound condition holds with the declared constants") {
  for (auto family :
       {BasisFamily::fourier, BasisFamily::legendre, BasisFamily::chebyshev}) {
    const UnivariateBasis basis = make_basis(family);
    IndexOrdering ordering{OrderingKind::univariate, 1,
                           basis.signed_frequencies()};
    const auto ordered = ordering.first(32);
    const int grid = 2048;
    for (long level : {1L, 2L, 4L, 8L, 16L, 32L}) {
      double sup = 0.0;
      for (int g = 0; g <= grid; ++g) {
        const double x = double(g) / grid;
        double sum = 0.0;
        for (long i = 0; i < level; ++i) {
          sum += std::norm(basis.eval(ordered[static_cast<std::size_t>(i)].j, x));
        }
        sup = std::max(sup, sum);
        if (family == BasisFamily::fourier) {
          CHECK(sum == doctest::Approx(double(level)).epsilon(1e-12));
        }
      }
      const double bound = basis.c_eta * basis.c_eta *
                           std::pow(double(level), 2.0 * basis.theta);
      CHECK(sup <= bound * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("orderings are nested with the advertised sigma values") {
  // isotropic: max(1, 2 pi (j^2 + k^2)); mixed: product of the axis factors
  IndexOrdering iso{OrderingKind::isotropic, 2, true};
  CHECK(iso.sigma({0, 0}) == doctest::Approx(1.0));
  CHECK(iso.sigma({1, 2}) == doctest::Approx(kTwoPi * 5.0));
  IndexOrdering mixed{OrderingKind::mixed, 2, true};
  CHECK(mixed.sigma({0, 3}) == doctest::Approx(kTwoPi * 3.0));
  CHECK(mixed.sigma({-2, 3}) == doctest::Approx(kTwoPi * 2.0 * kTwoPi * 3.0));

  for (auto kind : {OrderingKind::isotropic, OrderingKind::mixed}) {
    for (bool sgn : {false, true}) {
      IndexOrdering ord{kind, 2, sgn};
      const long top = 10000;
      const auto full = ord.first(top);
      CHECK(static_cast<long>(full.size()) == top);
      std::set<std::pair<long, long>> seen;
      for (const auto& ix : full) seen.insert({ix.j, ix.k});
      CHECK(static_cast<long>(seen.size()) == top);  // |I_l| = l, all distinct
      for (long l : {1L, 7L, 100L, 2500L, 9999L}) {
        const auto prefix = ord.first(l);
        for (long i = 0; i < l; ++i) {
          CHECK(prefix[static_cast<std::size_t>(i)] ==
                full[static_cast<std::size_t>(i)]);
        }
      }
      // sigma is nondecreasing along the order
      for (std::size_t i = 1; i < 200; ++i) {
        CHECK(ord.sigma(full[i]) >= ord.sigma(full[i - 1]) - 1e-12);
      }
    }
  }
}

TEST_CASE("point evaluations match the closed forms") {
  const UnivariateBasis fourier = make_basis(BasisFamily::fourier);
  CHECK(fourier.eval(0, 0.37).real() == doctest::Approx(1.0));
  CHECK(fourier.eval(0, 0.37).imag() == doctest::Approx(0.0));

  const UnivariateBasis legendre = make_basis(BasisFamily::legendre);
  CHECK(legendre.eval(1, 1.0).real() ==
        doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));

  const UnivariateBasis chebyshev = make_basis(BasisFamily::chebyshev);
  CHECK(chebyshev.eval(2, 1.0).real() ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("truncation plans follow N = ceil(m^(a0/(a0-theta)))") {
  const auto plan = TruncationPlan::make(0.5, 1.0, 4, 1.0);
  CHECK(plan.n_trunc == 16);
  CHECK(plan.t == doctest::Approx(0.75));

  const auto tiny = TruncationPlan::make(0.5, 2.0, 1, 1.0);
  CHECK(tiny.n_trunc == 1);
  CHECK(tiny.t == doctest::Approx(1.25));

  CHECK_THROWS_AS(TruncationPlan::make(1.0, 0.75, 4, 1.0), Error);
}

TEST_CASE("constructive system: scalings, trace of J, profile") {
  const UnivariateBasis basis = make_basis(BasisFamily::fourier);
  IndexOrdering ordering{OrderingKind::univariate, 1, true};
  const auto plan = TruncationPlan::make(0.5, 1.0, 4, basis.c_eta);
  const auto sys = build_constructive_system(basis, ordering, plan, false);
  CHECK(sys.lower_dim() == 4);
  CHECK(sys.upper_dim() == 12);  // ranks 5..16
  double expected = 0.0;
  for (int k = 5; k <= 16; ++k) expected += std::pow(double(k), -1.5);
  CHECK(sys.trace_j() == doctest::Approx(expected).epsilon(1e-12));

  const RealVector sig = sys.constructive_sigmas();
  CHECK(sig.size() == 16);
  CHECK(sig[0] == doctest::Approx(1.0));
  CHECK(sig[4] == doctest::Approx(std::pow(5.0, -0.75)).epsilon(1e-14));

  // m = 1 with alpha0 = 2: single function, empty upper family
  const auto plan1 = TruncationPlan::make(0.5, 2.0, 1, basis.c_eta);
  const auto sys1 = build_constructive_system(basis, ordering, plan1, false);
  CHECK(sys1.lower_dim() == 1);
  CHECK(sys1.upper_dim() == 0);

  // the adjoined constant ties the largest J entry
  const auto sys_adj = build_constructive_system(basis, ordering, plan, true);
  CHECK(sys_adj.upper_dim() == 13);
  CHECK(sys_adj.lambda_max_j() ==
        doctest::Approx(std::pow(5.0, -1.5)).epsilon(1e-12));
  CHECK(sys_adj.constant_adjoined());
}

TEST_CASE("inverse square root and whitening") {
  // diagonal case: gram = diag(4, 1) -> T = diag(1/2, 1)
  Matrix gram = Matrix::Zero(2, 2);
  gram(0, 0) = 4.0;
  gram(1, 1) = 1.0;
  const Matrix t = inverse_sqrt(gram);
  CHECK(std::abs(t(0, 0) - Complex(0.5)) < 1e-14);
  CHECK(std::abs(t(1, 1) - Complex(1.0)) < 1e-14);
  CHECK(std::abs(t(0, 1)) < 1e-14);

  // identity gram -> identity transform
  const Matrix tid = inverse_sqrt(Matrix::Identity(3, 3));
  CHECK((tid - Matrix::Identity(3, 3)).norm() < 1e-14);

  CHECK_THROWS_AS(inverse_sqrt(Matrix::Zero(2, 2)), Error);

  // random 3-dim family on a fine grid: whitened empirical Gram = identity
  Rng rng(71);
  auto fix = st::make_discrete_fixture(400, 3, 0, rng, false);
  DiscreteSystem sys(fix.points, fix.mu, fix.a_raw, fix.b_orth);
  Matrix emp = Matrix::Zero(3, 3);
  Vector a;
  for (std::size_t i = 0; i < fix.points.size(); ++i) {
    sys.eval_lower(fix.points[i], a);
    emp += fix.mu[static_cast<Eigen::Index>(i)] * a * a.adjoint();
  }
  CHECK((emp - Matrix::Identity(3, 3)).norm() < 1e-10);

  // idempotence: whitening an already-whitened system changes nothing
  const Matrix before = sys.whitening();
  sys.whiten();
  CHECK((sys.whitening() - before).norm() < 1e-10 * before.norm());
}

TEST_CASE("christoffel density integrates to one") {
  for (auto family : {BasisFamily::fourier, BasisFamily::chebyshev}) {
    const UnivariateBasis basis = make_basis(family);
    IndexOrdering ordering{OrderingKind::univariate, 1,
                           basis.signed_frequencies()};
    const auto sys = build_frame_system(basis, ordering, 5, 3, false);
    const auto f = [&](double u) {
      double x = u;
      if (basis.arcsine_measure()) {
        const double s = std::sin(0.5 * kPi * u);
        x = s * s;
      }
      Vector a;
      sys.eval_lower(Point{x, 0.0}, a);
      return a.squaredNorm() / 5.0;
    };
    CHECK(st::integrate_01(f, 64, 24) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("fourier christoffel sampling accepts every draw") {
  const UnivariateBasis basis = make_basis(BasisFamily::fourier);
  IndexOrdering ordering{OrderingKind::isotropic, 2, true};
  const auto sys = build_frame_system(basis, ordering, 9, 20, true);
  Rng rng(5);
  long rejections = 0;
  for (int i = 0; i < 500; ++i) {
    (void)sys.christoffel_sample(rng, rejections);
  }
  CHECK(rejections == 0);
}

TEST_CASE("chebyshev christoffel histogram matches the density") {
  // m = 2: d rho = (1/2)(|eta_0|^2 + |eta_1|^2) d nu, checked against a
  // multinomial 3-sigma band per bin on 10^4 samples.
  const UnivariateBasis basis = make_basis(BasisFamily::chebyshev);
  IndexOrdering ordering{OrderingKind::univariate, 1, false};
  const auto sys = build_frame_system(basis, ordering, 2, 2, false);

  const int bins = 16;
  const long samples = 10000;
  std::vector<long> counts(bins, 0);
  Rng rng(93);
  long rejections = 0;
  for (long i = 0; i < samples; ++i) {
    const Point x = sys.christoffel_sample(rng, rejections);
    const int bin = std::min(bins - 1, int(x[0] * bins));
    ++counts[static_cast<std::size_t>(bin)];
  }
  for (int b = 0; b < bins; ++b) {
    const double lo = double(b) / bins, hi = double(b + 1) / bins;
    const auto density = [&](double u) {
      const double s = std::sin(0.5 * kPi * u);
      const double x = s * s;
      if (x < lo || x >= hi) return 0.0;
      Vector a;
      sys.eval_lower(Point{x, 0.0}, a);
      return a.squaredNorm() / 2.0;
    };
    const double p = st::integrate_01(density, 256, 12);
    const double sd = std::sqrt(samples * p * (1.0 - p));
    CHECK(std::abs(counts[static_cast<std::size_t>(b)] - samples * p) <=
          3.0 * sd + 1.0);
  }

  // m = 1 with the constant function: rho = mu (arcsine here)
  const auto sys1 = build_frame_system(basis, ordering, 1, 2, false);
  Rng rng1(94);
  long rej1 = 0;
  long below_half = 0;
  const long n1 = 20000;
  for (long i = 0; i < n1; ++i) {
    if (sys1.christoffel_sample(rng1, rej1)[0] < 0.5) ++below_half;
  }
  // arcsine CDF at 1/2 is 1/2
  CHECK(std::abs(below_half - n1 / 2) < 3.0 * std::sqrt(n1 * 0.25));
}

TEST_CASE("discrete systems reject non-diagonal upper grams") {
  Rng rng(101);
  auto fix = st::make_discrete_fixture(30, 2, 0, rng);
  Matrix braw(2, 30);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 30; ++c) braw(r, c) = Complex(rng.normal(), rng.normal());
  }
  CHECK_THROWS_AS(DiscreteSystem(fix.points, fix.mu, fix.a_raw, braw), Error);
}
