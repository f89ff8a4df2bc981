#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace subsample {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// A sampling point in [0,1]^d, d in {1,2}. 1-D points keep the second
// coordinate at zero so exact equality comparisons stay meaningful.
using Point = std::array<double, 2>;

namespace tol {
// Hermitian symmetry of stored states, per entry.
inline constexpr double hermitian = 1e-12;
// Imaginary residue allowed when a Hermitian quadratic form is read as real.
inline constexpr double imag_residue = 1e-10;
// Relative slack in 1/Phi(A) - delta_eff below which the verifier is
// declared ill-conditioned.
inline constexpr double near_singular_rel = 1e-10;
// Slack for certified frame bounds against their targets.
inline constexpr double certification = 1e-9;
// Relative tolerance for the nonincreasing-potential check.
inline constexpr double potential_monotone_rel = 1e-12;
// Residual below which a lower-family Gram counts as whitened.
inline constexpr double whitened_gram = 1e-8;
}  // namespace tol

enum class ErrorCode {
  config = 2,
  selection = 3,
  certification = 4,
  internal = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

// Reads a quadratic-form result as real, rejecting values whose imaginary
// part exceeds the residue tolerance relative to the magnitude involved.
inline double real_checked(Complex z, double scale = 1.0) {
  const double mag = std::max({1.0, std::abs(z.real()), std::abs(scale)});
  if (std::abs(z.imag()) > tol::imag_residue * mag) {
    fail(ErrorCode::internal,
         "imaginary residue " + std::to_string(z.imag()) +
             " above tolerance in a Hermitian form");
  }
  return z.real();
}

// Deterministic random stream: a fixed engine plus hand-rolled conversions,
// so identical seeds give identical output independent of the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {
    // splitmix64 warmup decorrelates small seeds
    for (int i = 0; i < 4; ++i) next_u64();
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  double normal() {
    // Box-Muller; one value per call keeps the stream easy to reason about.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::uint64_t state_;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 6.283185307179586476925;

}  // namespace subsample
