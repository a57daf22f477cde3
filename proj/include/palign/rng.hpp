#pragma once

#include <cstdint>
#include <random>

#include "palign/types.hpp"

namespace palign {

// All stochastic code draws through these helpers.  std::*_distribution is
// implementation-defined, so results would not reproduce across standard
// libraries; the raw engine output stream is pinned by the standard.
using Rng = std::mt19937_64;

// Uniform on [0, 1) with 53-bit resolution.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Uniform integer in [0, n).  Rejection-free modulo is fine here: n is tiny
// compared with 2^64, the bias is far below anything observable.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  return n == 0 ? 0 : rng() % n;
}

// Standard normal via Box-Muller (polar form avoided to keep the draw count
// per call fixed, which keeps seeded streams stable across refactors).
inline double gaussian(Rng& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1], log-safe
  const double u2 = uniform01(rng);
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

inline Complex complex_gaussian(Rng& rng) {
  const double re = gaussian(rng);
  const double im = gaussian(rng);
  return Complex(re, im) / std::sqrt(2.0);
}

inline CMatrix random_complex_matrix(Rng& rng, int rows, int cols) {
  CMatrix a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = complex_gaussian(rng);
  return a;
}

// Haar-ish random unitary: QR of a complex Gaussian matrix with the phase
// convention fixed so the result is deterministic.
inline CMatrix random_unitary(Rng& rng, int n) {
  CMatrix g = random_complex_matrix(rng, n, n);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    Complex d = r(i, i);
    double m = std::abs(d);
    q.col(i) *= (m > 0.0 ? d / m : Complex(1.0, 0.0));
  }
  return q;
}

}  // namespace palign
