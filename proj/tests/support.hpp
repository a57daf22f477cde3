#pragma once

// Shared generators and independent oracles for the test suite.  Oracles here
// deliberately avoid the library's computation paths: set membership checks go
// through Monte-Carlo sampling and convex geometry, spectra through Eigen
// directly on construction data.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "palign/phases.hpp"
#include "palign/rng.hpp"
#include "palign/types.hpp"

namespace palign::testing {

inline constexpr double kTestPi = std::numbers::pi;

// Normal matrix with prescribed eigenvalue arguments: Q diag(r_k e^{i phi_k}) Q*.
inline CMatrix normal_with_args(Rng& rng, const std::vector<double>& args) {
  const int m = static_cast<int>(args.size());
  CMatrix q = random_unitary(rng, m);
  CVector d(m);
  for (int k = 0; k < m; ++k) d(k) = std::polar(uniform_in(rng, 0.4, 2.0), args[k]);
  return q * d.asDiagonal() * q.adjoint();
}

// Random normal sectorial matrix; arguments confined to [-half_span, half_span].
inline CMatrix random_normal_sectorial(Rng& rng, int m, double half_span,
                                       std::vector<double>* args_out = nullptr) {
  std::vector<double> args(m);
  for (auto& a : args) a = uniform_in(rng, -half_span, half_span);
  if (args_out) *args_out = args;
  return normal_with_args(rng, args);
}

// Congruence T* diag(e^{i phi}) T with a moderately conditioned T: sectorial
// with exactly the prescribed phases.
inline CMatrix sectorial_with_phases(Rng& rng, const std::vector<double>& phis,
                                     double mix = 0.3) {
  const int m = static_cast<int>(phis.size());
  CMatrix t = CMatrix::Identity(m, m) + mix * random_complex_matrix(rng, m, m);
  CVector d(m);
  for (int k = 0; k < m; ++k) d(k) = std::polar(1.0, phis[k]);
  return t.adjoint() * d.asDiagonal() * t;
}

inline CVector random_unit_vector(Rng& rng, int m) {
  CVector x(m);
  for (int i = 0; i < m; ++i) x(i) = complex_gaussian(rng);
  return x / x.norm();
}

// Monte-Carlo check that every sampled numerical-range point lies inside the
// phase cone [lo, hi] (angles measured relative to `center` so wrap-around is
// handled).  Points with magnitude below `floor` are skipped.
inline bool phase_cone_contains_range(const CMatrix& a, double lo, double hi, double center,
                                      Rng& rng, int samples, double slack,
                                      double floor = 1e-9) {
  for (int s = 0; s < samples; ++s) {
    const CVector x = random_unit_vector(rng, static_cast<int>(a.rows()));
    const Complex w = (x.adjoint() * a * x)(0, 0);
    if (std::abs(w) < floor) continue;
    const double theta = center + std::arg(w * std::polar(1.0, -center));
    if (theta < lo - slack || theta > hi + slack) return false;
  }
  return true;
}

// Signed-area convexity check for points already in angular order.
inline bool convex_in_order(const std::vector<Complex>& pts, double tol) {
  std::vector<Complex> ring;
  for (const auto& p : pts)
    if (ring.empty() || std::abs(p - ring.back()) > 1e-12) ring.push_back(p);
  while (ring.size() > 1 && std::abs(ring.front() - ring.back()) <= 1e-12) ring.pop_back();
  if (ring.size() < 3) return true;  // segment or point is trivially convex
  const int k = static_cast<int>(ring.size());
  for (int i = 0; i < k; ++i) {
    const Complex u = ring[(i + 1) % k] - ring[i];
    const Complex v = ring[(i + 2) % k] - ring[(i + 1) % k];
    const double cross = u.real() * v.imag() - u.imag() * v.real();
    if (cross < -tol) return false;
  }
  return true;
}

// Membership in the convex hull of an angularly ordered point loop, with an
// outward tolerance.  Degenerate loops fall back to a distance check.
inline bool hull_contains(const std::vector<Complex>& loop, Complex w, double tol) {
  std::vector<Complex> ring;
  for (const auto& p : loop)
    if (ring.empty() || std::abs(p - ring.back()) > 1e-12) ring.push_back(p);
  while (ring.size() > 1 && std::abs(ring.front() - ring.back()) <= 1e-12) ring.pop_back();
  const int k = static_cast<int>(ring.size());
  if (k < 3) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      const Complex a = ring[i], b = ring[(i + 1) % std::max(k, 1)];
      const Complex ab = b - a;
      const double len2 = std::norm(ab);
      double t = len2 > 0.0 ? std::clamp(((w - a) / ab).real(), 0.0, 1.0) : 0.0;
      best = std::min(best, std::abs(w - (a + t * ab)));
    }
    return k == 0 ? false : best <= tol;
  }
  for (int i = 0; i < k; ++i) {
    const Complex u = ring[(i + 1) % k] - ring[i];
    const Complex v = w - ring[i];
    const double cross = u.real() * v.imag() - u.imag() * v.real();
    if (cross < -tol * std::max(1.0, std::abs(u))) return false;
  }
  return true;
}

inline RMatrix ring_laplacian(int n, const std::vector<double>& weights = {}) {
  RMatrix l = RMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    l(i, i) += w;
    l(i, (i + 1) % n) -= w;
  }
  return l;
}

}  // namespace palign::testing
