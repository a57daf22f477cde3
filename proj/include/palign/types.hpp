#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace palign {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Shared numeric tolerances.  All rank/definiteness thresholds are relative
// to the spectral scale of the matrix at hand.
inline constexpr double kRankTol = 1e-9;       // sigma > kRankTol * sigma_max counts toward rank
inline constexpr double kPdTol = 1e-10;        // positive-definiteness margin, relative to ||A||_2
inline constexpr double kSemiTouchTol = 1e-8;  // phase span treated as touching +/- pi/2
inline constexpr double kReconTol = 1e-8;      // factorization reconstruction tolerance
inline constexpr double kPhaseSlack = 1e-6;    // certificate verification slack on phase bounds
inline constexpr double kTolDiv = 1e-3;        // diversity bisection bracket width
inline constexpr double kAlphaQuantum = kTolDiv / 2.0;  // cache quantization step for alpha
inline constexpr double kDivergeLimit = 1e12;  // simulation state magnitude treated as divergence

using MatrixSet = std::vector<CMatrix>;

inline CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

inline CMatrix skew_hermitian_part(const CMatrix& a) {
  return (a - a.adjoint()) / Complex(0.0, 2.0);
}

inline double spectral_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.jacobiSvd().singularValues()(0);
}

// Numerical rank with the shared relative threshold.
inline int numerical_rank(const CMatrix& a) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  const double cut = kRankTol * sv(0);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++r;
  return r;
}

inline bool all_finite(const CMatrix& a) { return a.allFinite(); }

}  // namespace palign
