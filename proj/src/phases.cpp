#include "palign/phases.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "palign/errors.hpp"

namespace palign {
namespace {

constexpr double kPi = std::numbers::pi;
// lambda_min optimum inside this band of zero means W(A) touches the origin.
constexpr double kBoundaryBand = 1e-9;
constexpr int kGammaGridPoints = 720;

void require_square(const CMatrix& a, const char* who) {
  if (a.rows() != a.cols())
    throw NonSquare(std::string(who) + ": matrix is " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()));
  if (!all_finite(a)) throw std::invalid_argument(std::string(who) + ": non-finite entries");
}

double lambda_min(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// g(gamma) = lambda_min(H(e^{-i gamma} A)) = lambda_min(cos(gamma) H + sin(gamma) S).
// On the set where g > 0 the function is concave, so a coarse grid plus local
// golden-section refinement around the best grid point finds the maximizer.
struct GammaOpt {
  double gamma = 0.0;
  double value = 0.0;
};

GammaOpt maximize_rotation_margin(const CMatrix& a) {
  const CMatrix h = hermitian_part(a);
  const CMatrix s = skew_hermitian_part(a);
  auto g = [&](double gamma) { return lambda_min(std::cos(gamma) * h + std::sin(gamma) * s); };

  GammaOpt best{0.0, -std::numeric_limits<double>::infinity()};
  const double step = 2.0 * kPi / kGammaGridPoints;
  for (int i = 0; i < kGammaGridPoints; ++i) {
    const double gamma = -kPi + i * step;
    const double v = g(gamma);
    if (v > best.value) best = {gamma, v};
  }

  // Golden-section on the bracket [best - step, best + step].
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best.gamma - step, hi = best.gamma + step;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = g(x1), f2 = g(x2);
  for (int iter = 0; iter < 48 && (hi - lo) > 1e-12; ++iter) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = g(x1);
    }
  }
  const double mid = 0.5 * (lo + hi);
  const double fm = g(mid);
  if (fm > best.value) best = {mid, fm};
  if (f1 > best.value) best = {x1, f1};
  if (f2 > best.value) best = {x2, f2};
  return best;
}

// Phases of A via the congruence built at rotation gamma:
//   e^{-i gamma} A = H + iS,  H > 0  =>  A = T* D T with
//   T = (I + M^2)^{1/4} U* H^{1/2},  D = diag(e^{i(gamma + atan mu_k)}),
// where M = H^{-1/2} S H^{-1/2} = U diag(mu) U*.  The decomposition is unique,
// so any gamma with positive-definite H yields the same phase multiset.
PhaseSpectrum phases_at(const CMatrix& a, double gamma, double regularize, SectorClass klass) {
  const Eigen::Index m = a.rows();
  const CMatrix b = std::polar(1.0, -gamma) * a;
  const CMatrix h = hermitian_part(b) + regularize * CMatrix::Identity(m, m);
  const CMatrix s = skew_hermitian_part(b);

  Eigen::SelfAdjointEigenSolver<CMatrix> eh(h);
  const RVector lam = eh.eigenvalues();
  if (lam(0) <= 0.0) throw NotSectorial("phases: rotated Hermitian part not positive definite");
  const CMatrix hs = eh.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() *
                     eh.eigenvectors().adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> em(CMatrix(hs * s * hs), Eigen::EigenvaluesOnly);

  PhaseSpectrum spec;
  spec.center = gamma;
  spec.klass = klass;
  spec.rank = static_cast<int>(m);
  spec.phases.reserve(m);
  for (Eigen::Index i = m; i-- > 0;) spec.phases.push_back(gamma + std::atan(em.eigenvalues()(i)));
  return spec;
}

// Phases of a numerically full-rank matrix (scale-normalized by the caller).
// Resulting klass is Sectorial, or SemiSectorial when W(A) is tangent to the
// origin (the full-rank tangent case).
PhaseSpectrum full_rank_phases(const CMatrix& a) {
  const double fast = lambda_min(hermitian_part(a));
  if (fast > kPdTol) return phases_at(a, 0.0, 0.0, SectorClass::Sectorial);

  const GammaOpt opt = maximize_rotation_margin(a);
  if (opt.value > kPdTol) return phases_at(a, opt.gamma, 0.0, SectorClass::Sectorial);
  if (opt.value < -kBoundaryBand)
    throw NotSectorial("phases: numerical range contains the origin in its interior");

  // Tangent case: H(e^{-i gamma*} A) is singular PSD.  A small shift keeps the
  // congruence well defined; the extreme phases saturate at +/- pi/2.
  const double delta = std::max(1e-13, -1.5 * std::min(0.0, opt.value));
  return phases_at(a, opt.gamma, delta, SectorClass::SemiSectorial);
}

}  // namespace

std::vector<Complex> numerical_range_boundary(const CMatrix& a, int samples) {
  require_square(a, "numerical_range_boundary");
  if (samples < 3) throw std::invalid_argument("numerical_range_boundary: need >= 3 samples");
  const CMatrix h = hermitian_part(a);
  const CMatrix s = skew_hermitian_part(a);
  std::vector<Complex> pts;
  pts.reserve(samples);
  for (int j = 0; j < samples; ++j) {
    const double theta = 2.0 * kPi * j / samples;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(std::cos(theta) * h + std::sin(theta) * s);
    const CVector x = es.eigenvectors().col(a.rows() - 1);  // top eigenvector
    pts.push_back((x.adjoint() * a * x)(0, 0));
  }
  return pts;
}

PhaseSpectrum phases(const CMatrix& a) {
  require_square(a, "phases");
  const Eigen::Index m = a.rows();
  const double sigma = spectral_norm(a);
  if (sigma <= 0.0) {
    PhaseSpectrum spec;
    spec.klass = SectorClass::QuasiSectorial;
    spec.rank = 0;
    return spec;
  }
  const CMatrix an = a / sigma;

  Eigen::JacobiSVD<CMatrix> svd(an, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > kRankTol * sv(0)) ++r;

  if (r == m) {
    PhaseSpectrum spec = full_rank_phases(an);
    spec.rank = r;
    return spec;
  }

  // Singular: phases live on the compression to range(A).  A genuine
  // quasi-/semi-sectorial matrix has a nonsingular compression.
  const CMatrix u = svd.matrixU().leftCols(r);
  const CMatrix c = u.adjoint() * an * u;
  if (numerical_rank(c) < r)
    throw NotSectorial("phases: compression to range(A) is singular");
  PhaseSpectrum spec = full_rank_phases(c);
  spec.rank = r;
  spec.klass = spec.klass == SectorClass::Sectorial ? SectorClass::QuasiSectorial
                                                    : SectorClass::SemiSectorial;
  return spec;
}

SectorClass classify(const CMatrix& a) {
  require_square(a, "classify");
  try {
    return phases(a).klass;
  } catch (const NotSectorial&) {
    return SectorClass::NonSectorial;
  }
}

SectorialFactorization sectorial_factorization(const CMatrix& a) {
  require_square(a, "sectorial_factorization");
  const Eigen::Index m = a.rows();
  const double sigma = spectral_norm(a);
  if (sigma <= 0.0) throw NotSectorial("sectorial_factorization: zero matrix");

  const double fast = lambda_min(hermitian_part(a) / sigma);
  GammaOpt opt{0.0, fast};
  if (fast <= kPdTol) {
    opt = maximize_rotation_margin(a / sigma);
    if (opt.value <= kPdTol) throw NotSectorial("sectorial_factorization: matrix not sectorial");
  }

  const CMatrix b = std::polar(1.0, -opt.gamma) * a;
  Eigen::SelfAdjointEigenSolver<CMatrix> eh(hermitian_part(b));
  const RVector lam = eh.eigenvalues();
  const CMatrix hsqrt = eh.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
                        eh.eigenvectors().adjoint();
  const CMatrix hinv = eh.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() *
                       eh.eigenvectors().adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> em(CMatrix(hinv * skew_hermitian_part(b) * hinv));
  const RVector mu = em.eigenvalues();

  // Order columns so diag(D) arguments come out descending.
  SectorialFactorization f;
  f.t = CMatrix(m, m);
  f.d = CMatrix::Zero(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index src = m - 1 - k;  // ascending mu -> descending phase
    const double scale = std::pow(1.0 + mu(src) * mu(src), 0.25);
    f.t.row(k) = scale * (em.eigenvectors().col(src).adjoint() * hsqrt);
    f.d(k, k) = std::polar(1.0, opt.gamma + std::atan(mu(src)));
  }
  return f;
}

double essential_phase(const RMatrix& laplacian) {
  const Eigen::Index n = laplacian.rows();
  if (n != laplacian.cols()) throw NotLaplacian("essential_phase: matrix not square");
  if (!laplacian.allFinite()) throw NotLaplacian("essential_phase: non-finite entries");
  if (n == 1) {
    if (std::abs(laplacian(0, 0)) > 1e-12) throw NotLaplacian("essential_phase: row sum nonzero");
    return 0.0;
  }

  const double scale = std::max(1.0, laplacian.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(laplacian.row(i).sum()) > 1e-10 * scale)
      throw NotLaplacian("essential_phase: row " + std::to_string(i) + " does not sum to zero");
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && laplacian(i, j) > 1e-12 * scale)
        throw NotLaplacian("essential_phase: positive off-diagonal entry");
  }

  // Strong connectivity for a Laplacian: zero is a simple eigenvalue and the
  // left null vector is strictly positive.
  Eigen::EigenSolver<RMatrix> es(laplacian);
  int zero_count = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(es.eigenvalues()(i)) <= 1e-9 * scale) ++zero_count;
  if (zero_count != 1)
    throw NotStronglyConnected("essential_phase: zero eigenvalue not simple");

  // Inverse iteration on L^T with a tiny shift; the spectral gap makes this
  // converge in a couple of steps.
  RMatrix shifted = laplacian.transpose();
  shifted.diagonal().array() += 1e-12 * scale;
  Eigen::PartialPivLU<RMatrix> lu(shifted);
  RVector v = RVector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (int iter = 0; iter < 50; ++iter) {
    v = lu.solve(v);
    v /= v.norm();
    if ((laplacian.transpose() * v).norm() <= 1e-12 * scale) break;
  }
  if (v.sum() < 0.0) v = -v;
  if (v.minCoeff() <= 1e-10 * v.maxCoeff())
    throw NotStronglyConnected("essential_phase: left null vector not strictly positive");
  v *= static_cast<double>(n) / v.sum();

  const RVector d = v.cwiseSqrt();
  const RMatrix scaled = d.asDiagonal() * laplacian * d.cwiseInverse().asDiagonal();
  const PhaseSpectrum spec = phases(scaled.cast<Complex>());
  return spec.max_phase();
}

}  // namespace palign
