#pragma once

#include <vector>

#include "palign/types.hpp"

namespace palign {

// Classification of a square matrix by where its numerical range
// W(A) = { x* A x : ||x|| = 1 } sits relative to the origin.
//
//   Sectorial:     W(A) lies in an open half-plane whose boundary excludes 0.
//   QuasiSectorial: 0 is a sharp point of W(A) (A singular, aperture < pi).
//   SemiSectorial: W(A) touches 0 with a supporting tangent line.
//   NonSectorial:  0 lies in the interior of W(A); phases are undefined.
enum class SectorClass { Sectorial, QuasiSectorial, SemiSectorial, NonSectorial };

// Canonical phases of a (quasi-/semi-)sectorial matrix: the arguments of the
// unimodular diagonal in the congruence A = T* D T, sorted descending.
// For singular matrices the phases are those of the compression to range(A),
// so phases.size() == rank.
struct PhaseSpectrum {
  std::vector<double> phases;  // descending
  double center = 0.0;         // rotation angle used during computation
  SectorClass klass = SectorClass::Sectorial;
  int rank = 0;

  double max_phase() const { return phases.empty() ? 0.0 : phases.front(); }
  double min_phase() const { return phases.empty() ? 0.0 : phases.back(); }
  double span() const { return phases.empty() ? 0.0 : phases.front() - phases.back(); }
};

// Congruence factorization A = T* D T with D unimodular diagonal.
struct SectorialFactorization {
  CMatrix t;  // invertible
  CMatrix d;  // diagonal, |d_kk| = 1, arguments descending
};

// Boundary points of W(A): for k direction angles, the extreme point of W(A)
// in direction theta_j = 2*pi*j/k.  Listed in angular order; for any A they
// trace the convex boundary (repeated points are possible on flat edges).
std::vector<Complex> numerical_range_boundary(const CMatrix& a, int samples);

// Classify A against the sector taxonomy above.  Throws NonSquare.
SectorClass classify(const CMatrix& a);

// Canonical phases.  Requires classify(a) != NonSectorial; throws NotSectorial
// otherwise.  The zero matrix yields an empty spectrum of rank 0.
PhaseSpectrum phases(const CMatrix& a);

// A = T* D T for sectorial A.  Throws NotSectorial unless classify(a) is
// Sectorial.  diag(D) arguments are the phases, descending.
SectorialFactorization sectorial_factorization(const CMatrix& a);

// Largest phase of the scaled Laplacian V^{1/2} L V^{-1/2}, where v > 0 is the
// left null vector of L.  Throws NotLaplacian / NotStronglyConnected.
double essential_phase(const RMatrix& laplacian);

}  // namespace palign
