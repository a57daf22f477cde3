#pragma once

#include <vector>

#include "palign/types.hpp"

namespace palign {

// One affine Hermitian constraint:  C + sum_l w_l F[l]  >=  t * R.
// C and every F[l] must be Hermitian; R is Hermitian PSD and nonzero for at
// least one block (otherwise the margin t is unbounded).
struct LmiBlock {
  CMatrix c;
  std::vector<CMatrix> f;
  CMatrix r;
};

struct LmiOptions {
  double radius = 16.0;        // ball constraint ||w||_2 <= radius
  double theta_final = 1e9;    // final objective weight on t (gap ~ dims/theta)
  double theta_growth = 8.0;
  int max_newton_per_stage = 64;
  double decrement_tol = 1e-11;
};

struct LmiSolution {
  RVector w;
  double margin = 0.0;  // achieved t; blocks are strictly feasible at (w, t)
  bool converged = false;
};

// Maximizes t subject to the blocks and the variable ball, via a log-det
// barrier with a Newton inner loop.  Requires a strictly feasible start at
// w = 0 for some t < 0, i.e. every C_j - t R_j > 0 for t negative enough;
// throws SolverFailure otherwise.
LmiSolution maximize_margin(const std::vector<LmiBlock>& blocks, int num_vars,
                            const LmiOptions& options = {});

}  // namespace palign
