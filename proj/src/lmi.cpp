#include "palign/lmi.hpp"

#include <cmath>
#include <limits>

#include "palign/errors.hpp"

namespace palign {
namespace {

// State shared by the barrier iterations.  Variable vector x = (w, t); the
// per-block coefficient for t is -R, so all derivatives use one uniform list.
struct Workspace {
  const std::vector<LmiBlock>* blocks;
  int d = 0;  // number of w variables; x has d + 1 entries
  double radius2 = 0.0;

  CMatrix assemble(int j, const RVector& x) const {
    const LmiBlock& b = (*blocks)[j];
    CMatrix m = b.c - x(d) * b.r;
    for (int l = 0; l < d; ++l)
      if (x(l) != 0.0) m += x(l) * b.f[l];
    return m;
  }

  bool strictly_feasible(const RVector& x) const {
    const double wn2 = x.head(d).squaredNorm();
    if (wn2 >= radius2) return false;
    for (std::size_t j = 0; j < blocks->size(); ++j) {
      Eigen::LLT<CMatrix> llt(assemble(static_cast<int>(j), x));
      if (llt.info() != Eigen::Success) return false;
    }
    return true;
  }

  // f(x) = -theta * t - sum_j logdet(W_j) - log(radius^2 - ||w||^2)
  double value(const RVector& x, double theta) const {
    double f = -theta * x(d);
    for (std::size_t j = 0; j < blocks->size(); ++j) {
      Eigen::LLT<CMatrix> llt(assemble(static_cast<int>(j), x));
      if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
      const auto& l = llt.matrixLLT();
      double logdet = 0.0;
      for (Eigen::Index i = 0; i < l.rows(); ++i) logdet += std::log(l(i, i).real());
      f -= 2.0 * logdet;
    }
    const double slack = radius2 - x.head(d).squaredNorm();
    if (slack <= 0.0) return std::numeric_limits<double>::infinity();
    return f - std::log(slack);
  }

  // Gradient and Hessian of f at a strictly feasible x.
  bool derivatives(const RVector& x, double theta, RVector& grad, RMatrix& hess) const {
    const int n = d + 1;
    grad.setZero(n);
    hess.setZero(n, n);
    grad(d) = -theta;

    std::vector<CMatrix> y(n);
    for (std::size_t j = 0; j < blocks->size(); ++j) {
      const LmiBlock& b = (*blocks)[j];
      Eigen::LLT<CMatrix> llt(assemble(static_cast<int>(j), x));
      if (llt.info() != Eigen::Success) return false;
      const CMatrix inv =
          llt.solve(CMatrix::Identity(b.c.rows(), b.c.cols()));
      for (int l = 0; l < d; ++l) y[l] = inv * b.f[l];
      y[d] = -(inv * b.r);
      for (int l = 0; l < n; ++l) {
        grad(l) -= y[l].trace().real();
        for (int p = l; p < n; ++p) {
          const double v = y[l].cwiseProduct(y[p].transpose()).sum().real();
          hess(l, p) += v;
          hess(p, l) = hess(l, p);
        }
      }
    }

    const RVector w = x.head(d);
    const double slack = radius2 - w.squaredNorm();
    grad.head(d) += 2.0 / slack * w;
    hess.topLeftCorner(d, d) += (2.0 / slack) * RMatrix::Identity(d, d);
    hess.topLeftCorner(d, d) += (4.0 / (slack * slack)) * (w * w.transpose());
    return true;
  }
};

}  // namespace

LmiSolution maximize_margin(const std::vector<LmiBlock>& blocks, int num_vars,
                            const LmiOptions& options) {
  Workspace ws;
  ws.blocks = &blocks;
  ws.d = num_vars;
  ws.radius2 = options.radius * options.radius;

  RVector x = RVector::Zero(num_vars + 1);
  x(num_vars) = -1.0;
  int doublings = 0;
  while (!ws.strictly_feasible(x)) {
    x(num_vars) *= 2.0;
    if (++doublings > 40)
      throw SolverFailure("maximize_margin: no strictly feasible starting point at w = 0");
  }

  RVector grad;
  RMatrix hess;
  bool converged = true;
  for (double theta = 1.0; theta <= options.theta_final; theta *= options.theta_growth) {
    bool stage_done = false;
    for (int iter = 0; iter < options.max_newton_per_stage; ++iter) {
      if (!ws.derivatives(x, theta, grad, hess)) {
        converged = false;
        break;
      }
      Eigen::LDLT<RMatrix> ldlt(hess);
      RVector dx = ldlt.solve(-grad);
      if (!dx.allFinite()) {
        hess.diagonal().array() += 1e-10 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
        dx = Eigen::LDLT<RMatrix>(hess).solve(-grad);
        if (!dx.allFinite()) {
          converged = false;
          break;
        }
      }
      const double decrement2 = -grad.dot(dx);
      if (decrement2 <= options.decrement_tol * (1.0 + std::abs(x(num_vars)))) {
        stage_done = true;
        break;
      }

      const double f0 = ws.value(x, theta);
      double step = 1.0;
      bool moved = false;
      for (int back = 0; back < 50; ++back) {
        const RVector cand = x + step * dx;
        if (ws.strictly_feasible(cand) &&
            ws.value(cand, theta) <= f0 - 1e-4 * step * decrement2) {
          x = cand;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) {
        stage_done = true;  // stalled: the stage optimum is as good as reachable
        break;
      }
    }
    if (!stage_done && !converged) break;
  }

  LmiSolution sol;
  sol.w = x.head(num_vars);
  sol.margin = x(num_vars);
  sol.converged = converged;
  return sol;
}

}  // namespace palign
