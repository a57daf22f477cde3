#pragma once

#include <vector>

#include "palign/cluster_exact.hpp"
#include "palign/rng.hpp"
#include "palign/types.hpp"

namespace palign {

// A closed-loop multi-agent instance: dual-input-dual-output integrator
// agents y_i = (M_i / s) u_i coupled through a directed Laplacian, with one
// static controller per cluster.
struct AgentNetwork {
  std::vector<CMatrix> m;            // per-agent 2x2 integrator gains
  RMatrix l;                         // n x n directed Laplacian
  std::vector<int> assignment;       // agent -> cluster index
  std::vector<CMatrix> controllers;  // per-cluster 2x2 static K

  int size() const { return static_cast<int>(m.size()); }
};

// Shape and Laplacian checks: square real L with zero row sums and
// nonpositive off-diagonals, 2x2 gains, a total assignment, and a controller
// behind every cluster index.  Throws NotLaplacian or DimensionMismatch.
void validate_network(const AgentNetwork& net);

// Fixed-step trajectory record.  states[k] stacks the agent outputs at
// times[k] agent-major: (y_1,1, y_1,2, y_2,1, ...).
struct SimTrace {
  std::vector<double> times;
  std::vector<CVector> states;
  std::vector<double> sync_error;  // max pairwise ||y_i - y_j|| per step
};

// Directed ring (which forces strong connectivity) plus extra edges kept
// with probability `density`, all weights uniform in (0, 1]; diagonals are
// set to the row sums of the off-diagonal magnitudes.  The result satisfies
// every precondition of essential_phase.
RMatrix random_strongly_connected_laplacian(int n, double density, Rng& rng);

// One static controller per cluster, taken from the cluster's certificate
// after re-verification against the member matrices, then positively rescaled
// so the weakest member loop gain sigma_min(M_i K) is 1 (scale capped at
// 1e6).  Positive scaling leaves product phases and ranks untouched, so the
// certificates remain valid.  Throws MissingCertificate.
std::vector<CMatrix> synthesize_controllers(const Partition& partition, const MatrixSet& set);

// Bundles family, topology, and a clustered controller synthesis into a
// ready-to-simulate network.
AgentNetwork assemble_network(const MatrixSet& set, const RMatrix& l,
                              const Partition& partition);

// Integrates ydot = -blockdiag(M_i K_assignment(i)) (L (x) I2) y with
// classical fixed-step RK4, recording every step including t = 0.  Throws
// Diverged once any state magnitude exceeds 1e12.
SimTrace simulate_closed_loop(const AgentNetwork& net, const CVector& x0, double dt = 1e-3,
                              double horizon = 50.0);

// Max pairwise output distance per recorded step; the last entry is the
// synchronization residual.
std::vector<double> sync_error_series(const SimTrace& trace);

}  // namespace palign
