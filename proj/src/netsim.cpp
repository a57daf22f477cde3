#include "palign/netsim.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "palign/alignment.hpp"
#include "palign/errors.hpp"

namespace palign {
namespace {

// Floor on the weakest loop gain during controller rescaling; caps the
// scale factor at 1e6.
constexpr double kGainFloor = 1e-6;

double smallest_singular_value(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues().minCoeff();
}

// Max pairwise distance between stacked 2-vector outputs.
double max_pairwise_gap(const CVector& state) {
  const int n = static_cast<int>(state.size()) / 2;
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      worst = std::max(worst, (state.segment<2>(2 * i) - state.segment<2>(2 * j)).norm());
  return worst;
}

}  // namespace

void validate_network(const AgentNetwork& net) {
  const int n = net.size();
  if (net.l.rows() != net.l.cols()) throw NonSquare("network Laplacian must be square");
  if (net.l.rows() != n)
    throw DimensionMismatch("network has " + std::to_string(n) + " gain matrices but a " +
                            std::to_string(net.l.rows()) + "-vertex Laplacian");
  if (static_cast<int>(net.assignment.size()) != n)
    throw DimensionMismatch("assignment must name a cluster for every agent");

  const double scale = std::max(1.0, net.l.cwiseAbs().maxCoeff());
  for (int i = 0; i < n; ++i) {
    if (std::abs(net.l.row(i).sum()) > 1e-10 * scale) throw NotLaplacian("row sums must vanish");
    for (int j = 0; j < n; ++j)
      if (i != j && net.l(i, j) > 1e-12 * scale)
        throw NotLaplacian("off-diagonal entries must be nonpositive");
  }

  for (const auto& gain : net.m)
    if (gain.rows() != 2 || gain.cols() != 2)
      throw DimensionMismatch("agent gains must be 2x2");
  for (const auto& k : net.controllers)
    if (k.rows() != 2 || k.cols() != 2)
      throw DimensionMismatch("controllers must be 2x2");
  for (const int c : net.assignment)
    if (c < 0 || c >= static_cast<int>(net.controllers.size()))
      throw DimensionMismatch("assignment points to a missing controller");
}

RMatrix random_strongly_connected_laplacian(int n, double density, Rng& rng) {
  if (n < 2) throw std::invalid_argument("topology needs at least two agents");
  if (!(density > 0.0 && density <= 1.0))
    throw std::invalid_argument("edge density must lie in (0, 1]");

  RMatrix l = RMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) l(i, (i + 1) % n) = -(1.0 - uniform01(rng));  // ring backbone
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j == i || j == (i + 1) % n) continue;
      if (uniform01(rng) < density) l(i, j) = -(1.0 - uniform01(rng));
    }
  for (int i = 0; i < n; ++i) {
    l(i, i) = 0.0;
    l(i, i) = -l.row(i).sum();
  }
  return l;
}

std::vector<CMatrix> synthesize_controllers(const Partition& partition, const MatrixSet& set) {
  std::vector<CMatrix> controllers;
  controllers.reserve(partition.clusters.size());

  for (const auto& cluster : partition.clusters) {
    const auto& cert = cluster.certificate;
    if (cert.k.size() == 0)
      throw MissingCertificate("cluster has no alignment certificate to build from");

    MatrixSet sub;
    sub.reserve(cluster.members.size());
    for (const int v : cluster.members) sub.push_back(set.at(static_cast<std::size_t>(v)));
    if (!verify_certificate(sub, cert))
      throw MissingCertificate("cluster certificate failed re-verification");

    double weakest = std::numeric_limits<double>::infinity();
    for (const auto& member : sub)
      weakest = std::min(weakest, smallest_singular_value(member * cert.k));
    controllers.push_back(cert.k / std::max(kGainFloor, weakest));
  }
  return controllers;
}

AgentNetwork assemble_network(const MatrixSet& set, const RMatrix& l,
                              const Partition& partition) {
  AgentNetwork net;
  net.m = set;
  net.l = l;
  net.assignment.assign(set.size(), -1);
  for (std::size_t c = 0; c < partition.clusters.size(); ++c)
    for (const int v : partition.clusters[c].members)
      net.assignment.at(static_cast<std::size_t>(v)) = static_cast<int>(c);
  net.controllers = synthesize_controllers(partition, set);
  validate_network(net);
  return net;
}

SimTrace simulate_closed_loop(const AgentNetwork& net, const CVector& x0, double dt,
                              double horizon) {
  validate_network(net);
  if (!(dt > 0.0)) throw std::invalid_argument("step size must be positive");
  if (!(horizon >= dt)) throw std::invalid_argument("horizon must cover at least one step");
  const int n = net.size();
  if (x0.size() != 2 * n)
    throw DimensionMismatch("initial state needs two entries per agent");

  // A = -blockdiag(M_i K_a(i)) (L (x) I2)
  CMatrix a = CMatrix::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    const CMatrix loop =
        net.m[static_cast<std::size_t>(i)] *
        net.controllers[static_cast<std::size_t>(net.assignment[static_cast<std::size_t>(i)])];
    for (int j = 0; j < n; ++j)
      a.block<2, 2>(2 * i, 2 * j) = -net.l(i, j) * loop;
  }

  const int steps = static_cast<int>(std::floor(horizon / dt + 1e-9));
  SimTrace trace;
  trace.times.reserve(static_cast<std::size_t>(steps) + 1);
  trace.states.reserve(static_cast<std::size_t>(steps) + 1);

  CVector y = x0;
  trace.times.push_back(0.0);
  trace.states.push_back(y);
  for (int k = 1; k <= steps; ++k) {
    const CVector k1 = a * y;
    const CVector k2 = a * (y + (0.5 * dt) * k1);
    const CVector k3 = a * (y + (0.5 * dt) * k2);
    const CVector k4 = a * (y + dt * k3);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (!y.allFinite() || y.cwiseAbs().maxCoeff() > kDivergeLimit)
      throw Diverged("state exceeded " + std::to_string(kDivergeLimit) + " at t = " +
                     std::to_string(k * dt));
    trace.times.push_back(k * dt);
    trace.states.push_back(y);
  }
  trace.sync_error = sync_error_series(trace);
  return trace;
}

std::vector<double> sync_error_series(const SimTrace& trace) {
  std::vector<double> series;
  series.reserve(trace.states.size());
  for (const auto& state : trace.states) series.push_back(max_pairwise_gap(state));
  return series;
}

}  // namespace palign
