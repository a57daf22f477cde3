#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "palign/phases.hpp"
#include "palign/types.hpp"

namespace palign {

// Witness that one right factor K simultaneously brings every member's product
// A_i K into the phase band [-alpha, alpha] while preserving rank(A_i).
struct AlignmentCertificate {
  CMatrix k;  // n x m
  double alpha = 0.0;
  std::vector<PhaseSpectrum> achieved;  // phases of A_i K, one per member
  bool ranks_preserved = true;
};

struct DiversityResult {
  double value = 0.0;  // in [0, pi/2]
  std::optional<AlignmentCertificate> certificate;  // valid at `value`; empty when pi/2
};

// Searches for an alignment certificate at the given band half-width.
// All members must share dimensions m x n with m <= n; throws
// DimensionMismatch otherwise, SolverFailure if the backend breaks down.
// Returns nullopt when no certificate is found (treated as infeasible).
std::optional<AlignmentCertificate> align_feasibility(const MatrixSet& set, double alpha);

// Builds a certificate from a given right factor by recomputation: product
// phases, rank preservation, and the band bound (with the standard phase
// slack) are all checked fresh.  nullopt when K does not witness alpha.
std::optional<AlignmentCertificate> certify_with(const MatrixSet& set, const CMatrix& k,
                                                 double alpha);

// Recomputes everything from set + certificate.k; nothing in the certificate
// is trusted except the factor and the claimed alpha.
bool verify_certificate(const MatrixSet& set, const AlignmentCertificate& cert);

// Smallest feasible band half-width, located by bisection down to a bracket of
// width kTolDiv; returns the feasible upper end of the final bracket.  Value
// pi/2 (with no certificate) means no tested alpha below pi/2 was feasible.
DiversityResult diversity(const MatrixSet& set);

// Feasibility queries over subsets of a fixed matrix family at a fixed alpha.
// Implementations are deterministic and safe for concurrent use.
class FeasibilityOracle {
 public:
  virtual ~FeasibilityOracle() = default;
  virtual double alpha() const = 0;
  virtual int family_size() const = 0;
  virtual const MatrixSet& family() const = 0;
  virtual std::optional<AlignmentCertificate> feasible(const std::vector<int>& members) = 0;
  virtual double subset_diversity(const std::vector<int>& members) = 0;
  virtual std::uint64_t query_count() const = 0;
};

// Oracle backed by align_feasibility with a shared memo.  Cache keys quantize
// alpha downward in steps of kAlphaQuantum, so a cache hit is always valid at
// the requested alpha (feasibility is monotone in alpha) at the cost of being
// conservative by less than one quantum.
class LmiFeasibilityOracle final : public FeasibilityOracle {
 public:
  LmiFeasibilityOracle(MatrixSet family, double alpha);

  double alpha() const override { return alpha_; }
  int family_size() const override { return static_cast<int>(family_.size()); }
  const MatrixSet& family() const override { return family_; }
  std::optional<AlignmentCertificate> feasible(const std::vector<int>& members) override;
  double subset_diversity(const std::vector<int>& members) override;
  std::uint64_t query_count() const override { return queries_.load(); }

 private:
  using Key = std::pair<std::vector<int>, long>;

  std::optional<AlignmentCertificate> query(const std::vector<int>& members, double alpha);
  MatrixSet subset(const std::vector<int>& members) const;

  MatrixSet family_;
  double alpha_;
  std::map<Key, std::shared_ptr<const std::optional<AlignmentCertificate>>> feas_cache_;
  std::map<std::vector<int>, double> div_cache_;
  std::shared_mutex mutex_;
  std::atomic<std::uint64_t> queries_{0};
};

// Closed-form oracle for families of 1x1 members: a subset is alignable at
// alpha iff the minimal arc enclosing the member arguments has half-width
// <= alpha, and the optimal factor is the unit rotation onto the arc midpoint.
class ScalarSectorOracle final : public FeasibilityOracle {
 public:
  ScalarSectorOracle(MatrixSet family, double alpha);

  double alpha() const override { return alpha_; }
  int family_size() const override { return static_cast<int>(family_.size()); }
  const MatrixSet& family() const override { return family_; }
  std::optional<AlignmentCertificate> feasible(const std::vector<int>& members) override;
  double subset_diversity(const std::vector<int>& members) override;
  std::uint64_t query_count() const override { return queries_.load(); }

  // Half-width of the minimal enclosing arc and its midpoint, zero members
  // skipped.  Exposed for tests; width pi/2 or more means never alignable.
  std::pair<double, double> enclosing_arc(const std::vector<int>& members) const;

 private:
  MatrixSet family_;
  double alpha_;
  std::vector<double> args_;   // argument per member; zero members hold 0
  std::vector<bool> is_zero_;
  std::atomic<std::uint64_t> queries_{0};
};

}  // namespace palign
