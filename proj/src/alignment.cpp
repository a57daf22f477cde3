#include "palign/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "palign/errors.hpp"
#include "palign/lmi.hpp"

namespace palign {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLmiShift = 1e-9;      // diagonal shift on constraint constants
constexpr double kFeasEigTol = 1e-8;    // accepted eigenvalue droop on exact blocks
constexpr double kAlphaFloor = 1e-6;    // solver band floor; covered by kPhaseSlack
constexpr double kAlphaCeil = kPi / 2.0 - 1e-4;

void validate_family(const MatrixSet& set, const char* who) {
  if (set.empty()) throw std::invalid_argument(std::string(who) + ": empty matrix set");
  const Eigen::Index m = set.front().rows();
  const Eigen::Index n = set.front().cols();
  if (m > n)
    throw DimensionMismatch(std::string(who) + ": members must be m x n with m <= n");
  for (const CMatrix& a : set) {
    if (a.rows() != m || a.cols() != n)
      throw DimensionMismatch(std::string(who) + ": members differ in dimension");
    if (!all_finite(a)) throw std::invalid_argument(std::string(who) + ": non-finite entries");
  }
}

struct PreparedMember {
  CMatrix u;     // m x r, orthonormal basis of range(A)
  CMatrix ubar;  // m x (m - r), orthonormal complement
  CMatrix atil;  // r x n, compression u^* A of the normalized member
  int rank = 0;
  bool zero = false;
};

PreparedMember prepare(const CMatrix& a) {
  PreparedMember p;
  const double sigma = spectral_norm(a);
  if (sigma <= 0.0) {
    p.zero = true;
    return p;
  }
  const CMatrix an = a / sigma;
  Eigen::JacobiSVD<CMatrix> svd(an, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > kRankTol * sv(0)) ++r;
  p.rank = r;
  p.u = svd.matrixU().leftCols(r);
  p.ubar = svd.matrixU().rightCols(a.rows() - r);
  p.atil = p.u.adjoint() * an;
  return p;
}

// Real parametrization of K in C^{n x m}: entry (a, b) takes components
// z(2*(a*m+b)) + i z(2*(a*m+b)+1).
CMatrix unvec(const RVector& z, int n, int m) {
  CMatrix k(n, m);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < m; ++b) {
      const int idx = 2 * (a * m + b);
      k(a, b) = Complex(z(idx), z(idx + 1));
    }
  return k;
}

// Null-space basis (orthonormal columns) of the rank-preservation equality
// constraints A_i K (I - range projector) = 0 over all singular members.
RMatrix elimination_basis(const std::vector<PreparedMember>& members, int n, int m) {
  std::vector<Eigen::Index> rows_per;
  Eigen::Index rows = 0;
  for (const auto& p : members)
    if (!p.zero && p.rank < m) rows += 2 * p.rank * (m - p.rank);
  if (rows == 0) return RMatrix::Identity(2 * n * m, 2 * n * m);

  RMatrix eq = RMatrix::Zero(rows, 2 * n * m);
  Eigen::Index row = 0;
  for (const auto& p : members) {
    if (p.zero || p.rank >= m) continue;
    for (int pr = 0; pr < p.rank; ++pr)
      for (int q = 0; q < m - p.rank; ++q) {
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < m; ++b) {
            const Complex c = p.atil(pr, a) * p.ubar(b, q);
            const int idx = 2 * (a * m + b);
            eq(row, idx) += c.real();
            eq(row, idx + 1) -= c.imag();
            eq(row + 1, idx) += c.imag();
            eq(row + 1, idx + 1) += c.real();
          }
        row += 2;
      }
  }

  Eigen::JacobiSVD<RMatrix> svd(eq, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank_eq = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > std::max(1e-12, 1e-10 * sv(0))) ++rank_eq;
  return svd.matrixV().rightCols(2 * n * m - rank_eq);
}

struct BlockSet {
  std::vector<LmiBlock> blocks;
  int num_vars = 0;
};

BlockSet build_blocks(const std::vector<PreparedMember>& members, const RMatrix& basis, int n,
                      int m, double alpha) {
  const double ta = std::tan(alpha);
  const int d = static_cast<int>(basis.cols());
  BlockSet bs;
  bs.num_vars = d;

  std::vector<CMatrix> kl(d);
  for (int l = 0; l < d; ++l) kl[l] = unvec(basis.col(l), n, m);

  for (const auto& p : members) {
    if (p.zero) continue;
    const int r = p.rank;
    LmiBlock lower, upper, schur;
    lower.c = kLmiShift * CMatrix::Identity(r, r);
    upper.c = lower.c;
    lower.r = CMatrix::Identity(r, r);
    upper.r = lower.r;
    schur.c = CMatrix::Zero(r + n, r + n);
    schur.c.topLeftCorner(r, r) = kLmiShift * CMatrix::Identity(r, r);
    schur.c.bottomRightCorner(n, n) = (1.0 + kLmiShift) * CMatrix::Identity(n, n);
    schur.r = CMatrix::Zero(r + n, r + n);
    schur.r.topLeftCorner(r, r) = CMatrix::Identity(r, r);

    lower.f.resize(d);
    upper.f.resize(d);
    schur.f.resize(d);
    for (int l = 0; l < d; ++l) {
      const CMatrix ku = kl[l] * p.u;           // n x r
      const CMatrix prod = p.atil * ku;         // r x r
      const CMatrix h = hermitian_part(prod);
      const CMatrix s = skew_hermitian_part(prod);
      lower.f[l] = ta * h - s;
      upper.f[l] = ta * h + s;
      CMatrix sf = CMatrix::Zero(r + n, r + n);
      sf.topLeftCorner(r, r) = h;
      sf.topRightCorner(r, n) = ku.adjoint();
      sf.bottomLeftCorner(n, r) = ku;
      schur.f[l] = sf;
    }
    bs.blocks.push_back(std::move(lower));
    bs.blocks.push_back(std::move(upper));
    bs.blocks.push_back(std::move(schur));
  }
  return bs;
}

// Exact (unshifted) constraint residual of a candidate factor: the smallest
// eigenvalue across all member blocks, and the rank-constraint defect.
double exact_block_floor(const std::vector<PreparedMember>& members, const CMatrix& k,
                         double alpha, double* eq_residual) {
  const double ta = std::tan(alpha);
  double floor = std::numeric_limits<double>::infinity();
  double eqres = 0.0;
  const int n = static_cast<int>(k.rows());
  for (const auto& p : members) {
    if (p.zero) continue;
    const int r = p.rank;
    const CMatrix ku = k * p.u;
    const CMatrix prod = p.atil * ku;
    const CMatrix h = hermitian_part(prod);
    const CMatrix s = skew_hermitian_part(prod);
    auto lmin = [](const CMatrix& x) {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(x, Eigen::EigenvaluesOnly);
      return es.eigenvalues()(0);
    };
    floor = std::min(floor, lmin(ta * h - s));
    floor = std::min(floor, lmin(ta * h + s));
    CMatrix sb = CMatrix::Zero(r + n, r + n);
    sb.topLeftCorner(r, r) = h;
    sb.topRightCorner(r, n) = ku.adjoint();
    sb.bottomLeftCorner(n, r) = ku;
    sb.bottomRightCorner(n, n) = CMatrix::Identity(n, n);
    floor = std::min(floor, lmin(sb));
    if (r < static_cast<int>(p.ubar.rows()))
      eqres = std::max(eqres, (p.atil * (k * p.ubar)).norm());
  }
  if (eq_residual) *eq_residual = eqres;
  return floor;
}

}  // namespace

std::optional<AlignmentCertificate> align_feasibility(const MatrixSet& set, double alpha) {
  validate_family(set, "align_feasibility");
  if (alpha < 0.0 || alpha >= kPi / 2.0)
    throw std::invalid_argument("align_feasibility: alpha must lie in [0, pi/2)");
  const int m = static_cast<int>(set.front().rows());
  const int n = static_cast<int>(set.front().cols());
  const double alpha_eff = std::clamp(alpha, kAlphaFloor, kAlphaCeil);

  std::vector<PreparedMember> members;
  members.reserve(set.size());
  bool any_nonzero = false;
  for (const CMatrix& a : set) {
    members.push_back(prepare(a));
    any_nonzero = any_nonzero || !members.back().zero;
  }
  if (!any_nonzero) return certify_with(set, CMatrix::Identity(n, m), alpha);

  const RMatrix basis = elimination_basis(members, n, m);
  if (basis.cols() == 0) return std::nullopt;

  const BlockSet bs = build_blocks(members, basis, n, m, alpha_eff);
  LmiOptions opt;
  opt.radius = std::sqrt(static_cast<double>(m)) + 4.0;
  const LmiSolution sol = maximize_margin(bs.blocks, bs.num_vars, opt);
  if (!sol.w.allFinite()) throw SolverFailure("align_feasibility: solver produced non-finite factor");

  const CMatrix k = unvec(basis * sol.w, n, m);
  double eqres = 0.0;
  const double flo = exact_block_floor(members, k, alpha_eff, &eqres);
  if (flo < -kFeasEigTol || eqres > 1e-7) return std::nullopt;
  return certify_with(set, k, alpha);
}

std::optional<AlignmentCertificate> certify_with(const MatrixSet& set, const CMatrix& k,
                                                 double alpha) {
  validate_family(set, "certify_with");
  if (alpha < 0.0 || alpha >= kPi / 2.0) return std::nullopt;
  if (k.rows() != set.front().cols() || k.cols() != set.front().rows()) return std::nullopt;
  if (!all_finite(k)) return std::nullopt;

  AlignmentCertificate cert;
  cert.k = k;
  cert.alpha = alpha;
  cert.achieved.reserve(set.size());
  for (const CMatrix& a : set) {
    const CMatrix prod = a * k;
    if (numerical_rank(prod) != numerical_rank(a)) return std::nullopt;
    PhaseSpectrum spec;
    try {
      spec = phases(prod);
    } catch (const NotSectorial&) {
      return std::nullopt;
    }
    for (const double phi : spec.phases)
      if (std::abs(phi) > alpha + kPhaseSlack) return std::nullopt;
    cert.achieved.push_back(std::move(spec));
  }
  return cert;
}

bool verify_certificate(const MatrixSet& set, const AlignmentCertificate& cert) {
  try {
    return certify_with(set, cert.k, cert.alpha).has_value();
  } catch (const std::invalid_argument&) {  // covers DimensionMismatch
    return false;
  }
}

DiversityResult diversity(const MatrixSet& set) {
  validate_family(set, "diversity");
  const double hi0 = kPi / 2.0 - kTolDiv;
  auto hi_cert = align_feasibility(set, hi0);
  if (!hi_cert) return DiversityResult{kPi / 2.0, std::nullopt};

  auto lo_cert = align_feasibility(set, 0.0);
  if (lo_cert) return DiversityResult{0.0, std::move(lo_cert)};

  double lo = 0.0, hi = hi0;
  DiversityResult out{hi, std::move(hi_cert)};
  while (hi - lo > kTolDiv) {
    const double mid = 0.5 * (lo + hi);
    auto cert = align_feasibility(set, mid);
    if (cert) {
      hi = mid;
      out.value = hi;
      out.certificate = std::move(cert);
    } else {
      lo = mid;
    }
  }
  return out;
}

LmiFeasibilityOracle::LmiFeasibilityOracle(MatrixSet family, double alpha)
    : family_(std::move(family)), alpha_(alpha) {
  validate_family(family_, "LmiFeasibilityOracle");
  if (alpha_ < 0.0 || alpha_ >= kPi / 2.0)
    throw std::invalid_argument("LmiFeasibilityOracle: alpha must lie in [0, pi/2)");
}

MatrixSet LmiFeasibilityOracle::subset(const std::vector<int>& members) const {
  MatrixSet sub;
  sub.reserve(members.size());
  for (const int i : members) {
    if (i < 0 || i >= family_size())
      throw std::out_of_range("LmiFeasibilityOracle: member index out of range");
    sub.push_back(family_[static_cast<std::size_t>(i)]);
  }
  return sub;
}

std::optional<AlignmentCertificate> LmiFeasibilityOracle::query(const std::vector<int>& members,
                                                                double alpha) {
  std::vector<int> sorted = members;
  std::sort(sorted.begin(), sorted.end());
  const long qidx = static_cast<long>(std::floor(alpha / kAlphaQuantum + 1e-9));
  const Key key{sorted, qidx};
  {
    std::shared_lock lock(mutex_);
    auto it = feas_cache_.find(key);
    if (it != feas_cache_.end()) return *it->second;
  }
  queries_.fetch_add(1);
  const double qalpha = static_cast<double>(qidx) * kAlphaQuantum;
  auto result = std::make_shared<const std::optional<AlignmentCertificate>>(
      align_feasibility(subset(sorted), qalpha));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = feas_cache_.emplace(key, result);
  return *it->second;
}

std::optional<AlignmentCertificate> LmiFeasibilityOracle::feasible(
    const std::vector<int>& members) {
  return query(members, alpha_);
}

double LmiFeasibilityOracle::subset_diversity(const std::vector<int>& members) {
  std::vector<int> sorted = members;
  std::sort(sorted.begin(), sorted.end());
  {
    std::shared_lock lock(mutex_);
    auto it = div_cache_.find(sorted);
    if (it != div_cache_.end()) return it->second;
  }

  double value = kPi / 2.0;
  if (query(sorted, kPi / 2.0 - kTolDiv)) {
    if (query(sorted, 0.0)) {
      value = 0.0;
    } else {
      double lo = 0.0, hi = kPi / 2.0 - kTolDiv;
      while (hi - lo > kTolDiv) {
        const double mid = 0.5 * (lo + hi);
        if (query(sorted, mid))
          hi = mid;
        else
          lo = mid;
      }
      value = hi;
    }
  }
  std::unique_lock lock(mutex_);
  auto [it, inserted] = div_cache_.emplace(std::move(sorted), value);
  return it->second;
}

ScalarSectorOracle::ScalarSectorOracle(MatrixSet family, double alpha)
    : family_(std::move(family)), alpha_(alpha) {
  validate_family(family_, "ScalarSectorOracle");
  if (family_.front().rows() != 1 || family_.front().cols() != 1)
    throw DimensionMismatch("ScalarSectorOracle: family members must be 1x1");
  if (alpha_ < 0.0 || alpha_ >= kPi / 2.0)
    throw std::invalid_argument("ScalarSectorOracle: alpha must lie in [0, pi/2)");
  args_.reserve(family_.size());
  is_zero_.reserve(family_.size());
  for (const CMatrix& a : family_) {
    const Complex v = a(0, 0);
    is_zero_.push_back(std::abs(v) == 0.0);
    args_.push_back(is_zero_.back() ? 0.0 : std::arg(v));
  }
}

std::pair<double, double> ScalarSectorOracle::enclosing_arc(
    const std::vector<int>& members) const {
  std::vector<double> th;
  th.reserve(members.size());
  for (const int i : members) {
    if (i < 0 || i >= family_size())
      throw std::out_of_range("ScalarSectorOracle: member index out of range");
    if (!is_zero_[static_cast<std::size_t>(i)]) th.push_back(args_[static_cast<std::size_t>(i)]);
  }
  if (th.empty()) return {0.0, 0.0};
  std::sort(th.begin(), th.end());
  const int k = static_cast<int>(th.size());
  double max_gap = 2.0 * kPi - (th.back() - th.front());
  int after = 0;  // index where the enclosing arc starts
  for (int i = 0; i + 1 < k; ++i) {
    const double gap = th[i + 1] - th[i];
    if (gap > max_gap) {
      max_gap = gap;
      after = i + 1;
    }
  }
  const double width = 2.0 * kPi - max_gap;
  double mid = th[after] + width / 2.0;
  if (mid > kPi) mid -= 2.0 * kPi;
  return {width / 2.0, mid};
}

std::optional<AlignmentCertificate> ScalarSectorOracle::feasible(
    const std::vector<int>& members) {
  queries_.fetch_add(1);
  const auto [half_width, mid] = enclosing_arc(members);
  if (half_width > alpha_ + 1e-12) return std::nullopt;
  MatrixSet sub;
  sub.reserve(members.size());
  for (const int i : members) sub.push_back(family_[static_cast<std::size_t>(i)]);
  CMatrix k(1, 1);
  k(0, 0) = std::polar(1.0, -mid);
  return certify_with(sub, k, alpha_);
}

double ScalarSectorOracle::subset_diversity(const std::vector<int>& members) {
  const auto [half_width, mid] = enclosing_arc(members);
  return std::min(half_width, kPi / 2.0);
}

}  // namespace palign
