#ifndef PIBI_SDP_HPP
#define PIBI_SDP_HPP

#include <map>
#include <optional>

#include "pibi/oat.hpp"
#include "pibi/sdp_solver.hpp"

namespace pibi {

/// Monomial S_0^p S_1^q Z^r of the reduced coordinates, total degree <= 7.
struct MomentMonomial {
  int p = 0, q = 0, r = 0;

  int degree() const { return p + q + r; }
  auto operator<=>(const MomentMonomial&) const = default;
};

inline constexpr int kMomentMaxDegree = 7;

/// Polynomial in (S_0, S_1, Z) with N already substituted as a constant.
struct ReducedPolynomial {
  std::map<MomentMonomial, double> terms; // canonical: no zero coefficients

  static ReducedPolynomial constant(double c);
  static ReducedPolynomial variable(int which); // 0 -> S_0, 1 -> S_1, 2 -> Z

  ReducedPolynomial& add(const ReducedPolynomial& o, double factor = 1.0);
  ReducedPolynomial times(const ReducedPolynomial& o) const; // DegreeOverflow beyond 7
  double eval(double s0, double s1, double z) const;
  bool is_zero() const { return terms.empty(); }
  int degree() const;
};

/// Polynomial in the order-<=3 correlator symbols (inputs to reduce_mod_ideal).
struct CorrPolynomial {
  // exponent vector over labels 0,1,00,01,11,000,001,011,111
  using Monomial = std::array<int, 9>;
  std::map<Monomial, double> terms;

  static CorrPolynomial constant(double c);
  static CorrPolynomial symbol(CorrelatorLabel lab);
  CorrPolynomial& add(const CorrPolynomial& o, double factor = 1.0);
  CorrPolynomial times(const CorrPolynomial& o) const;
};

/// Substitutes every correlator symbol by its ideal representative, i.e. its
/// polynomial in (S_0, S_1, Z) on the local deterministic variety.
ReducedPolynomial reduce_mod_ideal(const CorrPolynomial& expr, std::int64_t n_parties);

/// The reduced form of one basis element (1, S_0, ..., S_111).
ReducedPolynomial basis_polynomial(int index, std::int64_t n_parties);
/// g_i >= 0 localizers reducing to a, b, c, d (i = 0..3).
ReducedPolynomial localizer_polynomial(int index, std::int64_t n_parties);

/// First moment-SDP level: Gamma_0 = b b^T and four localizing blocks
/// g_i b b^T, all entries reduced mod the ideal; 5 blocks of 10x10.
struct MomentMatrixSpec {
  std::int64_t n_parties = 0;
  std::array<ReducedPolynomial, 10> basis;
  std::array<ReducedPolynomial, 4> localizers;
  // entry(block, i, j), symmetric in (i, j)
  std::vector<ReducedPolynomial> entries; // 5 * 10 * 10, row-major
  std::vector<MomentMonomial> monomials;  // distinct non-constant monomials, sorted
  int max_degree = 0;

  const ReducedPolynomial& entry(int block, int i, int j) const {
    return entries[static_cast<std::size_t>(block * 100 + i * 10 + j)];
  }
};

MomentMatrixSpec build_moment_spec(std::int64_t n_parties);

struct MembershipOptions {
  double lambda_cap = 2.0;
  double tol = 1e-10;
  int max_iterations = 120;
};

struct MembershipResult {
  double lambda_star = 0;
  Eigen::VectorXd eq_duals; // one per first-row constraint (9, or 6 when constrained)
  double cap_dual = 0;
  double stationarity_resid = 0;
  SdpStatus status = SdpStatus::Stalled;
  double solver_err = 1;
  int iterations = 0;
  bool constrained = false;
  double alpha = 0, beta = 0;
};

/// max lambda s.t. the linearized moment matrix is PSD and its first row
/// matches lambda * point. Decides membership of the scaled point ray.
MembershipResult membership_sdp(const MomentMatrixSpec& spec, const CorrelatorVector& point,
                                const MembershipOptions& opts = {});

/// Variant with the four third-order first-row constraints replaced by the
/// single combined constraint of the one-third-moment ansatz.
MembershipResult constrained_membership_sdp(const MomentMatrixSpec& spec, const CorrelatorVector& point,
                                            double alpha, double beta, const MembershipOptions& opts = {});

struct Certificate {
  std::int64_t n_parties = 0;
  double lambda_star = 0;
  // normalized inequality: 1 + sum_i coeffs[i] S_i (+ combined) >= 0
  std::array<double, 9> coeffs{};
  bool constrained = false;
  double alpha = 0, beta = 0;
  double combined_coeff = 0; // multiplies beta^3 S_000 + 3ab^2 S_001 + 3a^2b S_011 + a^3 S_111
  double constant_raw = 0;   // certificate constant before c_0 = 1 normalization (= lambda*)
  CorrelatorVector separated_point;
  double value_at_point = 0;
  double min_vertex_value = 0;

  double evaluate(const CorrelatorVector& v) const;
  double evaluate(const PartitionCorrelators& pc) const;
};

/// Reads the dual multipliers into a PIBI, then validates it exhaustively on
/// all partition vertices; InvalidCertificate beyond tolerance.
Certificate extract_certificate(const MembershipResult& res, const MomentMatrixSpec& spec,
                                const CorrelatorVector& point, double vertex_tol = 1e-7);

struct AlphaBetaOptimum {
  double alpha = 0, beta = 0, gamma = 0;
  double lambda_star = 0;
  MembershipResult result;
};

/// 1-D scan of (alpha, beta) = (sin g, cos g) over [0, pi) plus golden-section
/// refinement of min lambda.
AlphaBetaOptimum optimize_alpha_beta(const MomentMatrixSpec& spec, const CorrelatorVector& point,
                                     int grid_points = 180, const MembershipOptions& opts = {});

struct DirectionSearch {
  Direction n, m;
  FourAngles angles;
  CorrelatorVector point;
  double lambda_star = 0;
};

/// Outer derivative-free search over measurement direction pairs for the OAT
/// state, inner membership SDP; NoViolation when lambda* >= 1 everywhere.
DirectionSearch optimize_directions(std::int64_t n_parties, double mu, int starts = 8,
                                    const MembershipOptions& opts = {});

} // namespace pibi

#endif
