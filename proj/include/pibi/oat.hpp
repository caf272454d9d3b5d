#ifndef PIBI_OAT_HPP
#define PIBI_OAT_HPP

#include <optional>

#include "pibi/dicke.hpp"

namespace pibi {

/// One-axis-twisting state parameters: |Phi(mu)> evolved from a coherent state
/// along x, optionally mixed with white noise on the symmetric sector.
struct OATParams {
  std::int64_t n_parties = 2;
  double mu = 0;       // in [0, 2*pi)
  double eta = 1.0;    // purity in [0, 1]
};

SymState oat_vector(const OATParams& params);

/// Closed-form <S_u^order> on the pure OAT state (orders 1..4).
double closed_form_moment(const OATParams& params, const Direction& u, int order);

/// Cartesian moment tensors <S_a S_b ...> of a symmetric-sector state, up to
/// fourth order. Everything downstream (correlator points, Bell values) is a
/// contraction of these with the measurement directions.
struct SpinMomentTensors {
  std::int64_t n_parties = 0;
  std::array<std::complex<double>, 3> t1{};
  std::array<std::complex<double>, 9> t2{};
  std::array<std::complex<double>, 27> t3{};
  std::array<std::complex<double>, 81> t4{};

  static SpinMomentTensors from_state(std::int64_t n_parties, const SymState& psi);
  /// Tr(S_a S_b ...)/(N+1): the moment tensors of the maximally mixed state.
  static const SpinMomentTensors& maximally_mixed(std::int64_t n_parties);
};

/// All correlators S_w up to order K from moment tensors.
std::array<double, kMaxLabels> correlator_expectations(const SpinMomentTensors& t, const Direction& n,
                                                       const Direction& m, int max_order);

/// Correlator point of the (pure) OAT state; single-direction labels use the
/// closed forms, mixed labels the Dicke-basis moment tensors.
CorrelatorVector correlator_point(const OATParams& params, const Direction& n, const Direction& m, int max_order);

struct FourAngles {
  double phi0 = 0, theta0 = 0, phi1 = 0, theta1 = 0;
};

double bell_value(const InequalityFamily& f, const OATParams& params, const FourAngles& angles);
/// Same, reusing precomputed pure-state tensors (the mu-independent trace part
/// is cached internally).
double bell_value(const InequalityFamily& f, const SpinMomentTensors& pure, double eta, const FourAngles& angles);

struct AngleOptimum {
  FourAngles angles;
  double value = 0;
  double ratio = 0;
};

/// Multi-start derivative-free minimum of bell_value over the four angles,
/// deterministic (Halton starts).
AngleOptimum optimize_angles(const InequalityFamily& f, const OATParams& params, int starts = 24);
AngleOptimum optimize_angles(const InequalityFamily& f, const SpinMomentTensors& pure, std::int64_t n_parties,
                             double eta, int starts = 24);

/// Minimum purity eta at which f is still violated at interaction mu, or
/// nullopt when even the pure state does not violate. Bisection with per-eta
/// angle re-optimization, then a secant polish on the exactly-linear eta
/// dependence.
std::optional<double> min_purity(const InequalityFamily& f, std::int64_t n_parties, double mu,
                                 double eta_tol = 1e-4);

} // namespace pibi

#endif
