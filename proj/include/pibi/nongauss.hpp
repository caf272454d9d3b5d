#ifndef PIBI_NONGAUSS_HPP
#define PIBI_NONGAUSS_HPP

#include "pibi/dicke.hpp"

namespace pibi {

/// <j1 m1; j2 m2 | J M>. Exact-rational Racah sum under the hood, so it stays
/// accurate for the large multipole ranks a Wigner decomposition needs.
/// Selection-rule violations return 0.
double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M);

/// Gauss-Legendre x uniform-phi product grid on the sphere.
struct SphereGrid {
  std::vector<double> theta;        // nodes
  std::vector<double> theta_weight; // GL weights in cos(theta)
  std::vector<double> phi;          // uniform, weight 2*pi/n_phi each

  static SphereGrid build(int n_theta, int n_phi);
  double phi_weight() const { return 2 * M_PI / static_cast<double>(phi.size()); }
};

/// rho_kq = Tr(rho T_kq^dagger), k = 0..2j.
struct MultipoleDecomposition {
  int two_j = 0;
  std::vector<std::complex<double>> rho; // packed k^2 + (q + k)

  std::complex<double> at(int k, int q) const { return rho[static_cast<std::size_t>(k * k + q + k)]; }

  static MultipoleDecomposition from_state(const SymState& psi);
  static MultipoleDecomposition from_density(const Matrix& density);
};

/// W(theta, phi) with the kernel normalized so (2j+1)/(4pi) * Integral W = Tr(rho).
Eigen::MatrixXd wigner_function(const MultipoleDecomposition& mp, const SphereGrid& grid);

/// (2j+1)/(4pi) quadrature of W (should be 1 for unit trace).
double wigner_normalization(const Eigen::MatrixXd& field, const SphereGrid& grid, int two_j);

/// Doubled volume of the negative part; grid-doubling refinement until the
/// change drops below tol, NonConvergence after max_refinements doublings.
double wigner_negativity(const SymState& psi, double tol = 1e-3, int max_refinements = 4);
double wigner_negativity(const MultipoleDecomposition& mp, double tol = 1e-3, int max_refinements = 4);

struct KurtosisResult {
  double value = 0;
  Direction direction;
};

/// Excess kurtosis of the collective spin along a direction; optionally
/// minimized over the sphere (64x64 grid + local refinement).
double excess_kurtosis_along(const SymState& psi, const Direction& dir);
KurtosisResult excess_kurtosis(const SymState& psi, bool optimize);

} // namespace pibi

#endif
