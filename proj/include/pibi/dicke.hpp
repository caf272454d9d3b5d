#ifndef PIBI_DICKE_HPP
#define PIBI_DICKE_HPP

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "pibi/families.hpp"

namespace pibi {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SymState = Vector; // N+1 Dicke amplitudes, unit norm

/// Fully symmetric (Dicke) sector of N qubits: dimension N+1, total spin N/2.
/// Basis ordered from m = +j down to m = -j.
struct DickeSpace {
  std::int64_t n_parties = 0;

  int dim() const { return static_cast<int>(n_parties) + 1; }
  double total_spin() const { return 0.5 * static_cast<double>(n_parties); }
};

struct Direction {
  double x = 0, y = 0, z = 1;

  static Direction from_angles(double phi, double theta);
  static Direction unit(double x, double y, double z);
  double dot(const Direction& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const;
  bool in_xz_plane() const { return y == 0.0; }
};

Matrix spin_axis_matrix(DickeSpace space, char axis); // 'x', 'y', 'z'
Matrix spin_matrix(DickeSpace space, const Direction& dir);

/// Symmetric-sector operator whose expectation value is the PI correlator S_w
/// for measurement directions (n, m) shared by all parties.
Matrix correlator_operator(DickeSpace space, CorrelatorLabel lab, const Direction& n, const Direction& m);

struct BellOperatorSym {
  DickeSpace space;
  Matrix matrix;
  std::string family;
  Direction n, m;
};

BellOperatorSym bell_operator(const InequalityFamily& f, DickeSpace space, const Direction& n,
                              const Direction& m);

std::pair<double, Vector> min_eigenvalue(const Matrix& hermitian);

/// Smallest eigenvalue of the Bell operator restricted to the symmetric
/// sector, for the standard planar setting n = z, m = (sin t, 0, cos t).
/// Uses a banded real solver, so it stays cheap up to N ~ thousands.
double planar_min_eigenvalue(const InequalityFamily& f, std::int64_t n_parties, double theta);

struct ThetaOptimum {
  double theta = 0;
  double q_v = 0;   // min over theta of the smallest eigenvalue
  double ratio = 0; // q_v / constant(N)
};

ThetaOptimum optimize_theta(const InequalityFamily& f, std::int64_t n_parties, int grid_points = 720,
                            double xtol = 1e-8);

inline constexpr std::int64_t kFullSpaceLimit = 10;

/// All 14 correlator operators on the full 2^N qubit space, built as sums over
/// ordered index tuples of single-qubit tensor factors (no collective-spin
/// identities involved; this is the independent oracle).
std::vector<Matrix> full_space_label_operators(std::int64_t n_parties, const Direction& n,
                                               const Direction& m);

double full_space_min_eigenvalue(const InequalityFamily& f, std::int64_t n_parties, const Direction& n,
                                 const Direction& m);
double full_space_min_eigenvalue(const InequalityFamily& f, std::int64_t n_parties,
                                 const std::vector<Matrix>& label_ops);

} // namespace pibi

#endif
