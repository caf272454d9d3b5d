#ifndef PIBI_SDP_SOLVER_HPP
#define PIBI_SDP_SOLVER_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pibi {

// Thin conic-solver layer: small dense SDPs with PSD blocks and linear
// equality constraints. This is the only replaceable backend component of the
// moment-matrix relaxation. Long double throughout; the problems it sees are
// pre-scaled to O(1) entries.

using ldouble = long double;
using MatLD = Eigen::Matrix<ldouble, Eigen::Dynamic, Eigen::Dynamic>;
using VecLD = Eigen::Matrix<ldouble, Eigen::Dynamic, 1>;

/// maximize objective . x
/// subject to  eq_a x = eq_b,
///             f0[k] + sum_i x_i fvar[i][k]  PSD for every block k.
struct SdpProblem {
  std::vector<int> block_dims;
  std::vector<MatLD> f0;
  std::vector<std::vector<MatLD>> fvar; // [variable][block]
  VecLD objective;
  MatLD eq_a;
  VecLD eq_b;
};

enum class SdpStatus { Optimal, Inaccurate, Stalled, MaxIterations };

struct SdpOptions {
  double tol = 1e-10;
  int max_iterations = 100;
  double step_scale = 0.98;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::Stalled;
  Eigen::VectorXd x;
  double objective_value = 0;
  std::vector<Eigen::MatrixXd> psd_duals; // Y blocks (PSD multipliers)
  Eigen::VectorXd eq_duals;               // multipliers of eq_a x = eq_b
  double err = 1;                         // max(relgap, primal, dual residual)
  double stationarity_resid = 0;          // of the recovered equality duals
  int iterations = 0;

  bool acceptable(double tol) const { return err <= tol; }
};

SdpSolution solve_sdp(const SdpProblem& prob, const SdpOptions& opts = {});

const char* to_string(SdpStatus s);

} // namespace pibi

#endif
