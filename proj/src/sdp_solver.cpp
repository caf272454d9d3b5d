#include "pibi/sdp_solver.hpp"

#include <algorithm>
#include <cmath>

#include "pibi/errors.hpp"

namespace pibi {

namespace {

MatLD sym(const MatLD& m) { return 0.5 * (m + m.transpose()); }

// largest step a in [0, 1] keeping X + a dX positive definite (0.98 backoff applied by caller)
ldouble max_step(const std::vector<MatLD>& xs, const std::vector<MatLD>& dxs) {
  ldouble a = 1e30L;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (!dxs[k].allFinite()) return 0;
    Eigen::LLT<MatLD> llt(xs[k]);
    if (llt.info() != Eigen::Success) return 0;
    const MatLD li = llt.matrixL().solve(MatLD::Identity(xs[k].rows(), xs[k].cols()));
    const MatLD m = sym(li * dxs[k] * li.transpose());
    if (!m.allFinite()) return 0;
    Eigen::SelfAdjointEigenSolver<MatLD> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) return 0;
    const ldouble lmin = es.eigenvalues()(0);
    if (lmin < -1e-18L) a = std::min(a, -1 / lmin);
  }
  return std::min(a, ldouble(1));
}

struct LmiResult {
  SdpStatus status;
  VecLD z;
  std::vector<MatLD> y;
  ldouble err, relgap, rp, rd;
  int iterations;
};

// max b . z   s.t.   c[k] - sum_j z_j a[j][k] is PSD per block.
LmiResult solve_lmi(const std::vector<int>& dims, const std::vector<MatLD>& c,
                    const std::vector<std::vector<MatLD>>& a, const VecLD& b, const SdpOptions& opts) {
  const int m = static_cast<int>(b.size());
  const int nb = static_cast<int>(dims.size());
  int ntot = 0;
  for (int d : dims) ntot += d;

  ldouble norm_c = 1e-30L, norm_a = 1e-30L;
  for (const auto& ck : c) norm_c = std::max(norm_c, ck.cwiseAbs().maxCoeff());
  for (const auto& aj : a)
    for (const auto& blk : aj) norm_a = std::max(norm_a, blk.cwiseAbs().maxCoeff());
  const ldouble norm_b = m ? b.cwiseAbs().maxCoeff() : 0;

  std::vector<MatLD> z_mat(static_cast<std::size_t>(nb)), y(static_cast<std::size_t>(nb));
  for (int k = 0; k < nb; ++k) {
    z_mat[static_cast<std::size_t>(k)] = MatLD::Identity(dims[static_cast<std::size_t>(k)], dims[static_cast<std::size_t>(k)]) * 10 * std::max(ldouble(1), norm_c);
    y[static_cast<std::size_t>(k)] = MatLD::Identity(dims[static_cast<std::size_t>(k)], dims[static_cast<std::size_t>(k)]) * 10 * std::max(ldouble(1), norm_b / norm_a);
  }
  VecLD z = VecLD::Zero(m);

  LmiResult best;
  best.status = SdpStatus::MaxIterations;
  best.err = 1e30L;
  best.iterations = 0;

  for (int it = 0; it < opts.max_iterations; ++it) {
    std::vector<MatLD> zi(static_cast<std::size_t>(nb));
    bool ok = true;
    for (int k = 0; k < nb; ++k) {
      Eigen::LLT<MatLD> llt(z_mat[static_cast<std::size_t>(k)]);
      if (llt.info() != Eigen::Success) { ok = false; break; }
      zi[static_cast<std::size_t>(k)] = llt.solve(MatLD::Identity(dims[static_cast<std::size_t>(k)], dims[static_cast<std::size_t>(k)]));
    }
    if (!ok) {
      if (best.status == SdpStatus::MaxIterations) best.status = SdpStatus::Stalled;
      break;
    }

    std::vector<MatLD> rd(static_cast<std::size_t>(nb));
    VecLD rp = b;
    ldouble rd_norm = 0;
    for (int k = 0; k < nb; ++k) {
      MatLD acc = c[static_cast<std::size_t>(k)] - z_mat[static_cast<std::size_t>(k)];
      for (int j = 0; j < m; ++j) acc -= z(j) * a[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      rd[static_cast<std::size_t>(k)] = acc;
      rd_norm = std::max(rd_norm, acc.cwiseAbs().maxCoeff());
    }
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < nb; ++k)
        rp(j) -= (a[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)].array() * y[static_cast<std::size_t>(k)].array()).sum();

    ldouble gap = 0, pobj = 0;
    for (int k = 0; k < nb; ++k) {
      gap += (y[static_cast<std::size_t>(k)].array() * z_mat[static_cast<std::size_t>(k)].array()).sum();
      pobj += (c[static_cast<std::size_t>(k)].array() * y[static_cast<std::size_t>(k)].array()).sum();
    }
    const ldouble mu = gap / ntot;
    const ldouble dobj = b.dot(z);
    const ldouble relgap = std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj));
    const ldouble nrp = rp.norm() / (1 + norm_b);
    const ldouble nrd = rd_norm / (1 + norm_c);
    const ldouble err = std::max({relgap, nrp, nrd});
    if (err < best.err) {
      best.err = err;
      best.relgap = relgap;
      best.rp = nrp;
      best.rd = nrd;
      best.z = z;
      best.y = y;
      best.iterations = it;
    }
    if (err < opts.tol) {
      best.status = SdpStatus::Optimal;
      break;
    }
    if (mu < 1e-16L && err > 100 * best.err) break; // numerical floor reached

    // Schur complement S_ij = tr(A_i Z^-1 A_j Y)
    MatLD schur = MatLD::Zero(m, m);
    std::vector<std::vector<MatLD>> ziay(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
      ziay[static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(nb));
      for (int k = 0; k < nb; ++k)
        ziay[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
            zi[static_cast<std::size_t>(k)] * a[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(k)];
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        ldouble acc = 0;
        for (int k = 0; k < nb; ++k)
          acc += (a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].array() *
                  ziay[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)].array())
                     .sum();
        schur(i, j) = acc;
      }
    Eigen::PartialPivLU<MatLD> lu(schur);

    auto direction = [&](ldouble sigma_mu, const std::vector<MatLD>* wextra) {
      VecLD rhs = b;
      for (int i = 0; i < m; ++i) {
        ldouble acc = 0;
        for (int k = 0; k < nb; ++k) {
          MatLD mk = rd[static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(k)];
          if (wextra) mk += (*wextra)[static_cast<std::size_t>(k)];
          acc += (a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].array() *
                  (zi[static_cast<std::size_t>(k)] * mk).array())
                     .sum();
          acc -= sigma_mu * (a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].array() *
                             zi[static_cast<std::size_t>(k)].array())
                                .sum();
        }
        rhs(i) += acc;
      }
      VecLD dz = lu.solve(rhs);
      std::vector<MatLD> dz_mat(static_cast<std::size_t>(nb)), dy(static_cast<std::size_t>(nb));
      for (int k = 0; k < nb; ++k) {
        MatLD acc = rd[static_cast<std::size_t>(k)];
        for (int j = 0; j < m; ++j) acc -= dz(j) * a[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
        dz_mat[static_cast<std::size_t>(k)] = acc;
        MatLD mk = sigma_mu * MatLD::Identity(dims[static_cast<std::size_t>(k)], dims[static_cast<std::size_t>(k)]) -
                   z_mat[static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(k)] -
                   dz_mat[static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(k)];
        if (wextra) mk -= (*wextra)[static_cast<std::size_t>(k)];
        dy[static_cast<std::size_t>(k)] = sym(zi[static_cast<std::size_t>(k)] * mk);
      }
      return std::make_tuple(dz, dy, dz_mat);
    };

    auto [dz_p, dy_p, dzm_p] = direction(0, nullptr);
    const ldouble ap_p = std::min(ldouble(1), ldouble(opts.step_scale) * max_step(y, dy_p));
    const ldouble ad_p = std::min(ldouble(1), ldouble(opts.step_scale) * max_step(z_mat, dzm_p));
    ldouble gap_aff = 0;
    for (int k = 0; k < nb; ++k)
      gap_aff += ((y[static_cast<std::size_t>(k)] + ap_p * dy_p[static_cast<std::size_t>(k)]).array() *
                  (z_mat[static_cast<std::size_t>(k)] + ad_p * dzm_p[static_cast<std::size_t>(k)]).array())
                     .sum();
    ldouble sigma = gap_aff > 0 ? (gap_aff / gap) : 0;
    sigma = std::clamp(sigma * sigma * sigma, ldouble(1e-14L), ldouble(1));

    std::vector<MatLD> w(static_cast<std::size_t>(nb));
    for (int k = 0; k < nb; ++k)
      w[static_cast<std::size_t>(k)] = dzm_p[static_cast<std::size_t>(k)] * dy_p[static_cast<std::size_t>(k)];
    auto [dz, dy, dzm] = direction(sigma * mu, &w);
    const ldouble ap = std::min(ldouble(1), ldouble(opts.step_scale) * max_step(y, dy));
    const ldouble ad = std::min(ldouble(1), ldouble(opts.step_scale) * max_step(z_mat, dzm));
    if (ap <= 1e-12L && ad <= 1e-12L) {
      best.status = SdpStatus::Stalled;
      break;
    }
    z += ad * dz;
    for (int k = 0; k < nb; ++k) {
      y[static_cast<std::size_t>(k)] += ap * dy[static_cast<std::size_t>(k)];
      z_mat[static_cast<std::size_t>(k)] += ad * dzm[static_cast<std::size_t>(k)];
    }
  }

  if (best.status != SdpStatus::Optimal) {
    if (best.err < opts.tol)
      best.status = SdpStatus::Optimal;
    else if (best.err < 1e4L * opts.tol)
      best.status = SdpStatus::Inaccurate;
  }
  return best;
}

} // namespace

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Inaccurate: return "inaccurate";
    case SdpStatus::Stalled: return "stalled";
    case SdpStatus::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

SdpSolution solve_sdp(const SdpProblem& prob, const SdpOptions& opts) {
  const int n = static_cast<int>(prob.objective.size());
  const int nb = static_cast<int>(prob.block_dims.size());
  const int me = static_cast<int>(prob.eq_a.rows());
  if (me > n) fail(ErrorCode::InvalidArgument, "more equalities than variables");

  // eliminate the equalities: x = xp + B t with B an orthonormal nullspace basis
  VecLD xp;
  MatLD nullsp;
  if (me == 0) {
    xp = VecLD::Zero(n);
    nullsp = MatLD::Identity(n, n);
  } else {
    Eigen::CompleteOrthogonalDecomposition<MatLD> cod(prob.eq_a);
    if (cod.rank() < me) fail(ErrorCode::SolverFailure, "equality constraints are rank deficient");
    xp = cod.solve(prob.eq_b);
    Eigen::HouseholderQR<MatLD> qr(prob.eq_a.transpose());
    const MatLD q = qr.householderQ();
    nullsp = q.rightCols(n - me);
  }
  const int m = static_cast<int>(nullsp.cols());

  std::vector<MatLD> c(static_cast<std::size_t>(nb));
  for (int k = 0; k < nb; ++k) {
    c[static_cast<std::size_t>(k)] = prob.f0[static_cast<std::size_t>(k)];
    for (int i = 0; i < n; ++i)
      c[static_cast<std::size_t>(k)] += xp(i) * prob.fvar[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  }
  std::vector<std::vector<MatLD>> a(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    a[static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(nb));
    for (int k = 0; k < nb; ++k) {
      MatLD acc = MatLD::Zero(prob.block_dims[static_cast<std::size_t>(k)], prob.block_dims[static_cast<std::size_t>(k)]);
      for (int i = 0; i < n; ++i)
        if (nullsp(i, j) != 0) acc -= nullsp(i, j) * prob.fvar[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      a[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = acc;
    }
  }
  const VecLD b = nullsp.transpose() * prob.objective;

  SdpOptions lmi_opts = opts;
  const LmiResult r = solve_lmi(prob.block_dims, c, a, b, lmi_opts);

  SdpSolution sol;
  sol.status = r.status;
  sol.err = static_cast<double>(r.err);
  sol.iterations = r.iterations;
  const VecLD x = xp + nullsp * r.z;
  sol.x = x.cast<double>();
  sol.objective_value = static_cast<double>(prob.objective.dot(x));
  sol.psd_duals.resize(static_cast<std::size_t>(nb));
  for (int k = 0; k < nb; ++k) sol.psd_duals[static_cast<std::size_t>(k)] = r.y[static_cast<std::size_t>(k)].cast<double>();

  // equality multipliers from stationarity: eq_a' nu = objective + t, t_i = tr(F_i Y)
  VecLD t = VecLD::Zero(n);
  for (int i = 0; i < n; ++i) {
    ldouble acc = 0;
    for (int k = 0; k < nb; ++k)
      acc += (prob.fvar[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].array() *
              r.y[static_cast<std::size_t>(k)].array())
                 .sum();
    t(i) = acc;
  }
  if (me > 0) {
    Eigen::CompleteOrthogonalDecomposition<MatLD> cod(MatLD(prob.eq_a.transpose()));
    const VecLD rhs = prob.objective + t;
    const VecLD nu = cod.solve(rhs);
    sol.eq_duals = nu.cast<double>();
    sol.stationarity_resid = static_cast<double>((prob.eq_a.transpose() * nu - rhs).norm());
  } else {
    sol.eq_duals = Eigen::VectorXd::Zero(0);
    sol.stationarity_resid = static_cast<double>((prob.objective + t).norm());
  }
  return sol;
}

} // namespace pibi
