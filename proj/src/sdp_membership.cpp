#include "pibi/sdp.hpp"

#include <cmath>

#include "pibi/optim.hpp"

namespace pibi {

namespace {

constexpr std::array<int, 10> kBasisScalePow = {0, 1, 1, 2, 2, 2, 3, 3, 3, 3};

struct Assembled {
  SdpProblem prob;
  int lambda_index = 0;
  std::map<MomentMonomial, int> index;
};

// Scaled assembly: moments of (S_0/N, S_1/N, Z/N), basis rows divided by
// N^kpow, localizers by N. Keeps every SDP entry O(1) regardless of N.
Assembled assemble(const MomentMatrixSpec& spec, double lambda_cap) {
  Assembled as;
  const double nn = static_cast<double>(spec.n_parties);
  const int nmono = static_cast<int>(spec.monomials.size());
  as.lambda_index = nmono;
  for (int i = 0; i < nmono; ++i) as.index[spec.monomials[static_cast<std::size_t>(i)]] = i;

  auto& prob = as.prob;
  prob.block_dims = {10, 10, 10, 10, 10, 1};
  prob.objective = VecLD::Zero(nmono + 1);
  prob.objective(nmono) = 1;
  prob.f0.resize(6);
  for (int k = 0; k < 5; ++k) prob.f0[static_cast<std::size_t>(k)] = MatLD::Zero(10, 10);
  prob.f0[5] = MatLD::Constant(1, 1, static_cast<ldouble>(lambda_cap));
  prob.fvar.assign(static_cast<std::size_t>(nmono + 1), {});
  for (auto& fv : prob.fvar) {
    fv.resize(6);
    for (int k = 0; k < 5; ++k) fv[static_cast<std::size_t>(k)] = MatLD::Zero(10, 10);
    fv[5] = MatLD::Zero(1, 1);
  }
  prob.fvar[static_cast<std::size_t>(nmono)][5](0, 0) = -1; // cap block: cap - lambda

  for (int blk = 0; blk < 5; ++blk)
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) {
        const int ktot = kBasisScalePow[static_cast<std::size_t>(i)] + kBasisScalePow[static_cast<std::size_t>(j)] +
                         (blk > 0 ? 1 : 0);
        for (const auto& [m, c] : spec.entry(blk, i, j).terms) {
          const double scaled = c * std::pow(nn, m.degree() - ktot);
          if (m.degree() == 0)
            prob.f0[static_cast<std::size_t>(blk)](i, j) += static_cast<ldouble>(scaled);
          else
            prob.fvar[static_cast<std::size_t>(as.index.at(m))][static_cast<std::size_t>(blk)](i, j) +=
                static_cast<ldouble>(scaled);
        }
      }
  return as;
}

// one first-row constraint row: scaled basis poly == lambda * scaled target
void add_first_row(const MomentMatrixSpec& spec, const Assembled& as, int basis_idx, double target_scaled,
                   double weight, MatLD& eq_a, VecLD& eq_b, int row) {
  const double nn = static_cast<double>(spec.n_parties);
  const int kp = kBasisScalePow[static_cast<std::size_t>(basis_idx)];
  for (const auto& [m, c] : spec.basis[static_cast<std::size_t>(basis_idx)].terms) {
    const double scaled = weight * c * std::pow(nn, m.degree() - kp);
    if (m.degree() == 0)
      eq_b(row) -= static_cast<ldouble>(scaled);
    else
      eq_a(row, as.index.at(m)) += static_cast<ldouble>(scaled);
  }
  eq_a(row, as.lambda_index) -= static_cast<ldouble>(weight * target_scaled);
}

MembershipResult run_membership(const MomentMatrixSpec& spec, const CorrelatorVector& point,
                                std::optional<std::pair<double, double>> constrain,
                                const MembershipOptions& opts) {
  if (point.max_order < 3) fail(ErrorCode::InvalidArgument, "membership needs K = 3 correlators");
  if (point.n_parties != spec.n_parties) fail(ErrorCode::InvalidArgument, "point/spec N mismatch");
  const double nn = static_cast<double>(spec.n_parties);

  Assembled as = assemble(spec, opts.lambda_cap);
  std::array<double, 9> tgt{};
  for (int i = 1; i <= 9; ++i)
    tgt[static_cast<std::size_t>(i - 1)] = point.values[static_cast<std::size_t>(i - 1)] /
                                           std::pow(nn, kBasisScalePow[static_cast<std::size_t>(i)]);

  const int nvar = static_cast<int>(as.prob.objective.size());
  int rows = constrain ? 6 : 9;
  as.prob.eq_a = MatLD::Zero(rows, nvar);
  as.prob.eq_b = VecLD::Zero(rows);
  if (!constrain) {
    for (int i = 1; i <= 9; ++i)
      add_first_row(spec, as, i, tgt[static_cast<std::size_t>(i - 1)], 1.0, as.prob.eq_a, as.prob.eq_b, i - 1);
  } else {
    const auto [alpha, beta] = *constrain;
    if (std::abs(alpha * alpha + beta * beta - 1.0) > 1e-9)
      fail(ErrorCode::InvalidArgument, "alpha^2 + beta^2 must equal 1");
    for (int i = 1; i <= 5; ++i)
      add_first_row(spec, as, i, tgt[static_cast<std::size_t>(i - 1)], 1.0, as.prob.eq_a, as.prob.eq_b, i - 1);
    const std::array<double, 4> w = {beta * beta * beta, 3 * alpha * beta * beta, 3 * alpha * alpha * beta,
                                     alpha * alpha * alpha};
    for (int t = 0; t < 4; ++t)
      add_first_row(spec, as, 6 + t, tgt[static_cast<std::size_t>(5 + t)], w[static_cast<std::size_t>(t)],
                    as.prob.eq_a, as.prob.eq_b, 5);
  }

  SdpOptions sopts;
  sopts.tol = opts.tol;
  sopts.max_iterations = opts.max_iterations;
  const SdpSolution sol = solve_sdp(as.prob, sopts);
  if (sol.status == SdpStatus::Stalled || sol.status == SdpStatus::MaxIterations)
    fail(ErrorCode::SolverFailure,
         std::string("membership SDP did not converge (status ") + to_string(sol.status) + ")");

  MembershipResult out;
  out.lambda_star = sol.x(as.lambda_index);
  out.eq_duals = sol.eq_duals;
  out.cap_dual = sol.psd_duals[5](0, 0);
  out.stationarity_resid = sol.stationarity_resid;
  out.status = sol.status;
  out.solver_err = sol.err;
  out.iterations = sol.iterations;
  if (constrain) {
    out.constrained = true;
    out.alpha = constrain->first;
    out.beta = constrain->second;
  }
  return out;
}

} // namespace

MembershipResult membership_sdp(const MomentMatrixSpec& spec, const CorrelatorVector& point,
                                const MembershipOptions& opts) {
  return run_membership(spec, point, std::nullopt, opts);
}

MembershipResult constrained_membership_sdp(const MomentMatrixSpec& spec, const CorrelatorVector& point,
                                            double alpha, double beta, const MembershipOptions& opts) {
  return run_membership(spec, point, std::make_pair(alpha, beta), opts);
}

double Certificate::evaluate(const CorrelatorVector& v) const {
  double acc = 1.0;
  for (int i = 0; i < 9; ++i) acc += coeffs[static_cast<std::size_t>(i)] * v.values[static_cast<std::size_t>(i)];
  if (constrained) {
    const double comb = beta * beta * beta * v.values[5] + 3 * alpha * beta * beta * v.values[6] +
                        3 * alpha * alpha * beta * v.values[7] + alpha * alpha * alpha * v.values[8];
    acc += combined_coeff * comb;
  }
  return acc;
}

double Certificate::evaluate(const PartitionCorrelators& pc) const {
  CorrelatorVector v = to_vector(pc);
  return evaluate(v);
}

Certificate extract_certificate(const MembershipResult& res, const MomentMatrixSpec& spec,
                                const CorrelatorVector& point, double vertex_tol) {
  if (res.lambda_star >= 1.0)
    fail(ErrorCode::InvalidArgument, "no separation: lambda* >= 1, the point is not detected as nonlocal");
  if (res.lambda_star <= 0)
    fail(ErrorCode::SolverFailure, "cannot normalize certificate with lambda* <= 0");

  const double nn = static_cast<double>(spec.n_parties);
  Certificate cert;
  cert.n_parties = spec.n_parties;
  cert.lambda_star = res.lambda_star;
  cert.constant_raw = res.lambda_star;
  cert.separated_point = point;
  cert.constrained = res.constrained;
  cert.alpha = res.alpha;
  cert.beta = res.beta;

  // raw valid inequality: lambda* + sum_i nu_i * (S_i / N^k_i) >= 0
  if (!res.constrained) {
    for (int i = 1; i <= 9; ++i)
      cert.coeffs[static_cast<std::size_t>(i - 1)] =
          res.eq_duals(i - 1) / std::pow(nn, kBasisScalePow[static_cast<std::size_t>(i)]) / res.lambda_star;
  } else {
    for (int i = 1; i <= 5; ++i)
      cert.coeffs[static_cast<std::size_t>(i - 1)] =
          res.eq_duals(i - 1) / std::pow(nn, kBasisScalePow[static_cast<std::size_t>(i)]) / res.lambda_star;
    cert.combined_coeff = res.eq_duals(5) / (nn * nn * nn) / res.lambda_star;
  }

  cert.value_at_point = cert.evaluate(point);
  bool first = true;
  for_each_partition(spec.n_parties, [&](const Partition& p) {
    const double v = cert.evaluate(eval_partition_correlators(p, 3));
    if (first || v < cert.min_vertex_value) {
      first = false;
      cert.min_vertex_value = v;
    }
  });
  if (cert.min_vertex_value < -vertex_tol)
    fail(ErrorCode::InvalidCertificate,
         "certificate fails vertex validation (min " + std::to_string(cert.min_vertex_value) +
             "); re-solve at higher precision");
  if (cert.value_at_point >= 0)
    fail(ErrorCode::InvalidCertificate, "certificate does not separate the target point");
  return cert;
}

AlphaBetaOptimum optimize_alpha_beta(const MomentMatrixSpec& spec, const CorrelatorVector& point,
                                     int grid_points, const MembershipOptions& opts) {
  auto lam = [&](double gamma) {
    return constrained_membership_sdp(spec, point, std::sin(gamma), std::cos(gamma), opts).lambda_star;
  };
  // gamma = pi is the gamma = 0 inequality up to overall sign; scan [0, pi)
  const double hi = M_PI * (1.0 - 1.0 / grid_points);
  const GoldenResult r = grid_then_golden(lam, 0.0, hi, grid_points - 1, 1e-6);
  AlphaBetaOptimum out;
  out.gamma = r.x;
  out.alpha = std::sin(r.x);
  out.beta = std::cos(r.x);
  out.lambda_star = r.value;
  out.result = constrained_membership_sdp(spec, point, out.alpha, out.beta, opts);
  return out;
}

DirectionSearch optimize_directions(std::int64_t n_parties, double mu, int starts,
                                    const MembershipOptions& opts) {
  const MomentMatrixSpec spec = build_moment_spec(n_parties);
  const OATParams params{n_parties, mu, 1.0};
  const SymState psi = oat_vector(params);
  const auto tensors = SpinMomentTensors::from_state(n_parties, psi);

  auto point_at = [&](const FourAngles& a) {
    const Direction n = Direction::from_angles(a.phi0, a.theta0);
    const Direction m = Direction::from_angles(a.phi1, a.theta1);
    const auto vals = correlator_expectations(tensors, n, m, 3);
    CorrelatorVector v;
    v.n_parties = n_parties;
    v.max_order = 3;
    for (int i = 0; i < labels_up_to_order(3); ++i) v.values[static_cast<std::size_t>(i)] = vals[static_cast<std::size_t>(i)];
    return v;
  };

  MembershipOptions inner = opts;
  inner.tol = std::max(opts.tol, 1e-8);
  auto objective = [&](const std::vector<double>& x) {
    try {
      return membership_sdp(spec, point_at({x[0], x[1], x[2], x[3]}), inner).lambda_star;
    } catch (const Error&) {
      return opts.lambda_cap; // treat solver hiccups as non-detections during the search
    }
  };

  NelderMeadOptions nm;
  nm.max_iter = 220;
  nm.xtol = 1e-6;
  nm.ftol = 1e-9;
  nm.initial_step = 0.35;
  const auto h = halton_points(starts, 4);
  bool first = true;
  std::vector<double> best_x;
  double best_val = 0;
  for (const auto& pt : h) {
    std::vector<double> x0 = {2 * M_PI * pt[0], M_PI * pt[1], 2 * M_PI * pt[2], M_PI * pt[3]};
    const auto r = nelder_mead(objective, x0, nm);
    if (first || r.value < best_val) {
      first = false;
      best_val = r.value;
      best_x = r.x;
    }
  }
  if (best_val >= 1.0 - 1e-7)
    fail(ErrorCode::NoViolation, "no direction pair with lambda* < 1 found");

  DirectionSearch out;
  out.angles = {best_x[0], best_x[1], best_x[2], best_x[3]};
  out.n = Direction::from_angles(out.angles.phi0, out.angles.theta0);
  out.m = Direction::from_angles(out.angles.phi1, out.angles.theta1);
  out.point = point_at(out.angles);
  out.lambda_star = best_val;
  return out;
}

} // namespace pibi
