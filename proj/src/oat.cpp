#include "pibi/oat.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "pibi/optim.hpp"

namespace pibi {

namespace {

double pow_int(double base, std::int64_t e) {
  if (e >= 0) return std::pow(base, static_cast<double>(e));
  return 1.0 / std::pow(base, static_cast<double>(-e));
}

void check_params(const OATParams& p) {
  if (p.n_parties < 1) fail(ErrorCode::InvalidArgument, "need N >= 1");
  if (p.mu < 0 || p.mu >= 2 * M_PI) fail(ErrorCode::InvalidArgument, "mu must lie in [0, 2*pi)");
  if (p.eta < 0 || p.eta > 1) fail(ErrorCode::InvalidArgument, "eta must lie in [0, 1]");
}

} // namespace

SymState oat_vector(const OATParams& params) {
  check_params(params);
  const std::int64_t n = params.n_parties;
  SymState psi(n + 1);
  for (std::int64_t k = 0; k <= n; ++k) {
    // log-space binomial to stay finite for large N
    const double lb = 0.5 * (std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
                             std::lgamma(static_cast<double>(n - k + 1))) -
                      0.5 * static_cast<double>(n) * std::log(2.0);
    const double half_diff = 0.5 * static_cast<double>(n) - static_cast<double>(k);
    const double phase = -half_diff * half_diff * params.mu / 2.0;
    psi(k) = std::exp(lb) * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return psi;
}

double closed_form_moment(const OATParams& params, const Direction& u, int order) {
  check_params(params);
  const double S = 0.5 * static_cast<double>(params.n_parties);
  const std::int64_t n2 = params.n_parties; // 2S as integer power base
  const double mu = params.mu;
  const double ux = u.x, uy = u.y, uz = u.z;
  switch (order) {
    case 1:
      return S * ux * pow_int(std::cos(mu / 2), n2 - 1);
    case 2:
      return 0.25 * S *
             ((1 + 2 * S) * (ux * ux + uy * uy) + 2 * uz * uz +
              (2 * S - 1) * ((ux - uy) * (ux + uy) * pow_int(std::cos(mu), n2 - 2) +
                             4 * uy * uz * pow_int(std::cos(mu / 2), n2 - 2) * std::sin(mu / 2)));
    case 3: {
      const double t1 =
          ux * pow_int(std::cos(mu / 2), n2 - 3) *
          ((1 - 3 * S + 6 * S * S) * (ux * ux + uy * uy) - 4 * (2 + 3 * (S - 2) * S) * uz * uz +
           2 * ((3 * S - 1) * (ux * ux + uy * uy) + 2 * (1 + 3 * (S - 1) * S) * uz * uz) * std::cos(mu));
      const double t2 = (S - 1) * (2 * S - 1) * ux * (ux * ux - 3 * uy * uy) * pow_int(std::cos(3 * mu / 2), n2 - 3);
      const double t3 = 12 * (S - 1) * (2 * S - 1) * ux * uy * uz * pow_int(std::cos(mu), n2 - 3) * std::sin(mu);
      return 0.125 * S * (t1 + t2 + t3);
    }
    case 4: {
      const double uxy2 = ux * ux + uy * uy;
      const double a = (-1 + S + 12 * S * S + 12 * S * S * S) * uxy2 * uxy2 +
                       8 * S * (-1 + 6 * S) * uxy2 * uz * uz + 8 * (-1 + 3 * S) * uz * uz * uz * uz;
      const double b1 = (S - 1) * (2 * S - 3) * (ux * ux * ux * ux - 6 * ux * ux * uy * uy + uy * uy * uy * uy) *
                        pow_int(std::cos(2 * mu), n2 - 4);
      const double c2m = std::cos(2 * mu);
      const double b2in = ux * ux - 2 * S * ux * ux + 2 * S * S * ux * ux + uy * uy - 2 * S * uy * uy +
                          2 * S * S * uy * uy - 11 * uz * uz + 18 * S * uz * uz - 6 * S * S * uz * uz -
                          2 * ux * ux * c2m + 3 * S * ux * ux * c2m - 2 * uy * uy * c2m + 3 * S * uy * uy * c2m +
                          7 * uz * uz * c2m - 12 * S * uz * uz * c2m + 6 * S * S * uz * uz * c2m;
      const double b2 = 4 * (ux - uy) * (ux + uy) * pow_int(std::cos(mu), n2 - 4) * b2in;
      const double b3 = -8 * (S - 1) * (2 * S - 3) * uy * (-3 * ux * ux + uy * uy) * uz *
                        pow_int(std::cos(3 * mu / 2), n2 - 4) * std::sin(3 * mu / 2);
      const double sh = std::sin(mu / 2), s3h = std::sin(3 * mu / 2);
      const double b4in = 7 * ux * ux * sh - 12 * S * ux * ux * sh + 6 * S * S * ux * ux * sh + 7 * uy * uy * sh -
                          12 * S * uy * uy * sh + 6 * S * S * uy * uy * sh - 11 * uz * uz * sh +
                          18 * S * uz * uz * sh - 6 * S * S * uz * uz * sh - 2 * ux * ux * s3h +
                          3 * S * ux * ux * s3h - 2 * uy * uy * s3h + 3 * S * uy * uy * s3h + uz * uz * s3h -
                          2 * S * uz * uz * s3h + 2 * S * S * uz * uz * s3h;
      const double b4 = 8 * uy * uz * pow_int(std::cos(mu / 2), n2 - 4) * b4in;
      return (1.0 / 32) * S * (a + (2 * S - 1) * (b1 + b2 + b3 + b4));
    }
    default:
      fail(ErrorCode::InvalidArgument, "moment order must be 1..4");
  }
}

SpinMomentTensors SpinMomentTensors::from_state(std::int64_t n_parties, const SymState& psi) {
  const DickeSpace space{n_parties};
  if (psi.size() != space.dim()) fail(ErrorCode::InvalidArgument, "state dimension mismatch");
  std::array<Matrix, 3> S = {spin_axis_matrix(space, 'x'), spin_axis_matrix(space, 'y'),
                             spin_axis_matrix(space, 'z')};
  SpinMomentTensors t;
  t.n_parties = n_parties;
  std::array<Vector, 3> r1;
  std::array<Vector, 9> r2;
  std::array<Vector, 27> r3;
  for (int a = 0; a < 3; ++a) r1[static_cast<std::size_t>(a)] = S[static_cast<std::size_t>(a)] * psi;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      r2[static_cast<std::size_t>(3 * a + b)] = S[static_cast<std::size_t>(a)] * r1[static_cast<std::size_t>(b)];
  for (int a = 0; a < 3; ++a)
    for (int bc = 0; bc < 9; ++bc)
      r3[static_cast<std::size_t>(9 * a + bc)] = S[static_cast<std::size_t>(a)] * r2[static_cast<std::size_t>(bc)];
  for (int a = 0; a < 3; ++a) t.t1[static_cast<std::size_t>(a)] = psi.dot(r1[static_cast<std::size_t>(a)]);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      t.t2[static_cast<std::size_t>(3 * a + b)] = r1[static_cast<std::size_t>(a)].dot(r1[static_cast<std::size_t>(b)]);
  for (int a = 0; a < 3; ++a)
    for (int bc = 0; bc < 9; ++bc)
      t.t3[static_cast<std::size_t>(9 * a + bc)] = r1[static_cast<std::size_t>(a)].dot(r2[static_cast<std::size_t>(bc)]);
  for (int ab = 0; ab < 9; ++ab)
    for (int cd = 0; cd < 9; ++cd)
      t.t4[static_cast<std::size_t>(9 * ab + cd)] =
          r2[static_cast<std::size_t>((ab % 3) * 3 + ab / 3)].dot(r2[static_cast<std::size_t>(cd)]);
  return t;
}

const SpinMomentTensors& SpinMomentTensors::maximally_mixed(std::int64_t n_parties) {
  static std::map<std::int64_t, SpinMomentTensors> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n_parties);
  if (it != cache.end()) return it->second;

  const DickeSpace space{n_parties};
  std::array<Matrix, 3> S = {spin_axis_matrix(space, 'x'), spin_axis_matrix(space, 'y'),
                             spin_axis_matrix(space, 'z')};
  SpinMomentTensors t;
  t.n_parties = n_parties;
  const double inv_dim = 1.0 / space.dim();
  for (int a = 0; a < 3; ++a) t.t1[static_cast<std::size_t>(a)] = S[static_cast<std::size_t>(a)].trace() * inv_dim;
  std::array<Matrix, 9> p2;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      p2[static_cast<std::size_t>(3 * a + b)] = S[static_cast<std::size_t>(a)] * S[static_cast<std::size_t>(b)];
      t.t2[static_cast<std::size_t>(3 * a + b)] = p2[static_cast<std::size_t>(3 * a + b)].trace() * inv_dim;
    }
  std::array<Matrix, 27> p3;
  for (int a = 0; a < 3; ++a)
    for (int bc = 0; bc < 9; ++bc) {
      p3[static_cast<std::size_t>(9 * a + bc)] = S[static_cast<std::size_t>(a)] * p2[static_cast<std::size_t>(bc)];
      t.t3[static_cast<std::size_t>(9 * a + bc)] = p3[static_cast<std::size_t>(9 * a + bc)].trace() * inv_dim;
    }
  for (int a = 0; a < 3; ++a)
    for (int bcd = 0; bcd < 27; ++bcd)
      t.t4[static_cast<std::size_t>(27 * a + bcd)] =
          (S[static_cast<std::size_t>(a)] * p3[static_cast<std::size_t>(bcd)]).trace() * inv_dim;
  return cache.emplace(n_parties, std::move(t)).first->second;
}

namespace {

using cd = std::complex<double>;

struct Contractor {
  const SpinMomentTensors& t;
  std::array<double, 3> n, m;

  double dir(int which, int axis) const { return which == 0 ? n[static_cast<std::size_t>(axis)] : m[static_cast<std::size_t>(axis)]; }

  // <S_u1 S_u2 ...> with each u picked from {n, m}
  double e1(int u) const {
    cd acc = 0;
    for (int a = 0; a < 3; ++a) acc += dir(u, a) * t.t1[static_cast<std::size_t>(a)];
    return acc.real();
  }
  double e2(int u, int v) const {
    cd acc = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) acc += dir(u, a) * dir(v, b) * t.t2[static_cast<std::size_t>(3 * a + b)];
    return acc.real();
  }
  double e3(int u, int v, int w) const {
    cd acc = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c)
          acc += dir(u, a) * dir(v, b) * dir(w, c) * t.t3[static_cast<std::size_t>(9 * a + 3 * b + c)];
    return acc.real();
  }
  double e4(int u, int v, int w, int x) const {
    cd acc = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c)
          for (int d = 0; d < 3; ++d)
            acc += dir(u, a) * dir(v, b) * dir(w, c) * dir(x, d) *
                   t.t4[static_cast<std::size_t>(27 * a + 9 * b + 3 * c + d)];
    return acc.real();
  }
};

} // namespace

std::array<double, kMaxLabels> correlator_expectations(const SpinMomentTensors& t, const Direction& n,
                                                       const Direction& m, int max_order) {
  const double nn = static_cast<double>(t.n_parties);
  const double nm = n.dot(m);
  Contractor c{t, {n.x, n.y, n.z}, {m.x, m.y, m.z}};
  std::array<double, kMaxLabels> out{};
  auto set = [&out](int order, int ones, double v) { out[static_cast<std::size_t>(label_index({order, ones}))] = v; };

  set(1, 0, 2 * c.e1(0));
  set(1, 1, 2 * c.e1(1));
  set(2, 0, 4 * c.e2(0, 0) - nn);
  set(2, 1, 2 * (c.e2(0, 1) + c.e2(1, 0)) - nm * nn);
  set(2, 2, 4 * c.e2(1, 1) - nn);
  if (max_order >= 3) {
    set(3, 0, 8 * c.e3(0, 0, 0) + (4 - 6 * nn) * c.e1(0));
    set(3, 1, (8 * (c.e3(0, 0, 1) + c.e3(0, 1, 0) + c.e3(1, 0, 0)) + (4 - 6 * nn) * c.e1(1) +
               (8 - 12 * nn) * nm * c.e1(0)) /
                  3.0);
    set(3, 2, (8 * (c.e3(1, 1, 0) + c.e3(1, 0, 1) + c.e3(0, 1, 1)) + (4 - 6 * nn) * c.e1(0) +
               (8 - 12 * nn) * nm * c.e1(1)) /
                  3.0);
    set(3, 3, 8 * c.e3(1, 1, 1) + (4 - 6 * nn) * c.e1(1));
  }
  if (max_order >= 4) {
    const double sym_nm = c.e2(0, 1) + c.e2(1, 0);
    set(4, 0, 16 * c.e4(0, 0, 0, 0) + 3 * nn * nn - 6 * nn + (32 - 24 * nn) * c.e2(0, 0));
    set(4, 1, 4 * (c.e4(0, 0, 0, 1) + c.e4(0, 0, 1, 0) + c.e4(0, 1, 0, 0) + c.e4(1, 0, 0, 0)) +
                  (3 * nn * nn - 6 * nn) * nm + (8 - 6 * nn) * sym_nm + (16 - 12 * nn) * nm * c.e2(0, 0));
    set(4, 2, (16 * (c.e4(0, 0, 1, 1) + c.e4(0, 1, 0, 1) + c.e4(0, 1, 1, 0) + c.e4(1, 1, 0, 0) +
                     c.e4(1, 0, 1, 0) + c.e4(1, 0, 0, 1)) +
               (-12 * nn + 6 * nn * nn + 12 * nn * nn * nm * nm - 24 * nn * nm * nm) +
               (32 - 24 * nn) * (c.e2(1, 1) + c.e2(0, 0)) + (64 - 48 * nn) * nm * sym_nm) /
                  6.0);
    set(4, 3, 4 * (c.e4(1, 1, 1, 0) + c.e4(1, 1, 0, 1) + c.e4(1, 0, 1, 1) + c.e4(0, 1, 1, 1)) +
                  (3 * nn * nn - 6 * nn) * nm + (8 - 6 * nn) * sym_nm + (16 - 12 * nn) * nm * c.e2(1, 1));
    set(4, 4, 16 * c.e4(1, 1, 1, 1) + 3 * nn * nn - 6 * nn + (32 - 24 * nn) * c.e2(1, 1));
  }
  return out;
}

CorrelatorVector correlator_point(const OATParams& params, const Direction& n, const Direction& m, int max_order) {
  check_params(params);
  if (max_order < 2 || max_order > kMaxOrder) fail(ErrorCode::InvalidArgument, "max_order must be 2..4");
  const std::int64_t nn = params.n_parties;
  const SymState psi = oat_vector(params);
  const auto tensors = SpinMomentTensors::from_state(nn, psi);
  auto vals = correlator_expectations(tensors, n, m, max_order);

  // single-direction labels from the closed forms (Supp.-IV-style inversions)
  auto single = [&](const Direction& u, int which) {
    const double m1 = closed_form_moment(params, u, 1);
    const double m2 = closed_form_moment(params, u, 2);
    vals[static_cast<std::size_t>(label_index({1, which}))] = 2 * m1;
    vals[static_cast<std::size_t>(label_index({2, 2 * which}))] = 4 * m2 - static_cast<double>(nn);
    if (max_order >= 3) {
      const double m3 = closed_form_moment(params, u, 3);
      vals[static_cast<std::size_t>(label_index({3, 3 * which}))] = 8 * m3 + (4 - 6.0 * static_cast<double>(nn)) * m1;
    }
    if (max_order >= 4) {
      const double m4 = closed_form_moment(params, u, 4);
      vals[static_cast<std::size_t>(label_index({4, 4 * which}))] =
          16 * m4 + 3.0 * static_cast<double>(nn) * static_cast<double>(nn) - 6.0 * static_cast<double>(nn) +
          (32 - 24.0 * static_cast<double>(nn)) * m2;
    }
  };
  single(n, 0);
  single(m, 1);

  CorrelatorVector v;
  v.n_parties = nn;
  v.max_order = max_order;
  for (int i = 0; i < labels_up_to_order(max_order); ++i) v.values[static_cast<std::size_t>(i)] = vals[static_cast<std::size_t>(i)];
  return v;
}

double bell_value(const InequalityFamily& f, const SpinMomentTensors& pure, double eta, const FourAngles& angles) {
  const std::int64_t nn = pure.n_parties;
  const Direction n = Direction::from_angles(angles.phi0, angles.theta0);
  const Direction m = Direction::from_angles(angles.phi1, angles.theta1);
  const auto vp = correlator_expectations(pure, n, m, f.max_order);
  double acc = static_cast<double>(f.constant_term.eval(nn));
  if (eta == 1.0) {
    for (int i = 0; i < labels_up_to_order(f.max_order); ++i) {
      const auto& poly = f.coeffs[static_cast<std::size_t>(i)];
      if (!poly.is_zero()) acc += static_cast<double>(poly.eval(nn)) * vp[static_cast<std::size_t>(i)];
    }
    return acc;
  }
  const auto vm = correlator_expectations(SpinMomentTensors::maximally_mixed(nn), n, m, f.max_order);
  for (int i = 0; i < labels_up_to_order(f.max_order); ++i) {
    const auto& poly = f.coeffs[static_cast<std::size_t>(i)];
    if (!poly.is_zero())
      acc += static_cast<double>(poly.eval(nn)) *
             (eta * vp[static_cast<std::size_t>(i)] + (1 - eta) * vm[static_cast<std::size_t>(i)]);
  }
  return acc;
}

double bell_value(const InequalityFamily& f, const OATParams& params, const FourAngles& angles) {
  check_params(params);
  const auto tensors = SpinMomentTensors::from_state(params.n_parties, oat_vector(params));
  return bell_value(f, tensors, params.eta, angles);
}

AngleOptimum optimize_angles(const InequalityFamily& f, const SpinMomentTensors& pure, std::int64_t n_parties,
                             double eta, int starts) {
  const auto objective = [&](const std::vector<double>& x) {
    return bell_value(f, pure, eta, {x[0], x[1], x[2], x[3]});
  };
  const auto h = halton_points(starts, 4);
  NelderMeadOptions opts;
  opts.max_iter = 600;
  opts.ftol = 1e-9;
  opts.xtol = 1e-8;
  opts.initial_step = 0.4;
  AngleOptimum best;
  bool first = true;
  for (const auto& pt : h) {
    std::vector<double> x0 = {2 * M_PI * pt[0], M_PI * pt[1], 2 * M_PI * pt[2], M_PI * pt[3]};
    const auto r = nelder_mead(objective, x0, opts);
    if (first || r.value < best.value) {
      first = false;
      best.value = r.value;
      best.angles = {r.x[0], r.x[1], r.x[2], r.x[3]};
    }
  }
  best.ratio = best.value / static_cast<double>(f.constant_term.eval(n_parties));
  return best;
}

AngleOptimum optimize_angles(const InequalityFamily& f, const OATParams& params, int starts) {
  check_params(params);
  const auto tensors = SpinMomentTensors::from_state(params.n_parties, oat_vector(params));
  return optimize_angles(f, tensors, params.n_parties, params.eta, starts);
}

std::optional<double> min_purity(const InequalityFamily& f, std::int64_t n_parties, double mu, double eta_tol) {
  const auto tensors = SpinMomentTensors::from_state(n_parties, oat_vector({n_parties, mu, 1.0}));
  auto opt_at = [&](double eta) { return optimize_angles(f, tensors, n_parties, eta, 12); };

  AngleOptimum at_pure = opt_at(1.0);
  if (at_pure.value >= 0) return std::nullopt;

  double lo = 0.0, hi = 1.0; // value(lo) >= 0 > value(hi)
  AngleOptimum at_hi = at_pure;
  while (hi - lo > eta_tol) {
    const double mid = 0.5 * (lo + hi);
    const AngleOptimum r = opt_at(mid);
    if (r.value < 0) {
      hi = mid;
      at_hi = r;
    } else {
      lo = mid;
    }
  }

  // polish on the exact eta-linearity of the value at fixed angles
  double eta = hi;
  AngleOptimum cur = at_hi;
  for (int it = 0; it < 8; ++it) {
    const double v1 = bell_value(f, tensors, 1.0, cur.angles);
    const double v0 = bell_value(f, tensors, 0.0, cur.angles);
    if (std::abs(v1 - v0) < 1e-300) break;
    const double root = v0 / (v0 - v1); // value(root) = 0 at fixed angles
    if (!(root > 0 && root <= 1)) break;
    const AngleOptimum r = opt_at(root);
    eta = root;
    if (std::abs(r.value) < 1e-9 * std::abs(static_cast<double>(f.constant_term.eval(n_parties)))) {
      cur = r;
      break;
    }
    cur = r;
    if (r.value < 0) continue; // still violated, move boundary again with new angles
  }
  return eta;
}

} // namespace pibi
