#include "pibi/nongauss.hpp"

#include <cmath>
#include <limits>
#include <mutex>

#include <boost/multiprecision/cpp_int.hpp>

#include "pibi/optim.hpp"

namespace pibi {

namespace {

using bigint = boost::multiprecision::cpp_int;
using bigrat = boost::multiprecision::cpp_rational;

const bigint& factorial_big(int n) {
  static std::vector<bigint> cache = {1, 1};
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  while (static_cast<int>(cache.size()) <= n) cache.push_back(cache.back() * static_cast<int>(cache.size()));
  return cache[static_cast<std::size_t>(n)];
}

// factorial of a doubled integer that must be even and non-negative
bigint fact2(int twice) {
  if (twice < 0 || twice % 2 != 0) fail(ErrorCode::InvalidArgument, "non-integer factorial argument");
  return factorial_big(twice / 2);
}

int to_doubled(double v, const char* what) {
  const double d = 2 * v;
  const double r = std::round(d);
  if (std::abs(d - r) > 1e-9) fail(ErrorCode::InvalidArgument, std::string(what) + " must be (half-)integer");
  return static_cast<int>(r);
}

double cg_doubled(int j1, int m1, int j2, int m2, int J, int M) {
  // selection rules return 0, not an error
  if (m1 + m2 != M) return 0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(M) > J) return 0;
  if (J > j1 + j2 || J < std::abs(j1 - j2)) return 0;
  if ((j1 + j2 + J) % 2 != 0) return 0;
  if ((j1 + m1) % 2 != 0 || (j2 + m2) % 2 != 0 || (J + M) % 2 != 0) return 0;

  const bigrat pre = bigrat(bigint(J + 1) * fact2(J + j1 - j2) * fact2(J - j1 + j2) * fact2(j1 + j2 - J) *
                                fact2(J + M) * fact2(J - M) * fact2(j1 - m1) * fact2(j1 + m1) * fact2(j2 - m2) *
                                fact2(j2 + m2),
                            fact2(j1 + j2 + J + 2));
  const int kmin = std::max({0, (j2 - J - m1) / 2, (j1 + m2 - J) / 2});
  const int kmax = std::min({(j1 + j2 - J) / 2, (j1 - m1) / 2, (j2 + m2) / 2});
  bigrat sum = 0;
  for (int k = kmin; k <= kmax; ++k) {
    const bigint d = factorial_big(k) * fact2(j1 + j2 - J - 2 * k) * fact2(j1 - m1 - 2 * k) *
                     fact2(j2 + m2 - 2 * k) * fact2(J - j2 + m1 + 2 * k) * fact2(J - j1 - m2 + 2 * k);
    if (k % 2 == 0)
      sum += bigrat(1, d);
    else
      sum -= bigrat(1, d);
  }
  const double s = static_cast<double>(sum);
  if (s == 0) return 0;
  return s * std::sqrt(static_cast<double>(pre));
}

} // namespace

double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M) {
  return cg_doubled(to_doubled(j1, "j1"), to_doubled(m1, "m1"), to_doubled(j2, "j2"), to_doubled(m2, "m2"),
                    to_doubled(J, "J"), to_doubled(M, "M"));
}

SphereGrid SphereGrid::build(int n_theta, int n_phi) {
  if (n_theta < 2 || n_phi < 3) fail(ErrorCode::InvalidArgument, "grid too small");
  SphereGrid g;
  g.theta.resize(static_cast<std::size_t>(n_theta));
  g.theta_weight.resize(static_cast<std::size_t>(n_theta));
  // Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n
  for (int i = 0; i < n_theta; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n_theta + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int k = 0; k < n_theta; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * k + 1) * x * p1 - k * p2) / (k + 1);
      }
      pp = n_theta * (x * p0 - p1) / (x * x - 1);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    g.theta[static_cast<std::size_t>(n_theta - 1 - i)] = std::acos(x);
    g.theta_weight[static_cast<std::size_t>(n_theta - 1 - i)] = 2.0 / ((1 - x * x) * pp * pp);
  }
  g.phi.resize(static_cast<std::size_t>(n_phi));
  for (int i = 0; i < n_phi; ++i) g.phi[static_cast<std::size_t>(i)] = 2 * M_PI * i / n_phi;
  return g;
}

MultipoleDecomposition MultipoleDecomposition::from_state(const SymState& psi) {
  const int dim = static_cast<int>(psi.size());
  const int two_j = dim - 1;
  MultipoleDecomposition mp;
  mp.two_j = two_j;
  mp.rho.assign(static_cast<std::size_t>((two_j + 1) * (two_j + 1)), {0, 0});
  for (int k = 0; k <= two_j; ++k) {
    const double scale = std::sqrt(static_cast<double>(2 * k + 1) / dim);
    for (int q = -k; q <= k; ++q) {
      std::complex<double> acc = 0;
      for (int i = 0; i < dim; ++i) {
        const int m2 = two_j - 2 * i; // doubled m of basis index i
        const int mp2 = m2 + 2 * q;
        if (std::abs(mp2) > two_j) continue;
        const int ip = (two_j - mp2) / 2;
        const double cg = cg_doubled(two_j, m2, 2 * k, 2 * q, two_j, mp2);
        if (cg == 0) continue;
        acc += std::conj(psi(ip)) * psi(i) * cg;
      }
      mp.rho[static_cast<std::size_t>(k * k + q + k)] = acc * scale;
    }
  }
  return mp;
}

MultipoleDecomposition MultipoleDecomposition::from_density(const Matrix& density) {
  const int dim = static_cast<int>(density.rows());
  if (density.cols() != dim) fail(ErrorCode::InvalidArgument, "density must be square");
  const int two_j = dim - 1;
  MultipoleDecomposition mp;
  mp.two_j = two_j;
  mp.rho.assign(static_cast<std::size_t>((two_j + 1) * (two_j + 1)), {0, 0});
  for (int k = 0; k <= two_j; ++k) {
    const double scale = std::sqrt(static_cast<double>(2 * k + 1) / dim);
    for (int q = -k; q <= k; ++q) {
      std::complex<double> acc = 0;
      for (int i = 0; i < dim; ++i) {
        const int m2 = two_j - 2 * i;
        const int mp2 = m2 + 2 * q;
        if (std::abs(mp2) > two_j) continue;
        const int ip = (two_j - mp2) / 2;
        const double cg = cg_doubled(two_j, m2, 2 * k, 2 * q, two_j, mp2);
        if (cg == 0) continue;
        acc += density(ip, i) * cg; // rho_{m' m} with m' = m + q
      }
      mp.rho[static_cast<std::size_t>(k * k + q + k)] = acc * scale;
    }
  }
  return mp;
}

Eigen::MatrixXd wigner_function(const MultipoleDecomposition& mp, const SphereGrid& grid) {
  const int two_j = mp.two_j;
  const int kmax = two_j;
  const int nt = static_cast<int>(grid.theta.size());
  const int np = static_cast<int>(grid.phi.size());
  const double scale = std::sqrt(4 * M_PI / (two_j + 1));
  Eigen::MatrixXd field(nt, np);
  std::vector<std::complex<double>> cq(static_cast<std::size_t>(kmax + 1));
  for (int it = 0; it < nt; ++it) {
    const double th = grid.theta[static_cast<std::size_t>(it)];
    for (int q = 0; q <= kmax; ++q) {
      std::complex<double> acc = 0;
      for (int k = q; k <= kmax; ++k)
        acc += mp.at(k, q) * std::sph_legendre(static_cast<unsigned>(k), static_cast<unsigned>(q), th);
      cq[static_cast<std::size_t>(q)] = acc;
    }
    for (int ip = 0; ip < np; ++ip) {
      const double phi = grid.phi[static_cast<std::size_t>(ip)];
      double w = cq[0].real();
      for (int q = 1; q <= kmax; ++q)
        w += 2 * (cq[static_cast<std::size_t>(q)] * std::complex<double>(std::cos(q * phi), std::sin(q * phi))).real();
      field(it, ip) = scale * w;
    }
  }
  return field;
}

double wigner_normalization(const Eigen::MatrixXd& field, const SphereGrid& grid, int two_j) {
  double integral = 0;
  for (int it = 0; it < field.rows(); ++it)
    integral += grid.theta_weight[static_cast<std::size_t>(it)] * field.row(it).sum() * grid.phi_weight();
  return (two_j + 1) / (4 * M_PI) * integral;
}

double wigner_negativity(const MultipoleDecomposition& mp, double tol, int max_refinements) {
  const int dim = mp.two_j + 1;
  int nt = 2 * dim, np = 2 * dim + 1;
  double prev = 0;
  bool have_prev = false;
  for (int r = 0; r <= max_refinements; ++r) {
    const SphereGrid grid = SphereGrid::build(nt, np);
    const Eigen::MatrixXd field = wigner_function(mp, grid);
    double integral_abs = 0;
    for (int it = 0; it < field.rows(); ++it)
      integral_abs +=
          grid.theta_weight[static_cast<std::size_t>(it)] * field.row(it).cwiseAbs().sum() * grid.phi_weight();
    const double neg = 0.5 * (dim / (4 * M_PI) * integral_abs - 1);
    if (have_prev && std::abs(neg - prev) < tol) return neg;
    prev = neg;
    have_prev = true;
    nt *= 2;
    np *= 2;
  }
  fail(ErrorCode::NonConvergence, "Wigner negativity quadrature did not converge under refinement");
}

double wigner_negativity(const SymState& psi, double tol, int max_refinements) {
  return wigner_negativity(MultipoleDecomposition::from_state(psi), tol, max_refinements);
}

double excess_kurtosis_along(const SymState& psi, const Direction& dir) {
  const std::int64_t n = psi.size() - 1;
  const DickeSpace space{n};
  const Matrix su = spin_matrix(space, dir);
  const std::complex<double> m1 = psi.dot(su * psi);
  const Vector r1 = su * psi - psi * m1;
  const double var = std::real(r1.dot(r1));
  if (var < 1e-12) fail(ErrorCode::DegenerateVariance, "variance below 1e-12 along this direction");
  const Vector r2 = su * r1 - r1 * m1;
  const double m4 = std::real(r2.dot(r2));
  return m4 / (var * var) - 3.0;
}

KurtosisResult excess_kurtosis(const SymState& psi, bool optimize) {
  if (!optimize) {
    KurtosisResult r;
    r.direction = Direction{0, 0, 1};
    r.value = excess_kurtosis_along(psi, r.direction);
    return r;
  }
  const std::int64_t n = psi.size() - 1;
  const DickeSpace space{n};
  const std::array<Matrix, 3> axes = {spin_axis_matrix(space, 'x'), spin_axis_matrix(space, 'y'),
                                      spin_axis_matrix(space, 'z')};
  auto kurt = [&](double phi, double theta) {
    const Direction u = Direction::from_angles(phi, theta);
    const Matrix su = u.x * axes[0] + u.y * axes[1] + u.z * axes[2];
    const std::complex<double> m1 = psi.dot(su * psi);
    const Vector r1 = su * psi - psi * m1;
    const double var = std::real(r1.dot(r1));
    if (var < 1e-12) return std::numeric_limits<double>::infinity(); // skipped direction
    const Vector r2 = su * r1 - r1 * m1;
    return std::real(r2.dot(r2)) / (var * var) - 3.0;
  };

  double best = std::numeric_limits<double>::infinity();
  double bphi = 0, btheta = 0;
  constexpr int grid = 64;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j <= grid; ++j) {
      const double phi = 2 * M_PI * i / grid;
      const double theta = M_PI * j / grid;
      const double v = kurt(phi, theta);
      if (v < best) {
        best = v;
        bphi = phi;
        btheta = theta;
      }
    }
  NelderMeadOptions opts;
  opts.max_iter = 300;
  opts.xtol = 1e-10;
  opts.ftol = 1e-12;
  opts.initial_step = 0.5 * M_PI / grid;
  const auto r = nelder_mead([&](const std::vector<double>& x) { return kurt(x[0], x[1]); }, {bphi, btheta}, opts);
  KurtosisResult out;
  out.value = r.value;
  out.direction = Direction::from_angles(r.x[0], r.x[1]);
  return out;
}

} // namespace pibi
