#include "pibi/dicke.hpp"

#include <cmath>

#include <lapacke.h>

#include "pibi/optim.hpp"

namespace pibi {

Direction Direction::from_angles(double phi, double theta) {
  return {std::cos(phi) * std::sin(theta), std::sin(phi) * std::sin(theta), std::cos(theta)};
}

double Direction::norm() const { return std::sqrt(x * x + y * y + z * z); }

Direction Direction::unit(double x, double y, double z) {
  const double r = std::sqrt(x * x + y * y + z * z);
  if (r < 1e-300) fail(ErrorCode::InvalidArgument, "zero direction");
  return {x / r, y / r, z / r};
}

namespace {

void check_unit(const Direction& d) {
  if (std::abs(d.norm() - 1.0) > 1e-12) fail(ErrorCode::InvalidArgument, "direction must be unit length");
}

// Supp.-II-style operator assembly, shared between the dense complex backend
// and the banded real backend used for the planar eigenvalue path.
template <class M>
M correlator_operator_impl(CorrelatorLabel lab, double nn, const M& Sn, const M& Sm, double nm, const M& id) {
  const int idx = label_index(lab);
  switch (idx) {
    case 0: return 2.0 * Sn;                               // S_0
    case 1: return 2.0 * Sm;                               // S_1
    case 2: return 4.0 * (Sn * Sn) - nn * id;              // S_00
    case 3: return 2.0 * (Sn * Sm + Sm * Sn) - nm * nn * id;
    case 4: return 4.0 * (Sm * Sm) - nn * id;              // S_11
    case 5: return 8.0 * (Sn * Sn * Sn) + (4.0 - 6.0 * nn) * Sn;
    case 6:
      return (1.0 / 3.0) * (8.0 * (Sn * Sn * Sm + Sn * Sm * Sn + Sm * Sn * Sn) + (4.0 - 6.0 * nn) * Sm +
                            (8.0 - 12.0 * nn) * nm * Sn);
    case 7:
      return (1.0 / 3.0) * (8.0 * (Sm * Sm * Sn + Sm * Sn * Sm + Sn * Sm * Sm) + (4.0 - 6.0 * nn) * Sn +
                            (8.0 - 12.0 * nn) * nm * Sm);
    case 8: return 8.0 * (Sm * Sm * Sm) + (4.0 - 6.0 * nn) * Sm;
    case 9: {
      const M Sn2 = Sn * Sn;
      return 16.0 * (Sn2 * Sn2) + (3.0 * nn * nn - 6.0 * nn) * id + (32.0 - 24.0 * nn) * Sn2;
    }
    case 10: {
      const M Sn2 = Sn * Sn;
      return 4.0 * (Sn * Sn * Sn * Sm + Sn * Sn * Sm * Sn + Sn * Sm * Sn * Sn + Sm * Sn * Sn * Sn) +
             (3.0 * nn * nn - 6.0 * nn) * nm * id + (8.0 - 6.0 * nn) * (Sn * Sm + Sm * Sn) +
             (16.0 - 12.0 * nn) * nm * Sn2;
    }
    case 11: {
      const M Sn2 = Sn * Sn;
      const M Sm2 = Sm * Sm;
      return (1.0 / 6.0) *
             (16.0 * (Sn * Sn * Sm * Sm + Sn * Sm * Sn * Sm + Sn * Sm * Sm * Sn + Sm * Sm * Sn * Sn +
                      Sm * Sn * Sm * Sn + Sm * Sn * Sn * Sm) +
              (-12.0 * nn + 6.0 * nn * nn + 12.0 * nn * nn * nm * nm - 24.0 * nn * nm * nm) * id +
              (32.0 - 24.0 * nn) * (Sm2 + Sn2) + (64.0 - 48.0 * nn) * nm * (Sn * Sm + Sm * Sn));
    }
    case 12: {
      const M Sm2 = Sm * Sm;
      return 4.0 * (Sm * Sm * Sm * Sn + Sm * Sm * Sn * Sm + Sm * Sn * Sm * Sm + Sn * Sm * Sm * Sm) +
             (3.0 * nn * nn - 6.0 * nn) * nm * id + (8.0 - 6.0 * nn) * (Sn * Sm + Sm * Sn) +
             (16.0 - 12.0 * nn) * nm * Sm2;
    }
    case 13: {
      const M Sm2 = Sm * Sm;
      return 16.0 * (Sm2 * Sm2) + (3.0 * nn * nn - 6.0 * nn) * id + (32.0 - 24.0 * nn) * Sm2;
    }
    default: fail(ErrorCode::InvalidArgument, "bad label");
  }
}

// ---- real banded matrices for the planar (y = 0) fast path ----

struct Band {
  int n = 0;
  int bw = 0;
  Eigen::MatrixXd d; // (2*bw+1) x n; A(i,j) = d(i-j+bw, j)

  Band() = default;
  Band(int n_, int bw_) : n(n_), bw(bw_), d(Eigen::MatrixXd::Zero(2 * bw_ + 1, n_)) {}

  double at(int i, int j) const {
    const int off = i - j + bw;
    return (off < 0 || off > 2 * bw) ? 0.0 : d(off, j);
  }
  double& ref(int i, int j) { return d(i - j + bw, j); }

  static Band identity(int n_) {
    Band b(n_, 0);
    b.d.setOnes();
    return b;
  }
};

Band operator*(double s, const Band& a) {
  Band out = a;
  out.d *= s;
  return out;
}

Band operator+(const Band& a, const Band& b) {
  const int bw = std::max(a.bw, b.bw);
  Band out(a.n, bw);
  for (int j = 0; j < a.n; ++j) {
    const int lo = std::max(0, j - bw), hi = std::min(a.n - 1, j + bw);
    for (int i = lo; i <= hi; ++i) out.ref(i, j) = a.at(i, j) + b.at(i, j);
  }
  return out;
}

Band operator-(const Band& a, const Band& b) { return a + (-1.0) * b; }

Band operator*(const Band& a, const Band& b) {
  const int bw = a.bw + b.bw;
  Band out(a.n, bw);
  for (int j = 0; j < a.n; ++j) {
    const int lo = std::max(0, j - bw), hi = std::min(a.n - 1, j + bw);
    for (int i = lo; i <= hi; ++i) {
      const int klo = std::max({0, i - a.bw, j - b.bw});
      const int khi = std::min({a.n - 1, i + a.bw, j + b.bw});
      double acc = 0;
      for (int k = klo; k <= khi; ++k) acc += a.at(i, k) * b.at(k, j);
      out.ref(i, j) = acc;
    }
  }
  return out;
}

Band planar_spin_band(std::int64_t n_parties, double ux, double uz) {
  const int dim = static_cast<int>(n_parties) + 1;
  const double j = 0.5 * static_cast<double>(n_parties);
  Band b(dim, 1);
  for (int i = 0; i < dim; ++i) {
    const double m = j - i;
    b.ref(i, i) = uz * m;
    if (i + 1 < dim) {
      const double sp = 0.5 * std::sqrt(j * (j + 1) - m * (m - 1)); // (S_x)_{i,i+1}
      b.ref(i, i + 1) = ux * sp;
      b.ref(i + 1, i) = ux * sp;
    }
  }
  return b;
}

double band_min_eigenvalue(const Band& a) {
  const int n = a.n;
  const int kd = a.bw;
  // LAPACK lower symmetric band storage: ab(i - j, j) for j <= i <= j + kd.
  Eigen::MatrixXd ab = Eigen::MatrixXd::Zero(kd + 1, n);
  for (int j = 0; j < n; ++j)
    for (int i = j; i <= std::min(n - 1, j + kd); ++i) ab(i - j, j) = a.at(i, j);
  std::vector<double> w(static_cast<std::size_t>(n));
  std::vector<double> zdummy(1);
  std::vector<lapack_int> ifail(static_cast<std::size_t>(n));
  lapack_int found = 0;
  std::vector<double> q(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  const double abstol = 2 * LAPACKE_dlamch('S');
  const lapack_int info = LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', 'I', 'L', n, kd, ab.data(), kd + 1, q.data(), n,
                                         0.0, 0.0, 1, 1, abstol, &found, w.data(), zdummy.data(), 1, ifail.data());
  if (info != 0 || found < 1) fail(ErrorCode::SolverFailure, "dsbevx failed on banded eigenproblem");
  return w[0];
}

} // namespace

Matrix spin_axis_matrix(DickeSpace space, char axis) {
  const int dim = space.dim();
  const double j = space.total_spin();
  Matrix out = Matrix::Zero(dim, dim);
  if (axis == 'z') {
    for (int i = 0; i < dim; ++i) out(i, i) = j - i;
    return out;
  }
  for (int i = 0; i + 1 < dim; ++i) {
    const double m = j - (i + 1); // S+ |m> climbs one basis index up
    const double c = std::sqrt(j * (j + 1) - m * (m + 1));
    if (axis == 'x') {
      out(i, i + 1) = 0.5 * c;
      out(i + 1, i) = 0.5 * c;
    } else if (axis == 'y') {
      out(i, i + 1) = std::complex<double>(0, -0.5) * c;
      out(i + 1, i) = std::complex<double>(0, 0.5) * c;
    } else {
      fail(ErrorCode::InvalidArgument, "axis must be x, y or z");
    }
  }
  return out;
}

Matrix spin_matrix(DickeSpace space, const Direction& dir) {
  check_unit(dir);
  Matrix out = dir.x * spin_axis_matrix(space, 'x');
  if (dir.y != 0.0) out += dir.y * spin_axis_matrix(space, 'y');
  out += dir.z * spin_axis_matrix(space, 'z');
  return out;
}

Matrix correlator_operator(DickeSpace space, CorrelatorLabel lab, const Direction& n, const Direction& m) {
  check_unit(n);
  check_unit(m);
  const Matrix Sn = spin_matrix(space, n);
  const Matrix Sm = spin_matrix(space, m);
  const Matrix id = Matrix::Identity(space.dim(), space.dim());
  return correlator_operator_impl<Matrix>(lab, static_cast<double>(space.n_parties), Sn, Sm, n.dot(m), id);
}

BellOperatorSym bell_operator(const InequalityFamily& f, DickeSpace space, const Direction& n,
                              const Direction& m) {
  check_unit(n);
  check_unit(m);
  const std::int64_t nn = space.n_parties;
  const Matrix Sn = spin_matrix(space, n);
  const Matrix Sm = spin_matrix(space, m);
  const Matrix id = Matrix::Identity(space.dim(), space.dim());
  Matrix acc = static_cast<double>(f.constant_term.eval(nn)) * id;
  for (int i = 0; i < labels_up_to_order(f.max_order); ++i) {
    const auto& poly = f.coeffs[static_cast<std::size_t>(i)];
    if (poly.is_zero()) continue;
    acc += static_cast<double>(poly.eval(nn)) *
           correlator_operator_impl<Matrix>(label_at(i), static_cast<double>(nn), Sn, Sm, n.dot(m), id);
  }
  return {space, std::move(acc), f.name, n, m};
}

std::pair<double, Vector> min_eigenvalue(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian);
  if (es.info() != Eigen::Success) fail(ErrorCode::SolverFailure, "dense eigensolver did not converge");
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

double planar_min_eigenvalue(const InequalityFamily& f, std::int64_t n_parties, double theta) {
  const Band Sn = planar_spin_band(n_parties, 0.0, 1.0);
  const Band Sm = planar_spin_band(n_parties, std::sin(theta), std::cos(theta));
  const Band id = Band::identity(static_cast<int>(n_parties) + 1);
  const double nm = std::cos(theta);
  Band acc = static_cast<double>(f.constant_term.eval(n_parties)) * id;
  for (int i = 0; i < labels_up_to_order(f.max_order); ++i) {
    const auto& poly = f.coeffs[static_cast<std::size_t>(i)];
    if (poly.is_zero()) continue;
    acc = acc + static_cast<double>(poly.eval(n_parties)) *
                    correlator_operator_impl<Band>(label_at(i), static_cast<double>(n_parties), Sn, Sm, nm, id);
  }
  return band_min_eigenvalue(acc);
}

ThetaOptimum optimize_theta(const InequalityFamily& f, std::int64_t n_parties, int grid_points, double xtol) {
  if (n_parties < f.n_min) fail(ErrorCode::InvalidArgument, "N below family minimum");
  const auto objective = [&](double theta) { return planar_min_eigenvalue(f, n_parties, theta); };
  const GoldenResult r = grid_then_golden(objective, 0.0, M_PI, grid_points, xtol);
  const double beta = static_cast<double>(f.constant_term.eval(n_parties));
  return {r.x, r.value, r.value / beta};
}

namespace {

Eigen::Matrix2cd qubit_measurement(const Direction& u) {
  Eigen::Matrix2cd m;
  m << u.z, std::complex<double>(u.x, -u.y), std::complex<double>(u.x, u.y), -u.z;
  return m;
}

void add_tuple_products(Matrix& out, const std::vector<Eigen::Matrix2cd>& site_ops,
                        const std::vector<int>& sites) {
  const int n = static_cast<int>(std::log2(out.rows()) + 0.5);
  const int k = static_cast<int>(sites.size());
  const std::int64_t dim = out.rows();
  for (std::int64_t c = 0; c < dim; ++c) {
    for (int mask = 0; mask < (1 << k); ++mask) {
      std::int64_t r = c;
      std::complex<double> amp = 1.0;
      for (int t = 0; t < k; ++t) {
        const int site = sites[static_cast<std::size_t>(t)];
        const int cbit = static_cast<int>((c >> (n - 1 - site)) & 1);
        const int rbit = (mask >> t) & 1;
        amp *= site_ops[static_cast<std::size_t>(t)](rbit, cbit);
        if (rbit != cbit) r ^= (std::int64_t{1} << (n - 1 - site));
      }
      out(r, c) += amp;
    }
  }
}

void ordered_tuples(int n, int k, std::vector<int>& cur, const std::function<void(const std::vector<int>&)>& fn) {
  if (static_cast<int>(cur.size()) == k) {
    fn(cur);
    return;
  }
  for (int i = 0; i < n; ++i) {
    bool used = false;
    for (int s : cur)
      if (s == i) { used = true; break; }
    if (used) continue;
    cur.push_back(i);
    ordered_tuples(n, k, cur, fn);
    cur.pop_back();
  }
}

} // namespace

std::vector<Matrix> full_space_label_operators(std::int64_t n_parties, const Direction& n, const Direction& m) {
  if (n_parties > kFullSpaceLimit) fail(ErrorCode::SizeLimit, "full-space oracle capped at N <= 10");
  check_unit(n);
  check_unit(m);
  const int nq = static_cast<int>(n_parties);
  const std::int64_t dim = std::int64_t{1} << nq;
  const Eigen::Matrix2cd Mn = qubit_measurement(n);
  const Eigen::Matrix2cd Mm = qubit_measurement(m);

  std::vector<Matrix> ops(kMaxLabels);
  for (int idx = 0; idx < kMaxLabels; ++idx) {
    const CorrelatorLabel lab = label_at(idx);
    if (lab.order > nq) {
      ops[static_cast<std::size_t>(idx)] = Matrix::Zero(dim, dim); // empty tuple sum
      continue;
    }
    Matrix acc = Matrix::Zero(dim, dim);
    std::vector<Eigen::Matrix2cd> site_ops;
    for (int t = 0; t < lab.order; ++t) site_ops.push_back(t < lab.order - lab.ones ? Mn : Mm);
    std::vector<int> cur;
    ordered_tuples(nq, lab.order, cur, [&](const std::vector<int>& sites) {
      add_tuple_products(acc, site_ops, sites);
    });
    ops[static_cast<std::size_t>(idx)] = std::move(acc);
  }
  return ops;
}

double full_space_min_eigenvalue(const InequalityFamily& f, std::int64_t n_parties,
                                 const std::vector<Matrix>& label_ops) {
  const std::int64_t dim = std::int64_t{1} << n_parties;
  Matrix acc = static_cast<double>(f.constant_term.eval(n_parties)) * Matrix::Identity(dim, dim);
  for (int i = 0; i < labels_up_to_order(f.max_order); ++i) {
    const auto& poly = f.coeffs[static_cast<std::size_t>(i)];
    if (poly.is_zero()) continue;
    acc += static_cast<double>(poly.eval(n_parties)) * label_ops[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(acc, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail(ErrorCode::SolverFailure, "full-space eigensolver did not converge");
  return es.eigenvalues()(0);
}

double full_space_min_eigenvalue(const InequalityFamily& f, std::int64_t n_parties, const Direction& n,
                                 const Direction& m) {
  return full_space_min_eigenvalue(f, n_parties, full_space_label_operators(n_parties, n, m));
}

} // namespace pibi
