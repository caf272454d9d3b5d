#include "pibi/optim.hpp"

#include <algorithm>
#include <cmath>

namespace pibi {

GoldenResult golden_section(const std::function<double(double)>& f, double a, double b, double xtol) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (std::abs(b - a) > xtol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? GoldenResult{c, fc} : GoldenResult{d, fd};
}

GoldenResult grid_then_golden(const std::function<double(double)>& f, double a, double b, int grid_points,
                              double xtol) {
  const double h = (b - a) / grid_points;
  int best = 0;
  double best_val = f(a);
  for (int i = 1; i <= grid_points; ++i) {
    const double v = f(a + i * h);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = a + std::max(0, best - 1) * h;
  const double hi = a + std::min(grid_points, best + 1) * h;
  GoldenResult r = golden_section(f, lo, hi, xtol);
  if (best_val < r.value) r = {a + best * h, best_val};
  return r;
}

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += opts.initial_step;
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  auto order = [&] {
    std::vector<std::size_t> idx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<std::vector<double>> p2(n + 1);
    std::vector<double> v2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      p2[i] = pts[idx[i]];
      v2[i] = vals[idx[i]];
    }
    pts.swap(p2);
    vals.swap(v2);
  };

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    order();
    double spread = 0, fspread = std::abs(vals[n] - vals[0]);
    for (std::size_t i = 0; i < n; ++i) spread = std::max(spread, std::abs(pts[n][i] - pts[0][i]));
    if (spread < opts.xtol && fspread < opts.ftol) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);

    auto blend = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j) x[j] = centroid[j] + t * (pts[n][j] - centroid[j]);
      return x;
    };

    const auto xr = blend(-1.0);
    const double fr = f(xr);
    if (fr < vals[0]) {
      const auto xe = blend(-2.0);
      const double fe = f(xe);
      if (fe < fr) {
        pts[n] = xe;
        vals[n] = fe;
      } else {
        pts[n] = xr;
        vals[n] = fr;
      }
    } else if (fr < vals[n - 1]) {
      pts[n] = xr;
      vals[n] = fr;
    } else {
      const auto xc = blend(fr < vals[n] ? -0.5 : 0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, vals[n])) {
        pts[n] = xc;
        vals[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
          vals[i] = f(pts[i]);
        }
      }
    }
  }
  order();
  return {pts[0], vals[0], it};
}

std::vector<std::vector<double>> halton_points(int count, int dim) {
  static const int bases[] = {2, 3, 5, 7, 11, 13};
  std::vector<std::vector<double>> out(static_cast<std::size_t>(count), std::vector<double>(static_cast<std::size_t>(dim)));
  for (int d = 0; d < dim; ++d) {
    const int base = bases[d % 6];
    for (int i = 0; i < count; ++i) {
      double f = 1.0, r = 0.0;
      int n = i + 1;
      while (n > 0) {
        f /= base;
        r += f * (n % base);
        n /= base;
      }
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] = r;
    }
  }
  return out;
}

} // namespace pibi
