#ifndef PIBI_OPTIM_HPP
#define PIBI_OPTIM_HPP

#include <functional>
#include <vector>

namespace pibi {

struct GoldenResult {
  double x = 0;
  double value = 0;
};

/// Golden-section minimization of a unimodal-enough f on [a, b].
GoldenResult golden_section(const std::function<double(double)>& f, double a, double b, double xtol);

/// Coarse grid scan followed by golden-section refinement around the best node.
GoldenResult grid_then_golden(const std::function<double(double)>& f, double a, double b, int grid_points,
                              double xtol);

struct NelderMeadOptions {
  int max_iter = 400;
  double xtol = 1e-9;
  double ftol = 1e-12;
  double initial_step = 0.25;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0;
  int iterations = 0;
};

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts = {});

/// Deterministic low-discrepancy points in [0,1)^dim (Halton bases 2,3,5,7).
std::vector<std::vector<double>> halton_points(int count, int dim);

} // namespace pibi

#endif
