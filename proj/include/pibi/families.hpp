#ifndef PIBI_FAMILIES_HPP
#define PIBI_FAMILIES_HPP

#include <string>
#include <vector>

#include "pibi/correlators.hpp"

#include <nlohmann/json_fwd.hpp>

namespace pibi {

/// Integer polynomial in N of degree <= 2, coefficient c[p] on N^p.
struct NPoly {
  std::array<std::int64_t, 3> c{};

  std::int64_t eval(std::int64_t n) const { return c[0] + n * (c[1] + n * c[2]); }
  bool is_zero() const { return c[0] == 0 && c[1] == 0 && c[2] == 0; }
  bool operator==(const NPoly&) const = default;
};

/// A PIBI family written as constant(N) + sum_w coeffs_w(N) * S_w >= 0 with the
/// classical bound folded into the positive constant term.
struct InequalityFamily {
  std::string name;
  int max_order = 2;
  std::int64_t n_min = 2;
  std::array<NPoly, kMaxLabels> coeffs{};
  NPoly constant_term{};

  bool operator==(const InequalityFamily&) const = default;
};

/// Exact evaluation on a partition image. Wide accumulation; the result must
/// fit int64 (guaranteed for N <= 1e5 with catalog-scale coefficients).
std::int64_t eval_inequality_exact(const InequalityFamily& f, const PartitionCorrelators& pc);

/// Floating-point evaluation on a general correlator vector.
/// Throws MissingCorrelator if the vector lacks a label with nonzero coefficient.
double eval_inequality(const InequalityFamily& f, const CorrelatorVector& v);

struct ClassicalReport {
  bool pass = false;
  std::int64_t n_lo = 0, n_hi = 0;
  std::int64_t min_value = 0;
  std::int64_t min_n = 0;
  Partition argmin;
};

/// Exhaustive scan of all C(N+3,3) partitions for each N in [n_lo, n_hi].
ClassicalReport verify_classical_bound(const InequalityFamily& f, std::int64_t n_lo, std::int64_t n_hi);

/// The built-in catalog: I2, I3, I3^(1..17), I4 (20 families).
const std::vector<InequalityFamily>& builtin_catalog();
const InequalityFamily& catalog_family(const std::string& name);

nlohmann::json family_to_json(const InequalityFamily& f);
InequalityFamily family_from_json(const nlohmann::json& j);

} // namespace pibi

#endif
