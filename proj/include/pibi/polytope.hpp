#ifndef PIBI_POLYTOPE_HPP
#define PIBI_POLYTOPE_HPP

#include <vector>

#include "pibi/families.hpp"

namespace pibi {

/// Deduplicated images of all partitions in correlator space (exact integers).
struct VertexSet {
  std::int64_t n_parties = 0;
  int max_order = 2;
  std::vector<std::array<std::int64_t, kMaxLabels>> points;

  int dim() const { return labels_up_to_order(max_order); }
};

inline constexpr std::int64_t kVertexGuardRail = 60;

/// SizeLimit above the guard rail (memory; streaming scans live in families.hpp).
VertexSet enumerate_vertices(std::int64_t n, int max_order);

struct FacetReport {
  bool valid = false;
  std::int64_t min_value = 0;
  std::int64_t tight_count = 0;
  int tight_affine_rank = 0;
  int ambient_affine_dim = 0;
  bool is_facet = false;
};

/// Validity (min over vertices >= 0) and facet status via exact integer ranks
/// of vertex-difference matrices.
FacetReport facet_check(const InequalityFamily& f, std::int64_t n);

/// Exact affine rank helpers (integer arithmetic, no floating point).
int exact_affine_rank(const std::vector<std::array<std::int64_t, kMaxLabels>>& pts, int dim);

} // namespace pibi

#endif
