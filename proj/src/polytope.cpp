#include "pibi/polytope.hpp"

#include <algorithm>

#include <boost/multiprecision/cpp_int.hpp>

namespace pibi {

namespace {

using bigint = boost::multiprecision::cpp_int;

// Incremental exact row-echelon over the rationals (cross-multiplication on
// integer rows, gcd-normalized). Row count is unbounded, rank is <= dim.
class EchelonBasis {
public:
  explicit EchelonBasis(int dim) : dim_(dim) {}

  void add(std::vector<bigint> row) {
    for (const auto& piv : pivots_) {
      const bigint& lead = row[static_cast<std::size_t>(piv.col)];
      if (lead == 0) continue;
      const bigint& plead = piv.row[static_cast<std::size_t>(piv.col)];
      for (int j = 0; j < dim_; ++j)
        row[static_cast<std::size_t>(j)] =
            row[static_cast<std::size_t>(j)] * plead - lead * piv.row[static_cast<std::size_t>(j)];
    }
    int col = -1;
    for (int j = 0; j < dim_; ++j)
      if (row[static_cast<std::size_t>(j)] != 0) { col = j; break; }
    if (col < 0) return;
    bigint g = 0;
    for (const auto& v : row) g = boost::multiprecision::gcd(g, v);
    if (g > 1)
      for (auto& v : row) v /= g;
    pivots_.push_back({col, std::move(row)});
  }

  int rank() const { return static_cast<int>(pivots_.size()); }

private:
  struct Pivot {
    int col;
    std::vector<bigint> row;
  };
  int dim_;
  std::vector<Pivot> pivots_;
};

} // namespace

VertexSet enumerate_vertices(std::int64_t n, int max_order) {
  if (n < 2) fail(ErrorCode::InvalidArgument, "need N >= 2");
  if (n > kVertexGuardRail) fail(ErrorCode::SizeLimit, "vertex materialization capped at N <= 60");
  VertexSet vs;
  vs.n_parties = n;
  vs.max_order = max_order;
  vs.points.reserve(static_cast<std::size_t>(partition_count(n)));
  for_each_partition(n, [&](const Partition& p) {
    vs.points.push_back(eval_partition_correlators(p, max_order).values);
  });
  std::sort(vs.points.begin(), vs.points.end());
  vs.points.erase(std::unique(vs.points.begin(), vs.points.end()), vs.points.end());
  return vs;
}

int exact_affine_rank(const std::vector<std::array<std::int64_t, kMaxLabels>>& pts, int dim) {
  if (pts.size() < 2) return 0;
  EchelonBasis basis(dim);
  const auto& origin = pts.front();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    std::vector<bigint> row(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j)
      row[static_cast<std::size_t>(j)] = pts[i][static_cast<std::size_t>(j)] - origin[static_cast<std::size_t>(j)];
    basis.add(std::move(row));
    if (basis.rank() == dim) break;
  }
  return basis.rank();
}

FacetReport facet_check(const InequalityFamily& f, std::int64_t n) {
  const VertexSet vs = enumerate_vertices(n, f.max_order);
  const int dim = vs.dim();

  FacetReport rep;
  std::vector<std::array<std::int64_t, kMaxLabels>> tight;
  bool first = true;
  for (const auto& pt : vs.points) {
    PartitionCorrelators pc;
    pc.n_parties = n;
    pc.max_order = f.max_order;
    pc.values = pt;
    const std::int64_t val = eval_inequality_exact(f, pc);
    if (first || val < rep.min_value) {
      first = false;
      rep.min_value = val;
    }
    if (val == 0) tight.push_back(pt);
  }
  rep.valid = rep.min_value >= 0;
  rep.tight_count = static_cast<std::int64_t>(tight.size());
  rep.ambient_affine_dim = exact_affine_rank(vs.points, dim);
  rep.tight_affine_rank = exact_affine_rank(tight, dim);
  rep.is_facet = rep.valid && rep.tight_affine_rank == rep.ambient_affine_dim - 1;
  return rep;
}

} // namespace pibi
