#include "pibi/correlators.hpp"

#include <algorithm>

namespace pibi {

namespace {
constexpr std::array<CorrelatorLabel, kMaxLabels> kLabels = {{
    {1, 0}, {1, 1},                          // 0 1
    {2, 0}, {2, 1}, {2, 2},                  // 00 01 11
    {3, 0}, {3, 1}, {3, 2}, {3, 3},          // 000 001 011 111
    {4, 0}, {4, 1}, {4, 2}, {4, 3}, {4, 4},  // 0000 0001 0011 0111 1111
}};
constexpr std::array<int, kMaxOrder + 1> kOffset = {0, 0, 2, 5, 9};
} // namespace

CorrelatorLabel CorrelatorLabel::parse(std::string_view word) {
  if (word.empty() || word.size() > kMaxOrder)
    fail(ErrorCode::InvalidArgument, "correlator label must have length 1..4: '" + std::string(word) + "'");
  int ones = 0;
  for (char ch : word) {
    if (ch == '1')
      ++ones;
    else if (ch != '0')
      fail(ErrorCode::InvalidArgument, "correlator label may contain only 0/1: '" + std::string(word) + "'");
  }
  return {static_cast<int>(word.size()), ones};
}

std::string CorrelatorLabel::str() const {
  return std::string(static_cast<std::size_t>(order - ones), '0') + std::string(static_cast<std::size_t>(ones), '1');
}

int label_index(CorrelatorLabel lab) {
  if (lab.order < 1 || lab.order > kMaxOrder || lab.ones < 0 || lab.ones > lab.order)
    fail(ErrorCode::InvalidArgument, "bad correlator label");
  return kOffset[static_cast<std::size_t>(lab.order)] + lab.ones;
}

CorrelatorLabel label_at(int index) {
  if (index < 0 || index >= kMaxLabels) fail(ErrorCode::InvalidArgument, "label index out of range");
  return kLabels[static_cast<std::size_t>(index)];
}

int labels_up_to_order(int k) {
  if (k < 1 || k > kMaxOrder) fail(ErrorCode::InvalidArgument, "order must be 1..4");
  static constexpr std::array<int, kMaxOrder + 1> counts = {0, 2, 5, 9, 14};
  return counts[static_cast<std::size_t>(k)];
}

std::int64_t PartitionCorrelators::at(CorrelatorLabel lab) const {
  const int idx = label_index(lab);
  if (idx >= labels_up_to_order(max_order))
    fail(ErrorCode::MissingCorrelator, "correlator " + lab.str() + " beyond stored order");
  return values[static_cast<std::size_t>(idx)];
}

double CorrelatorVector::at(CorrelatorLabel lab) const {
  const int idx = label_index(lab);
  if (idx >= labels_up_to_order(max_order))
    fail(ErrorCode::MissingCorrelator, "correlator " + lab.str() + " beyond stored order");
  return values[static_cast<std::size_t>(idx)];
}

double& CorrelatorVector::slot(CorrelatorLabel lab) {
  const int idx = label_index(lab);
  if (idx >= labels_up_to_order(max_order))
    fail(ErrorCode::MissingCorrelator, "correlator " + lab.str() + " beyond stored order");
  return values[static_cast<std::size_t>(idx)];
}

CorrelatorVector to_vector(const PartitionCorrelators& pc) {
  CorrelatorVector v;
  v.n_parties = pc.n_parties;
  v.max_order = pc.max_order;
  for (int i = 0; i < labels_up_to_order(pc.max_order); ++i)
    v.values[static_cast<std::size_t>(i)] = static_cast<double>(pc.values[static_cast<std::size_t>(i)]);
  return v;
}

PartitionCorrelators eval_partition_correlators(const Partition& p, int max_order) {
  if (p.a < 0 || p.b < 0 || p.c < 0 || p.d < 0)
    fail(ErrorCode::InvalidArgument, "partition counts must be non-negative");
  if (max_order < 2 || max_order > kMaxOrder)
    fail(ErrorCode::InvalidArgument, "max_order must be 2..4");

  const std::int64_t n = p.n();
  const std::int64_t s0 = p.a + p.b - p.c - p.d;
  const std::int64_t s1 = p.a - p.b + p.c - p.d;
  const std::int64_t z = p.zeta();

  PartitionCorrelators out;
  out.n_parties = n;
  out.max_order = max_order;
  auto set = [&out](int order, int ones, std::int64_t v) {
    out.values[static_cast<std::size_t>(label_index({order, ones}))] = v;
  };

  set(1, 0, s0);
  set(1, 1, s1);
  set(2, 0, s0 * s0 - n);
  set(2, 1, s0 * s1 - z);
  set(2, 2, s1 * s1 - n);
  if (max_order >= 3) {
    set(3, 0, s0 * s0 * s0 + 2 * s0 - 3 * n * s0);
    set(3, 1, s0 * s0 * s1 + 2 * s1 - n * s1 - 2 * z * s0);
    set(3, 2, s0 * s1 * s1 + 2 * s0 - n * s0 - 2 * z * s1);
    set(3, 3, s1 * s1 * s1 + 2 * s1 - 3 * n * s1);
  }
  if (max_order >= 4) {
    set(4, 0, s0 * s0 * s0 * s0 - 6 * n + 3 * n * n - 6 * n * s0 * s0 + 8 * s0 * s0);
    set(4, 1, s0 * s0 * s0 * s1 - 6 * z + 3 * n * z - 3 * n * s0 * s1 - 3 * z * s0 * s0 + 8 * s0 * s1);
    set(4, 2, s0 * s0 * s1 * s1 - 6 * n + n * n + 2 * z * z - n * s1 * s1 - n * s0 * s0 - 4 * z * s0 * s1 +
                  4 * s1 * s1 + 4 * s0 * s0);
    set(4, 3, s0 * s1 * s1 * s1 - 6 * z + 3 * n * z - 3 * n * s0 * s1 - 3 * z * s1 * s1 + 8 * s0 * s1);
    set(4, 4, s1 * s1 * s1 * s1 - 6 * n + 3 * n * n - 6 * n * s1 * s1 + 8 * s1 * s1);
  }
  return out;
}

std::int64_t partition_count(std::int64_t n) {
  return (n + 1) * (n + 2) * (n + 3) / 6;
}

} // namespace pibi
