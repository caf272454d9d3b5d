#ifndef PIBI_CORRELATORS_HPP
#define PIBI_CORRELATORS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "pibi/errors.hpp"

namespace pibi {

/// Label of a permutationally invariant correlator: a sorted word over the
/// settings {0,1}. Because of permutational symmetry only the length and the
/// number of 1s matter, so that is all we store ("010" canonicalizes to "001").
struct CorrelatorLabel {
  int order = 1; // word length, 1..4
  int ones = 0;  // number of 1s, 0..order

  static CorrelatorLabel parse(std::string_view word);
  std::string str() const;
  bool operator==(const CorrelatorLabel&) const = default;
};

inline constexpr int kMaxOrder = 4;
inline constexpr int kMaxLabels = 14; // 2 + 3 + 4 + 5 for orders 1..4

/// Dense index of a label in the fixed order
/// 0,1,00,01,11,000,001,011,111,0000,0001,0011,0111,1111.
int label_index(CorrelatorLabel lab);
CorrelatorLabel label_at(int index);
/// Number of labels with order <= K (2, 5, 9, 14).
int labels_up_to_order(int k);

/// Four non-negative counts of parties per local deterministic strategy,
/// a+b+c+d = N.
struct Partition {
  std::int64_t a = 0, b = 0, c = 0, d = 0;
  std::int64_t n() const { return a + b + c + d; }
  std::int64_t zeta() const { return a - b - c + d; } // a-b-c+d, |zeta| <= N
  bool operator==(const Partition&) const = default;
};

/// Exact integer correlators of a partition, all labels up to max_order.
struct PartitionCorrelators {
  std::int64_t n_parties = 0;
  int max_order = 2;
  std::array<std::int64_t, kMaxLabels> values{};

  std::int64_t at(CorrelatorLabel lab) const;
};

/// Real-valued correlator vector (quantum points, scaled points, ...).
struct CorrelatorVector {
  std::int64_t n_parties = 0;
  int max_order = 2;
  std::array<double, kMaxLabels> values{};

  double at(CorrelatorLabel lab) const;
  double& slot(CorrelatorLabel lab);
};

CorrelatorVector to_vector(const PartitionCorrelators& pc);

/// Closed-form polynomials for the correlators of a local deterministic
/// strategy class (exact integer arithmetic).
PartitionCorrelators eval_partition_correlators(const Partition& p, int max_order);

std::int64_t partition_count(std::int64_t n); // C(N+3,3)

/// Visit all partitions of N in lexicographic (a,b,c) order.
template <class F>
void for_each_partition(std::int64_t n, F&& fn) {
  for (std::int64_t a = 0; a <= n; ++a)
    for (std::int64_t b = 0; b <= n - a; ++b)
      for (std::int64_t c = 0; c <= n - a - b; ++c)
        fn(Partition{a, b, c, n - a - b - c});
}

} // namespace pibi

#endif
