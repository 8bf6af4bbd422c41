// SPDX-License-Identifier: Apache-2.0

#ifndef TMG_LAYOUT_HPP
#define TMG_LAYOUT_HPP

#include <vector>

#include "tmg/common.hpp"

namespace tmg {

/// Contiguous, rank-ordered row partition of [0, n): rank k owns
/// [offsets[k], offsets[k+1]). Ranges may be empty.
struct Layout {
  idx_t n = 0;
  std::vector<idx_t> offsets; // n_ranks + 1 entries

  int n_ranks() const { return static_cast<int>(offsets.size()) - 1; }
  idx_t begin(int rank) const { return offsets[static_cast<std::size_t>(rank)]; }
  idx_t end(int rank) const { return offsets[static_cast<std::size_t>(rank) + 1]; }
  idx_t local_size(int rank) const { return end(rank) - begin(rank); }

  /// Rank owning global index i (ranges with zero width never own anything).
  int owner(idx_t i) const;

  /// Near-equal contiguous split: sizes differ by at most one, larger blocks
  /// first.
  static Layout block_uniform(idx_t n, int n_ranks);
  /// Layout from per-rank sizes.
  static Layout from_sizes(const std::vector<idx_t>& sizes);

  bool operator==(const Layout&) const = default;
};

} // namespace tmg

#endif
