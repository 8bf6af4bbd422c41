// SPDX-License-Identifier: Apache-2.0

#include "tmg/layout.hpp"

#include <algorithm>

namespace tmg {

int Layout::owner(idx_t i) const {
  if (i < 0 || i >= n) throw Error("Layout::owner: index out of range");
  // upper_bound over offsets; skip empty ranges by construction of the search.
  auto it = std::upper_bound(offsets.begin(), offsets.end(), i);
  return static_cast<int>(it - offsets.begin()) - 1;
}

Layout Layout::block_uniform(idx_t n, int n_ranks) {
  Layout lay;
  lay.n = n;
  lay.offsets.resize(static_cast<std::size_t>(n_ranks) + 1);
  const idx_t base = n / n_ranks;
  const idx_t rem = n % n_ranks;
  idx_t at = 0;
  for (int k = 0; k < n_ranks; ++k) {
    lay.offsets[static_cast<std::size_t>(k)] = at;
    at += base + (k < rem ? 1 : 0);
  }
  lay.offsets[static_cast<std::size_t>(n_ranks)] = n;
  return lay;
}

Layout Layout::from_sizes(const std::vector<idx_t>& sizes) {
  Layout lay;
  lay.offsets.resize(sizes.size() + 1);
  lay.offsets[0] = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k)
    lay.offsets[k + 1] = lay.offsets[k] + sizes[k];
  lay.n = lay.offsets.back();
  return lay;
}

} // namespace tmg
