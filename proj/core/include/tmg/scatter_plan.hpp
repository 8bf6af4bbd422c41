// SPDX-License-Identifier: Apache-2.0

#ifndef TMG_SCATTER_PLAN_HPP
#define TMG_SCATTER_PLAN_HPP

#include <optional>

#include "tmg/comm.hpp"
#include "tmg/dist_vector.hpp"
#include "tmg/layout.hpp"

namespace tmg {

/// Moves vector entries between a parent-communicator layout and a derived
/// sub-communicator layout. Global indices map identically; only the block
/// boundaries change, so the plan is a bijection and forward followed by
/// reverse application is the identity, bit for bit.
class ScatterPlan {
public:
  ScatterPlan() = default;

  /// Collective over the parent communicator. `src` partitions [0,n) over
  /// the parent ranks, `dst` partitions the same n over the members of the
  /// split.
  static ScatterPlan create(const Comm& parent, const SplitResult& split, Layout src,
                            Layout dst);

  /// Parent layout -> sub layout. Member ranks receive the sub vector;
  /// non-members receive the disengaged marker and block until the transfer
  /// completes.
  std::optional<DistVector> to_sub(const DistVector& x) const;

  /// Sub layout -> parent layout. Member ranks pass their piece; non-members
  /// pass std::nullopt.
  DistVector from_sub(const std::optional<DistVector>& y) const;

  const Layout& src() const { return src_; }
  const Layout& dst() const { return dst_; }
  const SplitResult& split() const { return split_; }

private:
  Comm parent_;
  SplitResult split_;
  Layout src_;
  Layout dst_;
};

} // namespace tmg

#endif
