// SPDX-License-Identifier: Apache-2.0

#include "tmg/scatter_plan.hpp"

#include <algorithm>

namespace tmg {

namespace {
enum : int { kTagToSub = 201, kTagFromSub = 202 };

struct Segment {
  idx_t begin = 0;
  idx_t end = 0;
  idx_t size() const { return end - begin; }
};

Segment overlap(idx_t a0, idx_t a1, idx_t b0, idx_t b1) {
  return {std::max(a0, b0), std::min(a1, b1)};
}
} // namespace

ScatterPlan ScatterPlan::create(const Comm& parent, const SplitResult& split, Layout src,
                                Layout dst) {
  if (split.parent_comm_id != parent.id() || split.parent_size != parent.size())
    throw Error("ScatterPlan: split does not derive from this communicator");
  if (src.n_ranks() != parent.size())
    throw Error("ScatterPlan: source layout does not match the parent communicator");
  if (dst.n_ranks() != static_cast<int>(split.member_map.size()))
    throw Error("ScatterPlan: destination layout does not match the sub-communicator");
  if (src.n != dst.n) throw Error("ScatterPlan: layouts must cover the same global size");
  ScatterPlan plan;
  plan.parent_ = parent;
  plan.split_ = split;
  plan.src_ = std::move(src);
  plan.dst_ = std::move(dst);
  return plan;
}

std::optional<DistVector> ScatterPlan::to_sub(const DistVector& x) const {
  if (!x.comm().same_as(parent_) || !(x.layout() == src_))
    throw Error("ScatterPlan::to_sub: vector layout drifted from the plan");
  const int me = parent_.rank();
  const idx_t sb = src_.begin(me);
  const idx_t se = src_.end(me);

  // Send my segments to each destination member (ascending member order;
  // the owner's own segment is copied locally).
  for (std::size_t k = 0; k < split_.member_map.size(); ++k) {
    const int dest_parent = split_.member_map[k];
    if (dest_parent == me) continue;
    const Segment seg = overlap(sb, se, dst_.begin(static_cast<int>(k)),
                                dst_.end(static_cast<int>(k)));
    if (seg.size() <= 0) continue;
    std::span<const double> vals(x.local().data() + (seg.begin - sb),
                                 static_cast<std::size_t>(seg.size()));
    parent_.send_values<double>(dest_parent, kTagToSub, vals);
  }

  if (!split_.is_member()) return std::nullopt;

  const Comm& sub = *split_.sub;
  DistVector out(sub, dst_);
  const idx_t db = dst_.begin(sub.rank());
  const idx_t de = dst_.end(sub.rank());
  for (int src_rank = 0; src_rank < parent_.size(); ++src_rank) {
    const Segment seg = overlap(src_.begin(src_rank), src_.end(src_rank), db, de);
    if (seg.size() <= 0) continue;
    if (src_rank == me) {
      for (idx_t i = seg.begin; i < seg.end; ++i) out[i - db] = x[i - sb];
    } else {
      std::vector<double> vals = parent_.recv_values<double>(src_rank, kTagToSub);
      std::copy(vals.begin(), vals.end(), out.local().begin() + (seg.begin - db));
    }
  }
  return out;
}

DistVector ScatterPlan::from_sub(const std::optional<DistVector>& y) const {
  const int me = parent_.rank();
  if (split_.is_member()) {
    if (!y || !(y->layout() == dst_))
      throw Error("ScatterPlan::from_sub: member rank must pass a conforming sub vector");
    const Comm& sub = *split_.sub;
    const idx_t db = dst_.begin(sub.rank());
    const idx_t de = dst_.end(sub.rank());
    for (int dst_rank = 0; dst_rank < parent_.size(); ++dst_rank) {
      if (dst_rank == me) continue;
      const Segment seg = overlap(db, de, src_.begin(dst_rank), src_.end(dst_rank));
      if (seg.size() <= 0) continue;
      std::span<const double> vals(y->local().data() + (seg.begin - db),
                                   static_cast<std::size_t>(seg.size()));
      parent_.send_values<double>(dst_rank, kTagFromSub, vals);
    }
  }

  DistVector out(parent_, src_);
  const idx_t sb = src_.begin(me);
  const idx_t se = src_.end(me);
  for (std::size_t k = 0; k < split_.member_map.size(); ++k) {
    const int src_parent = split_.member_map[k];
    const Segment seg = overlap(dst_.begin(static_cast<int>(k)), dst_.end(static_cast<int>(k)),
                                sb, se);
    if (seg.size() <= 0) continue;
    if (src_parent == me) {
      const idx_t db = dst_.begin(static_cast<int>(k));
      for (idx_t i = seg.begin; i < seg.end; ++i) out[i - sb] = (*y)[i - db];
    } else {
      std::vector<double> vals = parent_.recv_values<double>(src_parent, kTagFromSub);
      std::copy(vals.begin(), vals.end(), out.local().begin() + (seg.begin - sb));
    }
  }
  return out;
}

} // namespace tmg
