// SPDX-License-Identifier: Apache-2.0

#include "tmg/comm.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <tuple>

namespace tmg {
namespace detail {

namespace {

// Reserved tags for collective plumbing (separate keyspace from user tags).
enum InternalTag : int {
  kTagBarrierArrive = 1,
  kTagBarrierRelease = 2,
  kTagBcast = 3,
  kTagGather = 4,
  kTagScatter = 5,
  kTagReducePipe = 6,
  kTagReduceBcast = 7,
  kTagSplit = 8,
};

struct ChannelKey {
  std::uint64_t comm;
  bool internal;
  int src;
  int dst;
  int tag;

  bool operator<(const ChannelKey& o) const {
    return std::tie(comm, internal, src, dst, tag) <
           std::tie(o.comm, o.internal, o.src, o.dst, o.tag);
  }
};

} // namespace

class World {
public:
  explicit World(int n)
      : n_ranks_(n), counters_(static_cast<std::size_t>(n)) {}

  void push(const ChannelKey& key, Message msg, std::size_t bytes, bool data) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      throw_if_aborted_locked();
      channels_[key].push_back(std::move(msg));
      auto& sc = counters_[static_cast<std::size_t>(key_world_rank(key.src))];
      if (data) {
        ++sc.data_msgs;
        sc.data_bytes += bytes;
      } else {
        ++sc.sync_msgs;
      }
    }
    cv_.notify_all();
  }

  Message pop(const ChannelKey& key, bool data) {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&]() {
      throw_if_aborted_locked();
      auto it = channels_.find(key);
      return it != channels_.end() && !it->second.empty();
    });
    auto it = channels_.find(key);
    Message msg = std::move(it->second.front());
    it->second.pop_front();
    if (it->second.empty()) channels_.erase(it);
    auto& rc = counters_[static_cast<std::size_t>(key_world_rank(key.dst))];
    if (data) {
      ++rc.data_msgs;
      rc.data_bytes += msg.payload.size();
    } else {
      ++rc.sync_msgs;
    }
    return msg;
  }

  std::uint64_t new_comm_id() {
    std::lock_guard<std::mutex> lock(mu_);
    return next_comm_id_++;
  }

  void abort(int rank, const std::string& what) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (!aborted_) {
        aborted_ = true;
        failed_rank_ = rank;
        reason_ = what;
      }
    }
    cv_.notify_all();
  }

  void rethrow_failure() const {
    std::lock_guard<std::mutex> lock(mu_);
    if (aborted_)
      throw Error("world aborted: rank " + std::to_string(failed_rank_) +
                  " failed: " + reason_);
  }

  MsgCounters counters(int world_rank) const {
    std::lock_guard<std::mutex> lock(mu_);
    return counters_[static_cast<std::size_t>(world_rank)];
  }

  int n_ranks() const { return n_ranks_; }

  // Channel keys carry world ranks in src/dst; see Comm::send_impl.
  static int key_world_rank(int r) { return r; }

private:
  void throw_if_aborted_locked() const {
    if (aborted_)
      throw WorldAborted("world aborted by rank " + std::to_string(failed_rank_));
  }

  const int n_ranks_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<ChannelKey, std::deque<Message>> channels_;
  std::vector<MsgCounters> counters_;
  std::uint64_t next_comm_id_ = 1;
  bool aborted_ = false;
  int failed_rank_ = -1;
  std::string reason_;
};

std::shared_ptr<World> make_world(int n_ranks) { return std::make_shared<World>(n_ranks); }

Comm make_world_comm(const std::shared_ptr<World>& world, int rank) {
  Comm c;
  c.world_ = world;
  c.comm_id_ = 0;
  c.parent_id_ = 0;
  c.rank_ = rank;
  c.size_ = world->n_ranks();
  c.world_rank_ = rank;
  return c;
}

void world_abort(const std::shared_ptr<World>& world, int rank, const std::string& what) {
  world->abort(rank, what);
}

void world_rethrow_failure(const std::shared_ptr<World>& world) { world->rethrow_failure(); }

} // namespace detail

// ---------------------------------------------------------------------------
// SplitResult

int SplitResult::group_end(int member) const {
  const auto m = static_cast<std::size_t>(member);
  return m + 1 < member_map.size() ? member_map[m + 1] : parent_size;
}

int SplitResult::fused_member_of(int parent_rank) const {
  // member_map is strictly increasing and starts at 0.
  int lo = 0;
  for (std::size_t k = 1; k < member_map.size(); ++k) {
    if (member_map[k] <= parent_rank) lo = static_cast<int>(k);
  }
  return lo;
}

// ---------------------------------------------------------------------------
// Comm

void Comm::check_rank(int r, const char* what) const {
  if (r < 0 || r >= size_)
    throw Error(std::string(what) + ": rank " + std::to_string(r) +
                " out of range [0," + std::to_string(size_) + ")");
}

// Channel keys use world ranks so that traffic of nested communicators can
// never collide; the comm id keeps distinct communicators apart even for the
// same rank pair.
void Comm::send_impl(int dest, int tag, std::span<const std::uint8_t> payload,
                     bool internal) const {
  check_rank(dest, "send");
  int dest_world = member_map_.empty() ? dest : member_map_[static_cast<std::size_t>(dest)];
  Message msg;
  msg.source = rank_;
  msg.tag = tag;
  msg.payload.assign(payload.begin(), payload.end());
  const std::size_t bytes = msg.payload.size();
  world_->push(detail::ChannelKey{comm_id_, internal, world_rank_, dest_world, tag},
               std::move(msg), bytes, !internal);
}

Bytes Comm::recv_impl(int source, int tag, bool internal) const {
  check_rank(source, "recv");
  int src_world = member_map_.empty() ? source : member_map_[static_cast<std::size_t>(source)];
  Message msg = world_->pop(detail::ChannelKey{comm_id_, internal, src_world, world_rank_, tag},
                            !internal);
  return std::move(msg.payload);
}

void Comm::send(int dest, int tag, std::span<const std::uint8_t> payload) const {
  send_impl(dest, tag, payload, false);
}

Bytes Comm::recv(int source, int tag) const { return recv_impl(source, tag, false); }

void Comm::barrier() const {
  if (size_ == 1) return;
  const Bytes token;
  if (rank_ == 0) {
    for (int k = 1; k < size_; ++k) (void)recv_impl(k, detail::kTagBarrierArrive, true);
    for (int k = 1; k < size_; ++k) send_impl(k, detail::kTagBarrierRelease, token, true);
  } else {
    send_impl(0, detail::kTagBarrierArrive, token, true);
    (void)recv_impl(0, detail::kTagBarrierRelease, true);
  }
}

Bytes Comm::broadcast_impl(int root, std::span<const std::uint8_t> payload, bool internal) const {
  check_rank(root, "broadcast");
  if (rank_ == root) {
    for (int k = 0; k < size_; ++k)
      if (k != root) send_impl(k, detail::kTagBcast, payload, internal);
    return Bytes(payload.begin(), payload.end());
  }
  return recv_impl(root, detail::kTagBcast, internal);
}

Bytes Comm::broadcast(int root, std::span<const std::uint8_t> payload) const {
  return broadcast_impl(root, payload, false);
}

std::vector<Bytes> Comm::gather_parts(int root, std::span<const std::uint8_t> local) const {
  check_rank(root, "gatherv");
  if (rank_ != root) {
    send_impl(root, detail::kTagGather, local, false);
    return {};
  }
  std::vector<Bytes> parts(static_cast<std::size_t>(size_));
  for (int k = 0; k < size_; ++k) {
    if (k == root)
      parts[static_cast<std::size_t>(k)].assign(local.begin(), local.end());
    else
      parts[static_cast<std::size_t>(k)] = recv_impl(k, detail::kTagGather, false);
  }
  return parts;
}

Bytes Comm::gatherv(int root, std::span<const std::uint8_t> local) const {
  std::vector<Bytes> parts = gather_parts(root, local);
  Bytes out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Bytes Comm::scatterv(int root, const std::vector<Bytes>& parts) const {
  check_rank(root, "scatterv");
  if (rank_ == root) {
    if (parts.size() != static_cast<std::size_t>(size_))
      throw Error("scatterv: expected " + std::to_string(size_) + " parts, got " +
                  std::to_string(parts.size()));
    for (int k = 0; k < size_; ++k)
      if (k != root) send_impl(k, detail::kTagScatter, parts[static_cast<std::size_t>(k)], false);
    return parts[static_cast<std::size_t>(root)];
  }
  return recv_impl(root, detail::kTagScatter, false);
}

// Rank-ordered pipeline: rank 0 seeds the accumulator, each rank folds its
// contribution in turn, the last rank broadcasts. This keeps the reduction
// association fixed regardless of scheduling.
std::vector<double> Comm::allreduce_sum(std::span<const double> local) const {
  if (size_ == 1) return std::vector<double>(local.begin(), local.end());
  std::vector<double> acc;
  if (rank_ == 0) {
    acc.assign(local.begin(), local.end());
  } else {
    acc = recv_values<double>(rank_ - 1, detail::kTagReducePipe);
    if (acc.size() != local.size())
      throw Error("allreduce_sum: rank " + std::to_string(rank_) + " holds " +
                  std::to_string(local.size()) + " entries but the pipeline carries " +
                  std::to_string(acc.size()));
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += local[i];
  }
  if (rank_ + 1 < size_) {
    send_values<double>(rank_ + 1, detail::kTagReducePipe, acc);
    acc = recv_values<double>(size_ - 1, detail::kTagReduceBcast);
  } else {
    for (int k = 0; k < size_ - 1; ++k)
      send_values<double>(k, detail::kTagReduceBcast, acc);
  }
  return acc;
}

double Comm::allreduce_max(double local) const {
  if (size_ == 1) return local;
  double acc = local;
  if (rank_ != 0) {
    double prev = recv_values<double>(rank_ - 1, detail::kTagReducePipe)[0];
    acc = std::max(prev, local);
  }
  if (rank_ + 1 < size_) {
    send_values<double>(rank_ + 1, detail::kTagReducePipe, std::span<const double>(&acc, 1));
    acc = recv_values<double>(size_ - 1, detail::kTagReduceBcast)[0];
  } else {
    for (int k = 0; k < size_ - 1; ++k)
      send_values<double>(k, detail::kTagReduceBcast, std::span<const double>(&acc, 1));
  }
  return acc;
}

std::uint64_t Comm::allreduce_max_u64(std::uint64_t local) const {
  if (size_ == 1) return local;
  std::uint64_t acc = local;
  if (rank_ != 0) {
    std::uint64_t prev = recv_values<std::uint64_t>(rank_ - 1, detail::kTagReducePipe)[0];
    acc = std::max(prev, local);
  }
  if (rank_ + 1 < size_) {
    send_values<std::uint64_t>(rank_ + 1, detail::kTagReducePipe,
                               std::span<const std::uint64_t>(&acc, 1));
    acc = recv_values<std::uint64_t>(size_ - 1, detail::kTagReduceBcast)[0];
  } else {
    for (int k = 0; k < size_ - 1; ++k)
      send_values<std::uint64_t>(k, detail::kTagReduceBcast,
                                 std::span<const std::uint64_t>(&acc, 1));
  }
  return acc;
}

double Comm::ordered_fold_sum(std::span<const double> local) const {
  double acc = 0.0;
  if (rank_ != 0) acc = recv_values<double>(rank_ - 1, detail::kTagReducePipe)[0];
  for (double v : local) acc += v;
  if (size_ == 1) return acc;
  if (rank_ + 1 < size_) {
    send_values<double>(rank_ + 1, detail::kTagReducePipe, std::span<const double>(&acc, 1));
    acc = recv_values<double>(size_ - 1, detail::kTagReduceBcast)[0];
  } else {
    for (int k = 0; k < size_ - 1; ++k)
      send_values<double>(k, detail::kTagReduceBcast, std::span<const double>(&acc, 1));
  }
  return acc;
}

SplitResult Comm::split_strided(int r) const {
  if (r < 1) throw ConfigError("split_strided: reduction factor must be >= 1");

  SplitResult result;
  result.reduction_factor = r;
  result.parent_comm_id = comm_id_;
  result.parent_size = size_;
  for (int k = 0; k < size_; k += r) result.member_map.push_back(k);

  // Agree on an id for the derived communicator. The id is bookkeeping only;
  // it never feeds numerical results.
  std::uint64_t id = rank_ == 0 ? world_->new_comm_id() : 0;
  {
    Bytes raw(sizeof(id));
    std::memcpy(raw.data(), &id, sizeof(id));
    Bytes got = broadcast_impl(0, raw, true);
    std::memcpy(&id, got.data(), sizeof(id));
  }

  if (rank_ % r != 0) return result; // non-member marker

  Comm sub;
  sub.world_ = world_;
  sub.comm_id_ = id;
  sub.parent_id_ = comm_id_;
  sub.rank_ = rank_ / r;
  sub.size_ = static_cast<int>(result.member_map.size());
  sub.world_rank_ = world_rank_;
  sub.parent_member_map_ = result.member_map;
  // Transport-level member map in world ranks.
  sub.member_map_.reserve(result.member_map.size());
  for (int parent_rank : result.member_map) {
    int wr = member_map_.empty() ? parent_rank : member_map_[static_cast<std::size_t>(parent_rank)];
    sub.member_map_.push_back(wr);
  }
  result.sub = std::move(sub);
  return result;
}

MsgCounters Comm::counters() const { return world_->counters(world_rank_); }

} // namespace tmg
