// SPDX-License-Identifier: Apache-2.0
//
// Simulated multi-rank runtime. Every rank is a thread with no shared
// mutable state; ranks interact only through communicator operations whose
// results are deterministic: point-to-point channels are FIFO per
// (source, dest, tag) and reductions are evaluated in a fixed rank order, so
// repeated runs (and runs with different thread interleavings) produce
// bit-identical floating point results.

#ifndef TMG_COMM_HPP
#define TMG_COMM_HPP

#include <cstring>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "tmg/common.hpp"

namespace tmg {

using Bytes = std::vector<std::uint8_t>;

/// One in-flight point-to-point message.
struct Message {
  int source = -1;
  int tag = 0;
  Bytes payload;
};

/// Per-rank traffic counters, queryable from the owning rank.
/// "data" counts payload-carrying traffic (send/recv, collective payload
/// transport); "sync" counts control messages (barrier tokens, communicator
/// bookkeeping).
struct MsgCounters {
  std::uint64_t data_msgs = 0;
  std::uint64_t data_bytes = 0;
  std::uint64_t sync_msgs = 0;

  std::uint64_t total_msgs() const { return data_msgs + sync_msgs; }
};

namespace detail {
class World;
}

class Comm;

/// Result of a strided communicator split. Every calling rank receives the
/// membership description; only member ranks receive a live communicator.
struct SplitResult {
  std::optional<Comm> sub;     // engaged on member ranks only
  std::vector<int> member_map; // parent ranks of the members, strictly increasing
  int reduction_factor = 1;
  std::uint64_t parent_comm_id = 0;
  int parent_size = 0;

  bool is_member() const { return sub.has_value(); }
  /// Member index that owns parent rank `parent_rank` under row fusion
  /// (the last member absorbs any remainder block).
  int fused_member_of(int parent_rank) const;
  /// Parent ranks fused into member k: [group_begin(k), group_end(k)).
  int group_begin(int member) const { return member_map[static_cast<std::size_t>(member)]; }
  int group_end(int member) const;
};

/// Handle to one rank's view of a communicator. Copyable; confined to the
/// owning rank context.
class Comm {
public:
  Comm() = default;

  int size() const { return size_; }
  int rank() const { return rank_; }
  std::uint64_t id() const { return comm_id_; }
  int world_rank() const { return world_rank_; }
  bool is_world() const { return comm_id_ == 0; }
  std::uint64_t parent_id() const { return parent_id_; }
  bool same_as(const Comm& other) const { return comm_id_ == other.comm_id_; }
  /// For a derived communicator: parent ranks of the members, strictly
  /// increasing. Empty for a world communicator.
  const std::vector<int>& member_map() const { return parent_member_map_; }

  // -- point to point ------------------------------------------------------

  void send(int dest, int tag, std::span<const std::uint8_t> payload) const;
  Bytes recv(int source, int tag) const;

  template <class T>
  void send_values(int dest, int tag, std::span<const T> values) const {
    static_assert(std::is_trivially_copyable_v<T>);
    send(dest, tag,
         std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(values.data()),
                                       values.size() * sizeof(T)));
  }

  template <class T>
  std::vector<T> recv_values(int source, int tag) const {
    static_assert(std::is_trivially_copyable_v<T>);
    Bytes raw = recv(source, tag);
    if (raw.size() % sizeof(T) != 0)
      throw Error("recv_values: payload size " + std::to_string(raw.size()) +
                  " is not a multiple of the element size");
    std::vector<T> out(raw.size() / sizeof(T));
    std::memcpy(out.data(), raw.data(), raw.size());
    return out;
  }

  // -- collectives (must be called by every rank of the communicator) ------

  void barrier() const;
  Bytes broadcast(int root, std::span<const std::uint8_t> payload) const;
  /// Rank-order concatenation at root; empty elsewhere.
  Bytes gatherv(int root, std::span<const std::uint8_t> local) const;
  /// Per-rank parts at root; empty vector elsewhere.
  std::vector<Bytes> gather_parts(int root, std::span<const std::uint8_t> local) const;
  /// parts[k] is delivered to rank k; non-root `parts` are ignored by
  /// contract (they never reach the wire).
  Bytes scatterv(int root, const std::vector<Bytes>& parts) const;

  /// Elementwise sum over equal-length vectors, evaluated left-to-right in
  /// rank order; results are identical on every rank and on every run.
  std::vector<double> allreduce_sum(std::span<const double> local) const;
  double allreduce_max(double local) const;
  std::uint64_t allreduce_max_u64(std::uint64_t local) const;

  /// Left-to-right fold of all local elements in global rank order, starting
  /// from 0.0. Equivalent, bit for bit, to a serial accumulation loop over
  /// the rank-concatenated array; this is the reduction behind dot products.
  double ordered_fold_sum(std::span<const double> local) const;

  /// Collective: ranks with mod(rank, r) = 0 become members of the derived
  /// communicator of size ceil(size/r); everyone learns the membership.
  SplitResult split_strided(int r) const;

  /// Traffic counter snapshot for this rank context.
  MsgCounters counters() const;

private:
  friend class detail::World;
  friend Comm detail_make_world_comm(const std::shared_ptr<detail::World>&, int);

  std::shared_ptr<detail::World> world_;
  std::uint64_t comm_id_ = 0;
  std::uint64_t parent_id_ = 0;
  int rank_ = 0;
  int size_ = 1;
  int world_rank_ = 0;
  std::vector<int> member_map_;        // transport map: world ranks of members
  std::vector<int> parent_member_map_; // parent ranks of members (spec view)

  void check_rank(int r, const char* what) const;
  void send_impl(int dest, int tag, std::span<const std::uint8_t> payload, bool internal) const;
  Bytes recv_impl(int source, int tag, bool internal) const;
  Bytes broadcast_impl(int root, std::span<const std::uint8_t> payload, bool internal) const;
};

namespace detail {

std::shared_ptr<World> make_world(int n_ranks);
Comm make_world_comm(const std::shared_ptr<World>& world, int rank);
void world_abort(const std::shared_ptr<World>& world, int rank, const std::string& what);
void world_rethrow_failure(const std::shared_ptr<World>& world);

} // namespace detail

/// Runs `body` on n rank contexts and collects the per-rank results. Any
/// rank failure aborts the world; the first failure is reported with the
/// failing rank's index. No rank context outlives the call.
template <class F>
auto spawn_world(int n, F&& body) {
  using R = std::invoke_result_t<F&, Comm&>;
  static_assert(!std::is_void_v<R>, "rank bodies must return a value");
  if (n < 1) throw ConfigError("spawn_world: need at least one rank");

  auto world = detail::make_world(n);
  std::vector<std::optional<R>> slots(static_cast<std::size_t>(n));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    threads.emplace_back([&world, &slots, &body, k]() {
      try {
        Comm comm = detail::make_world_comm(world, k);
        slots[static_cast<std::size_t>(k)] = body(comm);
      } catch (const WorldAborted&) {
        // Another rank already failed; the world carries the diagnostic.
      } catch (const std::exception& e) {
        detail::world_abort(world, k, e.what());
      } catch (...) {
        detail::world_abort(world, k, "unknown exception");
      }
    });
  }
  for (auto& t : threads) t.join();
  detail::world_rethrow_failure(world);

  std::vector<R> results;
  results.reserve(static_cast<std::size_t>(n));
  for (auto& s : slots) results.push_back(std::move(*s));
  return results;
}

} // namespace tmg

#endif
