// SPDX-License-Identifier: Apache-2.0

#ifndef TMG_DIST_VECTOR_HPP
#define TMG_DIST_VECTOR_HPP

#include <span>
#include <vector>

#include "tmg/comm.hpp"
#include "tmg/layout.hpp"

namespace tmg {

/// Row-block-partitioned dense vector over a communicator.
class DistVector {
public:
  DistVector() = default;
  DistVector(Comm comm, Layout layout);

  const Comm& comm() const { return comm_; }
  const Layout& layout() const { return layout_; }
  idx_t global_size() const { return layout_.n; }
  idx_t lbegin() const { return layout_.begin(comm_.rank()); }
  idx_t lend() const { return layout_.end(comm_.rank()); }
  idx_t local_size() const { return lend() - lbegin(); }

  std::vector<double>& local() { return local_; }
  const std::vector<double>& local() const { return local_; }
  double& operator[](idx_t local_i) { return local_[static_cast<std::size_t>(local_i)]; }
  double operator[](idx_t local_i) const { return local_[static_cast<std::size_t>(local_i)]; }

  /// Collective: full vector in global order, identical on every rank.
  std::vector<double> gather_global() const;

private:
  Comm comm_;
  Layout layout_;
  std::vector<double> local_;
};

// Deterministic BLAS-1 style operations. Reductions use the rank-ordered
// global fold, so their results do not depend on the partition.
double dot(const DistVector& x, const DistVector& y);
double norm2(const DistVector& x);
double norm_inf(const DistVector& x);
void axpy(double alpha, const DistVector& x, DistVector& y); // y += alpha x
void scale(DistVector& x, double alpha);
void set_all(DistVector& x, double value);

/// Index-keyed reproducible pseudo-random fill; entries depend only on the
/// global index and seed, not on the partition.
void fill_random(DistVector& x, std::uint64_t seed);

} // namespace tmg

#endif
