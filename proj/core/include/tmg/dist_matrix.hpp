// SPDX-License-Identifier: Apache-2.0

#ifndef TMG_DIST_MATRIX_HPP
#define TMG_DIST_MATRIX_HPP

#include <memory>
#include <optional>
#include <vector>

#include "tmg/comm.hpp"
#include "tmg/dist_vector.hpp"
#include "tmg/layout.hpp"

namespace tmg {

struct NullSpace;

/// Row-block-partitioned CSR matrix. Column indices are global and strictly
/// ascending within each row. `rows` matches the DistVector convention for
/// y in y = A x; `cols` is the layout of compatible x vectors.
class DistMatrix {
public:
  DistMatrix() = default;

  const Comm& comm() const { return comm_; }
  const Layout& rows() const { return rows_; }
  const Layout& cols() const { return cols_; }
  idx_t n_rows() const { return rows_.n; }
  idx_t n_cols() const { return cols_.n; }
  idx_t local_row_begin() const { return rows_.begin(comm_.rank()); }
  idx_t local_row_count() const { return rows_.local_size(comm_.rank()); }

  const std::vector<idx_t>& row_ptr() const { return row_ptr_; }
  const std::vector<idx_t>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return val_; }
  std::vector<double>& values() { return val_; }

  std::shared_ptr<const NullSpace> nullspace() const { return nullspace_; }
  void set_nullspace(std::shared_ptr<const NullSpace> ns) { nullspace_ = std::move(ns); }

  /// Collective: dense row-major n_rows x n_cols copy, identical everywhere.
  std::vector<double> gather_dense() const;
  /// Collective: global nonzeros as (row, col, value) triples in row-major
  /// CSR order, identical everywhere.
  std::vector<std::tuple<idx_t, idx_t, double>> gather_triples() const;

private:
  friend class MatrixAssembler;
  friend DistMatrix transpose(const DistMatrix&);
  friend DistMatrix spgemm(const DistMatrix&, const DistMatrix&);
  friend std::optional<DistMatrix> redistribute_rows(const DistMatrix&, const SplitResult&);
  friend void spmv(const DistMatrix&, const DistVector&, DistVector&);

  Comm comm_;
  Layout rows_;
  Layout cols_;
  std::vector<idx_t> row_ptr_;
  std::vector<idx_t> col_idx_;
  std::vector<double> val_;
  std::shared_ptr<const NullSpace> nullspace_;

  // SpMV column map: which remote x entries this rank needs and which local
  // entries it serves to others. Rebuilt whenever the structure changes.
  struct Halo {
    std::vector<idx_t> need;                          // sorted remote global columns
    std::vector<std::pair<int, std::size_t>> sources; // (owner, count) in `need` order
    std::vector<std::vector<idx_t>> serve;            // per rank: local x indices to send
  };
  Halo halo_;

  void build_halo();
  double ghost_value(const std::vector<double>& ghosts, idx_t gcol) const;
};

/// Rank-local COO assembly into a DistMatrix; duplicate entries are summed.
/// finalize() is collective (it builds the SpMV column map).
class MatrixAssembler {
public:
  MatrixAssembler(Comm comm, Layout rows, Layout cols);

  void add(idx_t global_row, idx_t global_col, double value);
  DistMatrix finalize();

private:
  Comm comm_;
  Layout rows_;
  Layout cols_;
  std::vector<std::tuple<idx_t, idx_t, double>> coo_;
  bool finalized_ = false;
};

/// y = A x (collective).
void spmv(const DistMatrix& A, const DistVector& x, DistVector& y);
DistVector spmv(const DistMatrix& A, const DistVector& x);

/// Global transpose with rows partitioned like A's column layout.
DistMatrix transpose(const DistMatrix& A);

/// C = A B. Contributions to each entry are folded in ascending order of the
/// summation index, so results do not depend on the partition.
DistMatrix spgemm(const DistMatrix& A, const DistMatrix& B);

/// Ptranspose * A * P, computed as two sparse products with an explicit
/// transpose; result rows are partitioned by P's column layout.
DistMatrix ptap(const DistMatrix& P, const DistMatrix& A);

/// Row-fusing redistribution onto the derived communicator: member k of the
/// split owns the concatenated row blocks of its parent-rank group, in order.
/// Runs in two phases: per-rank sequential intermediates (local copy plus
/// point-to-point transfers), then assembly of the sub-communicator CSR.
/// Non-members participate in phase one and receive an empty result.
std::optional<DistMatrix> redistribute_rows(const DistMatrix& A, const SplitResult& split);

/// Identity matrix on the given square layout.
DistMatrix dist_identity(const Comm& comm, const Layout& lay);

/// Collective: every rank asks for a set of global rows (sorted, unique) and
/// receives their CSR content (global column indices).
std::map<idx_t, std::pair<std::vector<idx_t>, std::vector<double>>> fetch_matrix_rows(
    const DistMatrix& A, const std::vector<idx_t>& wanted);

/// Layout whose rank-k block is the concatenation of the parent blocks fused
/// into member k by the split.
Layout fused_layout(const Layout& parent_layout, const SplitResult& split);

} // namespace tmg

#endif
