// SPDX-License-Identifier: Apache-2.0

#ifndef TMG_PRECOND_HPP
#define TMG_PRECOND_HPP

#include <memory>
#include <vector>

#include "tmg/dist_matrix.hpp"
#include "tmg/preconditioner.hpp"

namespace tmg {

namespace local {

/// Rank-local CSR block with local column indices.
struct CSR {
  idx_t n = 0;
  std::vector<idx_t> row_ptr;
  std::vector<idx_t> col;
  std::vector<double> val;
};

/// Dense LU with partial pivoting; throws on a singular pivot.
struct DenseLU {
  idx_t n = 0;
  std::vector<double> lu;
  std::vector<idx_t> piv;

  static DenseLU factor(const CSR& A);
  void solve(const double* b, double* x) const;
};

/// ILU(0): L and U share A's sparsity pattern; natural ordering.
struct ILU0 {
  CSR f;                     // factored in place
  std::vector<idx_t> diag;   // position of the diagonal per row

  static ILU0 factor(const CSR& A);
  void solve(const double* b, double* x) const;
};

/// Extracts the diagonal block A(rows, rows) of a square operator with
/// local column renumbering.
CSR local_diagonal_block(const DistMatrix& A);

} // namespace local

/// y_i = x_i / A_ii.
class JacobiPC final : public Preconditioner {
public:
  explicit JacobiPC(const DistMatrix& A);
  void apply(const DistVector& x, DistVector& y) const override;
  std::string kind() const override { return "jacobi"; }

private:
  std::vector<double> inv_diag_;
};

enum class SubSolver { ilu0, lu };

/// One block per rank; the local diagonal block is solved by ILU(0) or LU.
/// Applications involve no inter-rank communication.
class BJacobiPC final : public Preconditioner {
public:
  BJacobiPC(const DistMatrix& A, SubSolver sub);
  void apply(const DistVector& x, DistVector& y) const override;
  std::string kind() const override { return "bjacobi"; }
  nlohmann::json describe() const override;
  int n_blocks() const { return n_blocks_; }

private:
  int n_blocks_ = 0;
  SubSolver sub_;
  std::optional<local::DenseLU> lu_;
  std::optional<local::ILU0> ilu_;
};

/// Rank-local ILU(0) in natural ordering; only meaningful as a global
/// preconditioner on one rank (use bjacobi for the per-block variant).
class ILU0PC final : public Preconditioner {
public:
  explicit ILU0PC(const DistMatrix& A);
  void apply(const DistVector& x, DistVector& y) const override;
  std::string kind() const override { return "ilu"; }

private:
  local::ILU0 f_;
};

/// Exact sequential factorization; restricted to single-rank communicators.
class LUPC final : public Preconditioner {
public:
  explicit LUPC(const DistMatrix& A);
  void apply(const DistVector& x, DistVector& y) const override;
  std::string kind() const override { return "lu"; }

private:
  local::DenseLU lu_;
};

} // namespace tmg

#endif
