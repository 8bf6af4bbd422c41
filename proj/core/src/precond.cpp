// SPDX-License-Identifier: Apache-2.0

#include "tmg/precond.hpp"

#include <algorithm>
#include <cmath>

namespace tmg {
namespace local {

DenseLU DenseLU::factor(const CSR& A) {
  DenseLU out;
  out.n = A.n;
  out.lu.assign(static_cast<std::size_t>(A.n * A.n), 0.0);
  out.piv.resize(static_cast<std::size_t>(A.n));
  for (idx_t i = 0; i < A.n; ++i)
    for (idx_t p = A.row_ptr[static_cast<std::size_t>(i)];
         p < A.row_ptr[static_cast<std::size_t>(i) + 1]; ++p)
      out.lu[static_cast<std::size_t>(i * A.n + A.col[static_cast<std::size_t>(p)])] =
          A.val[static_cast<std::size_t>(p)];

  const idx_t n = A.n;
  auto at = [&](idx_t i, idx_t j) -> double& {
    return out.lu[static_cast<std::size_t>(i * n + j)];
  };
  for (idx_t k = 0; k < n; ++k) {
    idx_t p = k;
    double best = std::abs(at(k, k));
    for (idx_t i = k + 1; i < n; ++i)
      if (std::abs(at(i, k)) > best) {
        best = std::abs(at(i, k));
        p = i;
      }
    if (best == 0.0)
      throw Error("lu factorization: matrix is singular at column " + std::to_string(k));
    out.piv[static_cast<std::size_t>(k)] = p;
    if (p != k)
      for (idx_t j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
    const double pivot = at(k, k);
    for (idx_t i = k + 1; i < n; ++i) {
      const double m = at(i, k) / pivot;
      at(i, k) = m;
      if (m == 0.0) continue;
      for (idx_t j = k + 1; j < n; ++j) at(i, j) -= m * at(k, j);
    }
  }
  return out;
}

void DenseLU::solve(const double* b, double* x) const {
  std::vector<double> y(b, b + n);
  for (idx_t k = 0; k < n; ++k) {
    const idx_t p = piv[static_cast<std::size_t>(k)];
    if (p != k) std::swap(y[static_cast<std::size_t>(k)], y[static_cast<std::size_t>(p)]);
    for (idx_t j = 0; j < k; ++j)
      y[static_cast<std::size_t>(k)] -=
          lu[static_cast<std::size_t>(k * n + j)] * y[static_cast<std::size_t>(j)];
  }
  for (idx_t k = n - 1; k >= 0; --k) {
    double acc = y[static_cast<std::size_t>(k)];
    for (idx_t j = k + 1; j < n; ++j)
      acc -= lu[static_cast<std::size_t>(k * n + j)] * x[static_cast<std::size_t>(j)];
    x[static_cast<std::size_t>(k)] = acc / lu[static_cast<std::size_t>(k * n + k)];
    if (k == 0) break;
  }
}

ILU0 ILU0::factor(const CSR& A) {
  ILU0 out;
  out.f = A;
  out.diag.assign(static_cast<std::size_t>(A.n), -1);
  for (idx_t i = 0; i < A.n; ++i)
    for (idx_t p = A.row_ptr[static_cast<std::size_t>(i)];
         p < A.row_ptr[static_cast<std::size_t>(i) + 1]; ++p)
      if (A.col[static_cast<std::size_t>(p)] == i) out.diag[static_cast<std::size_t>(i)] = p;

  CSR& f = out.f;
  // IKJ variant restricted to the pattern.
  for (idx_t i = 0; i < f.n; ++i) {
    for (idx_t p = f.row_ptr[static_cast<std::size_t>(i)];
         p < f.row_ptr[static_cast<std::size_t>(i) + 1]; ++p) {
      const idx_t k = f.col[static_cast<std::size_t>(p)];
      if (k >= i) break; // columns are sorted
      const idx_t dk = out.diag[static_cast<std::size_t>(k)];
      if (dk < 0 || f.val[static_cast<std::size_t>(dk)] == 0.0)
        throw Error("ilu(0): zero pivot in row " + std::to_string(k));
      const double lik = f.val[static_cast<std::size_t>(p)] / f.val[static_cast<std::size_t>(dk)];
      f.val[static_cast<std::size_t>(p)] = lik;
      // Subtract lik * U(k, j) for j in this row's pattern beyond k.
      idx_t q = p + 1;
      idx_t kk = dk + 1;
      const idx_t qe = f.row_ptr[static_cast<std::size_t>(i) + 1];
      const idx_t ke = f.row_ptr[static_cast<std::size_t>(k) + 1];
      while (q < qe && kk < ke) {
        const idx_t cq = f.col[static_cast<std::size_t>(q)];
        const idx_t ck = f.col[static_cast<std::size_t>(kk)];
        if (cq == ck) {
          f.val[static_cast<std::size_t>(q)] -= lik * f.val[static_cast<std::size_t>(kk)];
          ++q;
          ++kk;
        } else if (cq < ck) {
          ++q;
        } else {
          ++kk;
        }
      }
    }
    const idx_t di = out.diag[static_cast<std::size_t>(i)];
    if (di < 0 || f.val[static_cast<std::size_t>(di)] == 0.0)
      throw Error("ilu(0): zero pivot in row " + std::to_string(i));
  }
  return out;
}

void ILU0::solve(const double* b, double* x) const {
  const CSR& m = f;
  // L y = b (unit diagonal).
  std::vector<double> y(static_cast<std::size_t>(m.n));
  for (idx_t i = 0; i < m.n; ++i) {
    double acc = b[static_cast<std::size_t>(i)];
    for (idx_t p = m.row_ptr[static_cast<std::size_t>(i)];
         p < diag[static_cast<std::size_t>(i)]; ++p)
      acc -= m.val[static_cast<std::size_t>(p)] * y[static_cast<std::size_t>(m.col[static_cast<std::size_t>(p)])];
    y[static_cast<std::size_t>(i)] = acc;
  }
  // U x = y.
  for (idx_t i = m.n - 1; i >= 0; --i) {
    double acc = y[static_cast<std::size_t>(i)];
    for (idx_t p = diag[static_cast<std::size_t>(i)] + 1;
         p < m.row_ptr[static_cast<std::size_t>(i) + 1]; ++p)
      acc -= m.val[static_cast<std::size_t>(p)] * x[static_cast<std::size_t>(m.col[static_cast<std::size_t>(p)])];
    x[static_cast<std::size_t>(i)] = acc / m.val[static_cast<std::size_t>(diag[static_cast<std::size_t>(i)])];
    if (i == 0) break;
  }
}

CSR local_diagonal_block(const DistMatrix& A) {
  if (!(A.rows() == A.cols()))
    throw Error("local_diagonal_block: operator must be square on matching layouts");
  const idx_t rb = A.local_row_begin();
  const idx_t n_local = A.local_row_count();
  CSR out;
  out.n = n_local;
  out.row_ptr.assign(static_cast<std::size_t>(n_local) + 1, 0);
  for (idx_t i = 0; i < n_local; ++i) {
    for (idx_t p = A.row_ptr()[static_cast<std::size_t>(i)];
         p < A.row_ptr()[static_cast<std::size_t>(i) + 1]; ++p) {
      const idx_t c = A.col_idx()[static_cast<std::size_t>(p)];
      if (c >= rb && c < rb + n_local) {
        out.col.push_back(c - rb);
        out.val.push_back(A.values()[static_cast<std::size_t>(p)]);
        ++out.row_ptr[static_cast<std::size_t>(i) + 1];
      }
    }
  }
  for (std::size_t k = 1; k < out.row_ptr.size(); ++k) out.row_ptr[k] += out.row_ptr[k - 1];
  return out;
}

} // namespace local

// ---------------------------------------------------------------------------

JacobiPC::JacobiPC(const DistMatrix& A) {
  const idx_t rb = A.local_row_begin();
  const idx_t n_local = A.local_row_count();
  inv_diag_.assign(static_cast<std::size_t>(n_local), 0.0);
  for (idx_t i = 0; i < n_local; ++i) {
    double d = 0.0;
    bool found = false;
    for (idx_t p = A.row_ptr()[static_cast<std::size_t>(i)];
         p < A.row_ptr()[static_cast<std::size_t>(i) + 1]; ++p)
      if (A.col_idx()[static_cast<std::size_t>(p)] == rb + i) {
        d = A.values()[static_cast<std::size_t>(p)];
        found = true;
      }
    if (!found || d == 0.0)
      throw Error("jacobi: zero diagonal entry in row " + std::to_string(rb + i));
    inv_diag_[static_cast<std::size_t>(i)] = 1.0 / d;
  }
}

void JacobiPC::apply(const DistVector& x, DistVector& y) const {
  for (std::size_t i = 0; i < inv_diag_.size(); ++i) y.local()[i] = x.local()[i] * inv_diag_[i];
}

BJacobiPC::BJacobiPC(const DistMatrix& A, SubSolver sub)
    : n_blocks_(A.comm().size()), sub_(sub) {
  const local::CSR block = local::local_diagonal_block(A);
  if (sub_ == SubSolver::lu)
    lu_ = local::DenseLU::factor(block);
  else
    ilu_ = local::ILU0::factor(block);
}

void BJacobiPC::apply(const DistVector& x, DistVector& y) const {
  if (lu_)
    lu_->solve(x.local().data(), y.local().data());
  else
    ilu_->solve(x.local().data(), y.local().data());
}

nlohmann::json BJacobiPC::describe() const {
  return {{"type", "bjacobi"},
          {"blocks", n_blocks_},
          {"sub_pc", sub_ == SubSolver::lu ? "lu" : "ilu"}};
}

ILU0PC::ILU0PC(const DistMatrix& A) {
  if (A.comm().size() != 1)
    throw ConfigError("pc_type ilu runs rank-local factorizations; on more than one rank use "
                      "bjacobi with an ilu sub-solver");
  f_ = local::ILU0::factor(local::local_diagonal_block(A));
}

void ILU0PC::apply(const DistVector& x, DistVector& y) const {
  f_.solve(x.local().data(), y.local().data());
}

LUPC::LUPC(const DistMatrix& A) {
  if (A.comm().size() != 1)
    throw ConfigError("pc_type lu needs a single-rank communicator; repartition first, e.g. "
                      "pc_type telescope with <prefix>telescope_pc_type lu");
  lu_ = local::DenseLU::factor(local::local_diagonal_block(A));
}

void LUPC::apply(const DistVector& x, DistVector& y) const {
  lu_.solve(x.local().data(), y.local().data());
}

} // namespace tmg
