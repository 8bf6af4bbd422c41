// SPDX-License-Identifier: Apache-2.0

#include "tmg/dist_matrix.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <tuple>

namespace tmg {

namespace {

// Tags for matrix-level exchanges on top of the comm layer.
enum : int {
  kTagHaloReq = 101,
  kTagHaloVal = 102,
  kTagRowFetchReq = 103,
  kTagRowFetchDat = 104,
  kTagTriples = 105,
  kTagRedistRows = 106,
};

template <class T>
std::span<const std::uint8_t> as_bytes(const std::vector<T>& v) {
  return {reinterpret_cast<const std::uint8_t*>(v.data()), v.size() * sizeof(T)};
}

template <class T>
std::vector<T> from_bytes(const Bytes& raw) {
  std::vector<T> out(raw.size() / sizeof(T));
  std::memcpy(out.data(), raw.data(), raw.size());
  return out;
}

// Packs a set of CSR rows (lengths, columns, values) for the wire.
struct PackedRows {
  std::vector<idx_t> meta; // one length per row
  std::vector<idx_t> cols;
  std::vector<double> vals;

  Bytes serialize() const {
    Bytes out;
    auto append = [&out](const void* p, std::size_t bytes) {
      const auto* b = static_cast<const std::uint8_t*>(p);
      out.insert(out.end(), b, b + bytes);
    };
    const idx_t n_rows = static_cast<idx_t>(meta.size());
    const idx_t n_nz = static_cast<idx_t>(cols.size());
    append(&n_rows, sizeof(idx_t));
    append(&n_nz, sizeof(idx_t));
    append(meta.data(), meta.size() * sizeof(idx_t));
    append(cols.data(), cols.size() * sizeof(idx_t));
    append(vals.data(), vals.size() * sizeof(double));
    return out;
  }

  static PackedRows deserialize(const Bytes& raw) {
    PackedRows pr;
    std::size_t at = 0;
    auto take = [&raw, &at](void* p, std::size_t bytes) {
      std::memcpy(p, raw.data() + at, bytes);
      at += bytes;
    };
    idx_t n_rows = 0, n_nz = 0;
    take(&n_rows, sizeof(idx_t));
    take(&n_nz, sizeof(idx_t));
    pr.meta.resize(static_cast<std::size_t>(n_rows));
    pr.cols.resize(static_cast<std::size_t>(n_nz));
    pr.vals.resize(static_cast<std::size_t>(n_nz));
    take(pr.meta.data(), pr.meta.size() * sizeof(idx_t));
    take(pr.cols.data(), pr.cols.size() * sizeof(idx_t));
    take(pr.vals.data(), pr.vals.size() * sizeof(double));
    return pr;
  }
};

} // namespace

// ---------------------------------------------------------------------------
// MatrixAssembler

MatrixAssembler::MatrixAssembler(Comm comm, Layout rows, Layout cols)
    : comm_(std::move(comm)), rows_(std::move(rows)), cols_(std::move(cols)) {
  if (rows_.n_ranks() != comm_.size() || cols_.n_ranks() != comm_.size())
    throw Error("MatrixAssembler: layouts do not match communicator size");
}

void MatrixAssembler::add(idx_t global_row, idx_t global_col, double value) {
  if (global_row < rows_.begin(comm_.rank()) || global_row >= rows_.end(comm_.rank()))
    throw Error("MatrixAssembler::add: row " + std::to_string(global_row) +
                " is not owned by rank " + std::to_string(comm_.rank()));
  if (global_col < 0 || global_col >= cols_.n)
    throw Error("MatrixAssembler::add: column out of range");
  coo_.emplace_back(global_row, global_col, value);
}

DistMatrix MatrixAssembler::finalize() {
  if (finalized_) throw Error("MatrixAssembler: finalize called twice");
  finalized_ = true;

  std::stable_sort(coo_.begin(), coo_.end(), [](const auto& a, const auto& b) {
    return std::make_pair(std::get<0>(a), std::get<1>(a)) <
           std::make_pair(std::get<0>(b), std::get<1>(b));
  });

  DistMatrix A;
  A.comm_ = comm_;
  A.rows_ = rows_;
  A.cols_ = cols_;
  const idx_t row0 = rows_.begin(comm_.rank());
  const idx_t n_local = rows_.local_size(comm_.rank());
  A.row_ptr_.assign(static_cast<std::size_t>(n_local) + 1, 0);

  for (std::size_t i = 0; i < coo_.size();) {
    const auto [r, c, v0] = coo_[i];
    double v = v0;
    std::size_t j = i + 1;
    while (j < coo_.size() && std::get<0>(coo_[j]) == r && std::get<1>(coo_[j]) == c) {
      v += std::get<2>(coo_[j]);
      ++j;
    }
    A.col_idx_.push_back(c);
    A.val_.push_back(v);
    ++A.row_ptr_[static_cast<std::size_t>(r - row0) + 1];
    i = j;
  }
  for (std::size_t k = 1; k < A.row_ptr_.size(); ++k) A.row_ptr_[k] += A.row_ptr_[k - 1];
  coo_.clear();

  A.build_halo();
  return A;
}

// ---------------------------------------------------------------------------
// DistMatrix

void DistMatrix::build_halo() {
  halo_ = Halo{};
  const int me = comm_.rank();
  const int size = comm_.size();
  const idx_t cb = cols_.begin(me);
  const idx_t ce = cols_.end(me);

  std::vector<idx_t> need;
  for (idx_t c : col_idx_)
    if (c < cb || c >= ce) need.push_back(c);
  std::sort(need.begin(), need.end());
  need.erase(std::unique(need.begin(), need.end()), need.end());
  halo_.need = std::move(need);

  // Request lists per owner.
  std::vector<std::vector<idx_t>> request(static_cast<std::size_t>(size));
  for (idx_t c : halo_.need)
    request[static_cast<std::size_t>(cols_.owner(c))].push_back(c);
  for (int k = 0; k < size; ++k) {
    if (!request[static_cast<std::size_t>(k)].empty())
      halo_.sources.emplace_back(k, request[static_cast<std::size_t>(k)].size());
  }

  // Everyone tells everyone what it needs (empty messages included so the
  // exchange always matches).
  halo_.serve.assign(static_cast<std::size_t>(size), {});
  for (int k = 0; k < size; ++k) {
    if (k == me) continue;
    comm_.send_values<idx_t>(k, kTagHaloReq, request[static_cast<std::size_t>(k)]);
  }
  for (int k = 0; k < size; ++k) {
    if (k == me) continue;
    std::vector<idx_t> theirs = comm_.recv_values<idx_t>(k, kTagHaloReq);
    auto& srv = halo_.serve[static_cast<std::size_t>(k)];
    srv.reserve(theirs.size());
    for (idx_t c : theirs) srv.push_back(c - cb);
  }
}

double DistMatrix::ghost_value(const std::vector<double>& ghosts, idx_t gcol) const {
  auto it = std::lower_bound(halo_.need.begin(), halo_.need.end(), gcol);
  return ghosts[static_cast<std::size_t>(it - halo_.need.begin())];
}

void spmv(const DistMatrix& A, const DistVector& x, DistVector& y) {
  if (!A.comm().same_as(x.comm()) || !(A.cols() == x.layout()))
    throw Error("spmv: x layout does not conform to the matrix columns");
  if (!(A.rows() == y.layout()))
    throw Error("spmv: y layout does not conform to the matrix rows");

  // Serve the values other ranks need, then collect our ghosts. Sends are
  // buffered, so send-before-receive cannot deadlock.
  for (int k = 0; k < A.comm().size(); ++k) {
    if (k == A.comm().rank()) continue;
    const auto& srv = A.halo_.serve[static_cast<std::size_t>(k)];
    if (srv.empty()) continue;
    std::vector<double> vals(srv.size());
    for (std::size_t i = 0; i < srv.size(); ++i)
      vals[i] = x.local()[static_cast<std::size_t>(srv[i])];
    A.comm().send_values<double>(k, kTagHaloVal, vals);
  }
  std::vector<double> ghosts(A.halo_.need.size());
  {
    std::size_t at = 0;
    for (const auto& [owner, count] : A.halo_.sources) {
      std::vector<double> vals = A.comm().recv_values<double>(owner, kTagHaloVal);
      if (vals.size() != count) throw Error("spmv: halo exchange size mismatch");
      std::copy(vals.begin(), vals.end(), ghosts.begin() + static_cast<std::ptrdiff_t>(at));
      at += count;
    }
  }

  const idx_t cb = A.cols().begin(A.comm().rank());
  const idx_t ce = A.cols().end(A.comm().rank());
  const idx_t n_local = A.local_row_count();
  for (idx_t i = 0; i < n_local; ++i) {
    double acc = 0.0;
    for (idx_t p = A.row_ptr()[static_cast<std::size_t>(i)];
         p < A.row_ptr()[static_cast<std::size_t>(i) + 1]; ++p) {
      const idx_t c = A.col_idx()[static_cast<std::size_t>(p)];
      const double xv = (c >= cb && c < ce) ? x.local()[static_cast<std::size_t>(c - cb)]
                                            : A.ghost_value(ghosts, c);
      acc += A.values()[static_cast<std::size_t>(p)] * xv;
    }
    y[i] = acc;
  }
}

DistVector spmv(const DistMatrix& A, const DistVector& x) {
  DistVector y(A.comm(), A.rows());
  spmv(A, x, y);
  return y;
}

std::vector<std::tuple<idx_t, idx_t, double>> DistMatrix::gather_triples() const {
  PackedRows pr;
  const idx_t n_local = local_row_count();
  pr.meta.reserve(static_cast<std::size_t>(n_local));
  for (idx_t i = 0; i < n_local; ++i)
    pr.meta.push_back(row_ptr_[static_cast<std::size_t>(i) + 1] -
                      row_ptr_[static_cast<std::size_t>(i)]);
  pr.cols = col_idx_;
  pr.vals = val_;

  Bytes mine = pr.serialize();
  std::vector<Bytes> parts = comm_.gather_parts(0, mine);
  Bytes packed;
  if (comm_.rank() == 0) {
    PackedRows all;
    for (int k = 0; k < comm_.size(); ++k) {
      PackedRows part = PackedRows::deserialize(parts[static_cast<std::size_t>(k)]);
      all.meta.insert(all.meta.end(), part.meta.begin(), part.meta.end());
      all.cols.insert(all.cols.end(), part.cols.begin(), part.cols.end());
      all.vals.insert(all.vals.end(), part.vals.begin(), part.vals.end());
    }
    packed = all.serialize();
  }
  PackedRows all = PackedRows::deserialize(comm_.broadcast(0, packed));
  std::vector<std::tuple<idx_t, idx_t, double>> out;
  out.reserve(all.cols.size());
  idx_t row = 0;
  std::size_t at = 0;
  for (idx_t len : all.meta) {
    for (idx_t j = 0; j < len; ++j, ++at) out.emplace_back(row, all.cols[at], all.vals[at]);
    ++row;
  }
  return out;
}

std::vector<double> DistMatrix::gather_dense() const {
  auto triples = gather_triples();
  std::vector<double> dense(static_cast<std::size_t>(rows_.n * cols_.n), 0.0);
  for (const auto& [r, c, v] : triples)
    dense[static_cast<std::size_t>(r * cols_.n + c)] += v;
  return dense;
}

// ---------------------------------------------------------------------------
// transpose / spgemm / ptap

DistMatrix transpose(const DistMatrix& A) {
  const Comm& comm = A.comm();
  const int size = comm.size();
  const int me = comm.rank();

  // Route each local entry (i, j, v) to the owner of transposed row j.
  std::vector<PackedRows> outgoing(static_cast<std::size_t>(size));
  std::vector<std::vector<std::tuple<idx_t, idx_t, double>>> buckets(
      static_cast<std::size_t>(size));
  const idx_t row0 = A.local_row_begin();
  for (idx_t i = 0; i < A.local_row_count(); ++i) {
    for (idx_t p = A.row_ptr()[static_cast<std::size_t>(i)];
         p < A.row_ptr()[static_cast<std::size_t>(i) + 1]; ++p) {
      const idx_t j = A.col_idx()[static_cast<std::size_t>(p)];
      const int owner = A.cols().owner(j);
      buckets[static_cast<std::size_t>(owner)].emplace_back(
          j, row0 + i, A.values()[static_cast<std::size_t>(p)]);
    }
  }
  for (int k = 0; k < size; ++k) {
    auto& b = buckets[static_cast<std::size_t>(k)];
    PackedRows pr;
    pr.meta.reserve(b.size());
    for (const auto& [r, c, v] : b) {
      pr.meta.push_back(r);
      pr.cols.push_back(c);
      pr.vals.push_back(v);
    }
    outgoing[static_cast<std::size_t>(k)] = std::move(pr);
  }

  std::vector<std::tuple<idx_t, idx_t, double>> mine;
  for (int k = 0; k < size; ++k) {
    if (k == me) continue;
    comm.send(k, kTagTriples, outgoing[static_cast<std::size_t>(k)].serialize());
  }
  {
    const auto& own = outgoing[static_cast<std::size_t>(me)];
    for (std::size_t t = 0; t < own.meta.size(); ++t)
      mine.emplace_back(own.meta[t], own.cols[t], own.vals[t]);
  }
  for (int k = 0; k < size; ++k) {
    if (k == me) continue;
    PackedRows got = PackedRows::deserialize(comm.recv(k, kTagTriples));
    for (std::size_t t = 0; t < got.meta.size(); ++t)
      mine.emplace_back(got.meta[t], got.cols[t], got.vals[t]);
  }

  // (row, col) pairs are unique in a transpose; plain sort is canonical.
  std::sort(mine.begin(), mine.end(), [](const auto& a, const auto& b) {
    return std::make_pair(std::get<0>(a), std::get<1>(a)) <
           std::make_pair(std::get<0>(b), std::get<1>(b));
  });

  DistMatrix T;
  T.comm_ = comm;
  T.rows_ = A.cols();
  T.cols_ = A.rows();
  const idx_t t_row0 = T.rows_.begin(me);
  const idx_t t_local = T.rows_.local_size(me);
  T.row_ptr_.assign(static_cast<std::size_t>(t_local) + 1, 0);
  for (const auto& [r, c, v] : mine) {
    T.col_idx_.push_back(c);
    T.val_.push_back(v);
    ++T.row_ptr_[static_cast<std::size_t>(r - t_row0) + 1];
  }
  for (std::size_t k = 1; k < T.row_ptr_.size(); ++k) T.row_ptr_[k] += T.row_ptr_[k - 1];
  T.build_halo();
  return T;
}

namespace {

// Fetch the CSR rows of B listed in `wanted` (global ids, sorted unique).
// Returns a map from global row id to (cols, vals).
std::map<idx_t, std::pair<std::vector<idx_t>, std::vector<double>>> fetch_rows(
    const DistMatrix& B, const std::vector<idx_t>& wanted) {
  const Comm& comm = B.comm();
  const int size = comm.size();
  const int me = comm.rank();
  const idx_t row0 = B.local_row_begin();

  std::vector<std::vector<idx_t>> req(static_cast<std::size_t>(size));
  for (idx_t r : wanted) req[static_cast<std::size_t>(B.rows().owner(r))].push_back(r);

  for (int k = 0; k < size; ++k) {
    if (k == me) continue;
    comm.send_values<idx_t>(k, kTagRowFetchReq, req[static_cast<std::size_t>(k)]);
  }

  auto pack_rows = [&](const std::vector<idx_t>& rows) {
    PackedRows pr;
    for (idx_t r : rows) {
      const idx_t li = r - row0;
      const idx_t b = B.row_ptr()[static_cast<std::size_t>(li)];
      const idx_t e = B.row_ptr()[static_cast<std::size_t>(li) + 1];
      pr.meta.push_back(e - b);
      for (idx_t p = b; p < e; ++p) {
        pr.cols.push_back(B.col_idx()[static_cast<std::size_t>(p)]);
        pr.vals.push_back(B.values()[static_cast<std::size_t>(p)]);
      }
    }
    return pr;
  };

  for (int k = 0; k < size; ++k) {
    if (k == me) continue;
    std::vector<idx_t> theirs = comm.recv_values<idx_t>(k, kTagRowFetchReq);
    comm.send(k, kTagRowFetchDat, pack_rows(theirs).serialize());
  }

  std::map<idx_t, std::pair<std::vector<idx_t>, std::vector<double>>> got;
  for (int k = 0; k < size; ++k) {
    const auto& rows = req[static_cast<std::size_t>(k)];
    PackedRows pr;
    if (k == me)
      pr = pack_rows(rows);
    else
      pr = PackedRows::deserialize(comm.recv(k, kTagRowFetchDat));
    std::size_t at = 0;
    for (std::size_t t = 0; t < rows.size(); ++t) {
      const auto len = static_cast<std::size_t>(pr.meta[t]);
      auto& slot = got[rows[t]];
      slot.first.assign(pr.cols.begin() + static_cast<std::ptrdiff_t>(at),
                        pr.cols.begin() + static_cast<std::ptrdiff_t>(at + len));
      slot.second.assign(pr.vals.begin() + static_cast<std::ptrdiff_t>(at),
                         pr.vals.begin() + static_cast<std::ptrdiff_t>(at + len));
      at += len;
    }
  }
  return got;
}

} // namespace

DistMatrix spgemm(const DistMatrix& A, const DistMatrix& B) {
  if (!A.comm().same_as(B.comm())) throw Error("spgemm: communicator mismatch");
  if (!(A.cols() == B.rows())) throw Error("spgemm: inner layouts do not conform");

  // Rows of B referenced by local A entries.
  std::vector<idx_t> wanted(A.col_idx().begin(), A.col_idx().end());
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
  auto b_rows = fetch_rows(B, wanted);

  DistMatrix C;
  C.comm_ = A.comm();
  C.rows_ = A.rows();
  C.cols_ = B.cols();
  const idx_t n_local = A.local_row_count();
  C.row_ptr_.assign(static_cast<std::size_t>(n_local) + 1, 0);

  // Products are generated with the summation index k ascending; the stable
  // sort by output column preserves that order, so each entry folds in a
  // partition-independent order.
  std::vector<std::pair<idx_t, double>> prod;
  for (idx_t i = 0; i < n_local; ++i) {
    prod.clear();
    for (idx_t p = A.row_ptr()[static_cast<std::size_t>(i)];
         p < A.row_ptr()[static_cast<std::size_t>(i) + 1]; ++p) {
      const idx_t k = A.col_idx()[static_cast<std::size_t>(p)];
      const double a = A.values()[static_cast<std::size_t>(p)];
      const auto& [bc, bv] = b_rows.at(k);
      for (std::size_t q = 0; q < bc.size(); ++q) prod.emplace_back(bc[q], a * bv[q]);
    }
    std::stable_sort(prod.begin(), prod.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t t = 0; t < prod.size();) {
      const idx_t col = prod[t].first;
      double acc = 0.0;
      while (t < prod.size() && prod[t].first == col) {
        acc += prod[t].second;
        ++t;
      }
      C.col_idx_.push_back(col);
      C.val_.push_back(acc);
      ++C.row_ptr_[static_cast<std::size_t>(i) + 1];
    }
  }
  for (std::size_t k = 1; k < C.row_ptr_.size(); ++k) C.row_ptr_[k] += C.row_ptr_[k - 1];
  C.build_halo();
  return C;
}

DistMatrix ptap(const DistMatrix& P, const DistMatrix& A) {
  if (!(A.rows() == P.rows()) || !(A.cols() == P.rows()))
    throw Error("ptap: A must be square on P's row layout");
  DistMatrix W = spgemm(A, P);
  DistMatrix Pt = transpose(P);
  return spgemm(Pt, W);
}

// ---------------------------------------------------------------------------
// redistribute_rows

std::optional<DistMatrix> redistribute_rows(const DistMatrix& A, const SplitResult& split) {
  const Comm& comm = A.comm();
  if (split.parent_comm_id != comm.id() || split.parent_size != comm.size())
    throw Error("redistribute_rows: split does not derive from the matrix communicator");

  const int me = comm.rank();
  const int target_member = split.fused_member_of(me);
  const int target_parent = split.member_map[static_cast<std::size_t>(target_member)];

  // Phase one: form the sequential intermediate row block on each member by
  // a local copy plus receives from the ranks being agglomerated. Ranks that
  // are not members end up with zero rows.
  PackedRows mine;
  {
    const idx_t n_local = A.local_row_count();
    for (idx_t i = 0; i < n_local; ++i)
      mine.meta.push_back(A.row_ptr()[static_cast<std::size_t>(i) + 1] -
                          A.row_ptr()[static_cast<std::size_t>(i)]);
    mine.cols = A.col_idx();
    mine.vals = A.values();
  }

  if (target_parent != me) comm.send(target_parent, kTagRedistRows, mine.serialize());

  if (!split.is_member()) return std::nullopt;

  const int member = split.fused_member_of(me); // == own member index
  PackedRows fused;
  for (int src = split.group_begin(member); src < split.group_end(member); ++src) {
    PackedRows part = src == me ? mine : PackedRows::deserialize(comm.recv(src, kTagRedistRows));
    fused.meta.insert(fused.meta.end(), part.meta.begin(), part.meta.end());
    fused.cols.insert(fused.cols.end(), part.cols.begin(), part.cols.end());
    fused.vals.insert(fused.vals.end(), part.vals.begin(), part.vals.end());
  }

  // Phase two: assemble the CSR over the derived communicator. Fused blocks
  // stay contiguous in the global row space, so the new layout follows from
  // the old offsets; global entries and row order are unchanged.
  const Comm& sub = *split.sub;
  DistMatrix Ap;
  Ap.comm_ = sub;
  auto fuse_layout = [&](const Layout& lay) {
    Layout out;
    out.n = lay.n;
    out.offsets.resize(static_cast<std::size_t>(sub.size()) + 1);
    for (int k = 0; k < sub.size(); ++k)
      out.offsets[static_cast<std::size_t>(k)] = lay.begin(split.group_begin(k));
    out.offsets[static_cast<std::size_t>(sub.size())] = lay.n;
    return out;
  };
  Ap.rows_ = fuse_layout(A.rows());
  Ap.cols_ = fuse_layout(A.cols());
  Ap.row_ptr_.assign(fused.meta.size() + 1, 0);
  for (std::size_t i = 0; i < fused.meta.size(); ++i)
    Ap.row_ptr_[i + 1] = Ap.row_ptr_[i] + fused.meta[i];
  Ap.col_idx_ = std::move(fused.cols);
  Ap.val_ = std::move(fused.vals);
  Ap.build_halo();
  return Ap;
}

DistMatrix dist_identity(const Comm& comm, const Layout& lay) {
  MatrixAssembler asmb(comm, lay, lay);
  for (idx_t i = lay.begin(comm.rank()); i < lay.end(comm.rank()); ++i) asmb.add(i, i, 1.0);
  return asmb.finalize();
}

} // namespace tmg
