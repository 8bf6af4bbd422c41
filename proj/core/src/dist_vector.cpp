// SPDX-License-Identifier: Apache-2.0

#include "tmg/dist_vector.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace tmg {

DistVector::DistVector(Comm comm, Layout layout)
    : comm_(std::move(comm)), layout_(std::move(layout)) {
  if (layout_.n_ranks() != comm_.size())
    throw Error("DistVector: layout rank count does not match communicator size");
  local_.assign(static_cast<std::size_t>(local_size()), 0.0);
}

std::vector<double> DistVector::gather_global() const {
  std::span<const std::uint8_t> raw(reinterpret_cast<const std::uint8_t*>(local_.data()),
                                    local_.size() * sizeof(double));
  Bytes all = comm_.gatherv(0, raw);
  Bytes full = comm_.broadcast(0, all);
  std::vector<double> out(full.size() / sizeof(double));
  std::memcpy(out.data(), full.data(), full.size());
  return out;
}

static void check_conforming(const DistVector& x, const DistVector& y, const char* what) {
  if (!x.comm().same_as(y.comm()) || !(x.layout() == y.layout()))
    throw Error(std::string(what) + ": vectors have mismatched layouts");
}

double dot(const DistVector& x, const DistVector& y) {
  check_conforming(x, y, "dot");
  std::vector<double> prod(x.local().size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = x.local()[i] * y.local()[i];
  return x.comm().ordered_fold_sum(prod);
}

double norm2(const DistVector& x) { return std::sqrt(dot(x, x)); }

double norm_inf(const DistVector& x) {
  double m = 0.0;
  for (double v : x.local()) m = std::max(m, std::abs(v));
  return x.comm().allreduce_max(m);
}

void axpy(double alpha, const DistVector& x, DistVector& y) {
  check_conforming(x, y, "axpy");
  for (std::size_t i = 0; i < y.local().size(); ++i) y.local()[i] += alpha * x.local()[i];
}

void scale(DistVector& x, double alpha) {
  for (double& v : x.local()) v *= alpha;
}

void set_all(DistVector& x, double value) {
  std::fill(x.local().begin(), x.local().end(), value);
}

void fill_random(DistVector& x, std::uint64_t seed) {
  const idx_t b = x.lbegin();
  for (idx_t i = 0; i < x.local_size(); ++i)
    x[i] = 2.0 * hashed_uniform(seed, static_cast<std::uint64_t>(b + i)) - 1.0;
}

} // namespace tmg
