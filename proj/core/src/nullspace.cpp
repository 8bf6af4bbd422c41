// SPDX-License-Identifier: Apache-2.0

#include "tmg/nullspace.hpp"

#include <cmath>
#include <memory>

namespace tmg {

void attach_nullspace(DistMatrix& A, NullSpace ns) {
  // Modified Gram-Schmidt; vectors that collapse to (numerical) zero are
  // rejected rather than silently dropped.
  for (std::size_t i = 0; i < ns.basis.size(); ++i) {
    DistVector& v = ns.basis[i];
    for (std::size_t j = 0; j < i; ++j) {
      const double proj = dot(ns.basis[j], v);
      axpy(-proj, ns.basis[j], v);
    }
    const double nrm = norm2(v);
    if (nrm <= 1e-14)
      throw Error("attach_nullspace: basis vector " + std::to_string(i) +
                  " is linearly dependent");
    scale(v, 1.0 / nrm);
  }
  A.set_nullspace(std::make_shared<NullSpace>(std::move(ns)));
}

std::optional<NullSpace> scatter_nullspace(const NullSpace& ns, const ScatterPlan& plan) {
  std::vector<std::optional<DistVector>> scattered;
  scattered.reserve(ns.basis.size());
  for (const DistVector& phi : ns.basis) scattered.push_back(plan.to_sub(phi));
  if (!plan.split().is_member()) return std::nullopt;
  NullSpace out;
  out.has_constant = ns.has_constant;
  out.remover = ns.remover;
  for (auto& phi : scattered) out.basis.push_back(std::move(*phi));
  return out;
}

void propagate_nullspace(const DistMatrix& A, std::optional<DistMatrix>& A_prime,
                         const ScatterPlan& plan) {
  auto ns = A.nullspace();
  if (!ns) return;
  std::optional<NullSpace> sub_ns = scatter_nullspace(*ns, plan);
  if (A_prime) {
    if (!sub_ns) throw Error("propagate_nullspace: member rank lost the scattered basis");
    A_prime->set_nullspace(std::make_shared<NullSpace>(std::move(*sub_ns)));
  }
}

void remove_nullspace_component(const NullSpace& ns, DistVector& x) {
  if (ns.has_constant) {
    const double mean = x.comm().ordered_fold_sum(x.local()) / static_cast<double>(x.global_size());
    for (double& v : x.local()) v -= mean;
  }
  for (const DistVector& phi : ns.basis) {
    const double proj = dot(phi, x);
    axpy(-proj, phi, x);
  }
  if (ns.remover) ns.remover(x);
}

} // namespace tmg
