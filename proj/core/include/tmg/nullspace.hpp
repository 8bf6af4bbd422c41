// SPDX-License-Identifier: Apache-2.0

#ifndef TMG_NULLSPACE_HPP
#define TMG_NULLSPACE_HPP

#include <functional>
#include <optional>
#include <vector>

#include "tmg/dist_matrix.hpp"
#include "tmg/dist_vector.hpp"
#include "tmg/scatter_plan.hpp"

namespace tmg {

/// Null space description for a singular operator: an optional constant
/// component, explicit basis vectors, and an optional user removal callback.
/// Basis vectors are orthonormalized when attached.
struct NullSpace {
  bool has_constant = false;
  std::vector<DistVector> basis;
  std::function<void(DistVector&)> remover;
};

/// Orthonormalizes ns.basis (modified Gram-Schmidt) and attaches it to A.
void attach_nullspace(DistMatrix& A, NullSpace ns);

/// Scatters the basis vectors through the plan and attaches the result to
/// A_prime on member ranks; the removal callback is carried over.
void propagate_nullspace(const DistMatrix& A, std::optional<DistMatrix>& A_prime,
                         const ScatterPlan& plan);

/// Scatter-only variant for callers that permute the basis first.
std::optional<NullSpace> scatter_nullspace(const NullSpace& ns, const ScatterPlan& plan);

/// x <- x - sum_i (phi_i . x) phi_i, constant component included; the user
/// remover runs last.
void remove_nullspace_component(const NullSpace& ns, DistVector& x);

} // namespace tmg

#endif
