// SPDX-License-Identifier: Apache-2.0

#ifndef TMG_PRECONDITIONER_HPP
#define TMG_PRECONDITIONER_HPP

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "tmg/dist_vector.hpp"

namespace tmg {

/// A preconditioner realizes y = M^-1 x. Applications are linear for a fixed
/// setup and collective over the operator's communicator.
class Preconditioner {
public:
  virtual ~Preconditioner() = default;

  virtual void apply(const DistVector& x, DistVector& y) const = 0;
  virtual std::string kind() const = 0;

  /// Introspection of the resolved configuration (nested solvers included).
  virtual nlohmann::json describe() const { return nlohmann::json{{"type", kind()}}; }

  DistVector apply(const DistVector& x) const {
    DistVector y(x.comm(), x.layout());
    apply(x, y);
    return y;
  }
};

/// y = x.
class IdentityPC final : public Preconditioner {
public:
  void apply(const DistVector& x, DistVector& y) const override { y = x; }
  std::string kind() const override { return "none"; }
};

} // namespace tmg

#endif
