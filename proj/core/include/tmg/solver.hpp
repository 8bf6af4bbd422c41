// SPDX-License-Identifier: Apache-2.0

#ifndef TMG_SOLVER_HPP
#define TMG_SOLVER_HPP

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tmg/dist_matrix.hpp"
#include "tmg/preconditioner.hpp"

namespace tmg {

enum class KrylovMethod { richardson, chebyshev, cg, gmres, fgmres, preonly };

std::string to_string(KrylovMethod m);
KrylovMethod krylov_method_from_string(const std::string& name);

enum class ConvergedReason { rtol, atol, max_its, fixed_its_done, diverged };
std::string to_string(ConvergedReason r);

struct KrylovConfig {
  KrylovMethod method = KrylovMethod::gmres;
  double rtol = 1e-8;
  double atol = 1e-50;
  int max_its = 10000;
  int restart = 30;                  // gmres / fgmres
  std::optional<int> fixed_its;      // smoother mode: exact count, no test
  double damping = 1.0;              // richardson
  std::optional<std::pair<double, double>> cheb_bounds;
  bool log_history = true;           // ignored in smoother mode
};

struct SolveReport {
  ConvergedReason reason = ConvergedReason::max_its;
  int iterations = 0;
  std::vector<double> residual_history; // size iterations+1 when logged
  std::string norm_kind;                // which residual the test used
  std::string note;                     // warnings (e.g. inner solver trouble)

  bool converged() const {
    return reason == ConvergedReason::rtol || reason == ConvergedReason::atol ||
           reason == ConvergedReason::fixed_its_done;
  }
  /// "iteration,residual" lines.
  std::string history_csv() const;
};

/// Left-preconditioned Richardson/Chebyshev/CG/GMRES; flexible right-style
/// FGMRES; preonly applies M once. The stopping test is
/// ||r_k|| <= max(rtol*||r_0||, atol) on the preconditioned residual except
/// for FGMRES (true residual); with fixed_its set, exactly that many
/// iterations run and no test is evaluated. Breakdown reports `diverged`
/// instead of throwing. A null space attached to A is projected out of the
/// right-hand side, every preconditioned direction, and the solution.
SolveReport krylov_solve(const KrylovConfig& cfg, const DistMatrix& A, const Preconditioner& M,
                         const DistVector& b, DistVector& x);

/// Chebyshev interval estimation: ten preconditioned Lanczos(CG) steps on a
/// reproducible right-hand side estimate the extreme eigenvalues of M^-1 A;
/// the returned interval is (0.1*max, 1.1*max). Falls back to (0.1, 1.1)
/// with a warning note when the recurrence breaks down.
std::pair<double, double> chebyshev_bounds_estimate(const DistMatrix& A, const Preconditioner& M,
                                                    std::string* warning = nullptr);

/// A configured Krylov method plus preconditioner, composable into trees.
class SolverNode {
public:
  SolverNode() = default;
  /// Finalizes setup (estimates Chebyshev bounds when needed; collective).
  static SolverNode create(KrylovConfig cfg, std::shared_ptr<const DistMatrix> A,
                           std::shared_ptr<const Preconditioner> pc, std::string prefix);

  SolveReport solve(const DistVector& b, DistVector& x) const;

  const KrylovConfig& config() const { return cfg_; }
  const std::shared_ptr<const DistMatrix>& matrix() const { return A_; }
  const std::shared_ptr<const Preconditioner>& pc() const { return pc_; }
  const std::string& prefix() const { return prefix_; }

  nlohmann::json describe() const;

private:
  KrylovConfig cfg_;
  std::shared_ptr<const DistMatrix> A_;
  std::shared_ptr<const Preconditioner> pc_;
  std::string prefix_;
};

} // namespace tmg

#endif
