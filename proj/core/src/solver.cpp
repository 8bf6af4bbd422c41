// SPDX-License-Identifier: Apache-2.0

#include "tmg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tmg/nullspace.hpp"

namespace tmg {

std::string to_string(KrylovMethod m) {
  switch (m) {
    case KrylovMethod::richardson: return "richardson";
    case KrylovMethod::chebyshev: return "chebyshev";
    case KrylovMethod::cg: return "cg";
    case KrylovMethod::gmres: return "gmres";
    case KrylovMethod::fgmres: return "fgmres";
    case KrylovMethod::preonly: return "preonly";
  }
  return "?";
}

KrylovMethod krylov_method_from_string(const std::string& name) {
  if (name == "richardson") return KrylovMethod::richardson;
  if (name == "chebyshev") return KrylovMethod::chebyshev;
  if (name == "cg") return KrylovMethod::cg;
  if (name == "gmres") return KrylovMethod::gmres;
  if (name == "fgmres") return KrylovMethod::fgmres;
  if (name == "preonly") return KrylovMethod::preonly;
  throw ConfigError("unknown ksp_type '" + name +
                    "' (valid: richardson, chebyshev, cg, gmres, fgmres, preonly)");
}

std::string to_string(ConvergedReason r) {
  switch (r) {
    case ConvergedReason::rtol: return "rtol";
    case ConvergedReason::atol: return "atol";
    case ConvergedReason::max_its: return "max_its";
    case ConvergedReason::fixed_its_done: return "fixed_its_done";
    case ConvergedReason::diverged: return "diverged";
  }
  return "?";
}

std::string SolveReport::history_csv() const {
  std::string out = "iteration,residual\n";
  char buf[64];
  for (std::size_t i = 0; i < residual_history.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, residual_history[i]);
    out += buf;
  }
  return out;
}

namespace {

// Applies M and projects out the operator null space, keeping iterates in
// the orthogonal complement.
struct PcApply {
  const Preconditioner& M;
  const NullSpace* ns;

  void operator()(const DistVector& r, DistVector& z) const {
    M.apply(r, z);
    if (ns) remove_nullspace_component(*ns, z);
  }
};

struct Stop {
  double rtol;
  double atol;
  double norm0 = 0.0;

  bool hit(double nrm) const { return nrm <= std::max(rtol * norm0, atol); }
};

SolveReport solve_fixed(const KrylovConfig& cfg, const DistMatrix& A, const PcApply& pc,
                        const DistVector& b, DistVector& x) {
  // Smoother mode: exactly fixed_its sweeps, no norms, no history.
  SolveReport rep;
  rep.norm_kind = "none (fixed iteration smoother)";
  const int m = *cfg.fixed_its;
  DistVector r(b.comm(), b.layout());
  DistVector z(b.comm(), b.layout());

  if (cfg.method == KrylovMethod::chebyshev) {
    const auto [lam_lo, lam_hi] = *cfg.cheb_bounds;
    const double theta = 0.5 * (lam_hi + lam_lo);
    const double delta = 0.5 * (lam_hi - lam_lo);
    const double sigma = theta / delta;
    double rho = 1.0 / sigma;
    spmv(A, x, r);
    for (std::size_t i = 0; i < r.local().size(); ++i) r.local()[i] = b.local()[i] - r.local()[i];
    pc(r, z);
    DistVector d = z;
    scale(d, 1.0 / theta);
    DistVector ad(b.comm(), b.layout());
    for (int it = 0; it < m; ++it) {
      axpy(1.0, d, x);
      if (it + 1 == m) break;
      spmv(A, d, ad);
      axpy(-1.0, ad, r);
      pc(r, z);
      const double rho_new = 1.0 / (2.0 * sigma - rho);
      for (std::size_t i = 0; i < d.local().size(); ++i)
        d.local()[i] = rho_new * rho * d.local()[i] + 2.0 * rho_new / delta * z.local()[i];
      rho = rho_new;
    }
  } else {
    // Richardson sweeps; exactly one M application per iteration.
    for (int it = 0; it < m; ++it) {
      spmv(A, x, r);
      for (std::size_t i = 0; i < r.local().size(); ++i)
        r.local()[i] = b.local()[i] - r.local()[i];
      pc(r, z);
      axpy(cfg.damping, z, x);
    }
  }
  rep.reason = ConvergedReason::fixed_its_done;
  rep.iterations = m;
  return rep;
}

SolveReport solve_richardson(const KrylovConfig& cfg, const DistMatrix& A, const PcApply& pc,
                             const DistVector& b, DistVector& x) {
  SolveReport rep;
  rep.norm_kind = "preconditioned residual 2-norm";
  DistVector r(b.comm(), b.layout());
  DistVector z(b.comm(), b.layout());

  spmv(A, x, r);
  for (std::size_t i = 0; i < r.local().size(); ++i) r.local()[i] = b.local()[i] - r.local()[i];
  pc(r, z);
  double nrm = norm2(z);
  Stop stop{cfg.rtol, cfg.atol, nrm};
  if (cfg.log_history) rep.residual_history.push_back(nrm);
  if (stop.hit(nrm)) {
    rep.reason = nrm <= cfg.atol ? ConvergedReason::atol : ConvergedReason::rtol;
    return rep;
  }
  for (int it = 1; it <= cfg.max_its; ++it) {
    axpy(cfg.damping, z, x);
    spmv(A, x, r);
    for (std::size_t i = 0; i < r.local().size(); ++i) r.local()[i] = b.local()[i] - r.local()[i];
    pc(r, z);
    nrm = norm2(z);
    rep.iterations = it;
    if (cfg.log_history) rep.residual_history.push_back(nrm);
    if (stop.hit(nrm)) {
      rep.reason = nrm <= cfg.atol ? ConvergedReason::atol : ConvergedReason::rtol;
      return rep;
    }
    if (!std::isfinite(nrm)) {
      rep.reason = ConvergedReason::diverged;
      return rep;
    }
  }
  rep.reason = ConvergedReason::max_its;
  return rep;
}

SolveReport solve_chebyshev(const KrylovConfig& cfg, const DistMatrix& A, const PcApply& pc,
                            const DistVector& b, DistVector& x) {
  SolveReport rep;
  rep.norm_kind = "preconditioned residual 2-norm";
  const auto [lam_lo, lam_hi] = *cfg.cheb_bounds;
  const double theta = 0.5 * (lam_hi + lam_lo);
  const double delta = 0.5 * (lam_hi - lam_lo);
  const double sigma = theta / delta;
  double rho = 1.0 / sigma;

  DistVector r(b.comm(), b.layout());
  DistVector z(b.comm(), b.layout());
  DistVector ad(b.comm(), b.layout());
  spmv(A, x, r);
  for (std::size_t i = 0; i < r.local().size(); ++i) r.local()[i] = b.local()[i] - r.local()[i];
  pc(r, z);
  double nrm = norm2(z);
  Stop stop{cfg.rtol, cfg.atol, nrm};
  if (cfg.log_history) rep.residual_history.push_back(nrm);
  if (stop.hit(nrm)) {
    rep.reason = nrm <= cfg.atol ? ConvergedReason::atol : ConvergedReason::rtol;
    return rep;
  }
  DistVector d = z;
  scale(d, 1.0 / theta);
  for (int it = 1; it <= cfg.max_its; ++it) {
    axpy(1.0, d, x);
    spmv(A, d, ad);
    axpy(-1.0, ad, r);
    pc(r, z);
    nrm = norm2(z);
    rep.iterations = it;
    if (cfg.log_history) rep.residual_history.push_back(nrm);
    if (stop.hit(nrm)) {
      rep.reason = nrm <= cfg.atol ? ConvergedReason::atol : ConvergedReason::rtol;
      return rep;
    }
    if (!std::isfinite(nrm)) {
      rep.reason = ConvergedReason::diverged;
      return rep;
    }
    const double rho_new = 1.0 / (2.0 * sigma - rho);
    for (std::size_t i = 0; i < d.local().size(); ++i)
      d.local()[i] = rho_new * rho * d.local()[i] + 2.0 * rho_new / delta * z.local()[i];
    rho = rho_new;
  }
  rep.reason = ConvergedReason::max_its;
  return rep;
}

SolveReport solve_cg(const KrylovConfig& cfg, const DistMatrix& A, const PcApply& pc,
                     const DistVector& b, DistVector& x) {
  SolveReport rep;
  rep.norm_kind = "preconditioned residual 2-norm";
  DistVector r(b.comm(), b.layout());
  spmv(A, x, r);
  for (std::size_t i = 0; i < r.local().size(); ++i) r.local()[i] = b.local()[i] - r.local()[i];
  DistVector z(b.comm(), b.layout());
  pc(r, z);
  double nrm = norm2(z);
  Stop stop{cfg.rtol, cfg.atol, nrm};
  if (cfg.log_history) rep.residual_history.push_back(nrm);
  if (stop.hit(nrm)) {
    rep.reason = nrm <= cfg.atol ? ConvergedReason::atol : ConvergedReason::rtol;
    return rep;
  }

  DistVector p = z;
  DistVector w(b.comm(), b.layout());
  double rz = dot(r, z);
  for (int it = 1; it <= cfg.max_its; ++it) {
    spmv(A, p, w);
    const double pw = dot(p, w);
    if (pw <= 0.0 || !std::isfinite(pw)) {
      rep.reason = ConvergedReason::diverged;
      rep.note = "cg breakdown: nonpositive curvature p'Ap = " + std::to_string(pw);
      return rep;
    }
    const double alpha = rz / pw;
    axpy(alpha, p, x);
    axpy(-alpha, w, r);
    pc(r, z);
    const double rz_new = dot(r, z);
    nrm = norm2(z);
    rep.iterations = it;
    if (cfg.log_history) rep.residual_history.push_back(nrm);
    if (stop.hit(nrm)) {
      rep.reason = nrm <= cfg.atol ? ConvergedReason::atol : ConvergedReason::rtol;
      return rep;
    }
    if (rz == 0.0 || !std::isfinite(rz_new)) {
      rep.reason = ConvergedReason::diverged;
      rep.note = "cg breakdown: r'z vanished";
      return rep;
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < p.local().size(); ++i)
      p.local()[i] = z.local()[i] + beta * p.local()[i];
  }
  rep.reason = ConvergedReason::max_its;
  return rep;
}

// Shared GMRES cycle machinery. In the left-preconditioned variant the
// Arnoldi space is built with M(A v) and the recurrence norm is the
// preconditioned residual; the flexible variant stores M v_j and monitors
// the true residual.
SolveReport solve_gmres_like(const KrylovConfig& cfg, const DistMatrix& A, const PcApply& pc,
                             const DistVector& b, DistVector& x, bool flexible) {
  SolveReport rep;
  rep.norm_kind = flexible ? "true residual 2-norm" : "preconditioned residual 2-norm";
  const int m = std::max(1, cfg.restart);
  Stop stop{cfg.rtol, cfg.atol, 0.0};
  bool have_norm0 = false;
  int total_its = 0;

  DistVector r(b.comm(), b.layout());
  DistVector tmp(b.comm(), b.layout());

  while (true) {
    spmv(A, x, r);
    for (std::size_t i = 0; i < r.local().size(); ++i) r.local()[i] = b.local()[i] - r.local()[i];
    if (!flexible) {
      pc(r, tmp);
      r = tmp;
    } else if (const NullSpace* ns = A.nullspace().get()) {
      remove_nullspace_component(*ns, r);
    }
    double beta = norm2(r);
    if (!have_norm0) {
      stop.norm0 = beta;
      have_norm0 = true;
      if (cfg.log_history) rep.residual_history.push_back(beta);
      if (stop.hit(beta)) {
        rep.reason = beta <= cfg.atol ? ConvergedReason::atol : ConvergedReason::rtol;
        return rep;
      }
    }
    if (!std::isfinite(beta) || beta == 0.0) {
      rep.reason = beta == 0.0 ? ConvergedReason::rtol : ConvergedReason::diverged;
      return rep;
    }

    std::vector<DistVector> V;
    std::vector<DistVector> Z; // flexible: preconditioned directions
    V.reserve(static_cast<std::size_t>(m) + 1);
    V.push_back(r);
    scale(V[0], 1.0 / beta);

    // Hessenberg columns after Givens, rotations, and the rhs of the small
    // least squares problem.
    std::vector<std::vector<double>> H;
    std::vector<double> cs, sn;
    std::vector<double> g(1, beta);

    int j = 0;
    bool breakdown = false;
    double last_nrm = beta;
    for (; j < m && total_its < cfg.max_its;) {
      DistVector w(b.comm(), b.layout());
      if (flexible) {
        DistVector zj(b.comm(), b.layout());
        pc(V[static_cast<std::size_t>(j)], zj);
        Z.push_back(zj);
        spmv(A, Z.back(), w);
        if (const NullSpace* ns = A.nullspace().get()) remove_nullspace_component(*ns, w);
      } else {
        spmv(A, V[static_cast<std::size_t>(j)], tmp);
        pc(tmp, w);
      }
      std::vector<double> h(static_cast<std::size_t>(j) + 2, 0.0);
      for (int i = 0; i <= j; ++i) {
        h[static_cast<std::size_t>(i)] = dot(w, V[static_cast<std::size_t>(i)]);
        axpy(-h[static_cast<std::size_t>(i)], V[static_cast<std::size_t>(i)], w);
      }
      const double h_sub = norm2(w); // subdiagonal entry, kept for normalization
      h[static_cast<std::size_t>(j) + 1] = h_sub;

      // Apply accumulated rotations, then the new one.
      for (int i = 0; i < j; ++i) {
        const double t = cs[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)] +
                         sn[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i) + 1];
        h[static_cast<std::size_t>(i) + 1] =
            -sn[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)] +
            cs[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i) + 1];
        h[static_cast<std::size_t>(i)] = t;
      }
      const double denom = std::hypot(h[static_cast<std::size_t>(j)],
                                      h[static_cast<std::size_t>(j) + 1]);
      double c = 1.0, s = 0.0;
      if (denom > 0.0) {
        c = h[static_cast<std::size_t>(j)] / denom;
        s = h[static_cast<std::size_t>(j) + 1] / denom;
      }
      cs.push_back(c);
      sn.push_back(s);
      h[static_cast<std::size_t>(j)] = denom;
      h[static_cast<std::size_t>(j) + 1] = 0.0;
      g.push_back(-s * g[static_cast<std::size_t>(j)]);
      g[static_cast<std::size_t>(j)] *= c;
      H.push_back(std::move(h));

      ++total_its;
      ++j;
      const double nrm = std::abs(g[static_cast<std::size_t>(j)]);
      rep.iterations = total_its;
      last_nrm = nrm;
      if (cfg.log_history) rep.residual_history.push_back(nrm);

      if (stop.hit(nrm) || !std::isfinite(nrm)) break;
      if (h_sub <= 1e-300) {
        // Exhausted Krylov space: the correction below is exact in it.
        breakdown = true;
        break;
      }
      V.push_back(w);
      scale(V.back(), 1.0 / h_sub);
    }

    // Back substitution on the triangularized system.
    std::vector<double> y(static_cast<std::size_t>(j), 0.0);
    for (int i = j - 1; i >= 0; --i) {
      double acc = g[static_cast<std::size_t>(i)];
      for (int l = i + 1; l < j; ++l)
        acc -= H[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] *
               y[static_cast<std::size_t>(l)];
      y[static_cast<std::size_t>(i)] = acc / H[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < j; ++i)
      axpy(y[static_cast<std::size_t>(i)],
           flexible ? Z[static_cast<std::size_t>(i)] : V[static_cast<std::size_t>(i)], x);
    if (const NullSpace* ns = A.nullspace().get()) remove_nullspace_component(*ns, x);

    if (stop.hit(last_nrm)) {
      rep.reason = last_nrm <= cfg.atol ? ConvergedReason::atol : ConvergedReason::rtol;
      return rep;
    }
    if (!std::isfinite(last_nrm)) {
      rep.reason = ConvergedReason::diverged;
      return rep;
    }
    if (total_its >= cfg.max_its) {
      rep.reason = ConvergedReason::max_its;
      return rep;
    }
    if (breakdown) {
      rep.reason = ConvergedReason::diverged;
      rep.note = "gmres breakdown: Krylov space exhausted before the tolerance was met";
      return rep;
    }
  }
}

} // namespace

SolveReport krylov_solve(const KrylovConfig& cfg, const DistMatrix& A, const Preconditioner& M,
                         const DistVector& b, DistVector& x) {
  if (!(A.cols() == x.layout()) || !(A.rows() == b.layout()))
    throw Error("krylov_solve: vector layouts do not conform to the operator");
  if (cfg.method == KrylovMethod::chebyshev && !cfg.cheb_bounds)
    throw Error("krylov_solve: chebyshev needs an eigenvalue interval (estimate it at setup)");

  const NullSpace* ns = A.nullspace().get();
  PcApply pc{M, ns};

  // Work on a projected copy of b for singular operators.
  const DistVector* rhs = &b;
  DistVector b_proj;
  if (ns) {
    b_proj = b;
    remove_nullspace_component(*ns, b_proj);
    rhs = &b_proj;
  }

  SolveReport rep;
  if (cfg.fixed_its) {
    if (cfg.method != KrylovMethod::richardson && cfg.method != KrylovMethod::chebyshev &&
        cfg.method != KrylovMethod::preonly)
      throw ConfigError("fixed iteration counts are supported for richardson and chebyshev");
    if (cfg.method == KrylovMethod::preonly) {
      pc(*rhs, x);
      rep.reason = ConvergedReason::fixed_its_done;
      rep.iterations = 1;
      rep.norm_kind = "none (single application)";
    } else {
      rep = solve_fixed(cfg, A, pc, *rhs, x);
    }
  } else {
    switch (cfg.method) {
      case KrylovMethod::preonly: {
        pc(*rhs, x);
        rep.reason = ConvergedReason::fixed_its_done;
        rep.iterations = 1;
        rep.norm_kind = "none (single application)";
        break;
      }
      case KrylovMethod::richardson:
        rep = solve_richardson(cfg, A, pc, *rhs, x);
        break;
      case KrylovMethod::chebyshev:
        rep = solve_chebyshev(cfg, A, pc, *rhs, x);
        break;
      case KrylovMethod::cg:
        rep = solve_cg(cfg, A, pc, *rhs, x);
        break;
      case KrylovMethod::gmres:
        rep = solve_gmres_like(cfg, A, pc, *rhs, x, false);
        break;
      case KrylovMethod::fgmres:
        rep = solve_gmres_like(cfg, A, pc, *rhs, x, true);
        break;
    }
  }
  if (ns) remove_nullspace_component(*ns, x);
  return rep;
}

// ---------------------------------------------------------------------------
// Chebyshev bounds

namespace {

// Largest eigenvalue of a symmetric tridiagonal matrix by Sturm bisection.
double tridiag_eig_max(const std::vector<double>& d, const std::vector<double>& e) {
  const std::size_t n = d.size();
  double lo = d[0], hi = d[0];
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? std::abs(e[i - 1]) : 0.0;
    const double right = i + 1 < n ? std::abs(e[i]) : 0.0;
    lo = std::min(lo, d[i] - left - right);
    hi = std::max(hi, d[i] + left + right);
  }
  auto count_below = [&](double x) {
    // Number of eigenvalues strictly below x.
    int count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double off = i > 0 ? e[i - 1] : 0.0;
      q = d[i] - x - (q == 0.0 ? std::abs(off) / 1e-300 : off * off / q);
      if (q < 0.0) ++count;
    }
    return count;
  };
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(mid) >= static_cast<int>(n))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

std::pair<double, double> chebyshev_bounds_estimate(const DistMatrix& A, const Preconditioner& M,
                                                    std::string* warning) {
  constexpr int kSteps = 10;
  const double fallback_lo = 0.1, fallback_hi = 1.1;

  DistVector b(A.comm(), A.rows());
  fill_random(b, 0x5eedbeef);
  if (const NullSpace* ns = A.nullspace().get()) remove_nullspace_component(*ns, b);
  DistVector x(A.comm(), A.cols());

  // CG coefficients give the Lanczos tridiagonal of M^-1 A.
  std::vector<double> alphas, betas;
  {
    DistVector r = b;
    DistVector z(b.comm(), b.layout());
    M.apply(r, z);
    if (const NullSpace* ns = A.nullspace().get()) remove_nullspace_component(*ns, z);
    DistVector p = z;
    DistVector w(b.comm(), b.layout());
    double rz = dot(r, z);
    for (int it = 0; it < kSteps; ++it) {
      if (rz == 0.0 || !std::isfinite(rz)) break;
      spmv(A, p, w);
      const double pw = dot(p, w);
      if (pw <= 0.0 || !std::isfinite(pw)) {
        if (alphas.empty()) {
          if (warning) *warning = "eigenvalue estimate broke down; using (0.1, 1.1)";
          return {fallback_lo, fallback_hi};
        }
        break;
      }
      const double alpha = rz / pw;
      axpy(alpha, p, x);
      axpy(-alpha, w, r);
      M.apply(r, z);
      if (const NullSpace* ns = A.nullspace().get()) remove_nullspace_component(*ns, z);
      const double rz_new = dot(r, z);
      alphas.push_back(alpha);
      if (rz_new <= 0.0 || !std::isfinite(rz_new)) break;
      betas.push_back(rz_new / rz);
      rz = rz_new;
    }
  }
  if (alphas.empty()) {
    if (warning) *warning = "eigenvalue estimate broke down; using (0.1, 1.1)";
    return {fallback_lo, fallback_hi};
  }
  // Standard CG -> Lanczos translation.
  const std::size_t k = alphas.size();
  std::vector<double> d(k, 0.0), e(k > 0 ? k - 1 : 0, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    d[i] = 1.0 / alphas[i];
    if (i > 0) d[i] += betas[i - 1] / alphas[i - 1];
    if (i + 1 < k) e[i] = std::sqrt(betas[i]) / alphas[i];
  }
  const double lam_max = tridiag_eig_max(d, e);
  if (!(lam_max > 0.0) || !std::isfinite(lam_max)) {
    if (warning) *warning = "eigenvalue estimate broke down; using (0.1, 1.1)";
    return {fallback_lo, fallback_hi};
  }
  return {0.1 * lam_max, 1.1 * lam_max};
}

// ---------------------------------------------------------------------------
// SolverNode

SolverNode SolverNode::create(KrylovConfig cfg, std::shared_ptr<const DistMatrix> A,
                              std::shared_ptr<const Preconditioner> pc, std::string prefix) {
  if (!A) throw Error("SolverNode: missing operator");
  if (!pc) pc = std::make_shared<IdentityPC>();
  SolverNode node;
  if (cfg.method == KrylovMethod::chebyshev && !cfg.cheb_bounds)
    cfg.cheb_bounds = chebyshev_bounds_estimate(*A, *pc);
  node.cfg_ = std::move(cfg);
  node.A_ = std::move(A);
  node.pc_ = std::move(pc);
  node.prefix_ = std::move(prefix);
  return node;
}

SolveReport SolverNode::solve(const DistVector& b, DistVector& x) const {
  return krylov_solve(cfg_, *A_, *pc_, b, x);
}

nlohmann::json SolverNode::describe() const {
  nlohmann::json j;
  j["prefix"] = prefix_;
  j["ksp_type"] = to_string(cfg_.method);
  j["rtol"] = cfg_.rtol;
  j["max_its"] = cfg_.max_its;
  if (cfg_.fixed_its) j["fixed_its"] = *cfg_.fixed_its;
  if (cfg_.method == KrylovMethod::richardson) j["damping"] = cfg_.damping;
  if (cfg_.cheb_bounds)
    j["cheb_bounds"] = {cfg_.cheb_bounds->first, cfg_.cheb_bounds->second};
  j["pc"] = pc_->describe();
  return j;
}

} // namespace tmg
