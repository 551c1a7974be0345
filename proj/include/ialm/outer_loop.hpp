#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ialm/core.hpp"
#include "ialm/inner_loop.hpp"
#include "ialm/lasso.hpp"

// Full solver runs: the four inexact augmented Lagrangian variants
// (adss / fista-cd inner loop, fixed or adaptive relaxation) and the
// classical ADMM baseline.

namespace ialm {

enum class Algorithm {
  alm_adss,
  alm_ar_adss,
  alm_fista_cd,
  alm_ar_fista_cd,
  admm,
};

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::alm_adss: return "alm_adss";
    case Algorithm::alm_ar_adss: return "alm_ar_adss";
    case Algorithm::alm_fista_cd: return "alm_fista_cd";
    case Algorithm::alm_ar_fista_cd: return "alm_ar_fista_cd";
    case Algorithm::admm: return "admm";
  }
  return "?";
}

inline Algorithm parse_algorithm(const std::string& id) {
  if (id == "alm_adss") return Algorithm::alm_adss;
  if (id == "alm_ar_adss") return Algorithm::alm_ar_adss;
  if (id == "alm_fista_cd") return Algorithm::alm_fista_cd;
  if (id == "alm_ar_fista_cd") return Algorithm::alm_ar_fista_cd;
  if (id == "admm") return Algorithm::admm;
  throw std::invalid_argument("unknown algorithm: " + id);
}

inline bool is_adaptive(Algorithm a) {
  return a == Algorithm::alm_ar_adss || a == Algorithm::alm_ar_fista_cd;
}
inline bool uses_fista(Algorithm a) {
  return a == Algorithm::alm_fista_cd || a == Algorithm::alm_ar_fista_cd;
}
inline bool is_alm(Algorithm a) { return a != Algorithm::admm; }

/// Sentinel for "never reset w".
inline constexpr long kNoReset = std::numeric_limits<long>::max();

struct AlgorithmConfig {
  Algorithm algorithm = Algorithm::alm_ar_fista_cd;
  double c = 1.0;
  double epsilon = 0.1;
  double a = 3.0;          // fista-cd momentum constant, > 2
  long J1 = 0;             // strengthened acceptance horizon (adaptive only)
  long Jr = kNoReset;      // w-reset threshold on inner iterations per outer step
  double delta = 1e-6;     // termination tolerance on the KKT residual
  long max_outer = 100000;
  long max_inner = 10000;  // per inner loop
  std::string gamma_rule = "max";

  void validate() const {
    if (!(c > 0.0)) throw std::invalid_argument("config: c must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0))
      throw std::invalid_argument("config: epsilon must lie in (0,1)");
    if (uses_fista(algorithm) && !(a > 2.0))
      throw std::invalid_argument("config: a must exceed 2");
    if (J1 < 0) throw std::invalid_argument("config: J1 must be nonnegative");
    if (Jr <= 0) throw std::invalid_argument("config: Jr must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("config: delta must be positive");
    if (max_outer <= 0 || max_inner <= 0)
      throw std::invalid_argument("config: iteration caps must be positive");
    GammaRule::parse(gamma_rule);
  }
};

enum class RunStatus { converged, max_outer, max_inner, exact_optimum };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::max_outer: return "max_outer";
    case RunStatus::max_inner: return "max_inner";
    case RunStatus::exact_optimum: return "exact_optimum";
  }
  return "?";
}

/// One accepted outer iteration, as exported to trace files.
struct OuterTraceRow {
  long k = 0;
  long inner_iters = 0;
  double U = 0, S = 0, A = 0, Delta = 0;
  double rho = 1.0;
  double residual = 0.0;
};

struct RunRecord {
  long outer_iterations = 0;
  long inner_iterations_cumulative = 0;
  double final_residual = std::numeric_limits<double>::quiet_NaN();
  double final_objective = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> rho_trace;
  std::vector<double> residual_trace;
  RunStatus status = RunStatus::max_outer;
  std::vector<OuterTraceRow> trace;
  Vector x_final;
  Vector z_final;
  Vector p_final;
};

/// Snapshot of one accepted outer iteration, delivered to an observer.
/// `before` is the state the inner loop ran against; `after` is the
/// state produced by the multiplier update, prior to any w reset.
struct OuterIterationEvent {
  long k = 0;
  long inner_iters = 0;
  SubproblemStats stats;
  RelaxationDecision decision;
  const Vector& x;
  const Vector& z;
  const Vector& u;
  const Subgradient& s;
  const OuterState& before;
  const OuterState& after;
  const Vector& p_bar;
  bool reset_applied = false;
};

using OuterObserver = std::function<void(const OuterIterationEvent&)>;

/// Optional non-zero starting point (defaults are p0 = 0, z0 = 0).
struct WarmStart {
  Vector p0;
  Vector z0;
};

namespace detail {

inline void check_accepted_iteration(const SubproblemStats& stats, double rho,
                                     RelaxationMode mode) {
  // Cheap per-iteration guards for properties the analysis guarantees.
  const double tol = 1e-9 * std::max(1.0, stats.U);
  if (error_criterion_slack(stats, rho) > tol)
    throw std::logic_error("accepted iterate violates the relative error criterion");
  if (mode == RelaxationMode::adaptive) {
    const double lo = rho_lower_bound(stats.epsilon);
    const double hi = rho_upper_bound(stats.epsilon);
    if (rho < lo - 1e-12 || rho > hi + 1e-12)
      throw std::logic_error("adaptive rho outside its admissible range");
  }
}

inline void finalize(RunRecord& rec, const ProblemInstance& inst, const Vector& x,
                     const Vector& z, const Vector& p, double residual,
                     RunStatus status) {
  rec.status = status;
  rec.final_residual = residual;
  rec.final_objective = objective(inst, x);
  rec.x_final = x;
  rec.z_final = z;
  rec.p_final = p;
}

}  // namespace detail

/// Runs one of the four inexact augmented Lagrangian variants:
/// inner loop until acceptance (fixed or adaptive mode, with the J1
/// strengthening in adaptive mode), relaxation decision, multiplier
/// update, w reset when the inner loop exceeded Jr iterations, and the
/// KKT termination check at the accepted x.
inline RunRecord run_alm(const ProblemInstance& inst, const AlgorithmConfig& cfg,
                         const OuterObserver& observer = {},
                         const WarmStart* warm = nullptr) {
  cfg.validate();
  if (!is_alm(cfg.algorithm))
    throw std::invalid_argument("run_alm: use run_admm for the admm baseline");

  const Index n = inst.n();
  const Index m = n;  // M = I
  const XSolverCache cache(inst, cfg.c);
  const GammaRule gamma_rule = GammaRule::parse(cfg.gamma_rule);
  const bool adaptive = is_adaptive(cfg.algorithm);
  const bool fista = uses_fista(cfg.algorithm);
  const RelaxationMode mode =
      adaptive ? RelaxationMode::adaptive : RelaxationMode::fixed_unit;

  OuterState state = make_outer_start(n, m, cfg.c, cfg.epsilon);
  Vector z_warm = Vector::Zero(m);
  if (warm != nullptr) {
    state.p = warm->p0;
    z_warm = warm->z0;
  }

  RunRecord rec;
  for (long k = 0; k < cfg.max_outer; ++k) {
    InnerState inner = make_inner_start(z_warm);
    SubproblemStats stats;
    long used = 0;
    bool accepted = false;
    bool exact = false;
    while (used < cfg.max_inner) {
      inner = fista ? fista_cd_step(inner, state, inst, cache, cfg.a)
                    : adss_step(inner, state, inst, cache);
      ++used;
      ++rec.inner_iterations_cumulative;
      stats = compute_stats(inner.x, inner.z, inner.x, inner.s, state);
      if (declare_exact_optimum(stats)) {
        exact = true;
        break;
      }
      if (acceptance_test(stats, mode, used, adaptive ? cfg.J1 : 0)) {
        accepted = true;
        break;
      }
    }

    if (exact) {
      rec.outer_iterations = k;
      detail::finalize(rec, inst, inner.x, inner.z, state.p,
                       kkt_residual_inf(inst, inner.x), RunStatus::exact_optimum);
      return rec;
    }
    if (!accepted) {
      rec.outer_iterations = k;
      detail::finalize(rec, inst, inner.x, inner.z, state.p,
                       kkt_residual_inf(inst, inner.x), RunStatus::max_inner);
      return rec;
    }

    RelaxationDecision decision;
    if (adaptive) {
      decision = relaxation_factor(stats, gamma_rule);
    } else {
      decision = RelaxationDecision{-1.0, 1.0, 1.0, RelaxationMode::fixed_unit};
    }
    detail::check_accepted_iteration(stats, decision.rho, mode);

    MultiplierUpdate up =
        outer_update(state, inner.x, inner.z, inner.u, inner.s, decision.rho);
    const bool reset = used > cfg.Jr;
    const double residual = kkt_residual_inf(inst, inner.x);

    if (observer) {
      OuterIterationEvent ev{k,       used,  stats,    decision, inner.x,
                             inner.z, inner.u, inner.s, state,    up.state,
                             up.p_bar, reset};
      observer(ev);
    }

    state = std::move(up.state);
    if (reset) {
      // Keep the x- and w-sequences from drifting apart when subproblems
      // get hard.  Only the x block takes part: s_z = 0 keeps w_z at zero,
      // which the acceptance statistics rely on.
      state.w_x = inner.x;
    }
    if (state.w_z.cwiseAbs().maxCoeff() != 0.0)
      throw std::logic_error("w_z drifted away from zero");

    z_warm = inner.z;
    rec.rho_trace.push_back(decision.rho);
    rec.residual_trace.push_back(residual);
    rec.trace.push_back(OuterTraceRow{k, used, stats.U, stats.S, stats.A,
                                      stats.Delta, decision.rho, residual});
    rec.outer_iterations = k + 1;

    if (residual <= cfg.delta) {
      detail::finalize(rec, inst, inner.x, inner.z, state.p, residual,
                       RunStatus::converged);
      return rec;
    }
    if (k + 1 == cfg.max_outer) {
      detail::finalize(rec, inst, inner.x, inner.z, state.p, residual,
                       RunStatus::max_outer);
      return rec;
    }
  }
  return rec;  // unreachable; loop always finalizes
}

/// Classical ADMM baseline: one x-minimization against z^k, one
/// z-minimization against Mx^{k+1}, then p += c (Mx^{k+1} - z^{k+1}),
/// with the same KKT termination check every iteration.
inline RunRecord run_admm(const ProblemInstance& inst, const AlgorithmConfig& cfg,
                          const WarmStart* warm = nullptr) {
  cfg.validate();
  if (cfg.algorithm != Algorithm::admm)
    throw std::invalid_argument("run_admm: config does not select admm");

  const Index n = inst.n();
  const XSolverCache cache(inst, cfg.c);
  Vector p = Vector::Zero(n);
  Vector z = Vector::Zero(n);
  if (warm != nullptr) {
    p = warm->p0;
    z = warm->z0;
  }

  RunRecord rec;
  for (long k = 0; k < cfg.max_outer; ++k) {
    const Vector x = solve_x_subproblem(inst, cache, p, cfg.c, z);
    const Vector& Mx = x;  // M = I
    const Vector z_next = solve_z_subproblem(inst, p, cfg.c, Mx);
    p += cfg.c * (Mx - z_next);
    z = z_next;

    const double residual = kkt_residual_inf(inst, x);
    rec.residual_trace.push_back(residual);
    rec.trace.push_back(OuterTraceRow{k, 1, (Mx - z_next).squaredNorm(), 0.0,
                                      0.0, 0.0, 1.0, residual});
    rec.outer_iterations = k + 1;
    rec.inner_iterations_cumulative = k + 1;

    if (residual <= cfg.delta) {
      detail::finalize(rec, inst, x, z, p, residual, RunStatus::converged);
      return rec;
    }
    if (k + 1 == cfg.max_outer) {
      detail::finalize(rec, inst, x, z, p, residual, RunStatus::max_outer);
      return rec;
    }
  }
  return rec;
}

/// Dispatches on cfg.algorithm.
inline RunRecord run(const ProblemInstance& inst, const AlgorithmConfig& cfg,
                     const OuterObserver& observer = {},
                     const WarmStart* warm = nullptr) {
  return is_alm(cfg.algorithm) ? run_alm(inst, cfg, observer, warm)
                               : run_admm(inst, cfg, warm);
}

}  // namespace ialm
