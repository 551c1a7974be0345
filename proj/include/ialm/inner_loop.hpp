#pragma once

#include <stdexcept>

#include "ialm/core.hpp"
#include "ialm/lasso.hpp"

// The two subproblem solvers driving the inexact outer loop:
//
//   adss_step      alternating x/z minimization, equivalent to the plain
//                  proximal gradient method with stepsize 1/c applied to
//                  a dual formulation of the subproblem;
//   fista_cd_step  the same pair of minimizations accelerated with the
//                  Chambolle-Dossal momentum sequence t_j = (j + a - 1)/a,
//                  which guarantees iterate (not just value) convergence.
//
// Both emit, at every step, the subgradient s = (s_x, 0) certifying the
// iterate and the constraint gap u = z - Mx.  M is the identity here.

namespace ialm {

/// One inner iterate.  j counts iterates 1-based: j = 1 is the warm
/// start z^{k,1} = y^{k,1} = z^k, before any (x,z) pair has been
/// computed; x, s and u are only meaningful once j >= 2.
struct InnerState {
  Vector x;
  Vector z;
  Vector y;       // extrapolation point; equals z for adss
  Vector z_prev;  // z of the previous iterate
  double t = 1.0; // momentum counter t_j (t_1 = 1)
  long j = 1;
  Subgradient s;
  Vector u;
};

inline InnerState make_inner_start(const Vector& z_warm) {
  InnerState s;
  s.z = z_warm;
  s.y = z_warm;
  s.z_prev = z_warm;
  s.t = 1.0;
  s.j = 1;
  return s;
}

/// One alternating-minimization sweep:
///   x' = argmin_x { f(x) + <p, Mx> + (c/2)|Mx - z|^2 }
///   z' = argmin_z { g(z) - <p, z> + (c/2)|Mx' - z|^2 }
///   s' = (c M^T (z - z'), 0),   u' = z' - Mx'.
inline InnerState adss_step(const InnerState& state, const OuterState& outer,
                            const ProblemInstance& inst,
                            const XSolverCache& cache) {
  InnerState next;
  next.x = solve_x_subproblem(inst, cache, outer.p, outer.c, state.z);
  const Vector& Mx = next.x;  // M = I
  next.z = solve_z_subproblem(inst, outer.p, outer.c, Mx);
  next.s.x = outer.c * (state.z - next.z);
  next.s.z = Vector::Zero(next.z.size());
  next.u = next.z - Mx;
  next.y = next.z;
  next.z_prev = state.z;
  next.t = state.t;
  next.j = state.j + 1;
  return next;
}

/// One accelerated sweep.  The x-minimization targets the extrapolation
/// point y instead of z, and
///   t' = (j + a)/a,   y' = z' + ((t - 1)/t') (z' - z),
///   s' = (c M^T (y - z'), 0).
/// The momentum coefficient at step j is (t_j - 1)/t_{j+1} = (j-1)/(j+a),
/// zero at j = 1 where the step coincides with adss_step.
inline InnerState fista_cd_step(const InnerState& state, const OuterState& outer,
                                const ProblemInstance& inst,
                                const XSolverCache& cache, double a) {
  if (!(a > 2.0))
    throw std::invalid_argument("fista_cd_step: momentum constant a must exceed 2");
  InnerState next;
  next.x = solve_x_subproblem(inst, cache, outer.p, outer.c, state.y);
  const Vector& Mx = next.x;
  next.z = solve_z_subproblem(inst, outer.p, outer.c, Mx);
  next.t = (static_cast<double>(state.j) + a) / a;
  next.y = next.z + ((state.t - 1.0) / next.t) * (next.z - state.z);
  next.s.x = outer.c * (state.y - next.z);
  next.s.z = Vector::Zero(next.z.size());
  next.u = next.z - Mx;
  next.z_prev = state.z;
  next.j = state.j + 1;
  return next;
}

/// Gradient of the smooth part of the dual subproblem objective,
///   grad(z) = -(p + c (M xbar - z)),  xbar = argmin_x { f(x) + <p, Mx>
///             + (c/2)|Mx - z|^2 }.
/// Test/diagnostic path only; the solvers recover it implicitly.
inline Vector dual_gradient(const ProblemInstance& inst, const XSolverCache& cache,
                            const Vector& p, double c, const Vector& z) {
  const Vector xbar = solve_x_subproblem(inst, cache, p, c, z);
  return -(p + c * (xbar - z));
}

}  // namespace ialm
