#pragma once

#include <stdexcept>

#include "ialm/lasso.hpp"

// Slow, trusted reference solver used only by tests and the acceptance
// suite.  Plain proximal gradient with stepsize 1/L; shares nothing with
// the inner/outer loop machinery beyond the soft-threshold kernel and
// the KKT residual metric.

namespace ialm {

struct ReferenceSolution {
  Vector x_star;
  Vector z_star;  // = M x_star
  Vector p_star;  // = -A^T (A x_star - b) for M = I
  double residual = 0.0;
  double objective = 0.0;
  long iterations = 0;
};

/// Largest eigenvalue of A^T A by power iteration with a deterministic
/// all-ones start.
inline double largest_gram_eigenvalue(const Matrix& A, long max_iters = 500,
                                      double rel_tol = 1e-13) {
  const Index n = A.cols();
  Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  double lambda = 0.0;
  for (long i = 0; i < max_iters; ++i) {
    Vector w = A.transpose() * (A * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const double next = v.dot(A.transpose() * (A * v));
    if (std::abs(next - lambda) <= rel_tol * std::max(1.0, std::abs(next))) {
      return next;
    }
    lambda = next;
  }
  return lambda;
}

inline constexpr long kReferenceIterationCap = 10000000;

/// Proximal gradient on (1/2)|Ax - b|^2 + nu |x|_1 from x = 0 until
/// the KKT residual drops to tol.  Hitting the iteration cap signals an
/// ill-conditioned test instance and throws.
inline ReferenceSolution solve_reference(const ProblemInstance& inst,
                                         double tol = 1e-9) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_reference: tol must be positive");
  const double lip = largest_gram_eigenvalue(inst.A);
  if (!(lip > 0.0))
    throw std::runtime_error("solve_reference: A^T A has no positive eigenvalue");
  const double step = 1.0 / lip;

  ReferenceSolution out;
  Vector x = Vector::Zero(inst.n());
  Vector grad = inst.A.transpose() * (inst.A * x - inst.b);
  long iter = 0;
  double residual = kkt_residual_inf(inst, x, grad);
  while (residual > tol) {
    if (iter >= kReferenceIterationCap)
      throw std::runtime_error(
          "solve_reference: iteration cap reached; instance is ill-conditioned");
    x = soft_threshold(Vector(x - step * grad), step * inst.nu);
    grad = inst.A.transpose() * (inst.A * x - inst.b);
    residual = kkt_residual_inf(inst, x, grad);
    ++iter;
  }

  out.x_star = x;
  out.z_star = x;  // M = I
  out.p_star = -grad;
  out.residual = residual;
  out.objective = objective(inst, x);
  out.iterations = iter;
  return out;
}

}  // namespace ialm
