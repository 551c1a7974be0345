#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>

#include "ialm/core.hpp"

// LASSO instantiation of the Fenchel-Rockafellar split
//   min (1/2)|Ax - b|^2 + nu |x|_1,
// i.e. f(x) = (1/2)|Ax - b|^2, g = nu |.|_1, M = I (so m = n).
// Provides data scaling, the nu rule, the two subproblem oracles, the
// objective, and the componentwise KKT residual used for termination.

namespace ialm {

/// Scaled LASSO data: unit-norm columns of A, unit-norm b, weight nu.
struct ProblemInstance {
  Matrix A;  // obs x n
  Vector b;  // obs
  double nu = 0.0;

  Index n() const { return A.cols(); }
  Index obs() const { return A.rows(); }
};

inline double soft_threshold(double v, double tau) {
  if (v > tau) return v - tau;
  if (v < -tau) return v + tau;
  return 0.0;
}

inline Vector soft_threshold(const Vector& v, double tau) {
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out[i] = soft_threshold(v[i], tau);
  return out;
}

struct ScaledData {
  Matrix A;
  Vector b;
};

/// Divides every column of A and the vector b by their l2 norms.
/// A zero column or zero b is rejected: silently dropping features would
/// change the reported dimensions.
inline ScaledData scale_instance(const Matrix& A_raw, const Vector& b_raw) {
  if (A_raw.rows() == 0 || A_raw.cols() == 0)
    throw std::invalid_argument("scale_instance: empty matrix");
  if (b_raw.size() != A_raw.rows())
    throw std::invalid_argument("scale_instance: b length must equal row count");

  ScaledData out{A_raw, b_raw};
  for (Index j = 0; j < out.A.cols(); ++j) {
    const double norm = out.A.col(j).norm();
    if (norm == 0.0)
      throw std::invalid_argument("scale_instance: column " +
                                  std::to_string(j) + " is identically zero");
    out.A.col(j) /= norm;
  }
  const double bnorm = out.b.norm();
  if (bnorm == 0.0)
    throw std::invalid_argument("scale_instance: b is identically zero");
  out.b /= bnorm;
  return out;
}

/// nu = 0.1 |A^T b|_inf on the scaled data.
inline double regularization_weight(const Matrix& A, const Vector& b) {
  const double scale = (A.transpose() * b).cwiseAbs().maxCoeff();
  if (scale == 0.0)
    throw std::invalid_argument(
        "regularization_weight: A^T b = 0, instance is degenerate");
  return 0.1 * scale;
}

inline double regularization_weight(const ProblemInstance& inst) {
  return regularization_weight(inst.A, inst.b);
}

/// Scales raw data and applies the nu rule.
inline ProblemInstance make_instance(const Matrix& A_raw, const Vector& b_raw) {
  ScaledData scaled = scale_instance(A_raw, b_raw);
  ProblemInstance inst{std::move(scaled.A), std::move(scaled.b), 0.0};
  inst.nu = regularization_weight(inst);
  return inst;
}

/// Cholesky factorization backing the x-subproblem solve, built once per
/// (instance, c) pair.  Factors A^T A + c I when obs >= n; otherwise the
/// obs x obs Gram variant A A^T + c I, recovering x through the matrix
/// inversion identity
///   (A^T A + c I)^{-1} = (1/c)(I - A^T (A A^T + c I)^{-1} A).
class XSolverCache {
 public:
  XSolverCache(const ProblemInstance& inst, double c)
      : c_(c), gram_side_(inst.obs() < inst.n()) {
    if (!(c > 0.0)) throw std::invalid_argument("XSolverCache: c must be positive");
    if (gram_side_) {
      Matrix G = inst.A * inst.A.transpose();
      G.diagonal().array() += c;
      llt_.compute(G);
    } else {
      Matrix G = inst.A.transpose() * inst.A;
      G.diagonal().array() += c;
      llt_.compute(G);
    }
    if (llt_.info() != Eigen::Success)
      throw std::runtime_error("XSolverCache: Cholesky factorization failed");
  }

  double c() const { return c_; }
  bool uses_gram_side() const { return gram_side_; }

  /// Solves (A^T A + c I) x = rhs with one iterative-refinement pass so
  /// the residual stays within 1e-10 (1 + |rhs|) even for small c.
  Vector solve(const ProblemInstance& inst, const Vector& rhs) const {
    Vector x = solve_once(inst, rhs);
    const Vector r = rhs - apply(inst, x);
    x += solve_once(inst, r);
    return x;
  }

  /// Applies A^T A + c I.
  Vector apply(const ProblemInstance& inst, const Vector& v) const {
    return inst.A.transpose() * (inst.A * v) + c_ * v;
  }

 private:
  Vector solve_once(const ProblemInstance& inst, const Vector& rhs) const {
    if (gram_side_) {
      return (rhs - inst.A.transpose() * llt_.solve(inst.A * rhs)) / c_;
    }
    return llt_.solve(rhs);
  }

  Eigen::LLT<Matrix> llt_;
  double c_;
  bool gram_side_;
};

/// x-subproblem: argmin_x { f(x) + <p, Mx> + (c/2)|Mx - target|^2 },
/// which for M = I reduces to (A^T A + c I) x = A^T b - p + c target.
inline Vector solve_x_subproblem(const ProblemInstance& inst,
                                 const XSolverCache& cache, const Vector& p,
                                 double c, const Vector& target) {
  if (cache.c() != c)
    throw std::logic_error("solve_x_subproblem: cache built for a different c");
  detail::require_same_size(p, target, "p vs target");
  if (p.size() != inst.n())
    throw std::invalid_argument("solve_x_subproblem: p has wrong length");
  const Vector rhs = inst.A.transpose() * inst.b - p + c * target;
  return cache.solve(inst, rhs);
}

/// z-subproblem: argmin_z { g(z) - <p, z> + (c/2)|Mx - z|^2 }, the
/// soft-thresholding map z_i = soft(Mx_i + p_i/c, nu/c).
inline Vector solve_z_subproblem(const ProblemInstance& inst, const Vector& p,
                                 double c, const Vector& Mx) {
  detail::require_same_size(p, Mx, "p vs Mx");
  if (!(c > 0.0)) throw std::invalid_argument("solve_z_subproblem: c must be positive");
  return soft_threshold(Vector(Mx + p / c), inst.nu / c);
}

inline constexpr double kZeroComponentTol = 1e-12;

/// Componentwise l-inf distance from 0 to the subdifferential of
/// (1/2)|Ax - b|^2 + nu |x|_1 at x, given grad = A^T(Ax - b).
/// Components with |x_i| <= 1e-12 are treated as zero.
inline double kkt_residual_inf(const ProblemInstance& inst, const Vector& x,
                               const Vector& grad) {
  detail::require_same_size(x, grad, "x vs grad");
  double worst = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    double r;
    if (std::abs(x[i]) > kZeroComponentTol) {
      r = std::abs(grad[i] + inst.nu * (x[i] > 0.0 ? 1.0 : -1.0));
    } else {
      r = std::max(0.0, std::abs(grad[i]) - inst.nu);
    }
    worst = std::max(worst, r);
  }
  return worst;
}

inline double kkt_residual_inf(const ProblemInstance& inst, const Vector& x) {
  const Vector grad = inst.A.transpose() * (inst.A * x - inst.b);
  return kkt_residual_inf(inst, x, grad);
}

/// (1/2)|Ax - b|^2 + nu |x|_1.
inline double objective(const ProblemInstance& inst, const Vector& x) {
  return 0.5 * (inst.A * x - inst.b).squaredNorm() +
         inst.nu * x.lpNorm<1>();
}

}  // namespace ialm
