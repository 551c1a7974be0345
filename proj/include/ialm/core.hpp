#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>

// Outer-loop arithmetic of the relaxed inexact augmented Lagrangian
// framework: iterate statistics, acceptance tests, and the adaptive
// choice of the multiplier-step relaxation factor.  Everything here is
// plain value arithmetic, independent of the concrete objective.

namespace ialm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Subgradient of the augmented Lagrangian at an inner iterate,
/// split into its x-block and z-block.  Both inner solvers in this
/// library minimize exactly in z, so s_z is always zero.
struct Subgradient {
  Vector x;
  Vector z;
};

/// Outer-loop state: multiplier estimate p, auxiliary vector
/// w = (w_x, w_z), penalty c, and the relative-error constant epsilon.
struct OuterState {
  Vector p;    // multiplier estimate, length m
  Vector w_x;  // length n
  Vector w_z;  // length m; stays zero while every accepted s has s_z = 0
  double c = 1.0;
  double epsilon = 0.1;
  long k = 0;  // outer-iteration counter
};

inline OuterState make_outer_start(Index n, Index m, double c, double epsilon) {
  if (!(c > 0.0)) throw std::invalid_argument("penalty c must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("epsilon must lie in (0,1)");
  OuterState s;
  s.p = Vector::Zero(m);
  s.w_x = Vector::Zero(n);
  s.w_z = Vector::Zero(m);
  s.c = c;
  s.epsilon = epsilon;
  return s;
}

/// Scalar statistics of one candidate subproblem solution:
///   U = |u|^2,  S = |s|^2,  A = (1/c)|<iterate - w, s>|,
///   Delta = (U - A)^2 - eps * U * (U + S).
/// Delta is the discriminant of the quadratic whose roots bound the
/// admissible relaxation factors; Delta >= 0 certifies a nonempty range.
struct SubproblemStats {
  double U = 0.0;
  double S = 0.0;
  double A = 0.0;
  double Delta = 0.0;
  double epsilon = 0.0;  // the eps the stats were computed with
};

enum class RelaxationMode { adaptive, fixed_unit };

/// Outcome of choosing the relaxation factor for an accepted iterate.
struct RelaxationDecision {
  double gamma_min = -1.0;  // lower end of the admissible gamma interval
  double gamma = 1.0;       // chosen within (gamma_min, 1]
  double rho = 1.0;
  RelaxationMode mode = RelaxationMode::fixed_unit;
};

/// Rule for picking gamma inside (gamma_min, 1].  "max" always takes 1
/// (the largest admissible rho); "midpoint" takes the interval midpoint;
/// "fixed:<v>" takes v clamped into the admissible interval.
class GammaRule {
 public:
  static GammaRule max() { return GammaRule(Kind::max, 1.0); }
  static GammaRule midpoint() { return GammaRule(Kind::midpoint, 0.0); }
  static GammaRule fixed(double value) { return GammaRule(Kind::fixed, value); }

  static GammaRule parse(const std::string& id) {
    if (id.empty() || id == "max") return max();
    if (id == "midpoint") return midpoint();
    if (id.rfind("fixed:", 0) == 0) {
      try {
        std::size_t used = 0;
        const double value = std::stod(id.substr(6), &used);
        if (used == id.size() - 6) return fixed(value);
      } catch (const std::exception&) {
      }
    }
    throw std::invalid_argument("unknown gamma rule: " + id);
  }

  double choose(double gamma_min) const {
    switch (kind_) {
      case Kind::max:
        return 1.0;
      case Kind::midpoint:
        return 0.5 * (gamma_min + 1.0);
      case Kind::fixed: {
        if (value_ > gamma_min && value_ <= 1.0) return value_;
        // outside the admissible interval: fall back to its midpoint
        return 0.5 * (gamma_min + 1.0);
      }
    }
    return 1.0;
  }

  std::string id() const {
    switch (kind_) {
      case Kind::max:
        return "max";
      case Kind::midpoint:
        return "midpoint";
      case Kind::fixed:
        return "fixed:" + std::to_string(value_);
    }
    return "max";
  }

 private:
  enum class Kind { max, midpoint, fixed };
  GammaRule(Kind kind, double value) : kind_(kind), value_(value) {}
  Kind kind_;
  double value_;
};

namespace detail {
inline void require_same_size(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size())
    throw std::invalid_argument(std::string("dimension mismatch: ") + what);
}
}  // namespace detail

/// Statistics of the candidate iterate (x, z) with subgradient s against
/// the current outer state.  u = z - Mx, so U = |Mx - z|^2.  The inner
/// product term splits over the two blocks; with s_z = 0 this equals the
/// unsplit |<(x,z) - w, s>|.
inline SubproblemStats compute_stats(const Vector& x, const Vector& z,
                                     const Vector& Mx, const Subgradient& s,
                                     const OuterState& state) {
  detail::require_same_size(x, state.w_x, "x vs w_x");
  detail::require_same_size(z, state.w_z, "z vs w_z");
  detail::require_same_size(Mx, z, "Mx vs z");
  detail::require_same_size(s.x, x, "s_x vs x");
  detail::require_same_size(s.z, z, "s_z vs z");
  if (!(state.c > 0.0)) throw std::invalid_argument("penalty c must be positive");

  SubproblemStats st;
  st.U = (Mx - z).squaredNorm();
  st.S = s.x.squaredNorm() + s.z.squaredNorm();
  st.A = (std::abs((x - state.w_x).dot(s.x)) +
          std::abs((z - state.w_z).dot(s.z))) /
         state.c;
  st.epsilon = state.epsilon;
  st.Delta = (st.U - st.A) * (st.U - st.A) -
             state.epsilon * st.U * (st.U + st.S);
  return st;
}

/// Inner-loop acceptance test.
///
/// adaptive:   accept iff A < U and Delta >= 0, strengthened to
///             Delta >= (A + S)^2 while inner_j <= j1_threshold (which
///             demands that rho >= 1 be admissible).
/// fixed_unit: the rho = 1 relative-error criterion 2A + S <= (1-eps)U.
inline bool acceptance_test(const SubproblemStats& stats, RelaxationMode mode,
                            long inner_j, long j1_threshold) {
  if (mode == RelaxationMode::fixed_unit) {
    return 2.0 * stats.A + stats.S <= (1.0 - stats.epsilon) * stats.U;
  }
  if (!(stats.A < stats.U)) return false;
  if (inner_j <= j1_threshold) {
    const double as = stats.A + stats.S;
    return stats.Delta >= as * as;
  }
  return stats.Delta >= 0.0;
}

/// Admissible range of the relaxation factor for a given epsilon:
/// [1 - sqrt(1-eps), 1 + sqrt(1-eps)].
inline double rho_lower_bound(double epsilon) { return 1.0 - std::sqrt(1.0 - epsilon); }
inline double rho_upper_bound(double epsilon) { return 1.0 + std::sqrt(1.0 - epsilon); }

/// Adaptive relaxation factor for an accepted iterate:
///   gamma_min = max{-1, (A - U)/sqrt(Delta)},   gamma in (gamma_min, 1],
///   rho = (U - A + gamma sqrt(Delta)) / (U + S)  > 0.
/// Requires A < U and Delta >= 0 (i.e. an accepting adaptive test).
inline RelaxationDecision relaxation_factor(const SubproblemStats& stats,
                                            const GammaRule& rule = GammaRule::max()) {
  if (!(stats.A < stats.U) || !(stats.Delta >= 0.0))
    throw std::logic_error(
        "relaxation_factor called without an accepted adaptive iterate "
        "(requires A < U and Delta >= 0)");
  const double sqrt_delta = std::sqrt(stats.Delta);
  RelaxationDecision d;
  d.mode = RelaxationMode::adaptive;
  d.gamma_min = sqrt_delta > 0.0
                    ? std::max(-1.0, (stats.A - stats.U) / sqrt_delta)
                    : -1.0;
  d.gamma = rule.choose(d.gamma_min);
  d.rho = (stats.U - stats.A + d.gamma * sqrt_delta) / (stats.U + stats.S);
  // in exact arithmetic rho lies in [1-sqrt(1-eps), 1+sqrt(1-eps)]; clamp
  // away the last-ulp excursions the sqrt can introduce
  d.rho = std::min(std::max(d.rho, rho_lower_bound(stats.epsilon)),
                   rho_upper_bound(stats.epsilon));
  return d;
}

/// Result of one multiplier update: the advanced state plus the
/// unrelaxed multiplier p_bar = p - c u.
struct MultiplierUpdate {
  OuterState state;
  Vector p_bar;
};

/// Applies the accepted iterate:
///   w' = w - rho c s,   p_bar = p - c u,   p' = p - rho c u,
/// and increments the outer counter.  p' equals (1-rho) p + rho p_bar.
inline MultiplierUpdate outer_update(const OuterState& state, const Vector& x,
                                     const Vector& z, const Vector& u,
                                     const Subgradient& s, double rho) {
  detail::require_same_size(x, state.w_x, "x vs w_x");
  detail::require_same_size(z, state.w_z, "z vs w_z");
  detail::require_same_size(u, state.p, "u vs p");
  detail::require_same_size(s.x, state.w_x, "s_x vs w_x");
  detail::require_same_size(s.z, state.w_z, "s_z vs w_z");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");

  MultiplierUpdate out{state, state.p - state.c * u};
  out.state.w_x -= rho * state.c * s.x;
  out.state.w_z -= rho * state.c * s.z;
  out.state.p -= rho * state.c * u;
  out.state.k += 1;
  return out;
}

// U and S are squared norms, so this admits |u|, |s| up to 1e-14: exact
// zeros plus rounding noise, nothing an ordinary converging run reaches
// before its residual check does.
inline constexpr double kExactOptimumTol = 1e-28;

/// True when the subproblem was solved exactly at a saddle point
/// (u = 0 and s = 0 within tol_zero); the current iterate is then primal
/// optimal and the current p dual optimal.
inline bool declare_exact_optimum(const SubproblemStats& stats,
                                  double tol_zero = kExactOptimumTol) {
  return stats.U <= tol_zero && stats.S <= tol_zero;
}

/// Slack of the relaxed error criterion 2 rho A + rho^2 S <= (2 rho -
/// rho^2 - eps) U; nonpositive iff the criterion holds at this rho.
inline double error_criterion_slack(const SubproblemStats& stats, double rho) {
  return 2.0 * rho * stats.A + rho * rho * stats.S -
         (2.0 * rho - rho * rho - stats.epsilon) * stats.U;
}

}  // namespace ialm
