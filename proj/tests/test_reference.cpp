#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ialm/reference.hpp"
#include "test_util.hpp"

using namespace ialm;
using Catch::Approx;

TEST_CASE("largest_gram_eigenvalue") {
  SECTION("diagonal case") {
    Matrix A = Matrix::Zero(3, 3);
    A.diagonal() << 2.0, 1.0, 0.5;
    CHECK(largest_gram_eigenvalue(A) == Approx(4.0).epsilon(1e-10));
  }

  SECTION("upper-bounds the Rayleigh quotient on random directions") {
    std::mt19937_64 rng(3);
    const Matrix A = test_util::random_matrix(rng, 10, 6);
    const double lip = largest_gram_eigenvalue(A);
    for (int trial = 0; trial < 50; ++trial) {
      const Vector v = test_util::random_vector(rng, 6).normalized();
      CHECK((A * v).squaredNorm() <= lip * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("solve_reference") {
  SECTION("dominating nu gives x* = 0") {
    std::mt19937_64 rng(5);
    auto inst = test_util::random_instance(rng, 6, 4);
    inst.nu = (inst.A.transpose() * inst.b).cwiseAbs().maxCoeff() + 0.05;
    const auto ref = solve_reference(inst, 1e-9);
    CHECK(ref.x_star.cwiseAbs().maxCoeff() == 0.0);
    CHECK(ref.residual == 0.0);
  }

  SECTION("orthonormal design has the soft-threshold closed form") {
    Matrix A = Matrix::Identity(4, 4);
    Vector b(4);
    b << 0.8, -0.4, 0.3, 0.331662479035540;  // unit norm
    REQUIRE(b.norm() == Approx(1.0).epsilon(1e-12));
    ProblemInstance inst{A, b, 0.35};
    const auto ref = solve_reference(inst, 1e-12);
    for (Index i = 0; i < 4; ++i)
      CHECK(ref.x_star[i] == Approx(soft_threshold(b[i], 0.35)).margin(1e-10));
  }

  SECTION("solution certificates on random instances") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 3; ++trial) {
      const auto inst = test_util::random_instance(rng, 20, 12);
      const auto ref = solve_reference(inst, 1e-9);

      CHECK(kkt_residual_inf(inst, ref.x_star) <= 1e-9);
      CHECK(ref.z_star == ref.x_star);
      CHECK((ref.p_star +
             Vector(inst.A.transpose() * (inst.A * ref.x_star - inst.b)))
                .cwiseAbs()
                .maxCoeff() <= 1e-14);

      // p* lives in the l1 subdifferential at z*
      for (Index i = 0; i < ref.z_star.size(); ++i) {
        CHECK(std::abs(ref.p_star[i]) <= inst.nu + 1e-8);
        if (std::abs(ref.z_star[i]) > 1e-12)
          CHECK(ref.p_star[i] ==
                Approx(inst.nu * (ref.z_star[i] > 0 ? 1.0 : -1.0)).margin(1e-8));
      }

      // optimality echo against random perturbations
      std::normal_distribution<double> normal(0.0, 1e-3);
      for (int p = 0; p < 20; ++p) {
        Vector perturbed = ref.x_star;
        for (Index i = 0; i < perturbed.size(); ++i) perturbed[i] += normal(rng);
        CHECK(objective(inst, ref.x_star) <=
              objective(inst, perturbed) + 1e-12);
      }
    }
  }

  SECTION("doubling the iteration budget moves x* by at most tol") {
    std::mt19937_64 rng(11);
    const auto inst = test_util::random_instance(rng, 400, 8);
    const double tol = 1e-9;
    const auto ref = solve_reference(inst, tol);
    // continue the same iteration for another full budget
    const double step = 1.0 / largest_gram_eigenvalue(inst.A);
    Vector x = ref.x_star;
    for (long i = 0; i < ref.iterations; ++i) {
      const Vector grad = inst.A.transpose() * (inst.A * x - inst.b);
      x = soft_threshold(Vector(x - step * grad), step * inst.nu);
    }
    CHECK((x - ref.x_star).cwiseAbs().maxCoeff() <= tol);
  }

  SECTION("bad tolerance is rejected") {
    std::mt19937_64 rng(13);
    const auto inst = test_util::random_instance(rng, 4, 3);
    CHECK_THROWS_AS(solve_reference(inst, 0.0), std::invalid_argument);
  }
}
