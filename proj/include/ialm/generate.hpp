#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "ialm/core.hpp"

// Synthetic LASSO instances: A with i.i.d. standard normal entries, a
// planted sign vector x* with ceil(sparsity * n) nonzeros, and
// b = A x* + noise_sigma * standard normal.  All draws come from one
// mt19937_64 engine seeded with seed + seed_offset; A is filled row by
// row, then the support, then the signs, then the noise, so a (spec,
// seed) pair reproduces the same instance exactly within a build.

namespace ialm {

struct GeneratorSpec {
  Index obs = 0;
  Index n = 0;
  double sparsity = 0.1;     // fraction of nonzero truth entries, in (0,1]
  double noise_sigma = 0.0;
  long seed_offset = 0;
};

struct GeneratedInstance {
  Matrix A;
  Vector b;
  Vector x_truth;
};

inline GeneratedInstance generate_instance(const GeneratorSpec& spec,
                                           std::uint64_t seed) {
  if (spec.obs < 1 || spec.n < 1)
    throw std::invalid_argument("generate_instance: obs and n must be >= 1");
  if (!(spec.sparsity > 0.0 && spec.sparsity <= 1.0))
    throw std::invalid_argument("generate_instance: sparsity must lie in (0,1]");
  if (spec.noise_sigma < 0.0)
    throw std::invalid_argument("generate_instance: noise_sigma must be >= 0");

  std::mt19937_64 rng(seed + static_cast<std::uint64_t>(spec.seed_offset));
  std::normal_distribution<double> normal(0.0, 1.0);

  GeneratedInstance out;
  out.A.resize(spec.obs, spec.n);
  for (Index i = 0; i < spec.obs; ++i)
    for (Index j = 0; j < spec.n; ++j) out.A(i, j) = normal(rng);

  const Index nnz = static_cast<Index>(
      std::ceil(spec.sparsity * static_cast<double>(spec.n)));
  std::vector<Index> idx(static_cast<std::size_t>(spec.n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);

  out.x_truth = Vector::Zero(spec.n);
  std::uniform_int_distribution<int> coin(0, 1);
  for (Index k = 0; k < nnz; ++k)
    out.x_truth[idx[static_cast<std::size_t>(k)]] = coin(rng) ? 1.0 : -1.0;

  out.b = out.A * out.x_truth;
  if (spec.noise_sigma > 0.0) {
    for (Index i = 0; i < spec.obs; ++i) out.b[i] += spec.noise_sigma * normal(rng);
  }
  return out;
}

}  // namespace ialm
