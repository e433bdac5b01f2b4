#ifndef RANKBENCH_COMMON_HPP
#define RANKBENCH_COMMON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rankbench {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Any probability-producing model: maps a (rows x features) matrix to one
/// output per row. Trained predictors and hand-built test functions share it.
using PredictFn = std::function<Vector(const Matrix&)>;

using Rng = std::mt19937_64;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that violates a documented precondition (bad names, shapes, ranges).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-task seed for parallel or repeated work: root XOR the mixed task index,
/// then mixed again.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t task) {
  return mix64(root ^ mix64(task));
}

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Uniform integer in [0, n) without relying on library distribution details.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = Rng::max() - Rng::max() % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % n;
}

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller; stable across standard library vendors.
inline double standard_normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// Fisher-Yates shuffle of 0..n-1.
std::vector<Index> random_permutation(Index n, Rng& rng);

}  // namespace rankbench

#endif  // RANKBENCH_COMMON_HPP
