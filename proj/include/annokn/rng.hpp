#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace annokn {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed for stream `stream` of `parent`.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept {
  return mix_seed(mix_seed(parent) ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

/// rows x cols standard normal matrix, filled row by row.
inline Eigen::MatrixXd standard_normal(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = normal(rng);
  return out;
}

inline Eigen::VectorXd standard_normal(Rng& rng, Eigen::Index size) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd out(size);
  for (Eigen::Index i = 0; i < size; ++i) out(i) = normal(rng);
  return out;
}

}  // namespace annokn
