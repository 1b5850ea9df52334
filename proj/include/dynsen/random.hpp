#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace dynsen {

/// Engine used for every random draw in the library. Always seeded explicitly;
/// no operation touches a global generator.
using Rng = std::mt19937_64;

/// SplitMix64 permutation step.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic child seed for stream `stream` of a master seed. Replicates,
/// per-component generators and per-step noise are all derived through this,
/// so a single master seed pins an entire experiment.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t state = master ^ (0xd1b54a32d192ed03ULL * (stream + 1));
  std::uint64_t z = splitmix64(state);
  return splitmix64(state) ^ z;
}

/// Vector of i.i.d. N(0, stddev^2) entries, drawn front to back.
inline Eigen::VectorXd gaussian_vector(int n, double stddev, Rng& rng) {
  Eigen::VectorXd v(n);
  std::normal_distribution<double> normal(0.0, stddev);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

/// Matrix with i.i.d. N(0, stddev^2) entries, drawn column-major.
inline Eigen::MatrixXd gaussian_matrix(int rows, int cols, double stddev, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  std::normal_distribution<double> normal(0.0, stddev);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = normal(rng);
  return m;
}

}  // namespace dynsen
