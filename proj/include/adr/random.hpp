#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

namespace adr {

/// Counter-based pseudo-random generator (splitmix64 finalizer over an
/// incrementing counter). Every draw is a pure function of (seed, stream,
/// counter), so a fixed seed reproduces the exact stream on any platform
/// and substreams never overlap.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed + 0x9e3779b97f4a7c15ULL * (stream + 1))) {}

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform draw in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; the spare value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  template <typename Scalar = double>
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> normal_vector(Eigen::Index n) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = static_cast<Scalar>(normal());
    return v;
  }

  template <typename Scalar = double>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> normal_matrix(Eigen::Index rows,
                                                                      Eigen::Index cols) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = static_cast<Scalar>(normal());
    return m;
  }

  /// Uniform draw inside the Euclidean ball of the given radius.
  template <typename Scalar = double>
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> ball_vector(Eigen::Index n, Scalar radius) {
    auto g = normal_vector<Scalar>(n);
    const Scalar norm = g.norm();
    if (norm == Scalar(0)) return g;
    const Scalar r = radius * static_cast<Scalar>(
                                  std::pow(uniform(), 1.0 / static_cast<double>(n)));
    return (r / norm) * g;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace adr
