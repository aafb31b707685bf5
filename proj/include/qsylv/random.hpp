#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "qsylv/qmatrix.hpp"

namespace qsylv {

/// Counter-based splitmix64 stream with Box-Muller normals. Output depends only on the seed and
/// the draw index, so instances are bit-identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : counter_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (counter_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on (0, 1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform(), u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Integer in [lo, hi].
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(next_u64() % span);
  }

  Quaternion quaternion() {
    const double w = normal(), x = normal(), y = normal(), z = normal();
    return {w, x, y, z};
  }

  /// Standard-normal components in every quaternion coordinate.
  QMatrix matrix(std::size_t rows, std::size_t cols) {
    QMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = quaternion();
    return m;
  }

  /// Random matrix of rank at most r, built as a product of thin factors.
  QMatrix low_rank(std::size_t rows, std::size_t cols, std::size_t r) { return matrix(rows, r) * matrix(r, cols); }

 private:
  std::uint64_t counter_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qsylv
