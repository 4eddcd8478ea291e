#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "roesser/tensor.hpp"

namespace roesser {

/// Seeded generator for reproducible fixtures.
///
/// The engine is std::mt19937_64 (its output sequence is fixed by the C++
/// standard). Each real is drawn from one 64-bit word x as
/// ((x >> 11) * 2^-53) * 2 - 1, i.e. uniform on [-1, 1). No standard
/// distribution objects are used, so other implementations of MT19937-64
/// reproduce the same values.
class Generator {
 public:
  explicit Generator(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return 2.0 * unit - 1.0;
  }

  /// Integer in [lo, hi] (inclusive), by modulo reduction of one word.
  Index integer(Index lo, Index hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<Index>(engine_() % span);
  }

  std::vector<double> uniform_vector(std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = uniform();
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

/// Coefficients in storage order, then the bias.
inline Kernel random_kernel(const MultiIndex& extents, Index c_in, Index c_out, Generator& gen) {
  const auto n = static_cast<std::size_t>(extents.box_size() * c_in * c_out);
  std::vector<double> coeffs = gen.uniform_vector(n);
  std::vector<double> bias = gen.uniform_vector(static_cast<std::size_t>(c_out));
  return {extents, c_in, c_out, std::move(coeffs), std::move(bias)};
}

inline Signal random_signal(const MultiIndex& extent, Index channels, Generator& gen) {
  const auto n = static_cast<std::size_t>(extent.box_size() * channels);
  return {extent, channels, gen.uniform_vector(n)};
}

}  // namespace roesser
