#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "roesser/errors.hpp"

namespace roesser {

using Index = std::int64_t;
using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A point or extent on the d-dimensional grid N_0^d.
///
/// Extents always store the largest index, so a signal with extent N has
/// support [0, N] and N_k + 1 samples along direction k.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<Index> entries) : entries_(std::move(entries)) {
    for (Index e : entries_) {
      if (e < 0) throw DimensionError("multi-index entries must be non-negative");
    }
  }
  MultiIndex(std::initializer_list<Index> entries)
      : MultiIndex(std::vector<Index>(entries)) {}

  static MultiIndex filled(std::size_t dim, Index value) {
    return MultiIndex(std::vector<Index>(dim, value));
  }

  std::size_t size() const { return entries_.size(); }
  Index operator[](std::size_t k) const { return entries_[k]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  const std::vector<Index>& entries() const { return entries_; }

  /// Componentwise partial order.
  bool operator<=(const MultiIndex& other) const {
    detail::require(size() == other.size(), "multi-index length mismatch");
    for (std::size_t k = 0; k < size(); ++k) {
      if (entries_[k] > other.entries_[k]) return false;
    }
    return true;
  }
  bool operator==(const MultiIndex&) const = default;

  /// Number of grid points in [0, *this].
  Index box_size() const {
    Index n = 1;
    for (Index e : entries_) n *= e + 1;
    return n;
  }

  bool all_equal(Index value) const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [value](Index e) { return e == value; });
  }

 private:
  std::vector<Index> entries_;
};

inline std::ostream& operator<<(std::ostream& os, const MultiIndex& m) {
  os << '(';
  for (std::size_t k = 0; k < m.size(); ++k) os << (k ? "," : "") << m[k];
  return os << ')';
}

namespace detail {

/// Row-major strides for a box [0, extent] (last direction fastest).
inline std::vector<Index> box_strides(const MultiIndex& extent) {
  std::vector<Index> strides(extent.size(), 1);
  for (std::size_t k = extent.size(); k-- > 1;) {
    strides[k - 1] = strides[k] * (extent[k] + 1);
  }
  return strides;
}

/// Advances `point` to the next multi-index in [0, extent] in row-major
/// order. Returns false after the last point.
inline bool next_in_box(std::vector<Index>& point, const MultiIndex& extent) {
  for (std::size_t k = point.size(); k-- > 0;) {
    if (point[k] < extent[k]) {
      ++point[k];
      return true;
    }
    point[k] = 0;
  }
  return false;
}

inline void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw DimensionError(std::string(what) + " contains non-finite values");
    }
  }
}

}  // namespace detail

/// Finite-support d-dimensional grid of channel vectors.
///
/// Storage is row-major over the grid with the channel index innermost, so
/// every pixel's channel vector is contiguous.
class Signal {
 public:
  Signal() = default;

  /// Zero signal.
  Signal(MultiIndex extent, Index channels)
      : extent_(std::move(extent)), channels_(channels) {
    detail::require(extent_.size() >= 1, "signal dimension must be >= 1");
    detail::require(channels_ >= 1, "signal needs at least one channel");
    strides_ = detail::box_strides(extent_);
    data_.assign(static_cast<std::size_t>(extent_.box_size() * channels_), 0.0);
  }

  Signal(MultiIndex extent, Index channels, std::vector<double> data)
      : Signal(std::move(extent), channels) {
    detail::require(data.size() == data_.size(),
                    "signal data length does not match extent and channels");
    detail::require_finite(data, "signal");
    data_ = std::move(data);
  }

  std::size_t dim() const { return extent_.size(); }
  Index channels() const { return channels_; }
  const MultiIndex& extent() const { return extent_; }
  const std::vector<double>& data() const { return data_; }

  Index linear_index(std::span<const Index> point) const {
    Index offset = 0;
    for (std::size_t k = 0; k < point.size(); ++k) offset += point[k] * strides_[k];
    return offset;
  }

  bool contains(std::span<const Index> point) const {
    for (std::size_t k = 0; k < point.size(); ++k) {
      if (point[k] < 0 || point[k] > extent_[k]) return false;
    }
    return true;
  }

  Eigen::Map<const Eigen::VectorXd> at(std::span<const Index> point) const {
    return {data_.data() + linear_index(point) * channels_, channels_};
  }
  Eigen::Map<Eigen::VectorXd> at(std::span<const Index> point) {
    return {data_.data() + linear_index(point) * channels_, channels_};
  }
  Eigen::Map<const Eigen::VectorXd> at_linear(Index linear) const {
    return {data_.data() + linear * channels_, channels_};
  }
  Eigen::Map<Eigen::VectorXd> at_linear(Index linear) {
    return {data_.data() + linear * channels_, channels_};
  }

  /// Channel vector at `point`, or zero outside the support.
  Eigen::VectorXd value_or_zero(std::span<const Index> point) const {
    if (!contains(point)) return Eigen::VectorXd::Zero(channels_);
    return at(point);
  }

  bool operator==(const Signal&) const = default;

 private:
  MultiIndex extent_;
  Index channels_ = 0;
  std::vector<Index> strides_;
  std::vector<double> data_;
};

/// Convolution kernel K[t], t in [0, r], each a c_out x c_in matrix, plus bias.
///
/// Storage: (r_1+1) x ... x (r_d+1) x c_out x c_in, row-major.
class Kernel {
 public:
  Kernel() = default;

  /// Zero kernel with zero bias.
  Kernel(MultiIndex extents, Index c_in, Index c_out)
      : extents_(std::move(extents)), c_in_(c_in), c_out_(c_out) {
    detail::require(extents_.size() >= 1, "kernel dimension must be >= 1");
    detail::require(c_in_ >= 1 && c_out_ >= 1, "kernel channel counts must be positive");
    strides_ = detail::box_strides(extents_);
    coeffs_.assign(static_cast<std::size_t>(extents_.box_size() * c_in_ * c_out_), 0.0);
    bias_ = Eigen::VectorXd::Zero(c_out_);
  }

  Kernel(MultiIndex extents, Index c_in, Index c_out, std::vector<double> coeffs,
         std::vector<double> bias)
      : Kernel(std::move(extents), c_in, c_out) {
    detail::require(coeffs.size() == coeffs_.size(),
                    "kernel data length does not match extents and channels");
    detail::require(static_cast<Index>(bias.size()) == c_out_,
                    "kernel bias length must equal c_out");
    detail::require_finite(coeffs, "kernel");
    detail::require_finite(bias, "kernel bias");
    coeffs_ = std::move(coeffs);
    bias_ = Eigen::Map<const Eigen::VectorXd>(bias.data(), c_out_);
  }

  std::size_t dim() const { return extents_.size(); }
  Index c_in() const { return c_in_; }
  Index c_out() const { return c_out_; }
  const MultiIndex& extents() const { return extents_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  const Eigen::VectorXd& bias() const { return bias_; }

  bool contains(std::span<const Index> t) const {
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t[k] < 0 || t[k] > extents_[k]) return false;
    }
    return true;
  }

  Eigen::Map<const RowMajorMatrix> at(std::span<const Index> t) const {
    return {coeffs_.data() + offset(t), c_out_, c_in_};
  }
  Eigen::Map<RowMajorMatrix> at(std::span<const Index> t) {
    return {coeffs_.data() + offset(t), c_out_, c_in_};
  }
  Eigen::Map<const RowMajorMatrix> at(std::initializer_list<Index> t) const {
    return at(std::span<const Index>(t.begin(), t.size()));
  }
  Eigen::Map<RowMajorMatrix> at(std::initializer_list<Index> t) {
    return at(std::span<const Index>(t.begin(), t.size()));
  }

  /// K[t] or the zero matrix when t lies outside [0, r].
  RowMajorMatrix value_or_zero(std::span<const Index> t) const {
    if (!contains(t)) return RowMajorMatrix::Zero(c_out_, c_in_);
    return at(t);
  }

  void set_bias(const Eigen::VectorXd& bias) {
    detail::require(bias.size() == c_out_, "kernel bias length must equal c_out");
    bias_ = bias;
  }

  bool operator==(const Kernel& other) const {
    return extents_ == other.extents_ && c_in_ == other.c_in_ &&
           c_out_ == other.c_out_ && coeffs_ == other.coeffs_ &&
           bias_ == other.bias_;
  }

 private:
  Index offset(std::span<const Index> t) const {
    Index pos = 0;
    for (std::size_t k = 0; k < t.size(); ++k) pos += t[k] * strides_[k];
    return pos * c_in_ * c_out_;
  }

  MultiIndex extents_;
  Index c_in_ = 0;
  Index c_out_ = 0;
  std::vector<Index> strides_;
  std::vector<double> coeffs_;
  Eigen::VectorXd bias_;
};

enum class Padding { Full, Same, None };

inline const char* to_string(Padding p) {
  switch (p) {
    case Padding::Full: return "full";
    case Padding::Same: return "same";
    case Padding::None: return "none";
  }
  return "?";
}

inline Padding padding_from_string(const std::string& s) {
  if (s == "full") return Padding::Full;
  if (s == "same") return Padding::Same;
  if (s == "none") return Padding::None;
  throw ParseError("unknown padding mode '" + s + "' (expected full, same or none)");
}

/// Layer hyperparameters besides the kernel itself.
struct ConvConfig {
  MultiIndex stride;
  MultiIndex dilation;
  Padding padding = Padding::Full;

  /// Stride 1, no dilation, full padding.
  static ConvConfig plain(std::size_t dim) {
    return {MultiIndex::filled(dim, 1), MultiIndex::filled(dim, 1), Padding::Full};
  }

  void validate(std::size_t dim) const {
    detail::require(stride.size() == dim, "stride length must equal kernel dimension");
    detail::require(dilation.size() == dim, "dilation length must equal kernel dimension");
    for (std::size_t k = 0; k < dim; ++k) {
      detail::require(stride[k] >= 1, "stride entries must be >= 1");
      detail::require(dilation[k] >= 1, "dilation entries must be >= 1");
    }
  }
};

}  // namespace roesser
