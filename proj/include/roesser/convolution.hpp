#pragma once

#include <string>
#include <vector>

#include "roesser/tensor.hpp"

namespace roesser {

/// Sub-grid [lo, hi] of `y`, re-based so that lo becomes the origin.
inline Signal slice(const Signal& y, const MultiIndex& lo, const MultiIndex& hi) {
  detail::require(lo.size() == y.dim() && hi.size() == y.dim(), "slice bounds dimension mismatch");
  std::vector<Index> out_extent(y.dim());
  for (std::size_t k = 0; k < y.dim(); ++k) {
    detail::require(lo[k] <= hi[k] && hi[k] <= y.extent()[k], "slice window outside the support");
    out_extent[k] = hi[k] - lo[k];
  }
  Signal out(MultiIndex(out_extent), y.channels());
  std::vector<Index> i(y.dim(), 0), src(y.dim());
  do {
    for (std::size_t k = 0; k < y.dim(); ++k) src[k] = i[k] + lo[k];
    out.at(i) = y.at(src);
  } while (detail::next_in_box(i, out.extent()));
  return out;
}

/// Shifts `u` forward by `amount` along every direction, filling with zeros.
inline Signal pad_leading(const Signal& u, const MultiIndex& amount) {
  detail::require(amount.size() == u.dim(), "padding amount dimension mismatch");
  std::vector<Index> extent(u.dim());
  for (std::size_t k = 0; k < u.dim(); ++k) extent[k] = u.extent()[k] + amount[k];
  Signal out(MultiIndex(extent), u.channels());
  std::vector<Index> i(u.dim(), 0), dst(u.dim());
  do {
    for (std::size_t k = 0; k < u.dim(); ++k) dst[k] = i[k] + amount[k];
    out.at(dst) = u.at(i);
  } while (detail::next_in_box(i, u.extent()));
  return out;
}

/// Expands a dilated kernel: K_eff[dilation * t] = K[t], zeros elsewhere.
inline Kernel dilate_kernel(const Kernel& kernel, const MultiIndex& dilation) {
  detail::require(dilation.size() == kernel.dim(), "dilation length must equal kernel dimension");
  std::vector<Index> eff(kernel.dim());
  for (std::size_t k = 0; k < kernel.dim(); ++k) {
    detail::require(dilation[k] >= 1, "dilation entries must be >= 1");
    eff[k] = dilation[k] * kernel.extents()[k];
  }
  Kernel out(MultiIndex(eff), kernel.c_in(), kernel.c_out());
  out.set_bias(kernel.bias());
  std::vector<Index> t(kernel.dim(), 0), dst(kernel.dim());
  do {
    for (std::size_t k = 0; k < kernel.dim(); ++k) dst[k] = dilation[k] * t[k];
    out.at(dst) = kernel.at(t);
  } while (detail::next_in_box(t, kernel.extents()));
  return out;
}

/// Same kernel with extents grown to `extents` (new taps are zero).
inline Kernel zero_extend_kernel(const Kernel& kernel, const MultiIndex& extents) {
  detail::require(kernel.extents() <= extents, "zero extension cannot shrink a kernel");
  Kernel out(extents, kernel.c_in(), kernel.c_out());
  out.set_bias(kernel.bias());
  std::vector<Index> t(kernel.dim(), 0);
  do {
    out.at(t) = kernel.at(t);
  } while (detail::next_in_box(t, kernel.extents()));
  return out;
}

/// Support interval [lo, hi] that `crop_for_padding` keeps for a signal of
/// extent N. Empty windows (lo > hi in some direction) are reported as-is.
struct CropWindow {
  std::vector<Index> lo;
  std::vector<Index> hi;

  bool empty() const {
    for (std::size_t k = 0; k < lo.size(); ++k) {
      if (lo[k] > hi[k]) return true;
    }
    return false;
  }
};

inline CropWindow crop_window(const MultiIndex& extent, const MultiIndex& r, Padding mode) {
  detail::require(extent.size() == r.size(), "crop: kernel extent dimension mismatch");
  CropWindow w{std::vector<Index>(r.size()), std::vector<Index>(r.size())};
  for (std::size_t k = 0; k < r.size(); ++k) {
    const Index n = extent[k];
    switch (mode) {
      case Padding::Full:
        w.lo[k] = 0;
        w.hi[k] = n;
        break;
      case Padding::None:
        w.lo[k] = r[k];
        w.hi[k] = n - r[k];
        break;
      case Padding::Same:
        w.lo[k] = r[k] / 2;
        w.hi[k] = n - (r[k] + 1) / 2;
        break;
    }
  }
  return w;
}

/// Restricts a full-padding output to the support of the requested padding
/// mode: None keeps [r, N - r], Same keeps [floor(r/2), N - ceil(r/2)].
inline Signal crop_for_padding(const Signal& y, const MultiIndex& r, Padding mode) {
  if (mode == Padding::Full) return y;
  const CropWindow w = crop_window(y.extent(), r, mode);
  if (w.empty()) {
    throw DimensionError("crop window is empty: signal extent too small for the kernel");
  }
  return slice(y, MultiIndex(w.lo), MultiIndex(w.hi));
}

/// Lumps stride patches into channel vectors:
/// out[i] = vec(u[s*i + t] | t in [0, s[), t enumerated lexicographically
/// (last direction fastest), channels innermost. Output extent is floor(N/s);
/// reads past the support are zero.
inline Signal reshape_strided(const Signal& u, const MultiIndex& stride) {
  detail::require(stride.size() == u.dim(), "stride length must equal signal dimension");
  std::vector<Index> out_extent(u.dim()), patch_extent(u.dim());
  for (std::size_t k = 0; k < u.dim(); ++k) {
    detail::require(stride[k] >= 1, "stride entries must be >= 1");
    out_extent[k] = u.extent()[k] / stride[k];
    patch_extent[k] = stride[k] - 1;
  }
  const MultiIndex patch(patch_extent);
  const Index patch_size = patch.box_size();
  const Index c = u.channels();
  Signal out(MultiIndex(out_extent), c * patch_size);
  std::vector<Index> i(u.dim(), 0), t(u.dim()), src(u.dim());
  do {
    auto dst = out.at(i);
    std::fill(t.begin(), t.end(), 0);
    Index p = 0;
    do {
      for (std::size_t k = 0; k < u.dim(); ++k) src[k] = stride[k] * i[k] + t[k];
      dst.segment(p * c, c) = u.value_or_zero(src);
      ++p;
    } while (detail::next_in_box(t, patch));
  } while (detail::next_in_box(i, out.extent()));
  return out;
}

/// Direct evaluation of the (strided, dilated) convolutional layer
///   y[i] = b + sum_{0 <= t <= r_eff} K_eff[t] u[s*i - t]
/// for i in [0, floor(N/s)], with zero reads outside the support of u,
/// followed by cropping for the configured padding mode.
///
/// This is the reference every realization is checked against; it is the
/// plain nested sum on purpose.
inline Signal convolve(const Kernel& kernel, const Signal& input, const ConvConfig& config) {
  if (kernel.dim() != input.dim()) {
    throw DimensionError("convolve: kernel dimension " + std::to_string(kernel.dim()) +
                         " != signal dimension " + std::to_string(input.dim()));
  }
  if (kernel.c_in() != input.channels()) {
    throw DimensionError("convolve: kernel expects " + std::to_string(kernel.c_in()) +
                         " input channels, signal has " + std::to_string(input.channels()));
  }
  config.validate(kernel.dim());
  const std::size_t d = kernel.dim();
  const Kernel eff = dilate_kernel(kernel, config.dilation);

  std::vector<Index> out_extent(d), r_out(d);
  for (std::size_t k = 0; k < d; ++k) {
    out_extent[k] = input.extent()[k] / config.stride[k];
    r_out[k] = eff.extents()[k] / config.stride[k];
  }
  Signal y(MultiIndex(out_extent), kernel.c_out());
  std::vector<Index> i(d, 0), t(d), src(d);
  do {
    Eigen::VectorXd acc = eff.bias();
    std::fill(t.begin(), t.end(), 0);
    do {
      bool inside = true;
      for (std::size_t k = 0; k < d; ++k) {
        src[k] = config.stride[k] * i[k] - t[k];
        inside = inside && src[k] >= 0 && src[k] <= input.extent()[k];
      }
      if (inside) acc.noalias() += eff.at(t) * input.at(src);
    } while (detail::next_in_box(t, eff.extents()));
    y.at(i) = acc;
  } while (detail::next_in_box(i, y.extent()));
  return crop_for_padding(y, MultiIndex(r_out), config.padding);
}

inline Signal convolve(const Kernel& kernel, const Signal& input) {
  return convolve(kernel, input, ConvConfig::plain(kernel.dim()));
}

}  // namespace roesser
