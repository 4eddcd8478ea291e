#pragma once

#include <vector>

#include "roesser/convolution.hpp"
#include "roesser/realization.hpp"

namespace roesser {

/// Order in which grid points are visited. Any topological order of the
/// dependency DAG gives the same result; both sweeps use the same per-point
/// arithmetic, so their outputs are bit-identical.
enum class Sweep {
  /// Lexicographic, last direction fastest. Keeps one slab of x_k per
  /// direction (O(N^{d-1}) memory).
  RowMajor,
  /// Anti-diagonal hyperplanes sum(i) = const. Stores states on the full grid.
  Wavefront,
};

namespace detail {

inline void check_simulation_inputs(const RoesserRealization& sys, const Signal& input) {
  sys.validate();
  if (input.dim() != sys.dim()) {
    throw DimensionError("simulate: realization is " + std::to_string(sys.dim()) +
                         "-D but the input signal is " + std::to_string(input.dim()) + "-D");
  }
  if (input.channels() != sys.input_dim()) {
    throw DimensionError("simulate: realization expects " + std::to_string(sys.input_dim()) +
                         " input channels, signal has " + std::to_string(input.channels()));
  }
}

/// One step of the recursion at a grid point: returns the successor states
/// (x_k[i + e_k] stacked) and writes y[i].
inline Eigen::VectorXd roesser_step(const RoesserRealization& sys, const Eigen::VectorXd& x,
                                    const Eigen::Ref<const Eigen::VectorXd>& u,
                                    Eigen::Ref<Eigen::VectorXd> y) {
  y = sys.g;
  y.noalias() += sys.C * x;
  y.noalias() += sys.D * u;
  Eigen::VectorXd next = sys.f;
  next.noalias() += sys.A * x;
  next.noalias() += sys.B * u;
  return next;
}

inline Signal simulate_row_major(const RoesserRealization& sys, const Signal& input) {
  const std::size_t d = sys.dim();
  const MultiIndex& extent = input.extent();
  Signal y(extent, sys.output_dim());

  // slab[k]: number of slots in the frontier indexed by (i_{k+1}, ..., i_d).
  std::vector<Index> slab(d, 1);
  for (std::size_t k = d; k-- > 1;) slab[k - 1] = slab[k] * (extent[k] + 1);
  std::vector<Eigen::MatrixXd> frontier(d);
  for (std::size_t k = 0; k < d; ++k) frontier[k] = Eigen::MatrixXd::Zero(sys.state_dim(k), slab[k]);

  Eigen::VectorXd x(sys.total_state_dim());
  std::vector<Index> i(d, 0);
  Index linear = 0;
  do {
    for (std::size_t k = 0; k < d; ++k) {
      auto xk = x.segment(sys.offset(k), sys.state_dim(k));
      if (i[k] == 0) {
        xk.setZero();
      } else {
        xk = frontier[k].col(linear % slab[k]);
      }
    }
    const Eigen::VectorXd next = roesser_step(sys, x, input.at_linear(linear), y.at_linear(linear));
    for (std::size_t k = 0; k < d; ++k) {
      frontier[k].col(linear % slab[k]) = next.segment(sys.offset(k), sys.state_dim(k));
    }
    ++linear;
  } while (next_in_box(i, extent));
  return y;
}

inline Signal simulate_wavefront(const RoesserRealization& sys, const Signal& input) {
  const std::size_t d = sys.dim();
  const MultiIndex& extent = input.extent();
  Signal y(extent, sys.output_dim());
  const std::vector<Index> strides = box_strides(extent);
  const Index points = extent.box_size();
  // successor[:, p] holds the stacked states produced at grid point p.
  Eigen::MatrixXd successor(sys.total_state_dim(), points);

  Index max_level = 0;
  for (Index e : extent) max_level += e;
  std::vector<std::vector<std::vector<Index>>> levels(static_cast<std::size_t>(max_level + 1));
  {
    std::vector<Index> i(d, 0);
    do {
      Index sum = 0;
      for (Index v : i) sum += v;
      levels[static_cast<std::size_t>(sum)].push_back(i);
    } while (next_in_box(i, extent));
  }

  Eigen::VectorXd x(sys.total_state_dim());
  for (const auto& hyperplane : levels) {
    for (const auto& i : hyperplane) {
      const Index linear = input.linear_index(i);
      for (std::size_t k = 0; k < d; ++k) {
        auto xk = x.segment(sys.offset(k), sys.state_dim(k));
        if (i[k] == 0) {
          xk.setZero();
        } else {
          xk = successor.col(linear - strides[k]).segment(sys.offset(k), sys.state_dim(k));
        }
      }
      successor.col(linear) = roesser_step(sys, x, input.at_linear(linear), y.at_linear(linear));
    }
  }
  return y;
}

}  // namespace detail

/// Runs the affine Roesser recursion over the support of `input` with zero
/// initial states: x_k[i] = 0 whenever i_k = 0. The output has the input's
/// extent.
inline Signal simulate(const RoesserRealization& sys, const Signal& input,
                       Sweep sweep = Sweep::RowMajor) {
  detail::check_simulation_inputs(sys, input);
  return sweep == Sweep::RowMajor ? detail::simulate_row_major(sys, input)
                                  : detail::simulate_wavefront(sys, input);
}

/// Impulse response H[t], t in [0, extent], of the linear part (f and g
/// forced to zero), as a kernel-shaped tensor with c_out = output_dim and
/// c_in = input_dim. For builder outputs H equals the (expanded) kernel on
/// [0, r] and vanishes beyond.
inline Kernel impulse_response(const RoesserRealization& sys, const MultiIndex& extent) {
  sys.validate();
  detail::require(extent.size() == sys.dim(), "impulse_response: extent dimension mismatch");
  RoesserRealization linear = sys;
  linear.f.setZero();
  linear.g.setZero();
  Kernel h(extent, sys.input_dim(), sys.output_dim());
  const std::vector<Index> origin(sys.dim(), 0);
  for (Index j = 0; j < sys.input_dim(); ++j) {
    Signal impulse(extent, sys.input_dim());
    impulse.at(origin)(j) = 1.0;
    const Signal response = simulate(linear, impulse);
    std::vector<Index> t(sys.dim(), 0);
    do {
      h.at(t).col(j) = response.at(t);
    } while (detail::next_in_box(t, extent));
  }
  return h;
}

/// Applies a realization as a layer: for stride 1 it simulates `input`
/// directly; otherwise `sys` is read as the inner model of a strided
/// realization and the input is shifted by s - 1, lumped with
/// reshape_strided and the output truncated to extent floor(N/s). The result
/// is then cropped for `padding` with kernel span `r_out` (output units).
inline Signal run_realization(const RoesserRealization& sys, const MultiIndex& stride,
                              const MultiIndex& r_out, Padding padding, const Signal& input) {
  const std::size_t d = input.dim();
  detail::require(stride.size() == d && r_out.size() == d, "run_realization: dimension mismatch");
  if (stride.all_equal(1)) return crop_for_padding(simulate(sys, input), r_out, padding);

  std::vector<Index> shift(d), out_extent(d);
  for (std::size_t k = 0; k < d; ++k) {
    shift[k] = stride[k] - 1;
    out_extent[k] = input.extent()[k] / stride[k];
  }
  const Signal lumped = reshape_strided(pad_leading(input, MultiIndex(shift)), stride);
  const Signal full = simulate(sys, lumped);
  const Signal y = slice(full, MultiIndex::filled(d, 0), MultiIndex(out_extent));
  return crop_for_padding(y, r_out, padding);
}

/// Kernel span in output steps, floor(r_eff / s), used for cropping.
inline MultiIndex output_kernel_span(const Kernel& kernel, const ConvConfig& config) {
  std::vector<Index> r_out(kernel.dim());
  for (std::size_t k = 0; k < kernel.dim(); ++k) {
    r_out[k] = config.dilation[k] * kernel.extents()[k] / config.stride[k];
  }
  return MultiIndex(r_out);
}

/// Realization that run_layer uses for `kernel` under `config`. For strided
/// layers the expanded kernel is zero-extended to at least s - 1 so that the
/// stride never exceeds the kernel size.
inline RoesserRealization layer_realization(const Kernel& kernel, const ConvConfig& config) {
  config.validate(kernel.dim());
  const Kernel eff = dilate_kernel(kernel, config.dilation);
  if (config.stride.all_equal(1)) return build(eff);
  if (kernel.dim() != 2) throw UnsupportedError("strided layers are implemented for d = 2 only");
  std::vector<Index> grown(kernel.dim());
  for (std::size_t k = 0; k < kernel.dim(); ++k) {
    grown[k] = std::max(eff.extents()[k], config.stride[k] - 1);
  }
  return build_strided(zero_extend_kernel(eff, MultiIndex(grown)), config.stride).inner;
}

/// End-to-end layer through its state-space realization:
/// dilate, build, (shift and reshape for stride), simulate, crop. The result
/// equals convolve(kernel, input, config).
inline Signal run_layer(const Kernel& kernel, const ConvConfig& config, const Signal& input) {
  if (kernel.dim() != input.dim()) throw DimensionError("run_layer: kernel and signal dimension differ");
  if (kernel.c_in() != input.channels()) throw DimensionError("run_layer: channel count mismatch");
  return run_realization(layer_realization(kernel, config), config.stride,
                         output_kernel_span(kernel, config), config.padding, input);
}

}  // namespace roesser
