#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "roesser/convolution.hpp"
#include "roesser/tensor.hpp"

namespace roesser {

/// Affine Roesser model
///
///   x_k[i + e_k] = f_k + sum_l A_kl x_l[i] + B_k u[i],   k = 1..d
///   y[i]         = g   + sum_k C_k x_k[i] + D u[i]
///
/// stored as lumped matrices partitioned by `state_dims`. Zero-sized blocks
/// are represented explicitly (e.g. A is 0x0 for a memoryless layer).
class RoesserRealization {
 public:
  RoesserRealization() = default;

  /// All-zero realization with the given block sizes.
  RoesserRealization(std::vector<Index> state_dims, Index input_dim, Index output_dim)
      : state_dims_(std::move(state_dims)), input_dim_(input_dim), output_dim_(output_dim) {
    detail::require(!state_dims_.empty(), "realization needs at least one direction");
    detail::require(input_dim_ >= 1 && output_dim_ >= 1, "input/output dimension must be positive");
    offsets_.assign(state_dims_.size() + 1, 0);
    for (std::size_t k = 0; k < state_dims_.size(); ++k) {
      detail::require(state_dims_[k] >= 0, "state dimensions must be non-negative");
      offsets_[k + 1] = offsets_[k] + state_dims_[k];
    }
    const Index n = offsets_.back();
    A = Eigen::MatrixXd::Zero(n, n);
    B = Eigen::MatrixXd::Zero(n, input_dim_);
    C = Eigen::MatrixXd::Zero(output_dim_, n);
    D = Eigen::MatrixXd::Zero(output_dim_, input_dim_);
    f = Eigen::VectorXd::Zero(n);
    g = Eigen::VectorXd::Zero(output_dim_);
  }

  std::size_t dim() const { return state_dims_.size(); }
  const std::vector<Index>& state_dims() const { return state_dims_; }
  Index state_dim(std::size_t k) const { return state_dims_[k]; }
  Index total_state_dim() const { return offsets_.back(); }
  Index offset(std::size_t k) const { return offsets_[k]; }
  Index input_dim() const { return input_dim_; }
  Index output_dim() const { return output_dim_; }

  // Block views, 0-based direction indices.
  auto A_block(std::size_t k, std::size_t l) {
    return A.block(offsets_[k], offsets_[l], state_dims_[k], state_dims_[l]);
  }
  auto A_block(std::size_t k, std::size_t l) const {
    return A.block(offsets_[k], offsets_[l], state_dims_[k], state_dims_[l]);
  }
  auto B_block(std::size_t k) { return B.middleRows(offsets_[k], state_dims_[k]); }
  auto B_block(std::size_t k) const { return B.middleRows(offsets_[k], state_dims_[k]); }
  auto C_block(std::size_t k) { return C.middleCols(offsets_[k], state_dims_[k]); }
  auto C_block(std::size_t k) const { return C.middleCols(offsets_[k], state_dims_[k]); }
  auto f_block(std::size_t k) { return f.segment(offsets_[k], state_dims_[k]); }
  auto f_block(std::size_t k) const { return f.segment(offsets_[k], state_dims_[k]); }

  /// Throws if the lumped matrices disagree with the block partition.
  void validate() const {
    const Index n = total_state_dim();
    const bool ok = A.rows() == n && A.cols() == n && B.rows() == n &&
                    B.cols() == input_dim_ && C.rows() == output_dim_ && C.cols() == n &&
                    D.rows() == output_dim_ && D.cols() == input_dim_ && f.size() == n &&
                    g.size() == output_dim_;
    if (!ok) throw DimensionError("realization block shapes are inconsistent");
  }

  bool operator==(const RoesserRealization& o) const {
    return state_dims_ == o.state_dims_ && input_dim_ == o.input_dim_ &&
           output_dim_ == o.output_dim_ && A == o.A && B == o.B && C == o.C && D == o.D &&
           f == o.f && g == o.g;
  }

  Eigen::MatrixXd A, B, C, D;
  Eigen::VectorXd f, g;

 private:
  std::vector<Index> state_dims_;
  std::vector<Index> offsets_;
  Index input_dim_ = 0;
  Index output_dim_ = 0;
};

/// Strided layer as reshape_s followed by a Roesser model on the lumped input.
struct StridedRealization {
  RoesserRealization inner;
  MultiIndex stride;
  /// Order of the stride patch inside each lumped input vector.
  static constexpr const char* patch_order = "lexicographic";
};

namespace detail {

inline void set_identity_block(Eigen::MatrixXd& m, Index row, Index col, Index size) {
  m.block(row, col, size, size).setIdentity();
}

}  // namespace detail

/// 1-D FIR filter in state space: n = r * c_in, A the block up-shift,
/// B = [0; ...; 0; I], C = [K[r], ..., K[1]], D = K[0], g = b.
inline RoesserRealization build_1d(const Kernel& kernel) {
  if (kernel.dim() != 1) throw DimensionError("build_1d requires a 1-D kernel");
  const Index r = kernel.extents()[0];
  const Index ci = kernel.c_in();
  RoesserRealization sys({r * ci}, ci, kernel.c_out());
  for (Index j = 0; j + 1 < r; ++j) detail::set_identity_block(sys.A, j * ci, (j + 1) * ci, ci);
  if (r > 0) detail::set_identity_block(sys.B, (r - 1) * ci, 0, ci);
  for (Index j = 0; j < r; ++j) sys.C.middleCols(j * ci, ci) = kernel.at({r - j});
  sys.D = kernel.at({0});
  sys.g = kernel.bias();
  return sys;
}

/// Realization of a 2-D convolutional layer with n1 = c_out r1, n2 = c_in r2.
///
/// [A12 B1; C2 D] is the kernel grid with both indices reversed (K[r1,r2]
/// top-left, K[0,0] in D). x1 carries partial sums for upcoming rows through
/// a down-shift A11 read out by C1 = [0 ... I]; x2 delays the last r2 input
/// columns through an up-shift A22 fed by B2 = [0; ...; I].
inline RoesserRealization build_2d(const Kernel& kernel) {
  if (kernel.dim() != 2) throw DimensionError("build_2d requires a 2-D kernel");
  const Index r1 = kernel.extents()[0];
  const Index r2 = kernel.extents()[1];
  const Index ci = kernel.c_in();
  const Index co = kernel.c_out();
  RoesserRealization sys({co * r1, ci * r2}, ci, co);
  const Index n1 = co * r1;

  for (Index a = 0; a <= r1; ++a) {
    const Index t1 = r1 - a;
    for (Index b = 0; b <= r2; ++b) {
      const Index t2 = r2 - b;
      const auto k = kernel.at({t1, t2});
      if (a < r1 && b < r2) {
        sys.A.block(a * co, n1 + b * ci, co, ci) = k;
      } else if (a < r1) {
        sys.B.block(a * co, 0, co, ci) = k;
      } else if (b < r2) {
        sys.C.block(0, n1 + b * ci, co, ci) = k;
      } else {
        sys.D = k;
      }
    }
  }
  for (Index a = 1; a < r1; ++a) detail::set_identity_block(sys.A, a * co, (a - 1) * co, co);
  if (r1 > 0) detail::set_identity_block(sys.C, 0, (r1 - 1) * co, co);
  for (Index b = 0; b + 1 < r2; ++b) {
    detail::set_identity_block(sys.A, n1 + b * ci, n1 + (b + 1) * ci, ci);
  }
  if (r2 > 0) detail::set_identity_block(sys.B, n1 + (r2 - 1) * ci, 0, ci);
  sys.g = kernel.bias();
  return sys;
}

/// Reversed-order flattening of a d >= 2 kernel into a
/// c_out (r1+1) x c_in prod_{k>=2}(r_k+1) matrix. Block rows run t1 = r1..0;
/// block columns run over (t2, ..., td) in reversed lexicographic order with
/// td varying fastest, i.e. K[., r2, ..., rd] first and K[., 0, ..., 0] last.
inline Eigen::MatrixXd mat(const Kernel& kernel) {
  if (kernel.dim() < 2) throw DimensionError("mat(K) requires a kernel of dimension >= 2");
  const std::size_t d = kernel.dim();
  const Index co = kernel.c_out();
  const Index ci = kernel.c_in();
  const Index r1 = kernel.extents()[0];
  const MultiIndex tail(std::vector<Index>(kernel.extents().begin() + 1, kernel.extents().end()));
  Eigen::MatrixXd out(co * (r1 + 1), ci * tail.box_size());

  std::vector<Index> t(d);
  for (Index a = 0; a <= r1; ++a) {
    t[0] = r1 - a;
    std::vector<Index> m(d - 1, 0);
    Index col = 0;
    do {
      for (std::size_t k = 1; k < d; ++k) t[k] = tail[k - 1] - m[k - 1];
      out.block(a * co, col * ci, co, ci) = kernel.at(t);
      ++col;
    } while (detail::next_in_box(m, tail));
  }
  return out;
}

/// State dimensions of the N-D realization: n1 = c_out r1 and
/// n_k = c_in r_k prod_{j>k}(r_j + 1) for k >= 2.
inline std::vector<Index> nd_state_dims(const MultiIndex& r, Index c_in, Index c_out) {
  std::vector<Index> dims(r.size());
  dims[0] = c_out * r[0];
  Index tail = c_in;
  for (std::size_t k = r.size(); k-- > 1;) {
    dims[k] = r[k] * tail;
    tail *= r[k] + 1;
  }
  return dims;
}

/// N-D realization: [A12 ... A1d B1; C2 ... Cd D] = mat(K); A11, C1 as in 2-D;
/// every row block k >= 2 satisfies [A_kk ... A_kd B_k] = [0 I], so x_k
/// delays the hyperplane data (x_{k+1}, ..., x_d, u) by r_k steps along i_k.
/// A is block upper-triangular.
inline RoesserRealization build_nd(const Kernel& kernel) {
  if (kernel.dim() < 2) throw DimensionError("build_nd requires d >= 2; use build_1d for 1-D kernels");
  const std::size_t d = kernel.dim();
  const Index ci = kernel.c_in();
  const Index co = kernel.c_out();
  RoesserRealization sys(nd_state_dims(kernel.extents(), ci, co), ci, co);
  const Index n = sys.total_state_dim();
  const Index n1 = sys.state_dim(0);
  const Index r1 = kernel.extents()[0];

  const Eigen::MatrixXd m = mat(kernel);
  sys.A.block(0, n1, n1, n - n1) = m.topLeftCorner(n1, n - n1);
  sys.B.topRows(n1) = m.topRightCorner(n1, ci);
  sys.C.rightCols(n - n1) = m.bottomLeftCorner(co, n - n1);
  sys.D = m.bottomRightCorner(co, ci);

  for (Index a = 1; a < r1; ++a) detail::set_identity_block(sys.A, a * co, (a - 1) * co, co);
  if (r1 > 0) detail::set_identity_block(sys.C, 0, (r1 - 1) * co, co);

  for (std::size_t k = 1; k < d; ++k) {
    const Index row0 = sys.offset(k);
    const Index nk = sys.state_dim(k);
    const Index mk = (n - row0 - nk) + ci;  // width of (x_{k+1}, ..., x_d, u)
    for (Index j = 0; j < nk; ++j) {
      const Index col = row0 + mk + j;
      if (col < n) {
        sys.A(row0 + j, col) = 1.0;
      } else {
        sys.B(row0 + j, col - n) = 1.0;
      }
    }
  }
  sys.g = kernel.bias();
  return sys;
}

/// build_1d or build_nd depending on the kernel dimension.
inline RoesserRealization build(const Kernel& kernel) {
  return kernel.dim() == 1 ? build_1d(kernel) : build_nd(kernel);
}

/// Realization of a dilated layer via the expanded kernel.
inline RoesserRealization build_dilated(const Kernel& kernel, const MultiIndex& dilation) {
  return build(dilate_kernel(kernel, dilation));
}

/// State dimensions of the strided 2-D realization:
/// n1 = c_out floor(r1/s1), n2 = c_in (r2 - s2 + 1) s1.
inline std::vector<Index> strided_state_dims(const MultiIndex& r, const MultiIndex& s, Index c_in,
                                             Index c_out) {
  return {c_out * (r[0] / s[0]), c_in * (r[1] - s[1] + 1) * s[0]};
}

/// Strided 2-D layer: the kernel grid is split at row s1 / column s2 and each
/// group of s1 kernel rows is flattened into the channel dimension in the
/// reshape_strided patch order. The inner model reads the lumped patch
/// u~[i] = vec(u[s*i + p]) and produces b + sum_t K[t] u[s*i + s - 1 - t],
/// i.e. the kernel is anchored at the last pixel of each patch. Rows with
/// t1 > r1 (when s1 does not divide r1 + 1) are zero in the farthest block.
inline StridedRealization build_strided(const Kernel& kernel, const MultiIndex& stride) {
  if (kernel.dim() != 2) throw UnsupportedError("strided realizations are implemented for d = 2 only");
  detail::require(stride.size() == 2, "stride length must equal kernel dimension");
  const Index r1 = kernel.extents()[0];
  const Index r2 = kernel.extents()[1];
  const Index s1 = stride[0];
  const Index s2 = stride[1];
  detail::require(s1 >= 1 && s2 >= 1, "stride entries must be >= 1");
  if (s1 > r1 + 1 || s2 > r2 + 1) {
    throw DimensionError("stride exceeds kernel size: the kernel would skip input pixels");
  }
  const Index ci = kernel.c_in();
  const Index co = kernel.c_out();
  const Index rows1 = r1 / s1;         // x1 blocks (row groups q1 = rows1..1)
  const Index cols2 = r2 - s2 + 1;     // delayed columns t2 = r2..s2
  RoesserRealization sys(strided_state_dims(kernel.extents(), stride, ci, co), ci * s1 * s2, co);
  const Index n1 = sys.state_dim(0);

  auto patch = [&](Index p1, Index p2) { return (p1 * s2 + p2) * ci; };
  auto delayed = [&](Index p1, Index t2) { return n1 + (p1 * cols2 + (r2 - t2)) * ci; };
  auto tap = [&](Index t1, Index t2) -> RowMajorMatrix {
    const std::vector<Index> t{t1, t2};
    return kernel.value_or_zero(t);
  };

  for (Index q1 = 0; q1 <= rows1; ++q1) {
    for (Index p1 = 0; p1 < s1; ++p1) {
      const Index t1 = s1 * q1 + s1 - 1 - p1;
      for (Index t2 = s2; t2 <= r2; ++t2) {
        if (q1 == 0) {
          sys.C.block(0, delayed(p1, t2), co, ci) = tap(t1, t2);
        } else {
          sys.A.block((rows1 - q1) * co, delayed(p1, t2), co, ci) = tap(t1, t2);
        }
      }
      for (Index p2 = 0; p2 < s2; ++p2) {
        const Index t2 = s2 - 1 - p2;
        if (q1 == 0) {
          sys.D.block(0, patch(p1, p2), co, ci) = tap(t1, t2);
        } else {
          sys.B.block((rows1 - q1) * co, patch(p1, p2), co, ci) = tap(t1, t2);
        }
      }
    }
  }
  for (Index a = 1; a < rows1; ++a) detail::set_identity_block(sys.A, a * co, (a - 1) * co, co);
  if (rows1 > 0) detail::set_identity_block(sys.C, 0, (rows1 - 1) * co, co);

  // Delayed column t2 at the next step is either column t2 - s2 now, or comes
  // straight from the current patch.
  for (Index p1 = 0; p1 < s1; ++p1) {
    for (Index t2 = s2; t2 <= r2; ++t2) {
      if (t2 >= 2 * s2) {
        detail::set_identity_block(sys.A, delayed(p1, t2), delayed(p1, t2 - s2), ci);
      } else {
        detail::set_identity_block(sys.B, delayed(p1, t2), patch(p1, 2 * s2 - 1 - t2), ci);
      }
    }
  }
  sys.g = kernel.bias();
  return {std::move(sys), stride};
}

/// Impulse map of the inner strided model: a kernel with extents floor(r/s),
/// c_in * |[0, s[| input channels and block p of tap q equal to
/// K[s*q + s - 1 - p] (zero past r). Bias is carried over.
inline Kernel strided_impulse_map(const Kernel& kernel, const MultiIndex& stride) {
  detail::require(stride.size() == kernel.dim(), "stride length must equal kernel dimension");
  const std::size_t d = kernel.dim();
  std::vector<Index> q_extent(d), p_extent(d);
  for (std::size_t k = 0; k < d; ++k) {
    detail::require(stride[k] >= 1, "stride entries must be >= 1");
    q_extent[k] = kernel.extents()[k] / stride[k];
    p_extent[k] = stride[k] - 1;
  }
  const MultiIndex patch(p_extent);
  const Index ci = kernel.c_in();
  Kernel out(MultiIndex(q_extent), ci * patch.box_size(), kernel.c_out());
  out.set_bias(kernel.bias());
  std::vector<Index> q(d, 0), p(d), t(d);
  do {
    auto block = out.at(q);
    std::fill(p.begin(), p.end(), 0);
    Index col = 0;
    do {
      for (std::size_t k = 0; k < d; ++k) t[k] = stride[k] * q[k] + stride[k] - 1 - p[k];
      block.middleCols(col * ci, ci) = kernel.value_or_zero(t);
      ++col;
    } while (detail::next_in_box(p, patch));
  } while (detail::next_in_box(q, out.extents()));
  return out;
}

}  // namespace roesser
