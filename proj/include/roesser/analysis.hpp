#pragma once

#include <algorithm>
#include <cfloat>
#include <optional>
#include <string>
#include <vector>

#include "roesser/random.hpp"
#include "roesser/realization.hpp"
#include "roesser/simulator.hpp"

namespace roesser {

/// Singular-value rank with the usual tolerance max(rows, cols) * sigma_max * eps.
struct RankInfo {
  Index rank = 0;
  double sigma_max = 0.0;
  double sigma_min = 0.0;  // smallest of the min(rows, cols) singular values
  double tolerance = 0.0;
};

inline RankInfo numerical_rank(const Eigen::MatrixXd& m) {
  RankInfo info;
  if (m.rows() == 0 || m.cols() == 0) return info;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  info.sigma_max = sv(0);
  info.sigma_min = sv(sv.size() - 1);
  info.tolerance = static_cast<double>(std::max(m.rows(), m.cols())) * info.sigma_max * DBL_EPSILON;
  for (Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > info.tolerance) ++info.rank;
  }
  return info;
}

inline bool full_column_rank(const Eigen::MatrixXd& m) {
  return m.cols() > 0 && numerical_rank(m).rank == m.cols();
}

/// [B, AB, ..., A^{steps-1} B].
inline Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                              Index steps) {
  Eigen::MatrixXd out(A.rows(), B.cols() * steps);
  if (steps > 0) out.leftCols(B.cols()) = B;
  for (Index j = 1; j < steps; ++j) {
    out.middleCols(j * B.cols(), B.cols()) = A * out.middleCols((j - 1) * B.cols(), B.cols());
  }
  return out;
}

/// [C; CA; ...; CA^{steps-1}].
inline Eigen::MatrixXd observability_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                                            Index steps) {
  return controllability_matrix(A.transpose(), C.transpose(), steps).transpose();
}

/// Executable form of the minimality argument for 2-D realizations.
///
/// With r = r1 + r2 and lumped A, B, C, the product
/// [C; CA; ...; CA^{r-1}] [A^{r-1}B ... AB B] is block upper-triangular with
/// K[r1,r2] on its diagonal, since CA^kB sums the kernel taps of total degree
/// k + 1. When c_in = c_out and K[r1,r2] has full column rank its rank is
/// c_in r, which bounds the state dimension of every realization from below.
struct RankCertificate {
  bool applicable = false;
  std::string note;
  Index horizon = 0;  // r = r1 + r2
  Index rank = 0;
  Index required = 0;
  bool holds = false;  // rank >= required
  double leading_sigma_min = 0.0;
  /// max |CA^{r-1}B - K[r1,r2]|
  double leading_error = 0.0;
  /// max |CA^k B| over r <= k <= r + 2
  double tail_norm = 0.0;
  bool coefficients_match = false;
};

inline constexpr double kCoefficientTolerance = 1e-12;

inline RankCertificate minimality_certificate(const RoesserRealization& sys, const Kernel& kernel) {
  if (sys.dim() != 2 || kernel.dim() != 2) {
    throw UnsupportedError("minimality certificate is defined for 2-D realizations only");
  }
  sys.validate();
  detail::require(sys.input_dim() == kernel.c_in() && sys.output_dim() == kernel.c_out(),
                  "certificate: realization and kernel channel counts differ");
  RankCertificate cert;
  const Index r1 = kernel.extents()[0];
  const Index r2 = kernel.extents()[1];
  const Index r = r1 + r2;
  cert.horizon = r;
  const Eigen::MatrixXd leading = kernel.at({r1, r2});
  const RankInfo leading_rank = numerical_rank(leading);
  cert.leading_sigma_min = leading_rank.sigma_min;

  const Eigen::MatrixXd obs = observability_matrix(sys.A, sys.C, r);
  Eigen::MatrixXd ctrb(sys.total_state_dim(), sys.input_dim() * r);
  {
    // [A^{r-1}B, ..., AB, B]: reversed column blocks of the controllability matrix.
    const Eigen::MatrixXd forward = controllability_matrix(sys.A, sys.B, r);
    const Index m = sys.input_dim();
    for (Index j = 0; j < r; ++j) ctrb.middleCols(j * m, m) = forward.middleCols((r - 1 - j) * m, m);
  }
  cert.rank = numerical_rank(obs * ctrb).rank;
  cert.required = kernel.c_in() * r;
  cert.holds = cert.rank >= cert.required;

  const bool square = kernel.c_in() == kernel.c_out();
  const bool leading_full = r == 0 || leading_rank.rank == leading.cols();
  cert.applicable = square && leading_full;
  if (!square) {
    cert.note = "not applicable: c_in != c_out";
  } else if (!leading_full) {
    cert.note = "not applicable: K[r1,r2] lacks full column rank";
  } else {
    cert.note = "K[r1,r2] square with full column rank";
  }

  Eigen::MatrixXd power_b = sys.B;  // A^k B
  const double scale = std::max(1.0, leading.cwiseAbs().maxCoeff());
  for (Index k = 0; k <= r + 2; ++k) {
    if (k == r - 1) {
      cert.leading_error = (sys.C * power_b - leading).cwiseAbs().maxCoeff();
    }
    if (k >= r && power_b.size() > 0 && sys.C.size() > 0) {
      cert.tail_norm = std::max(cert.tail_norm, (sys.C * power_b).cwiseAbs().maxCoeff());
    }
    power_b = sys.A * power_b;
  }
  cert.coefficients_match = cert.leading_error <= kCoefficientTolerance * scale &&
                            cert.tail_norm <= kCoefficientTolerance * scale;
  return cert;
}

struct Observability1d {
  bool controllable = false;
  bool observable = false;
  Index controllability_rank = 0;
  Index observability_rank = 0;
  Index state_dim = 0;
  /// Numerical full column rank of K[r], the expected observability criterion.
  bool leading_full_column_rank = false;
};

inline Observability1d observability_1d(const RoesserRealization& sys, const Kernel& kernel) {
  if (sys.dim() != 1 || kernel.dim() != 1) {
    throw UnsupportedError("observability_1d requires a 1-D realization");
  }
  sys.validate();
  Observability1d out;
  const Index n = sys.total_state_dim();
  out.state_dim = n;
  out.controllability_rank = numerical_rank(controllability_matrix(sys.A, sys.B, n)).rank;
  out.observability_rank = numerical_rank(observability_matrix(sys.A, sys.C, n)).rank;
  out.controllable = out.controllability_rank == n;
  out.observable = out.observability_rank == n;
  out.leading_full_column_rank = full_column_rank(kernel.at({kernel.extents()[0]}));
  return out;
}

/// State dimensions the builders are expected to produce for `kernel` under
/// `config` (dilation expands r first).
inline std::vector<Index> expected_state_dims(const Kernel& kernel, const ConvConfig& config) {
  config.validate(kernel.dim());
  std::vector<Index> r(kernel.dim());
  for (std::size_t k = 0; k < kernel.dim(); ++k) r[k] = config.dilation[k] * kernel.extents()[k];
  if (config.stride.all_equal(1)) {
    if (kernel.dim() == 1) return {kernel.c_in() * r[0]};
    return nd_state_dims(MultiIndex(r), kernel.c_in(), kernel.c_out());
  }
  if (kernel.dim() != 2) throw UnsupportedError("strided layers are implemented for d = 2 only");
  for (std::size_t k = 0; k < 2; ++k) r[k] = std::max(r[k], config.stride[k] - 1);
  return strided_state_dims(MultiIndex(r), config.stride, kernel.c_in(), kernel.c_out());
}

struct DimReport {
  std::vector<Index> state_dims;
  Index total = 0;
  std::optional<std::vector<Index>> expected;
  bool matches = true;
};

inline DimReport dim_report(const RoesserRealization& sys) {
  return {sys.state_dims(), sys.total_state_dim(), std::nullopt, true};
}

inline DimReport dim_report(const RoesserRealization& sys, const Kernel& kernel,
                            const ConvConfig& config) {
  DimReport rep = dim_report(sys);
  rep.expected = expected_state_dims(kernel, config);
  rep.matches = *rep.expected == rep.state_dims;
  return rep;
}

struct VerificationReport {
  double max_abs_residual = 0.0;
  bool kernel_recovered = false;
  double impulse_error = 0.0;
  DimReport dims;
  /// Lower bound on the state dimension of any realization (rank certificate
  /// for d = 2, Hankel rank for d = 1); unknown for d >= 3 and strided layers.
  std::optional<Index> dim_lower_bound;
  std::optional<RankCertificate> rank_certificate;
  std::optional<Observability1d> observability;
  Index controllability_rank = 0;
  Index observability_rank = 0;
  Index trials = 0;

  /// Exit criterion of the `verify` command.
  bool passed(double residual_tolerance = 1e-9) const {
    if (!(max_abs_residual <= residual_tolerance) || !kernel_recovered || !dims.matches) return false;
    if (rank_certificate && rank_certificate->applicable &&
        !(rank_certificate->holds && rank_certificate->coefficients_match)) {
      return false;
    }
    if (observability && !observability->controllable) return false;
    return true;
  }
};

/// Checks `sys` as a realization of `kernel` under `config`: random-input
/// comparisons against convolve(), impulse-response recovery of the
/// (expanded, or for strides lumped) kernel, dimension accounting and the
/// applicable rank certificates. Inputs are drawn from Generator(seed).
inline VerificationReport verify_realization(const RoesserRealization& sys, const Kernel& kernel,
                                             const ConvConfig& config, Index trials,
                                             const MultiIndex& extent, std::uint64_t seed) {
  detail::require(trials >= 1, "verify: trials must be >= 1");
  detail::require(extent.size() == kernel.dim(), "verify: extent dimension mismatch");
  config.validate(kernel.dim());
  sys.validate();
  VerificationReport rep;
  rep.trials = trials;

  Generator gen(seed);
  const MultiIndex r_out = output_kernel_span(kernel, config);
  for (Index n = 0; n < trials; ++n) {
    const Signal u = random_signal(extent, kernel.c_in(), gen);
    const Signal via_state_space = run_realization(sys, config.stride, r_out, config.padding, u);
    const Signal direct = convolve(kernel, u, config);
    detail::require(via_state_space.extent() == direct.extent(), "verify: output extents differ");
    for (std::size_t k = 0; k < direct.data().size(); ++k) {
      rep.max_abs_residual =
          std::max(rep.max_abs_residual, std::abs(via_state_space.data()[k] - direct.data()[k]));
    }
  }

  Kernel target = dilate_kernel(kernel, config.dilation);
  if (!config.stride.all_equal(1)) {
    std::vector<Index> grown(kernel.dim());
    for (std::size_t k = 0; k < kernel.dim(); ++k) {
      grown[k] = std::max(target.extents()[k], config.stride[k] - 1);
    }
    target = strided_impulse_map(zero_extend_kernel(target, MultiIndex(grown)), config.stride);
  }
  std::vector<Index> probe(kernel.dim());
  for (std::size_t k = 0; k < kernel.dim(); ++k) probe[k] = target.extents()[k] + 1;
  if (sys.input_dim() == target.c_in() && sys.output_dim() == target.c_out() &&
      sys.dim() == target.dim()) {
    const Kernel h = impulse_response(sys, MultiIndex(probe));
    const Kernel expected = zero_extend_kernel(target, MultiIndex(probe));
    for (std::size_t k = 0; k < h.coeffs().size(); ++k) {
      rep.impulse_error = std::max(rep.impulse_error, std::abs(h.coeffs()[k] - expected.coeffs()[k]));
    }
    double scale = 1.0;
    for (double c : kernel.coeffs()) scale = std::max(scale, std::abs(c));
    rep.kernel_recovered = rep.impulse_error <= kCoefficientTolerance * scale;
  }

  rep.dims = dim_report(sys, kernel, config);
  const Index n = sys.total_state_dim();
  rep.controllability_rank = numerical_rank(controllability_matrix(sys.A, sys.B, n)).rank;
  rep.observability_rank = numerical_rank(observability_matrix(sys.A, sys.C, n)).rank;

  if (config.stride.all_equal(1)) {
    const Kernel eff = dilate_kernel(kernel, config.dilation);
    if (kernel.dim() == 2) {
      rep.rank_certificate = minimality_certificate(sys, eff);
      rep.dim_lower_bound = rep.rank_certificate->rank;
    } else if (kernel.dim() == 1) {
      rep.observability = observability_1d(sys, eff);
      rep.dim_lower_bound =
          numerical_rank(observability_matrix(sys.A, sys.C, n) * controllability_matrix(sys.A, sys.B, n)).rank;
    }
  }
  return rep;
}

/// verify_realization on the realization run_layer builds for this layer.
inline VerificationReport verify_equivalence(const Kernel& kernel, const ConvConfig& config,
                                             Index trials, const MultiIndex& extent,
                                             std::uint64_t seed) {
  return verify_realization(layer_realization(kernel, config), kernel, config, trials, extent, seed);
}

}  // namespace roesser
