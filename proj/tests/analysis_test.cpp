#include <gtest/gtest.h>

#include "oracles.hpp"

namespace roesser {
namespace {

Kernel with_invertible_corner(Kernel k) {
  const std::vector<Index> r = k.extents().entries();
  auto corner = k.at(r);
  corner += 4.0 * RowMajorMatrix::Identity(corner.rows(), corner.cols());
  return k;
}

TEST(NumericalRank, Basics) {
  EXPECT_EQ(numerical_rank(Eigen::MatrixXd::Identity(3, 3)).rank, 3);
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 2, 4;
  EXPECT_EQ(numerical_rank(m).rank, 1);
  EXPECT_EQ(numerical_rank(Eigen::MatrixXd::Zero(0, 3)).rank, 0);
  EXPECT_TRUE(full_column_rank(Eigen::MatrixXd::Identity(3, 2)));
  EXPECT_FALSE(full_column_rank(Eigen::MatrixXd::Identity(2, 3)));
}

TEST(Certificate, TwoChannelThreeByThree) {
  Generator gen(4);
  const Kernel k = with_invertible_corner(random_kernel(MultiIndex{2, 2}, 2, 2, gen));
  const RoesserRealization sys = build_2d(k);
  const RankCertificate cert = minimality_certificate(sys, k);
  EXPECT_TRUE(cert.applicable);
  EXPECT_EQ(cert.horizon, 4);
  EXPECT_EQ(cert.rank, 8);
  EXPECT_EQ(cert.required, 8);
  EXPECT_EQ(sys.total_state_dim(), 8);
  EXPECT_TRUE(cert.holds);
  EXPECT_TRUE(cert.coefficients_match);
  EXPECT_LE(cert.leading_error, 1e-12);
  EXPECT_LE(cert.tail_norm, 1e-12);
}

TEST(Certificate, NotApplicableWhenCornerVanishes) {
  Generator gen(5);
  Kernel k = random_kernel(MultiIndex{2, 1}, 2, 2, gen);
  k.at({2, 1}).setZero();
  const RankCertificate cert = minimality_certificate(build_2d(k), k);
  EXPECT_FALSE(cert.applicable);
  EXPECT_TRUE(cert.coefficients_match);
}

TEST(Certificate, NotApplicableForRectangularChannels) {
  Generator gen(6);
  const Kernel k = random_kernel(MultiIndex{1, 1}, 2, 3, gen);
  EXPECT_FALSE(minimality_certificate(build_2d(k), k).applicable);
}

TEST(Certificate, DetectsWrongSystem) {
  Generator gen(8);
  const Kernel k = with_invertible_corner(random_kernel(MultiIndex{2, 2}, 1, 1, gen));
  RoesserRealization sys = build_2d(k);
  // Feedback inside the x2 delay line makes the impulse response infinite.
  sys.A(sys.total_state_dim() - 1, sys.offset(1)) += 0.5;
  EXPECT_FALSE(minimality_certificate(sys, k).coefficients_match);
}

TEST(Certificate, ScaleInvariant) {
  Generator gen(10);
  const Kernel k = with_invertible_corner(random_kernel(MultiIndex{1, 2}, 2, 2, gen));
  const RankCertificate base = minimality_certificate(build_2d(k), k);
  for (double scale : {1e-3, 7.0, 1e3}) {
    std::vector<double> c = k.coeffs();
    for (double& v : c) v *= scale;
    const Kernel ks(k.extents(), 2, 2, c, std::vector<double>(2, 0.0));
    const RankCertificate cert = minimality_certificate(build_2d(ks), ks);
    EXPECT_EQ(cert.rank, base.rank) << scale;
    EXPECT_TRUE(cert.coefficients_match) << scale;
  }
}

TEST(Certificate, RejectsOtherDimensions) {
  Generator gen(1);
  const Kernel k = random_kernel(MultiIndex{1, 1, 1}, 1, 1, gen);
  EXPECT_THROW(minimality_certificate(build_nd(k), k), UnsupportedError);
}

TEST(Observability1d, FullRankLeadingTap) {
  Generator gen(2);
  const Kernel k = with_invertible_corner(random_kernel(MultiIndex{3}, 2, 2, gen));
  const Observability1d o = observability_1d(build_1d(k), k);
  EXPECT_TRUE(o.controllable);
  EXPECT_TRUE(o.observable);
  EXPECT_TRUE(o.leading_full_column_rank);
  EXPECT_EQ(o.state_dim, 6);
}

TEST(Observability1d, VanishingLeadingTap) {
  Generator gen(3);
  Kernel k = random_kernel(MultiIndex{2}, 1, 1, gen);
  k.at({2}).setZero();
  const Observability1d o = observability_1d(build_1d(k), k);
  EXPECT_TRUE(o.controllable);
  EXPECT_FALSE(o.observable);
  EXPECT_FALSE(o.leading_full_column_rank);
}

TEST(Observability1d, MoreInputsThanOutputs) {
  Generator gen(4);
  const Kernel k = random_kernel(MultiIndex{1}, 2, 1, gen);
  const Observability1d o = observability_1d(build_1d(k), k);
  EXPECT_TRUE(o.controllable);
  EXPECT_FALSE(o.observable);
}

TEST(DimReport, Plain) {
  const Kernel k = testing::labelled_kernel(MultiIndex{2, 2}, 1, 1);
  const DimReport rep = dim_report(build_2d(k), k, ConvConfig::plain(2));
  EXPECT_EQ(rep.state_dims, (std::vector<Index>{2, 2}));
  EXPECT_EQ(rep.total, 4);
  EXPECT_TRUE(rep.matches);

  const Kernel k3 = testing::labelled_kernel(MultiIndex{1, 1, 1}, 1, 1);
  EXPECT_EQ(dim_report(build_nd(k3)).state_dims, (std::vector<Index>{1, 2, 1}));

  const Kernel k0 = testing::labelled_kernel(MultiIndex{0, 0}, 2, 3);
  EXPECT_EQ(dim_report(build_2d(k0)).total, 0);
}

TEST(DimReport, DetectsMismatch) {
  const Kernel k = testing::labelled_kernel(MultiIndex{2, 2}, 1, 1);
  const RoesserRealization other = build_2d(testing::labelled_kernel(MultiIndex{1, 2}, 1, 1));
  EXPECT_FALSE(dim_report(other, k, ConvConfig::plain(2)).matches);
}

TEST(Verify, LowerBoundForSingleChannel) {
  Generator gen(15);
  const Kernel k = with_invertible_corner(random_kernel(MultiIndex{2, 2}, 1, 1, gen));
  const VerificationReport rep = verify_equivalence(k, ConvConfig::plain(2), 3, MultiIndex{6, 6}, 1);
  ASSERT_TRUE(rep.dim_lower_bound.has_value());
  EXPECT_EQ(*rep.dim_lower_bound, 4);
  EXPECT_TRUE(rep.passed());
}

TEST(Verify, ZeroKernel) {
  Kernel k(MultiIndex{1, 2}, 2, 2);
  const VerificationReport rep = verify_equivalence(k, ConvConfig::plain(2), 2, MultiIndex{5, 5}, 3);
  EXPECT_EQ(rep.max_abs_residual, 0.0);
  EXPECT_TRUE(rep.kernel_recovered);
  EXPECT_TRUE(rep.passed());
}

TEST(Verify, StridedFiveByFive) {
  Generator gen(21);
  const Kernel k = random_kernel(MultiIndex{4, 4}, 2, 2, gen);
  const ConvConfig cfg{MultiIndex{2, 2}, MultiIndex{1, 1}, Padding::Full};
  const VerificationReport rep = verify_equivalence(k, cfg, 3, MultiIndex{11, 9}, 4);
  EXPECT_LE(rep.max_abs_residual, 1e-12);
  EXPECT_TRUE(rep.kernel_recovered);
  EXPECT_EQ(rep.dims.state_dims, (std::vector<Index>{4, 12}));
  EXPECT_TRUE(rep.passed());
}

TEST(Verify, CorruptedRealizationFails) {
  Generator gen(22);
  const Kernel k = random_kernel(MultiIndex{2, 1}, 1, 2, gen);
  RoesserRealization sys = build_2d(k);
  sys.C(1, 0) += 1.0;
  const VerificationReport rep =
      verify_realization(sys, k, ConvConfig::plain(2), 2, MultiIndex{5, 5}, 0);
  EXPECT_GT(rep.max_abs_residual, 1e-3);
  EXPECT_FALSE(rep.kernel_recovered);
  EXPECT_FALSE(rep.passed());
}

}  // namespace
}  // namespace roesser
