#include <gtest/gtest.h>

#include "oracles.hpp"

namespace roesser {
namespace {

using testing::max_abs_diff;
using testing::reference_simulate;

RoesserRealization random_system(const std::vector<Index>& dims, Index m, Index p, Generator& gen) {
  RoesserRealization sys(dims, m, p);
  // Contractive A keeps long recursions bounded.
  for (Index i = 0; i < sys.A.size(); ++i) sys.A.data()[i] = 0.3 * gen.uniform();
  for (Index i = 0; i < sys.B.size(); ++i) sys.B.data()[i] = gen.uniform();
  for (Index i = 0; i < sys.C.size(); ++i) sys.C.data()[i] = gen.uniform();
  for (Index i = 0; i < sys.D.size(); ++i) sys.D.data()[i] = gen.uniform();
  for (Index i = 0; i < sys.f.size(); ++i) sys.f(i) = gen.uniform();
  for (Index i = 0; i < sys.g.size(); ++i) sys.g(i) = gen.uniform();
  return sys;
}

TEST(Simulate, ZeroSystemOutputsBias) {
  RoesserRealization sys({2, 3}, 2, 2);
  sys.g << 1.5, -2.0;
  Generator gen(1);
  const Signal y = simulate(sys, random_signal(MultiIndex{3, 4}, 2, gen));
  std::vector<Index> i{0, 0};
  do {
    EXPECT_EQ(y.at(i), sys.g);
  } while (detail::next_in_box(i, y.extent()));
}

TEST(Simulate, MatchesFullGridReference) {
  Generator gen(42);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(gen.integer(0, 2));
    std::vector<Index> dims(d), n(d);
    for (std::size_t k = 0; k < d; ++k) {
      dims[k] = gen.integer(0, 3);
      n[k] = gen.integer(0, 4);
    }
    const RoesserRealization sys = random_system(dims, gen.integer(1, 2), gen.integer(1, 2), gen);
    const Signal u = random_signal(MultiIndex(n), sys.input_dim(), gen);
    const auto expected = reference_simulate(sys, u);
    EXPECT_LE(max_abs_diff(simulate(sys, u, Sweep::RowMajor).data(), expected), 1e-12);
    EXPECT_LE(max_abs_diff(simulate(sys, u, Sweep::Wavefront).data(), expected), 1e-12);
  }
}

TEST(Simulate, SweepsAreBitIdentical) {
  Generator gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    const RoesserRealization sys = random_system({gen.integer(0, 3), gen.integer(0, 3), gen.integer(0, 2)}, 2, 2, gen);
    const Signal u = random_signal(MultiIndex{gen.integer(0, 5), gen.integer(0, 5), gen.integer(0, 5)}, 2, gen);
    EXPECT_EQ(simulate(sys, u, Sweep::RowMajor), simulate(sys, u, Sweep::Wavefront));
  }
}

TEST(Simulate, RejectsMismatchedInput) {
  RoesserRealization sys({1, 1}, 2, 1);
  EXPECT_THROW(simulate(sys, Signal(MultiIndex{2, 2}, 1)), DimensionError);
  EXPECT_THROW(simulate(sys, Signal(MultiIndex{2}, 2)), DimensionError);
}

TEST(ImpulseResponse, RecoversKernelAndVanishesOutside) {
  Generator gen(9);
  const Kernel k = random_kernel(MultiIndex{2, 3}, 2, 3, gen);
  const Kernel h = impulse_response(build(k), MultiIndex{5, 6});
  for (Index t1 = 0; t1 <= 5; ++t1) {
    for (Index t2 = 0; t2 <= 6; ++t2) {
      const std::vector<Index> t{t1, t2};
      EXPECT_LE((h.at(t) - k.value_or_zero(t)).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
  EXPECT_TRUE(h.bias().isZero());
}

TEST(RunLayer, SamePaddingShape) {
  Generator gen(5);
  const Kernel k = random_kernel(MultiIndex{2, 2}, 1, 1, gen);
  const Signal u = random_signal(MultiIndex{5, 5}, 1, gen);
  const ConvConfig cfg{MultiIndex{1, 1}, MultiIndex{1, 1}, Padding::Same};
  const Signal y = run_layer(k, cfg, u);
  // Crop of the support [0, 5] to [1, 5 - 1].
  EXPECT_EQ(y.extent(), (MultiIndex{3, 3}));
  EXPECT_LE(max_abs_diff(y.data(), convolve(k, u, cfg).data()), 1e-13);
}

TEST(RunLayer, ZeroKernelGivesBias) {
  Kernel k(MultiIndex{2, 1}, 2, 2);
  k.set_bias(Eigen::Vector2d(0.25, -1.0));
  Generator gen(3);
  const Signal y = run_layer(k, ConvConfig::plain(2), random_signal(MultiIndex{4, 4}, 2, gen));
  std::vector<Index> i{0, 0};
  do {
    EXPECT_EQ(y.at(i), k.bias());
  } while (detail::next_in_box(i, y.extent()));
}

TEST(RunLayer, RandomEquivalence) {
  Generator gen(2025);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index r1 = gen.integer(0, 3), r2 = gen.integer(0, 3);
    const Kernel k = random_kernel(MultiIndex{r1, r2}, gen.integer(1, 3), gen.integer(1, 3), gen);
    const Signal u = random_signal(MultiIndex{gen.integer(2 * r1, 8), gen.integer(2 * r2, 8)}, k.c_in(), gen);
    ConvConfig cfg = ConvConfig::plain(2);
    cfg.padding = static_cast<Padding>(gen.integer(0, 2));
    const Signal a = run_layer(k, cfg, u);
    const Signal b = convolve(k, u, cfg);
    ASSERT_EQ(a.extent(), b.extent());
    worst = std::max(worst, max_abs_diff(a.data(), b.data()));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(RunLayer, StridedAndDilated) {
  Generator gen(31);
  for (int trial = 0; trial < 60; ++trial) {
    const Kernel k = random_kernel(MultiIndex{gen.integer(0, 4), gen.integer(0, 4)}, gen.integer(1, 2),
                                   gen.integer(1, 2), gen);
    const ConvConfig cfg{MultiIndex{gen.integer(1, 3), gen.integer(1, 3)},
                         MultiIndex{gen.integer(1, 2), gen.integer(1, 2)}, Padding::Full};
    const Signal u = random_signal(MultiIndex{gen.integer(0, 9), gen.integer(0, 9)}, k.c_in(), gen);
    std::vector<Index> hi;
    const auto expected = testing::naive_conv_nd(k, u, cfg.stride.entries(), cfg.dilation.entries(), &hi);
    const Signal y = run_layer(k, cfg, u);
    EXPECT_EQ(y.extent().entries(), hi);
    EXPECT_LE(max_abs_diff(y.data(), expected), 1e-12);
  }
}

TEST(RunLayer, StrideRequiresTwoDimensions) {
  Generator gen(1);
  const Kernel k = random_kernel(MultiIndex{1, 1, 1}, 1, 1, gen);
  const ConvConfig cfg{MultiIndex{2, 2, 2}, MultiIndex{1, 1, 1}, Padding::Full};
  EXPECT_THROW(run_layer(k, cfg, random_signal(MultiIndex{3, 3, 3}, 1, gen)), UnsupportedError);
}

}  // namespace
}  // namespace roesser
