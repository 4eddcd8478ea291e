#include <gtest/gtest.h>

#include "oracles.hpp"
#include "roesser/io.hpp"

namespace roesser {
namespace {

TEST(Json, SignalLayout) {
  const Signal s(MultiIndex{1, 0}, 2, {0.5, 1, 2, -3});
  EXPECT_EQ(io::dump(io::to_json(s)), "{\"dim\":2,\"extents\":[1,0],\"channels\":2,\"data\":[0.5,1.0,2.0,-3.0]}\n");
}

TEST(Json, RealizationBlockKeys) {
  const Kernel k = testing::labelled_kernel(MultiIndex{1, 1}, 1, 1);
  const io::Json j = io::to_json(build_2d(k));
  std::vector<std::string> keys;
  for (const auto& [key, value] : j.items()) keys.push_back(key);
  EXPECT_EQ(keys, (std::vector<std::string>{"dim", "state_dims", "input_dim", "output_dim", "A_11", "A_12", "A_21",
                                            "A_22", "B_1", "B_2", "C_1", "C_2", "D", "f_1", "f_2", "g"}));
  EXPECT_EQ(j["A_12"].dump(), "{\"rows\":1,\"cols\":1,\"data\":[1101.0]}");
}

TEST(Json, RoundTrip) {
  Generator gen(123);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(gen.integer(0, 2));
    std::vector<Index> r(d);
    for (auto& e : r) e = gen.integer(0, 2);
    const Kernel k = random_kernel(MultiIndex(r), gen.integer(1, 3), gen.integer(1, 3), gen);
    EXPECT_EQ(io::kernel_from_json(io::Json::parse(io::dump(io::to_json(k)))), k);
    const RoesserRealization sys = build(k);
    EXPECT_EQ(io::realization_from_json(io::Json::parse(io::dump(io::to_json(sys)))), sys);
    const Signal u = random_signal(MultiIndex(r), 2, gen);
    EXPECT_EQ(io::signal_from_json(io::Json::parse(io::dump(io::to_json(u)))), u);
  }
}

TEST(Json, StridedCarriesStride) {
  const Kernel k = testing::labelled_kernel(MultiIndex{2, 2}, 1, 1);
  const io::Json j = io::to_json(build_strided(k, MultiIndex{2, 2}));
  EXPECT_EQ(io::stride_from_json(j), (MultiIndex{2, 2}));
  EXPECT_EQ(j["patch_order"], "lexicographic");
  EXPECT_EQ(io::stride_from_json(io::to_json(build_2d(k))), (MultiIndex{1, 1}));
}

TEST(Json, MalformedDocuments) {
  EXPECT_THROW(io::kernel_from_json(io::Json::parse(R"({"dim":1})")), ParseError);
  EXPECT_THROW(io::kernel_from_json(io::Json::parse(
                   R"({"dim":1,"extents":[1],"c_in":1,"c_out":1,"data":[1.0],"bias":[0.0]})")),
               ParseError);
  EXPECT_THROW(io::signal_from_json(io::Json::parse(R"({"dim":1,"extents":[-1],"channels":1,"data":[]})")),
               ParseError);
  io::Json j = io::to_json(build_2d(testing::labelled_kernel(MultiIndex{1, 1}, 1, 1)));
  j["A_12"]["rows"] = 2;
  EXPECT_THROW(io::realization_from_json(j), ParseError);
  EXPECT_THROW(io::read_file("/nonexistent/file.json"), ParseError);
}

}  // namespace
}  // namespace roesser
