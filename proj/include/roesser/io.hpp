#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "roesser/analysis.hpp"
#include "roesser/realization.hpp"
#include "roesser/tensor.hpp"

// JSON interchange. Every document is a single object written compactly
// (no whitespace) with keys in the order listed below, followed by '\n'.
// Reals use the shortest decimal form that round-trips to the same double.
//
//   signal:      {"dim","extents","channels","data"}
//   kernel:      {"dim","extents","c_in","c_out","data","bias"}
//   realization: {"dim","state_dims","input_dim","output_dim",
//                 "A_kl"..., "B_k"..., "C_k"..., "D", "f_k"..., "g"
//                 [, "stride", "patch_order"]}
//
// `extents` hold largest indices (support [0, N]). `data` is row-major with
// the channel index innermost (kernels: taps, then c_out, then c_in). Matrix
// blocks are {"rows","cols","data"} with row-major data; vectors are plain
// lists. Block keys use 1-based direction numbers, e.g. "A_12", "B_2".

namespace roesser::io {

using Json = nlohmann::ordered_json;

namespace detail {

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <typename T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

inline Json matrix_to_json(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  Json out;
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  out["data"] = std::move(data);
  return out;
}

inline Eigen::MatrixXd matrix_from_json(const Json& j, Index rows, Index cols, const std::string& key) {
  const auto r = get<Index>(j, "rows");
  const auto c = get<Index>(j, "cols");
  const auto data = get<std::vector<double>>(j, "data");
  if (r != rows || c != cols || static_cast<Index>(data.size()) != rows * cols) {
    throw ParseError("block '" + key + "' has shape " + std::to_string(r) + "x" + std::to_string(c) +
                     ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  Eigen::MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index k = 0; k < cols; ++k) m(i, k) = data[static_cast<std::size_t>(i * cols + k)];
  }
  return m;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

inline Eigen::VectorXd vector_from_json(const Json& j, const char* key, Index size) {
  const auto v = get<std::vector<double>>(j, key);
  if (static_cast<Index>(v.size()) != size) {
    throw ParseError(std::string("vector '") + key + "' has length " + std::to_string(v.size()) +
                     ", expected " + std::to_string(size));
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), size);
}

inline std::vector<Index> index_list(const Json& j, const char* key, std::size_t dim) {
  const auto v = get<std::vector<Index>>(j, key);
  if (v.size() != dim) throw ParseError(std::string("'") + key + "' must have one entry per dimension");
  for (Index e : v) {
    if (e < 0) throw ParseError(std::string("'") + key + "' entries must be non-negative");
  }
  return v;
}

inline std::string block_key(char name, std::size_t k) { return std::string(1, name) + "_" + std::to_string(k + 1); }
inline std::string block_key(char name, std::size_t k, std::size_t l) {
  return std::string(1, name) + "_" + std::to_string(k + 1) + std::to_string(l + 1);
}

// Library dimension errors inside a document become parse errors.
template <typename F>
auto guarded(F&& make) {
  try {
    return make();
  } catch (const DimensionError& e) {
    throw ParseError(e.what());
  }
}

}  // namespace detail

inline Json to_json(const Signal& s) {
  Json j;
  j["dim"] = s.dim();
  j["extents"] = s.extent().entries();
  j["channels"] = s.channels();
  j["data"] = s.data();
  return j;
}

inline Json to_json(const Kernel& k) {
  Json j;
  j["dim"] = k.dim();
  j["extents"] = k.extents().entries();
  j["c_in"] = k.c_in();
  j["c_out"] = k.c_out();
  j["data"] = k.coeffs();
  j["bias"] = detail::to_std(k.bias());
  return j;
}

inline Json to_json(const RoesserRealization& sys) {
  const std::size_t d = sys.dim();
  Json j;
  j["dim"] = d;
  j["state_dims"] = sys.state_dims();
  j["input_dim"] = sys.input_dim();
  j["output_dim"] = sys.output_dim();
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t l = 0; l < d; ++l) j[detail::block_key('A', k, l)] = detail::matrix_to_json(sys.A_block(k, l));
  }
  for (std::size_t k = 0; k < d; ++k) j[detail::block_key('B', k)] = detail::matrix_to_json(sys.B_block(k));
  for (std::size_t k = 0; k < d; ++k) j[detail::block_key('C', k)] = detail::matrix_to_json(sys.C_block(k));
  j["D"] = detail::matrix_to_json(sys.D);
  for (std::size_t k = 0; k < d; ++k) j[detail::block_key('f', k)] = detail::to_std(sys.f_block(k));
  j["g"] = detail::to_std(sys.g);
  return j;
}

inline Json to_json(const StridedRealization& s) {
  Json j = to_json(s.inner);
  j["stride"] = s.stride.entries();
  j["patch_order"] = StridedRealization::patch_order;
  return j;
}

inline Signal signal_from_json(const Json& j) {
  const auto dim = detail::get<std::size_t>(j, "dim");
  if (dim < 1) throw ParseError("signal dimension must be >= 1");
  const auto extents = detail::index_list(j, "extents", dim);
  const auto channels = detail::get<Index>(j, "channels");
  auto data = detail::get<std::vector<double>>(j, "data");
  return detail::guarded([&] { return Signal(MultiIndex(extents), channels, std::move(data)); });
}

inline Kernel kernel_from_json(const Json& j) {
  const auto dim = detail::get<std::size_t>(j, "dim");
  if (dim < 1) throw ParseError("kernel dimension must be >= 1");
  const auto extents = detail::index_list(j, "extents", dim);
  const auto c_in = detail::get<Index>(j, "c_in");
  const auto c_out = detail::get<Index>(j, "c_out");
  auto data = detail::get<std::vector<double>>(j, "data");
  auto bias = detail::get<std::vector<double>>(j, "bias");
  return detail::guarded([&] { return Kernel(MultiIndex(extents), c_in, c_out, std::move(data), std::move(bias)); });
}

inline RoesserRealization realization_from_json(const Json& j) {
  const auto d = detail::get<std::size_t>(j, "dim");
  if (d < 1) throw ParseError("realization dimension must be >= 1");
  const auto dims = detail::index_list(j, "state_dims", d);
  const auto nu = detail::get<Index>(j, "input_dim");
  const auto ny = detail::get<Index>(j, "output_dim");
  RoesserRealization sys = detail::guarded([&] { return RoesserRealization(dims, nu, ny); });
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t l = 0; l < d; ++l) {
      const std::string key = detail::block_key('A', k, l);
      sys.A_block(k, l) = detail::matrix_from_json(detail::field(j, key.c_str()), dims[k], dims[l], key);
    }
    const std::string bk = detail::block_key('B', k);
    sys.B_block(k) = detail::matrix_from_json(detail::field(j, bk.c_str()), dims[k], nu, bk);
    const std::string ck = detail::block_key('C', k);
    sys.C_block(k) = detail::matrix_from_json(detail::field(j, ck.c_str()), ny, dims[k], ck);
    const std::string fk = detail::block_key('f', k);
    sys.f_block(k) = detail::vector_from_json(j, fk.c_str(), dims[k]);
  }
  sys.D = detail::matrix_from_json(detail::field(j, "D"), ny, nu, "D");
  sys.g = detail::vector_from_json(j, "g", ny);
  const auto finite = [](const auto& m) { return m.allFinite(); };
  if (!finite(sys.A) || !finite(sys.B) || !finite(sys.C) || !finite(sys.D) || !finite(sys.f) || !finite(sys.g)) {
    throw ParseError("realization contains non-finite values");
  }
  return sys;
}

/// Stride stored alongside a strided realization, or all ones.
inline MultiIndex stride_from_json(const Json& j) {
  const auto d = detail::get<std::size_t>(j, "dim");
  if (!j.contains("stride")) return MultiIndex::filled(d, 1);
  return MultiIndex(detail::index_list(j, "stride", d));
}

inline Json to_json(const RankCertificate& c) {
  Json j;
  j["applicable"] = c.applicable;
  j["note"] = c.note;
  j["horizon"] = c.horizon;
  j["rank"] = c.rank;
  j["required"] = c.required;
  j["holds"] = c.holds;
  j["leading_sigma_min"] = c.leading_sigma_min;
  j["leading_error"] = c.leading_error;
  j["tail_norm"] = c.tail_norm;
  j["coefficients_match"] = c.coefficients_match;
  return j;
}

inline Json to_json(const Observability1d& o) {
  Json j;
  j["controllable"] = o.controllable;
  j["observable"] = o.observable;
  j["controllability_rank"] = o.controllability_rank;
  j["observability_rank"] = o.observability_rank;
  j["state_dim"] = o.state_dim;
  j["leading_full_column_rank"] = o.leading_full_column_rank;
  return j;
}

inline Json to_json(const DimReport& r) {
  Json j;
  j["state_dims"] = r.state_dims;
  j["total"] = r.total;
  j["expected"] = r.expected ? Json(*r.expected) : Json(nullptr);
  j["matches"] = r.matches;
  return j;
}

inline Json to_json(const VerificationReport& r) {
  Json j;
  j["max_abs_residual"] = r.max_abs_residual;
  j["kernel_recovered"] = r.kernel_recovered;
  j["impulse_error"] = r.impulse_error;
  j["trials"] = r.trials;
  j["state_dims"] = r.dims.state_dims;
  j["dims"] = to_json(r.dims);
  j["dim_lower_bound"] = r.dim_lower_bound ? Json(*r.dim_lower_bound) : Json(nullptr);
  j["rank_certificate"] = r.rank_certificate ? to_json(*r.rank_certificate) : Json(nullptr);
  j["observability"] = r.observability ? to_json(*r.observability) : Json(nullptr);
  j["controllability_rank"] = r.controllability_rank;
  j["observability_rank"] = r.observability_rank;
  j["passed"] = r.passed();
  return j;
}

inline std::string dump(const Json& j) { return j.dump() + "\n"; }

inline Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

inline void write_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << dump(j);
}

}  // namespace roesser::io
