// Command-line front end: realize / convolve / simulate / verify / analyze / gen.
//
// Exit codes: 0 success, 1 verification failed, 2 input error,
// 3 unsupported feature.

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "roesser/roesser.hpp"

namespace {

using roesser::Index;
using roesser::MultiIndex;
namespace io = roesser::io;

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kInputError = 2, kUnsupported = 3 };

struct Options {
  std::string kernel_path;
  std::string signal_path;
  std::string realization_path;
  std::string output_path;
  std::vector<Index> stride;
  std::vector<Index> dilation;
  std::vector<Index> extent;
  std::string padding = "full";
  std::uint64_t seed = 0;
  Index trials = 5;
  bool quiet = false;

  // gen
  std::string what;
  std::size_t dim = 0;  // 0: taken from -r / -N
  std::vector<Index> kernel_extents;
  Index c_in = 1;
  Index c_out = 1;
  Index channels = 1;
};

MultiIndex list_or_ones(const std::vector<Index>& v, std::size_t dim, const char* name) {
  if (v.empty()) return MultiIndex::filled(dim, 1);
  if (v.size() != dim) {
    throw roesser::ParseError(std::string("--") + name + " needs " + std::to_string(dim) + " entries");
  }
  return MultiIndex(v);
}

roesser::ConvConfig config_for(const Options& o, std::size_t dim) {
  return {list_or_ones(o.stride, dim, "stride"), list_or_ones(o.dilation, dim, "dilation"),
          roesser::padding_from_string(o.padding)};
}

void emit(const Options& o, const io::Json& j) {
  if (o.output_path.empty()) {
    std::cout << io::dump(j);
  } else {
    io::write_file(o.output_path, j);
  }
}

std::string join(const std::vector<Index>& v) {
  std::ostringstream os;
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? " " : "") << v[k];
  return os.str();
}

void print_dims(const roesser::DimReport& rep) {
  std::cout << "  state dims        : " << join(rep.state_dims) << "  (total " << rep.total << ")\n";
  if (rep.expected) {
    std::cout << "  expected dims     : " << join(*rep.expected) << (rep.matches ? "  [match]" : "  [MISMATCH]")
              << "\n";
  }
}

void print_certificate(const roesser::RankCertificate& c) {
  std::cout << "  rank certificate  : rank " << c.rank << "/" << c.required
            << (c.applicable ? (c.holds ? "  [holds]" : "  [FAILS]") : "  [not applicable]") << "\n"
            << "    " << c.note << ", sigma_min(K[r1,r2]) = " << c.leading_sigma_min << "\n"
            << "    |CA^(r-1)B - K[r1,r2]| = " << c.leading_error << ", max |CA^kB| (k>=r) = " << c.tail_norm
            << "\n";
}

void print_observability(const roesser::Observability1d& o) {
  std::cout << "  controllable      : " << (o.controllable ? "yes" : "no") << " (rank " << o.controllability_rank
            << "/" << o.state_dim << ")\n"
            << "  observable        : " << (o.observable ? "yes" : "no") << " (rank " << o.observability_rank << "/"
            << o.state_dim << "), K[r] full column rank: " << (o.leading_full_column_rank ? "yes" : "no") << "\n";
}

int cmd_realize(const Options& o) {
  const roesser::Kernel kernel = io::kernel_from_json(io::read_file(o.kernel_path));
  const roesser::ConvConfig config = config_for(o, kernel.dim());
  config.validate(kernel.dim());
  io::Json out;
  roesser::RoesserRealization sys;
  if (config.stride.all_equal(1)) {
    sys = roesser::build_dilated(kernel, config.dilation);
    out = io::to_json(sys);
  } else {
    if (kernel.dim() != 2) throw roesser::UnsupportedError("strided realizations are implemented for d = 2 only");
    const roesser::StridedRealization strided =
        roesser::build_strided(roesser::dilate_kernel(kernel, config.dilation), config.stride);
    sys = strided.inner;
    out = io::to_json(strided);
  }
  emit(o, out);
  if (!o.quiet && !o.output_path.empty()) {
    std::cout << "realization (d = " << sys.dim() << ", n_u = " << sys.input_dim() << ", n_y = " << sys.output_dim()
              << ")\n";
    print_dims(roesser::dim_report(sys, kernel, config));
  }
  return kOk;
}

int cmd_convolve(const Options& o) {
  const roesser::Kernel kernel = io::kernel_from_json(io::read_file(o.kernel_path));
  const roesser::Signal u = io::signal_from_json(io::read_file(o.signal_path));
  emit(o, io::to_json(roesser::convolve(kernel, u, config_for(o, kernel.dim()))));
  return kOk;
}

int cmd_simulate(const Options& o) {
  const io::Json doc = io::read_file(o.realization_path);
  const roesser::RoesserRealization sys = io::realization_from_json(doc);
  const roesser::Signal u = io::signal_from_json(io::read_file(o.signal_path));
  const MultiIndex stride = io::stride_from_json(doc);
  if (stride.all_equal(1)) {
    emit(o, io::to_json(roesser::simulate(sys, u)));
  } else {
    // Strided realizations act on the raw signal: shift, lump patches, simulate.
    if (u.dim() != stride.size()) throw roesser::DimensionError("signal and realization dimension differ");
    emit(o, io::to_json(roesser::run_realization(sys, stride, MultiIndex::filled(u.dim(), 0), roesser::Padding::Full, u)));
  }
  return kOk;
}

MultiIndex default_extent(const roesser::Kernel& kernel, const roesser::ConvConfig& config) {
  const MultiIndex span = roesser::output_kernel_span(kernel, config);
  std::vector<Index> n(kernel.dim());
  for (std::size_t k = 0; k < kernel.dim(); ++k) n[k] = std::max<Index>(7, config.stride[k] * (2 * span[k] + 2));
  return MultiIndex(n);
}

int cmd_verify(const Options& o) {
  const roesser::Kernel kernel = io::kernel_from_json(io::read_file(o.kernel_path));
  roesser::ConvConfig config = config_for(o, kernel.dim());
  config.validate(kernel.dim());
  std::optional<roesser::RoesserRealization> sys;
  if (!o.realization_path.empty()) {
    const io::Json j = io::read_file(o.realization_path);
    sys = io::realization_from_json(j);
    if (o.stride.empty()) config.stride = io::stride_from_json(j);
    if (sys->dim() != kernel.dim()) throw roesser::DimensionError("realization and kernel dimension differ");
  }
  const MultiIndex extent = o.extent.empty() ? default_extent(kernel, config) : MultiIndex(o.extent);
  const roesser::RoesserRealization used = sys ? *sys : roesser::layer_realization(kernel, config);
  const roesser::VerificationReport rep =
      roesser::verify_realization(used, kernel, config, o.trials, extent, o.seed);

  if (!o.output_path.empty()) io::write_file(o.output_path, io::to_json(rep));
  if (o.quiet) {
    if (o.output_path.empty()) std::cout << io::dump(io::to_json(rep));
  } else {
    std::cout << "verification (" << rep.trials << " trials, extent " << extent << ", seed " << o.seed << ")\n"
              << "  max abs residual  : " << rep.max_abs_residual << "\n"
              << "  kernel recovered  : " << (rep.kernel_recovered ? "yes" : "no") << " (max error "
              << rep.impulse_error << ")\n";
    print_dims(rep.dims);
    std::cout << "  dim lower bound   : " << (rep.dim_lower_bound ? std::to_string(*rep.dim_lower_bound) : "n/a")
              << "\n"
              << "  ctrb / obsv rank  : " << rep.controllability_rank << " / " << rep.observability_rank << "\n";
    if (rep.rank_certificate) print_certificate(*rep.rank_certificate);
    if (rep.observability) print_observability(*rep.observability);
    std::cout << "  result            : " << (rep.passed() ? "PASS" : "FAIL") << "\n";
  }
  return rep.passed() ? kOk : kVerifyFailed;
}

int cmd_analyze(const Options& o) {
  const roesser::RoesserRealization sys = io::realization_from_json(io::read_file(o.realization_path));
  io::Json out;
  std::optional<roesser::Kernel> kernel;
  if (!o.kernel_path.empty()) kernel = io::kernel_from_json(io::read_file(o.kernel_path));
  const roesser::DimReport dims =
      kernel ? roesser::dim_report(sys, *kernel, config_for(o, kernel->dim())) : roesser::dim_report(sys);
  out["dims"] = io::to_json(dims);
  bool ok = dims.matches;
  if (kernel && sys.dim() == 2 && config_for(o, 2).stride.all_equal(1)) {
    const auto cert = roesser::minimality_certificate(sys, roesser::dilate_kernel(*kernel, config_for(o, 2).dilation));
    out["rank_certificate"] = io::to_json(cert);
    if (!o.quiet) print_certificate(cert);
    ok = ok && (!cert.applicable || (cert.holds && cert.coefficients_match));
  } else if (kernel && sys.dim() == 1) {
    const auto obs = roesser::observability_1d(sys, roesser::dilate_kernel(*kernel, config_for(o, 1).dilation));
    out["observability"] = io::to_json(obs);
    if (!o.quiet) print_observability(obs);
  }
  if (!o.quiet) print_dims(dims);
  if (!o.output_path.empty()) io::write_file(o.output_path, out);
  if (o.quiet && o.output_path.empty()) std::cout << io::dump(out);
  return ok ? kOk : kVerifyFailed;
}

int cmd_gen(const Options& o) {
  roesser::Generator gen(o.seed);
  const auto& shape = o.what == "kernel" ? o.kernel_extents : o.extent;
  if (shape.empty()) throw roesser::ParseError(o.what == "kernel" ? "-r is required" : "-N is required");
  if (o.dim != 0 && shape.size() != o.dim) {
    throw roesser::ParseError(std::string(o.what == "kernel" ? "-r" : "-N") + " needs one entry per dimension");
  }
  if (o.what == "kernel") {
    if (o.c_in < 1 || o.c_out < 1) throw roesser::ParseError("--cin/--cout must be >= 1");
    emit(o, io::to_json(roesser::random_kernel(MultiIndex(o.kernel_extents), o.c_in, o.c_out, gen)));
  } else {
    if (o.channels < 1) throw roesser::ParseError("-c must be >= 1");
    emit(o, io::to_json(roesser::random_signal(MultiIndex(o.extent), o.channels, gen)));
  }
  return kOk;
}

void add_layer_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--stride", o.stride, "stride per direction");
  cmd->add_option("--dilation", o.dilation, "dilation factor per direction");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Roesser-model state-space realizations of convolutional layers"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_flag("-q,--quiet", o.quiet, "suppress tables");

  auto* realize = app.add_subcommand("realize", "build a realization from a kernel");
  realize->add_option("-k,--kernel", o.kernel_path, "kernel JSON")->required();
  realize->add_option("-o,--output", o.output_path, "realization JSON (default: stdout)");
  add_layer_flags(realize, o);

  auto* convolve = app.add_subcommand("convolve", "direct convolution");
  convolve->add_option("-k,--kernel", o.kernel_path, "kernel JSON")->required();
  convolve->add_option("-s,--signal", o.signal_path, "input signal JSON")->required();
  convolve->add_option("-o,--output", o.output_path, "output signal JSON (default: stdout)");
  convolve->add_option("--padding", o.padding, "full, same or none");
  add_layer_flags(convolve, o);

  auto* simulate = app.add_subcommand("simulate", "run a realization on a signal");
  simulate->add_option("-r,--realization", o.realization_path, "realization JSON")->required();
  simulate->add_option("-s,--signal", o.signal_path, "input signal JSON")->required();
  simulate->add_option("-o,--output", o.output_path, "output signal JSON (default: stdout)");

  auto* verify = app.add_subcommand("verify", "check a realization against the direct convolution");
  verify->add_option("-k,--kernel", o.kernel_path, "kernel JSON")->required();
  verify->add_option("-r,--realization", o.realization_path, "realization JSON (default: built from kernel)");
  verify->add_option("-o,--output", o.output_path, "report JSON");
  verify->add_option("--padding", o.padding, "full, same or none");
  verify->add_option("--trials", o.trials, "random inputs to compare")->check(CLI::PositiveNumber);
  verify->add_option("--seed", o.seed, "input generator seed");
  verify->add_option("-N,--extent", o.extent, "input extent (largest index per direction)");
  add_layer_flags(verify, o);

  auto* analyze = app.add_subcommand("analyze", "state dimensions and rank certificates of a realization");
  analyze->add_option("-r,--realization", o.realization_path, "realization JSON")->required();
  analyze->add_option("-k,--kernel", o.kernel_path, "kernel JSON");
  analyze->add_option("-o,--output", o.output_path, "report JSON");
  add_layer_flags(analyze, o);

  auto* gen = app.add_subcommand("gen", "seeded random kernel or signal");
  gen->add_option("what", o.what, "kernel or signal")->required()->check(CLI::IsMember({"kernel", "signal"}));
  gen->add_option("-d,--dim", o.dim, "dimension (checked against -r / -N)");
  gen->add_option("-r,--extents", o.kernel_extents, "kernel extents r (largest tap index)");
  gen->add_option("--cin", o.c_in, "input channels");
  gen->add_option("--cout", o.c_out, "output channels");
  gen->add_option("-N,--extent", o.extent, "signal extent (largest index)");
  gen->add_option("-c,--channels", o.channels, "signal channels");
  gen->add_option("--seed", o.seed, "generator seed");
  gen->add_option("-o,--output", o.output_path, "output JSON (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  std::cout << std::setprecision(6);
  try {
    if (*realize) return cmd_realize(o);
    if (*convolve) return cmd_convolve(o);
    if (*simulate) return cmd_simulate(o);
    if (*verify) return cmd_verify(o);
    if (*analyze) return cmd_analyze(o);
    if (*gen) return cmd_gen(o);
  } catch (const roesser::UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kUnsupported;
  } catch (const roesser::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
