#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ulamtent::cli {

enum class Subcommand { kDensity, kSweep, kHolder, kEntropy, kVerifyBounds, kCheckLy, kCheckOps };

struct RunConfig {
  Subcommand subcommand = Subcommand::kDensity;
  std::optional<double> t;
  std::optional<double> s;
  double t_min = 0.0;  // defaults to tau
  double t_max = 1.0;
  int steps = 17;
  int grid_n = 128;
  std::uint64_t seed = 42;
  std::string out_path;
  std::optional<std::string> svg_path;
  double min_distance = 1e-3;

  std::optional<std::string> map_path;
  std::optional<std::string> matrix_path;
  std::optional<std::string> pairs_path;       // holder input
  std::optional<std::string> pairs_out_path;   // sweep output
  std::optional<std::string> density_dir;      // sweep output
  int random_pairs = 0;
  int ell = 6;
  int functions = 20;
  int orbits = 16;
  int length = 1000;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNonConvergence = 2;

/// Parses args (without the program name), runs the subcommand, and returns
/// the process exit code. Diagnostics go to err, progress to out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ulamtent::cli
