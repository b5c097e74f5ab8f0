#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "CLI11.hpp"
#include "json.hpp"
#include "ulamtent/analysis.hpp"
#include "ulamtent/bv.hpp"
#include "ulamtent/io.hpp"
#include "ulamtent/maps.hpp"
#include "ulamtent/ulam.hpp"

namespace ulamtent::cli {

namespace {

using nlohmann::json;

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

TentParams require_t(const std::optional<double>& t, const char* flag = "--t") {
  if (!t) throw ValidationError(std::string(flag) + " is required");
  try {
    return TentParams(*t);
  } catch (const std::out_of_range& e) {
    throw ValidationError(e.what());
  }
}

void validate_grid(int n) {
  if (n < 2 || n % 2 != 0) throw ValidationError("--grid must be even and >= 2");
}

std::vector<double> sweep_grid(const RunConfig& cfg) {
  if (cfg.steps < 2) throw ValidationError("--steps must be >= 2");
  if (cfg.t_min < tau() || cfg.t_max > 1.0 || !(cfg.t_min < cfg.t_max)) {
    throw ValidationError("[--t-min, --t-max] must be a nonempty subinterval of [tau, 1], tau = " +
                          io::format_double(tau()));
  }
  return equispaced_grid(cfg.t_min, cfg.t_max, cfg.steps);
}

PiecewiseAffineMap load_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open map file '" + path + "'");
  try {
    return io::map_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ValidationError("map file '" + path + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError("map file '" + path + "': " + e.what());
  }
}

struct Target {
  PiecewiseAffineMap map;
  std::optional<double> t;
};

Target resolve_target(const RunConfig& cfg) {
  if (cfg.map_path) {
    if (cfg.t) throw ValidationError("--t and --map are mutually exclusive");
    return {load_map(*cfg.map_path), std::nullopt};
  }
  const TentParams t = require_t(cfg.t);
  return {tent_family(t), t.t()};
}

int cmd_density(const RunConfig& cfg, std::ostream& out) {
  validate_grid(cfg.grid_n);
  const Target target = resolve_target(cfg);
  const UlamPartition part = UlamPartition::build(cfg.grid_n, target.map.omega());
  const TransferMatrix P = transfer_matrix(target.map, part, target.t);
  const StationaryResult sr = stationary_density(P, part);
  io::write_atomic(cfg.out_path, io::density_csv(sr.density, part));
  if (cfg.svg_path) io::render_svg_heatmap(sr.density, part, *cfg.svg_path);
  if (cfg.matrix_path) io::write_atomic(*cfg.matrix_path, io::dump(io::matrix_json(P)));
  out << "density: " << part.size() << " cells, " << sr.iterations << " iterations, residual "
      << io::format_double(sr.residual) << "\n";
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  validate_grid(cfg.grid_n);
  const std::vector<double> grid = sweep_grid(cfg);
  const UlamPartition part = UlamPartition::build(cfg.grid_n);
  const SweepResult result = sweep(grid, part);
  std::vector<std::string> files;
  if (cfg.density_dir) {
    std::filesystem::create_directories(*cfg.density_dir);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "density_%03zu.csv", k);
      const std::filesystem::path p = std::filesystem::path(*cfg.density_dir) / name;
      io::write_atomic(p, io::density_csv(result.densities[k], part));
      files.push_back(p.string());
    }
  }
  io::write_atomic(cfg.out_path, io::sweep_csv(result, files));
  if (cfg.pairs_out_path) io::write_atomic(*cfg.pairs_out_path, io::pairs_csv(result.pairs));
  out << "sweep: " << grid.size() << " parameters, " << result.pairs.size() << " pairs\n";
  return kExitOk;
}

int cmd_holder(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.pairs_path) throw ValidationError("--pairs is required");
  std::vector<GapDistance> pairs;
  try {
    pairs = io::read_pairs_csv(*cfg.pairs_path);
  } catch (const std::runtime_error& e) {
    throw ValidationError(e.what());
  }
  HolderFit fit;
  try {
    fit = holder_fit(pairs, cfg.min_distance);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  io::write_atomic(cfg.out_path, io::dump(io::to_json(fit)));
  out << "holder: eta_hat " << io::format_double(fit.eta_hat) << ", c_hat " << io::format_double(fit.c_hat)
      << ", r^2 " << io::format_double(fit.r_squared) << "\n";
  return kExitOk;
}

int cmd_entropy(const RunConfig& cfg, std::ostream& out) {
  validate_grid(cfg.grid_n);
  const Target target = resolve_target(cfg);
  const UlamPartition part = UlamPartition::build(cfg.grid_n, target.map.omega());
  const StationaryResult sr = stationary_density(transfer_matrix(target.map, part, target.t), part);
  const EntropyEstimate e = entropy(target.map, sr.density, part);
  const double birkhoff = birkhoff_entropy(target.map, cfg.orbits, cfg.length, cfg.seed);
  json j = {{"t", target.t ? json(*target.t) : json(nullptr)},
            {"grid", cfg.grid_n},
            {"entropy_lebesgue", e.lebesgue},
            {"entropy_measure", e.measure},
            {"entropy_birkhoff", birkhoff},
            {"formula_discrepancy", std::abs(e.lebesgue - e.measure)}};
  if (target.t) j["closed_form"] = std::log(2.0 * *target.t * *target.t);
  io::write_atomic(cfg.out_path, io::dump(j));
  out << "entropy: " << io::format_double(e.lebesgue) << "\n";
  return kExitOk;
}

int cmd_verify_bounds(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<std::pair<double, double>> pairs;
  if (cfg.s) {
    pairs.emplace_back(require_t(cfg.t).t(), require_t(cfg.s, "--s").t());
  } else {
    const std::vector<double> grid = sweep_grid(cfg);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t j = i + 1; j < grid.size(); ++j) pairs.emplace_back(grid[j], grid[i]);
    }
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(cfg.t_min, cfg.t_max);
    for (int k = 0; k < cfg.random_pairs; ++k) {
      const double a = u(rng), b = u(rng);
      pairs.emplace_back(std::max(a, b), std::min(a, b));
    }
  }
  json reports = json::array();
  int violations = 0;
  for (const auto& [t, s] : pairs) {
    const BoundReport r = verify_bounds(TentParams(t), TentParams(s));
    for (const BoundItem& it : r.items) {
      if (!it.satisfied) {
        ++violations;
        err << "bound (" << it.name << ") violated at t=" << io::format_double(t) << ", s=" << io::format_double(s)
            << "\n";
      }
    }
    reports.push_back(io::to_json(r));
  }
  io::write_atomic(cfg.out_path, io::dump(cfg.s ? reports[0] : reports));
  out << "verify-bounds: " << pairs.size() << " pairs, " << violations << " violations\n";
  return violations == 0 ? kExitOk : kExitInvalid;
}

int cmd_check_ly(const RunConfig& cfg, std::ostream& out) {
  validate_grid(cfg.grid_n);
  if (cfg.ell < 1) throw ValidationError("--ell must be >= 1");
  if (cfg.functions < 1) throw ValidationError("--functions must be >= 1");
  const TentParams t = require_t(cfg.t);
  const UlamPartition part = UlamPartition::build(cfg.grid_n);
  const TestSuite suite = make_test_suite(part, cfg.seed, cfg.functions);
  const LYReport report = ly_check(t, part, suite, cfg.ell);
  io::write_atomic(cfg.out_path, io::dump(io::to_json(report)));
  out << "check-ly: theta_hat " << io::format_double(report.theta_hat) << ", m_hat "
      << io::format_double(report.m_hat) << "\n";
  return kExitOk;
}

int cmd_check_ops(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  validate_grid(cfg.grid_n);
  const TentParams t = require_t(cfg.t);
  const PiecewiseAffineMap map = tent_family(t);
  const UlamPartition part = UlamPartition::build(cfg.grid_n);
  const TransferMatrix P = transfer_matrix(t, part);
  const StationaryResult sr = stationary_density(P, part);
  const TestSuite suite = make_test_suite(part, cfg.seed, cfg.functions);

  json checks = json::array();
  bool ok = true;
  const auto record = [&](const std::string& name, double value, double threshold) {
    const bool pass = value <= threshold;
    ok = ok && pass;
    checks.push_back({{"name", name}, {"value", value}, {"threshold", threshold}, {"passed", pass}});
    if (!pass) err << "check-ops: " << name << " = " << io::format_double(value) << " exceeds "
                   << io::format_double(threshold) << "\n";
  };

  // (C1) duality with f = indicator of {x1 < 1}, g = 1; and with f = 1.
  std::vector<double> left(part.size()), ones(part.size(), 1.0);
  for (std::size_t i = 0; i < part.size(); ++i) left[i] = part.centroids()[i].x1 < 1.0 ? 1.0 : 0.0;
  record("duality_left_half", duality_check(map, P, part, left, ones), 1e-2);
  double dual_const = 0.0;
  for (const GridFunction& g : suite.functions) dual_const = std::max(dual_const, duality_check(map, P, part, ones, g.values));
  record("duality_constant_f", dual_const, 1e-12);

  // (C2) on seeded signed functions.
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double contraction = -INFINITY, negativity = 0.0;
  for (int k = 0; k < 100; ++k) {
    std::vector<double> f(part.size());
    for (double& v : f) v = u(rng);
    const std::vector<double> lf = apply_transfer(P, part, f, true);
    contraction = std::max(contraction, l1_norm(lf, part) - l1_norm(f, part));
    std::vector<double> af(f.size());
    std::transform(f.begin(), f.end(), af.begin(), [](double v) { return std::abs(v); });
    for (const double v : apply_transfer(P, part, af, false)) negativity = std::max(negativity, -v);
  }
  record("l1_contraction_excess", contraction, 1e-12);
  record("positivity_violation", negativity, 0.0);

  // (C3)
  record("invariance_residual", sr.residual, 1e-10);

  // Comparison-map estimate against parameters at least 0.01 away.
  double av = 0.0;
  for (const double s : equispaced_grid(tau(), 1.0, cfg.steps)) {
    if (std::abs(s - t.t()) < 0.01) continue;
    for (std::size_t b = 0; b < map.branches().size(); ++b) {
      const ComparisonMap cm = comparison_map(t, TentParams(s), b);
      for (const GridFunction& g : suite.functions) av = std::max(av, lemma_av_ratio(g.values, cm, part).ratio);
    }
  }
  record("lemma_av_ratio_max", av, 10.0);

  double sob = 0.0;
  for (const GridFunction& g : suite.functions) sob = std::max(sob, sobolev_ratio(g.values, part));
  record("sobolev_ratio_max", sob, 0.3);

  // Projection: Pi rho = rho, idempotence.
  const std::vector<double> proj = spectral_projection(sr.density, sr.density.values, part);
  double fix = 0.0, idem = 0.0;
  for (std::size_t i = 0; i < part.size(); ++i) fix = std::max(fix, std::abs(proj[i] - sr.density.values[i]));
  for (const GridFunction& g : suite.functions) {
    const std::vector<double> once = spectral_projection(sr.density, g.values, part);
    const std::vector<double> twice = spectral_projection(sr.density, once, part);
    for (std::size_t i = 0; i < part.size(); ++i) idem = std::max(idem, std::abs(once[i] - twice[i]));
  }
  record("projection_fixed_point", fix, 1e-12);
  record("projection_idempotence", idem, 1e-12);

  io::write_atomic(cfg.out_path, io::dump({{"t", t.t()}, {"grid", cfg.grid_n}, {"seed", cfg.seed}, {"checks", checks}}));
  out << "check-ops: " << (ok ? "all checks passed" : "violations found") << "\n";
  return ok ? kExitOk : kExitInvalid;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  cfg.t_min = tau();

  CLI::App app{"Invariant densities and entropies of piecewise-affine expanding maps (Ulam method)"};
  app.require_subcommand(1);

  std::string svg, map, matrix, pairs, pairs_out, density_dir;

  const auto add_common = [&](CLI::App* sub, bool needs_out = true) {
    auto* o = sub->add_option("--out", cfg.out_path, "Output file");
    if (needs_out) o->required();
    sub->add_option("--grid", cfg.grid_n, "Grid resolution n (even, >= 2)");
    sub->add_option("--seed", cfg.seed, "Random seed");
  };

  auto* density = app.add_subcommand("density", "Stationary density of one map");
  add_common(density);
  density->add_option("--t", cfg.t, "Tent parameter in [tau, 1]");
  density->add_option("--map", map, "Map-definition JSON instead of --t");
  density->add_option("--svg", svg, "Also write an SVG heatmap");
  density->add_option("--matrix", matrix, "Also write the transfer matrix as JSON");

  auto* sweep_cmd = app.add_subcommand("sweep", "Densities and entropies over a parameter grid");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--t-min", cfg.t_min, "Lower end of the grid (default tau)");
  sweep_cmd->add_option("--t-max", cfg.t_max, "Upper end of the grid");
  sweep_cmd->add_option("--steps", cfg.steps, "Number of grid points");
  sweep_cmd->add_option("--pairs-out", pairs_out, "Write pairwise L1 distances CSV");
  sweep_cmd->add_option("--density-dir", density_dir, "Write one density CSV per parameter");

  auto* holder = app.add_subcommand("holder", "Fit distance <= C gap^eta to a pairs CSV");
  holder->add_option("--out", cfg.out_path, "Output JSON")->required();
  holder->add_option("--pairs", pairs, "Pairs CSV with gap and l1_distance columns")->required();
  holder->add_option("--min-distance", cfg.min_distance, "Noise floor for distances");

  auto* ent = app.add_subcommand("entropy", "Entropy by the Jacobian formula and by orbit averages");
  add_common(ent);
  ent->add_option("--t", cfg.t, "Tent parameter in [tau, 1]");
  ent->add_option("--map", map, "Map-definition JSON instead of --t");
  ent->add_option("--orbits", cfg.orbits, "Number of orbits");
  ent->add_option("--length", cfg.length, "Orbit length after the transient");

  auto* bounds = app.add_subcommand("verify-bounds", "Closed-form closeness estimates for parameter pairs");
  add_common(bounds);
  bounds->add_option("--t", cfg.t, "First parameter");
  bounds->add_option("--s", cfg.s, "Second parameter (omit to use all grid pairs)");
  bounds->add_option("--t-min", cfg.t_min, "Lower end of the grid (default tau)");
  bounds->add_option("--t-max", cfg.t_max, "Upper end of the grid");
  bounds->add_option("--steps", cfg.steps, "Number of grid points");
  bounds->add_option("--random-pairs", cfg.random_pairs, "Additional seeded random pairs");

  auto* ly = app.add_subcommand("check-ly", "Fit the Lasota-Yorke constants on a seeded suite");
  add_common(ly);
  ly->add_option("--t", cfg.t, "Tent parameter in [tau, 1]")->required();
  ly->add_option("--ell", cfg.ell, "Iterate of the transfer operator");
  ly->add_option("--functions", cfg.functions, "Number of suite functions");

  auto* ops = app.add_subcommand("check-ops", "Run the transfer-operator and BV property checks");
  add_common(ops);
  ops->add_option("--t", cfg.t, "Tent parameter in [tau, 1]")->required();
  ops->add_option("--functions", cfg.functions, "Number of suite functions");
  ops->add_option("--steps", cfg.steps, "Comparison parameters grid size");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (!svg.empty()) cfg.svg_path = svg;
  if (!map.empty()) cfg.map_path = map;
  if (!matrix.empty()) cfg.matrix_path = matrix;
  if (!pairs.empty()) cfg.pairs_path = pairs;
  if (!pairs_out.empty()) cfg.pairs_out_path = pairs_out;
  if (!density_dir.empty()) cfg.density_dir = density_dir;

  if (chosen == density) cfg.subcommand = Subcommand::kDensity;
  if (chosen == sweep_cmd) cfg.subcommand = Subcommand::kSweep;
  if (chosen == holder) cfg.subcommand = Subcommand::kHolder;
  if (chosen == ent) cfg.subcommand = Subcommand::kEntropy;
  if (chosen == bounds) cfg.subcommand = Subcommand::kVerifyBounds;
  if (chosen == ly) cfg.subcommand = Subcommand::kCheckLy;
  if (chosen == ops) cfg.subcommand = Subcommand::kCheckOps;

  try {
    switch (cfg.subcommand) {
      case Subcommand::kDensity: return cmd_density(cfg, out);
      case Subcommand::kSweep: return cmd_sweep(cfg, out);
      case Subcommand::kHolder: return cmd_holder(cfg, out);
      case Subcommand::kEntropy: return cmd_entropy(cfg, out);
      case Subcommand::kVerifyBounds: return cmd_verify_bounds(cfg, out, err);
      case Subcommand::kCheckLy: return cmd_check_ly(cfg, out);
      case Subcommand::kCheckOps: return cmd_check_ops(cfg, out, err);
    }
    return kExitInvalid;
  } catch (const NonConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace ulamtent::cli
