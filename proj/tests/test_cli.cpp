#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "ulamtent/io.hpp"

using namespace ulamtent;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ulamtent_cli_" + std::to_string(std::rand()) + "_" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) MESSAGE("stderr: " << err.str());
  return code;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("density at t = 1 is uniform") {
  TempDir dir;
  REQUIRE(run_cli({"density", "--t", "1.0", "--grid", "64", "--out", dir / "d.csv"}) == cli::kExitOk);
  const auto rows = read_csv(dir / "d.csv");
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == std::vector<std::string>{"cell_id", "cx", "cy", "area", "rho"});
  for (std::size_t k = 1; k < rows.size(); ++k) {
    REQUIRE(rows[k].size() == 5);
    CHECK(std::stoul(rows[k][0]) == k - 1);
    CHECK(std::abs(std::stod(rows[k][4]) - 1.0) <= 1e-10);
  }
  CHECK_FALSE(fs::exists(dir / "d.csv.tmp"));
}

TEST_CASE("invalid input exits with 1") {
  TempDir dir;
  CHECK(run_cli({"density", "--t", "0.5", "--grid", "16", "--out", dir / "d.csv"}) == cli::kExitInvalid);
  CHECK_FALSE(fs::exists(dir / "d.csv"));
  CHECK(run_cli({"density", "--t", "0.95", "--grid", "15", "--out", dir / "d.csv"}) == cli::kExitInvalid);
  CHECK(run_cli({"density", "--t", "0.95", "--bogus", "--out", dir / "d.csv"}) == cli::kExitInvalid);
  CHECK(run_cli({"nosuch"}) == cli::kExitInvalid);
  CHECK(run_cli({}) == cli::kExitInvalid);
  CHECK(run_cli({"density", "--t", "0.95", "--grid", "8", "--out", dir / "missing/dir/d.csv"}) ==
        cli::kExitInvalid);
  CHECK(run_cli({"sweep", "--t-min", "0.5", "--grid", "8", "--out", dir / "s.csv"}) == cli::kExitInvalid);
  CHECK(run_cli({"sweep", "--steps", "1", "--grid", "8", "--out", dir / "s.csv"}) == cli::kExitInvalid);
  CHECK(run_cli({"--help"}) == cli::kExitOk);
}

TEST_CASE("holder recovers a synthetic exponent") {
  TempDir dir;
  {
    std::ofstream out(dir / "pairs.csv");
    out << "t,s,gap,l1_distance\n";
    for (int k = 1; k <= 12; ++k) {
      const double gap = 0.01 * k;
      out << io::format_double(1.0) << ',' << io::format_double(1.0 - gap) << ',' << io::format_double(gap) << ','
          << io::format_double(2.0 * std::sqrt(gap)) << '\n';
    }
  }
  REQUIRE(run_cli({"holder", "--pairs", dir / "pairs.csv", "--min-distance", "1e-3", "--out", dir / "fit.json"}) ==
          cli::kExitOk);
  const nlohmann::json fit = nlohmann::json::parse(slurp(dir / "fit.json"));
  CHECK(std::abs(fit["eta_hat"].get<double>() - 0.5) <= 1e-6);
  CHECK(std::abs(fit["c_hat"].get<double>() - 2.0) <= 1e-6);
  CHECK(fit["pairs_used"].get<int>() == 12);
  CHECK(fit.contains("r_squared"));
  CHECK(fit["min_distance"].get<double>() == 1e-3);
  CHECK(run_cli({"holder", "--pairs", dir / "absent.csv", "--out", dir / "fit2.json"}) == cli::kExitInvalid);
}

TEST_CASE("sweep writes CSVs that feed holder") {
  TempDir dir;
  REQUIRE(run_cli({"sweep", "--steps", "5", "--grid", "16", "--out", dir / "sweep.csv", "--pairs-out",
                   dir / "pairs.csv", "--density-dir", dir / "dens"}) == cli::kExitOk);
  const auto sweep = read_csv(dir / "sweep.csv");
  REQUIRE(sweep.size() == 6);
  CHECK(sweep[0] == std::vector<std::string>{"t", "entropy_lebesgue", "entropy_measure", "density_file"});
  for (std::size_t k = 1; k < sweep.size(); ++k) {
    const double t = std::stod(sweep[k][0]);
    CHECK(std::abs(std::stod(sweep[k][1]) - std::log(2 * t * t)) <= 1e-12);
    CHECK(fs::exists(sweep[k][3]));
  }
  const auto pairs = read_csv(dir / "pairs.csv");
  CHECK(pairs.size() == 11);
  CHECK(pairs[0] == std::vector<std::string>{"t", "s", "gap", "l1_distance"});
  CHECK(run_cli({"holder", "--pairs", dir / "pairs.csv", "--out", dir / "fit.json"}) == cli::kExitOk);
}

TEST_CASE("entropy, bounds, LY and operator checks") {
  TempDir dir;
  REQUIRE(run_cli({"entropy", "--t", "0.9", "--grid", "16", "--orbits", "2", "--length", "100", "--out",
                   dir / "e.json"}) == cli::kExitOk);
  const nlohmann::json e = nlohmann::json::parse(slurp(dir / "e.json"));
  CHECK(std::abs(e["entropy_birkhoff"].get<double>() - std::log(1.62)) <= 1e-12);
  CHECK(std::abs(e["entropy_lebesgue"].get<double>() - std::log(1.62)) <= 1e-12);

  REQUIRE(run_cli({"verify-bounds", "--t", "1.0", "--s", "0.95", "--out", dir / "b.json"}) == cli::kExitOk);
  const nlohmann::json b = nlohmann::json::parse(slurp(dir / "b.json"));
  REQUIRE(b["items"].size() == 5);
  CHECK(std::abs(b["items"][0]["computed"].get<double>() - 0.04875) <= 1e-12);
  for (const auto& item : b["items"]) CHECK(item["satisfied"].get<bool>());
  CHECK(run_cli({"verify-bounds", "--steps", "5", "--random-pairs", "10", "--out", dir / "all.json"}) ==
        cli::kExitOk);

  REQUIRE(run_cli({"check-ly", "--t", "0.95", "--grid", "32", "--out", dir / "ly.json"}) == cli::kExitOk);
  const nlohmann::json ly = nlohmann::json::parse(slurp(dir / "ly.json"));
  CHECK(ly["theta_hat"].get<double>() < 1.0);
  CHECK(ly["samples"].size() == 20);
  CHECK(ly["ell"].get<int>() == 6);

  CHECK(run_cli({"check-ops", "--t", "0.95", "--grid", "32", "--out", dir / "ops.json"}) == cli::kExitOk);
}

TEST_CASE("density from a map definition, with SVG and matrix export") {
  TempDir dir;
  {
    std::ofstream out(dir / "map.json");
    out << io::dump(io::map_to_json(tent_family(TentParams{1.0})));
  }
  REQUIRE(run_cli({"density", "--map", dir / "map.json", "--grid", "8", "--out", dir / "d.csv", "--svg",
                   dir / "d.svg", "--matrix", dir / "m.json"}) == cli::kExitOk);
  const std::string svg = slurp(dir / "d.svg");
  const auto rows = read_csv(dir / "d.csv");
  CHECK(count(svg, "<path ") == rows.size());  // cells + outline, header included in rows
  const nlohmann::json m = nlohmann::json::parse(slurp(dir / "m.json"));
  CHECK(m["rows"].size() == rows.size() - 1);

  std::ofstream(dir / "bad.json") << "{\"omega\": [[0,0],[1,0],[1,1]], \"branches\": []}";
  CHECK(run_cli({"density", "--map", dir / "bad.json", "--grid", "8", "--out", dir / "x.csv"}) ==
        cli::kExitInvalid);
  CHECK(run_cli({"density", "--grid", "8", "--out", dir / "x.csv"}) == cli::kExitInvalid);
}

TEST_CASE("SVG heatmap structure") {
  const UlamPartition two = UlamPartition::build(2);
  const std::string svg = io::svg_heatmap(DensityVector{{2.0, 0.0}}, two);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(count(svg, "<path ") == 3);
  CHECK(count(svg, "#000000") == 2);  // dark cell and outline stroke
  CHECK(count(svg, "#ffffff") == 1);
  const UlamPartition part = UlamPartition::build(16);
  const std::string uniform = io::svg_heatmap(DensityVector{std::vector<double>(part.size(), 1.0)}, part);
  CHECK(count(uniform, "fill=\"#808080\"") == part.size());
  CHECK(count(uniform, "<path ") == part.size() + 1);
  CHECK(uniform.find("</svg>") != std::string::npos);
}

TEST_CASE("map JSON round trip and number formatting") {
  const PiecewiseAffineMap map = tent_family(TentParams{0.93});
  const PiecewiseAffineMap back = io::map_from_json(io::map_to_json(map));
  REQUIRE(back.branches().size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.branches()[i].forward.linear == map.branches()[i].forward.linear);
    CHECK(area(back.branches()[i].domain) == doctest::Approx(0.5));
  }
  CHECK(std::stod(io::format_double(0.1)) == 0.1);
  CHECK(std::stod(io::format_double(tau())) == tau());
  CHECK_THROWS(io::map_from_json(nlohmann::json::object()));
}

TEST_CASE("outputs are byte-identical across runs") {
  TempDir dir;
  for (const char* name : {"a", "b"}) {
    const std::string base = dir / name;
    REQUIRE(run_cli({"density", "--t", "0.93", "--grid", "32", "--out", base + ".csv", "--svg", base + ".svg"}) ==
            0);
    REQUIRE(run_cli({"check-ly", "--t", "0.93", "--grid", "16", "--out", base + "_ly.json"}) == 0);
  }
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(slurp(dir / "a.svg") == slurp(dir / "b.svg"));
  CHECK(slurp(dir / "a_ly.json") == slurp(dir / "b_ly.json"));
}
