#include "ulamtent/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ulamtent::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

std::string format_fixed(double v, int digits) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r' || text.back() == '\t')) text.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw std::runtime_error("cannot parse number '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

Point2 point_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("point must be [x1, x2]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Polygon polygon_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("polygon must be an array of points");
  std::vector<Point2> verts;
  for (const json& p : j) verts.push_back(point_from_json(p));
  return Polygon::from_vertices(std::move(verts));
}

json polygon_to_json(const Polygon& p) {
  json arr = json::array();
  for (const Point2& v : p.vertices()) arr.push_back({v.x1, v.x2});
  return arr;
}

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot rename output into '" + path.string() + "'");
  }
}

std::string density_csv(const DensityVector& rho, const UlamPartition& part) {
  if (rho.values.size() != part.size()) throw std::invalid_argument("density size mismatch");
  std::string out = "cell_id,cx,cy,area,rho\n";
  for (std::size_t i = 0; i < part.size(); ++i) {
    const Point2 c = part.centroids()[i];
    out += std::to_string(i) + ',' + format_double(c.x1) + ',' + format_double(c.x2) + ',' +
           format_double(part.areas()[i]) + ',' + format_double(rho.values[i]) + '\n';
  }
  return out;
}

json matrix_json(const TransferMatrix& P) {
  json rows = json::array();
  for (std::size_t i = 0; i < P.size(); ++i) {
    json row = json::array();
    for (const MatrixEntry& e : P.row(i)) row.push_back({e.col, e.weight});
    rows.push_back(std::move(row));
  }
  json j;
  j["t"] = P.t_param() ? json(*P.t_param()) : json(nullptr);
  j["rows"] = std::move(rows);
  return j;
}

std::string sweep_csv(const SweepResult& sweep, const std::vector<std::string>& density_files) {
  std::string out = "t,entropy_lebesgue,entropy_measure,density_file\n";
  for (std::size_t k = 0; k < sweep.t_values.size(); ++k) {
    out += format_double(sweep.t_values[k]) + ',' + format_double(sweep.entropies[k].lebesgue) + ',' +
           format_double(sweep.entropies[k].measure) + ',' + (k < density_files.size() ? density_files[k] : "") +
           '\n';
  }
  return out;
}

std::string pairs_csv(const std::vector<DensityPair>& pairs) {
  std::string out = "t,s,gap,l1_distance\n";
  for (const DensityPair& p : pairs) {
    out += format_double(p.t) + ',' + format_double(p.s) + ',' + format_double(std::abs(p.t - p.s)) + ',' +
           format_double(p.l1_distance) + '\n';
  }
  return out;
}

std::vector<GapDistance> read_pairs_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("'" + path.string() + "' is empty");
  const std::vector<std::string> header = split_csv_line(line);
  const auto column = [&](std::string_view name) -> long {
    for (std::size_t k = 0; k < header.size(); ++k) {
      std::string h = header[k];
      std::erase_if(h, [](char c) { return c == ' ' || c == '\r'; });
      if (h == name) return static_cast<long>(k);
    }
    return -1;
  };
  const long gap_col = column("gap");
  const long dist_col = column("l1_distance");
  if (gap_col < 0 || dist_col < 0) throw std::runtime_error("pairs CSV needs gap and l1_distance columns");
  std::vector<GapDistance> out;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (static_cast<long>(fields.size()) <= std::max(gap_col, dist_col)) {
      throw std::runtime_error("short row in pairs CSV: '" + line + "'");
    }
    out.push_back({parse_double(fields[gap_col]), parse_double(fields[dist_col])});
  }
  return out;
}

json to_json(const HolderFit& fit) {
  return {{"c_hat", fit.c_hat},       {"eta_hat", fit.eta_hat},
          {"r_squared", fit.r_squared}, {"pairs_used", fit.pairs_used},
          {"min_distance", fit.min_distance}, {"slack", fit.slack}};
}

json to_json(const BoundReport& report) {
  json items = json::array();
  for (const BoundItem& it : report.items) {
    items.push_back({{"name", it.name},
                     {"computed", it.computed},
                     {"paper_bound", it.paper_bound},
                     {"satisfied", it.satisfied}});
  }
  return {{"t", report.t}, {"s", report.s}, {"items", std::move(items)}};
}

json to_json(const LYReport& report) {
  json samples = json::array();
  for (const LYSample& s : report.samples) {
    samples.push_back({{"v_f", s.v_f}, {"l1_f", s.l1_f}, {"v_lf", s.v_lf}});
  }
  return {{"theta_hat", report.theta_hat},
          {"m_hat", report.m_hat},
          {"ell", report.ell},
          {"t", report.t ? json(*report.t) : json(nullptr)},
          {"samples", std::move(samples)}};
}

PiecewiseAffineMap map_from_json(const json& j) {
  if (!j.contains("omega") || !j.contains("branches")) {
    throw std::invalid_argument("map definition needs 'omega' and 'branches'");
  }
  Polygon omega = polygon_from_json(j.at("omega"));
  std::vector<std::pair<Polygon, AffineMap2>> pieces;
  for (const json& b : j.at("branches")) {
    const json& lin = b.at("linear");
    if (!lin.is_array() || lin.size() != 4) throw std::invalid_argument("'linear' must hold 4 numbers (row-major)");
    AffineMap2 f;
    for (std::size_t k = 0; k < 4; ++k) f.linear[k] = lin[k].get<double>();
    f.translation = b.contains("translation") ? point_from_json(b.at("translation")) : Point2{};
    pieces.emplace_back(polygon_from_json(b.at("domain")), f);
  }
  return PiecewiseAffineMap(std::move(omega), pieces);
}

json map_to_json(const PiecewiseAffineMap& map) {
  json branches = json::array();
  for (const Branch& b : map.branches()) {
    branches.push_back({{"domain", polygon_to_json(b.domain)},
                        {"linear", b.forward.linear},
                        {"translation", {b.forward.translation.x1, b.forward.translation.x2}}});
  }
  return {{"omega", polygon_to_json(map.omega())}, {"branches", std::move(branches)}};
}

std::string svg_heatmap(const DensityVector& rho, const UlamPartition& part) {
  if (rho.values.size() != part.size()) throw std::invalid_argument("density size mismatch");
  constexpr double kPixels = 800.0;
  constexpr double kMargin = 10.0;
  const BoundingBox box = part.omega().bounds();
  const double scale = kPixels / (box.hi.x1 - box.lo.x1);
  const double height = (box.hi.x2 - box.lo.x2) * scale;
  const auto px = [&](Point2 p) {
    return format_fixed(kMargin + (p.x1 - box.lo.x1) * scale, 3) + ' ' +
           format_fixed(kMargin + height - (p.x2 - box.lo.x2) * scale, 3);
  };
  const auto path_data = [&](const Polygon& poly) {
    std::string d;
    for (std::size_t k = 0; k < poly.size(); ++k) d += (k == 0 ? "M " : " L ") + px(poly[k]);
    return d + " Z";
  };

  const auto [lo_it, hi_it] = std::minmax_element(rho.values.begin(), rho.values.end());
  const double lo = rho.values.empty() ? 0.0 : *lo_it;
  const double hi = rho.values.empty() ? 0.0 : *hi_it;

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_fixed(kPixels + 2 * kMargin, 0) +
         "\" height=\"" + format_fixed(height + 2 * kMargin, 0) + "\">\n";
  for (std::size_t i = 0; i < part.size(); ++i) {
    const double v = hi > lo ? (rho.values[i] - lo) / (hi - lo) : 0.5;
    const int grey = static_cast<int>(std::lround(255.0 * (1.0 - v)));
    char colour[8];
    std::snprintf(colour, sizeof colour, "#%02x%02x%02x", grey, grey, grey);
    out += "<path d=\"" + path_data(part.cells()[i]) + "\" fill=\"" + colour + "\" stroke=\"none\"/>\n";
  }
  out += "<path d=\"" + path_data(part.omega()) + "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  out += "</svg>\n";
  return out;
}

void render_svg_heatmap(const DensityVector& rho, const UlamPartition& part, const std::filesystem::path& path) {
  write_atomic(path, svg_heatmap(rho, part));
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace ulamtent::io
