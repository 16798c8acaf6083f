#include "metricspace/io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace metricspace {

namespace {

using nlohmann::json;

Mat read_matrix(const json& node, int n, const std::string& where) {
  if (!node.is_array()) throw InputError(where + ": expected a list of numbers");
  std::vector<double> vals;
  vals.reserve(node.size());
  for (const auto& v : node) {
    if (!v.is_number()) throw InputError(where + ": non-numeric entry");
    vals.push_back(v.get<double>());
  }
  const auto tri = static_cast<std::size_t>(n * (n + 1) / 2);
  const auto full = static_cast<std::size_t>(n * n);
  if (vals.size() == tri) return from_upper_triangle(vals, n);
  if (vals.size() == full) {
    Mat a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = vals[static_cast<std::size_t>(i * n + j)];
    }
    if (!is_symmetric(a)) throw InputError(where + ": matrix is not symmetric");
    return a;
  }
  throw InputError(where + ": expected " + std::to_string(tri) + " (upper triangle) or " +
                   std::to_string(full) + " entries, got " + std::to_string(vals.size()));
}

}  // namespace

MetricField parse_field(const std::string& text, double spd_eps) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("field file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("points")) {
    throw InputError("field file: expected an object with \"dim\" and \"points\"");
  }
  if (!doc["dim"].is_number_integer()) throw InputError("field file: \"dim\" must be an integer");
  const int n = doc["dim"].get<int>();
  if (n < 1 || n > kMaxFiberDim) throw InputError("field file: unsupported dim " + std::to_string(n));
  const auto& pts = doc["points"];
  if (!pts.is_array() || pts.empty()) throw InputError("field file: \"points\" must be a non-empty list");

  std::vector<QuadPoint> quad;
  std::vector<Mat> mats;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::string where = "point " + std::to_string(i);
    const auto& pt = pts[i];
    if (!pt.is_object()) throw InputError(where + ": expected an object");
    QuadPoint q;
    if (pt.contains("weight")) {
      if (!pt["weight"].is_number()) throw InputError(where + ": weight must be a number");
      q.weight = pt["weight"].get<double>();
    } else {
      q.weight = 1.0 / static_cast<double>(pts.size());
    }
    q.reference_metric = pt.contains("reference_metric")
                             ? read_matrix(pt["reference_metric"], n, where + " reference_metric")
                             : identity(n);
    if (!pt.contains("matrix")) throw InputError(where + ": missing \"matrix\"");
    mats.push_back(read_matrix(pt["matrix"], n, where + " matrix"));
    require_spd(mats.back(), where + " matrix", spd_eps);
    quad.push_back(std::move(q));
  }
  return MetricField(make_manifold(n, std::move(quad)), std::move(mats), spd_eps);
}

MetricField read_field_file(const std::string& path, double spd_eps) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open field file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_field(ss.str(), spd_eps);
}

std::string format_field(const MetricField& g) {
  json doc;
  doc["dim"] = g.dim();
  json pts = json::array();
  for (std::size_t i = 0; i < g.size(); ++i) {
    json pt;
    pt["weight"] = g.manifold().weight(i);
    pt["reference_metric"] = upper_triangle(g.manifold().reference(i));
    pt["matrix"] = upper_triangle(g[i]);
    pts.push_back(std::move(pt));
  }
  doc["points"] = std::move(pts);
  return doc.dump(2) + "\n";
}

void write_field_file(const std::string& path, const MetricField& g) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write field file " + path);
  out << format_field(g);
}

}  // namespace metricspace
