#include "fracharm/grid_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fracharm {

namespace {

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw std::runtime_error("grid csv line " + std::to_string(line) + ": cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

nlohmann::json box_to_json(const Box& box) {
  nlohmann::json axes = nlohmann::json::array();
  for (int k = 0; k < box.dim(); ++k) axes.push_back({box.axis(k).lo, box.axis(k).hi});
  return axes;
}

Box box_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || j.size() > 2) throw std::runtime_error("box must be an array of 1 or 2 [lo, hi] pairs");
  auto interval = [](const nlohmann::json& a) {
    if (!a.is_array() || a.size() != 2) throw std::runtime_error("box axis must be [lo, hi]");
    return Interval{a[0].get<double>(), a[1].get<double>()};
  };
  if (j.size() == 1) return Box(interval(j[0]));
  return Box(interval(j[0]), interval(j[1]));
}

nlohmann::json grid_descriptor(const GridFunction& f) {
  return {{"box", box_to_json(f.box())}, {"h", f.h()}, {"dim", f.dim()}};
}

std::filesystem::path sidecar_for(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

void write_grid_csv(const GridFunction& f, const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw std::runtime_error("cannot open " + csv_path.string() + " for writing");
  out << (f.dim() == 1 ? "x,value\n" : "x,y,value\n");
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Point c = f.center(i);
    out << format_double(c[0]) << ',';
    if (f.dim() == 2) out << format_double(c[1]) << ',';
    out << format_double(f[i]) << '\n';
  }
}

void write_grid_function(const GridFunction& f, const std::filesystem::path& csv_path,
                         const std::filesystem::path& sidecar_path) {
  write_grid_csv(f, csv_path);
  std::ofstream side(sidecar_path);
  if (!side) throw std::runtime_error("cannot open " + sidecar_path.string() + " for writing");
  side << grid_descriptor(f).dump(2) << '\n';
}

GridFunction read_grid_function(const std::filesystem::path& csv_path, const std::filesystem::path& sidecar_path) {
  std::ifstream side(sidecar_path);
  if (!side) throw std::runtime_error("cannot open sidecar " + sidecar_path.string());
  const nlohmann::json desc = nlohmann::json::parse(side);
  const Box box = box_from_json(desc.at("box"));
  const double h = desc.at("h").get<double>();
  if (desc.contains("dim") && desc.at("dim").get<int>() != box.dim()) {
    throw std::runtime_error("sidecar dim disagrees with box");
  }
  GridFunction g(box, h);

  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open " + csv_path.string());
  std::string line;
  std::getline(in, line);
  const std::string expected = box.dim() == 1 ? "x,value" : "x,y,value";
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected) throw std::runtime_error("grid csv header must be '" + expected + "'");

  std::size_t row = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != static_cast<std::size_t>(box.dim()) + 1) {
      throw std::runtime_error("grid csv line " + std::to_string(line_no) + ": wrong field count");
    }
    if (row >= g.size()) throw std::runtime_error("grid csv has more rows than the grid has cells");
    const Point c = g.center(row);
    for (int k = 0; k < box.dim(); ++k) {
      const double x = parse_double(fields[static_cast<std::size_t>(k)], line_no);
      if (std::abs(x - c[static_cast<std::size_t>(k)]) > 1e-9 * h) {
        throw std::runtime_error("grid csv line " + std::to_string(line_no) + ": coordinate is not the expected cell center");
      }
    }
    g[row] = parse_double(fields.back(), line_no);
    if (!std::isfinite(g[row])) throw std::runtime_error("grid csv line " + std::to_string(line_no) + ": non-finite value");
    ++row;
  }
  if (row != g.size()) throw std::runtime_error("grid csv has fewer rows than the grid has cells");
  return g;
}

}  // namespace fracharm
