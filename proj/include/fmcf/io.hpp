#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fmcf/fields.hpp"

namespace fmcf {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) {
    if (row.size() != header.size()) throw std::invalid_argument("table row width does not match the header");
    rows.push_back(std::move(row));
  }
};

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (j) out += ',';
    out += t.header[j];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!std::isfinite(row[j])) throw std::invalid_argument("non-finite value in CSV table");
      if (j) out += ',';
      out += format_number(row[j]);
    }
    out += '\n';
  }
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

inline void write_csv(const Table& t, const std::filesystem::path& path) { write_text(path, to_csv(t)); }

inline Table read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  Table t;
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("empty CSV " + path.string());
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
  while (std::getline(f, line)) {
    std::vector<double> row;
    std::stringstream rs(line);
    for (std::string cell; std::getline(rs, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
    t.rows.push_back(std::move(row));
  }
  return t;
}

// Greyscale raster, row-major, top row first.
struct Image {
  int width = 0, height = 0;
  std::vector<double> pixels;
};

inline std::string to_pgm(const Image& img) {
  if (img.width <= 0 || img.height <= 0 || img.pixels.size() != std::size_t(img.width) * std::size_t(img.height))
    throw std::invalid_argument("image dimensions do not match the pixel count");
  double lo = INFINITY, hi = -INFINITY;
  for (double v : img.pixels) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite pixel value");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::string out = "P2\n# min=" + format_number(lo) + " max=" + format_number(hi) + "\n";
  out += std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double v = img.pixels[std::size_t(y) * std::size_t(img.width) + std::size_t(x)];
      const long p = hi > lo ? std::lround((v - lo) / (hi - lo) * 255.0) : 128L;
      if (x) out += ' ';
      out += std::to_string(p);
    }
    out += '\n';
  }
  return out;
}

inline void write_pgm(const Image& img, const std::filesystem::path& path) { write_text(path, to_pgm(img)); }

// Inside cells of a 2D field as an image, x1 left to right and x2 bottom to
// top; outside cells take `background` (the field minimum when NaN).
inline Image field_to_image(const ScalarField& u, double background = NAN) {
  const auto& g = u.geometry();
  if (g.dim() != 2) throw std::invalid_argument("images need a two-dimensional field");
  if (std::isnan(background)) background = u.min_inside();
  const int pad = GridGeometry::kPadding;
  Image img;
  img.width = g.extents()[0] - 2 * pad;
  img.height = g.extents()[1] - 2 * pad;
  img.pixels.assign(std::size_t(img.width) * std::size_t(img.height), background);
  for (int row = 0; row < img.height; ++row) {
    const int j = pad + img.height - 1 - row;
    for (int i = 0; i < img.width; ++i) {
      const std::size_t idx = std::size_t(pad + i) * g.stride(0) + std::size_t(j) * g.stride(1);
      if (g.inside(idx)) img.pixels[std::size_t(row) * std::size_t(img.width) + std::size_t(i)] = u[idx];
    }
  }
  return img;
}

inline void write_pgm(const ScalarField& u, const std::filesystem::path& path) { write_pgm(field_to_image(u), path); }

}  // namespace fmcf
