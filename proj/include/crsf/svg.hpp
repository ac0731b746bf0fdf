#pragma once

// SVG picture of the cycles of a field. One unit square per vertex, North
// pointing up. Edges that wrap around the torus are cut at the boundary, so
// every polyline starts on the left edge (x = 0) or the bottom edge (y = m).

#include <array>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "crsf/census.hpp"
#include "crsf/errors.hpp"
#include "crsf/sampler.hpp"

namespace crsf {

inline constexpr std::uint64_t kRenderGuard = 4'000'000;

inline constexpr std::array<const char*, 10> kCyclePalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

namespace detail {

struct Point {
  double x;
  double y;
};

inline void append_point(std::string& out, Point p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%.1f,%.1f", out.empty() ? "" : " ", p.x, p.y);
  out += buf;
}

// Splits one cycle into boundary-to-boundary polylines in SVG coordinates.
inline std::vector<std::vector<Point>> cycle_polylines(const StepField& field, const Cycle& c) {
  const index_t n = field.dims().n();
  const index_t m = field.dims().m();
  const double height = static_cast<double>(m);
  auto center = [&](index_t v) {
    return Point{static_cast<double>(v % n) + 0.5, height - static_cast<double>(v / n) - 0.5};
  };

  std::vector<std::vector<Point>> pieces(1);
  index_t v = c.anchor.index;
  pieces.back().push_back(center(v));
  for (std::uint64_t i = 0; i < c.length; ++i) {
    const Direction d = field.directions()[v];
    const Point here = center(v);
    const index_t x = v % n;
    const index_t y = v / n;
    const index_t next = field.phi(VertexId{v}).index;
    if (d == Direction::East && x + 1 == n) {
      pieces.back().push_back({static_cast<double>(n), here.y});
      pieces.push_back({{0.0, here.y}});
    } else if (d == Direction::North && y + 1 == m) {
      pieces.back().push_back({here.x, 0.0});
      pieces.push_back({{here.x, height}});
    }
    pieces.back().push_back(center(next));
    v = next;
  }
  // The last piece ends at the anchor where the first began; join them.
  if (pieces.size() > 1) {
    std::vector<Point> tail = std::move(pieces.back());
    pieces.pop_back();
    tail.insert(tail.end(), pieces.front().begin() + 1, pieces.front().end());
    pieces.front() = std::move(tail);
  }
  return pieces;
}

}  // namespace detail

inline void render_svg(const StepField& field, const CycleCensus& census, std::ostream& out) {
  const TorusDims& dims = field.dims();
  if (dims.vertex_count() > kRenderGuard) {
    throw CapExceeded("render refused: " + std::to_string(dims.vertex_count()) +
                      " vertices exceeds the guard of " + std::to_string(kRenderGuard));
  }
  if (!(census.dims() == dims)) throw DomainError("census and field dimensions differ");

  const index_t n = dims.n();
  const index_t m = dims.m();
  const index_t scale = std::max<index_t>(1, 800 / std::max(n, m));
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << n * scale << "\" height=\""
      << m * scale << "\" viewBox=\"0 0 " << n << ' ' << m << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << n << "\" height=\"" << m
      << "\" fill=\"white\" stroke=\"black\" stroke-width=\"0.05\"/>\n";

  const double stroke = std::max(0.3, static_cast<double>(std::max(n, m)) / 800.0);
  std::size_t ordinal = 0;
  for (const Cycle& c : census.cycles()) {
    const char* color = kCyclePalette[ordinal % kCyclePalette.size()];
    out << "<g class=\"cycle\" data-anchor=\"" << c.anchor.index << "\" data-p=\""
        << c.homology.p() << "\" data-q=\"" << c.homology.q() << "\" stroke=\"" << color
        << "\" stroke-width=\"" << stroke
        << "\" fill=\"none\" stroke-linecap=\"round\" stroke-linejoin=\"round\">\n";
    for (const auto& piece : detail::cycle_polylines(field, c)) {
      std::string pts;
      for (const auto& p : piece) detail::append_point(pts, p);
      out << "<polyline points=\"" << pts << "\"/>\n";
    }
    out << "</g>\n";
    ++ordinal;
  }
  out << "</svg>\n";
}

}  // namespace crsf
