#pragma once
// Marching-squares extraction of the zero level of a sampled 2-D field.

#include <cstddef>
#include <vector>

namespace rabi::contour {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Values on a regular (nx by ny) grid, row-major in x: values[j * nx + i] at
/// (x0 + i dx, y0 + j dy). Non-finite values mask the four adjacent cells.
struct Grid {
  double x0 = 0.0;
  double dx = 1.0;
  std::size_t nx = 0;
  double y0 = 0.0;
  double dy = 1.0;
  std::size_t ny = 0;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[j * nx + i]; }
};

struct Polyline {
  std::vector<Point> points;
  bool closed = false;
};

struct ContourResult {
  std::vector<Polyline> lines;
  std::size_t masked_cells = 0;
};

/// Zero-level polylines, with segments joined across shared cell edges.
/// Saddle cells are resolved by the sign of the mean of the four corners.
ContourResult zero_level(const Grid& g);

}  // namespace rabi::contour
