#include "rabi/contour.hpp"

#include <array>
#include <cmath>

#include "rabi/error.hpp"

namespace rabi::contour {

namespace {

struct Segment {
  std::size_t a;
  std::size_t b;
  bool used = false;
};

class EdgeIndex {
 public:
  EdgeIndex(std::size_t nx, std::size_t ny) : nx_(nx), horizontal_((nx - 1) * ny) {}

  std::size_t horizontal(std::size_t i, std::size_t j) const { return j * (nx_ - 1) + i; }
  std::size_t vertical(std::size_t i, std::size_t j) const { return horizontal_ + j * nx_ + i; }
  std::size_t total(std::size_t ny) const { return horizontal_ + (ny - 1) * nx_; }

 private:
  std::size_t nx_;
  std::size_t horizontal_;
};

Point crossing(const Grid& g, std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1) {
  const double v0 = g.at(i0, j0);
  const double v1 = g.at(i1, j1);
  const double t = v0 == v1 ? 0.5 : v0 / (v0 - v1);
  const double x0 = g.x0 + g.dx * static_cast<double>(i0);
  const double y0 = g.y0 + g.dy * static_cast<double>(j0);
  const double x1 = g.x0 + g.dx * static_cast<double>(i1);
  const double y1 = g.y0 + g.dy * static_cast<double>(j1);
  return {x0 + t * (x1 - x0), y0 + t * (y1 - y0)};
}

}  // namespace

ContourResult zero_level(const Grid& g) {
  if (g.nx < 2 || g.ny < 2 || g.values.size() != g.nx * g.ny) {
    throw Error(ErrorCode::InvalidArgument, "contour grid must be at least 2 x 2");
  }
  const EdgeIndex edges(g.nx, g.ny);
  const std::size_t n_edges = edges.total(g.ny);

  std::vector<Point> edge_point(n_edges);
  std::vector<std::array<long, 2>> edge_segments(n_edges, {-1, -1});
  std::vector<Segment> segments;
  ContourResult out;

  auto positive = [&](std::size_t i, std::size_t j) { return g.at(i, j) >= 0.0; };
  auto add_segment = [&](std::size_t ea, std::size_t eb) {
    const long id = static_cast<long>(segments.size());
    segments.push_back({ea, eb});
    for (std::size_t e : {ea, eb}) {
      auto& slot = edge_segments[e];
      (slot[0] < 0 ? slot[0] : slot[1]) = id;
    }
  };

  for (std::size_t j = 0; j + 1 < g.ny; ++j) {
    for (std::size_t i = 0; i + 1 < g.nx; ++i) {
      const double c0 = g.at(i, j), c1 = g.at(i + 1, j), c2 = g.at(i + 1, j + 1), c3 = g.at(i, j + 1);
      if (!std::isfinite(c0) || !std::isfinite(c1) || !std::isfinite(c2) || !std::isfinite(c3)) {
        ++out.masked_cells;
        continue;
      }
      const bool p0 = positive(i, j), p1 = positive(i + 1, j);
      const bool p2 = positive(i + 1, j + 1), p3 = positive(i, j + 1);
      const std::size_t bottom = edges.horizontal(i, j);
      const std::size_t top = edges.horizontal(i, j + 1);
      const std::size_t left = edges.vertical(i, j);
      const std::size_t right = edges.vertical(i + 1, j);

      std::vector<std::size_t> cut;
      if (p0 != p1) {
        edge_point[bottom] = crossing(g, i, j, i + 1, j);
        cut.push_back(bottom);
      }
      if (p1 != p2) {
        edge_point[right] = crossing(g, i + 1, j, i + 1, j + 1);
        cut.push_back(right);
      }
      if (p2 != p3) {
        edge_point[top] = crossing(g, i, j + 1, i + 1, j + 1);
        cut.push_back(top);
      }
      if (p3 != p0) {
        edge_point[left] = crossing(g, i, j, i, j + 1);
        cut.push_back(left);
      }
      if (cut.size() == 2) {
        add_segment(cut[0], cut[1]);
      } else if (cut.size() == 4) {
        const bool centre = 0.25 * (c0 + c1 + c2 + c3) >= 0.0;
        if (centre == p0) {
          add_segment(bottom, right);
          add_segment(top, left);
        } else {
          add_segment(left, bottom);
          add_segment(right, top);
        }
      }
    }
  }

  auto other_segment = [&](std::size_t edge, std::size_t seg) -> long {
    const auto& slot = edge_segments[edge];
    if (slot[0] >= 0 && static_cast<std::size_t>(slot[0]) != seg) return slot[0];
    if (slot[1] >= 0 && static_cast<std::size_t>(slot[1]) != seg) return slot[1];
    return -1;
  };

  auto walk = [&](std::size_t start_seg, std::size_t start_edge) {
    Polyline line;
    line.points.push_back(edge_point[start_edge]);
    std::size_t seg = start_seg;
    std::size_t edge = start_edge;
    while (true) {
      Segment& s = segments[seg];
      s.used = true;
      const std::size_t next_edge = s.a == edge ? s.b : s.a;
      line.points.push_back(edge_point[next_edge]);
      const long next = other_segment(next_edge, seg);
      if (next < 0) break;
      if (segments[static_cast<std::size_t>(next)].used) {
        line.closed = true;
        break;
      }
      seg = static_cast<std::size_t>(next);
      edge = next_edge;
    }
    return line;
  };

  // Open curves start at edges touched by a single segment.
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (segments[s].used) continue;
    for (std::size_t e : {segments[s].a, segments[s].b}) {
      if (!segments[s].used && other_segment(e, s) < 0) out.lines.push_back(walk(s, e));
    }
  }
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (!segments[s].used) out.lines.push_back(walk(s, segments[s].a));
  }
  return out;
}

}  // namespace rabi::contour
