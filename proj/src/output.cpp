#include "rabi/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "rabi/error.hpp"

namespace rabi::io {

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + p.string());
  return f;
}

// Judd and new-integer point sets are drawn as markers, the rest as lines.
std::string style(const Curve& c, bool dashed) {
  switch (c.kind) {
    case CurveKind::Baseline: return "with lines lc rgb 'gray60' dt 2 notitle";
    case CurveKind::HalfBaseline: return "with lines lc rgb 'gray85' dt 3 notitle";
    case CurveKind::JuddPoints: return "with points pt 7 ps 0.8 lc rgb 'gray40' title 'Judd'";
    case CurveKind::NewIntegerPoints: return "with points pt 5 ps 0.8 lc rgb 'gray50' title 'new integer'";
    case CurveKind::Level: return "with lines lw 1.5 lc rgb 'black' notitle";
    case CurveKind::ConditionZero:
      return dashed ? "with lines dt 2 lw 1.5 lc rgb 'black' notitle"
                    : "with lines lw 1.5 lc rgb 'black' notitle";
  }
  return "with lines notitle";
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_points_csv(std::ostream& os, const std::vector<SpectralPoint>& points) {
  os << "lambda,mu,x,E,kind,degeneracy,residual,oracle_delta\n";
  for (const SpectralPoint& p : points) {
    os << format_double(p.pt.lambda) << ',' << format_double(p.pt.mu) << ',' << format_double(p.pt.x)
       << ',' << format_double(p.pt.energy()) << ',' << to_string(p.kind.kind) << ','
       << p.kind.degeneracy << ',' << format_double(p.condition_residual) << ','
       << (p.oracle_delta ? format_double(*p.oracle_delta) : "") << '\n';
  }
}

void write_points_json(std::ostream& os, const std::vector<SpectralPoint>& points) {
  // Numbers go through format_double so the output is byte-stable across runs.
  os << "[";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SpectralPoint& p = points[i];
    auto num = [](double v) { return std::isfinite(v) ? format_double(v) : std::string("null"); };
    os << (i ? ",\n " : "\n ") << "{\"lambda\": " << num(p.pt.lambda) << ", \"mu\": " << num(p.pt.mu)
       << ", \"x\": " << num(p.pt.x) << ", \"E\": " << num(p.pt.energy())
       << ", \"kind\": " << nlohmann::json(to_string(p.kind.kind)).dump()
       << ", \"degeneracy\": " << p.kind.degeneracy
       << ", \"residual\": " << num(p.condition_residual)
       << ", \"oracle_delta\": " << (p.oracle_delta ? num(*p.oracle_delta) : "null") << "}";
  }
  os << (points.empty() ? "]\n" : "\n]\n");
}

void write_points(std::ostream& os, const std::vector<SpectralPoint>& points, Format f) {
  if (f == Format::JSON) {
    write_points_json(os, points);
  } else {
    write_points_csv(os, points);
  }
}

std::vector<std::string> write_curve_files(const CurveSet& set, const std::filesystem::path& dir,
                                           const std::string& stem) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < set.curves.size(); ++i) {
    const Curve& c = set.curves[i];
    char name[128];
    std::snprintf(name, sizeof name, "%s_%03zu.dat", stem.c_str(), i);
    std::ofstream f = open_out(dir / name);
    f << "# " << to_string(c.kind) << ' ' << c.label << (c.closed ? " closed" : "") << '\n';
    for (const contour::Point& p : c.points) f << format_double(p.x) << ' ' << format_double(p.y) << '\n';
    names.emplace_back(name);
  }
  return names;
}

void write_gnuplot_script(const std::filesystem::path& script, const std::vector<PlotLayer>& layers,
                          const PlotFrame& frame) {
  std::ofstream f = open_out(script);
  f << "# gnuplot " << script.filename().string() << "\n";
  f << "set title " << nlohmann::json(frame.title).dump() << "\n";
  f << "set xlabel " << nlohmann::json(frame.xlabel).dump() << "\n";
  f << "set ylabel " << nlohmann::json(frame.ylabel).dump() << "\n";
  if (frame.xmin != frame.xmax) {
    f << "set xrange [" << format_double(frame.xmin) << ':' << format_double(frame.xmax) << "]\n";
  }
  if (frame.ymin != frame.ymax) {
    f << "set yrange [" << format_double(frame.ymin) << ':' << format_double(frame.ymax) << "]\n";
  }
  f << "set key outside\n";
  std::vector<std::string> items;
  for (const PlotLayer& layer : layers) {
    for (std::size_t i = 0; i < layer.files.size() && i < layer.set->curves.size(); ++i) {
      const Curve& c = layer.set->curves[i];
      if (c.points.empty()) continue;
      items.push_back("'" + layer.files[i] + "' using 1:2 " + style(c, layer.dashed));
    }
  }
  if (items.empty()) {
    f << "# no curves in the window\n";
    return;
  }
  f << "plot \\\n";
  for (std::size_t i = 0; i < items.size(); ++i) {
    f << "  " << items[i] << (i + 1 < items.size() ? ", \\\n" : "\n");
  }
}

std::vector<std::string> write_curve_bundle(const CurveSet& set, const std::filesystem::path& dir,
                                            const std::string& stem, const PlotFrame& frame,
                                            bool dashed) {
  std::vector<std::string> files = write_curve_files(set, dir, stem);
  write_gnuplot_script(dir / (stem + ".gp"), {{&set, files, dashed}}, frame);
  return files;
}

}  // namespace rabi::io
