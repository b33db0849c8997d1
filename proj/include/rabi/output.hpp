#pragma once
// Text serialization of spectrum points and curve sets, plus gnuplot scripts.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rabi/solver.hpp"

namespace rabi::io {

enum class Format { CSV, JSON };

/// "%.17g"; nan and inf spelled out.
std::string format_double(double v);

void write_points_csv(std::ostream& os, const std::vector<SpectralPoint>& points);
void write_points_json(std::ostream& os, const std::vector<SpectralPoint>& points);
void write_points(std::ostream& os, const std::vector<SpectralPoint>& points, Format f);

/// One two-column file per curve: `<stem>_<index>.dat`. Returns the file names.
std::vector<std::string> write_curve_files(const CurveSet& set, const std::filesystem::path& dir,
                                           const std::string& stem);

struct PlotLayer {
  const CurveSet* set = nullptr;
  std::vector<std::string> files;
  bool dashed = false;
};

struct PlotFrame {
  std::string title;
  std::string xlabel = "lambda";
  std::string ylabel;
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;  // autoscale when min == max
};

void write_gnuplot_script(const std::filesystem::path& script, const std::vector<PlotLayer>& layers,
                          const PlotFrame& frame);

/// Writes every curve of `set` under `dir` plus `<stem>.gp`. Returns the file names.
std::vector<std::string> write_curve_bundle(const CurveSet& set, const std::filesystem::path& dir,
                                            const std::string& stem, const PlotFrame& frame,
                                            bool dashed = false);

}  // namespace rabi::io
