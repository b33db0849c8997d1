#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "rabi/acceptance.hpp"
#include "rabi/error.hpp"
#include "rabi/output.hpp"

namespace rabi::cli {

namespace {

double to_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::size_t to_count(const std::string& s) {
  const double v = to_number(s);
  if (v < 0.0 || v != std::floor(v)) throw std::invalid_argument("not a count: '" + s + "'");
  return static_cast<std::size_t>(v);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void set_field(ScanConfig& c, const std::string& key, const std::string& value) {
  if (key == "grid_step") c.grid_step = to_number(value);
  else if (key == "lambda_step") c.lambda_step = to_number(value);
  else if (key == "x_tol") c.x_tol = to_number(value);
  else if (key == "root_tol") c.root_tol = to_number(value);
  else if (key == "eps_int") c.eps_int = to_number(value);
  else if (key == "chain_gate") c.chain_gate = to_number(value);
  else if (key == "max_roots") c.max_roots = to_count(value);
  else if (key == "max_halvings") c.max_halvings = static_cast<int>(to_count(value));
  else if (key == "trace_nx") c.trace_nx = to_count(value);
  else if (key == "trace_ny") c.trace_ny = to_count(value);
  else if (key == "threads") c.threads = std::min(c.threads, std::max<std::size_t>(1, to_count(value)));
  else if (key == "oracle_truncation") c.oracle_truncation = to_count(value);
  else if (key == "attach_oracle") c.attach_oracle = value == "true" || value == "1";
  else if (key == "refiner") {
    if (value == "bisection") c.bracket_refiner = roots::Refiner::Bisection;
    else if (value == "brent") c.bracket_refiner = roots::Refiner::BrentLike;
    else throw std::invalid_argument("refiner must be bisection or brent");
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string config_path;
  ScanConfig cfg;

  void load() {
    if (!config_path.empty()) cfg = read_config(config_path, cfg);
    try {
      cfg.validate();
    } catch (const Error& e) {
      throw std::invalid_argument(e.what());
    }
  }
};

int cmd_spectrum(Context& ctx, double lambda, double mu, const std::string& x_range,
                 const std::string& format, const std::string& out_path, bool no_oracle) {
  const Window xr = parse_range(x_range);
  ctx.load();
  ctx.cfg.attach_oracle = !no_oracle;
  const ScanResult r = scan_spectrum(lambda, mu, xr.lo, xr.hi, ctx.cfg);
  const io::Format f = format == "json" ? io::Format::JSON : io::Format::CSV;
  if (out_path.empty() || out_path == "-") {
    io::write_points(ctx.out, r.points, f);
  } else {
    std::ofstream file(out_path);
    if (!file) throw std::invalid_argument("cannot write " + out_path);
    io::write_points(file, r.points, f);
  }
  if (r.grid_too_coarse > 0) {
    ctx.err << "warning: grid step halved " << r.grid_too_coarse << " time(s) to "
            << io::format_double(r.final_grid_step) << "\n";
  }
  if (r.not_converged) {
    ctx.err << "error: series or oracle did not converge somewhere in the scan\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int cmd_trace(Context& ctx, int judd_n, int f_n, double wronskian_x, const std::string& window,
              const std::string& out_dir) {
  const int chosen = (judd_n >= 0) + (f_n >= 0) + !std::isnan(wronskian_x);
  if (chosen != 1) throw std::invalid_argument("give exactly one of --judd, --f, --wronskian");
  if (judd_n == 0) throw std::invalid_argument("--judd needs n >= 1");
  const auto [lw, mw] = parse_window(window);
  ctx.load();
  LevelCondition cond = judd_n >= 0 ? LevelCondition::judd(judd_n)
                        : f_n >= 0  ? LevelCondition::new_state(f_n)
                                    : LevelCondition::wronskian(wronskian_x);
  const CurveSet set = trace_level_set(cond, lw, mw, ctx.cfg);
  const std::string stem = judd_n >= 0 ? "judd" + std::to_string(judd_n)
                           : f_n >= 0  ? "f" + std::to_string(f_n)
                                       : "wronskian";
  io::PlotFrame frame{set.label, "lambda", "mu", lw.lo, lw.hi, mw.lo, mw.hi};
  io::write_curve_bundle(set, out_dir, stem, frame, judd_n >= 0);
  ctx.out << set.label << ": " << set.curves.size() << " curves";
  if (set.masked_cells) ctx.out << ", " << set.masked_cells << " masked cells";
  ctx.out << " -> " << (std::filesystem::path(out_dir) / (stem + ".gp")).string() << "\n";
  return kExitOk;
}

void report_points(std::ostream& os, const CurveSet& set, CurveKind k, const char* what) {
  for (const Curve& c : set.curves) {
    if (c.kind == k) os << what << ": " << c.points.size() << "\n";
  }
}

int cmd_figure(Context& ctx, const std::string& name, const std::string& out_dir_arg) {
  ctx.load();
  const std::filesystem::path dir = out_dir_arg.empty() ? std::filesystem::path("figures") / name
                                                        : std::filesystem::path(out_dir_arg);
  if (name == "fig1a") {
    const double x = 2.0 + M_PI;
    const CurveSet s = trace_level_set(LevelCondition::wronskian(x), {0.0, 1.0}, {0.0, 4.0}, ctx.cfg);
    io::write_curve_bundle(s, dir, "fig1a", {"x = 2 + pi", "lambda", "mu", 0.0, 1.0, 0.0, 4.0});
    ctx.out << "fig1a: " << s.curves.size() << " curves\n";
  } else if (name == "fig1b") {
    const CurveSet f = trace_level_set(LevelCondition::new_state(5), {1e-3, 1.2}, {0.0, 8.0}, ctx.cfg);
    const CurveSet j = trace_level_set(LevelCondition::judd(5), {0.0, 1.2}, {0.0, 8.0}, ctx.cfg);
    const auto ff = io::write_curve_files(f, dir, "f5");
    const auto jf = io::write_curve_files(j, dir, "judd5");
    io::write_gnuplot_script(dir / "fig1b.gp", {{&f, ff, false}, {&j, jf, true}},
                             {"F_5 (solid), J_5 (dashed)", "lambda", "mu", 0.0, 1.2, 0.0, 8.0});
    ctx.out << "fig1b: " << f.curves.size() << " F_5 curves, " << j.curves.size() << " J_5 curves\n";
  } else if (name == "fig1c") {
    const CurveSet s = energy_curves(1.0, {0.0, 1.2}, {-2.0, 5.0}, ctx.cfg);
    io::write_curve_bundle(s, dir, "fig1c", {"mu = 1", "lambda", "E", 0.0, 1.2, -2.0, 5.0});
    ctx.out << "fig1c: " << s.count(CurveKind::Level) << " level curves, " << s.chain_breaks
            << " chain breaks\n";
    report_points(ctx.out, s, CurveKind::JuddPoints, "Judd points");
    report_points(ctx.out, s, CurveKind::NewIntegerPoints, "new integer points");
  } else if (name == "fig2") {
    EnergyCurveOptions opts;
    opts.half_baselines = true;
    const CurveSet s = energy_curves(3.75, {0.0, 1.2}, {-2.0, 6.0}, ctx.cfg, opts);
    io::write_curve_bundle(s, dir, "fig2", {"mu = 3.75", "lambda", "E", 0.0, 1.2, -2.0, 6.0});
    const Window lw{0.806, 0.817}, ew{3.835, 3.850};
    const CurveSet inset = local_energy_curves(3.75, lw, ew, 1e-4, 2e-4, ctx.cfg);
    io::write_curve_bundle(inset, dir, "fig2_inset", {"mu = 3.75 inset", "lambda", "E", lw.lo, lw.hi, ew.lo, ew.hi});
    const GapResult g = min_gap(inset, lw, ew);
    std::ofstream report(dir / "fig2_gap.txt");
    report << "lambda_star " << io::format_double(g.lambda_star) << "\ngap " << io::format_double(g.gap) << "\n";
    ctx.out << "fig2: " << s.count(CurveKind::Level) << " level curves; inset gap "
            << io::format_double(g.gap) << " at lambda " << io::format_double(g.lambda_star) << "\n";
  }
  return kExitOk;
}

int cmd_verify(Context& ctx, const std::string& suite) {
  const auto results = acceptance::run_suite(suite == "full" ? acceptance::Suite::Full : acceptance::Suite::Quick);
  acceptance::print_report(ctx.out, results);
  const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  return ok ? kExitOk : kExitNumeric;
}

}  // namespace

ScanConfig read_config(const std::filesystem::path& path, ScanConfig base) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot read config " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    set_field(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

Window parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("range must look like lo:hi");
  const Window w{to_number(text.substr(0, colon)), to_number(text.substr(colon + 1))};
  if (!(w.lo < w.hi)) throw std::invalid_argument("empty range '" + text + "'");
  return w;
}

std::pair<Window, Window> parse_window(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw std::invalid_argument("window must look like l0:l1xm0:m1");
  return {parse_range(text.substr(0, x)), parse_range(text.substr(x + 1))};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum Rabi model spectrum from confluent Heun conditions", "rabi_spectra"};
  app.require_subcommand(1);
  Context ctx{out, err, {}, {}};
  app.add_option("--config", ctx.config_path, "key=value file overriding scan defaults");

  double lambda = 0.0, mu = 0.0;
  std::string x_range, format = "csv", out_path;
  bool no_oracle = false;
  auto* spectrum = app.add_subcommand("spectrum", "spectrum points in an x range at fixed (lambda, mu)");
  spectrum->add_option("--lambda", lambda)->required();
  spectrum->add_option("--mu", mu)->required();
  spectrum->add_option("--x", x_range, "lo:hi")->required();
  spectrum->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  spectrum->add_option("--out", out_path, "output file, stdout by default");
  spectrum->add_flag("--no-oracle", no_oracle, "skip the Fock-basis comparison column");

  int judd_n = -1, f_n = -1;
  double wronskian_x = std::nan("");
  std::string window, trace_dir = "trace";
  auto* trace = app.add_subcommand("trace", "zero set of a condition in the (lambda, mu) plane");
  trace->add_option("--judd", judd_n, "Judd condition of order n");
  trace->add_option("--f", f_n, "new-state condition F_n");
  trace->add_option("--wronskian", wronskian_x, "Wronskian at fixed non-integer x");
  trace->add_option("--window", window, "l0:l1xm0:m1")->required();
  trace->add_option("--out-dir", trace_dir);

  std::string figure_name, figure_dir;
  auto* figure = app.add_subcommand("figure", "canned figure bundles");
  figure->add_option("name", figure_name)->required()->check(CLI::IsMember({"fig1a", "fig1b", "fig1c", "fig2"}));
  figure->add_option("--out-dir", figure_dir);

  std::string suite;
  auto* verify = app.add_subcommand("verify", "acceptance checks");
  verify->add_option("suite", suite)->required()->check(CLI::IsMember({"quick", "full"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (spectrum->parsed()) return cmd_spectrum(ctx, lambda, mu, x_range, format, out_path, no_oracle);
    if (trace->parsed()) return cmd_trace(ctx, judd_n, f_n, wronskian_x, window, trace_dir);
    if (figure->parsed()) return cmd_figure(ctx, figure_name, figure_dir);
    if (verify->parsed()) return cmd_verify(ctx, suite);
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::IntegerX ? kExitUsage : kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace rabi::cli
