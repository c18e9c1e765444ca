#pragma once

// Experiment harness behind the CLI: single runs, the convergence figures,
// parameter sweeps, and their CSV / SVG outputs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iimhhl/error.hpp"
#include "iimhhl/hhl.hpp"
#include "iimhhl/numerics.hpp"
#include "iimhhl/problems.hpp"
#include "iimhhl/refine.hpp"

namespace iimhhl::experiment {

/// Either a generated benchmark problem or an explicit instance.
struct ProblemSource {
  double kappa = 10.0;
  int solution = 1;
  std::optional<ProblemInstance> instance;

  ProblemInstance materialize(std::uint64_t seed) const { return instance ? *instance : make_instance(kappa, solution, seed); }
};

struct ExperimentSpec {
  std::string name;
  ProblemSource problem;
  RefinementConfig refinement;
  std::size_t repeats = 1;
  std::filesystem::path outputs = ".";
};

inline bool filesystem_safe(const std::string& name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

inline void validate(const ExperimentSpec& spec) {
  if (!filesystem_safe(spec.name)) throw Error(ErrorCode::SpecParseError, "experiment name must be nonempty and filesystem-safe");
  if (spec.repeats < 1) throw Error(ErrorCode::SpecParseError, "repeats must be >= 1");
  if (spec.refinement.max_iterations < 1) throw Error(ErrorCode::SpecParseError, "iterations must be >= 1");
}

/// Shortest round-trip decimal form; keeps CSV output byte-stable.
inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Single runs

struct RunOutcome {
  ProblemInstance problem;
  RefinementResult result;
};

/// One refinement run on the problem drawn for `seed` (the seed also drives sampling).
inline RunOutcome run_refinement(const ProblemSource& source, RefinementConfig config, std::uint64_t seed) {
  ProblemInstance problem = source.materialize(seed);
  config.hhl.seed = seed;
  std::optional<std::span<const Complex>> truth;
  if (problem.x_true) truth = std::span<const Complex>(*problem.x_true);
  RefinementResult result = run_iimhhl(problem.A, problem.b, config, truth);
  return {std::move(problem), std::move(result)};
}

/// A single HHL solve reported as a one-row trace.
inline RunOutcome run_single_hhl(const ProblemSource& source, HHLConfig config, std::uint64_t seed) {
  ProblemInstance problem = source.materialize(seed);
  config.seed = seed;
  HHLSolution s = run_hhl(problem.A, problem.b, config);
  IterationRecord rec;
  rec.y = s.x;
  rec.shift.assign(s.x.size(), Complex{});
  rec.correction = s.x;
  rec.x = s.x;
  rec.residual_norm = norm2(residual(problem.A, s.x, problem.b));
  rec.rel_error = relative_error(s.x, problem.x_true ? *problem.x_true : solve_exact(problem.A, problem.b));
  rec.accepted = s.accepted;
  rec.total_executions = s.total_executions;
  rec.cumulative_measurements = s.accepted;
  rec.f1 = s.f1;
  rec.f2 = s.f2;
  RefinementResult result{s.x, {{rec}}};
  return {std::move(problem), std::move(result)};
}

inline constexpr const char* kTraceHeader =
    "iteration,rel_error,residual_norm,accepted_shots,total_executions,cumulative_measurements,f1,f2";

inline std::string trace_csv(const IterationTrace& trace) {
  std::ostringstream out;
  out << kTraceHeader << '\n';
  for (const auto& r : trace.records) {
    out << r.m << ',' << format_number(r.rel_error) << ',' << format_number(r.residual_norm) << ',' << r.accepted << ','
        << r.total_executions << ',' << r.cumulative_measurements << ',' << format_number(r.f1) << ','
        << format_number(r.f2) << '\n';
  }
  return out.str();
}

inline nlohmann::json solution_json(const RunOutcome& run, const RefinementConfig& config, std::uint64_t seed) {
  nlohmann::json j;
  j["problem"] = run.problem.label;
  j["seed"] = seed;
  j["x"] = to_json_value(run.result.x);
  j["x_true"] = run.problem.x_true ? to_json_value(*run.problem.x_true) : nlohmann::json(nullptr);
  const auto& last = run.result.trace.records.back();
  j["iterations"] = run.result.trace.records.size();
  j["final_rel_error"] = last.rel_error;
  j["final_residual_norm"] = last.residual_norm;
  j["cumulative_measurements"] = last.cumulative_measurements;
  j["p"] = config.hhl.p;
  j["t"] = evolution_time(config.hhl);
  j["C"] = rotation_constant(config.hhl);
  j["shots"] = config.hhl.shots;
  j["shift"] = std::string(to_string(config.shift));
  j["mode"] = config.hhl.readout_mode == ReadoutMode::Statevector ? "statevector" : "sampled";
  j["evolution"] = config.hhl.evolution_mode == EvolutionMode::Exact ? "exact" : "trotter";
  j["slices"] = config.hhl.slices;
  return j;
}

// ---------------------------------------------------------------------------
// Long-format figure data

struct FigureRow {
  std::string figure;
  std::string strategy;  // series name
  std::string seed;      // seed number, or "median"
  std::size_t iteration = 0;
  double rel_error = 0.0;
  std::uint64_t cumulative_measurements = 0;
};

inline constexpr const char* kFigureHeader = "figure,strategy,seed,iteration,rel_error,cumulative_measurements";

inline std::string figure_csv(const std::vector<FigureRow>& rows) {
  std::ostringstream out;
  out << kFigureHeader << '\n';
  for (const auto& r : rows) {
    out << r.figure << ',' << r.strategy << ',' << r.seed << ',' << r.iteration << ',' << format_number(r.rel_error)
        << ',' << r.cumulative_measurements << '\n';
  }
  return out.str();
}

inline double median(std::vector<double> v) {
  if (v.empty()) return NAN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct FigureResult {
  std::string id;
  std::string title;
  std::string x_label;
  bool log_x = false;
  std::vector<FigureRow> rows;     // per-seed and median rows
  std::vector<Series> series;      // median curves for plotting
  std::optional<double> resolution;  // 2^-p guide line
};

/// Per-seed traces of one series -> per-seed rows, median rows and the median curve.
inline void add_series(FigureResult& fig, const std::string& name, const std::vector<std::uint64_t>& seeds,
                       const std::vector<IterationTrace>& traces, bool x_is_measurements) {
  std::size_t length = 0;
  for (const auto& t : traces) length = std::max(length, t.records.size());
  Series s{name, {}, {}, false};
  for (std::size_t i = 0; i < traces.size(); ++i)
    for (const auto& r : traces[i].records)
      fig.rows.push_back({fig.id, name, std::to_string(seeds[i]), r.m, r.rel_error, r.cumulative_measurements});
  for (std::size_t m = 0; m < length; ++m) {
    std::vector<double> errs, meas;
    for (const auto& t : traces) {
      if (m >= t.records.size()) continue;
      errs.push_back(t.records[m].rel_error);
      meas.push_back(static_cast<double>(t.records[m].cumulative_measurements));
    }
    const double e = median(errs);
    const double c = median(meas);
    fig.rows.push_back({fig.id, name, "median", m, e, static_cast<std::uint64_t>(std::llround(c))});
    s.x.push_back(x_is_measurements ? c : static_cast<double>(m));
    s.y.push_back(e);
  }
  fig.series.push_back(std::move(s));
}

struct FigureOptions {
  std::size_t repeats = 5;
  std::uint64_t base_seed = 0;
  std::size_t iterations = 20;
  EvolutionMode evolution = EvolutionMode::Exact;
  unsigned slices = 6;
};

inline const std::set<std::string>& figure_ids() {
  static const std::set<std::string> ids{"f1", "f2", "f3", "f4", "f5", "f6", "f7"};
  return ids;
}

inline std::vector<std::uint64_t> seed_list(const FigureOptions& opt) {
  std::vector<std::uint64_t> seeds(opt.repeats);
  for (std::size_t i = 0; i < opt.repeats; ++i) seeds[i] = opt.base_seed + i;
  return seeds;
}

inline RefinementConfig figure_config(const FigureOptions& opt, unsigned p, std::uint64_t shots, ShiftStrategy shift,
                                      ReadoutMode mode) {
  RefinementConfig c;
  c.max_iterations = opt.iterations;
  c.shift = shift;
  c.hhl.p = p;
  c.hhl.shots = shots;
  c.hhl.readout_mode = mode;
  c.hhl.evolution_mode = opt.evolution;
  c.hhl.slices = opt.slices;
  return c;
}

inline std::vector<IterationTrace> run_seeds(const ProblemSource& src, const RefinementConfig& config,
                                             const std::vector<std::uint64_t>& seeds) {
  std::vector<IterationTrace> traces;
  for (auto s : seeds) traces.push_back(run_refinement(src, config, s).result.trace);
  return traces;
}

/// Resolution sweep: single HHL solves at p=9 against shot count, with the
/// statevector error as the baseline.
inline FigureResult figure_resolution(const FigureOptions& opt) {
  FigureResult fig{"f1", "kappa=10, x1, p=9: single HHL vs measurements", "accepted measurements", true, {}, {}, {}};
  const unsigned p = 9;
  fig.resolution = std::ldexp(1.0, -static_cast<int>(p));
  const ProblemSource src{10.0, 1, std::nullopt};
  const auto seeds = seed_list(opt);
  const std::vector<std::uint64_t> shot_grid{100, 1000, 10000, 100000, 1000000};

  HHLConfig base;
  base.p = p;
  base.evolution_mode = opt.evolution;
  base.slices = opt.slices;

  std::vector<double> sv_errors;
  for (auto s : seeds) sv_errors.push_back(run_single_hhl(src, base, s).result.trace.records[0].rel_error);
  const double sv_median = median(sv_errors);

  Series sampled{"sampled", {}, {}, false};
  Series statevector{"statevector", {}, {}, true};
  for (std::size_t k = 0; k < shot_grid.size(); ++k) {
    HHLConfig c = base;
    c.readout_mode = ReadoutMode::Sampled;
    c.shots = shot_grid[k];
    std::vector<double> errs;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      const double e = run_single_hhl(src, c, seeds[i]).result.trace.records[0].rel_error;
      errs.push_back(e);
      fig.rows.push_back({fig.id, "sampled", std::to_string(seeds[i]), k, e, shot_grid[k]});
      fig.rows.push_back({fig.id, "statevector", std::to_string(seeds[i]), k, sv_errors[i], shot_grid[k]});
    }
    const double m = median(errs);
    fig.rows.push_back({fig.id, "sampled", "median", k, m, shot_grid[k]});
    fig.rows.push_back({fig.id, "statevector", "median", k, sv_median, shot_grid[k]});
    sampled.x.push_back(static_cast<double>(shot_grid[k]));
    sampled.y.push_back(m);
    statevector.x.push_back(static_cast<double>(shot_grid[k]));
    statevector.y.push_back(sv_median);
  }
  fig.series = {std::move(sampled), std::move(statevector)};
  return fig;
}

/// Five shift strategies plus the statevector curve on one benchmark problem.
inline FigureResult figure_strategies(const std::string& id, const FigureOptions& opt, double kappa, int solution,
                                      unsigned p, std::uint64_t shots, std::optional<ComplexVector> pre_shift) {
  FigureResult fig;
  fig.id = id;
  fig.title = "kappa=" + format_number(kappa) + ", x" + std::to_string(solution) + ", p=" + std::to_string(p) + ", " +
              std::to_string(shots) + " measurements/iteration" + (pre_shift ? ", pre-shifted" : "");
  fig.x_label = "iteration";
  fig.resolution = std::ldexp(1.0, -static_cast<int>(p));
  const ProblemSource src{kappa, solution, std::nullopt};
  const auto seeds = seed_list(opt);
  for (auto strategy : kAllShiftStrategies) {
    RefinementConfig c = figure_config(opt, p, shots, strategy, ReadoutMode::Sampled);
    c.pre_shift = pre_shift;
    add_series(fig, std::string(to_string(strategy)), seeds, run_seeds(src, c, seeds), false);
  }
  RefinementConfig sv = figure_config(opt, p, shots, ShiftStrategy::None, ReadoutMode::Statevector);
  sv.pre_shift = pre_shift;
  add_series(fig, "statevector", seeds, run_seeds(src, sv, seeds), false);
  return fig;
}

/// Error against cumulative measurements for 1000- and 10000-shot iterations.
inline FigureResult figure_budget(const FigureOptions& opt) {
  FigureResult fig;
  fig.id = "f7";
  fig.title = "kappa=10, x1, p=4, abs-sqrt-ratio: error vs total measurements";
  fig.x_label = "total accepted measurements";
  fig.log_x = true;
  fig.resolution = std::ldexp(1.0, -4);
  const ProblemSource src{10.0, 1, std::nullopt};
  const auto seeds = seed_list(opt);
  for (std::uint64_t shots : {std::uint64_t{1000}, std::uint64_t{10000}}) {
    const RefinementConfig c = figure_config(opt, 4, shots, ShiftStrategy::AbsSqrtRatio, ReadoutMode::Sampled);
    add_series(fig, "shots-" + std::to_string(shots), seeds, run_seeds(src, c, seeds), true);
  }
  return fig;
}

inline FigureResult run_figure(const std::string& id, const FigureOptions& opt) {
  if (!figure_ids().count(id)) throw Error(ErrorCode::SpecParseError, "unknown figure id '" + id + "'");
  if (opt.repeats < 1) throw Error(ErrorCode::SpecParseError, "repeats must be >= 1");
  if (id == "f1") return figure_resolution(opt);
  if (id == "f2") return figure_strategies(id, opt, 10.0, 1, 4, 1000, std::nullopt);
  if (id == "f3") return figure_strategies(id, opt, 10.0, 2, 4, 1000, std::nullopt);
  if (id == "f4") return figure_strategies(id, opt, 100.0, 1, 7, 10000, std::nullopt);
  if (id == "f5") return figure_strategies(id, opt, 100.0, 2, 7, 10000, std::nullopt);
  if (id == "f6") return figure_strategies(id, opt, 10.0, 2, 4, 1000, ComplexVector{2.0, 2.0, 2.0, 2.0});
  return figure_budget(opt);
}

// ---------------------------------------------------------------------------
// SVG: log-scale line plot with a dashed resolution guide.

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"};
  return colors[i % 7];
}

}  // namespace detail

inline constexpr double kPlotFloor = 1e-17;

inline std::string render_svg(const FigureResult& fig) {
  const double width = 720, height = 480, left = 80, right = 190, top = 40, bottom = 60;
  const double plot_w = width - left - right, plot_h = height - top - bottom;

  auto ty = [](double v) { return std::log10(std::max(v, kPlotFloor)); };
  auto tx = [&](double v) { return fig.log_x ? std::log10(std::max(v, 1.0)) : v; };

  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : fig.series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      ymin = std::min(ymin, ty(s.y[i]));
      ymax = std::max(ymax, ty(s.y[i]));
    }
  if (fig.resolution) {
    ymin = std::min(ymin, ty(*fig.resolution));
    ymax = std::max(ymax, ty(*fig.resolution));
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = -1, ymax = 0;
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (ymax <= ymin) ymax = ymin + 1;
  if (xmax <= xmin) xmax = xmin + 1;

  auto px = [&](double v) { return left + (tx(v) - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double v) { return top + (ymax - ty(v)) / (ymax - ymin) * plot_h; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" viewBox=\"0 0 "
      << width << ' ' << height << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">"
      << detail::xml_escape(fig.id + ": " + fig.title) << "</text>\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double d = ymin; d <= ymax + 1e-9; d += 1.0) {
    const double y = top + (ymax - d) / (ymax - ymin) * plot_h;
    svg << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + plot_w << "\" y2=\"" << y
        << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << y + 4
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">1e" << static_cast<int>(d) << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 20
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" << detail::xml_escape(fig.x_label)
      << (fig.log_x ? " (log)" : "") << "</text>\n";
  svg << "<text x=\"18\" y=\"" << top + plot_h / 2 << "\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 18 " << top + plot_h / 2 << ")\" text-anchor=\"middle\">relative error (log)</text>\n";

  std::size_t legend_row = 0;
  auto legend = [&](const std::string& name, const char* color, bool dashed) {
    const double y = top + 16 + 18.0 * legend_row++;
    svg << "<line x1=\"" << left + plot_w + 12 << "\" y1=\"" << y << "\" x2=\"" << left + plot_w + 36 << "\" y2=\"" << y
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"" << (dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    svg << "<text x=\"" << left + plot_w + 42 << "\" y=\"" << y + 4 << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << detail::xml_escape(name) << "</text>\n";
  };

  for (std::size_t i = 0; i < fig.series.size(); ++i) {
    const auto& s = fig.series[i];
    const char* color = detail::palette(i);
    svg << "<polyline data-series=\"" << detail::xml_escape(s.name) << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
    for (std::size_t k = 0; k < s.x.size(); ++k) svg << (k ? " " : "") << px(s.x[k]) << ',' << py(s.y[k]);
    svg << "\"/>\n";
    for (std::size_t k = 0; k < s.x.size(); ++k)
      svg << "<circle cx=\"" << px(s.x[k]) << "\" cy=\"" << py(s.y[k]) << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    legend(s.name, color, s.dashed);
  }
  if (fig.resolution) {
    const double y = py(*fig.resolution);
    svg << "<line data-series=\"resolution\" x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << y << "\" stroke=\"black\" stroke-width=\"1.5\" stroke-dasharray=\"8,5\"/>\n";
    legend("resolution 2^-p", "black", true);
  }
  svg << "</svg>\n";
  return svg.str();
}

// ---------------------------------------------------------------------------
// Output files

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::SpecParseError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::SpecParseError, "write failed for " + path.string());
}

/// Writes every file or none: on failure the already written ones are removed.
class AtomicOutputs {
 public:
  void add(std::filesystem::path path, std::string text) { pending_.emplace_back(std::move(path), std::move(text)); }

  void commit() {
    std::vector<std::filesystem::path> written;
    try {
      for (const auto& [path, text] : pending_) {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        const auto tmp = std::filesystem::path(path.string() + ".partial");
        write_text(tmp, text);
        written.push_back(tmp);
      }
      for (const auto& [path, text] : pending_) std::filesystem::rename(path.string() + ".partial", path);
    } catch (...) {
      std::error_code ec;
      for (const auto& p : written) std::filesystem::remove(p, ec);
      throw;
    }
  }

 private:
  std::vector<std::pair<std::filesystem::path, std::string>> pending_;
};

// ---------------------------------------------------------------------------
// Sweeps

struct SweepSpec {
  std::string name = "sweep";
  std::vector<double> kappa;
  std::vector<int> solution;
  std::vector<unsigned> p;
  std::vector<std::uint64_t> shots;
  std::vector<ShiftStrategy> strategy;
  std::size_t repeats = 1;
  std::uint64_t seed = 0;
  std::size_t iterations = 20;
  ReadoutMode mode = ReadoutMode::Sampled;
  EvolutionMode evolution = EvolutionMode::Exact;
  unsigned slices = 6;
  bool refine = true;
};

namespace detail {

inline std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <typename T, typename Check>
std::vector<T> list_field(const nlohmann::json& j, const char* field, const char* expect, Check&& check) {
  if (!j.contains(field)) throw Error(ErrorCode::SpecParseError, std::string("field '") + field + "' missing");
  const auto& v = j.at(field);
  if (!v.is_array()) throw Error(ErrorCode::SpecParseError, std::string("field '") + field + "': expected array of " + expect);
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!check(v[i])) {
      throw Error(ErrorCode::SpecParseError,
                  std::string("field '") + field + "[" + std::to_string(i) + "]': expected " + expect);
    }
    out.push_back(v[i].template get<T>());
  }
  return out;
}

}  // namespace detail

inline SweepSpec parse_sweep_spec(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SpecParseError, detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::SpecParseError, "line 1, column 1: sweep spec must be a JSON object");

  auto positive_int = [](const nlohmann::json& v) { return v.is_number_integer() && v.get<long long>() >= 1; };
  SweepSpec s;
  s.kappa = detail::list_field<double>(j, "kappa", "numbers >= 1",
                                       [](const nlohmann::json& v) { return v.is_number() && v.get<double>() >= 1.0; });
  s.solution = detail::list_field<int>(j, "solution", "1 or 2", [](const nlohmann::json& v) {
    return v.is_number_integer() && (v.get<int>() == 1 || v.get<int>() == 2);
  });
  s.p = detail::list_field<unsigned>(j, "p", "integers in [1, 12]", [](const nlohmann::json& v) {
    return v.is_number_integer() && v.get<long long>() >= 1 && v.get<long long>() <= 12;
  });
  s.shots = detail::list_field<std::uint64_t>(j, "shots", "positive integers", positive_int);
  if (!j.contains("strategy")) throw Error(ErrorCode::SpecParseError, "field 'strategy' missing");
  if (!j["strategy"].is_array()) throw Error(ErrorCode::SpecParseError, "field 'strategy': expected array of strategy names");
  for (std::size_t i = 0; i < j["strategy"].size(); ++i) {
    const auto& v = j["strategy"][i];
    std::optional<ShiftStrategy> parsed;
    if (v.is_string()) parsed = parse_shift_strategy(v.get<std::string>());
    if (!parsed) {
      throw Error(ErrorCode::SpecParseError, "field 'strategy[" + std::to_string(i) +
                                                 "]': expected one of none, uniform-ratio, abs-tenth, abs-ratio, abs-sqrt-ratio");
    }
    s.strategy.push_back(*parsed);
  }

  auto int_field = [&](const char* field, auto& dst, long long lo) {
    if (!j.contains(field)) return;
    const auto& v = j[field];
    if (!v.is_number_integer() || v.get<long long>() < lo) {
      throw Error(ErrorCode::SpecParseError, std::string("field '") + field + "': expected integer >= " + std::to_string(lo));
    }
    dst = static_cast<std::remove_reference_t<decltype(dst)>>(v.get<long long>());
  };
  int_field("repeats", s.repeats, 1);
  int_field("seed", s.seed, 0);
  int_field("iters", s.iterations, 1);
  int_field("slices", s.slices, 1);
  if (j.contains("name")) {
    if (!j["name"].is_string() || !filesystem_safe(j["name"].get<std::string>())) {
      throw Error(ErrorCode::SpecParseError, "field 'name': expected a nonempty filesystem-safe string");
    }
    s.name = j["name"].get<std::string>();
  }
  if (j.contains("mode")) {
    const auto m = j["mode"].is_string() ? j["mode"].get<std::string>() : "";
    if (m == "statevector") s.mode = ReadoutMode::Statevector;
    else if (m == "sampled") s.mode = ReadoutMode::Sampled;
    else throw Error(ErrorCode::SpecParseError, "field 'mode': expected \"statevector\" or \"sampled\"");
  }
  if (j.contains("evolution")) {
    const auto m = j["evolution"].is_string() ? j["evolution"].get<std::string>() : "";
    if (m == "exact") s.evolution = EvolutionMode::Exact;
    else if (m == "trotter") s.evolution = EvolutionMode::Trotter;
    else throw Error(ErrorCode::SpecParseError, "field 'evolution': expected \"exact\" or \"trotter\"");
  }
  if (j.contains("refine")) {
    if (!j["refine"].is_boolean()) throw Error(ErrorCode::SpecParseError, "field 'refine': expected boolean");
    s.refine = j["refine"].get<bool>();
  }
  return s;
}

inline constexpr const char* kSweepHeader =
    "kappa,solution,p,shots,strategy,seed,iteration,rel_error,residual_norm,accepted_shots,total_executions,"
    "cumulative_measurements";

/// Cartesian product kappa x solution x p x shots x strategy x seeds, one
/// long-format CSV. An empty axis gives a header-only CSV.
inline std::string run_sweep(const SweepSpec& spec) {
  std::ostringstream out;
  out << kSweepHeader << '\n';
  for (double kappa : spec.kappa)
    for (int solution : spec.solution)
      for (unsigned p : spec.p)
        for (std::uint64_t shots : spec.shots)
          for (ShiftStrategy strategy : spec.strategy)
            for (std::size_t r = 0; r < spec.repeats; ++r) {
              const std::uint64_t seed = spec.seed + r;
              const ProblemSource src{kappa, solution, std::nullopt};
              RefinementConfig c;
              c.max_iterations = spec.iterations;
              c.shift = strategy;
              c.hhl.p = p;
              c.hhl.shots = shots;
              c.hhl.readout_mode = spec.mode;
              c.hhl.evolution_mode = spec.evolution;
              c.hhl.slices = spec.slices;
              const RunOutcome run = spec.refine ? run_refinement(src, c, seed) : run_single_hhl(src, c.hhl, seed);
              for (const auto& rec : run.result.trace.records) {
                out << format_number(kappa) << ',' << solution << ',' << p << ',' << shots << ','
                    << to_string(strategy) << ',' << seed << ',' << rec.m << ',' << format_number(rec.rel_error) << ','
                    << format_number(rec.residual_norm) << ',' << rec.accepted << ',' << rec.total_executions << ','
                    << rec.cumulative_measurements << '\n';
              }
            }
  return out.str();
}

}  // namespace iimhhl::experiment
