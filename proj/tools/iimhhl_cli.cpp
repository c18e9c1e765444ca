// iimhhl: command-line front end.
//
//   iimhhl solve        one refinement run -> trace.csv + solution.json
//   iimhhl figure ID    convergence figure f1..f7 -> CSV + SVG
//   iimhhl sweep FILE   JSON parameter sweep -> long-format CSV
//   iimhhl gen-problem  benchmark problem -> JSON
//
// Exit status: 0 success, 1 solver error, 2 bad flags or spec.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "iimhhl/experiment.hpp"

namespace fs = std::filesystem;
using namespace iimhhl;

namespace {

constexpr int kExitSolver = 1;
constexpr int kExitSpec = 2;

ComplexVector parse_vector_flag(const std::string& text, const char* flag) {
  ComplexVector out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.emplace_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::SpecParseError, std::string(flag) + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw Error(ErrorCode::SpecParseError, std::string(flag) + ": empty vector");
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::SpecParseError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct SolveArgs {
  double kappa = 10.0;
  int solution = 1;
  unsigned p = 4;
  std::uint64_t shots = 1000;
  std::string shift = "none";
  std::size_t iters = 20;
  unsigned slices = 6;
  std::string mode = "sampled";
  std::string evolution = "exact";
  std::uint64_t seed = 0;
  std::string out = ".";
  std::string pre_shift;
  std::optional<double> t;
  std::optional<double> C;
  std::string postselect = "clock-zero";
  std::string problem_file;
  bool identity = false;
  bool no_refine = false;
  bool statevector = false;
};

HHLConfig hhl_config(const SolveArgs& a) {
  HHLConfig c;
  c.p = a.p;
  c.shots = a.shots;
  c.slices = a.slices;
  c.seed = a.seed;
  c.t = a.t;
  c.C = a.C;
  c.readout_mode = (a.statevector || a.mode == "statevector") ? ReadoutMode::Statevector : ReadoutMode::Sampled;
  c.evolution_mode = a.evolution == "trotter" ? EvolutionMode::Trotter : EvolutionMode::Exact;
  c.postselect_clock_zero = a.postselect == "clock-zero";
  return c;
}

int run_solve(const SolveArgs& a) {
  experiment::ProblemSource src{a.kappa, a.solution, std::nullopt};
  if (a.identity) {
    ProblemInstance inst;
    inst.A = ComplexMatrix::identity(4);
    inst.b = {1.0, 2.0, 3.0, 4.0};
    inst.x_true = inst.b;
    inst.label = "identity";
    src.instance = inst;
  } else if (!a.problem_file.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(a.problem_file));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::SpecParseError, a.problem_file + ": " + e.what());
    }
    src.instance = problem_from_json(j);
  }

  RefinementConfig config;
  config.hhl = hhl_config(a);
  config.max_iterations = a.iters;
  config.shift = *parse_shift_strategy(a.shift);
  if (!a.pre_shift.empty()) config.pre_shift = parse_vector_flag(a.pre_shift, "--pre-shift");

  const auto run = a.no_refine ? experiment::run_single_hhl(src, config.hhl, a.seed)
                               : experiment::run_refinement(src, config, a.seed);
  experiment::AtomicOutputs out;
  out.add(fs::path(a.out) / "trace.csv", experiment::trace_csv(run.result.trace));
  out.add(fs::path(a.out) / "solution.json", experiment::solution_json(run, config, a.seed).dump(2) + "\n");
  out.commit();

  const auto& last = run.result.trace.records.back();
  std::cout << run.problem.label << ": " << run.result.trace.records.size() << " iteration(s), rel_error "
            << experiment::format_number(last.rel_error) << ", measurements " << last.cumulative_measurements << '\n';
  return 0;
}

struct FigureArgs {
  std::string id;
  std::size_t repeats = 5;
  std::uint64_t seed = 0;
  std::size_t iters = 20;
  std::string evolution = "exact";
  unsigned slices = 6;
  std::string out = ".";
};

int run_figure(const FigureArgs& a) {
  experiment::FigureOptions opt;
  opt.repeats = a.repeats;
  opt.base_seed = a.seed;
  opt.iterations = a.iters;
  opt.evolution = a.evolution == "trotter" ? EvolutionMode::Trotter : EvolutionMode::Exact;
  opt.slices = a.slices;
  const auto fig = experiment::run_figure(a.id, opt);
  experiment::AtomicOutputs out;
  out.add(fs::path(a.out) / (a.id + ".csv"), experiment::figure_csv(fig.rows));
  out.add(fs::path(a.out) / (a.id + ".svg"), experiment::render_svg(fig));
  out.commit();
  std::cout << a.id << ": " << fig.rows.size() << " rows written to " << a.out << '\n';
  return 0;
}

int run_sweep(const std::string& spec_file, const std::string& out_dir) {
  const auto spec = experiment::parse_sweep_spec(read_file(spec_file));
  const auto csv = experiment::run_sweep(spec);
  experiment::AtomicOutputs out;
  out.add(fs::path(out_dir) / (spec.name + ".csv"), csv);
  out.commit();
  std::cout << spec.name << ": " << std::count(csv.begin(), csv.end(), '\n') - 1 << " rows\n";
  return 0;
}

int run_gen_problem(double kappa, int solution, std::uint64_t seed, const std::string& out_file) {
  const auto text = problem_to_json(make_instance(kappa, solution, seed)).dump(2) + "\n";
  if (out_file.empty() || out_file == "-") {
    std::cout << text;
    return 0;
  }
  experiment::AtomicOutputs out;
  out.add(out_file, text);
  out.commit();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative improvement with simulated HHL as the inner solver"};
  app.require_subcommand(1);

  const std::vector<std::string> shift_names{"none", "uniform-ratio", "abs-tenth", "abs-ratio", "abs-sqrt-ratio"};

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Run one refinement and write trace.csv and solution.json");
  solve->add_option("--kappa", sa.kappa, "Condition number of the benchmark matrix")->check(CLI::Range(1.0, 1e12));
  solve->add_option("--solution", sa.solution, "Reference solution index")->check(CLI::IsMember({1, 2}));
  solve->add_option("--p", sa.p, "Clock qubits")->check(CLI::Range(1u, 12u));
  solve->add_option("--shots", sa.shots, "Accepted measurements per HHL solve")->check(CLI::PositiveNumber);
  solve->add_option("--shift", sa.shift, "Shift strategy")->check(CLI::IsMember(shift_names));
  solve->add_option("--iters", sa.iters, "Refinement iterations")->check(CLI::PositiveNumber);
  solve->add_option("--slices", sa.slices, "Trotter slices")->check(CLI::PositiveNumber);
  solve->add_option("--mode", sa.mode, "Readout")->check(CLI::IsMember({"statevector", "sampled"}));
  solve->add_option("--evolution", sa.evolution, "Hamiltonian simulation")->check(CLI::IsMember({"exact", "trotter"}));
  solve->add_option("--seed", sa.seed, "Problem and sampling seed");
  solve->add_option("--out", sa.out, "Output directory");
  solve->add_option("--pre-shift", sa.pre_shift, "Comma-separated vector s; solves A x' = b + A s");
  solve->add_option("--t", sa.t, "Evolution time")->check(CLI::PositiveNumber);
  solve->add_option("--C", sa.C, "Rotation constant")->check(CLI::PositiveNumber);
  solve->add_option("--postselect", sa.postselect, "Accepted outcomes when sampling")
      ->check(CLI::IsMember({"clock-zero", "ancilla"}));
  solve->add_option("--problem", sa.problem_file, "Problem JSON instead of a generated benchmark");
  solve->add_flag("--identity", sa.identity, "Solve I x = [1,2,3,4]");
  solve->add_flag("--no-refine", sa.no_refine, "Single HHL solve");
  solve->add_flag("--statevector", sa.statevector, "Same as --mode statevector");

  FigureArgs fa;
  auto* figure = app.add_subcommand("figure", "Regenerate a convergence figure as CSV and SVG");
  figure->add_option("id", fa.id, "f1..f7")->required();
  figure->add_option("--repeats,--seeds", fa.repeats, "Seeds per series")->check(CLI::PositiveNumber);
  figure->add_option("--seed", fa.seed, "First seed");
  figure->add_option("--iters", fa.iters, "Refinement iterations")->check(CLI::PositiveNumber);
  figure->add_option("--evolution", fa.evolution, "Hamiltonian simulation")->check(CLI::IsMember({"exact", "trotter"}));
  figure->add_option("--slices", fa.slices, "Trotter slices")->check(CLI::PositiveNumber);
  figure->add_option("--out", fa.out, "Output directory");

  std::string sweep_file, sweep_out = ".";
  auto* sweep = app.add_subcommand("sweep", "Run the Cartesian product described by a JSON spec");
  sweep->add_option("spec", sweep_file, "Sweep spec JSON")->required();
  sweep->add_option("--out", sweep_out, "Output directory");

  double g_kappa = 10.0;
  int g_solution = 1;
  std::uint64_t g_seed = 0;
  std::string g_out;
  auto* gen = app.add_subcommand("gen-problem", "Write a benchmark problem as JSON");
  gen->add_option("--kappa", g_kappa, "Condition number")->check(CLI::Range(1.0, 1e12));
  gen->add_option("--solution", g_solution, "Reference solution index")->check(CLI::IsMember({1, 2}));
  gen->add_option("--seed", g_seed, "Seed of the orthogonal basis");
  gen->add_option("--out", g_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitSpec;
  }

  try {
    if (*solve) return run_solve(sa);
    if (*figure) return run_figure(fa);
    if (*sweep) return run_sweep(sweep_file, sweep_out);
    return run_gen_problem(g_kappa, g_solution, g_seed, g_out);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return e.code() == ErrorCode::SpecParseError ? kExitSpec : kExitSolver;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}
