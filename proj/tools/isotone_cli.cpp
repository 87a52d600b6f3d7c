// isotone: command-line front end for the steady-state solver.
//
//   isotone analyze   <file> [--tol t] [--budget b] [--grid g] [--output path]
//   isotone trace     <file> [--start v1,...,vn] [--tol t] [--budget b] [--output path]
//   isotone basin     <file> --box x0,y0,x1,y1 [--grid g] [--tol t] [--budget b] [--output path]
//   isotone enumerate <file> [--grid g] [--tol t] [--output path]
//
// Exit status: 0 analysis completed (whatever the verdict), 2 input error,
// 3 an iteration budget ran out before a verdict was reached (analyze still
// writes its report).

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "isotone/io.hpp"

namespace {

using namespace isotone;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitBudget = 3;

struct CommonFlags {
  std::string file;
  std::optional<double> tol;
  std::optional<std::size_t> budget;
  std::string output = "-";
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("file", f.file, "problem file (JSON)")->required();
  cmd->add_option("--tol", f.tol, "convergence tolerance (overrides the file)");
  cmd->add_option("--budget", f.budget, "iteration budget (overrides the file)");
  cmd->add_option("--output", f.output, "output path, '-' for standard output");
}

/// Runs `emit` against the requested output stream.
template <class Emit>
void with_output(const std::string& path, Emit&& emit) {
  if (path == "-") {
    emit(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw io::InputError("--output", "cannot open " + path + " for writing");
  emit(out);
}

PositiveVector positive_flag(const std::string& text, const std::string& flag, std::size_t n) {
  auto v = io::parse_list(text, flag);
  if (v.size() != n)
    throw io::InputError(flag, "expected " + std::to_string(n) + " components, got " + std::to_string(v.size()));
  for (double x : v)
    if (!(x > 0.0)) throw io::InputError(flag, "components must be > 0");
  return PositiveVector(std::move(v));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dominant steady states of isotone electric systems y = k - M (1/y)"};
  app.require_subcommand(1);

  CommonFlags analyze_flags, trace_flags, basin_flags, enum_flags;
  std::size_t analyze_grid = kEnumerateGrid, basin_grid_n = 32, enum_grid = kEnumerateGrid;
  std::string start_text, box_text;

  auto* analyze_cmd = app.add_subcommand("analyze", "bounds, existence verdict, dominant point, certificate");
  add_common(analyze_cmd, analyze_flags);
  analyze_cmd->add_option("--grid", analyze_grid, "enumeration grid per axis (n <= 3)");

  auto* trace_cmd = app.add_subcommand("trace", "CSV of the fixed-point iteration sequence");
  add_common(trace_cmd, trace_flags);
  trace_cmd->add_option("--start", start_text, "start point v1,...,vn (default y^max, else k)");

  auto* basin_cmd = app.add_subcommand("basin", "CSV classification of a grid of starts (n = 2)");
  add_common(basin_cmd, basin_flags);
  basin_cmd->add_option("--box", box_text, "box corners x0,y0,x1,y1")->required();
  basin_cmd->add_option("--grid", basin_grid_n, "samples per axis");

  auto* enum_cmd = app.add_subcommand("enumerate", "all positive fixed points (n <= 3)");
  add_common(enum_cmd, enum_flags);
  enum_cmd->add_option("--grid", enum_grid, "Newton starts per axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*analyze_cmd) {
      const auto file = io::load_problem(analyze_flags.file);
      io::AnalyzeOptions opts;
      opts.iteration = io::resolve_options(file, analyze_flags.tol, analyze_flags.budget);
      opts.enumerate_grid = analyze_grid;
      if (analyze_grid < 16) throw io::InputError("--grid", "must be >= 16");
      const auto report = io::analyze(file.problem, opts);
      with_output(analyze_flags.output, [&](std::ostream& os) { io::write_json(os, io::to_json(report)); });
      if (report.outcome == Outcome::Indeterminate) {
        std::cerr << "isotone: budget exhausted: existence undecided after " << report.iterations << " iterations\n";
        return kExitBudget;
      }
    } else if (*trace_cmd) {
      const auto file = io::load_problem(trace_flags.file);
      const auto opts = io::resolve_options(file, trace_flags.tol, trace_flags.budget);
      const auto& p = file.problem;
      std::optional<PositiveVector> start;
      if (!start_text.empty()) {
        start = positive_flag(start_text, "--start", p.size());
      } else {
        const auto b = bounds(p);
        if (b.necessary_ok)
          start = PositiveVector(*b.y_max);
        else if (PositiveVector::admits(p.k()))
          start = PositiveVector(p.k());
        else
          throw io::InputError("--start", "required: the problem has no positive default start");
      }
      const auto trace = iterate(p, *start, opts);
      with_output(trace_flags.output, [&](std::ostream& os) { io::write_trace_csv(os, trace); });
    } else if (*basin_cmd) {
      const auto file = io::load_problem(basin_flags.file);
      const auto opts = io::resolve_options(file, basin_flags.tol, basin_flags.budget);
      if (file.problem.size() != 2)
        throw UnsupportedSizeError("basin grids require n = 2, got n = " + std::to_string(file.problem.size()));
      const auto corners = io::parse_list(box_text, "--box");
      if (corners.size() != 4) throw io::InputError("--box", "expected x0,y0,x1,y1");
      for (double x : corners)
        if (!(x > 0.0)) throw io::InputError("--box", "corners must be positive");
      if (!(corners[0] < corners[2] && corners[1] < corners[3]))
        throw io::InputError("--box", "lower corner must be strictly below the upper corner");
      if (basin_grid_n < 2) throw io::InputError("--grid", "must be >= 2");
      const auto samples = basin_grid(file.problem, PositiveVector{corners[0], corners[1]},
                                      PositiveVector{corners[2], corners[3]}, basin_grid_n, opts);
      with_output(basin_flags.output, [&](std::ostream& os) { io::write_basin_csv(os, samples); });
    } else if (*enum_cmd) {
      const auto file = io::load_problem(enum_flags.file);
      const auto opts = io::resolve_options(file, enum_flags.tol, std::nullopt);
      if (enum_grid < 16) throw io::InputError("--grid", "must be >= 16");
      const auto e = io::enumerate(file.problem, enum_grid, opts.tol);
      with_output(enum_flags.output, [&](std::ostream& os) { io::write_json(os, io::to_json(e)); });
    }
  } catch (const BudgetExhaustedError& e) {
    std::cerr << "isotone: budget exhausted: " << e.what() << '\n';
    return kExitBudget;
  } catch (const UnsupportedSizeError& e) {
    std::cerr << "isotone: unsupported: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "isotone: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "isotone: internal error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
