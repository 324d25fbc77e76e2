// Command-line driver: simulate a scenario, audit a stored trace, or plot it.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/cfg/env.h>
#include <spdlog/spdlog.h>

#include "icbf/errors.hpp"
#include "icbf/safety.hpp"
#include "icbf/scenario.hpp"
#include "icbf/simulation.hpp"
#include "icbf/svg_plot.hpp"
#include "icbf/trace_io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitClean = 0;
constexpr int kExitUnsafe = 1;
constexpr int kExitError = 2;

void print_summary(const icbf::SafetyReport& rep) {
  std::printf("scenario %s: %zu samples%s\n", rep.scenario.c_str(), rep.steps, rep.aborted ? " (aborted)" : "");
  for (const icbf::CbfSummary& s : rep.cbfs) {
    std::printf("  %-10s min h = %12.6f at t=%6.2f   min comparison margin = %10.3e\n", s.name.c_str(), s.min_h,
                s.t_min_h, s.min_comparison_margin);
  }
  std::printf("  footprint overlaps: %zu   input violations: %zu   QP failures: %zu\n", rep.obb.overlaps.size(),
              rep.input_violations, rep.qp_failures);
  std::printf("  QP time: mean %.3f ms, max %.3f ms\n", rep.qp_time_mean_s * 1e3, rep.qp_time_max_s * 1e3);
  for (const std::string& f : rep.failures) std::printf("  ! %s\n", f.c_str());
  std::printf("%s\n", rep.clean() ? "SAFE" : "UNSAFE");
}

int simulate(const std::string& config, std::optional<std::string> out_dir, bool csv_only,
             std::optional<double> duration, std::optional<std::uint64_t> seed) {
  icbf::ScenarioConfig cfg = icbf::load_scenario(config);
  if (duration) {
    cfg.duration_s = *duration;
    icbf::finalize_scenario(cfg);
  }
  if (seed) cfg.seed = *seed;
  const fs::path dir = out_dir ? fs::path(*out_dir) : fs::path(cfg.output_dir);
  fs::create_directories(dir);

  const icbf::SimTrace trace = icbf::run(cfg);
  icbf::write_trace_csv(dir / "trace.csv", trace);
  const icbf::SafetyReport rep = icbf::verify_invariants(trace, cfg);
  if (!csv_only) {
    icbf::write_report_json(dir / "report.json", rep);
    icbf::write_plots(trace, dir);
  }
  print_summary(rep);
  spdlog::info("outputs written to {}", dir.string());
  return rep.clean() ? kExitClean : kExitUnsafe;
}

int verify(const std::string& trace_path, const std::string& config, std::optional<std::string> report_path) {
  const icbf::ScenarioConfig cfg = icbf::load_scenario(config);
  icbf::SimTrace trace = icbf::read_trace_csv(fs::path(trace_path));
  trace.scenario = cfg.name;
  const double drift = icbf::replay_controller(trace, cfg);
  spdlog::info("largest difference between stored and recomputed barrier values: {:.3e}", drift);
  icbf::SafetyReport rep = icbf::verify_invariants(trace, cfg);
  if (drift > 1e-9) {
    rep.failures.push_back("stored barrier values disagree with the scenario by " + std::to_string(drift));
    ++rep.h_violations;
  }
  if (report_path) icbf::write_report_json(*report_path, rep);
  print_summary(rep);
  return rep.clean() ? kExitClean : kExitUnsafe;
}

int plot(const std::string& trace_path, std::optional<std::string> out_dir, const std::string& title) {
  icbf::SimTrace trace = icbf::read_trace_csv(fs::path(trace_path));
  trace.scenario = title;
  const fs::path dir = out_dir ? fs::path(*out_dir) : fs::path(trace_path).parent_path();
  icbf::write_plots(trace, dir.empty() ? fs::path(".") : dir);
  std::printf("wrote %s and %s\n", (dir / "states.svg").string().c_str(), (dir / "barriers.svg").string().c_str());
  return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  spdlog::cfg::load_env_levels();

  CLI::App app{"Intersection coordination with control barrier functions"};
  app.require_subcommand(1);

  std::string config, trace_path, title = "trace";
  std::optional<std::string> out_dir, report_path;
  std::optional<double> duration;
  std::optional<std::uint64_t> seed;
  bool csv_only = false;

  auto* sim = app.add_subcommand("simulate", "run a scenario and audit the result");
  sim->add_option("config", config, "scenario TOML file")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out_dir, "output directory (default: simulation.output_dir)");
  sim->add_flag("--csv-only", csv_only, "write only trace.csv");
  sim->add_option("--duration", duration, "override the simulated time [s]");
  sim->add_option("--seed", seed, "override the scenario seed");

  auto* ver = app.add_subcommand("verify", "audit a stored trace against its scenario");
  ver->add_option("trace", trace_path, "trace.csv")->required()->check(CLI::ExistingFile);
  ver->add_option("config", config, "scenario TOML file")->required()->check(CLI::ExistingFile);
  ver->add_option("--report", report_path, "write the JSON report here");

  auto* plt = app.add_subcommand("plot", "render SVG charts from a stored trace");
  plt->add_option("trace", trace_path, "trace.csv")->required()->check(CLI::ExistingFile);
  plt->add_option("--out", out_dir, "output directory (default: next to the trace)");
  plt->add_option("--title", title, "chart title");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return simulate(config, out_dir, csv_only, duration, seed);
    if (*ver) return verify(trace_path, config, report_path);
    if (*plt) return plot(trace_path, out_dir, title);
  } catch (const icbf::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
