#include "obslab/analysis.hpp"
#include "obslab/config.hpp"
#include "obslab/report.hpp"
#include "obslab/sim.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace obslab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDiverged = 2;
constexpr int kExitInfeasible = 3;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error("cannot create output directory " + dir + ": " + ec.message());
  return p;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos) {
      throw Error("bad list entry '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw Error("empty list");
  return out;
}

int cmd_run(const std::string& config_path, const std::string& observer, bool pde_validate,
            const std::string& out_dir) {
  ScenarioConfig cfg = load_config(config_path);
  if (pde_validate) {
    cfg.scenario.pde_validate = true;
    cfg.scenario.validate();
  }
  const auto records = run(cfg.scenario, parse_observer_selection(observer));
  const fs::path out = prepare_out(out_dir);
  {
    std::ostringstream csv;
    write_run_csv(csv, records);
    write_file(out / "run.csv", csv.str());
  }
  const std::string title = "estimation error, D = " + std::to_string(cfg.scenario.delay) +
                            " s, eps = " + std::to_string(cfg.scenario.epsilon);
  write_file(out / "run.svg", render_error_svg(records, title));
  const std::string summary = format_run_summary(records, cfg);
  write_file(out / "summary.txt", summary);
  bool diverged = false;
  for (const auto& r : records) {
    std::cout << to_string(r.kind) << ": " << to_string(r.verdict) << " (final |X~| = " << r.final_error << ")\n";
    for (const auto& w : r.warnings) std::cout << "  warning: " << w << '\n';
    diverged = diverged || r.verdict == Verdict::diverged;
  }
  return diverged ? kExitDiverged : kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& delays, const std::string& gains,
              const std::string& observer, bool dt_halving, const std::string& out_dir) {
  const ScenarioConfig cfg = load_config(config_path);
  const auto d_values = parse_list(delays);
  const auto e_values = parse_list(gains);
  if (observer == "both") throw Error("sweep runs one observer at a time");
  const auto kind = parse_observer_selection(observer) == ObserverSelection::standard ? ObserverKind::standard
                                                                                       : ObserverKind::predictive;
  const unsigned threads = worker_threads_from_env();
  const SweepResult result = sweep(cfg.scenario, d_values, e_values, kind, threads);
  const fs::path out = prepare_out(out_dir);
  std::ostringstream csv;
  write_sweep_csv(csv, result);
  write_file(out / "sweep.csv", csv.str());
  for (const auto& [d, eps] : result.thresholds) {
    std::cout << "D = " << d << " s: smallest converged eps = ";
    if (std::isnan(eps)) std::cout << "none";
    else std::cout << eps;
    std::cout << '\n';
  }
  if (dt_halving) {
    Scenario fine = cfg.scenario;
    fine.dt /= 2.0;
    const SweepResult check = sweep(fine, d_values, e_values, kind, threads);
    std::ostringstream fine_csv;
    write_sweep_csv(fine_csv, check);
    write_file(out / "sweep_half_dt.csv", fine_csv.str());
    int mismatches = 0;
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
      if (result.cells[i].verdict != check.cells[i].verdict) {
        ++mismatches;
        std::cout << "dt halving changes verdict at D = " << result.cells[i].delay
                  << ", eps = " << result.cells[i].epsilon << ": " << to_string(result.cells[i].verdict) << " -> "
                  << to_string(check.cells[i].verdict) << '\n';
      }
    }
    std::cout << "dt halving: " << mismatches << " verdict change(s)\n";
  }
  return kExitOk;
}

int cmd_margin(const std::string& config_path, const std::string& kappa1, const std::string& out_dir) {
  ScenarioConfig cfg = load_config(config_path);
  if (kappa1 != "auto") {
    std::size_t used = 0;
    const double k = std::stod(kappa1, &used);
    if (used != kappa1.size() || !(k > 0.0)) throw Error("--kappa1 must be 'auto' or a positive number");
    cfg.margin.kappa1 = k;
  }
  const MarginStudy study = analyze_margins(cfg);
  const std::string text = format_margin_study(study);
  write_file(prepare_out(out_dir) / "margin.txt", text);
  std::cout << text;
  return study.report.feasible ? kExitOk : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"obslab: delayed-landmark pose observers on SE(2)"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string observer = "predictive";
  bool pde_validate = false;
  auto* run_cmd = app.add_subcommand("run", "simulate one scenario");
  run_cmd->add_option("config", config_path, "scenario file")->required();
  run_cmd->add_option("--observer", observer, "predictive, standard or both")
      ->check(CLI::IsMember({"predictive", "standard", "both"}));
  run_cmd->add_flag("--pde-validate", pde_validate, "co-simulate the ODE-PDE form");
  run_cmd->add_option("--out", out_dir, "output directory");

  std::string delays;
  std::string gains;
  std::string sweep_observer = "predictive";
  bool dt_halving = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "grid of delays and gains");
  sweep_cmd->add_option("config", config_path, "scenario file")->required();
  sweep_cmd->add_option("--delays", delays, "comma-separated delays in s")->required();
  sweep_cmd->add_option("--gains", gains, "comma-separated epsilon values")->required();
  sweep_cmd->add_option("--observer", sweep_observer, "predictive or standard")
      ->check(CLI::IsMember({"predictive", "standard"}));
  sweep_cmd->add_flag("--dt-halving", dt_halving, "re-run at dt/2 and report verdict changes");
  sweep_cmd->add_option("--out", out_dir, "output directory");

  std::string kappa1 = "auto";
  auto* margin_cmd = app.add_subcommand("margin", "delay margin and gain interval");
  margin_cmd->add_option("config", config_path, "scenario file")->required();
  margin_cmd->add_option("--kappa1", kappa1, "'auto' or a positive value");
  margin_cmd->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(config_path, observer, pde_validate, out_dir);
    if (*sweep_cmd) return cmd_sweep(config_path, delays, gains, sweep_observer, dt_halving, out_dir);
    return cmd_margin(config_path, kappa1, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
