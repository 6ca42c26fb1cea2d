// robust-mc: command-line front end.
//
//   robust-mc run --config spec.json --out results.csv [--json results.json]
//   robust-mc solve --matrix m.txt --mask mask.txt --rank r --tau t --eta e
//   robust-mc presets

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <limits>
#include <string>

#include "CLI11.hpp"
#include "robust_mc/robust_mc.hpp"

namespace {

using namespace robust_mc;

std::string sibling_path(const std::string& out, const std::string& suffix) {
  const auto dot = out.rfind('.');
  const auto slash = out.rfind('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? out.substr(0, dot) : out) + suffix;
}

int cmd_run(const std::string& config, const std::string& out, const std::string& json_out) {
  const ExperimentSpec spec = load_spec(config);
  const std::size_t threads = worker_count();
  std::cerr << "running " << to_string(spec.preset) << " with " << threads << " worker(s)\n";
  const auto records = run_experiment(spec, threads);
  emit_csv(records, out);
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.failed;
  std::cerr << "wrote " << records.size() << " rows to " << out;
  if (failed) std::cerr << " (" << failed << " failed)";
  std::cerr << '\n';
  if (spec.record_trajectories) {
    const std::string traj = sibling_path(out, ".traj.csv");
    emit_trajectories_csv(records, traj);
    std::cerr << "wrote trajectories to " << traj << '\n';
  }
  if (!json_out.empty()) emit_json(spec, records, json_out);
  return 0;
}

int cmd_solve(const std::string& matrix_path, const std::string& mask_path, std::size_t rank,
              const std::string& tau_text, double eta, double p_opt, std::size_t max_iters, double tol,
              const std::string& truth_path, const std::string& out_path) {
  const DenseMatrix values = load_matrix(matrix_path);
  const DenseMatrix mask = load_matrix(mask_path);
  const double observed = (mask.array() != 0.0).count();
  const double p = p_opt > 0.0 ? p_opt : observed / static_cast<double>(mask.size());
  const ObservationSet obs = ObservationSet::from_dense(values, mask, p);
  const double tau = detail::parse_real(tau_text);

  const SpectralInit init = spectral_initialize(obs, tau, rank);
  GdConfig cfg;
  cfg.eta = eta;
  cfg.tau = tau;
  cfg.max_iters = max_iters;
  cfg.rel_change_tol = tol;
  cfg.record_every = 1;

  GdTrace trace;
  if (!truth_path.empty()) {
    trace = gd_run(init.factors, obs, cfg, load_matrix(truth_path));
  } else {
    trace = gd_run(init.factors, obs, cfg);
  }

  std::cout << "# n=" << obs.n1() << " observed=" << obs.size() << " p=" << p << " tau=" << tau << " eta=" << eta
            << '\n';
  std::cout << "iter rel_change objective imbalance" << (truth_path.empty() ? "" : " rel_error") << '\n';
  std::cout << std::setprecision(10);
  for (const auto& rec : trace.iterates_recorded) {
    std::cout << rec.iter << ' ';
    if (rec.rel_change)
      std::cout << *rec.rel_change;
    else
      std::cout << '-';
    std::cout << ' ' << rec.objective << ' ' << rec.imbalance;
    if (rec.rel_error) std::cout << ' ' << *rec.rel_error;
    std::cout << '\n';
  }
  std::cout << "# stopped: " << to_string(trace.stop_reason) << " after " << trace.iters_run << " iterations\n";
  if (!out_path.empty()) save_matrix(out_path, trace.final.product());
  return 0;
}

int cmd_presets() {
  nlohmann::json all = nlohmann::json::array();
  for (Preset p : {Preset::fig1_convergence, Preset::fig2_sigma_sweep, Preset::fig3_tau_sweep, Preset::fig4_ls_ratio})
    all.push_back(to_json(preset_spec(p)));
  std::cout << all.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust matrix completion: Huber-loss gradient descent with spectral initialization"};
  app.require_subcommand(1);

  std::string config, out, json_out;
  auto* run = app.add_subcommand("run", "Run one experiment campaign");
  run->add_option("--config", config, "ExperimentSpec JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "CSV output path")->required();
  run->add_option("--json", json_out, "Optional JSON output (spec + records)");

  std::string matrix, mask, tau_text = "inf", truth, solve_out;
  std::size_t rank = 1, max_iters = 2000;
  double eta = 0.05, p = 0.0, tol = 1e-10;
  auto* solve = app.add_subcommand("solve", "Complete one matrix and print the iteration trace");
  solve->add_option("--matrix", matrix, "Observed values (dense text format)")->required()->check(CLI::ExistingFile);
  solve->add_option("--mask", mask, "0/1 observation mask (dense text format)")->required()->check(CLI::ExistingFile);
  solve->add_option("--rank", rank, "Target rank")->required()->check(CLI::PositiveNumber);
  solve->add_option("--tau", tau_text, "Huber threshold; 'inf' for least squares")->capture_default_str();
  solve->add_option("--eta", eta, "Step size")->capture_default_str();
  solve->add_option("--p", p, "Sampling rate (default: observed fraction)");
  solve->add_option("--max-iters", max_iters, "Iteration cap")->capture_default_str();
  solve->add_option("--tol", tol, "Relative-change stopping tolerance")->capture_default_str();
  solve->add_option("--truth", truth, "Ground-truth matrix; adds a rel_error column");
  solve->add_option("--out", solve_out, "Write the completed matrix here");

  auto* presets = app.add_subcommand("presets", "Print the default campaign specs as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, out, json_out);
    if (*solve) return cmd_solve(matrix, mask, rank, tau_text, eta, p, max_iters, tol, truth, solve_out);
    if (*presets) return cmd_presets();
  } catch (const std::exception& e) {
    std::cerr << "robust-mc: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
