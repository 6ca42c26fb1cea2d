#pragma once

// Experiment campaigns: presets for the four simulation studies, a bounded
// worker pool over independent trials, and CSV / JSON emission.
//
// Every (distribution, sigma, trial) cell owns one random stream whose id is
// a hash of those coordinates, so results do not depend on scheduling. All
// tau values (and the least-squares companion run of the fig4 preset) inside
// a cell reuse the same ground truth and observations.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "robust_mc/errors.hpp"
#include "robust_mc/init.hpp"
#include "robust_mc/matcore.hpp"
#include "robust_mc/metrics.hpp"
#include "robust_mc/model.hpp"
#include "robust_mc/rng.hpp"
#include "robust_mc/solver.hpp"
#include "robust_mc/synth.hpp"

namespace robust_mc {

enum class Preset { fig1_convergence, fig2_sigma_sweep, fig3_tau_sweep, fig4_ls_ratio, custom };

inline const char* to_string(Preset p) {
  switch (p) {
    case Preset::fig1_convergence: return "fig1_convergence";
    case Preset::fig2_sigma_sweep: return "fig2_sigma_sweep";
    case Preset::fig3_tau_sweep: return "fig3_tau_sweep";
    case Preset::fig4_ls_ratio: return "fig4_ls_ratio";
    case Preset::custom: return "custom";
  }
  return "custom";
}

inline Preset preset_from_string(const std::string& s) {
  for (Preset p : {Preset::fig1_convergence, Preset::fig2_sigma_sweep, Preset::fig3_tau_sweep, Preset::fig4_ls_ratio,
                   Preset::custom}) {
    if (s == to_string(p)) return p;
  }
  if (s == "fig1") return Preset::fig1_convergence;
  if (s == "fig2") return Preset::fig2_sigma_sweep;
  if (s == "fig3") return Preset::fig3_tau_sweep;
  if (s == "fig4") return Preset::fig4_ls_ratio;
  throw DomainError("unknown preset '" + s + "'");
}

struct TauRule {
  enum class Kind { paper_rule, explicit_grid, infinity };
  Kind kind = Kind::paper_rule;
  double c_tau = 3.0;          // paper_rule
  std::vector<double> values;  // explicit_grid

  static TauRule paper(double c) { return {Kind::paper_rule, c, {}}; }
  static TauRule grid(std::vector<double> v) { return {Kind::explicit_grid, 0.0, std::move(v)}; }
  static TauRule least_squares() { return {Kind::infinity, 0.0, {}}; }
};

/// `count` log-spaced points from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t k = 0; k < count; ++k) out[k] = std::pow(10.0, a + (b - a) * k / (count - 1));
  return out;
}

struct ExperimentSpec {
  Preset preset = Preset::custom;
  std::size_t n = 200;
  std::size_t r = 5;
  double p = 0.3;
  std::vector<NoiseModel> distributions;
  std::vector<double> sigma_grid;
  TauRule tau_rule;
  std::size_t trials = 1;
  double eta = 0.05;
  std::size_t max_iters = 2000;
  double tol = 1e-10;
  std::uint64_t master_seed = 1;
  bool record_trajectories = false;
  bool record_wall_time = true;  // false writes wall_ms = 0 so output bytes are reproducible

  void validate() const {
    if (r < 1 || r > n) throw DomainError("ExperimentSpec: need 1 <= r <= n");
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("ExperimentSpec: p must lie in (0, 1]");
    if (distributions.empty()) throw DomainError("ExperimentSpec: distributions must be nonempty");
    if (sigma_grid.empty()) throw DomainError("ExperimentSpec: sigma_grid must be nonempty");
    if (trials < 1) throw DomainError("ExperimentSpec: trials must be >= 1");
    if (!(eta > 0.0)) throw DomainError("ExperimentSpec: eta must be > 0");
    if (max_iters < 1) throw DomainError("ExperimentSpec: max_iters must be >= 1");
    if (!(tol >= 0.0)) throw DomainError("ExperimentSpec: tol must be >= 0");
    if (tau_rule.kind == TauRule::Kind::explicit_grid && tau_rule.values.empty())
      throw DomainError("ExperimentSpec: explicit tau grid must be nonempty");
    if (tau_rule.kind == TauRule::Kind::paper_rule && !(tau_rule.c_tau > 0.0))
      throw DomainError("ExperimentSpec: c_tau must be > 0");
    for (double t : tau_rule.values)
      if (!(t > 0.0)) throw DomainError("ExperimentSpec: tau grid values must be > 0");
    for (double s : sigma_grid)
      if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("ExperimentSpec: sigma values must be finite and >= 0");
    for (const NoiseModel& d : distributions) robust_mc::validate(d);
  }
};

struct TrialRecord {
  std::string preset;
  std::string distribution;
  double sigma = 0.0;
  double tau = 0.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;  // stream id; RngStream(master_seed, seed) replays the cell
  double rel_error = 0.0;  // NaN when failed
  std::size_t iterations = 0;
  double wall_ms = 0.0;
  bool failed = false;
  std::string failure;
  std::uint64_t obs_hash = 0;
  std::vector<IterateRecord> trajectory;
};

// ---------------------------------------------------------------------------
// Presets (desk scale: n = 200)

inline ExperimentSpec preset_spec(Preset preset) {
  ExperimentSpec s;
  s.preset = preset;
  s.n = 200;
  s.r = 5;
  s.p = 0.3;
  s.eta = 0.05;
  s.master_seed = 20240229;
  switch (preset) {
    case Preset::fig1_convergence:
      s.distributions = {noise::Gaussian{}, noise::StudentT{3.0, 0.0}, noise::Trinomial{0.01, 0.0}};
      s.sigma_grid = {1e-6, 1e-5, 1e-4, 1e-3};
      s.tau_rule = TauRule::paper(3.0);
      s.trials = 1;
      s.max_iters = 1000;
      s.tol = 0.0;
      s.record_trajectories = true;
      break;
    case Preset::fig2_sigma_sweep:
      s.distributions = {noise::Gaussian{}, noise::StudentT{3.0, 0.0}, noise::Trinomial{0.01, 0.0}};
      s.sigma_grid = log_grid(1e-6, 1e-3, 7);
      s.tau_rule = TauRule::paper(3.0);
      s.trials = 50;
      break;
    case Preset::fig3_tau_sweep:
      s.distributions = {noise::AsymTwoPoint{1e-4, 0.0}, noise::StudentT{2.1, 0.0}, noise::Gaussian{}};
      s.sigma_grid = {1e-3};
      s.tau_rule = TauRule::grid(log_grid(1e-5, 1e2, 13));
      s.trials = 50;
      break;
    case Preset::fig4_ls_ratio:
      s.distributions = {noise::Gaussian{}, noise::StudentT{2.1, 0.0}, noise::AsymTwoPoint{1e-4, 0.0}};
      s.sigma_grid = log_grid(1e-6, 1e-3, 7);
      s.tau_rule = TauRule::grid(log_grid(1e-4, 1e-1, 7));
      s.trials = 50;
      break;
    case Preset::custom:
      s.distributions = {noise::Gaussian{}};
      s.sigma_grid = {1e-4};
      s.tau_rule = TauRule::paper(3.0);
      s.trials = 1;
      break;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Trial execution

/// Stream id for one (distribution, sigma, trial) cell.
inline std::uint64_t cell_stream_id(const ExperimentSpec& spec, std::size_t dist_idx, std::size_t sigma_idx,
                                    std::size_t trial) {
  std::uint64_t h = hash_string(to_string(spec.preset));
  h = hash_combine(h, hash_string(noise_name(spec.distributions.at(dist_idx))));
  h = hash_combine(h, dist_idx);
  h = hash_combine(h, sigma_idx);
  h = hash_combine(h, trial);
  return h;
}

/// The tau values a cell runs, in output order. fig4 appends +inf (least squares).
inline std::vector<double> cell_taus(const ExperimentSpec& spec, double truth_inf_norm, double sigma) {
  std::vector<double> taus;
  switch (spec.tau_rule.kind) {
    case TauRule::Kind::paper_rule:
      taus.push_back(HuberParams::adaptive(spec.tau_rule.c_tau, truth_inf_norm, sigma, spec.n, spec.p).tau);
      break;
    case TauRule::Kind::explicit_grid:
      taus = spec.tau_rule.values;
      break;
    case TauRule::Kind::infinity:
      taus.push_back(std::numeric_limits<double>::infinity());
      break;
  }
  if (spec.preset == Preset::fig4_ls_ratio && spec.tau_rule.kind != TauRule::Kind::infinity) {
    taus.push_back(std::numeric_limits<double>::infinity());
  }
  return taus;
}

inline std::vector<TrialRecord> run_cell(const ExperimentSpec& spec, std::size_t dist_idx, std::size_t sigma_idx,
                                         std::size_t trial) {
  const double sigma = spec.sigma_grid.at(sigma_idx);
  const NoiseModel noise = with_sigma(spec.distributions.at(dist_idx), sigma);
  const std::uint64_t stream = cell_stream_id(spec, dist_idx, sigma_idx, trial);
  RngStream rng(spec.master_seed, stream);
  const GroundTruth truth = make_ground_truth(spec.n, spec.r, rng);
  const ObservationSet obs = sample_observations(truth, spec.p, noise, rng);
  const std::uint64_t obs_hash = obs.fingerprint();

  std::vector<TrialRecord> out;
  for (double tau : cell_taus(spec, inf_norm(truth.m_star), sigma)) {
    TrialRecord rec;
    rec.preset = to_string(spec.preset);
    rec.distribution = noise_name(noise);
    rec.sigma = sigma;
    rec.tau = tau;
    rec.trial = trial;
    rec.seed = stream;
    rec.obs_hash = obs_hash;
    const auto start = std::chrono::steady_clock::now();
    try {
      const SpectralInit init = spectral_initialize(obs, tau, spec.r);
      GdConfig cfg;
      cfg.eta = spec.eta;
      cfg.max_iters = spec.max_iters;
      cfg.rel_change_tol = spec.tol;
      cfg.record_every = spec.record_trajectories ? default_record_every(spec.n) : spec.max_iters;
      cfg.tau = tau;
      GdTrace trace = gd_run(init.factors, obs, cfg, truth.m_star);
      rec.rel_error = *trace.iterates_recorded.back().rel_error;
      rec.iterations = trace.iters_run;
      if (spec.record_trajectories) rec.trajectory = std::move(trace.iterates_recorded);
    } catch (const DivergenceError& e) {
      rec.failed = true;
      rec.failure = e.what();
      rec.rel_error = std::numeric_limits<double>::quiet_NaN();
      rec.iterations = e.iteration();
    } catch (const NumericError& e) {
      rec.failed = true;
      rec.failure = e.what();
      rec.rel_error = std::numeric_limits<double>::quiet_NaN();
      rec.iterations = 0;
    }
    if (spec.record_wall_time) {
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

/// Worker count from ROBUST_MC_THREADS, else the hardware concurrency.
inline std::size_t worker_count() {
  if (const char* env = std::getenv("ROBUST_MC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs every (distribution x sigma x trial) cell on a bounded pool. Output order
/// is distribution, sigma, trial, then tau, independent of completion order.
inline std::vector<TrialRecord> run_experiment(const ExperimentSpec& spec, std::size_t threads = worker_count()) {
  spec.validate();
  const std::size_t nd = spec.distributions.size(), ns = spec.sigma_grid.size(), nt = spec.trials;
  const std::size_t cells = nd * ns * nt;
  std::vector<std::vector<TrialRecord>> slots(cells);
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= cells) return;
      const std::size_t d = c / (ns * nt), s = (c / nt) % ns, t = c % nt;
      try {
        slots[c] = run_cell(spec, d, s, t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const std::size_t pool = std::max<std::size_t>(1, std::min(threads, cells));
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::thread> ts;
    for (std::size_t k = 0; k < pool; ++k) ts.emplace_back(worker);
    for (auto& th : ts) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<TrialRecord> out;
  for (auto& slot : slots)
    for (auto& rec : slot) out.push_back(std::move(rec));
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation

struct LsRatio {
  std::string distribution;
  double sigma = 0.0;
  std::size_t trial = 0;
  double ratio = 0.0;  // min over finite tau of rel_error / least-squares rel_error
};

/// Per-trial min_tau(Huber error) / LS error, for records that carry an LS row.
inline std::vector<LsRatio> least_squares_ratios(const std::vector<TrialRecord>& records) {
  using Key = std::tuple<std::string, double, std::size_t>;
  std::map<Key, std::pair<double, double>> acc;  // (min huber, ls)
  std::vector<Key> order;
  for (const TrialRecord& r : records) {
    Key k{r.distribution, r.sigma, r.trial};
    auto [it, inserted] = acc.try_emplace(k, std::numeric_limits<double>::infinity(),
                                          std::numeric_limits<double>::quiet_NaN());
    if (inserted) order.push_back(k);
    if (r.failed) continue;
    if (std::isinf(r.tau))
      it->second.second = r.rel_error;
    else
      it->second.first = std::min(it->second.first, r.rel_error);
  }
  std::vector<LsRatio> out;
  for (const Key& k : order) {
    const auto& [huber, ls] = acc.at(k);
    if (std::isnan(ls) || std::isinf(huber)) continue;
    out.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), huber / ls});
  }
  return out;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kCsvHeader = "preset,distribution,sigma,tau,trial,seed,rel_error,iterations,wall_ms";

inline void write_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << kCsvHeader << '\n' << std::setprecision(17);
  for (const TrialRecord& r : records) {
    out << r.preset << ',' << r.distribution << ',' << r.sigma << ',' << r.tau << ',' << r.trial << ',' << r.seed << ','
        << r.rel_error << ',' << r.iterations << ',' << r.wall_ms << '\n';
  }
}

inline void emit_csv(const std::vector<TrialRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("emit_csv: cannot open '" + path + "' for writing");
  write_csv(out, records);
  out.flush();
  if (!out) throw IoError("emit_csv: write failed for '" + path + "'");
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_real(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

inline std::uint64_t parse_u64(const std::string& s) {
  std::size_t used = 0;
  const unsigned long long v = std::stoull(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

}  // namespace detail

inline std::vector<TrialRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw IoError("read_csv: missing or unexpected header");
  std::vector<TrialRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 9) throw IoError("read_csv: line " + std::to_string(lineno) + " has " + std::to_string(f.size()) + " fields");
    try {
      TrialRecord r;
      r.preset = f[0];
      r.distribution = f[1];
      r.sigma = detail::parse_real(f[2]);
      r.tau = detail::parse_real(f[3]);
      r.trial = detail::parse_u64(f[4]);
      r.seed = detail::parse_u64(f[5]);
      r.rel_error = detail::parse_real(f[6]);
      r.iterations = detail::parse_u64(f[7]);
      r.wall_ms = detail::parse_real(f[8]);
      r.failed = std::isnan(r.rel_error);
      out.push_back(std::move(r));
    } catch (const std::exception&) {
      throw IoError("read_csv: malformed field on line " + std::to_string(lineno));
    }
  }
  return out;
}

inline std::vector<TrialRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_csv: cannot open '" + path + "'");
  try {
    return read_csv(in);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

/// Per-iteration rows for records carrying a trajectory (fig1).
inline void emit_trajectories_csv(const std::vector<TrialRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("emit_trajectories_csv: cannot open '" + path + "' for writing");
  out << "preset,distribution,sigma,tau,trial,iter,rel_error,objective,imbalance\n" << std::setprecision(17);
  for (const TrialRecord& r : records) {
    for (const IterateRecord& it : r.trajectory) {
      out << r.preset << ',' << r.distribution << ',' << r.sigma << ',' << r.tau << ',' << r.trial << ',' << it.iter
          << ',' << it.rel_error.value_or(std::numeric_limits<double>::quiet_NaN()) << ',' << it.objective << ','
          << it.imbalance << '\n';
    }
  }
  if (!out) throw IoError("emit_trajectories_csv: write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline nlohmann::json real_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double real_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_real(j.get<std::string>());
  throw DomainError("expected a number or \"inf\"");
}

}  // namespace detail

inline nlohmann::json to_json(const NoiseModel& model) {
  return std::visit(
      [](const auto& m) -> nlohmann::json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, noise::None>) return {{"law", "none"}};
        if constexpr (std::is_same_v<T, noise::Gaussian>) return {{"law", "gaussian"}};
        if constexpr (std::is_same_v<T, noise::StudentT>) return {{"law", "student_t"}, {"nu", m.nu}};
        if constexpr (std::is_same_v<T, noise::Trinomial>) return {{"law", "trinomial"}, {"delta", m.delta}};
        if constexpr (std::is_same_v<T, noise::AsymTwoPoint>) return {{"law", "asym_two_point"}, {"delta", m.delta}};
      },
      model);
}

inline NoiseModel noise_from_json(const nlohmann::json& j) {
  const std::string law = j.at("law").get<std::string>();
  if (law == "none") return noise::None{};
  if (law == "gaussian") return noise::Gaussian{};
  if (law == "student_t") return noise::StudentT{j.at("nu").get<double>(), 0.0};
  if (law == "trinomial") return noise::Trinomial{j.at("delta").get<double>(), 0.0};
  if (law == "asym_two_point") return noise::AsymTwoPoint{j.at("delta").get<double>(), 0.0};
  throw DomainError("unknown noise law '" + law + "'");
}

inline nlohmann::json to_json(const TauRule& rule) {
  switch (rule.kind) {
    case TauRule::Kind::paper_rule: return {{"kind", "paper_rule"}, {"c_tau", rule.c_tau}};
    case TauRule::Kind::explicit_grid: return {{"kind", "explicit_grid"}, {"values", rule.values}};
    case TauRule::Kind::infinity: return {{"kind", "infinity"}};
  }
  return {};
}

inline TauRule tau_rule_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "paper_rule") return TauRule::paper(j.value("c_tau", 3.0));
  if (kind == "explicit_grid") {
    std::vector<double> v;
    for (const auto& x : j.at("values")) v.push_back(detail::real_from_json(x));
    return TauRule::grid(std::move(v));
  }
  if (kind == "infinity") return TauRule::least_squares();
  throw DomainError("unknown tau_rule kind '" + kind + "'");
}

inline nlohmann::json to_json(const ExperimentSpec& s) {
  nlohmann::json dists = nlohmann::json::array();
  for (const auto& d : s.distributions) dists.push_back(to_json(d));
  return {{"preset", to_string(s.preset)},
          {"n", s.n},
          {"r", s.r},
          {"p", s.p},
          {"distributions", dists},
          {"sigma_grid", s.sigma_grid},
          {"tau_rule", to_json(s.tau_rule)},
          {"trials", s.trials},
          {"eta", s.eta},
          {"max_iters", s.max_iters},
          {"tol", s.tol},
          {"master_seed", s.master_seed},
          {"record_trajectories", s.record_trajectories},
          {"record_wall_time", s.record_wall_time}};
}

/// Missing fields fall back to the named preset's defaults (custom when absent).
inline ExperimentSpec spec_from_json(const nlohmann::json& j) {
  ExperimentSpec s = preset_spec(preset_from_string(j.value("preset", std::string("custom"))));
  if (j.contains("n")) s.n = j.at("n").get<std::size_t>();
  if (j.contains("r")) s.r = j.at("r").get<std::size_t>();
  if (j.contains("p")) s.p = j.at("p").get<double>();
  if (j.contains("distributions")) {
    s.distributions.clear();
    for (const auto& d : j.at("distributions")) s.distributions.push_back(noise_from_json(d));
  }
  if (j.contains("sigma_grid")) s.sigma_grid = j.at("sigma_grid").get<std::vector<double>>();
  if (j.contains("tau_rule")) s.tau_rule = tau_rule_from_json(j.at("tau_rule"));
  if (j.contains("trials")) s.trials = j.at("trials").get<std::size_t>();
  if (j.contains("eta")) s.eta = j.at("eta").get<double>();
  if (j.contains("max_iters")) s.max_iters = j.at("max_iters").get<std::size_t>();
  if (j.contains("tol")) s.tol = j.at("tol").get<double>();
  if (j.contains("master_seed")) s.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("record_trajectories")) s.record_trajectories = j.at("record_trajectories").get<bool>();
  if (j.contains("record_wall_time")) s.record_wall_time = j.at("record_wall_time").get<bool>();
  s.validate();
  return s;
}

inline ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_spec: cannot open '" + path + "'");
  try {
    return spec_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

inline nlohmann::json to_json(const TrialRecord& r) {
  return {{"preset", r.preset},
          {"distribution", r.distribution},
          {"sigma", r.sigma},
          {"tau", detail::real_to_json(r.tau)},
          {"trial", r.trial},
          {"seed", r.seed},
          {"rel_error", detail::real_to_json(r.rel_error)},
          {"iterations", r.iterations},
          {"wall_ms", r.wall_ms},
          {"failed", r.failed},
          {"failure", r.failure},
          {"obs_hash", r.obs_hash}};
}

inline nlohmann::json experiment_json(const ExperimentSpec& spec, const std::vector<TrialRecord>& records) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) recs.push_back(to_json(r));
  nlohmann::json out{{"spec", to_json(spec)}, {"records", recs}};
  const auto ratios = least_squares_ratios(records);
  if (!ratios.empty()) {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& x : ratios)
      rs.push_back({{"distribution", x.distribution}, {"sigma", x.sigma}, {"trial", x.trial}, {"ratio", x.ratio}});
    out["least_squares_ratios"] = rs;
  }
  return out;
}

inline void emit_json(const ExperimentSpec& spec, const std::vector<TrialRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("emit_json: cannot open '" + path + "' for writing");
  out << experiment_json(spec, records).dump(2) << '\n';
  if (!out) throw IoError("emit_json: write failed for '" + path + "'");
}

}  // namespace robust_mc
