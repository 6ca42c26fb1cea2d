#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "test_support.hpp"

namespace robust_mc {
namespace {

ExperimentSpec small_spec(Preset preset) {
  ExperimentSpec s = preset_spec(preset);
  s.n = 30;
  s.r = 2;
  s.p = 0.5;
  s.trials = 2;
  s.max_iters = 60;
  s.sigma_grid = {1e-4, 1e-3};
  s.record_wall_time = false;
  return s;
}

std::string csv_of(const std::vector<TrialRecord>& records) {
  std::ostringstream os;
  write_csv(os, records);
  return os.str();
}

TEST(Csv, EmptyHasHeaderOnly) {
  EXPECT_EQ(csv_of({}), std::string(kCsvHeader) + "\n");
  std::istringstream in(csv_of({}));
  EXPECT_TRUE(read_csv(in).empty());
}

TEST(Csv, OneRecord) {
  TrialRecord r;
  r.preset = "custom";
  r.distribution = "student_t(2.1)";
  r.sigma = 0.001;
  r.tau = std::numeric_limits<double>::infinity();
  r.trial = 3;
  r.seed = 42;
  r.rel_error = 0.25;
  r.iterations = 17;
  r.wall_ms = 1.5;
  EXPECT_EQ(csv_of({r}), std::string(kCsvHeader) + "\ncustom,student_t(2.1),0.001,inf,3,42,0.25,17,1.5\n");
}

TEST(Csv, RoundTripPreservesValues) {
  const auto records = run_experiment(small_spec(Preset::fig3_tau_sweep), 1);
  std::istringstream in(csv_of(records));
  const auto back = read_csv(in);
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    EXPECT_EQ(back[k].distribution, records[k].distribution);
    EXPECT_EQ(back[k].sigma, records[k].sigma);
    EXPECT_EQ(back[k].tau, records[k].tau);
    EXPECT_EQ(back[k].seed, records[k].seed);
    if (records[k].failed)
      EXPECT_TRUE(std::isnan(back[k].rel_error));
    else
      EXPECT_EQ(back[k].rel_error, records[k].rel_error);
  }
  EXPECT_EQ(csv_of(back), csv_of(records));
}

TEST(Csv, MalformedRejected) {
  std::istringstream bad_header("a,b\n");
  EXPECT_THROW(read_csv(bad_header), IoError);
  std::istringstream short_row(std::string(kCsvHeader) + "\ncustom,gaussian,1\n");
  EXPECT_THROW(read_csv(short_row), IoError);
}

TEST(Experiment, ReplayIsByteIdenticalAcrossThreadCounts) {
  const ExperimentSpec spec = small_spec(Preset::fig2_sigma_sweep);
  const std::string a = csv_of(run_experiment(spec, 1));
  const std::string b = csv_of(run_experiment(spec, 2));
  const std::string c = csv_of(run_experiment(spec, 1));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(Experiment, RowOrderAndCount) {
  const ExperimentSpec spec = small_spec(Preset::fig3_tau_sweep);
  const auto records = run_experiment(spec, 2);
  const std::size_t taus = spec.tau_rule.values.size();
  ASSERT_EQ(records.size(), spec.distributions.size() * spec.sigma_grid.size() * spec.trials * taus);
  EXPECT_EQ(records[0].tau, spec.tau_rule.values[0]);
  EXPECT_EQ(records[taus].trial, 1u);
  EXPECT_EQ(records[2 * taus].sigma, spec.sigma_grid[1]);
}

TEST(Experiment, LeastSquaresRunSharesRealization) {
  ExperimentSpec spec = small_spec(Preset::fig4_ls_ratio);
  spec.tau_rule = TauRule::grid({1e-3, 1e-2});
  const auto records = run_experiment(spec, 1);
  ASSERT_EQ(records.size() % 3, 0u);
  for (std::size_t k = 0; k < records.size(); k += 3) {
    EXPECT_TRUE(std::isinf(records[k + 2].tau));
    EXPECT_EQ(records[k].obs_hash, records[k + 2].obs_hash);
    EXPECT_EQ(records[k + 1].obs_hash, records[k + 2].obs_hash);
  }
  std::set<std::uint64_t> hashes;
  for (const auto& r : records) hashes.insert(r.obs_hash);
  EXPECT_EQ(hashes.size(), records.size() / 3);
  const auto ratios = least_squares_ratios(records);
  EXPECT_EQ(ratios.size(), records.size() / 3);
  for (const auto& r : ratios) EXPECT_GT(r.ratio, 0.0);
}

TEST(Experiment, AdaptiveTauIncreasesWithSigma) {
  ExperimentSpec spec = small_spec(Preset::custom);
  spec.sigma_grid = {1e-6, 1e-4, 1e-2};
  double prev = 0.0;
  for (double s : spec.sigma_grid) {
    const double tau = cell_taus(spec, 0.2, s).at(0);
    EXPECT_GT(tau, prev);
    prev = tau;
  }
}

TEST(Experiment, SeedColumnIsStreamId) {
  const ExperimentSpec spec = small_spec(Preset::custom);
  const auto records = run_experiment(spec, 1);
  EXPECT_EQ(records[0].seed, cell_stream_id(spec, 0, 0, 0));
  EXPECT_NE(cell_stream_id(spec, 0, 0, 0), cell_stream_id(spec, 0, 0, 1));
  EXPECT_NE(cell_stream_id(spec, 0, 0, 0), cell_stream_id(spec, 0, 1, 0));
}

TEST(Json, SpecRoundTrip) {
  for (Preset p : {Preset::fig1_convergence, Preset::fig2_sigma_sweep, Preset::fig3_tau_sweep, Preset::fig4_ls_ratio}) {
    const ExperimentSpec s = preset_spec(p);
    const ExperimentSpec back = spec_from_json(to_json(s));
    EXPECT_EQ(to_json(back), to_json(s)) << to_string(p);
  }
}

TEST(Json, PartialSpecUsesPresetDefaults) {
  const auto j = nlohmann::json::parse(R"({"preset": "fig3", "trials": 4,
      "distributions": [{"law": "student_t", "nu": 2.5}]})");
  const ExperimentSpec s = spec_from_json(j);
  EXPECT_EQ(s.preset, Preset::fig3_tau_sweep);
  EXPECT_EQ(s.trials, 4u);
  ASSERT_EQ(s.distributions.size(), 1u);
  EXPECT_EQ(noise_name(s.distributions[0]), "student_t(2.5)");
  EXPECT_EQ(s.tau_rule.values.size(), 13u);
}

TEST(Json, InvalidSpecRejected) {
  EXPECT_THROW(spec_from_json(nlohmann::json::parse(R"({"p": 0})")), DomainError);
  EXPECT_THROW(spec_from_json(nlohmann::json::parse(R"({"distributions": [{"law": "cauchy"}]})")), DomainError);
  EXPECT_THROW(spec_from_json(nlohmann::json::parse(R"({"preset": "fig9"})")), DomainError);
}

TEST(Stats, Median) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
  EXPECT_TRUE(std::isnan(median({})));
}

TEST(Grid, LogGrid) {
  const auto g = log_grid(1e-4, 1e-1, 4);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_NEAR(g[1], 1e-3, 1e-18);
  EXPECT_DOUBLE_EQ(g[3], 1e-1);
}

}  // namespace
}  // namespace robust_mc
