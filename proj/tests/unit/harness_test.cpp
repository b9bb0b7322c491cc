#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dnapprox/errors.hpp"
#include "dnapprox/harness.hpp"

namespace dnapprox {
namespace {

using nlohmann::json;

ExperimentConfig markov_config(double a) {
  return config_from_json(json{{"model", {{"kind", "markov"}, {"transition", {{1 - a, a}, {a, 1 - a}}}}},
                               {"sizes", {100, 400, 1600}},
                               {"replicates", 1000},
                               {"seed", 3}});
}

ExperimentConfig constant_config() {
  return config_from_json(json{{"model", {{"kind", "constant"}, {"value", {0}}}},
                               {"sizes", {10, 20, 40, 80}},
                               {"replicates", 1000}});
}

TEST(SlopeFit, RecoversExactPowerLaw) {
  std::vector<ReportRow> rows;
  for (double n : {100.0, 400.0, 1600.0, 6400.0}) {
    ReportRow r;
    r.size = n;
    r.tv_estimate = 3.0 / std::sqrt(n);
    rows.push_back(r);
  }
  auto fit = fit_log_log_slope(rows);
  EXPECT_NEAR(fit.slope, -0.5, 1e-6);
  EXPECT_FALSE(fit.weighted);
  EXPECT_NEAR(fit.std_error, 0.0, 1e-9);
  for (auto& r : rows) r.mc_std_error = 0.01 * r.tv_estimate;
  fit = fit_log_log_slope(rows);
  EXPECT_TRUE(fit.weighted);
  EXPECT_NEAR(fit.slope, -0.5, 1e-6);
  EXPECT_GT(fit.std_error, 0.0);
}

TEST(SlopeFit, WeightsFavourPreciseRows) {
  std::vector<ReportRow> rows(3);
  const double sizes[] = {1.0, std::exp(1.0), std::exp(2.0)};
  const double tvs[] = {1.0, std::exp(-1.0), std::exp(-1.0)};
  const double ses[] = {1e-4, 1e-4, 1.0};
  for (int i = 0; i < 3; ++i) rows[static_cast<std::size_t>(i)] = ReportRow{sizes[i], 0, tvs[i], ses[i] * tvs[i]};
  EXPECT_NEAR(fit_log_log_slope(rows).slope, -1.0, 1e-3);
  rows.pop_back();
  EXPECT_THROW(fit_log_log_slope(rows), DomainError);
}

TEST(Config, Validation) {
  json base{{"model", {{"kind", "constant"}, {"value", {0}}}}, {"sizes", {1, 2, 3}}, {"replicates", 1000}};
  EXPECT_NO_THROW(config_from_json(base));
  auto j = base;
  j["sizes"] = {1, 2};
  EXPECT_THROW(config_from_json(j), DomainError);
  j = base;
  j["sizes"] = {1, 3, 3};
  EXPECT_THROW(config_from_json(j), DomainError);
  j = base;
  j["replicates"] = 999;
  EXPECT_THROW(config_from_json(j), DomainError);
  j = base;
  j["model"]["kind"] = "ising";
  EXPECT_THROW(config_from_json(j), DomainError);
  j = base;
  j.erase("model");
  EXPECT_THROW(config_from_json(j), DomainError);
  j = base;
  j["eps_w"] = 1.5;
  EXPECT_THROW(config_from_json(j), DomainError);
  j = base;
  j["model"] = {{"kind", "markov"}, {"transition", {{0, 1}, {1, 0}}}};
  EXPECT_THROW(config_from_json(j), DomainError);
}

TEST(Experiment, ConstantModelDoesNotConverge) {
  const auto report = run_convergence_experiment(constant_config());
  ASSERT_EQ(report.rows.size(), 4u);
  // 1 - (2 Phi(1/2) - 1)
  for (const auto& r : report.rows) {
    EXPECT_NEAR(r.tv_estimate, 0.617075077451973792724590778783, 1e-12);
    EXPECT_TRUE(r.exact);
    EXPECT_FALSE(r.bound.has_value());
  }
  EXPECT_NEAR(report.fit.slope, 0.0, 1e-9);
  EXPECT_EQ(report.reference_slope, 0.0);
}

TEST(Experiment, SymmetricChainHalfRate) {
  const auto report = run_convergence_experiment(markov_config(0.3));
  for (const auto& r : report.rows) EXPECT_TRUE(r.exact);
  EXPECT_GT(report.rows[0].tv_estimate, report.rows[1].tv_estimate);
  EXPECT_GT(report.rows[1].tv_estimate, report.rows[2].tv_estimate);
  EXPECT_NEAR(report.fit.slope, -0.5, 0.1);
  EXPECT_EQ(report.reference_slope, -0.5);
}

TEST(Experiment, IidChainDecaysFaster) {
  // Binomial(n, 1/2) is symmetric about its mean, so the n^{-1/2} term vanishes.
  const auto report = run_convergence_experiment(markov_config(0.5));
  EXPECT_NEAR(report.fit.slope, -1.0, 0.1);
  EXPECT_NEAR(report.rows[0].tv_estimate, 7.7e-4, 0.5e-4);
}

TEST(Experiment, DeterministicAndThreadIndependent) {
  auto cfg = config_from_json(json{{"model", {{"kind", "max_points"}, {"strips", {{0, 1}, {1, 2}}}}},
                                   {"sizes", {100, 200, 400}},
                                   {"replicates", 2000},
                                   {"bootstrap_resamples", 10},
                                   {"seed", 11}});
  const auto a = report_to_json(run_convergence_experiment(cfg)).dump();
  const auto b = report_to_json(run_convergence_experiment(cfg)).dump();
  cfg.threads = 3;
  const auto c = report_to_json(run_convergence_experiment(cfg)).dump();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  cfg.seed = 12;
  EXPECT_NE(a, report_to_json(run_convergence_experiment(cfg)).dump());
}

TEST(Experiment, ColoringCarriesBoundBreakdown) {
  const auto cfg = config_from_json(json{{"model", {{"kind", "coloring"}, {"pi", {0.4, 0.35, 0.25}}}},
                                         {"sizes", {30, 60, 120}},
                                         {"replicates", 5000},
                                         {"bootstrap_resamples", 10},
                                         {"eps_w", 0.25}});
  const auto report = run_convergence_experiment(cfg);
  for (const auto& r : report.rows) {
    EXPECT_FALSE(r.exact);
    EXPECT_TRUE(r.closed_form_moments);
    ASSERT_TRUE(r.bound.has_value());
    EXPECT_EQ(r.bound->eps_w, 0.25);
    // sum_j (|N_j| + 1)^2 / m with |N_j| = 2 on a cycle
    EXPECT_NEAR(r.bound->dbar2, 9.0 * r.size / static_cast<double>(r.m), 1e-12);
    EXPECT_GE(r.bound->gamma, 1.0);
    EXPECT_NEAR(r.bound->combined, r.bound->eps_w_term + r.bound->msqrt_term, 1e-9 * r.bound->combined);
  }
  EXPECT_LT(report.rows[2].bound->msqrt_term / report.rows[2].m, report.rows[0].bound->msqrt_term / report.rows[0].m);
}

TEST(Experiment, ErrorsNameTheSize) {
  const auto cfg = config_from_json(json{{"model", {{"kind", "coloring"}, {"pi", {0.25, 0.25, 0.25, 0.25}}}},
                                         {"sizes", {6, 8, 40}},
                                         {"replicates", 1000},
                                         {"tv", "exact"}});
  try {
    run_convergence_experiment(cfg);
    FAIL() << "expected a budget error";
  } catch (const BudgetError& e) {
    EXPECT_NE(std::string(e.what()).find("size 40"), std::string::npos) << e.what();
  }
}

TEST(Report, CsvShape) {
  ConvergenceReport empty;
  EXPECT_EQ(report_to_csv(empty), std::string(kCsvHeader) + "\n");
  const auto report = run_convergence_experiment(constant_config());
  const auto csv = report_to_csv(report);
  std::istringstream in(csv);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 1 + 4);
  EXPECT_NE(csv.find("0.61707507745197"), std::string::npos);
  EXPECT_NE(csv.find(",nan"), std::string::npos);
}

TEST(Report, JsonRoundTrip) {
  const auto cfg = config_from_json(json{{"model", {{"kind", "coloring"}, {"pi", {0.5, 0.5}}}},
                                         {"sizes", {6, 8, 10}},
                                         {"replicates", 1000},
                                         {"eps_w", "mineka"}});
  const auto report = run_convergence_experiment(cfg);
  const auto back = report_from_json(json::parse(report_to_json(report).dump()));
  EXPECT_EQ(report_to_json(back), report_to_json(report));
  ASSERT_EQ(back.rows.size(), 3u);
  EXPECT_EQ(back.rows[1].tv_estimate, report.rows[1].tv_estimate);
  EXPECT_EQ(back.fit.slope, report.fit.slope);
}

TEST(Report, EmitReportWritesAndFails) {
  const auto report = run_convergence_experiment(constant_config());
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "dnapprox_report_test.json";
  emit_report(report, ReportFormat::Json, path);
  std::ifstream in(path);
  const auto j = json::parse(in);
  EXPECT_EQ(j.at("rows").size(), 4u);
  std::filesystem::remove(path);
  const std::filesystem::path bad = "/nonexistent-dir/report.csv";
  try {
    emit_report(report, ReportFormat::Csv, bad);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(bad.string()), std::string::npos);
  }
}

TEST(Format, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
}

}  // namespace
}  // namespace dnapprox
