#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "diffcal/error.hpp"
#include "diffcal/harness/harness.hpp"

namespace diffcal::harness {
namespace {

using est::Protocol;

ExperimentPlan small_plan() {
  ExperimentPlan p;
  p.n_control = 6;
  p.n_experimental = 6;
  p.seed_base = 1000;
  return p;
}

const SummaryRow& row_of(const SummaryTable& t, Protocol p, const std::string& mark) {
  for (const auto& r : t.rows) {
    if (r.protocol == p && r.mark == mark) return r;
  }
  throw std::runtime_error("row not found: " + mark);
}

TEST(ExperimentPlan, Validation) {
  ExperimentPlan p;
  EXPECT_NO_THROW(p.validate());
  p.n_control = 0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.injected_dC_over_C = -1.0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.mark_offsets.clear();
  EXPECT_THROW(p.validate(), Error);
  p.protocol = ProtocolChoice::type2;
  EXPECT_NO_THROW(p.validate());
  p = {};
  p.step_time = 1e9;
  EXPECT_THROW(p.validate(), Error);
}

TEST(ExperimentPlan, DefaultsFollowThermostat) {
  ExperimentPlan p;
  EXPECT_DOUBLE_EQ(p.resolved_step_time(), 1800.0);
  EXPECT_DOUBLE_EQ(p.nominal_k(), 1.0);
  p.base_config.sample_mass.R = 0.0151;
  EXPECT_GT(p.nominal_k(), 1.0);
}

TEST(ProtocolChoice, Parse) {
  EXPECT_EQ(parse_protocol_choice("both"), ProtocolChoice::both);
  EXPECT_EQ(protocol_choice_name(ProtocolChoice::type2), "type2");
  EXPECT_THROW(parse_protocol_choice("type3"), Error);
}

TEST(RunBatch, NullExperiment) {
  ExperimentPlan p;
  p.n_control = 20;
  p.n_experimental = 20;
  const auto r = run_batch(p);
  EXPECT_TRUE(r.failures.empty());
  ASSERT_EQ(r.summary.rows.size(), 4u);
  for (const auto& row : r.summary.rows) {
    EXPECT_EQ(row.n, 20);
    EXPECT_EQ(row.n_control, 20);
    EXPECT_LT(std::abs(row.dC_over_C_mean), 2.0 * row.se) << row.mark;
    EXPECT_LT(std::abs(row.dt_mean), 3.0 * row.dt_se) << row.mark;
    EXPECT_GE(row.se, row.dC_over_C_sd / std::sqrt(20.0));
  }
}

TEST(RunBatch, Type2RecoversInjectedValue) {
  ExperimentPlan p;
  p.protocol = ProtocolChoice::type2;
  p.n_control = 24;
  p.n_experimental = 24;
  p.injected_dC_over_C = 0.0208;
  const auto r = run_batch(p);
  const auto& row = row_of(r.summary, Protocol::type2, "steady");
  EXPECT_NEAR(row.dC_over_C_mean, 0.0208, 0.004);
  EXPECT_EQ(row.time_after_excitation, "steady");
}

TEST(RunBatch, NoiselessDtShrinksAcrossMarks) {
  ExperimentPlan p = small_plan();
  p.protocol = ProtocolChoice::type1;
  p.injected_dC_over_C = 0.05;
  p.base_config.noise = sim::NoiseModel::noiseless();
  p.base_config.thermostat.control_accuracy = 0.0;
  const auto r = run_batch(p);
  const double d30 = row_of(r.summary, Protocol::type1, "30min").dt_mean;
  const double d45 = row_of(r.summary, Protocol::type1, "45min").dt_mean;
  const double d60 = row_of(r.summary, Protocol::type1, "60min").dt_mean;
  EXPECT_LT(d30, 0.0);
  EXPECT_GT(std::abs(d30), std::abs(d45));
  EXPECT_GT(std::abs(d45), std::abs(d60));
  EXPECT_EQ(row_of(r.summary, Protocol::type1, "30min").time_after_excitation, "50min");
}

TEST(RunBatch, ReproducibleAndThreadIndependent) {
  ExperimentPlan p = small_plan();
  p.injected_dC_over_C = 0.02;
  p.threads = 1;
  const auto a = run_batch(p);
  p.threads = 4;
  const auto b = run_batch(p);
  ASSERT_EQ(a.summary.rows.size(), b.summary.rows.size());
  for (std::size_t i = 0; i < a.summary.rows.size(); ++i) {
    EXPECT_EQ(a.summary.rows[i].dC_over_C_mean, b.summary.rows[i].dC_over_C_mean);
    EXPECT_EQ(a.summary.rows[i].dC_over_C_sd, b.summary.rows[i].dC_over_C_sd);
    EXPECT_EQ(a.summary.rows[i].delta_T_mean, b.summary.rows[i].delta_T_mean);
  }
  ASSERT_EQ(a.experiments.size(), b.experiments.size());
  for (std::size_t i = 0; i < a.experiments.size(); ++i) {
    EXPECT_EQ(a.experiments[i].seed, b.experiments[i].seed);
  }
}

TEST(RunBatch, SeedsAreDistinct) {
  const auto r = run_batch(small_plan());
  std::set<std::uint64_t> seeds;
  for (const auto& a : r.experiments) seeds.insert(a.seed);
  for (const auto& a : r.controls) seeds.insert(a.seed);
  // Two protocols share each simulated attempt.
  EXPECT_EQ(seeds.size(), 12u);
  EXPECT_EQ(r.experiments.front().seed, 1000u);
}

TEST(RunBatch, MonotoneRecovery) {
  double previous = -1.0;
  for (double injected : {0.01, 0.02, 0.05}) {
    ExperimentPlan p = small_plan();
    p.protocol = ProtocolChoice::type2;
    p.injected_dC_over_C = injected;
    const double mean = run_batch(p).summary.rows.at(0).dC_over_C_mean;
    EXPECT_GT(mean, previous) << injected;
    previous = mean;
  }
}

TEST(RunBatch, ProtocolFailuresAreRecordedNotFatal) {
  ExperimentPlan p = small_plan();
  p.experimental_initial_offset = {0.5, 0.0};
  const auto r = run_batch(p);
  int type1_failures = 0;
  for (const auto& f : r.failures) {
    if (f.protocol == Protocol::type1) {
      ++type1_failures;
      EXPECT_EQ(f.code, ErrorCode::begin_tolerance);
      EXPECT_EQ(f.kind, est::AttemptKind::experimental);
    }
  }
  EXPECT_EQ(type1_failures, 6);
  ASSERT_EQ(r.summary.rows.size(), 1u);
  EXPECT_EQ(r.summary.rows[0].protocol, Protocol::type2);
}

TEST(RunBatch, FailsWhenEveryAttemptFails) {
  ExperimentPlan p = small_plan();
  p.protocol = ProtocolChoice::type1;
  p.experimental_initial_offset = {0.5, 0.0};
  try {
    run_batch(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::begin_tolerance);
  }
}

TEST(RunBatch, PairedCalibration) {
  ExperimentPlan p = small_plan();
  p.calibration = CalibrationMode::paired;
  p.protocol = ProtocolChoice::type2;
  const auto r = run_batch(p);
  const auto& row = r.summary.rows.at(0);
  EXPECT_NEAR(row.se, row.dC_over_C_sd / std::sqrt(6.0), 1e-15);
  const auto& e0 = r.experiments.at(0);
  const auto& c0 = r.controls.at(0);
  EXPECT_DOUBLE_EQ(e0.calibrated_dt[0], e0.record.marks[0].dt - c0.record.marks[0].dt);
}

TEST(RecoveryReport, Examples) {
  SummaryTable t;
  SummaryRow row;
  row.protocol = Protocol::type2;
  row.mark = "steady";
  row.n = 24;
  row.dC_over_C_mean = 0.0208;
  row.dC_over_C_sd = 0.0082;
  t.rows.push_back(row);
  auto rep = recovery_report(0.0208, t);
  ASSERT_EQ(rep.size(), 1u);
  EXPECT_EQ(rep[0].bias, 0.0);
  EXPECT_EQ(rep[0].z, 0.0);
  EXPECT_TRUE(rep[0].pass);
  EXPECT_NEAR(rep[0].se, 0.0082 / std::sqrt(24.0), 1e-15);

  const double se = 0.0082 / std::sqrt(24.0);
  t.rows[0].dC_over_C_mean = 0.0208 + 5 * se;
  rep = recovery_report(0.0208, t);
  EXPECT_NEAR(rep[0].z, 5.0, 1e-9);
  EXPECT_FALSE(rep[0].pass);

  t.rows[0].se = 2 * se;
  EXPECT_TRUE(recovery_report(0.0208, t)[0].pass);

  t.rows[0].dC_over_C_sd = 0.0;
  t.rows[0].se = 0.0;
  EXPECT_FALSE(recovery_report(0.0, t)[0].pass);
  t.rows[0].dC_over_C_mean = 0.0;
  EXPECT_TRUE(recovery_report(0.0, t)[0].pass);

  EXPECT_THROW(recovery_report(0.0, SummaryTable{}), Error);
}

}  // namespace
}  // namespace diffcal::harness
