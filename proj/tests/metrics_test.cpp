#include <gtest/gtest.h>

#include <cmath>

#include "canfilt/metrics.hpp"
#include "canfilt/sim.hpp"

using namespace canfilt;

namespace {

const SymMat2d kH0{2.0, 0.3, 1.5};

RunRecord<double> synthetic_record(std::size_t n, double dt, double error_value) {
  RunRecord<double> rec;
  rec.dt = dt;
  rec.steps = n;
  for (std::size_t k = 0; k <= n; ++k)
    rec.push_row(dt * static_cast<double>(k), Vec2d{0.1, 0.0}, 0.1, 0.1 - error_value, error_value, kH0);
  rec.final_H = kH0;
  return rec;
}

FilterConfig short_default_config() {
  FilterConfig cfg;
  cfg.T = 2.0;
  return cfg;
}

}  // namespace

TEST(Indicators, ConstantErrorCollapsesStatistics) {
  const auto rec = synthetic_record(100, 0.01, -0.25);
  const auto ind = compute_indicators(rec);
  EXPECT_DOUBLE_EQ(ind.E_max, 0.25);
  EXPECT_NEAR(ind.E_rms, 0.25, 1e-12);
  EXPECT_EQ(ind.N, 100u);
}

TEST(Indicators, FrozenHamiltonianLambdaMin) {
  const auto ind = compute_indicators(synthetic_record(50, 0.01, 0.0));
  EXPECT_NEAR(ind.lambda_min, 1.359487, 1e-6);
}

TEST(Indicators, RejectsRecordsWithoutSamples) {
  RunRecord<double> empty;
  EXPECT_THROW((void)compute_indicators(empty), std::invalid_argument);
  RunRecord<double> only_ic;
  only_ic.push_row(0.0, Vec2d{}, 0.0, 0.0, 0.0, kH0);
  EXPECT_THROW((void)compute_indicators(only_ic), std::invalid_argument);
}

TEST(Indicators, StreamingMatchesPostHoc) {
  const auto rec = run_simulation(short_default_config());
  StreamingIndicators<double> stream;
  for (std::size_t k = 1; k < rec.rows(); ++k)
    stream.push(Vec2d{rec.y1[k], rec.y2[k]}, rec.e[k], rec.hamiltonian_at(k));
  const auto a = compute_indicators(rec);
  const auto b = stream.finalize(rec.dt);
  EXPECT_EQ(a.N, b.N);
  EXPECT_NEAR(a.E_rms, b.E_rms, 1e-12 * std::max(1.0, a.E_rms));
  EXPECT_DOUBLE_EQ(a.E_max, b.E_max);
  EXPECT_DOUBLE_EQ(a.Y_max, b.Y_max);
  EXPECT_DOUBLE_EQ(a.lambda_min, b.lambda_min);
}

TEST(Indicators, LambdaMinHasNoCachingShortcut) {
  const auto rec = run_simulation(short_default_config());
  const auto ind = compute_indicators(rec);
  double direct = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < rec.rows(); ++k) direct = std::min(direct, eig(rec.hamiltonian_at(k)).lambda2);
  EXPECT_DOUBLE_EQ(ind.lambda_min, direct);
  // the stored per-row trace agrees with recomputation
  for (std::size_t k = 0; k < rec.rows(); ++k)
    ASSERT_DOUBLE_EQ(rec.lambda_min_h[k], eig(rec.hamiltonian_at(k)).lambda2);
}

TEST(Lyapunov, TraceIsHalfSquaredError) {
  const auto rec = run_simulation(short_default_config());
  const auto trace = lyapunov_trace(rec);
  ASSERT_EQ(trace.size(), rec.rows());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    ASSERT_EQ(trace[k].first, rec.t[k]);
    ASSERT_EQ(trace[k].second, rec.e[k] * rec.e[k] / 2.0);
  }
}

TEST(Lyapunov, ZeroErrorGivesZeroEnergy) {
  const auto rec = synthetic_record(20, 0.01, 0.0);
  for (const auto& [t, v] : lyapunov_trace(rec)) ASSERT_EQ(v, 0.0);
}

TEST(Lyapunov, ConstantTwoError) {
  const auto rec = synthetic_record(20, 0.01, 2.0);
  for (const auto& [t, v] : lyapunov_trace(rec)) ASSERT_EQ(v, 2.0);
}

TEST(Lyapunov, BoundedByHalfPeakSquared) {
  const auto rec = run_simulation(short_default_config());
  const auto ind = compute_indicators(rec);
  double v_max = 0.0;
  for (std::size_t k = 1; k < rec.rows(); ++k) v_max = std::max(v_max, rec.V[k]);
  EXPECT_LE(v_max, 0.5 * ind.E_max * ind.E_max + 1e-15);
}

TEST(Boundedness, ReferenceRunStaysInsideUnitBall) {
  const auto rec = run_simulation(short_default_config());
  const auto report = boundedness_check(rec, 1.0, 10.0);
  EXPECT_TRUE(report.pass());
}

TEST(Boundedness, QuiescentRunPassesAnyBound) {
  FilterConfig cfg;
  cfg.T = 1.0;
  cfg.alpha = 0.0;
  cfg.y0 = {};
  cfg.signal.kind = SignalKind::constant;
  cfg.signal.constant_value = 0.0;
  cfg.signal.noise_std = 0.0;
  const auto rec = run_simulation(cfg);
  EXPECT_TRUE(boundedness_check(rec, 1e-9, 1e-9).pass());
}

TEST(Boundedness, FlagsDivergingRecord) {
  RunRecord<double> rec;
  rec.dt = 1.0;
  rec.steps = 10;
  for (std::size_t k = 0; k <= 10; ++k)
    rec.push_row(static_cast<double>(k), Vec2d{0.0, 0.0}, 0.0, 0.0, static_cast<double>(k), kH0);
  const auto report = boundedness_check(rec, 1.0, 2.0);
  EXPECT_FALSE(report.pass());
  EXPECT_FALSE(report.violations.empty());
}

TEST(Boundedness, RejectsNonPositiveBounds) {
  const auto rec = synthetic_record(5, 0.01, 0.0);
  EXPECT_THROW((void)boundedness_check(rec, 0.0, 1.0), std::invalid_argument);
}

TEST(Transient, DetectsSettling) {
  RunRecord<double> rec;
  rec.dt = 0.01;
  rec.steps = 1000;
  for (std::size_t k = 0; k <= 1000; ++k) {
    const double e = k < 200 ? 5.0 : 0.01;  // loud for 2 s, then quiet
    rec.push_row(0.01 * static_cast<double>(k), Vec2d{}, 0.0, -e, e, kH0);
  }
  const auto settle = estimate_transient(rec);
  ASSERT_TRUE(settle.has_value());
  EXPECT_NEAR(*settle, 2.0, 0.05);
}

TEST(Transient, EmptyWhenNeverSettles) {
  // spikes every half second keep breaking the one-second quiet window
  RunRecord<double> rec;
  rec.dt = 0.01;
  rec.steps = 1000;
  for (std::size_t k = 0; k <= 1000; ++k) {
    const double e = (k % 50 == 0) ? 5.0 : 0.01;
    rec.push_row(0.01 * static_cast<double>(k), Vec2d{}, 0.0, -e, e, kH0);
  }
  EXPECT_FALSE(estimate_transient(rec).has_value());
}
