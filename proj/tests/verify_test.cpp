#include <gtest/gtest.h>

#include <cmath>

#include "canfilt/verify.hpp"

using namespace canfilt;
using canfilt::verify::PropertyReport;

TEST(Oracle, SeriesExponentialOfRotationGenerator) {
  // exp(-J t) is the rotation [[cos t, -sin t], [sin t, cos t]]
  const double t = 0.8;
  const Mat2d e = verify::oracle::expm_series(SystemMatrices<double>::J() * -t);
  EXPECT_NEAR(e.a11, std::cos(t), 1e-14);
  EXPECT_NEAR(e.a12, -std::sin(t), 1e-14);
  EXPECT_NEAR(e.a21, std::sin(t), 1e-14);
  EXPECT_NEAR(e.a22, std::cos(t), 1e-14);
}

TEST(Oracle, GridSearchFindsDiagonalClip) {
  const SymMat2d found = verify::oracle::project_psd_grid(SymMat2d{1.0, 0.0, -1.0}, 1e-2);
  EXPECT_NEAR(found.h11, 1.0, 1e-9);
  EXPECT_NEAR(found.h12, 0.0, 1e-9);
  EXPECT_NEAR(found.h22, 0.0, 1e-9);
}

TEST(Check, EigenvalueDerivative) {
  const PropertyReport r = verify::check_eigenvalue_derivative(200);
  EXPECT_TRUE(r.pass) << r.worst_violation;
  EXPECT_EQ(r.trials, 200);
  // central differences shrink quadratically with the probe step
  EXPECT_NEAR(r.slope, 2.0, 0.8);
}

TEST(Check, ProjectionOptimalityQuick) {
  const auto reports = verify::check_projection_optimality(500, 2e-3);
  ASSERT_EQ(reports.size(), 2u);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.name << ": " << r.worst_violation;
}

TEST(Check, TransitionIdentities) {
  const auto reports = verify::check_transition_identities();
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_TRUE(reports[0].pass) << reports[0].worst_violation;
  EXPECT_NEAR(reports[0].slope, 1.0, 0.2);
  EXPECT_TRUE(reports[1].pass) << reports[1].worst_violation;
}

TEST(Check, GronwallBound) {
  const PropertyReport r = verify::check_gronwall_bound();
  EXPECT_TRUE(r.pass) << r.note << ": " << r.worst_violation;
  EXPECT_LE(r.worst_violation, 0.0);
}

TEST(Check, SensitivityBound) {
  const auto reports = verify::check_sensitivity_bound();
  ASSERT_EQ(reports.size(), 3u);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.name << ": " << r.worst_violation;
}

TEST(Check, SensitivityRejectsAdaptiveConfigs) {
  auto configs = verify::default_sensitivity_configs();
  configs[0].run.alpha = 1e-4;
  EXPECT_THROW((void)verify::check_sensitivity_bound(configs), std::invalid_argument);
}

TEST(Check, PsdInvarianceOnReducedGrid) {
  std::vector<FilterConfig> grid;
  for (const double alpha : {1e-4, 1.0}) {
    for (const ProjMode proj : {ProjMode::project_update, ProjMode::project_gradient}) {
      FilterConfig cfg;
      cfg.T = 10.0;
      cfg.dt = 0.02;
      cfg.alpha = alpha;
      cfg.proj_mode = proj;
      grid.push_back(cfg);
    }
  }
  const PropertyReport r = verify::check_psd_invariance(grid);
  EXPECT_TRUE(r.pass) << r.worst_violation << " " << r.note;
}

TEST(Check, InjectedProjectionBugIsCaught) {
  // keep the negative part instead of the positive part: iterates leave the
  // cone and the invariance gate must notice
  const auto negated_clip = [](const Mat2d& m) {
    const SymMat2d s = symmetrize(m);
    const auto ep = eig(s);
    const double l1 = std::min(ep.lambda1, 0.0);
    const double l2 = std::min(ep.lambda2, 0.0);
    return SymMat2d{l1 * ep.v1.x * ep.v1.x + l2 * ep.v2.x * ep.v2.x,
                    l1 * ep.v1.x * ep.v1.y + l2 * ep.v2.x * ep.v2.y,
                    l1 * ep.v1.y * ep.v1.y + l2 * ep.v2.y * ep.v2.y};
  };
  FilterConfig cfg;
  cfg.T = 1.0;
  cfg.alpha = 1.0;  // make the projection matter quickly
  const PropertyReport r = verify::check_psd_invariance({cfg}, negated_clip);
  EXPECT_FALSE(r.pass);
}

TEST(Suite, NoneSelectionIsEmptySuccess) {
  const auto none = verify::run_suite({"none"});
  EXPECT_TRUE(none.empty());
  EXPECT_TRUE(verify::all_passed(none));
}

TEST(Suite, UnknownSelectionRejected) {
  EXPECT_THROW((void)verify::run_suite({"definitely_not_a_check"}), std::invalid_argument);
}

TEST(Suite, SingleSelectionRunsOneCheck) {
  const auto reports = verify::run_suite({"eigenvalue_derivative"});
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].name, "eigenvalue_derivative");
}

TEST(Report, JsonShape) {
  const PropertyReport r = verify::make_report("demo", 10, 0.5, 1.0, 1.5, "context");
  const auto j = verify::to_json(r);
  EXPECT_EQ(j["name"], "demo");
  EXPECT_EQ(j["trials"], 10);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_DOUBLE_EQ(j["slope"].get<double>(), 1.5);
  EXPECT_EQ(j["note"], "context");
  // pass is derived from the violation/tolerance pair
  EXPECT_FALSE(verify::make_report("demo", 1, 2.0, 1.0).pass);
}
