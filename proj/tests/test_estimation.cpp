#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace snowcast;
using snowcast::test::ymd;

namespace {

Dataset temperature_only(const std::vector<double>& temps, const Date& start = ymd(1990, 1, 1)) {
  std::vector<DailyRecord> r;
  for (std::size_t i = 0; i < temps.size(); ++i) r.push_back({add_days(start, static_cast<long long>(i)), temps[i], 0.0, 0.0});
  return Dataset(std::move(r));
}

Dataset seasonal_temperature(int m, int p, int days, std::uint64_t seed) {
  TempParams t;
  t.trend = FourierTrend{4.0, std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
  if (m >= 1) t.trend.a[0] = -3.0, t.trend.b[0] = -8.0;
  t.ar.assign(p, 0.0);
  if (p >= 1) t.ar[0] = 0.6;
  t.innovation_sd = 2.5;
  RandomStream rng(seed);
  LagHistory dev(t.ar.size());
  std::vector<double> temps;
  for (int i = 0; i < days; ++i) temps.push_back(temp_step(t, season_day(add_days(ymd(1990, 1, 1), i)), dev, rng));
  return temperature_only(temps);
}

template <typename P>
void expect_consistent(const FitResult<P>& r, const FitConfig& config) {
  EXPECT_TRUE(test::nondecreasing(r.trace));
  EXPECT_DOUBLE_EQ(r.aic, 2.0 * r.free_parameters - 2.0 * r.log_likelihood);
  EXPECT_EQ(r.trace.back(), r.log_likelihood);
  if (r.converged) EXPECT_LE(inf_norm(r.gradient), 10 * config.convergence_tol * std::abs(r.log_likelihood));
}

}  // namespace

TEST(Maximize, QuadraticBowl) {
  const std::vector<double> c{1.5, -2.0, 30.0};
  Objective f = [&](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s -= (x[i] - c[i]) * (x[i] - c[i]);
    return s;
  };
  for (auto start : {std::vector<double>{0, 0, 0}, std::vector<double>{-50, 20, 1}}) {
    const auto r = maximize(f, start, FitConfig{});
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(r.x[i], c[i], 1e-4);
    EXPECT_TRUE(test::nondecreasing(r.trace));
  }
}

TEST(Maximize, BadlyScaledBowl) {
  Objective f = [](std::span<const double> x) { return -1e4 * x[0] * x[0] - 1e-2 * (x[1] - 3) * (x[1] - 3) - 5.0; };
  const auto r = maximize(f, {1.0, 0.0}, FitConfig{});
  EXPECT_NEAR(r.x[0], 0.0, 1e-4);
  EXPECT_NEAR(r.x[1], 3.0, 1e-3);
  EXPECT_TRUE(test::nondecreasing(r.trace));
}

TEST(Maximize, StartAtOptimum) {
  Objective f = [](std::span<const double> x) { return -(x[0] * x[0] + x[1] * x[1]) - 1.0; };
  const auto r = maximize(f, {0.0, 0.0}, FitConfig{});
  EXPECT_LE(r.iterations, 1);
  EXPECT_TRUE(r.converged);
}

TEST(Maximize, NonFiniteStartIsAnError) {
  Objective f = [](std::span<const double>) { return std::nan(""); };
  EXPECT_THROW(maximize(f, {0.0}, FitConfig{}), std::domain_error);
  Objective g = [](std::span<const double>) { return -INFINITY; };
  EXPECT_THROW(maximize(g, {0.0}, FitConfig{}), std::domain_error);
}

TEST(Maximize, RespectsIterationLimit) {
  Objective f = [](std::span<const double> x) { return -std::pow(x[0] - 100, 2) - std::pow(x[1] + 3, 4); };
  FitConfig c;
  c.max_iterations = 3;
  const auto r = maximize(f, {0.0, 0.0}, c);
  EXPECT_LE(r.iterations, 3);
  EXPECT_TRUE(test::nondecreasing(r.trace));
}

TEST(FitConfig, Validation) {
  FitConfig c;
  EXPECT_NO_THROW(c.validate());
  c.backtrack_factor = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = FitConfig{};
  c.gradient_step = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Reparameterization, ShortTermRoundTrip) {
  const ShortTermScales sc{3.5, 12.0, 25.0};
  const ShortTermParams p = kOsloShortTerm;
  const ShortTermParams back = from_internal(to_internal(p, sc), sc);
  const double a[] = {p.mu, p.beta0, p.beta1, p.beta2, p.beta3, p.beta4, p.beta5, p.beta6, p.beta7, p.sigma1_sq, p.sigma2_sq};
  const double b[] = {back.mu,    back.beta0, back.beta1, back.beta2, back.beta3,     back.beta4,
                      back.beta5, back.beta6, back.beta7, back.sigma1_sq, back.sigma2_sq};
  for (int i = 0; i < 11; ++i) EXPECT_NEAR(a[i], b[i], 1e-12 * std::max(1.0, std::abs(a[i]))) << i;
}

TEST(Reparameterization, WeatherAndDirectRoundTrip) {
  const Dataset d = test::oslo_synthetic(3 * 365, 3, 0.1);
  TempParams t;
  t.trend = FourierTrend{3.0, {1.0, -0.5}, {2.0, 0.1}};
  t.ar = {0.7, -0.1};
  t.innovation_sd = 2.1;
  const TempParams tb = from_internal(to_internal(t), t);
  EXPECT_NEAR(tb.trend.b[0], 2.0, 1e-12);
  EXPECT_NEAR(tb.ar[1], -0.1, 1e-12);
  EXPECT_NEAR(tb.innovation_sd, 2.1, 1e-12);

  PrecipParams p = with_orders(oslo_like_climate().precip, PrecipOrders{2, 2, 2, 1, 2, 1});
  p.amount_temp_poly = {0.2, -0.05};
  p.zero_temp_poly = {0.3};
  p.zero_occ_lags = {-0.9, 0.2};
  p.temp_center = 4.0;
  p.temp_scale = 7.0;
  const PrecipDesign pd = make_precip_design(d, 2);
  const PrecipCoordinates pc(pd, p);
  const PrecipParams pb = from_internal(to_internal(p, pc), p, pc);
  EXPECT_NEAR(pb.amount_trend.a0, p.amount_trend.a0, 1e-12);
  EXPECT_NEAR(pb.amount_trend.b[0], p.amount_trend.b[0], 1e-12);
  EXPECT_NEAR(pb.amount_temp_poly[1], p.amount_temp_poly[1], 1e-12);
  EXPECT_NEAR(pb.zero_occ_lags[1], p.zero_occ_lags[1], 1e-12);
  EXPECT_NEAR(pb.amount_cv_shape, p.amount_cv_shape, 1e-12);

  DirectParams q = with_orders(DirectParams{}, DirectOrders{2, 1, 3});
  q.trend.a0 = 1.1;
  q.trend.a[1] = 0.3;
  q.occ_lags = {0.5};
  q.depth_lags = {0.03, -0.01, 0.004};
  q.zero_slope = -0.7;
  q.sigma1_sq = 4.0;
  const DirectDesign dd = make_direct_design(d, 3);
  const DirectCoordinates dc(dd, q, direct_depth_scale(dd));
  const DirectParams qb = from_internal(to_internal(q, dc), q, dc);
  EXPECT_NEAR(qb.trend.a0, 1.1, 1e-12);
  EXPECT_NEAR(qb.trend.a[1], 0.3, 1e-12);
  EXPECT_NEAR(qb.depth_lags[2], 0.004, 1e-12);
  EXPECT_NEAR(qb.zero_slope, -0.7, 1e-12);
  EXPECT_NEAR(qb.sigma1_sq, 4.0, 1e-12);
}

TEST(Whitening, RoundTrip) {
  RandomStream rng(4);
  std::vector<double> rows;
  for (int i = 0; i < 500; ++i) {
    const double a = rng.normal();
    rows.push_back(a);
    rows.push_back(a + 0.01 * rng.normal());  // nearly collinear
    rows.push_back(5.0);                      // constant column
  }
  const Whitening w(rows, 3);
  const std::vector<double> beta{0.4, -2.0, 0.7};
  const auto u = w.to_internal(1.5, beta);
  std::vector<double> back(3);
  const double intercept = w.from_internal(u, back);
  EXPECT_NEAR(intercept, 1.5, 1e-10);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(back[i], beta[i], 1e-8);
}

TEST(FitShortTerm, WilksHeuristic) {
  // The maximum should beat the truth by about half the parameter count.
  double gap = 0.0;
  const int reps = 20;
  FitConfig config;
  for (int rep = 0; rep < reps; ++rep) {
    const Dataset d = test::oslo_synthetic(5 * 365, 200 + rep);
    const auto steps = short_term_transitions(d);
    const auto r = fit_short_term(std::span<const ShortTermTransition>(steps), config);
    expect_consistent(r, config);
    gap += r.log_likelihood - log_likelihood(kOsloShortTerm, std::span<const ShortTermTransition>(steps));
  }
  EXPECT_GE(gap / reps, -0.5 * ShortTermParams::kFreeParameters);
}

TEST(FitShortTerm, RefitIsAFixedPoint) {
  const Dataset d = test::oslo_synthetic(10 * 365, 9);
  FitConfig config;
  const auto r = fit_short_term(d, config);
  const auto again = fit_short_term(d, config, r.params);
  expect_consistent(again, config);
  EXPECT_GE(again.log_likelihood, r.log_likelihood);
  EXPECT_LT(again.log_likelihood - r.log_likelihood, 1e-6 * std::abs(r.log_likelihood));
  EXPECT_NEAR(again.params.beta2, r.params.beta2, 0.05 * std::abs(r.params.beta2));
  EXPECT_NEAR(again.params.beta7, r.params.beta7, 0.05 * std::abs(r.params.beta7));
}

TEST(FitShortTerm, NoUsableTransitions) {
  EXPECT_THROW(fit_short_term(Dataset{}, FitConfig{}), std::domain_error);
}

TEST(FitTemperature, WhiteNoise) {
  RandomStream rng(5);
  std::vector<double> temps;
  for (int i = 0; i < 2000; ++i) temps.push_back(3.0 + 1.7 * rng.normal());
  const double mean = detail::mean_of(temps);
  double ss = 0.0;
  for (double t : temps) ss += (t - mean) * (t - mean);
  const double sd = std::sqrt(ss / temps.size());
  FitConfig config;
  const auto r = fit_temperature(temperature_only(temps), TempOrders{0, 0}, config);
  expect_consistent(r, config);
  EXPECT_NEAR(r.params.trend.a0, mean, 0.02 * std::abs(mean));
  EXPECT_NEAR(r.params.innovation_sd, sd, 0.02 * sd);
}

TEST(FitTemperature, SinusoidAmplitude) {
  RandomStream rng(6);
  std::vector<double> temps;
  const Date start = ymd(1990, 1, 1);
  for (int i = 0; i < 3 * 365; ++i) {
    const double w = 2 * std::numbers::pi * season_day(add_days(start, i)).value / 366.0;
    temps.push_back(2.0 + 6.0 * std::sin(w) - 8.0 * std::cos(w) + 0.3 * rng.normal());
  }
  FitConfig config;
  const auto r = fit_temperature(temperature_only(temps, start), TempOrders{1, 0}, config);
  expect_consistent(r, config);
  EXPECT_NEAR(std::hypot(r.params.trend.a[0], r.params.trend.b[0]), 10.0, 0.5);
}

TEST(FitTemperature, OsloOrders) {
  const Dataset d = test::oslo_synthetic(4 * 365, 7);
  FitConfig config;
  const auto r = fit_temperature(d, TempOrders{2, 3}, config);
  expect_consistent(r, config);
  EXPECT_EQ(orders_of(r.params).flat(), (std::vector<int>{2, 3}));
  EXPECT_NEAR(r.params.ar[0], 0.75, 0.1);
}

TEST(FitPrecipitation, RecoversGeneratingValues) {
  const Dataset d = test::oslo_synthetic(40 * 365, 8);
  FitConfig config;
  const auto r = fit_precipitation(d, PrecipOrders{1, 1, 0, 1, 1, 0}, config);
  expect_consistent(r, config);
  const PrecipParams& truth = oslo_like_climate().precip;
  auto within = [](double fit, double target) { return std::abs(fit - target) <= 0.25 * std::abs(target); };
  EXPECT_TRUE(within(r.params.amount_trend.a0, truth.amount_trend.a0)) << r.params.amount_trend.a0;
  EXPECT_TRUE(within(r.params.amount_cv_shape, truth.amount_cv_shape)) << r.params.amount_cv_shape;
  EXPECT_TRUE(within(r.params.zero_trend.a0, truth.zero_trend.a0)) << r.params.zero_trend.a0;
  EXPECT_TRUE(within(r.params.zero_occ_lags[0], truth.zero_occ_lags[0])) << r.params.zero_occ_lags[0];
}

TEST(FitPrecipitation, OsloOrders) {
  const Dataset d = test::oslo_synthetic(5 * 365, 9);
  FitConfig config;
  const auto r = fit_precipitation(d, PrecipOrders{3, 5, 4, 3, 5, 4}, config);
  expect_consistent(r, config);
  EXPECT_EQ(orders_of(r.params).flat(), (std::vector<int>{3, 5, 4, 3, 5, 4}));
}

TEST(FitPrecipitation, AllDryDoesNotCrash) {
  std::vector<DailyRecord> rows;
  for (int i = 0; i < 200; ++i) rows.push_back({add_days(ymd(2001, 1, 1), i), -2.0 + (i % 7), 0.0, 0.0});
  FitConfig config;
  config.max_iterations = 300;
  FitResult<PrecipParams> r;
  ASSERT_NO_THROW(r = fit_precipitation(Dataset(rows), PrecipOrders{1, 1, 0, 1, 1, 0}, config));
  EXPECT_TRUE(!r.converged || r.at_boundary);
  EXPECT_TRUE(r.at_boundary);
  EXPECT_TRUE(test::nondecreasing(r.trace));
}

TEST(FitDirect, OsloOrders) {
  const Dataset d = test::oslo_synthetic(6 * 365, 10, 0.1);
  FitConfig config;
  const auto r = fit_direct(d, DirectOrders{3, 1, 5}, config);
  expect_consistent(r, config);
  EXPECT_EQ(orders_of(r.params).flat(), (std::vector<int>{3, 1, 5}));
  double deepest = 0.0;
  for (const auto& rec : d) deepest = std::max(deepest, *rec.snow_depth);
  EXPECT_EQ(r.params.depth_cap, deepest);
  // Capping only changes rows whose fitted mean overshoots the deepest observation.
  DirectParams uncapped = r.params;
  uncapped.depth_cap = INFINITY;
  const DirectDesign design = make_direct_design(d, 5);
  bool overshoot = false;
  for_each_direct_term(uncapped, design, [&](std::size_t, double mean, double) { overshoot |= mean > deepest; });
  const double capped_ll = direct_log_likelihood(r.params, design);
  EXPECT_TRUE(std::isfinite(capped_ll));
  if (!overshoot) EXPECT_EQ(direct_log_likelihood(uncapped, design), capped_ll);
}

TEST(FitDirect, ImprovesOnPeriodicBaseline) {
  const Dataset d = test::oslo_synthetic(6 * 365, 11, 0.1);
  FitConfig config;
  const auto base = fit_direct(d, DirectOrders{2, 0, 0}, config);
  const auto full = fit_direct(d, DirectOrders{2, 1, 2}, config);
  expect_consistent(base, config);
  expect_consistent(full, config);
  EXPECT_LT(full.aic, base.aic);
}

TEST(Stepwise, RecoversSeasonalWhiteNoiseOrders) {
  int ok = 0;
  FitConfig config;
  for (int rep = 0; rep < 20; ++rep) {
    const Dataset d = seasonal_temperature(1, 0, 5 * 365, 300 + rep);
    const auto [orders, r] = stepwise_select_temperature(d, TempOrders{3, 3}, config);
    ok += orders.m == 1 && orders.p <= 1;
    expect_consistent(r, config);
  }
  EXPECT_GE(ok, 16);
}

TEST(Stepwise, ZeroMaximumIsNullModel) {
  const Dataset d = seasonal_temperature(1, 1, 400, 12);
  const auto [orders, r] = stepwise_select_temperature(d, TempOrders{0, 0}, FitConfig{});
  EXPECT_EQ(orders.flat(), (std::vector<int>{0, 0}));
  EXPECT_EQ(orders_of(r.params).flat(), (std::vector<int>{0, 0}));
}

TEST(Stepwise, NeverWorseThanNullModel) {
  FitConfig config;
  const Dataset d = seasonal_temperature(1, 1, 3 * 365, 13);
  const auto [orders, r] = stepwise_select_temperature(d, TempOrders{3, 3}, config);
  const auto null = fit_temperature(make_temp_design(d, 3), TempOrders{0, 0}, config);
  EXPECT_LE(r.aic, null.aic);

  const Dataset s = test::oslo_synthetic(3 * 365, 14, 0.1);
  const auto [po, pr] = stepwise_select_precipitation(s, PrecipOrders{1, 2, 1, 1, 2, 1}, config);
  const auto pnull = fit_precipitation(make_precip_design(s, 2), PrecipOrders{}, config);
  EXPECT_LE(pr.aic, pnull.aic);
  expect_consistent(pr, config);

  const auto [dorders, dr] = stepwise_select_direct(s, DirectOrders{1, 1, 2}, config);
  const auto dnull = fit_direct(make_direct_design(s, 2), DirectOrders{}, config);
  EXPECT_LE(dr.aic, dnull.aic);
  expect_consistent(dr, config);
}
