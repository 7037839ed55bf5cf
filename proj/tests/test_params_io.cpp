#include <cstring>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace snowcast;

namespace {

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "snowcast_params_io";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

template <typename P>
P round_trip(const P& p, const std::string& name) {
  const std::string path = temp_path(name);
  save_params(path, AnyModel{p}, "Oslo - Blindern", Json{{"aic", 12.5}});
  const LoadedParams loaded = load_params(path);
  EXPECT_EQ(loaded.station, "Oslo - Blindern");
  EXPECT_TRUE(std::holds_alternative<P>(loaded.model));
  return std::get<P>(loaded.model);
}

double awkward(RandomStream& rng) { return (rng.uniform() - 0.5) * std::pow(10.0, std::floor(rng.uniform() * 12 - 6)); }

}  // namespace

TEST(ParamsIo, ShortTermBitExact) {
  ShortTermParams p = kOsloShortTerm;
  p.beta1 = 0.1 + 0.2;
  p.sigma2_sq = 1e-300;
  const auto back = round_trip(p, "st.json");
  EXPECT_EQ(std::memcmp(&p, &back, sizeof p), 0);
  const Json j = params_to_json(AnyModel{p}, "x");
  EXPECT_EQ(j.at("model"), "short_term");
  for (const char* k : {"mu", "beta0", "beta1", "beta2", "beta3", "beta4", "beta5", "beta6", "beta7", "sigma1_sq", "sigma2_sq"})
    EXPECT_TRUE(j.contains(k)) << k;
}

TEST(ParamsIo, TemperatureBitExact) {
  RandomStream rng(1);
  TempParams p;
  p.trend = FourierTrend{awkward(rng), {awkward(rng), awkward(rng)}, {awkward(rng), awkward(rng)}};
  p.ar = {awkward(rng), awkward(rng), awkward(rng)};
  p.innovation_sd = 2.0 / 3.0;
  const auto back = round_trip(p, "t.json");
  EXPECT_EQ(back.trend.a0, p.trend.a0);
  EXPECT_EQ(back.trend.a, p.trend.a);
  EXPECT_EQ(back.trend.b, p.trend.b);
  EXPECT_EQ(back.ar, p.ar);
  EXPECT_EQ(back.innovation_sd, p.innovation_sd);
}

TEST(ParamsIo, PrecipitationBitExact) {
  RandomStream rng(2);
  PrecipParams p = with_orders(PrecipParams{}, PrecipOrders{3, 5, 4, 3, 5, 4});
  for (auto* v : {&p.amount_trend.a, &p.amount_trend.b, &p.amount_occ_lags, &p.amount_temp_poly, &p.zero_trend.a,
                  &p.zero_trend.b, &p.zero_occ_lags, &p.zero_temp_poly})
    for (double& x : *v) x = awkward(rng);
  p.amount_cv_shape = std::nextafter(1.0, 2.0);
  p.temp_center = -1.0 / 3.0;
  p.temp_scale = 7.1;
  const auto back = round_trip(p, "p.json");
  EXPECT_EQ(orders_of(back).flat(), orders_of(p).flat());
  EXPECT_EQ(back.amount_trend.b, p.amount_trend.b);
  EXPECT_EQ(back.amount_occ_lags, p.amount_occ_lags);
  EXPECT_EQ(back.amount_temp_poly, p.amount_temp_poly);
  EXPECT_EQ(back.zero_trend.a, p.zero_trend.a);
  EXPECT_EQ(back.zero_occ_lags, p.zero_occ_lags);
  EXPECT_EQ(back.zero_temp_poly, p.zero_temp_poly);
  EXPECT_EQ(back.amount_cv_shape, p.amount_cv_shape);
  EXPECT_EQ(back.temp_center, p.temp_center);
  EXPECT_EQ(back.temp_scale, p.temp_scale);
}

TEST(ParamsIo, DirectBitExactWithAndWithoutCap) {
  RandomStream rng(3);
  DirectParams p = with_orders(DirectParams{}, DirectOrders{3, 1, 5});
  for (auto* v : {&p.trend.a, &p.trend.b, &p.occ_lags, &p.depth_lags})
    for (double& x : *v) x = awkward(rng);
  p.zero_slope = -0.123456789012345678;
  p.depth_cap = 87.3;
  auto back = round_trip(p, "d.json");
  EXPECT_EQ(back.trend.a, p.trend.a);
  EXPECT_EQ(back.depth_lags, p.depth_lags);
  EXPECT_EQ(back.zero_slope, p.zero_slope);
  EXPECT_EQ(back.depth_cap, 87.3);

  p.depth_cap = std::numeric_limits<double>::infinity();
  EXPECT_TRUE(params_to_json(AnyModel{p}, "x").at("depth_cap").is_null());
  back = round_trip(p, "d2.json");
  EXPECT_TRUE(std::isinf(back.depth_cap));

  Json old = params_to_json(AnyModel{p}, "x");
  old.erase("depth_cap");
  EXPECT_TRUE(std::isinf(std::get<DirectParams>(params_from_json(old).model).depth_cap));
}

TEST(ParamsIo, NullModelOrders) {
  const auto t = round_trip(with_orders(TempParams{}, TempOrders{0, 0}), "t0.json");
  EXPECT_EQ(orders_of(t).flat(), (std::vector<int>{0, 0}));
  const auto d = round_trip(DirectParams{}, "d0.json");
  EXPECT_EQ(orders_of(d).flat(), (std::vector<int>{0, 0, 0}));
}

TEST(ParamsIo, Errors) {
  Json j = params_to_json(AnyModel{kOsloShortTerm}, "x");
  j.erase("beta3");
  EXPECT_THROW(params_from_json(j), ParamsError);
  j = params_to_json(AnyModel{kOsloShortTerm}, "x");
  j["beta3"] = "cold";
  EXPECT_THROW(params_from_json(j), ParamsError);
  j["model"] = "mystery";
  EXPECT_THROW(params_from_json(j), ParamsError);
  EXPECT_THROW(params_from_json(Json::array()), ParamsError);

  j = params_to_json(AnyModel{kOsloShortTerm}, "x");
  j["sigma1_sq"] = -1.0;
  EXPECT_THROW(params_from_json(j), ParamsError);

  TempParams t = with_orders(TempParams{}, TempOrders{2, 1});
  j = params_to_json(AnyModel{t}, "x");
  j["orders"]["p"] = 3;
  EXPECT_THROW(params_from_json(j), ParamsError);

  const std::string path = temp_path("broken.json");
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(load_params(path), ParamsError);
  EXPECT_THROW(load_params(temp_path("does_not_exist.json")), std::runtime_error);
}

TEST(ParamsIo, ModelTags) {
  EXPECT_EQ(model_tag(AnyModel{ShortTermParams{}}), "short_term");
  EXPECT_EQ(model_tag(AnyModel{TempParams{}}), "temperature");
  EXPECT_EQ(model_tag(AnyModel{PrecipParams{}}), "precipitation");
  EXPECT_EQ(model_tag(AnyModel{DirectParams{}}), "direct");
}
