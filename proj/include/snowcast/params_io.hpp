#pragma once

// JSON persistence for fitted parameters and evaluation reports. Doubles are
// written with round-trip precision, so a save/load cycle is bit-exact.

#include <cmath>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "snowcast/estimation.hpp"
#include "snowcast/evaluation.hpp"

namespace snowcast {

using Json = nlohmann::json;

class ParamsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string model_tag(const AnyModel& m) {
  switch (m.index()) {
    case 0: return "short_term";
    case 1: return "temperature";
    case 2: return "precipitation";
    default: return "direct";
  }
}

namespace detail {

inline Json trend_json(const FourierTrend& t) { return {{"a0", t.a0}, {"a", t.a}, {"b", t.b}}; }

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw ParamsError(std::string("parameter file: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParamsError(std::string("parameter file: field '") + key + "' has the wrong type");
  }
}

inline FourierTrend trend_from(const Json& j, const char* key, int order) {
  if (!j.contains(key)) throw ParamsError(std::string("parameter file: missing field '") + key + "'");
  const Json& t = j.at(key);
  FourierTrend out{field<double>(t, "a0"), field<std::vector<double>>(t, "a"), field<std::vector<double>>(t, "b")};
  if (out.order() != order || out.b.size() != out.a.size())
    throw ParamsError(std::string("parameter file: '") + key + "' does not match its order");
  return out;
}

inline std::vector<double> lags_from(const Json& j, const char* key, int order) {
  auto v = field<std::vector<double>>(j, key);
  if (static_cast<int>(v.size()) != order)
    throw ParamsError(std::string("parameter file: '") + key + "' does not match its order");
  return v;
}

}  // namespace detail

inline Json to_json(const ShortTermParams& p) {
  return {{"mu", p.mu},         {"beta0", p.beta0}, {"beta1", p.beta1},         {"beta2", p.beta2},
          {"beta3", p.beta3},   {"beta4", p.beta4}, {"beta5", p.beta5},         {"beta6", p.beta6},
          {"beta7", p.beta7},   {"sigma1_sq", p.sigma1_sq}, {"sigma2_sq", p.sigma2_sq}};
}

inline Json to_json(const TempParams& p) {
  return {{"orders", {{"m", p.trend.order()}, {"p", p.ar_order()}}},
          {"trend", detail::trend_json(p.trend)},
          {"ar", p.ar},
          {"innovation_sd", p.innovation_sd}};
}

inline Json to_json(const PrecipParams& p) {
  const PrecipOrders o = orders_of(p);
  return {{"orders",
           {{"m_amount", o.m_amount}, {"q_amount", o.q_amount}, {"s_amount", o.s_amount},
            {"m_zero", o.m_zero}, {"q_zero", o.q_zero}, {"s_zero", o.s_zero}}},
          {"amount_trend", detail::trend_json(p.amount_trend)},
          {"amount_occ_lags", p.amount_occ_lags},
          {"amount_temp_poly", p.amount_temp_poly},
          {"amount_cv_shape", p.amount_cv_shape},
          {"zero_trend", detail::trend_json(p.zero_trend)},
          {"zero_occ_lags", p.zero_occ_lags},
          {"zero_temp_poly", p.zero_temp_poly},
          {"temp_center", p.temp_center},
          {"temp_scale", p.temp_scale}};
}

inline Json to_json(const DirectParams& p) {
  return {{"orders", {{"m", p.trend.order()}, {"q", p.occ_lags.size()}, {"s", p.depth_lags.size()}}},
          {"trend", detail::trend_json(p.trend)},
          {"occ_lags", p.occ_lags},
          {"depth_lags", p.depth_lags},
          {"zero_intercept", p.zero_intercept},
          {"zero_slope", p.zero_slope},
          {"sigma1_sq", p.sigma1_sq},
          {"sigma2_sq", p.sigma2_sq},
          {"depth_cap", std::isfinite(p.depth_cap) ? Json(p.depth_cap) : Json(nullptr)}};
}

/// Tagged parameter document; `fit` (if given) is stored under "fit".
inline Json params_to_json(const AnyModel& model, const std::string& station, const Json& fit = nullptr) {
  Json j = std::visit([](const auto& p) { return to_json(p); }, model);
  j["model"] = model_tag(model);
  j["station"] = station;
  if (!fit.is_null()) j["fit"] = fit;
  return j;
}

inline ShortTermParams short_term_from_json(const Json& j) {
  using detail::field;
  ShortTermParams p{field<double>(j, "mu"),    field<double>(j, "beta0"), field<double>(j, "beta1"),
                    field<double>(j, "beta2"), field<double>(j, "beta3"), field<double>(j, "beta4"),
                    field<double>(j, "beta5"), field<double>(j, "beta6"), field<double>(j, "beta7"),
                    field<double>(j, "sigma1_sq"), field<double>(j, "sigma2_sq")};
  return p;
}

inline TempParams temperature_from_json(const Json& j) {
  using detail::field;
  const Json o = field<Json>(j, "orders");
  TempParams p;
  p.trend = detail::trend_from(j, "trend", field<int>(o, "m"));
  p.ar = detail::lags_from(j, "ar", field<int>(o, "p"));
  p.innovation_sd = field<double>(j, "innovation_sd");
  return p;
}

inline PrecipParams precipitation_from_json(const Json& j) {
  using detail::field;
  const Json o = field<Json>(j, "orders");
  PrecipParams p;
  p.amount_trend = detail::trend_from(j, "amount_trend", field<int>(o, "m_amount"));
  p.amount_occ_lags = detail::lags_from(j, "amount_occ_lags", field<int>(o, "q_amount"));
  p.amount_temp_poly = detail::lags_from(j, "amount_temp_poly", field<int>(o, "s_amount"));
  p.amount_cv_shape = field<double>(j, "amount_cv_shape");
  p.zero_trend = detail::trend_from(j, "zero_trend", field<int>(o, "m_zero"));
  p.zero_occ_lags = detail::lags_from(j, "zero_occ_lags", field<int>(o, "q_zero"));
  p.zero_temp_poly = detail::lags_from(j, "zero_temp_poly", field<int>(o, "s_zero"));
  p.temp_center = field<double>(j, "temp_center");
  p.temp_scale = field<double>(j, "temp_scale");
  return p;
}

inline DirectParams direct_from_json(const Json& j) {
  using detail::field;
  const Json o = field<Json>(j, "orders");
  DirectParams p;
  p.trend = detail::trend_from(j, "trend", field<int>(o, "m"));
  p.occ_lags = detail::lags_from(j, "occ_lags", field<int>(o, "q"));
  p.depth_lags = detail::lags_from(j, "depth_lags", field<int>(o, "s"));
  p.zero_intercept = field<double>(j, "zero_intercept");
  p.zero_slope = field<double>(j, "zero_slope");
  p.sigma1_sq = field<double>(j, "sigma1_sq");
  p.sigma2_sq = field<double>(j, "sigma2_sq");
  if (j.contains("depth_cap") && !j.at("depth_cap").is_null()) p.depth_cap = field<double>(j, "depth_cap");
  return p;
}

struct LoadedParams {
  AnyModel model;
  std::string station;
};

inline LoadedParams params_from_json(const Json& j) {
  if (!j.is_object()) throw ParamsError("parameter file: expected a JSON object");
  const auto tag = detail::field<std::string>(j, "model");
  LoadedParams out{ShortTermParams{}, j.value("station", std::string{})};
  if (tag == "short_term") out.model = short_term_from_json(j);
  else if (tag == "temperature") out.model = temperature_from_json(j);
  else if (tag == "precipitation") out.model = precipitation_from_json(j);
  else if (tag == "direct") out.model = direct_from_json(j);
  else throw ParamsError("parameter file: unknown model '" + tag + "'");
  try {
    std::visit([](const auto& p) { p.validate(); }, out.model);
  } catch (const std::invalid_argument& e) {
    throw ParamsError(std::string("parameter file: ") + e.what());
  }
  return out;
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("error writing " + path);
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParamsError(path + ": " + e.what());
  }
}

inline void save_params(const std::string& path, const AnyModel& model, const std::string& station,
                        const Json& fit = nullptr) {
  write_json_file(path, params_to_json(model, station, fit));
}

inline LoadedParams load_params(const std::string& path) { return params_from_json(read_json_file(path)); }

template <typename Params>
Json fit_summary_json(const FitResult<Params>& r) {
  return {{"log_likelihood", r.log_likelihood}, {"aic", r.aic},         {"free_parameters", r.free_parameters},
          {"iterations", r.iterations},         {"converged", r.converged}, {"at_boundary", r.at_boundary}};
}

inline Json to_json(const SkillReport& r) {
  Json normalized = Json::array();
  for (double v : r.normalized_mae()) normalized.push_back(std::isfinite(v) ? Json(v) : Json(nullptr));
  return {{"model", r.model},         {"delta", r.delta}, {"horizon", r.horizon}, {"months", r.months},
          {"mean_depth_cm", r.mean_depth}, {"mae_cm", r.mae}, {"normalized_mae", normalized}, {"count", r.count}};
}

inline Json to_json(const CrossValidationResult& r) {
  Json reports = Json::array();
  for (const auto& s : r.reports) reports.push_back(to_json(s));
  return {{"reports", reports},
          {"baseline", to_json(r.baseline)},
          {"seasons_evaluated", r.seasons_evaluated},
          {"notices", r.notices}};
}

}  // namespace snowcast
