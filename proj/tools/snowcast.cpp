// Command-line front end: fit, forecast, gof, evaluate, simulate.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "snowcast.hpp"

namespace {

using namespace snowcast;
namespace fs = std::filesystem;

constexpr int kExitFailure = 1;
constexpr int kExitData = 2;
constexpr int kExitUsage = 64;

/// Unusable input data (exit code 2).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Inconsistent flags detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Shared plumbing

struct SeedFlag {
  std::uint64_t value = 0;
  CLI::Option* option = nullptr;

  void add(CLI::App* app) { option = app->add_option("--seed", value, "Master random seed (default: from system entropy)"); }

  std::uint64_t resolve() const {
    if (option && option->count() > 0) return value;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
};

void add_fit_flags(CLI::App* app, FitConfig& c) {
  app->add_option("--max-iterations", c.max_iterations, "Optimizer iteration limit")->capture_default_str();
  app->add_option("--gradient-step", c.gradient_step, "Relative finite-difference step")->capture_default_str();
  app->add_option("--learning-rate", c.initial_learning_rate, "Initial step length")->capture_default_str();
  app->add_option("--tol", c.convergence_tol, "Relative log-likelihood tolerance")->capture_default_str();
  app->add_option("--backtrack", c.backtrack_factor, "Line-search shrink factor")->capture_default_str();
}

Json fit_json(const FitConfig& c) {
  return {{"max_iterations", c.max_iterations},
          {"gradient_step", c.gradient_step},
          {"initial_learning_rate", c.initial_learning_rate},
          {"convergence_tol", c.convergence_tol},
          {"backtrack_factor", c.backtrack_factor}};
}

/// SOURCE_DATE_EPOCH, when set, pins the manifest timestamp.
std::string manifest_timestamp() {
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (end && *end == '\0') {
      const std::time_t t = static_cast<std::time_t>(v);
      std::tm tm{};
      gmtime_r(&t, &tm);
      char buf[32];
      std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
      return buf;
    }
  }
  return utc_timestamp();
}

void write_manifest(const fs::path& path, RunManifest m) {
  m.timestamp = manifest_timestamp();
  write_json_file(path.string(), to_json(m));
}

template <typename Fn>
void write_text(const fs::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fn(out);
  if (!out) throw std::runtime_error("error writing " + path.string());
}

Dataset load_data(const std::string& path) {
  try {
    return load_csv(path);
  } catch (const CsvError& e) {
    throw DataError(path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(path + ": " + e.what());
  }
}

LoadedParams load_params_file(const std::string& path) {
  try {
    return load_params(path);
  } catch (const ParamsError& e) {
    throw DataError(e.what());
  }
}

/// Parameter files sorted by family.
struct ParamSet {
  std::optional<ShortTermParams> short_term;
  std::optional<TempParams> temp;
  std::optional<PrecipParams> precip;
  std::optional<DirectParams> direct;

  static ParamSet load(const std::vector<std::string>& paths) {
    ParamSet s;
    for (const auto& path : paths) {
      auto loaded = load_params_file(path);
      auto put = [&](auto& slot, auto&& value) {
        if (slot) throw UsageError("more than one " + model_tag(loaded.model) + " parameter file");
        slot = std::move(value);
      };
      std::visit(
          [&](auto&& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, ShortTermParams>) put(s.short_term, p);
            else if constexpr (std::is_same_v<P, TempParams>) put(s.temp, p);
            else if constexpr (std::is_same_v<P, PrecipParams>) put(s.precip, p);
            else put(s.direct, p);
          },
          loaded.model);
    }
    return s;
  }
};

template <typename T>
const T& require(const std::optional<T>& v, const char* family) {
  if (!v) throw UsageError(std::string("missing ") + family + " parameter file (--params)");
  return *v;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::vector<std::string> raw_arguments(int argc, char** argv) { return {argv + 1, argv + argc}; }

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  if (!p.empty()) fs::create_directories(p);
  return p;
}

std::vector<int> checked_months(const std::vector<int>& months) {
  for (int m : months)
    if (m < 1 || m > 12) throw UsageError("--months: month " + std::to_string(m) + " outside 1..12");
  return months;
}

// ---------------------------------------------------------------------------
// fit

struct FitCommand {
  std::string data;
  std::string family;
  std::string output = "params.json";
  std::vector<int> orders;
  bool select = false;
  std::vector<int> max_orders;
  FitConfig config;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("fit", "Fit one model family by maximum likelihood");
    c->add_option("data", data, "Input data CSV")->required()->check(CLI::ExistingFile);
    c->add_option("--family", family, "short_term, temperature, precipitation or direct")
        ->required()
        ->check(CLI::IsMember({"short_term", "temperature", "precipitation", "direct"}));
    c->add_option("-o,--output", output, "Parameter JSON to write")->capture_default_str();
    c->add_option("--orders", orders, "Model orders, comma separated")->delimiter(',');
    c->add_flag("--select", select, "Choose orders by forward stepwise AIC");
    c->add_option("--max-orders", max_orders, "Upper bounds for --select")->delimiter(',');
    add_fit_flags(c, config);
  }

  template <typename Orders>
  Orders parse_orders(const std::vector<int>& v, const Orders& fallback, const char* flag) const {
    if (v.empty()) return fallback;
    const std::size_t n = fallback.flat().size();
    if (v.size() != n) throw UsageError(std::string(flag) + " needs " + std::to_string(n) + " values for " + family);
    for (int x : v)
      if (x < 0) throw UsageError(std::string(flag) + ": orders must be nonnegative");
    return Orders::from_flat(v);
  }

  int run(const std::vector<std::string>& args) {
    config.validate();
    if (family == "short_term" && (!orders.empty() || select || !max_orders.empty()))
      throw UsageError("the short_term model has no orders");
    if (select && !orders.empty()) throw UsageError("--orders and --select are exclusive");
    const Dataset d = load_data(data);
    if (d.empty()) throw DataError("no usable transitions");

    AnyModel model;
    Json summary;
    std::vector<int> chosen;
    try {
      if (family == "short_term") {
        const auto r = fit_short_term(d, config);
        model = r.params;
        summary = fit_summary_json(r);
      } else if (family == "temperature") {
        if (select) {
          auto [o, r] = stepwise_select_temperature(d, parse_orders(max_orders, TempOrders{6, 6}, "--max-orders"), config);
          model = r.params, summary = fit_summary_json(r), chosen = o.flat();
        } else {
          const auto o = parse_orders(orders, TempOrders{2, 3}, "--orders");
          const auto r = fit_temperature(d, o, config);
          model = r.params, summary = fit_summary_json(r), chosen = o.flat();
        }
      } else if (family == "precipitation") {
        if (select) {
          auto [o, r] = stepwise_select_precipitation(
              d, parse_orders(max_orders, PrecipOrders{4, 6, 4, 4, 6, 4}, "--max-orders"), config);
          model = r.params, summary = fit_summary_json(r), chosen = o.flat();
        } else {
          const auto o = parse_orders(orders, PrecipOrders{3, 5, 4, 3, 5, 4}, "--orders");
          const auto r = fit_precipitation(d, o, config);
          model = r.params, summary = fit_summary_json(r), chosen = o.flat();
        }
      } else {
        if (select) {
          auto [o, r] = stepwise_select_direct(d, parse_orders(max_orders, DirectOrders{4, 2, 6}, "--max-orders"), config);
          model = r.params, summary = fit_summary_json(r), chosen = o.flat();
        } else {
          const auto o = parse_orders(orders, DirectOrders{3, 1, 5}, "--orders");
          const auto r = fit_direct(d, o, config);
          model = r.params, summary = fit_summary_json(r), chosen = o.flat();
        }
      }
    } catch (const std::domain_error& e) {
      throw DataError(e.what());
    }

    save_params(output, model, d.station_label(), summary);
    std::printf("model: %s\n", family.c_str());
    if (!chosen.empty()) std::printf("orders: %s\n", join(chosen).c_str());
    std::printf("log_likelihood: %.6f\n", summary["log_likelihood"].get<double>());
    std::printf("aic: %.6f\n", summary["aic"].get<double>());
    std::printf("iterations: %d\n", summary["iterations"].get<int>());
    std::printf("converged: %s\n", summary["converged"].get<bool>() ? "true" : "false");
    if (summary["at_boundary"].get<bool>()) std::printf("note: estimate lies on the parameter-space boundary\n");

    RunManifest m;
    m.command = "fit";
    m.arguments = args;
    m.inputs = {data};
    m.outputs = {output};
    m.settings = {{"family", family}, {"select", select}, {"orders", chosen}, {"fit", fit_json(config)}};
    write_manifest(output + ".manifest.json", std::move(m));
    return 0;
  }
};

// ---------------------------------------------------------------------------
// forecast

struct ForecastCommand {
  std::string data;
  std::vector<std::string> params;
  std::string model = "model2";
  int delta = 0;
  int horizon = 21;
  int paths = 1000;
  SeedFlag seed;
  std::string issue_date;
  std::string weather_file;
  std::vector<double> quantiles{0.05, 0.95};
  unsigned threads = 1;
  std::string out_dir = ".";

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("forecast", "Monte Carlo snow-depth forecast from the end of a record");
    c->add_option("data", data, "Observed history CSV")->required()->check(CLI::ExistingFile);
    c->add_option("--params", params, "Parameter JSON files (repeatable)")->required();
    c->add_option("--model", model, "Long-term model after the weather forecast")
        ->check(CLI::IsMember({"model1", "model2"}))
        ->capture_default_str();
    c->add_option("--delta", delta, "Days covered by the weather forecast")->capture_default_str();
    c->add_option("--horizon", horizon, "Forecast length in days")->capture_default_str();
    c->add_option("--paths", paths, "Monte Carlo paths")->capture_default_str();
    seed.add(c);
    c->add_option("--issue-date", issue_date, "Last observed day (default: last day with a depth)");
    c->add_option("--weather-forecast", weather_file,
                  "CSV in the data format covering the delta days after the issue date "
                  "(default: the observed weather in the data)");
    c->add_option("--quantiles", quantiles, "Summary quantile levels")->delimiter(',')->capture_default_str();
    c->add_option("--threads", threads, "Worker threads for paths")->capture_default_str();
    c->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  }

  std::vector<WeatherDay> weather(const Dataset& d, const Date& issue) const {
    std::vector<WeatherDay> out;
    if (delta == 0) return out;
    const Dataset src = weather_file.empty() ? Dataset(d) : load_data(weather_file);
    for (int i = 1; i <= delta; ++i) {
      const Date day = add_days(issue, i);
      const auto idx = src.index_of(day);
      if (!idx || !src[*idx].temperature || !src[*idx].precipitation)
        throw DataError("no forecast temperature and precipitation for " + format_date(day));
      out.push_back({*src[*idx].temperature, *src[*idx].precipitation});
    }
    return out;
  }

  int run(const std::vector<std::string>& args) {
    if (horizon < 1) throw UsageError("--horizon must be at least 1");
    if (delta < 0) throw UsageError("--delta must be nonnegative");
    if (delta > horizon) throw UsageError("--delta may not exceed --horizon");
    if (paths < 1) throw UsageError("--paths must be at least 1");
    for (double q : quantiles)
      if (!(q >= 0.0 && q <= 1.0)) throw UsageError("--quantiles: levels must lie in [0, 1]");
    const ParamSet ps = ParamSet::load(params);
    const bool long_term = delta < horizon;
    const bool model1 = long_term && model == "model1";
    const bool model2 = long_term && model == "model2";
    if (delta > 0 || model1) require(ps.short_term, "short_term");
    if (model1) require(ps.temp, "temperature"), require(ps.precip, "precipitation");
    if (model2) require(ps.direct, "direct");

    const Dataset d = load_data(data);
    if (d.empty()) throw DataError("no usable transitions");
    std::size_t index = 0;
    if (issue_date.empty()) {
      std::size_t k = d.size();
      while (k > 0 && !d[k - 1].snow_depth) --k;
      if (k == 0) throw DataError("no observed snow depth to start from");
      index = k - 1;
    } else {
      const auto date = parse_date(issue_date);
      if (!date) throw UsageError("--issue-date: expected YYYY-MM-DD");
      const auto idx = d.index_of(*date);
      if (!idx) throw DataError("issue date " + issue_date + " outside the data");
      index = *idx;
    }

    std::size_t history = 1;
    if (model2) history = std::max<std::size_t>(history, ps.direct->max_lag());
    if (model1) history = std::max<std::size_t>({history, ps.temp->ar.size(), static_cast<std::size_t>(ps.precip->max_occ_lag())});

    ForecastRequest req;
    req.history = history_from(d, index, history);
    req.weather_forecast = weather(d, req.history.last_date);
    req.horizon = horizon;
    req.n_paths = paths;
    req.seed = seed.resolve();
    req.threads = threads;

    ForecastEnsemble e;
    try {
      if (!long_term) e = forecast_short(*ps.short_term, req);
      else if (model2) e = forecast_long_model2(ps.short_term ? &*ps.short_term : nullptr, *ps.direct, req);
      else e = forecast_long_model1(*ps.short_term, *ps.temp, *ps.precip, req);
    } catch (const std::domain_error& ex) {
      throw DataError(ex.what());
    }
    const ForecastSummary s = summarize(e, quantiles);

    const fs::path dir = prepare_dir(out_dir);
    write_text(dir / "ensemble.csv", [&](std::ostream& o) { write_ensemble_csv(o, e); });
    write_text(dir / "summary.csv", [&](std::ostream& o) { write_summary_csv(o, e, s); });
    std::printf("issue date: %s\nmodel: %s\npaths: %d\nseed: %llu\n", format_date(e.issue_date).c_str(), e.model.c_str(),
                e.n_paths, static_cast<unsigned long long>(e.seed));
    std::printf("day %d mean depth: %.3f cm\n", horizon, s.mean.back());

    RunManifest m;
    m.command = "forecast";
    m.arguments = args;
    m.inputs = {data};
    if (!weather_file.empty()) m.inputs.push_back(weather_file);
    m.parameter_files = params;
    m.outputs = {(dir / "ensemble.csv").string(), (dir / "summary.csv").string()};
    m.seed = req.seed;
    m.settings = {{"model", model},       {"delta", delta},         {"horizon", horizon},
                  {"paths", paths},       {"issue_date", format_date(e.issue_date)},
                  {"quantiles", quantiles}, {"threads", threads}};
    write_manifest(dir / "manifest.json", std::move(m));
    return 0;
  }
};

// ---------------------------------------------------------------------------
// gof

struct GofCommand {
  std::string data;
  std::string params;
  std::vector<int> months;
  SeedFlag seed;
  bool no_randomize = false;
  int bins = 20;
  std::string out_dir = ".";

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("gof", "Probability integral transform of one-step predictions");
    c->add_option("data", data, "Observed data CSV")->required()->check(CLI::ExistingFile);
    c->add_option("--params", params, "Parameter JSON file")->required()->check(CLI::ExistingFile);
    c->add_option("--months", months, "Months to include (default: 12,1,2 for snow models, all for weather)")
        ->delimiter(',');
    seed.add(c);
    c->add_flag("--no-randomize", no_randomize, "Use F(0) for zero observations instead of a uniform draw");
    c->add_option("--bins", bins, "Histogram bins")->capture_default_str();
    c->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  }

  int run(const std::vector<std::string>& args) {
    if (bins < 1) throw UsageError("--bins must be positive");
    const auto loaded = load_params_file(params);
    const Dataset d = load_data(data);
    PitOptions opt;
    opt.months = months.empty() ? default_pit_months(loaded.model) : checked_months(months);
    opt.randomized = !no_randomize;
    opt.seed = seed.resolve();
    opt.bins = bins;
    PitReport r;
    try {
      r = pit_series(loaded.model, d, opt);
    } catch (const std::domain_error& e) {
      throw DataError(e.what());
    }
    const fs::path dir = prepare_dir(out_dir);
    write_text(dir / "pit.csv", [&](std::ostream& o) { write_pit_csv(o, r); });
    write_text(dir / "pit_histogram.csv", [&](std::ostream& o) { write_pit_histogram_csv(o, r); });
    std::printf("model: %s\nn: %zu\nks_statistic: %.6f\nks_critical_0.01: %.6f\n", model_tag(loaded.model).c_str(), r.n,
                r.ks_statistic, ks_critical_value(r.n, 0.01));

    RunManifest m;
    m.command = "gof";
    m.arguments = args;
    m.inputs = {data};
    m.parameter_files = {params};
    m.outputs = {(dir / "pit.csv").string(), (dir / "pit_histogram.csv").string()};
    m.seed = opt.seed;
    m.settings = {{"months", opt.months}, {"randomized", opt.randomized}, {"bins", bins}};
    write_manifest(dir / "manifest.json", std::move(m));
    return 0;
  }
};

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateCommand {
  std::string data;
  std::vector<int> deltas{0, 5, 10};
  int horizon = 21;
  std::vector<std::string> models{"model2"};
  int paths = 1000;
  SeedFlag seed;
  std::vector<int> months{12, 1, 2};
  unsigned threads = 1;
  std::string out_dir = ".";
  std::vector<int> direct_orders{3, 1, 5};
  std::vector<int> temp_orders{2, 3};
  std::vector<int> precip_orders{3, 5, 4, 3, 5, 4};
  FitConfig config;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("evaluate", "Leave-one-season-out forecast skill");
    c->add_option("data", data, "Observed data CSV")->required()->check(CLI::ExistingFile);
    c->add_option("--deltas", deltas, "Days of observed weather before the long-term model")
        ->delimiter(',')
        ->capture_default_str();
    c->add_option("--horizon", horizon, "Forecast length in days")->capture_default_str();
    c->add_option("--models", models, "model1 and/or model2")
        ->delimiter(',')
        ->check(CLI::IsMember({"model1", "model2"}))
        ->capture_default_str();
    c->add_option("--paths", paths, "Monte Carlo paths per forecast")->capture_default_str();
    seed.add(c);
    c->add_option("--months", months, "Months containing forecast start days")->delimiter(',')->capture_default_str();
    c->add_option("--threads", threads, "Held-out seasons evaluated concurrently")->capture_default_str();
    c->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
    c->add_option("--direct-orders", direct_orders, "m,q,s")->delimiter(',')->capture_default_str();
    c->add_option("--temp-orders", temp_orders, "m,p")->delimiter(',')->capture_default_str();
    c->add_option("--precip-orders", precip_orders, "m,q,s for amount then zero part")
        ->delimiter(',')
        ->capture_default_str();
    add_fit_flags(c, config);
  }

  int run(const std::vector<std::string>& args) {
    if (direct_orders.size() != 3 || temp_orders.size() != 2 || precip_orders.size() != 6)
      throw UsageError("order lists have the wrong length");
    CrossValidationConfig cv;
    cv.models.clear();
    for (const auto& m : models) cv.models.push_back(m == "model1" ? LongTermModel::model1 : LongTermModel::model2);
    cv.deltas = deltas;
    cv.horizon = horizon;
    cv.months = checked_months(months);
    cv.n_paths = paths;
    cv.seed = seed.resolve();
    cv.fit = config;
    cv.direct_orders = DirectOrders::from_flat(direct_orders);
    cv.temp_orders = TempOrders::from_flat(temp_orders);
    cv.precip_orders = PrecipOrders::from_flat(precip_orders);
    cv.threads = threads;
    try {
      cv.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }

    const Dataset d = load_data(data);
    CrossValidationResult result;
    try {
      result = cross_validate(d, cv);
    } catch (const std::domain_error& e) {
      throw DataError(e.what());
    }
    for (const auto& n : result.notices) std::fprintf(stderr, "notice: %s\n", n.c_str());

    const fs::path dir = prepare_dir(out_dir);
    RunManifest m;
    auto emit = [&](const SkillReport& r, const std::string& name) {
      write_text(dir / name, [&](std::ostream& o) { write_skill_csv(o, r); });
      m.outputs.push_back((dir / name).string());
    };
    for (const auto& r : result.reports) emit(r, "skill_" + r.model + "_delta" + std::to_string(r.delta) + ".csv");
    emit(result.baseline, "skill_baseline.csv");
    write_json_file((dir / "skill.json").string(), to_json(result));
    m.outputs.push_back((dir / "skill.json").string());

    std::printf("seasons evaluated: %zu\nmean winter depth: %.3f cm\n", result.seasons_evaluated, result.baseline.mean_depth);
    std::printf("%-10s %5s %12s %12s\n", "model", "delta", "mae_lead1", "mae_last");
    auto line = [&](const SkillReport& r) {
      std::printf("%-10s %5d %12.4f %12.4f\n", r.model.c_str(), r.delta, r.mae.front(), r.mae.back());
    };
    for (const auto& r : result.reports) line(r);
    line(result.baseline);

    m.command = "evaluate";
    m.arguments = args;
    m.inputs = {data};
    m.seed = cv.seed;
    m.settings = {{"models", models},
                  {"deltas", deltas},
                  {"horizon", horizon},
                  {"paths", paths},
                  {"months", cv.months},
                  {"threads", threads},
                  {"direct_orders", direct_orders},
                  {"temp_orders", temp_orders},
                  {"precip_orders", precip_orders},
                  {"fit", fit_json(config)}};
    write_manifest(dir / "manifest.json", std::move(m));
    return 0;
  }
};

// ---------------------------------------------------------------------------
// simulate

struct SimulateCommand {
  std::vector<std::string> params;
  std::string preset;
  int days = 366;
  SeedFlag seed;
  std::string start_date = "2000-07-01";
  double resolution = 0.0;
  std::string station = "synthetic";
  std::string output;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("simulate", "Simulate weather and snow depth into a data CSV");
    auto* p = c->add_option("--params", params, "short_term, temperature and precipitation parameter files");
    auto* s = c->add_option("--preset", preset, "Built-in parameter set")->check(CLI::IsMember({"oslo"}));
    p->excludes(s);
    c->add_option("--days", days, "Number of days")->capture_default_str();
    seed.add(c);
    c->add_option("--start-date", start_date, "First simulated day")->capture_default_str();
    c->add_option("--depth-resolution", resolution, "Round depths to this many cm (0 keeps full precision)")
        ->capture_default_str();
    c->add_option("--station", station, "Station label")->capture_default_str();
    c->add_option("-o,--output", output, "Output CSV")->required();
  }

  int run(const std::vector<std::string>& args) {
    if (days < 1) throw UsageError("--days must be positive");
    if (resolution < 0.0) throw UsageError("--depth-resolution must be nonnegative");
    const auto start = parse_date(start_date);
    if (!start) throw UsageError("--start-date: expected YYYY-MM-DD");
    SyntheticClimate climate;
    if (!preset.empty()) {
      climate = oslo_like_climate();
    } else {
      if (params.empty()) throw UsageError("give --params or --preset");
      const ParamSet ps = ParamSet::load(params);
      climate = {require(ps.temp, "temperature"), require(ps.precip, "precipitation"),
                 require(ps.short_term, "short_term")};
    }
    const std::uint64_t s = seed.resolve();
    const Dataset d = simulate_dataset(climate, *start, days, s, resolution, station);
    save_csv(output, d);
    std::printf("wrote %d days to %s (seed %llu)\n", days, output.c_str(), static_cast<unsigned long long>(s));

    RunManifest m;
    m.command = "simulate";
    m.arguments = args;
    m.parameter_files = params;
    m.outputs = {output};
    m.seed = s;
    m.settings = {{"preset", preset}, {"days", days}, {"start_date", start_date},
                  {"depth_resolution", resolution}, {"station", station}};
    write_manifest(output + ".manifest.json", std::move(m));
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical snow-depth modelling and forecasting"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  FitCommand fit;
  ForecastCommand forecast;
  GofCommand gof;
  EvaluateCommand evaluate;
  SimulateCommand simulate;
  fit.add(app);
  forecast.add(app);
  gof.add(app);
  evaluate.add(app);
  simulate.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const auto args = raw_arguments(argc, argv);
  try {
    if (app.got_subcommand("fit")) return fit.run(args);
    if (app.got_subcommand("forecast")) return forecast.run(args);
    if (app.got_subcommand("gof")) return gof.run(args);
    if (app.got_subcommand("evaluate")) return evaluate.run(args);
    return simulate.run(args);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
}
