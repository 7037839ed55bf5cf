// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "snowcast.hpp"

using namespace snowcast;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

/// Every fit run here, for the trace check.
std::vector<std::pair<std::string, std::vector<double>>> g_traces;

template <typename P>
void record(const std::string& what, const FitResult<P>& r) {
  g_traces.emplace_back(what, r.trace);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path work_dir() {
  const fs::path d = fs::temp_directory_path() / "snowcast_acceptance";
  fs::create_directories(d);
  return d;
}

int run_cli(const fs::path& cwd, const std::string& args) {
  const std::string cmd = "cd '" + cwd.string() + "' && SOURCE_DATE_EPOCH=1700000000 '" SNOWCAST_CLI "' " + args +
                          " >>cli.log 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Dataset oslo_seasons(int seasons, std::uint64_t seed, double resolution = 0.0) {
  return simulate_dataset(oslo_like_climate(), Date{std::chrono::year{1960}, std::chrono::July, std::chrono::day{1}},
                          seasons * 365 + seasons / 4, seed, resolution);
}

// 1. Cross-validated skill on 40 synthetic seasons, through the CLI.
Outcome skill_beats_baseline() {
  const fs::path dir = work_dir() / "skill";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto t0 = Clock::now();
  if (run_cli(dir, "simulate --preset oslo --days 14610 --seed 2024 --start-date 1970-07-01 --depth-resolution 0.1 -o data.csv"))
    return {false, "simulate failed"};
  if (run_cli(dir, "evaluate data.csv --models model2 --deltas 5 --horizon 21 --paths 1000 --seed 7 --out-dir cv"))
    return {false, "evaluate failed, see " + (dir / "cli.log").string()};
  const double elapsed = seconds_since(t0);
  const Json j = Json::parse(slurp(dir / "cv" / "skill.json"));
  const auto m2 = j.at("reports").at(0).at("mae_cm").get<std::vector<double>>();
  const auto base = j.at("baseline").at("mae_cm").get<std::vector<double>>();
  const bool ok = m2[20] < base[20] && m2[4] < m2[20] && elapsed < 1800.0;
  return {ok, fmt("model2 lead5 %.3f cm, lead21 %.3f cm; baseline lead21 %.3f cm; %zu seasons; %.0f s", m2[4], m2[20],
                  base[20], j.at("seasons_evaluated").get<std::size_t>(), elapsed)};
}

// 2. Short-term parameter recovery.
Outcome parameter_recovery() {
  const ShortTermParams truth = kOsloShortTerm;
  int good = 0;
  double slowest = 0.0;
  std::string worst;
  for (int rep = 0; rep < 10; ++rep) {
    const Dataset d = oslo_seasons(30, 1000 + rep);
    const auto t0 = Clock::now();
    const auto r = fit_short_term(d, FitConfig{});
    const double s = seconds_since(t0);
    slowest = std::max(slowest, s);
    record("short_term recovery " + std::to_string(rep), r);
    auto rel = [](double fit, double target) { return std::abs(fit - target) / std::abs(target); };
    const double e2 = rel(r.params.beta2, truth.beta2), e3 = rel(r.params.beta3, truth.beta3),
                 e7 = rel(r.params.beta7, truth.beta7), s1 = rel(r.params.sigma1_sq, truth.sigma1_sq),
                 s2 = rel(r.params.sigma2_sq, truth.sigma2_sq);
    const bool ok = e2 <= 0.25 && e3 <= 0.25 && e7 <= 0.25 && s1 <= 0.40 && s2 <= 0.40 && s < 300.0;
    good += ok;
    if (!ok)
      worst += fmt(" [rep %d: b2 %.2f b3 %.2f b7 %.2f s1 %.2f s2 %.2f]", rep, r.params.beta2, r.params.beta3,
                   r.params.beta7, r.params.sigma1_sq, r.params.sigma2_sq);
  }
  return {good >= 8, fmt("%d/10 replications within tolerance, slowest fit %.1f s", good, slowest) + worst};
}

// 3. CDF against quadrature of the density plus the atom.
Outcome cdf_oracle() {
  boost::math::quadrature::tanh_sinh<double> integrator;
  RandomStream rng(3);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double shape = std::exp(rng.uniform() * std::log(200.0) - std::log(5.0));  // 0.2 .. 40
    const double scale = std::exp(rng.uniform() * 6 - 3);
    const ZeroInflatedSpec s{rng.uniform(), {shape, scale}};
    const boost::math::gamma_distribution<double> dist(shape, scale);
    for (int k = 1; k <= 20; ++k) {
      const double x = boost::math::quantile(dist, (k - 0.5) / 20.0);
      const double mass = integrator.integrate([&](double t) { return boost::math::pdf(dist, t); }, 0.0, x);
      worst = std::max(worst, std::abs(zig_cdf(s, x) - (s.p_zero + (1 - s.p_zero) * mass)));
    }
  }
  return {worst <= 1e-8, fmt("max abs error %.3e over 2000 points", worst)};
}

// 4. Moment-matching round trip.
Outcome moment_round_trip() {
  RandomStream rng(4);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double m = std::exp(rng.uniform() * 20 - 10);
    const double v = std::exp(rng.uniform() * 20 - 10);
    const auto g = gamma_from_moments(m, v);
    worst = std::max({worst, std::abs(g.mean() - m) / m, std::abs(g.variance() - v) / v});
  }
  return {worst < 1e-12, fmt("max relative error %.3e over 10^4 pairs", worst)};
}

// 5. PIT uniformity under the generating model.
Outcome pit_self_consistency() {
  int passes = 0;
  std::size_t n_min = SIZE_MAX;
  for (int rep = 0; rep < 10; ++rep) {
    const Dataset d = oslo_seasons(112, 500 + rep);
    PitOptions o;
    o.seed = rep;
    const PitReport r = pit_series(AnyModel{kOsloShortTerm}, d, o);
    const std::vector<double> first(r.values.begin(), r.values.begin() + std::min<std::size_t>(r.n, 10000));
    n_min = std::min(n_min, first.size());
    passes += ks_uniform_statistic(first) < ks_critical_value(first.size(), 0.01);
  }
  return {passes >= 9 && n_min == 10000, fmt("%d/10 replications pass KS at 0.01 (n = %zu)", passes, n_min)};
}

// 6. 5-95% band coverage at lead 10.
Outcome forecast_coverage() {
  DirectParams p;
  p.trend = FourierTrend{2.6, {0.3}, {1.4}};
  p.occ_lags = {0.4};
  p.depth_lags = {0.02, 0.005};
  p.zero_intercept = 2.0;
  p.zero_slope = -0.8;
  p.sigma1_sq = 3.0;
  p.sigma2_sq = 0.3;
  const Date first_issue{std::chrono::year{2000}, std::chrono::December, std::chrono::day{1}};
  int covered = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    RandomStream rng = RandomStream::substream(6, t);
    const Date issue = add_days(first_issue, t % 60);
    // Start state: a short spin-up from a random depth.
    ForecastHistory h;
    h.last_date = issue;
    DepthState state(p, std::vector<double>{20.0 + 30.0 * rng.uniform(), 20.0 + 30.0 * rng.uniform()});
    std::vector<double> depths;
    for (int k = -9; k <= 0; ++k) depths.push_back(direct_simulate_step(p, season_day(add_days(issue, k)), state, rng));
    h.depths = depths;
    h.temps.assign(depths.size(), kMissing);
    h.precips.assign(depths.size(), kMissing);
    double truth = 0.0;
    for (int k = 1; k <= 10; ++k) truth = direct_simulate_step(p, season_day(add_days(issue, k)), state, rng);

    ForecastRequest req;
    req.history = h;
    req.horizon = 10;
    req.n_paths = 1000;
    req.seed = 60000 + t;
    const auto e = forecast_long_model2(nullptr, p, req);
    const std::vector<double> probs{0.05, 0.95};
    const auto s = summarize(e, probs);
    covered += truth >= s.quantiles[0][9] && truth <= s.quantiles[1][9];
  }
  const double rate = 100.0 * covered / trials;
  return {std::abs(rate - 90.0) <= 3.0, fmt("lead-10 coverage %.1f%% over %d trials", rate, trials)};
}

// 7. Byte-identical outputs for repeated commands.
Outcome determinism() {
  const fs::path root = work_dir() / "determinism";
  fs::remove_all(root);
  const std::vector<std::string> commands = {
      "simulate --preset oslo --days 1461 --seed 11 --start-date 1990-07-01 --depth-resolution 0.1 -o data.csv",
      "fit data.csv --family short_term -o st.json --max-iterations 300",
      "fit data.csv --family direct --orders 2,1,2 -o direct.json --max-iterations 300",
      "fit data.csv --family temperature --select --max-orders 2,2 -o temp.json --max-iterations 300",
      "forecast data.csv --params st.json --params direct.json --delta 5 --horizon 21 --paths 500 --seed 5 "
      "--issue-date 1993-01-10 --threads 4 --out-dir fc",
      "gof data.csv --params st.json --seed 6 --out-dir gof",
      "evaluate data.csv --deltas 0,3 --horizon 5 --paths 20 --seed 8 --direct-orders 1,1,1 --max-iterations 150 "
      "--threads 4 --out-dir ev"};
  for (const char* run : {"a", "b"}) {
    const fs::path dir = root / run;
    fs::create_directories(dir);
    for (const auto& c : commands)
      if (run_cli(dir, c)) return {false, "command failed: " + c};
  }
  // Single-threaded forecast must match the threaded one.
  if (run_cli(root / "a", "forecast data.csv --params st.json --params direct.json --delta 5 --horizon 21 --paths 500 "
                          "--seed 5 --issue-date 1993-01-10 --threads 1 --out-dir fc1"))
    return {false, "single-thread forecast failed"};

  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file() || entry.path().filename() == "cli.log") continue;
    const fs::path rel = fs::relative(entry.path(), root / "a");
    if (rel.begin()->string() == "fc1") continue;
    if (slurp(entry.path()) != slurp(root / "b" / rel)) return {false, "differs: " + rel.string()};
    ++files;
  }
  for (const char* f : {"ensemble.csv", "summary.csv"})
    if (slurp(root / "a" / "fc" / f) != slurp(root / "a" / "fc1" / f)) return {false, std::string("threads change ") + f};
  return {files >= 15, fmt("%zu output files identical across runs; forecast identical with 1 and 4 threads", files)};
}

// 8. Stepwise AIC selection on AR(1) seasonal temperatures.
Outcome stepwise_sanity() {
  TempParams truth;
  truth.trend = FourierTrend{5.0, {-3.0}, {-9.0}};
  truth.ar = {0.7};
  truth.innovation_sd = 2.5;
  int good = 0;
  bool aic_ok = true;
  std::string chosen;
  for (int rep = 0; rep < 10; ++rep) {
    RandomStream rng(800 + rep);
    LagHistory dev(1);
    std::vector<DailyRecord> rows;
    const Date start{std::chrono::year{1990}, std::chrono::July, std::chrono::day{1}};
    for (int i = 0; i < 5 * 365; ++i) {
      const Date d = add_days(start, i);
      rows.push_back({d, temp_step(truth, season_day(d), dev, rng), 0.0, 0.0});
    }
    const Dataset data(std::move(rows));
    const TempOrders max_orders{4, 4};
    const auto [orders, r] = stepwise_select_temperature(data, max_orders, FitConfig{});
    record("stepwise temperature " + std::to_string(rep), r);
    const auto null = fit_temperature(make_temp_design(data, max_orders.p), TempOrders{0, 0}, FitConfig{});
    record("null temperature " + std::to_string(rep), null);
    good += orders.m == 1 && (orders.p == 1 || orders.p == 2);
    aic_ok &= r.aic <= null.aic;
    chosen += fmt(" (%d,%d)", orders.m, orders.p);
  }
  return {good >= 8 && aic_ok, fmt("%d/10 select m=1, p in {1,2}; AIC never above null: %s; chosen", good,
                                   aic_ok ? "yes" : "no") + chosen};
}

// 9. Monotone traces for every fit above plus one of each family.
Outcome monotone_traces() {
  const Dataset d = oslo_seasons(8, 900, 0.1);
  record("temperature (2,3)", fit_temperature(d, TempOrders{2, 3}, FitConfig{}));
  record("precipitation (3,5,4,3,5,4)", fit_precipitation(d, PrecipOrders{3, 5, 4, 3, 5, 4}, FitConfig{}));
  record("direct (3,1,5)", fit_direct(d, DirectOrders{3, 1, 5}, FitConfig{}));
  record("precipitation stepwise", stepwise_select_precipitation(d, PrecipOrders{1, 2, 1, 1, 2, 1}, FitConfig{}).second);
  record("direct stepwise", stepwise_select_direct(d, DirectOrders{2, 1, 3}, FitConfig{}).second);
  std::size_t steps = 0;
  for (const auto& [name, trace] : g_traces) {
    for (std::size_t i = 1; i < trace.size(); ++i)
      if (trace[i] < trace[i - 1]) return {false, "trace decreases in " + name};
    steps += trace.size();
  }
  return {!g_traces.empty(), fmt("%zu fits, %zu accepted-step values, all nondecreasing", g_traces.size(), steps)};
}

}  // namespace

int main(int argc, char** argv) {
  // Optional list of criterion numbers to run.
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 forecast skill beats periodic baseline", skill_beats_baseline},
      {"2 short-term parameter recovery", parameter_recovery},
      {"3 zig_cdf against quadrature", cdf_oracle},
      {"4 moment-matching round trip", moment_round_trip},
      {"5 PIT self-consistency", pit_self_consistency},
      {"6 forecast band coverage", forecast_coverage},
      {"7 deterministic CLI outputs", determinism},
      {"8 stepwise AIC sanity", stepwise_sanity},
      {"9 optimizer traces nondecreasing", monotone_traces},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (!only.empty() && std::find(only.begin(), only.end(), static_cast<int>(k + 1)) == only.end()) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s  %s: %s (%.0f s)\n", o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(), o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
