#include "imsm/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "imsm/analysis.hpp"
#include "imsm/errors.hpp"
#include "imsm/kernel.hpp"
#include "imsm/stable_random.hpp"
#include "imsm/statistics.hpp"

namespace imsm {

namespace fs = std::filesystem;

namespace {

struct ResolvedWindow {
  TruncationWindow window;
  bool automatic = false;
  bool gamma_limited_by_budget = false;

  nlohmann::json to_json() const {
    nlohmann::json j = window.to_json();
    j["auto"] = automatic;
    j["gamma_limited_by_budget"] = gamma_limited_by_budget;
    return j;
  }
};

ResolvedWindow resolve_window(const RunConfig& c, const std::vector<double>& grid) {
  if (c.window) return {*c.window, false, false};
  const AutoWindow aw = auto_window(grid, c.hurst, c.alpha, c.atom_budget);
  return {aw.window, true, aw.gamma_limited_by_budget};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_json(const fs::path& file, const nlohmann::json& j) {
  std::ofstream out(file);
  if (!out) throw InputError("cannot write " + file.string());
  out << j.dump(2) << '\n';
}

class Output {
 public:
  explicit Output(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

  fs::path path(const std::string& name) {
    files_.push_back(name);
    return dir_ / name;
  }

  RunOutcome finish(const RunConfig& c, const nlohmann::json& resolved,
                    const nlohmann::json& summary, int exit_code) {
    nlohmann::json cfg = config_to_json(c);
    // Worker count and destination never change results; both stay out of the record.
    cfg.erase("threads");
    cfg.erase("output_dir");
    nlohmann::json manifest = {{"schema_version", kSchemaVersion},
                               {"command", to_string(c.command)},
                               {"config", cfg},
                               {"resolved", resolved},
                               {"files", files_},
                               {"summary", summary},
                               {"created_at", utc_timestamp()}};
    write_json(dir_ / "manifest.json", manifest);
    RunOutcome out{exit_code, files_, summary};
    out.files.push_back("manifest.json");
    return out;
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

EnsembleSpec ensemble_for(const RunConfig& c, const std::vector<double>& grid,
                          const TruncationWindow& w) {
  EnsembleSpec spec;
  spec.alpha = c.alpha;
  spec.hurst = c.hurst;
  spec.mode = c.mode;
  spec.window = w;
  spec.grid = grid;
  spec.seed = c.seed;
  spec.replicates = c.replicates;
  spec.threads = c.threads;
  spec.atom_cap = c.atom_cap;
  return spec;
}

double slope_of(const std::vector<double>& h, const std::vector<double>& v) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < h.size(); ++i) {
    lx.push_back(std::log(h[i]));
    ly.push_back(std::log(v[i]));
  }
  return ols(lx, ly).slope;
}

RunOutcome run_simulate(const RunConfig& c) {
  const auto grid = c.grid.points();
  const ResolvedWindow rw = resolve_window(c, grid);
  const auto paths = simulate_ensemble(ensemble_for(c, grid, rw.window));
  Output out(c.output_dir);
  for (const auto& p : paths) {
    write_path_csv(out.path("path_" + std::to_string(p.provenance.stream_id) + ".csv").string(),
                   p.grid, p.values);
  }
  const nlohmann::json resolved = {{"window", rw.to_json()},
                                   {"generator", "jumps"},
                                   {"mode", to_string(c.mode)}};
  return out.finish(c, resolved, {{"replicates", paths.size()}}, kExitOk);
}

RunOutcome run_estimate(const RunConfig& c) {
  const auto grid = c.grid.points();
  const ResolvedWindow rw = resolve_window(c, grid);
  const auto paths = simulate_ensemble(ensemble_for(c, grid, rw.window));
  const UniformExponentOptions opts{c.estimate.min_level, c.estimate.finest_dropped};

  std::vector<ExponentEstimate> estimates;
  std::vector<double> values;
  for (const auto& p : paths) {
    estimates.push_back(estimate_uniform_exponent(p, c.estimate.a, c.estimate.b, opts));
    values.push_back(estimates.back().estimate);
  }
  const double target = c.hurst.min_on(c.estimate.a, c.estimate.b) - 1.0 / c.alpha;
  const double med = median(values);
  bool pass = std::fabs(med - target) <= c.estimate.tolerance;
  nlohmann::json diag = {{"median_estimate", med},
                         {"target", target},
                         {"replicates", paths.size()}};

  if (c.estimate.pointwise) {
    const auto& pw = *c.estimate.pointwise;
    const ExponentEstimate e = estimate_pointwise_exponent(
        paths, pw.t0, {pw.h0, pw.k_min, pw.k_max});
    const double pt = c.hurst(pw.t0);
    const bool ok = std::fabs(e.estimate - pt) <= pw.tolerance;
    diag["pointwise"] = {{"estimate", e.to_json()}, {"target", pt}, {"pass", ok}};
    pass = pass && ok;
  }
  if (c.estimate.moment) {
    const auto& m = *c.estimate.moment;
    const ScalingReport rep = moment_scaling_check(paths, m.s, m.t_list, m.p, m.delta,
                                                   c.hurst, c.alpha, m.tolerance);
    diag["moment"] = rep.to_json();
    pass = pass && rep.pass;
  }

  Output out(c.output_dir);
  {
    std::FILE* f = std::fopen(out.path("scales.csv").c_str(), "w");
    if (!f) throw InputError("cannot write scales.csv");
    std::fprintf(f, "replicate,scale,log2_oscillation\n");
    for (std::size_t r = 0; r < estimates.size(); ++r) {
      for (std::size_t k = 0; k < estimates[r].fit_scales.size(); ++k) {
        std::fprintf(f, "%zu,%.17g,%.17g\n", r, estimates[r].fit_scales[k],
                     estimates[r].fit_values[k]);
      }
    }
    std::fclose(f);
  }
  nlohmann::json params = {{"alpha", c.alpha},
                           {"hurst", c.hurst.to_json()},
                           {"interval", {c.estimate.a, c.estimate.b}},
                           {"mode", to_string(c.mode)}};
  write_json(out.path("estimate_report.json"),
             analysis_report("dyadic_oscillation", params, estimates, diag, pass,
                             c.estimate.tolerance));
  return out.finish(c, {{"window", rw.to_json()}}, {{"pass", pass}}, kExitOk);
}

RunOutcome run_tangent(const RunConfig& c) {
  TangentSetup s;
  s.alpha = c.alpha;
  s.hurst = c.hurst;
  s.mode = c.mode;
  s.seed = c.seed;
  s.t0 = c.tangent.t0;
  s.h_list = c.tangent.h_list;
  s.r_grid = c.tangent.r_grid;
  s.n_rep = c.tangent.n_rep;
  s.threads = c.threads;
  s.p_threshold = c.tangent.p_threshold;
  s.accept_fraction = c.tangent.accept_fraction;
  std::vector<double> pts{c.tangent.t0};
  for (double h : s.h_list) {
    for (double r : s.r_grid) pts.push_back(c.tangent.t0 + h * r);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const ResolvedWindow rw = resolve_window(c, pts);
  s.window = rw.window;
  const TangentReport rep = tangent_process_check(s);
  Output out(c.output_dir);
  write_json(out.path("tangent_report.json"), rep.to_json());
  return out.finish(c, {{"window", rw.to_json()}}, {{"pass", rep.pass}}, kExitOk);
}

RunOutcome run_figures(const RunConfig& c) {
  FigureSetup s;
  s.alpha = c.alpha;
  s.hurst = c.hurst;
  s.grid = c.grid.points();
  const ResolvedWindow rw = resolve_window(c, s.grid);
  s.window = rw.window;
  s.a = c.estimate.a;
  s.b = c.estimate.b;
  s.replicates = c.replicates;
  s.seed = c.seed;
  s.threads = c.threads;
  s.estimator = {c.estimate.min_level, c.estimate.finest_dropped};
  const FigureResult res = figure_reproduction(s);
  Output out(c.output_dir);
  write_path_csv(out.path("hurst.csv").string(), s.grid, res.hurst_values);
  write_path_csv(out.path("x_path.csv").string(), s.grid, res.x_paths.front().values);
  write_path_csv(out.path("y_path.csv").string(), s.grid, res.y_paths.front().values);
  write_json(out.path("figure_report.json"), res.report());
  return out.finish(c, {{"window", rw.to_json()}}, res.report(), kExitOk);
}

RunOutcome run_verify(const RunConfig& c) {
  const nlohmann::json rep = verification_report(c);
  Output out(c.output_dir);
  write_json(out.path("verify_report.json"), rep);
  const bool pass = rep.at("pass").get<bool>();
  return out.finish(c, nlohmann::json::object(), {{"pass", pass}},
                    pass ? kExitOk : kExitVerifyFailed);
}

}  // namespace

nlohmann::json verification_report(const RunConfig& c) {
  const auto& v = c.verify;
  const double alpha = c.alpha;
  nlohmann::json rep;
  bool all = true;

  // Increment-norm scalings over the three regions.
  {
    std::vector<double> hs;
    for (int k = v.k_min; k <= v.k_max; ++k) hs.push_back(std::ldexp(1.0, -k));
    const double h_at_t = c.hurst.is_deterministic() ? c.hurst(v.t) : c.hurst.h_lo();
    struct Case {
      const char* name;
      KernelRegion region;
      double target;
    };
    const Case cases[] = {
        {"far_past", KernelRegion::far_past(v.epsilon_far), alpha},
        {"near_past", KernelRegion::near_past(v.epsilon_near), alpha * h_at_t},
        {"new_mass", KernelRegion::new_mass(), alpha * h_at_t},
    };
    nlohmann::json regions = nlohmann::json::object();
    for (const auto& cs : cases) {
      std::vector<double> vals;
      for (double h : hs) {
        vals.push_back(quad_kernel_diff_alpha_norm(v.t, h, cs.region, c.hurst, alpha));
      }
      const double slope = slope_of(hs, vals);
      const bool ok = std::fabs(slope - cs.target) <= v.slope_tolerance;
      all = all && ok;
      regions[cs.name] = {{"epsilon", cs.region.epsilon},
                          {"h", hs},
                          {"values", vals},
                          {"slope", slope},
                          {"target", cs.target},
                          {"pass", ok}};
    }
    rep["increment_norm"] = regions;
  }

  // Exponent-swap bound.
  {
    const double a = v.swap_hurst;
    std::vector<double> hs;
    for (int k = v.swap_k_min; k <= v.swap_k_max; ++k) hs.push_back(std::ldexp(1.0, -k));
    const auto ha = HurstFunction::constant(a);
    nlohmann::json per_delta = nlohmann::json::array();
    bool ok = true;
    for (double d : v.swap_deltas) {
      const auto hb = HurstFunction::constant(a + d);
      std::vector<double> ratios;
      for (double h : hs) {
        const double val = quad_exponent_swap_norm(h, ha, hb, alpha);
        ratios.push_back(val / (std::pow(d, alpha) * std::pow(h, alpha * a) *
                                std::pow(std::fabs(std::log(h)), alpha)));
      }
      // Bounded uniformly: no growth from the coarse half to the fine half.
      const std::size_t half = ratios.size() / 2;
      const double coarse = *std::max_element(ratios.begin(), ratios.begin() + half);
      const double fine = *std::max_element(ratios.begin() + half, ratios.end());
      const bool bounded = std::all_of(ratios.begin(), ratios.end(),
                                       [](double r) { return std::isfinite(r) && r > 0.0; }) &&
                           fine <= coarse;
      ok = ok && bounded;
      per_delta.push_back({{"delta", d},
                           {"h", hs},
                           {"ratios", ratios},
                           {"max_ratio", std::max(coarse, fine)},
                           {"bounded", bounded}});
    }
    const double zero = quad_exponent_swap_norm(hs.front(), ha, ha, alpha);
    ok = ok && zero == 0.0;
    // Halving the smallest exponent gap scales the norm by about 2^-alpha.
    const double d_small = *std::min_element(v.swap_deltas.begin(), v.swap_deltas.end());
    std::vector<double> halving;
    bool halving_ok = true;
    for (double h : hs) {
      const double full = quad_exponent_swap_norm(h, ha, HurstFunction::constant(a + d_small), alpha);
      const double halfv =
          quad_exponent_swap_norm(h, ha, HurstFunction::constant(a + d_small / 2), alpha);
      const double r = halfv / full / std::pow(2.0, -alpha);
      halving.push_back(r);
      halving_ok = halving_ok && std::fabs(r - 1.0) <= 0.1;
    }
    ok = ok && halving_ok;
    all = all && ok;
    rep["exponent_swap"] = {{"hurst", a},
                            {"deltas", per_delta},
                            {"value_at_zero_delta", zero},
                            {"halving_ratio_over_2^-alpha", halving},
                            {"halving_pass", halving_ok},
                            {"pass", ok}};
  }

  // Sampler laws.
  {
    const std::size_t n = v.sampler_draws;
    nlohmann::json s;
    RngStream r1(c.seed, 1);
    const double gamma = 1.0;
    std::size_t above = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (sample_pareto(gamma, alpha, r1.uniform()) > 2.0 * gamma) ++above;
    }
    const double p = std::pow(2.0, -alpha);
    const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    const double surv = static_cast<double>(above) / static_cast<double>(n);
    const bool pareto_ok = std::fabs(surv - p) <= 3.0 * sigma;
    s["pareto_survival"] = {{"empirical", surv}, {"target", p}, {"pass", pareto_ok}};

    RngStream r2(c.seed, 2);
    std::vector<double> g(n);
    for (auto& x : g) x = sample_sas({2.0, 1.0}, r2);
    const double var = sample_variance(g);
    const bool var_ok = std::fabs(var / 2.0 - 1.0) <= 0.05;
    s["gaussian_variance"] = {{"empirical", var}, {"target", 2.0}, {"pass", var_ok}};

    RngStream r3(c.seed, 3);
    std::vector<double> a(10 * n);
    for (auto& x : a) x = sample_sas({alpha, 1.0}, r3);
    const double tail = tail_survival_slope(std::move(a));
    const bool tail_ok = std::fabs(tail + alpha) <= 0.1;
    s["stable_tail_slope"] = {{"empirical", tail}, {"target", -alpha}, {"pass", tail_ok}};
    s["pass"] = pareto_ok && var_ok && tail_ok;
    all = all && pareto_ok && var_ok && tail_ok;
    rep["samplers"] = s;
  }
  rep["pass"] = all;
  return rep;
}

void write_path_csv(const std::string& file, const std::vector<double>& t,
                    const std::vector<double>& v) {
  std::FILE* f = std::fopen(file.c_str(), "w");
  if (!f) throw InputError("cannot write " + file);
  std::fprintf(f, "t,value\n");
  for (std::size_t i = 0; i < t.size(); ++i) std::fprintf(f, "%.17g,%.17g\n", t[i], v[i]);
  std::fclose(f);
}

RunOutcome run(const RunConfig& config) {
  switch (config.command) {
    case Command::simulate: return run_simulate(config);
    case Command::estimate: return run_estimate(config);
    case Command::tangent: return run_tangent(config);
    case Command::verify: return run_verify(config);
    case Command::figures: return run_figures(config);
  }
  throw InputError("unknown command");
}

int exit_code_for(const std::exception& e) {
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) {
    return ce->resource_only() ? kExitResource : kExitConfig;
  }
  if (dynamic_cast<const ResourceError*>(&e)) return kExitResource;
  if (dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
  return kExitConfig;
}

nlohmann::json error_record(const std::exception& e) {
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) return ce->to_json();
  if (const auto* re = dynamic_cast<const ResourceError*>(&e)) {
    return {{"error", "resource_cap"},
            {"message", re->what()},
            {"requested", re->requested()},
            {"cap", re->cap()}};
  }
  if (const auto* ne = dynamic_cast<const NumericalError*>(&e)) {
    return {{"error", "numerical"},
            {"message", ne->what()},
            {"achieved_tolerance", ne->achieved_tolerance()}};
  }
  return {{"error", "config"}, {"message", e.what()}};
}

}  // namespace imsm
