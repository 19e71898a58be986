#include "imsm/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace imsm {

namespace {

std::string describe(const nlohmann::json& v) { return v.dump(); }

// Pulls typed fields out of JSON objects, recording every problem instead of
// stopping at the first.
class Reader {
 public:
  explicit Reader(std::vector<FieldError>& errors) : errors_(errors) {}

  void fail(const std::string& field, const std::string& constraint,
            const std::string& got, bool resource = false) {
    errors_.push_back({field, constraint, got, resource});
  }

  bool object(const nlohmann::json& j, const std::string& path) {
    if (j.is_object()) return true;
    fail(path, "must be an object", describe(j));
    return false;
  }

  void only(const nlohmann::json& j, const std::set<std::string>& allowed,
            const std::string& path) {
    for (const auto& [key, value] : j.items()) {
      if (!allowed.contains(key)) {
        fail(path.empty() ? key : path + "." + key, "unknown field", describe(value));
      }
    }
  }

  template <class T>
  void read(const nlohmann::json& j, const std::string& key, const std::string& path,
            T& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    const std::string field = path.empty() ? key : path + "." + key;
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw std::invalid_argument("number expected");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw std::invalid_argument("integer expected");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_integer() && !v.is_number_unsigned()) {
            throw std::invalid_argument("non-negative integer expected");
          }
        }
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::invalid_argument("string expected");
      }
      out = v.get<T>();
    } catch (const std::exception& e) {
      fail(field, e.what(), describe(v));
    }
  }

 private:
  std::vector<FieldError>& errors_;
};

bool regularity_command(Command c) {
  return c == Command::estimate || c == Command::tangent || c == Command::figures;
}

void read_pointwise(Reader& rd, const nlohmann::json& j, PointwiseSettings& out) {
  const std::string p = "estimate.pointwise";
  if (!rd.object(j, p)) return;
  rd.only(j, {"t0", "h0", "k_min", "k_max", "tolerance"}, p);
  rd.read(j, "tolerance", p, out.tolerance);
  rd.read(j, "t0", p, out.t0);
  rd.read(j, "h0", p, out.h0);
  rd.read(j, "k_min", p, out.k_min);
  rd.read(j, "k_max", p, out.k_max);
  if (out.k_max - out.k_min + 1 < 4) {
    rd.fail(p + ".k_max", "at least 4 lags (k_max - k_min + 1 >= 4)",
            std::to_string(out.k_max));
  }
  if (!(out.h0 > 0.0)) rd.fail(p + ".h0", "must be positive", std::to_string(out.h0));
}

void read_moment(Reader& rd, const nlohmann::json& j, MomentSettings& out, double alpha) {
  const std::string p = "estimate.moment";
  if (!rd.object(j, p)) return;
  rd.only(j, {"s", "t_list", "p", "delta", "tolerance"}, p);
  rd.read(j, "s", p, out.s);
  rd.read(j, "t_list", p, out.t_list);
  rd.read(j, "p", p, out.p);
  rd.read(j, "delta", p, out.delta);
  rd.read(j, "tolerance", p, out.tolerance);
  if (!(out.p > 0.0 && out.p < alpha)) {
    rd.fail(p + ".p", "0 < p < alpha (p-th moment infinite for p >= alpha)",
            std::to_string(out.p));
  }
  if (out.t_list.size() < 2) rd.fail(p + ".t_list", "at least two times", "");
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::estimate: return "estimate";
    case Command::tangent: return "tangent";
    case Command::verify: return "verify";
    case Command::figures: return "figures";
  }
  return "unknown";
}

Command command_from_string(const std::string& name) {
  for (auto c : {Command::simulate, Command::estimate, Command::tangent, Command::verify,
                 Command::figures}) {
    if (to_string(c) == name) return c;
  }
  throw InputError("unknown command '" + name + "'");
}

std::vector<double> GridSpec::points() const {
  std::vector<double> out(n_points);
  if (n_points == 1) {
    out[0] = start;
    return out;
  }
  const double denom = static_cast<double>(n_points - 1);
  for (std::size_t j = 0; j < n_points; ++j) {
    out[j] = start + (end - start) * (static_cast<double>(j) / denom);
  }
  out.back() = end;
  return out;
}

ConfigError::ConfigError(std::vector<FieldError> errors)
    : Error([&] {
        std::ostringstream os;
        os << errors.size() << " config error(s)";
        for (const auto& e : errors) os << "; " << e.field << ": " << e.constraint;
        return os.str();
      }()),
      errors_(std::move(errors)) {}

bool ConfigError::resource_only() const {
  for (const auto& e : errors_) {
    if (!e.resource) return false;
  }
  return !errors_.empty();
}

nlohmann::json ConfigError::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& e : errors_) {
    list.push_back({{"field", e.field}, {"constraint", e.constraint}, {"got", e.got}});
  }
  return {{"error", resource_only() ? "resource_cap" : "config"}, {"errors", list}};
}

RunConfig config_from_json(const nlohmann::json& j) {
  std::vector<FieldError> errors;
  Reader rd(errors);
  RunConfig c;
  if (!rd.object(j, "")) throw ConfigError(errors);
  rd.only(j, {"schema_version", "command", "alpha", "hurst", "window", "atom_cap",
              "atom_budget", "grid", "mode", "replicates", "seed", "output_dir", "threads",
              "estimate", "tangent", "verify"},
          "");

  if (!j.contains("schema_version")) {
    rd.fail("schema_version", "required", "missing");
  } else {
    rd.read(j, "schema_version", "", c.schema_version);
    if (c.schema_version != kSchemaVersion) {
      rd.fail("schema_version", "must equal " + std::to_string(kSchemaVersion),
              std::to_string(c.schema_version));
    }
  }
  if (!j.contains("command")) {
    rd.fail("command", "required", "missing");
  } else {
    std::string cmd;
    rd.read(j, "command", "", cmd);
    try {
      c.command = command_from_string(cmd);
    } catch (const Error&) {
      rd.fail("command", "one of simulate, estimate, tangent, verify, figures", cmd);
    }
  }
  rd.read(j, "alpha", "", c.alpha);
  if (!(c.alpha > 0.0 && c.alpha < 2.0)) {
    rd.fail("alpha", "0 < alpha < 2", std::to_string(c.alpha));
  }

  if (j.contains("hurst")) {
    const auto& hj = j.at("hurst");
    bool ok = rd.object(hj, "hurst");
    if (ok && hj.contains("h_lo") && hj.contains("h_hi") && hj.at("h_lo").is_number() &&
        hj.at("h_hi").is_number() &&
        hj.at("h_lo").get<double>() > hj.at("h_hi").get<double>()) {
      rd.fail("hurst", "h_lo <= h_hi violated",
              describe(hj.at("h_lo")) + " > " + describe(hj.at("h_hi")));
      ok = false;
    }
    if (ok) {
      try {
        c.hurst = HurstFunction::from_json(hj);
      } catch (const std::exception& e) {
        rd.fail("hurst", e.what(), describe(hj));
        ok = false;
      }
    }
  }

  if (j.contains("window")) {
    const auto& wj = j.at("window");
    if (wj.is_string() && wj.get<std::string>() == "auto") {
      c.window.reset();
    } else if (wj.is_object()) {
      try {
        c.window = TruncationWindow::from_json(wj);
        c.window->validate();
      } catch (const std::exception& e) {
        rd.fail("window", e.what(), describe(wj));
        c.window.reset();
      }
    } else {
      rd.fail("window", "\"auto\" or {t0, t_end, gamma}", describe(wj));
    }
  }
  rd.read(j, "atom_cap", "", c.atom_cap);
  rd.read(j, "atom_budget", "", c.atom_budget);
  if (!(c.atom_cap > 0.0)) rd.fail("atom_cap", "must be positive", std::to_string(c.atom_cap));
  if (!(c.atom_budget > 0.0)) {
    rd.fail("atom_budget", "must be positive", std::to_string(c.atom_budget));
  }

  if (j.contains("grid")) {
    const auto& gj = j.at("grid");
    if (rd.object(gj, "grid")) {
      rd.only(gj, {"start", "end", "n_points"}, "grid");
      rd.read(gj, "start", "grid", c.grid.start);
      rd.read(gj, "end", "grid", c.grid.end);
      rd.read(gj, "n_points", "grid", c.grid.n_points);
    }
  }
  if (c.grid.n_points < 1) rd.fail("grid.n_points", "at least 1", "0");
  if (c.grid.n_points > 1 && !(c.grid.end > c.grid.start)) {
    rd.fail("grid", "end > start", std::to_string(c.grid.end));
  }

  if (j.contains("mode")) {
    std::string m;
    rd.read(j, "mode", "", m);
    try {
      c.mode = path_mode_from_string(m);
    } catch (const Error&) {
      rd.fail("mode", "one of ito_msm, classical_msm, lfsm", m);
    }
  }
  if (c.mode == PathMode::lfsm && !c.hurst.is_constant()) {
    rd.fail("mode", "lfsm needs a constant hurst", to_string(c.hurst.kind()));
  }
  rd.read(j, "replicates", "", c.replicates);
  if (c.replicates < 1) rd.fail("replicates", "at least 1", "0");
  rd.read(j, "seed", "", c.seed);
  rd.read(j, "output_dir", "", c.output_dir);
  rd.read(j, "threads", "", c.threads);

  if (j.contains("estimate")) {
    const auto& ej = j.at("estimate");
    if (rd.object(ej, "estimate")) {
      rd.only(ej, {"interval", "min_level", "finest_dropped", "tolerance", "pointwise",
                   "moment"},
              "estimate");
      if (ej.contains("interval")) {
        const auto& iv = ej.at("interval");
        if (iv.is_array() && iv.size() == 2 && iv[0].is_number() && iv[1].is_number()) {
          c.estimate.a = iv[0].get<double>();
          c.estimate.b = iv[1].get<double>();
          if (!(c.estimate.b > c.estimate.a)) {
            rd.fail("estimate.interval", "a < b", describe(iv));
          }
        } else {
          rd.fail("estimate.interval", "[a, b]", describe(iv));
        }
      }
      rd.read(ej, "min_level", "estimate", c.estimate.min_level);
      rd.read(ej, "finest_dropped", "estimate", c.estimate.finest_dropped);
      rd.read(ej, "tolerance", "estimate", c.estimate.tolerance);
      if (ej.contains("pointwise")) {
        c.estimate.pointwise.emplace();
        read_pointwise(rd, ej.at("pointwise"), *c.estimate.pointwise);
      }
      if (ej.contains("moment")) {
        c.estimate.moment.emplace();
        read_moment(rd, ej.at("moment"), *c.estimate.moment, c.alpha);
      }
    }
  }

  if (j.contains("tangent")) {
    const auto& tj = j.at("tangent");
    if (rd.object(tj, "tangent")) {
      rd.only(tj, {"t0", "h_list", "r_grid", "n_rep", "p_threshold", "accept_fraction"},
              "tangent");
      rd.read(tj, "t0", "tangent", c.tangent.t0);
      rd.read(tj, "h_list", "tangent", c.tangent.h_list);
      rd.read(tj, "r_grid", "tangent", c.tangent.r_grid);
      rd.read(tj, "n_rep", "tangent", c.tangent.n_rep);
      rd.read(tj, "p_threshold", "tangent", c.tangent.p_threshold);
      rd.read(tj, "accept_fraction", "tangent", c.tangent.accept_fraction);
    }
  }
  if (c.command == Command::tangent) {
    if (c.tangent.n_rep < 500) {
      rd.fail("tangent.n_rep", "at least 500", std::to_string(c.tangent.n_rep));
    }
    if (c.tangent.h_list.empty()) rd.fail("tangent.h_list", "non-empty", "[]");
    for (double h : c.tangent.h_list) {
      if (!(h > 0.0)) rd.fail("tangent.h_list", "positive lags", std::to_string(h));
    }
    if (c.tangent.r_grid.empty()) rd.fail("tangent.r_grid", "non-empty", "[]");
  }

  if (j.contains("verify")) {
    const auto& vj = j.at("verify");
    if (rd.object(vj, "verify")) {
      rd.only(vj, {"t", "epsilon_near", "epsilon_far", "k_min", "k_max", "slope_tolerance",
                   "swap_deltas", "swap_k_min", "swap_k_max", "swap_hurst",
                   "sampler_draws"},
              "verify");
      auto& v = c.verify;
      rd.read(vj, "t", "verify", v.t);
      rd.read(vj, "epsilon_near", "verify", v.epsilon_near);
      rd.read(vj, "epsilon_far", "verify", v.epsilon_far);
      rd.read(vj, "k_min", "verify", v.k_min);
      rd.read(vj, "k_max", "verify", v.k_max);
      rd.read(vj, "slope_tolerance", "verify", v.slope_tolerance);
      rd.read(vj, "swap_deltas", "verify", v.swap_deltas);
      rd.read(vj, "swap_k_min", "verify", v.swap_k_min);
      rd.read(vj, "swap_k_max", "verify", v.swap_k_max);
      rd.read(vj, "swap_hurst", "verify", v.swap_hurst);
      rd.read(vj, "sampler_draws", "verify", v.sampler_draws);
      if (!(v.epsilon_near > 0.0 && v.epsilon_near < 1.0)) {
        rd.fail("verify.epsilon_near", "in (0, 1)", std::to_string(v.epsilon_near));
      }
      if (!(v.epsilon_far > 0.0 && v.epsilon_far < 1.0)) {
        rd.fail("verify.epsilon_far", "in (0, 1)", std::to_string(v.epsilon_far));
      }
      // Increments need h in (0, 1/2); swap norms need h in (0, 1/e).
      if (v.k_min < 2 || v.k_max - v.k_min + 1 < 4) {
        rd.fail("verify.k_min", "k_min >= 2 and at least 4 scales", std::to_string(v.k_min));
      }
      if (v.swap_k_min < 2 || v.swap_k_max - v.swap_k_min + 1 < 4) {
        rd.fail("verify.swap_k_min", "swap_k_min >= 2 and at least 4 scales",
                std::to_string(v.swap_k_min));
      }
      if (!(v.swap_hurst > 0.0 && v.swap_hurst < 1.0)) {
        rd.fail("verify.swap_hurst", "in (0, 1)", std::to_string(v.swap_hurst));
      }
    }
  }

  // Assumption that makes Holder exponents positive.
  if (regularity_command(c.command) && c.alpha > 0.0 && c.alpha < 2.0) {
    if (c.alpha <= 1.0) {
      rd.fail("alpha", "h_lo > 1/alpha unsatisfiable", std::to_string(c.alpha));
    } else if (!(c.hurst.h_lo() > 1.0 / c.alpha)) {
      rd.fail("hurst.h_lo", "h_lo > 1/alpha", std::to_string(c.hurst.h_lo()));
    }
    if (!c.hurst.is_deterministic()) {
      rd.fail("hurst.kind", "deterministic kind required for this command",
              to_string(c.hurst.kind()));
    }
  }

  if (c.window && c.alpha > 0.0 && c.alpha < 2.0) {
    const double lambda = c.window->rate(c.alpha);
    if (!(lambda <= c.atom_cap)) {
      std::ostringstream os;
      os.precision(6);
      os << "lambda = " << lambda;
      rd.fail("window", "Poisson rate lambda exceeds atom_cap " + std::to_string(c.atom_cap),
              os.str(), true);
    }
    if (c.command != Command::verify && c.command != Command::tangent) {
      const auto pts = c.grid.points();
      if (!(pts.front() > c.window->t0) || pts.back() > c.window->t_end) {
        rd.fail("grid", "grid inside (window.t0, window.t_end]",
                std::to_string(pts.front()) + ".." + std::to_string(pts.back()));
      }
    }
  }

  if (!errors.empty()) throw ConfigError(errors);
  return c;
}

RunConfig validate_config(const std::string& raw_json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(raw_json);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({{"", "valid JSON", e.what()}});
  }
  return config_from_json(j);
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["schema_version"] = c.schema_version;
  j["command"] = to_string(c.command);
  j["alpha"] = c.alpha;
  j["hurst"] = c.hurst.to_json();
  j["window"] = c.window ? c.window->to_json() : nlohmann::json("auto");
  j["atom_cap"] = c.atom_cap;
  j["atom_budget"] = c.atom_budget;
  j["grid"] = {{"start", c.grid.start}, {"end", c.grid.end}, {"n_points", c.grid.n_points}};
  j["mode"] = to_string(c.mode);
  j["replicates"] = c.replicates;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  nlohmann::json est = {{"interval", {c.estimate.a, c.estimate.b}},
                        {"min_level", c.estimate.min_level},
                        {"finest_dropped", c.estimate.finest_dropped},
                        {"tolerance", c.estimate.tolerance}};
  if (c.estimate.pointwise) {
    const auto& p = *c.estimate.pointwise;
    est["pointwise"] = {{"t0", p.t0}, {"h0", p.h0}, {"k_min", p.k_min}, {"k_max", p.k_max},
                          {"tolerance", p.tolerance}};
  }
  if (c.estimate.moment) {
    const auto& m = *c.estimate.moment;
    est["moment"] = {{"s", m.s},
                     {"t_list", m.t_list},
                     {"p", m.p},
                     {"delta", m.delta},
                     {"tolerance", m.tolerance}};
  }
  j["estimate"] = est;
  j["tangent"] = {{"t0", c.tangent.t0},
                  {"h_list", c.tangent.h_list},
                  {"r_grid", c.tangent.r_grid},
                  {"n_rep", c.tangent.n_rep},
                  {"p_threshold", c.tangent.p_threshold},
                  {"accept_fraction", c.tangent.accept_fraction}};
  const auto& v = c.verify;
  j["verify"] = {{"t", v.t},
                 {"epsilon_near", v.epsilon_near},
                 {"epsilon_far", v.epsilon_far},
                 {"k_min", v.k_min},
                 {"k_max", v.k_max},
                 {"slope_tolerance", v.slope_tolerance},
                 {"swap_deltas", v.swap_deltas},
                 {"swap_k_min", v.swap_k_min},
                 {"swap_k_max", v.swap_k_max},
                 {"swap_hurst", v.swap_hurst},
                 {"sampler_draws", v.sampler_draws}};
  return j;
}

}  // namespace imsm
