#include "imsm/hurst.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "imsm/errors.hpp"

namespace imsm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double weierstrass_sum(const HurstFunction::Weierstrass& w, double x) {
  double sum = 0.0;
  double ak = 1.0;
  double bk = 1.0;
  for (int k = 0; k <= w.terms; ++k) {
    sum += ak * std::cos(bk * w.omega * x);
    ak *= w.a;
    bk *= w.b;
  }
  return sum;
}

double weierstrass_norm(const HurstFunction::Weierstrass& w) {
  double s = 0.0;
  double ak = 1.0;
  for (int k = 0; k <= w.terms; ++k) {
    s += ak;
    ak *= w.a;
  }
  return s;
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) {
      throw InputError("unknown field '" + key + "' in " + where);
    }
  }
}

}  // namespace

std::string to_string(HurstKind kind) {
  switch (kind) {
    case HurstKind::constant: return "constant";
    case HurstKind::smooth_catalog: return "smooth_catalog";
    case HurstKind::rough_weierstrass: return "rough_weierstrass";
    case HurstKind::piecewise_linear: return "piecewise_linear";
    case HurstKind::adapted_to_path: return "adapted_to_path";
  }
  return "unknown";
}

HurstKind hurst_kind_from_string(const std::string& name) {
  for (auto k : {HurstKind::constant, HurstKind::smooth_catalog,
                 HurstKind::rough_weierstrass, HurstKind::piecewise_linear,
                 HurstKind::adapted_to_path}) {
    if (to_string(k) == name) return k;
  }
  throw InputError("unknown hurst kind '" + name + "'");
}

double Modulus::operator()(double d) const {
  if (d <= 0.0) return 0.0;
  if (kind == Kind::holder) return constant * std::pow(d, exponent);
  return constant / (1.0 + std::fabs(std::log(d)));
}

HurstFunction::HurstFunction(double h_lo, double h_hi, Params params)
    : h_lo_(h_lo), h_hi_(h_hi), params_(std::move(params)) {
  validate();
}

HurstFunction HurstFunction::constant(double value) {
  return HurstFunction(value, value, Constant{value});
}

HurstFunction HurstFunction::sine(double h_lo, double h_hi, double frequency,
                                  double phase) {
  return HurstFunction(h_lo, h_hi, Sine{frequency, phase});
}

HurstFunction HurstFunction::weierstrass(double h_lo, double h_hi, double a,
                                         double b, int terms, double amplitude,
                                         double omega) {
  return HurstFunction(h_lo, h_hi, Weierstrass{a, b, terms, amplitude, omega});
}

HurstFunction HurstFunction::piecewise_linear(
    double h_lo, double h_hi, std::vector<std::pair<double, double>> knots) {
  return HurstFunction(h_lo, h_hi, PiecewiseLinear{std::move(knots)});
}

HurstFunction HurstFunction::adapted_to_path(double h_lo, double h_hi,
                                             double kappa) {
  return HurstFunction(h_lo, h_hi, Adapted{kappa});
}

void HurstFunction::validate() const {
  if (!(h_lo_ > 0.0 && h_lo_ <= h_hi_ && h_hi_ < 1.0)) {
    throw ParameterError("hurst range must satisfy 0 < h_lo <= h_hi < 1");
  }
  std::visit(
      Overloaded{
          [&](const Constant& c) {
            if (c.value != h_lo_ || c.value != h_hi_) {
              throw ParameterError("constant hurst needs h_lo = h_hi = value");
            }
          },
          [](const Sine& s) {
            if (!std::isfinite(s.frequency) || !std::isfinite(s.phase)) {
              throw ParameterError("sine hurst parameters must be finite");
            }
          },
          [](const Weierstrass& w) {
            if (!(w.a > 0.0 && w.a < 1.0)) {
              throw ParameterError("weierstrass a must lie in (0, 1)");
            }
            if (!(w.b > 1.0)) throw ParameterError("weierstrass b must exceed 1");
            if (w.terms < 0 || w.terms > 64) {
              throw ParameterError("weierstrass terms must lie in [0, 64]");
            }
            if (!(w.amplitude >= 0.0 && w.amplitude <= 1.0)) {
              throw ParameterError("weierstrass amplitude must lie in [0, 1]");
            }
            if (!(w.omega > 0.0) || !std::isfinite(w.omega)) {
              throw ParameterError("weierstrass omega must be positive");
            }
          },
          [](const PiecewiseLinear& p) {
            if (p.knots.empty()) throw ParameterError("piecewise linear needs knots");
            for (std::size_t i = 1; i < p.knots.size(); ++i) {
              if (!(p.knots[i].first > p.knots[i - 1].first)) {
                throw ParameterError("piecewise linear knots must increase in x");
              }
            }
          },
          [](const Adapted& a) {
            if (!std::isfinite(a.kappa)) {
              throw ParameterError("adapted kappa must be finite");
            }
          },
      },
      params_);
}

HurstKind HurstFunction::kind() const {
  return std::visit(
      Overloaded{
          [](const Constant&) { return HurstKind::constant; },
          [](const Sine&) { return HurstKind::smooth_catalog; },
          [](const Weierstrass&) { return HurstKind::rough_weierstrass; },
          [](const PiecewiseLinear&) { return HurstKind::piecewise_linear; },
          [](const Adapted&) { return HurstKind::adapted_to_path; },
      },
      params_);
}

double HurstFunction::raw(double x, const PathContext& ctx) const {
  const double mid = 0.5 * (h_lo_ + h_hi_);
  const double half = 0.5 * (h_hi_ - h_lo_);
  return std::visit(
      Overloaded{
          [&](const Constant& c) { return c.value; },
          [&](const Sine& s) {
            return mid + half * std::sin(2.0 * std::numbers::pi * s.frequency * x +
                                         s.phase);
          },
          [&](const Weierstrass& w) {
            if (w.amplitude == 0.0) return mid;
            return mid + w.amplitude * half * weierstrass_sum(w, x) /
                             weierstrass_norm(w);
          },
          [&](const PiecewiseLinear& p) {
            const auto& k = p.knots;
            if (x <= k.front().first) return k.front().second;
            if (x >= k.back().first) return k.back().second;
            auto it = std::upper_bound(
                k.begin(), k.end(), x,
                [](double v, const std::pair<double, double>& kn) { return v < kn.first; });
            const auto& [x1, y1] = *it;
            const auto& [x0, y0] = *(it - 1);
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
          },
          [&](const Adapted& a) {
            return mid + half * std::tanh(a.kappa * ctx.accumulated_jump_sum);
          },
      },
      params_);
}

double HurstFunction::operator()(double x, const PathContext& ctx) const {
  return std::clamp(raw(x, ctx), h_lo_, h_hi_);
}

double HurstFunction::min_on(double a, double b, std::size_t samples) const {
  if (b < a) std::swap(a, b);
  if (is_constant()) return h_lo_;
  if (!is_deterministic()) return h_lo_;
  if (const auto* p = std::get_if<PiecewiseLinear>(&params_)) {
    double m = std::min((*this)(a), (*this)(b));
    for (const auto& [kx, _] : p->knots) {
      if (kx > a && kx < b) m = std::min(m, (*this)(kx));
    }
    return m;
  }
  samples = std::max<std::size_t>(samples, 2);
  double m = (*this)(a);
  for (std::size_t i = 1; i < samples; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) /
                             static_cast<double>(samples - 1);
    m = std::min(m, (*this)(x));
  }
  return m;
}

std::optional<Modulus> HurstFunction::modulus_hint() const {
  const double half = 0.5 * (h_hi_ - h_lo_);
  return std::visit(
      Overloaded{
          [](const Constant&) -> std::optional<Modulus> {
            return Modulus::holder(1.0, 0.0);
          },
          [&](const Sine& s) -> std::optional<Modulus> {
            return Modulus::holder(1.0, 2.0 * std::numbers::pi *
                                            std::fabs(s.frequency) * half);
          },
          [&](const Weierstrass& w) -> std::optional<Modulus> {
            const double rho =
                w.a * w.b > 1.0 ? std::log(1.0 / w.a) / std::log(w.b) : 1.0;
            // |W(x) - W(y)| <= sum_k a^k min(2, b^k omega d); take the sup of
            // that bound over d^rho on a log grid of d in (0, 1].
            double worst = 0.0;
            for (int i = 0; i <= 400; ++i) {
              const double d = std::pow(10.0, -12.0 + 12.0 * i / 400.0);
              double bound = 0.0, ak = 1.0, bk = 1.0;
              for (int k = 0; k <= w.terms; ++k) {
                bound += ak * std::min(2.0, bk * w.omega * d);
                ak *= w.a;
                bk *= w.b;
              }
              worst = std::max(worst, bound / std::pow(d, rho));
            }
            return Modulus::holder(
                rho, w.amplitude * half * worst / weierstrass_norm(w));
          },
          [](const PiecewiseLinear& p) -> std::optional<Modulus> {
            double slope = 0.0;
            for (std::size_t i = 1; i < p.knots.size(); ++i) {
              slope = std::max(slope, std::fabs((p.knots[i].second - p.knots[i - 1].second) /
                                                (p.knots[i].first - p.knots[i - 1].first)));
            }
            return Modulus::holder(1.0, slope);
          },
          [](const Adapted&) -> std::optional<Modulus> { return std::nullopt; },
      },
      params_);
}

nlohmann::json HurstFunction::to_json() const {
  nlohmann::json params = std::visit(
      Overloaded{
          [](const Constant& c) { return nlohmann::json{{"value", c.value}}; },
          [](const Sine& s) {
            return nlohmann::json{{"frequency", s.frequency}, {"phase", s.phase}};
          },
          [](const Weierstrass& w) {
            return nlohmann::json{{"a", w.a},
                                  {"b", w.b},
                                  {"terms", w.terms},
                                  {"amplitude", w.amplitude},
                                  {"omega", w.omega}};
          },
          [](const PiecewiseLinear& p) {
            nlohmann::json knots = nlohmann::json::array();
            for (const auto& [x, h] : p.knots) knots.push_back({x, h});
            return nlohmann::json{{"knots", knots}};
          },
          [](const Adapted& a) { return nlohmann::json{{"kappa", a.kappa}}; },
      },
      params_);
  return {{"kind", to_string(kind())},
          {"params", params},
          {"h_lo", h_lo_},
          {"h_hi", h_hi_}};
}

HurstFunction HurstFunction::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("hurst descriptor must be an object");
  reject_unknown(j, {"kind", "params", "h_lo", "h_hi"}, "hurst");
  const HurstKind kind = hurst_kind_from_string(j.at("kind").get<std::string>());
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  auto num = [&](const char* key) { return params.at(key).get<double>(); };
  auto num_or = [&](const char* key, double fallback) {
    return params.contains(key) ? params.at(key).get<double>() : fallback;
  };
  switch (kind) {
    case HurstKind::constant: {
      reject_unknown(params, {"value"}, "hurst.params");
      const double v = params.contains("value") ? num("value")
                                                : j.at("h_lo").get<double>();
      return constant(v);
    }
    case HurstKind::smooth_catalog:
      reject_unknown(params, {"frequency", "phase"}, "hurst.params");
      return sine(j.at("h_lo").get<double>(), j.at("h_hi").get<double>(),
                  num("frequency"), num_or("phase", 0.0));
    case HurstKind::rough_weierstrass:
      reject_unknown(params, {"a", "b", "terms", "amplitude", "omega"},
                     "hurst.params");
      return weierstrass(j.at("h_lo").get<double>(), j.at("h_hi").get<double>(),
                         num("a"), num("b"), params.at("terms").get<int>(),
                         num_or("amplitude", 1.0), num_or("omega", 1.0));
    case HurstKind::piecewise_linear: {
      reject_unknown(params, {"knots"}, "hurst.params");
      std::vector<std::pair<double, double>> knots;
      for (const auto& k : params.at("knots")) {
        knots.emplace_back(k.at(0).get<double>(), k.at(1).get<double>());
      }
      return piecewise_linear(j.at("h_lo").get<double>(),
                              j.at("h_hi").get<double>(), std::move(knots));
    }
    case HurstKind::adapted_to_path:
      reject_unknown(params, {"kappa"}, "hurst.params");
      return adapted_to_path(j.at("h_lo").get<double>(),
                             j.at("h_hi").get<double>(), num("kappa"));
  }
  throw InputError("unreachable hurst kind");
}

ModulusCheck verify_modulus(const HurstFunction& h, const Modulus& w,
                            double grid_step, std::pair<double, double> window) {
  if (!h.is_deterministic()) {
    throw UnsupportedKindError(
        "modulus of an adapted (random) hurst function cannot be checked on a grid");
  }
  if (!(grid_step > 0.0)) throw ParameterError("grid_step must be positive");
  const auto [lo, hi] = window;
  if (!(hi >= lo)) throw ParameterError("window must satisfy lo <= hi");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / grid_step)) + 1;
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = h(lo + grid_step * static_cast<double>(i));
  const auto max_lag =
      std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::floor(1.0 / grid_step + 1e-9)));

  ModulusCheck out;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    const double bound = w(grid_step * static_cast<double>(lag));
    for (std::size_t i = 0; i + lag < n; ++i) {
      const double diff = std::fabs(values[i + lag] - values[i]);
      if (diff == 0.0) continue;
      const double ratio = bound > 0.0 ? diff / bound
                                       : std::numeric_limits<double>::infinity();
      out.worst_ratio = std::max(out.worst_ratio, ratio);
    }
  }
  // Rounding in H itself can push an exact bound a few ulps over.
  out.holds = out.worst_ratio <= 1.0 + 1e-9;
  return out;
}

}  // namespace imsm
