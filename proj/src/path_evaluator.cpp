#include "imsm/path_evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "imsm/errors.hpp"
#include "imsm/kernel.hpp"

namespace imsm {

namespace {

// Far-field interpolation parameters. An atom at x is summarized on a node
// covering grid times [lo, hi] when lo - x >= kSeparation (hi - lo); the
// kernel is then analytic on a Bernstein ellipse of parameter >= 3 + sqrt(8)
// around [lo, hi], so kTimeNodes Chebyshev points give ~1e-16 relative error.
constexpr std::size_t kLeafSize = 32;
constexpr double kSeparation = 1.0;
constexpr int kTimeNodes = 20;
// Per-point exponents: t -> (t - x)^e is also interpolated in e on
// [e_min, e_max] of the node. exp(c s) on [-1, 1] with c <= kMaxExpSpread
// is resolved by kExpNodes points to below 1e-17.
constexpr int kExpNodes = 16;
constexpr double kMaxExpSpread = 1.0;
constexpr int kGlobalExpNodes = 24;
constexpr double kMaxGlobalExpSpread = 4.0;
constexpr double kDirectWorkLimit = 2e6;

struct Chebyshev {
  std::vector<double> unit;    // cos(pi k / (K - 1)), k = 0..K-1
  std::vector<double> weight;  // barycentric weights (-1)^k, halved at ends

  explicit Chebyshev(int k) : unit(k), weight(k) {
    for (int i = 0; i < k; ++i) {
      unit[i] = k == 1 ? 0.0 : std::cos(std::numbers::pi * i / (k - 1));
      weight[i] = (i % 2 == 0 ? 1.0 : -1.0) * ((i == 0 || i == k - 1) ? 0.5 : 1.0);
    }
    if (k > 1) {
      unit[0] = 1.0;
      unit[k - 1] = -1.0;
    }
  }

  // Nodes mapped onto [lo, hi]; the end nodes land exactly on hi and lo.
  void nodes(double lo, double hi, std::vector<double>& out) const {
    const std::size_t k = unit.size();
    out.resize(k);
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < k; ++i) out[i] = mid + half * unit[i];
    if (k > 1) {
      out[0] = hi;
      out[k - 1] = lo;
    }
  }

  // Normalized barycentric coefficients for evaluating at z.
  void coefficients(const std::vector<double>& nodes, double z,
                    std::vector<double>& out) const {
    const std::size_t k = nodes.size();
    out.assign(k, 0.0);
    if (k == 1) {
      out[0] = 1.0;
      return;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double d = z - nodes[i];
      if (d == 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        out[i] = 1.0;
        return;
      }
      out[i] = weight[i] / d;
      sum += out[i];
    }
    for (auto& c : out) c /= sum;
  }
};

void validate_inputs(std::span<const double> grid, std::span<const double> x,
                     std::span<const double> y, std::size_t exponents,
                     std::size_t expected_exponents) {
  if (x.size() != y.size()) throw InputError("atom times and sizes differ in length");
  if (exponents != expected_exponents) throw InputError("exponent array has the wrong length");
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!std::isfinite(grid[j])) throw InputError("grid contains a non-finite time");
    if (j > 0 && !(grid[j] > grid[j - 1])) {
      throw InputError("grid must be strictly increasing");
    }
  }
}

void zero_at_origin(std::span<const double> grid, std::vector<double>& out) {
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (grid[j] == 0.0) out[j] = 0.0;
  }
}

std::size_t first_after(std::span<const double> grid, double x) {
  return static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), x) -
                                  grid.begin());
}

// Binary partition of grid indices with per-node Chebyshev accumulators.
class FarFieldTree {
 public:
  struct Node {
    std::size_t begin, end;
    int left = -1, right = -1;
    double lo, hi;
    double e_min = 0.0, e_max = 0.0;
    int exp_nodes = 1;
    std::size_t offset = 0;
    bool used = false;
  };

  FarFieldTree(std::span<const double> grid, std::span<const double> e_grid)
      : grid_(grid), e_grid_(e_grid), time_cheb_(kTimeNodes), exp_cheb_(kExpNodes) {
    build(0, grid.size());
    acc_.assign(storage_, 0.0);
  }

  const std::vector<Node>& nodes() const { return nodes_; }

  // Adds y (t - x)^e for every grid t > x with index >= k.
  void insert_per_atom(double x, double y, double e, std::size_t k,
                       std::vector<double>& direct) {
    insert(0, x, y, e, k, direct);
  }

  // Adds y (t_j - x)^{e_j} for every grid t_j > x with index >= k.
  void insert_per_point(double x, double y, std::size_t k, std::vector<double>& direct) {
    insert(0, x, y, std::nan(""), k, direct);
  }

  void evaluate(std::vector<double>& out) const {
    std::vector<double> tn, en, ct, ce;
    for (const auto& node : nodes_) {
      if (!node.used) continue;
      time_cheb_.nodes(node.lo, node.hi, tn);
      const double* a = acc_.data() + node.offset;
      if (node.exp_nodes > 1) exp_cheb_.nodes(node.e_min, node.e_max, en);
      for (std::size_t j = node.begin; j < node.end; ++j) {
        time_cheb_.coefficients(tn, grid_[j], ct);
        if (node.exp_nodes == 1) {
          double s = 0.0;
          for (int k = 0; k < kTimeNodes; ++k) s += ct[k] * a[k];
          out[j] += s;
        } else {
          exp_cheb_.coefficients(en, e_grid_[j], ce);
          double s = 0.0;
          for (int k = 0; k < kTimeNodes; ++k) {
            double inner = 0.0;
            for (int l = 0; l < kExpNodes; ++l) inner += ce[l] * a[k * kExpNodes + l];
            s += ct[k] * inner;
          }
          out[j] += s;
        }
      }
    }
  }

 private:
  int build(std::size_t begin, std::size_t end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({begin, end, -1, -1, grid_[begin], grid_[end - 1]});
    if (!e_grid_.empty()) {
      const auto [mn, mx] =
          std::minmax_element(e_grid_.begin() + begin, e_grid_.begin() + end);
      nodes_[id].e_min = *mn;
      nodes_[id].e_max = *mx;
      nodes_[id].exp_nodes = *mn == *mx ? 1 : kExpNodes;
    }
    nodes_[id].offset = storage_;
    storage_ += static_cast<std::size_t>(kTimeNodes * nodes_[id].exp_nodes);
    if (end - begin > kLeafSize) {
      const std::size_t mid = begin + (end - begin) / 2;
      const int l = build(begin, mid);
      const int r = build(mid, end);
      nodes_[id].left = l;
      nodes_[id].right = r;
    }
    return id;
  }

  bool separated(const Node& node, double x) const {
    if (node.end - node.begin <= static_cast<std::size_t>(kTimeNodes)) return false;
    const double gap = node.lo - x;
    if (!(gap >= kSeparation * (node.hi - node.lo))) return false;
    if (node.exp_nodes > 1) {
      const double spread = 0.5 * (node.e_max - node.e_min) *
                            std::max(std::fabs(std::log(gap)),
                                     std::fabs(std::log(node.hi - x)));
      if (spread > kMaxExpSpread) return false;
    }
    return true;
  }

  void insert(int id, double x, double y, double e, std::size_t k,
              std::vector<double>& direct) {
    Node& node = nodes_[id];
    if (node.end <= k) return;
    const bool per_point = std::isnan(e);
    if (node.begin >= k && separated(node, x)) {
      node.used = true;
      double* a = acc_.data() + node.offset;
      time_cheb_.nodes(node.lo, node.hi, scratch_t_);
      if (!per_point) {
        for (int i = 0; i < kTimeNodes; ++i) a[i] += y * std::pow(scratch_t_[i] - x, e);
      } else if (node.exp_nodes == 1) {
        for (int i = 0; i < kTimeNodes; ++i) {
          a[i] += y * std::pow(scratch_t_[i] - x, node.e_min);
        }
      } else {
        exp_cheb_.nodes(node.e_min, node.e_max, scratch_e_);
        for (int i = 0; i < kTimeNodes; ++i) {
          const double ld = std::log(scratch_t_[i] - x);
          for (int l = 0; l < kExpNodes; ++l) {
            a[i * kExpNodes + l] += y * std::exp(scratch_e_[l] * ld);
          }
        }
      }
      return;
    }
    if (node.left < 0) {
      for (std::size_t j = std::max(node.begin, k); j < node.end; ++j) {
        direct[j] += y * std::pow(grid_[j] - x, per_point ? e_grid_[j] : e);
      }
      return;
    }
    const int l = node.left;
    const int r = node.right;
    insert(l, x, y, e, k, direct);
    insert(r, x, y, e, k, direct);
  }

  std::span<const double> grid_;
  std::span<const double> e_grid_;
  Chebyshev time_cheb_;
  Chebyshev exp_cheb_;
  std::vector<Node> nodes_;
  std::vector<double> acc_;
  std::size_t storage_ = 0;
  std::vector<double> scratch_t_, scratch_e_;
};

std::vector<double> per_atom_direct(std::span<const double> grid,
                                    std::span<const double> x,
                                    std::span<const double> y,
                                    std::span<const double> e) {
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t k = first_after(grid, x[i]);
    const double past = positive_power(-x[i], e[i]);
    for (std::size_t j = 0; j < k; ++j) {
      // t_j <= x_i: only the second positive part can be nonzero.
      out[j] += grid[j] == x[i] ? y[i] * kernel_value(grid[j], x[i], e[i])
                                : (grid[j] == 0.0 ? 0.0 : -y[i] * past);
    }
    for (std::size_t j = k; j < grid.size(); ++j) {
      out[j] += y[i] * kernel_value(grid[j], x[i], e[i]);
    }
  }
  zero_at_origin(grid, out);
  return out;
}

std::vector<double> per_point_direct(std::span<const double> grid,
                                     std::span<const double> x,
                                     std::span<const double> y,
                                     std::span<const double> e_grid) {
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      s += y[i] * kernel_value(grid[j], x[i], e_grid[j]);
    }
    out[j] = s;
  }
  zero_at_origin(grid, out);
  return out;
}

std::vector<double> per_atom_accelerated(std::span<const double> grid,
                                         std::span<const double> x,
                                         std::span<const double> y,
                                         std::span<const double> e) {
  std::vector<double> out(grid.size(), 0.0);
  FarFieldTree tree(grid, {});
  // Second positive parts are constant in t; sum them once.
  double past = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0) past += y[i] * std::pow(-x[i], e[i]);
    tree.insert_per_atom(x[i], y[i], e[i], first_after(grid, x[i]), out);
  }
  tree.evaluate(out);
  for (auto& v : out) v -= past;
  zero_at_origin(grid, out);
  return out;
}

std::vector<double> per_point_accelerated(std::span<const double> grid,
                                          std::span<const double> x,
                                          std::span<const double> y,
                                          std::span<const double> e_grid) {
  std::vector<double> out(grid.size(), 0.0);
  FarFieldTree tree(grid, e_grid);
  for (std::size_t i = 0; i < x.size(); ++i) {
    tree.insert_per_point(x[i], y[i], first_after(grid, x[i]), out);
  }
  tree.evaluate(out);

  // Second positive parts: q(e) = sum_{x_i < 0} y_i (-x_i)^e is a function of
  // the exponent only, interpolated on [e_min, e_max] of the whole grid.
  const auto [mn, mx] = std::minmax_element(e_grid.begin(), e_grid.end());
  const double e_min = *mn;
  const double e_max = *mx;
  const Chebyshev cheb(e_min == e_max ? 1 : kGlobalExpNodes);
  std::vector<double> en;
  cheb.nodes(e_min, e_max, en);
  std::vector<double> q(en.size(), 0.0);
  std::vector<double> direct(grid.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] < 0.0)) continue;
    const double l = std::log(-x[i]);
    if (0.5 * (e_max - e_min) * std::fabs(l) <= kMaxGlobalExpSpread) {
      for (std::size_t k = 0; k < en.size(); ++k) q[k] += y[i] * std::exp(en[k] * l);
    } else {
      for (std::size_t j = 0; j < grid.size(); ++j) {
        direct[j] += y[i] * std::exp(e_grid[j] * l);
      }
    }
  }
  std::vector<double> c;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    cheb.coefficients(en, e_grid[j], c);
    double s = direct[j];
    for (std::size_t k = 0; k < en.size(); ++k) s += c[k] * q[k];
    out[j] -= s;
  }
  zero_at_origin(grid, out);
  return out;
}

bool all_positive(std::span<const double> e) {
  return std::all_of(e.begin(), e.end(), [](double v) { return v > 0.0; });
}

}  // namespace

EvalMethod resolve_method(EvalMethod method, std::size_t atoms, std::size_t points) {
  if (method != EvalMethod::automatic) return method;
  if (points <= 2 * kLeafSize) return EvalMethod::direct;
  if (static_cast<double>(atoms) * static_cast<double>(points) <= kDirectWorkLimit) {
    return EvalMethod::direct;
  }
  return EvalMethod::accelerated;
}

std::vector<double> superpose_per_atom(std::span<const double> grid,
                                       std::span<const double> x,
                                       std::span<const double> y,
                                       std::span<const double> e, EvalMethod method) {
  validate_inputs(grid, x, y, e.size(), x.size());
  if (grid.empty()) return {};
  // The far-field expansion assumes 0^e = 0, i.e. positive exponents.
  if (resolve_method(method, x.size(), grid.size()) == EvalMethod::direct ||
      !all_positive(e)) {
    return per_atom_direct(grid, x, y, e);
  }
  return per_atom_accelerated(grid, x, y, e);
}

std::vector<double> superpose_per_point(std::span<const double> grid,
                                        std::span<const double> x,
                                        std::span<const double> y,
                                        std::span<const double> e_grid,
                                        EvalMethod method) {
  validate_inputs(grid, x, y, e_grid.size(), grid.size());
  if (grid.empty()) return {};
  if (resolve_method(method, x.size(), grid.size()) == EvalMethod::direct ||
      !all_positive(e_grid)) {
    return per_point_direct(grid, x, y, e_grid);
  }
  return per_point_accelerated(grid, x, y, e_grid);
}

}  // namespace imsm
