#pragma once

#include <span>
#include <vector>

namespace imsm {

/// How a superposition of kernel atoms is summed on a grid.
///   direct       literal sum over every (atom, grid point) pair, O(m n)
///   accelerated  hierarchical far-field interpolation, O((m + n) log n)
///   automatic    direct for small problems, accelerated otherwise
enum class EvalMethod { automatic, direct, accelerated };

/// S(t_j) = sum_i y_i [(t_j - x_i)_+^{e_i} - (-x_i)_+^{e_i}] with one exponent
/// per atom. grid must be strictly increasing. S is exactly 0 where t_j = 0.
std::vector<double> superpose_per_atom(std::span<const double> grid,
                                       std::span<const double> x,
                                       std::span<const double> y,
                                       std::span<const double> e,
                                       EvalMethod method = EvalMethod::automatic);

/// S(t_j) = sum_i y_i [(t_j - x_i)_+^{e_j} - (-x_i)_+^{e_j}] with one exponent
/// per grid point.
std::vector<double> superpose_per_point(std::span<const double> grid,
                                        std::span<const double> x,
                                        std::span<const double> y,
                                        std::span<const double> e_grid,
                                        EvalMethod method = EvalMethod::automatic);

/// The choice `automatic` resolves to for a problem of this size.
EvalMethod resolve_method(EvalMethod method, std::size_t atoms, std::size_t points);

}  // namespace imsm
