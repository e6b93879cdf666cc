#pragma once

#include <cstddef>
#include <vector>

namespace rankone {

/// Cumulative integral on a uniform grid, fourth order (cubic local fits).
/// Falls back to the trapezoid rule below four points.
std::vector<double> cumulative_uniform(const std::vector<double>& f, double h);

/// Cumulative integral over a grid made of uniform pieces delimited by
/// `breaks` (piece start indices, last entry = final index), anchored so the
/// result is zero at `anchor`.
std::vector<double> cumulative_piecewise(const std::vector<double>& s, const std::vector<double>& f,
                                         const std::vector<std::size_t>& breaks,
                                         std::size_t anchor);

/// Definite integral over the whole piecewise-uniform grid.
double integrate_piecewise(const std::vector<double>& s, const std::vector<double>& f,
                           const std::vector<std::size_t>& breaks);

}  // namespace rankone
