#include "rankone/quadrature.hpp"

#include <stdexcept>

namespace rankone {

std::vector<double> cumulative_uniform(const std::vector<double>& f, double h) {
  const std::size_t m = f.size();
  std::vector<double> out(m, 0.0);
  if (m < 2) return out;
  if (m < 4) {
    for (std::size_t i = 1; i < m; ++i) out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    return out;
  }
  const double c = h / 24.0;
  const std::size_t n = m - 1;
  out[1] = c * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
  for (std::size_t i = 1; i + 2 <= n; ++i)
    out[i + 1] = out[i] + c * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
  out[n] = out[n - 1] + c * (f[n - 3] - 5.0 * f[n - 2] + 19.0 * f[n - 1] + 9.0 * f[n]);
  return out;
}

std::vector<double> cumulative_piecewise(const std::vector<double>& s, const std::vector<double>& f,
                                         const std::vector<std::size_t>& breaks,
                                         std::size_t anchor) {
  if (s.size() != f.size()) throw std::invalid_argument("grid and integrand sizes differ");
  if (breaks.size() < 2 || breaks.front() != 0 || breaks.back() + 1 != s.size())
    throw std::invalid_argument("piece breaks do not cover the grid");
  std::vector<double> out(s.size(), 0.0);
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const std::size_t i0 = breaks[p], i1 = breaks[p + 1];
    if (i1 <= i0) continue;
    std::vector<double> piece(f.begin() + static_cast<std::ptrdiff_t>(i0),
                              f.begin() + static_cast<std::ptrdiff_t>(i1) + 1);
    const double h = (s[i1] - s[i0]) / static_cast<double>(i1 - i0);
    const auto cum = cumulative_uniform(piece, h);
    const double base = out[i0];
    for (std::size_t k = 1; k < cum.size(); ++k) out[i0 + k] = base + cum[k];
  }
  const double shift = out.at(anchor);
  for (double& v : out) v -= shift;
  return out;
}

double integrate_piecewise(const std::vector<double>& s, const std::vector<double>& f,
                           const std::vector<std::size_t>& breaks) {
  const auto cum = cumulative_piecewise(s, f, breaks, 0);
  return cum.back();
}

}  // namespace rankone
