#include "rankone/melnikov.hpp"

#include <cmath>
#include <stdexcept>

#include "rankone/quadrature.hpp"

namespace rankone {

MelnikovSamples melnikov_samples(const HomoclinicOrbit& orbit, const VectorFieldSpec& field) {
  if (orbit.breaks.size() != 5 || orbit.tangent.size() != orbit.size() ||
      orbit.E.size() != orbit.size())
    throw std::invalid_argument("orbit lacks frames, E, or the truncation grid");
  MelnikovSamples out;
  out.s = orbit.s;
  out.E = orbit.E;
  out.breaks = orbit.breaks;
  out.L_minus = orbit.L_minus;
  out.L_plus = orbit.L_plus;
  out.epsilon = orbit.epsilon;
  out.weight.resize(orbit.size());
  out.profile.resize(orbit.size());
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    out.weight[i] = orbit.tangent[i].x + orbit.tangent[i].y;
    out.profile[i] = field.h ? field.h(orbit.ell[i]) : 0.0;
  }
  return out;
}

namespace {

double fitted_rate(const std::vector<double>& s, const std::vector<double>& f, std::size_t end,
                   std::size_t other) {
  const double a = std::abs(f[end]), b = std::abs(f[other]);
  if (!(a > 0.0 && b > 0.0)) return 0.0;
  return (std::log(b) - std::log(a)) / std::abs(s[end] - s[other]);
}

}  // namespace

MelnikovData compute_ACS(const MelnikovSamples& in, double omega, const MelnikovOptions& opts) {
  const std::size_t n = in.s.size();
  if (in.breaks.size() != 5 || n < 16) throw std::invalid_argument("need a five-break sample grid");
  const std::size_t i_minus = in.breaks[1], i_zero = in.breaks[2], i_plus = in.breaks[3];

  const auto intE = cumulative_piecewise(in.s, in.E, in.breaks, i_zero);
  std::vector<double> w(n), fa(n), fc(n), fs(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = in.weight[i] * std::exp(-intE[i]);
    fa[i] = w[i] * in.profile[i];
    fc[i] = w[i] * std::cos(omega * in.s[i]);
    fs[i] = w[i] * std::sin(omega * in.s[i]);
  }
  const auto cA = cumulative_piecewise(in.s, fa, in.breaks, 0);
  const auto cC = cumulative_piecewise(in.s, fc, in.breaks, 0);
  const auto cS = cumulative_piecewise(in.s, fs, in.breaks, 0);

  MelnikovData d;
  d.omega = omega;
  d.L_minus = in.L_minus;
  d.L_plus = in.L_plus;
  d.epsilon = in.epsilon;
  d.A_L = cA[i_plus] - cA[i_minus];
  d.C_L = cC[i_plus] - cC[i_minus];
  d.S_L = cS[i_plus] - cS[i_minus];
  d.E_integral_plus = intE[i_plus];
  d.E_integral_total = intE[i_plus] - intE[i_minus];

  // Exponential tails beyond the sampled range.
  const std::size_t last = n - 1;
  const std::size_t k_right = std::min(opts.fit_points, (last - i_plus) / 2);
  const std::size_t k_left = std::min(opts.fit_points, i_minus / 2);
  if (k_right < 2 || k_left < 2)
    throw NumericFailure(FailureKind::InsufficientTail, "too few tail samples to fit decay rates");
  const double rA_r = fitted_rate(in.s, fa, last, last - k_right);
  const double rA_l = fitted_rate(in.s, fa, 0, k_left);
  const double rw_r = fitted_rate(in.s, w, last, last - k_right);
  const double rw_l = fitted_rate(in.s, w, 0, k_left);
  d.rate_forward = rw_r;
  d.rate_backward = rw_l;
  if (!(rw_r > 0.0 && rw_l > 0.0))
    throw NumericFailure(FailureKind::InsufficientTail, "tails do not decay", {rw_l, rw_r});
  const double tailA = (rA_r > 0.0 ? fa[last] / rA_r : 0.0) + (rA_l > 0.0 ? fa[0] / rA_l : 0.0);

  const double sR = in.s[last], sL = in.s[0];
  const double om2r = rw_r * rw_r + omega * omega, om2l = rw_l * rw_l + omega * omega;
  const double cr = std::cos(omega * sR), sr = std::sin(omega * sR);
  const double cl = std::cos(omega * sL), sl = std::sin(omega * sL);
  const double tailC = w[last] * (rw_r * cr - omega * sr) / om2r + w[0] * (rw_l * cl + omega * sl) / om2l;
  const double tailS = w[last] * (rw_r * sr + omega * cr) / om2r + w[0] * (rw_l * sl - omega * cl) / om2l;

  d.A = cA[last] + tailA;
  d.C = cC[last] + tailC;
  d.S = cS[last] + tailS;
  d.tail_estimate = std::abs(d.A - d.A_L);
  const double r_full = std::hypot(d.C, d.S);
  d.cs_window_ratio = r_full > 0.0 ? std::hypot(d.C_L, d.S_L) / r_full : 1.0;
  d.cs_window_ok = std::abs(d.cs_window_ratio - 1.0) <= opts.cs_window_tol;
  if (d.tail_estimate > opts.window_tol * std::abs(d.A_L))
    throw NumericFailure(FailureKind::WindowTooShort,
                         "truncation tail exceeds tolerance: enlarge the window",
                         {d.A, d.A_L, d.tail_estimate});
  if (d.A != 0.0 && r_full > 0.0) {
    const auto [lo, hi] = rho_interval(d, 0.0);
    d.rho1 = lo;
    d.rho2 = hi;
  }
  return d;
}

MelnikovData compute_ACS(const HomoclinicOrbit& orbit, const VectorFieldSpec& field, double omega,
                         const MelnikovOptions& opts) {
  return compute_ACS(melnikov_samples(orbit, field), omega, opts);
}

std::pair<double, double> rho_interval(const MelnikovData& data, double tol) {
  if (!(std::abs(data.A) > tol))
    throw NumericFailure(FailureKind::H2Violation, "A vanishes: nondegeneracy (a) fails", {data.A});
  const double r = std::hypot(data.C, data.S);
  const double r1 = -(202.0 / 99.0) * r / data.A;
  const double r2 = -(396.0 / 101.0) * r / data.A;
  return {std::min(r1, r2), std::max(r1, r2)};
}

WaveCoefficients wave_coefficients(const MelnikovData& d, double rho) {
  if (d.A_L == 0.0 || rho == 0.0)
    throw std::invalid_argument("wave coefficients need nonzero A_L and rho");
  WaveCoefficients w;
  w.rho = rho;
  const double den = d.A_L * rho;
  const double c = std::cos(d.omega * d.L_minus), s = std::sin(d.omega * d.L_minus);
  w.c1 = (d.C_L * c - d.S_L * s) / den;
  w.c2 = (d.S_L * c + d.C_L * s) / den;
  w.amplitude = std::hypot(w.c1, w.c2);
  w.band_ok = w.amplitude > 0.25 && w.amplitude < 0.5;
  w.rho_in_interval = rho >= d.rho1 && rho <= d.rho2;
  const double scale = -rho * d.A_L;
  if (!(scale > 0.0))
    throw NumericFailure(FailureKind::SignError, "-rho A_L must be positive", {rho, d.A_L});
  w.K1 = scale * std::exp(d.E_integral_plus);
  w.P_L = std::exp(d.E_integral_total);
  return w;
}

H2Report check_H2(const MelnikovData& d, double tol) {
  H2Report r;
  r.nonzero_A = std::abs(d.A) > tol;
  r.nonzero_CS = d.C * d.C + d.S * d.S > tol * tol;
  r.pass = r.nonzero_A && r.nonzero_CS;
  return r;
}

}  // namespace rankone
