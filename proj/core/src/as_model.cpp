#include "rankone/as_model.hpp"

#include <cmath>
#include <stdexcept>

namespace rankone {

void ASParams::validate() const {
  if (!(beta > 0.0 && beta < alpha)) throw std::invalid_argument("need 0 < beta < alpha");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(lambda >= 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in [0, 1)");
  if (!(xi1 > 0.0)) throw std::invalid_argument("xi1 must be positive");
  if (!(B > 0.0)) throw std::invalid_argument("B must be positive");
  if (!(A_amp >= 0.0 && A_amp < 1.0)) throw std::invalid_argument("A must lie in [0, 1)");
  if (!(mu >= 0.0)) throw std::invalid_argument("mu must be non-negative");
  if (!std::isfinite(omega)) throw std::invalid_argument("omega must be finite");
}

std::pair<double, double> map_N(double y_hat, double theta_hat, const ASParams& p) {
  if (!(y_hat > 0.0)) throw std::domain_error("y_hat must be positive: orbit never returns");
  if (y_hat > p.epsilon * (1.0 + 1e-12)) throw std::domain_error("y_hat exceeds epsilon");
  const double r = p.ratio();
  const double x1 = std::pow(p.epsilon, 1.0 - r) * std::pow(y_hat, r);
  const double th = theta_hat + p.frequency_ratio() * std::log(p.epsilon / y_hat);
  return {x1, wrap_angle(th)};
}

std::pair<double, double> map_M(double x0, double theta0, const ASParams& p) {
  if (!(x0 >= 0.0)) throw std::domain_error("x0 must be non-negative");
  const double y = p.lambda * x0 + p.mu * p.B * (1.0 + p.A_amp * std::sin(theta0));
  return {y, wrap_angle(theta0 + p.xi1 + p.mu * p.xi2)};
}

namespace {

double bracket(const ASState& s, const ASParams& p) {
  return p.lambda * s.X + p.B * (1.0 + p.A_amp * std::sin(s.theta));
}

}  // namespace

ASState map_F_lifted(const ASState& s, const ASParams& p) {
  if (!(p.mu > 0.0)) throw std::domain_error("map_F needs mu > 0");
  const double w = bracket(s, p);
  if (!(w > 0.0)) throw std::domain_error("bracket lambda X + B(1 + A sin theta) must be positive");
  const double r = p.ratio();
  const double k = std::pow(p.epsilon, 1.0 - r) * std::pow(p.mu, r - 1.0);
  return {k * std::pow(w, r), s.theta + p.xi1 + p.mu * p.xi2 +
                                  p.frequency_ratio() * std::log(p.epsilon / (p.mu * w))};
}

ASState map_F(const ASState& s, const ASParams& p) {
  ASState out = map_F_lifted(s, p);
  out.theta = wrap_angle(out.theta);
  return out;
}

Mat2 jacobian_F(const ASState& s, const ASParams& p) {
  const double w = bracket(s, p);
  if (!(w > 0.0)) throw std::domain_error("bracket must be positive");
  const double r = p.ratio();
  const double k = std::pow(p.epsilon, 1.0 - r) * std::pow(p.mu, r - 1.0);
  const double kw = k * r * std::pow(w, r - 1.0);
  const double wt = p.B * p.A_amp * std::cos(s.theta);
  const double q = p.frequency_ratio();
  return {kw * p.lambda, kw * wt, -q * p.lambda / w, 1.0 - q * wt / w};
}

double log_det_F(const ASState& s, const ASParams& p) {
  const double w = bracket(s, p);
  const double r = p.ratio();
  return std::log(p.lambda * r) + (1.0 - r) * std::log(p.epsilon) + (r - 1.0) * std::log(p.mu) +
         (r - 1.0) * std::log(w);
}

int family_offset(const ASParams& p) {
  return static_cast<int>(std::floor(p.frequency_ratio() * std::log(1.0 / p.mu0))) + 1;
}

double gamma_of(double mu, const ASParams& p) { return p.frequency_ratio() * std::log(1.0 / mu); }

FamilyIndex reparametrize(const ASParams& p, int n, double a) {
  FamilyIndex idx;
  idx.n = n;
  idx.a = a;
  idx.N = family_offset(p);
  const double inv = 1.0 / p.frequency_ratio();
  idx.b_n = std::exp(-inv * (idx.N + kTwoPi * (n - 1)));
  idx.mu_na = idx.b_n * std::exp(-inv * a);
  return idx;
}

double singular_theta(const ASParams& p, double a, double X, double theta) {
  const double q = p.frequency_ratio();
  return theta + p.xi1 + q * std::log(p.epsilon) + a -
         q * std::log(p.lambda * X + p.B * (1.0 + p.A_amp * std::sin(theta)));
}

double family_mu(const ASParams& p, double a, double b) {
  const double shift = std::fmod(static_cast<double>(family_offset(p)), kTwoPi);
  return b * std::exp(-(a - shift) / p.frequency_ratio());
}

ASState family_map_lifted(const ASParams& p, double a, double b, const ASState& s) {
  return map_F_lifted(s, p.with_mu(family_mu(p, a, b)));
}

CircleMap circle_map(const ASParams& p, double a) {
  const double q = p.frequency_ratio();
  const double A = p.A_amp;
  const double shift = p.xi1 + q * std::log(p.epsilon) + a - q * std::log(p.B);
  CircleMap m;
  m.f = [=](double t) { return t + shift - q * std::log(1.0 + A * std::sin(t)); };
  m.df = [=](double t) { return 1.0 - q * A * std::cos(t) / (1.0 + A * std::sin(t)); };
  m.d2f = [=](double t) {
    const double d = 1.0 + A * std::sin(t);
    return q * (A * std::sin(t) + A * A) / (d * d);
  };
  m.d3f = [=](double t) {
    const double d = 1.0 + A * std::sin(t);
    return q * A * std::cos(t) * (1.0 - A * std::sin(t) - 2.0 * A * A) / (d * d * d);
  };
  m.name = "as-circle";
  m.metadata = {{"a", a}, {"omega_over_beta", q}, {"A", A}};
  return m;
}

}  // namespace rankone
