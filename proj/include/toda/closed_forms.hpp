#pragma once

// Entire radial solutions of -Δu = e^u (with an optional -4πb δ_0 source) and
// the linear changes of variables between the equivalent formulations.
//
// Normalization is -Δu = e^u throughout. The standalone form -Δu = 2e^u is
// recovered by u -> u + log 2. A regular bubble carries mass
// (1/2π)∫e^u = 4, a singular one 4(1+b).

#include <array>
#include <cmath>
#include <stdexcept>

namespace toda {

struct BubbleSpec {
  double mu = 1.0;  // scale
  double b = 0.0;   // singular weight at the origin, 0 for a regular bubble
};

struct VarsWEta {
  double w = 0.0;
  double eta = 0.0;
};

struct VarsThetaPhi {
  double theta = 0.0;
  double phi = 0.0;
};

namespace detail {

inline void check_bubble(const BubbleSpec& s) {
  if (!(s.mu > 0.0) || !std::isfinite(s.mu)) throw std::invalid_argument("bubble scale mu must be positive");
  if (!(s.b >= 0.0) || !std::isfinite(s.b)) throw std::invalid_argument("bubble weight b must be non-negative");
}

// log(1 + e^x) without overflow.
inline double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// log y with y = mu^2 r^{2(1+b)}.
inline double log_y(const BubbleSpec& s, double r) { return 2.0 * std::log(s.mu) + 2.0 * (1.0 + s.b) * std::log(r); }

// y / (1 + y) evaluated stably.
inline double y_over_1py(double logy) { return 1.0 / (1.0 + std::exp(-logy)); }

inline double bubble_value(const BubbleSpec& s, double r) {
  if (r == 0.0) return std::log(8.0 * s.mu * s.mu);  // b == 0 only
  return std::log(8.0) + 2.0 * std::log(s.mu) + 2.0 * std::log1p(s.b) + 2.0 * s.b * std::log(r) -
         2.0 * softplus(log_y(s, r));
}

}  // namespace detail

// u(r) = log(8 mu^2 / (1 + mu^2 r^2)^2).
inline double liouville_bubble(const BubbleSpec& s, double r) {
  detail::check_bubble(s);
  if (s.b != 0.0) throw std::invalid_argument("liouville_bubble requires b = 0; use singular_bubble");
  if (!(r >= 0.0)) throw std::invalid_argument("radius must be non-negative");
  return detail::bubble_value(s, r);
}

// w(r) = log(8 mu^2 (1+b)^2 r^{2b} / (1 + mu^2 r^{2(1+b)})^2), r > 0.
inline double singular_bubble(const BubbleSpec& s, double r) {
  detail::check_bubble(s);
  if (!(r > 0.0)) throw std::invalid_argument("singular_bubble requires r > 0");
  return detail::bubble_value(s, r);
}

// Exact first and second radial derivatives of the bubble family.
inline double bubble_derivative(const BubbleSpec& s, double r) {
  detail::check_bubble(s);
  if (r == 0.0) {
    if (s.b != 0.0) throw std::invalid_argument("singular bubble derivative undefined at r = 0");
    return 0.0;
  }
  // r u' = 2b - 4(1+b) y/(1+y)
  return (2.0 * s.b - 4.0 * (1.0 + s.b) * detail::y_over_1py(detail::log_y(s, r))) / r;
}

inline double bubble_second_derivative(const BubbleSpec& s, double r) {
  detail::check_bubble(s);
  if (r == 0.0) {
    if (s.b != 0.0) throw std::invalid_argument("singular bubble derivative undefined at r = 0");
    return -2.0 * s.mu * s.mu;
  }
  const double q = detail::y_over_1py(detail::log_y(s, r));  // y/(1+y)
  // u'' = -2b/r^2 - 4(1+b)/r^2 [ (1+2b) q - (2+2b) q^2 ]
  const double bracket = (1.0 + 2.0 * s.b) * q - (2.0 + 2.0 * s.b) * q * q;
  return (-2.0 * s.b - 4.0 * (1.0 + s.b) * bracket) / (r * r);
}

// u'' + u'/r + e^u using the exact derivatives; zero up to rounding.
inline double bubble_operator_residual(const BubbleSpec& s, double r) {
  const double u = s.b == 0.0 ? liouville_bubble(s, r) : singular_bubble(s, r);
  return bubble_second_derivative(s, r) + bubble_derivative(s, r) / r + std::exp(u);
}

// Cumulative mass (1/2π)∫_{B_r} e^u = 4(1+b) y/(1+y).
inline double bubble_mass(const BubbleSpec& s, double r) {
  detail::check_bubble(s);
  if (!(r >= 0.0)) throw std::invalid_argument("radius must be non-negative");
  if (r == 0.0) return 0.0;
  return 4.0 * (1.0 + s.b) * detail::y_over_1py(detail::log_y(s, r));
}

inline double bubble_total_mass(const BubbleSpec& s) {
  detail::check_bubble(s);
  return 4.0 * (1.0 + s.b);
}

// Limit of u(r) + (4 + 2b) log r as r -> infinity.
inline double bubble_far_field_constant(const BubbleSpec& s) {
  detail::check_bubble(s);
  return std::log(8.0 * (1.0 + s.b) * (1.0 + s.b) / (s.mu * s.mu));
}

// Additive constant c in w(r) = 2b log r + c + o(1) as r -> 0.
inline double bubble_origin_constant(const BubbleSpec& s) {
  detail::check_bubble(s);
  return std::log(8.0 * s.mu * s.mu * (1.0 + s.b) * (1.0 + s.b));
}

// ---------------------------------------------------------------------------
// Changes of variables

// (w, eta) -> (u1, u2, u3) = (-w+eta, -w-eta, w); u1 + u2 + 2 u3 = 0.
constexpr std::array<double, 3> from_w_eta(const VarsWEta& v) { return {-v.w + v.eta, -v.w - v.eta, v.w}; }

constexpr VarsWEta to_w_eta(const std::array<double, 3>& u) { return {u[2], 0.5 * (u[0] - u[1])}; }

// (theta, phi) -> (u1, u2, u3) = (-theta+3phi, -theta-3phi, 2theta); u1 + u2 + u3 = 0.
constexpr std::array<double, 3> from_theta_phi(const VarsThetaPhi& v) {
  return {-v.theta + 3.0 * v.phi, -v.theta - 3.0 * v.phi, 2.0 * v.theta};
}

constexpr VarsThetaPhi to_theta_phi(const std::array<double, 3>& u) { return {0.5 * u[2], (u[0] - u[1]) / 6.0}; }

}  // namespace toda
