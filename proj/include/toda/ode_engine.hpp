#pragma once

// Radial shooting for the systems in system.hpp.
//
// With t = log r and p_i = r u_i', the radial equation u'' + u'/r = -F(u)
// becomes the first-order system
//
//   du_i/dt = p_i,   dp_i/dt = -Σ_k A_ik e^{2t + L_k·u},   dm_k/dt = e^{2t + L_k·u},
//
// where m_k(r) = ∫_0^r e^{L_k·u(s)} s ds = (1/2π)∫_{B_r} e^{L_k·u} is the
// cumulative local mass. p_i + Σ_k A_ik m_k is a linear invariant of this
// system and explicit Runge-Kutta steps preserve it to rounding, which is
// what keeps the mean-value identity r u_i' = 2b_i - Σ_k A_ik σ_k tight.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "toda/closed_forms.hpp"
#include "toda/system.hpp"

namespace toda {

struct ShootSpec {
  SystemKind system;
  std::vector<double> init_heights;  // u_i(0), or c_i in u_i ≈ 2 b_i log r + c_i when singular
  double r_start = 1e-4;
  double r_max = 1e6;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int samples_per_decade = 50;
  double blowup_cap = 50.0;
  std::size_t max_steps = 5'000'000;

  void validate() const {
    const auto n = system.components();
    if (init_heights.size() != n)
      throw std::invalid_argument("expected " + std::to_string(n) + " initial heights, got " +
                                  std::to_string(init_heights.size()));
    for (double h : init_heights)
      if (!std::isfinite(h)) throw std::invalid_argument("initial heights must be finite");
    if (!(r_start > 0.0) || !std::isfinite(r_start)) throw std::invalid_argument("r_start must be positive");
    if (!(r_max > r_start) || !std::isfinite(r_max)) throw std::invalid_argument("r_max must exceed r_start");
    if (!(rel_tol > 0.0 && rel_tol <= 1e-2)) throw std::invalid_argument("rel_tol must lie in (0, 1e-2]");
    if (!(abs_tol > 0.0 && abs_tol <= 1e-2)) throw std::invalid_argument("abs_tol must lie in (0, 1e-2]");
    if (samples_per_decade < 1) throw std::invalid_argument("samples_per_decade must be positive");
    if (!(blowup_cap > 0.0)) throw std::invalid_argument("blowup_cap must be positive");
    if (max_steps == 0) throw std::invalid_argument("max_steps must be positive");
    for (std::size_t k = 0; k < system.channels(); ++k)
      if (!(system.channel_weight(k) > -1.0))
        throw std::invalid_argument("singular weights make channel " + std::to_string(k + 1) +
                                    " non-integrable at the origin");
  }
};

// Defaults: regular starts at 1e-4, singular starts at 1e-6. Tall initial
// data concentrate at r ~ e^{-h/2}; the start is pulled inside that scale by
// three decades so the series head stays accurate.
inline double default_r_start(const SystemKind& system, const std::vector<double>& heights) {
  double r0 = system.is_singular() ? 1e-6 : 1e-4;
  const auto& c = system.coeffs();
  if (heights.size() != c.components) return r0;
  for (std::size_t k = 0; k < c.channels; ++k) {
    double lc = 0.0;
    for (std::size_t j = 0; j < c.components; ++j) lc += c.l(k, j) * heights[j];
    const double e = 2.0 * system.channel_weight(k) + 2.0;
    if (std::isfinite(lc) && e > 0.0) r0 = std::min(r0, 1e-3 * std::exp(-lc / e));
  }
  return std::max(r0, 1e-300);
}

inline ShootSpec make_shoot_spec(SystemKind system, std::vector<double> heights) {
  ShootSpec s;
  s.r_start = default_r_start(system, heights);
  s.system = std::move(system);
  s.init_heights = std::move(heights);
  return s;
}

enum class Termination { ReachedRMax, Blowup, Underflow, NonFinite, StepLimit };

inline std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::ReachedRMax: return "reached_r_max";
    case Termination::Blowup: return "component_blowup";
    case Termination::Underflow: return "step_underflow";
    case Termination::NonFinite: return "non_finite_state";
    case Termination::StepLimit: return "step_limit";
  }
  return "?";
}

inline std::optional<Termination> parse_termination(std::string_view s) {
  for (auto t : {Termination::ReachedRMax, Termination::Blowup, Termination::Underflow, Termination::NonFinite,
                 Termination::StepLimit})
    if (termination_name(t) == s) return t;
  return std::nullopt;
}

struct RadialProfile {
  ShootSpec spec;
  double scale = 1.0;  // accumulated rescale factor ε; 1 for a raw shot
  std::vector<double> grid;                 // strictly increasing radii
  std::vector<std::vector<double>> values;  // [component][sample] u_i
  std::vector<std::vector<double>> derivs;  // [component][sample] du_i/dr
  std::vector<std::vector<double>> masses;  // [channel][sample] σ_k(r)
  Termination termination = Termination::ReachedRMax;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  const SystemKind& system() const { return spec.system; }
  std::size_t components() const { return values.size(); }
  std::size_t channels() const { return masses.size(); }
  std::size_t size() const { return grid.size(); }
  double r_front() const { return grid.front(); }
  double r_back() const { return grid.back(); }

  // L_k · u at sample j.
  double channel_exponent(std::size_t k, std::size_t j) const {
    const auto& c = system().coeffs();
    double s = 0.0;
    for (std::size_t i = 0; i < components(); ++i) s += c.l(k, i) * values[i][j];
    return s;
  }
  double channel_density(std::size_t k, std::size_t j) const { return std::exp(channel_exponent(k, j)); }
};

// ---------------------------------------------------------------------------
// Grids

// Log-uniform radii r_start * 10^{j/spd}, closed with r_max.
inline std::vector<double> make_log_grid(double r_start, double r_max, int samples_per_decade) {
  if (!(r_start > 0.0) || !(r_max > r_start) || samples_per_decade < 1)
    throw std::invalid_argument("invalid log grid");
  const double t0 = std::log(r_start);
  const double t1 = std::log(r_max);
  const double dt = std::log(10.0) / samples_per_decade;
  std::vector<double> ts;
  for (std::size_t j = 0;; ++j) {
    const double t = t0 + static_cast<double>(j) * dt;
    if (t >= t1 - 1e-9 * dt) break;
    ts.push_back(t);
  }
  ts.push_back(t1);
  std::vector<double> r(ts.size());
  for (std::size_t j = 0; j < ts.size(); ++j) r[j] = std::exp(ts[j]);
  r.front() = r_start;
  r.back() = r_max;
  return r;
}

// ---------------------------------------------------------------------------
// Shooting

namespace detail {

using OdeState = std::vector<double>;

struct RadialRhs {
  const SystemCoefficients* c;

  void operator()(const OdeState& x, OdeState& dxdt, double t) const {
    const auto n = c->components;
    const auto K = c->channels;
    for (std::size_t i = 0; i < n; ++i) {
      dxdt[i] = x[n + i];
      dxdt[n + i] = 0.0;
    }
    for (std::size_t k = 0; k < K; ++k) {
      double arg = 2.0 * t;
      for (std::size_t j = 0; j < n; ++j) arg += c->l(k, j) * x[j];
      const double w = std::exp(arg);
      dxdt[2 * n + k] = w;
      for (std::size_t i = 0; i < n; ++i) dxdt[n + i] -= c->a(i, k) * w;
    }
  }
};

// Series head at r0: u_i ≈ 2b_i log r + c_i - Σ_k A_ik e^{L_k·c} r^{2β_k+2}/(2β_k+2)^2.
inline OdeState initial_state(const ShootSpec& spec) {
  const auto& sys = spec.system;
  const auto& c = sys.coeffs();
  const auto n = c.components;
  const auto K = c.channels;
  const double t0 = std::log(spec.r_start);
  OdeState x(2 * n + K, 0.0);
  std::vector<double> head(K);
  for (std::size_t k = 0; k < K; ++k) {
    double lc = 0.0;
    for (std::size_t j = 0; j < n; ++j) lc += c.l(k, j) * spec.init_heights[j];
    const double e = 2.0 * sys.channel_weight(k) + 2.0;
    head[k] = std::exp(lc + e * t0) / e;  // ∫_0^{r0} e^{L_k·c} s^{2β_k+1} ds
    x[2 * n + k] = head[k];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double b = sys.singular_weights()[i];
    double u = 2.0 * b * t0 + spec.init_heights[i];
    double p = 2.0 * b;
    for (std::size_t k = 0; k < K; ++k) {
      const double e = 2.0 * sys.channel_weight(k) + 2.0;
      u -= c.a(i, k) * head[k] / e;
      p -= c.a(i, k) * head[k];
    }
    x[i] = u;
    x[n + i] = p;
  }
  return x;
}

inline void record_sample(RadialProfile& prof, const OdeState& x, double r) {
  const auto n = prof.components();
  prof.grid.push_back(r);
  for (std::size_t i = 0; i < n; ++i) {
    prof.values[i].push_back(x[i]);
    prof.derivs[i].push_back(x[n + i] / r);
  }
  for (std::size_t k = 0; k < prof.channels(); ++k) prof.masses[k].push_back(x[2 * n + k]);
}

inline bool all_finite(const OdeState& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace detail

inline RadialProfile shoot(const ShootSpec& spec) {
  namespace odeint = boost::numeric::odeint;
  spec.validate();

  const auto& c = spec.system.coeffs();
  const auto n = c.components;
  RadialProfile prof;
  prof.spec = spec;
  prof.values.assign(n, {});
  prof.derivs.assign(n, {});
  prof.masses.assign(c.channels, {});

  const auto radii = make_log_grid(spec.r_start, spec.r_max, spec.samples_per_decade);
  std::vector<double> times(radii.size());
  for (std::size_t j = 0; j < radii.size(); ++j) times[j] = std::log(radii[j]);

  detail::OdeState x = detail::initial_state(spec);
  detail::record_sample(prof, x, radii.front());
  if (!detail::all_finite(x)) {
    prof.termination = Termination::NonFinite;
    return prof;
  }

  const detail::RadialRhs rhs{&c};
  auto stepper = odeint::make_controlled(spec.abs_tol, spec.rel_tol, odeint::runge_kutta_dopri5<detail::OdeState>());

  double t = times.front();
  double dt = 1e-3;
  std::size_t steps = 0;
  for (std::size_t j = 1; j < times.size(); ++j) {
    const double target = times[j];
    while (t < target) {
      if (steps >= spec.max_steps) {
        prof.termination = Termination::StepLimit;
        return prof;
      }
      const double remaining = target - t;
      const bool lands = dt >= remaining;
      double h = lands ? remaining : dt;
      double t_try = t;
      const auto result = stepper.try_step(rhs, x, t_try, h);
      ++steps;
      if (result == odeint::success) {
        ++prof.accepted_steps;
        t = lands ? target : t_try;
        // A step clipped to land on a sample does not shrink the working step.
        dt = lands ? std::max(dt, h) : h;
        if (!detail::all_finite(x)) {
          prof.termination = Termination::NonFinite;
          return prof;
        }
        const bool blown = std::any_of(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n),
                                       [&](double u) { return u > spec.blowup_cap; });
        if (blown) {
          if (t > std::log(prof.grid.back())) detail::record_sample(prof, x, std::exp(t));
          prof.termination = Termination::Blowup;
          return prof;
        }
      } else {
        ++prof.rejected_steps;
        dt = h;
        if (!(dt > 1e-13 * std::max(1.0, std::abs(t)))) {
          prof.termination = Termination::Underflow;
          return prof;
        }
      }
    }
    detail::record_sample(prof, x, radii[j]);
  }
  prof.termination = Termination::ReachedRMax;
  return prof;
}

// ---------------------------------------------------------------------------
// Interpolation

namespace detail {

// Index j with grid[j] <= r <= grid[j+1]; throws when r is outside the grid.
inline std::size_t locate(const std::vector<double>& grid, double r) {
  if (grid.empty()) throw std::out_of_range("empty profile");
  if (!(r >= grid.front() && r <= grid.back()))
    throw std::out_of_range("radius " + std::to_string(r) + " outside profile range [" +
                            std::to_string(grid.front()) + ", " + std::to_string(grid.back()) + "]");
  if (grid.size() == 1) return 0;
  auto it = std::upper_bound(grid.begin(), grid.end(), r);
  std::size_t j = it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
  return std::min(j, grid.size() - 2);
}

// Cubic Hermite on [x0, x1] with end values/slopes.
inline double hermite(double x0, double x1, double y0, double y1, double d0, double d1, double x) {
  const double h = x1 - x0;
  const double s = (x - x0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1;
}

// Fritsch-Carlson limiting of the node slopes so the cubic stays monotone.
inline void limit_monotone(double h, double y0, double y1, double& d0, double& d1) {
  const double secant = (y1 - y0) / h;
  if (secant == 0.0) {
    d0 = d1 = 0.0;
    return;
  }
  const double a = d0 / secant;
  const double b = d1 / secant;
  if (a < 0.0) d0 = 0.0;
  if (b < 0.0) d1 = 0.0;
  const double q = a * a + b * b;
  if (q > 9.0) {
    const double tau = 3.0 / std::sqrt(q);
    d0 = tau * a * secant;
    d1 = tau * b * secant;
  }
}

}  // namespace detail

// u_i(r) for every component, cubic Hermite in log r.
inline std::vector<double> value_at(const RadialProfile& p, double r) {
  const auto j = detail::locate(p.grid, r);
  std::vector<double> out(p.components());
  if (r == p.grid[j] || p.size() == 1) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = p.values[i][j];
    return out;
  }
  if (r == p.grid[j + 1]) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = p.values[i][j + 1];
    return out;
  }
  const double t0 = std::log(p.grid[j]), t1 = std::log(p.grid[j + 1]), t = std::log(r);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = detail::hermite(t0, t1, p.values[i][j], p.values[i][j + 1], p.grid[j] * p.derivs[i][j],
                             p.grid[j + 1] * p.derivs[i][j + 1], t);
  return out;
}

// r u_i'(r), cubic Hermite in log r with node slopes -r^2 Σ_k A_ik e^{L_k·u}.
inline std::vector<double> flux_at(const RadialProfile& p, double r) {
  const auto j = detail::locate(p.grid, r);
  std::vector<double> out(p.components());
  const bool at_node = r == p.grid[j] || p.size() == 1;
  const bool at_next = !at_node && r == p.grid[j + 1];
  const auto& c = p.system().coeffs();
  auto slope = [&](std::size_t i, std::size_t jj) {
    double s = 0.0;
    for (std::size_t k = 0; k < p.channels(); ++k) s -= c.a(i, k) * p.channel_density(k, jj);
    return s * p.grid[jj] * p.grid[jj];
  };
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (at_node) {
      out[i] = p.grid[j] * p.derivs[i][j];
    } else if (at_next) {
      out[i] = p.grid[j + 1] * p.derivs[i][j + 1];
    } else {
      out[i] = detail::hermite(std::log(p.grid[j]), std::log(p.grid[j + 1]), p.grid[j] * p.derivs[i][j],
                               p.grid[j + 1] * p.derivs[i][j + 1], slope(i, j), slope(i, j + 1), std::log(r));
    }
  }
  return out;
}

// σ_k(r) = ∫_0^r e^{L_k·u(s)} s ds for every channel, by monotone cubic
// Hermite interpolation of the stored cumulative integral in log r, with node
// slopes dσ/dt = r^2 e^{L_k·u}.
inline std::vector<double> cumulative_mass(const RadialProfile& p, double r) {
  const auto j = detail::locate(p.grid, r);
  std::vector<double> out(p.channels());
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (r == p.grid[j] || p.size() == 1) {
      out[k] = p.masses[k][j];
      continue;
    }
    if (r == p.grid[j + 1]) {
      out[k] = p.masses[k][j + 1];
      continue;
    }
    const double t0 = std::log(p.grid[j]), t1 = std::log(p.grid[j + 1]);
    const double y0 = p.masses[k][j], y1 = p.masses[k][j + 1];
    double d0 = p.grid[j] * p.grid[j] * p.channel_density(k, j);
    double d1 = p.grid[j + 1] * p.grid[j + 1] * p.channel_density(k, j + 1);
    detail::limit_monotone(t1 - t0, y0, y1, d0, d1);
    out[k] = std::clamp(detail::hermite(t0, t1, y0, y1, d0, d1, std::log(r)), std::min(y0, y1), std::max(y0, y1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rescaling

// v_i(r) = u_i(εr) + 2 log ε on the grid r_j / ε. Channel masses obey
// σ_k(r; v) = ε^{2(Σ_j L_kj) - 2} σ_k(εr; u), which is σ_k(εr; u) whenever
// the channel is a plain e^{u_i}.
inline RadialProfile rescale(const RadialProfile& p, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("rescale factor must be positive");
  RadialProfile out = p;
  out.scale = p.scale * eps;
  const double shift = 2.0 * std::log(eps);
  for (auto& r : out.grid) r /= eps;
  for (auto& comp : out.values)
    for (auto& u : comp) u += shift;
  for (auto& comp : out.derivs)
    for (auto& d : comp) d *= eps;
  const auto& c = p.system().coeffs();
  for (std::size_t k = 0; k < out.channels(); ++k) {
    const double power = 2.0 * c.exponent_sum(k) - 2.0;
    if (power == 0.0) continue;
    const double factor = std::pow(eps, power);
    for (auto& m : out.masses[k]) m *= factor;
  }
  return out;
}

// Closed-form bubble sampled on a log grid, as a LiouvilleScalar profile with
// exact values, derivatives and masses.
inline RadialProfile bubble_profile(const BubbleSpec& b, double r_start, double r_max, int samples_per_decade) {
  if (!(r_start > 0.0)) throw std::invalid_argument("bubble_profile needs r_start > 0");
  RadialProfile p;
  p.spec = make_shoot_spec(SystemKind(SystemVariant::LiouvilleScalar, {b.b}), {bubble_origin_constant(b)});
  p.spec.r_start = r_start;
  p.spec.r_max = r_max;
  p.spec.samples_per_decade = samples_per_decade;
  p.grid = make_log_grid(r_start, r_max, samples_per_decade);
  p.values.assign(1, {});
  p.derivs.assign(1, {});
  p.masses.assign(1, {});
  for (double r : p.grid) {
    p.values[0].push_back(singular_bubble(b, r));
    p.derivs[0].push_back(bubble_derivative(b, r));
    p.masses[0].push_back(bubble_mass(b, r));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Total mass with tail extrapolation

struct MassTotals {
  std::vector<double> at_end;     // σ_k(r_end)
  std::vector<double> tail;       // analytic ∫_{r_end}^∞ estimate
  std::vector<double> total;      // at_end + tail
  std::vector<double> slope;      // α in L_k·u ≈ -α log r + β over the last decade
  std::vector<bool> converged;

  bool all_converged() const { return std::all_of(converged.begin(), converged.end(), [](bool b) { return b; }); }
};

// Fits the channel exponent on the last decade. For α > 2.1 the tail
// ∫_R^∞ e^{β} s^{1-α} ds = R^2 e^{L·u(R)}/(α-2) is added; the channel counts as
// converged when that tail is at most tol * max(σ, 1).
inline MassTotals total_masses(const RadialProfile& p, double tol = 1e-6) {
  MassTotals out;
  const auto K = p.channels();
  out.at_end.resize(K);
  out.tail.assign(K, 0.0);
  out.total.resize(K);
  out.slope.assign(K, std::numeric_limits<double>::quiet_NaN());
  out.converged.assign(K, false);
  if (p.size() == 0) return out;
  const double R = p.r_back();
  const std::size_t last = p.size() - 1;
  std::size_t first = last;
  while (first > 0 && p.grid[first - 1] >= R / 10.0) --first;

  for (std::size_t k = 0; k < K; ++k) {
    out.at_end[k] = p.masses[k][last];
    out.total[k] = out.at_end[k];
    const std::size_t npts = last - first + 1;
    if (npts < 3) continue;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t j = first; j <= last; ++j) {
      const double xj = std::log(p.grid[j]);
      const double yj = p.channel_exponent(k, j);
      sx += xj;
      sy += yj;
      sxx += xj * xj;
      sxy += xj * yj;
    }
    const double m = static_cast<double>(npts);
    const double denom = m * sxx - sx * sx;
    if (denom <= 0.0) continue;
    const double alpha = -(m * sxy - sx * sy) / denom;
    out.slope[k] = alpha;
    if (!(alpha > 2.1)) continue;
    const double tail = R * R * p.channel_density(k, last) / (alpha - 2.0);
    out.tail[k] = tail;
    out.total[k] = out.at_end[k] + tail;
    out.converged[k] = tail <= tol * std::max(out.total[k], 1.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mass targeting

enum class ShotClass { Over, Under };

inline std::string_view shot_class_name(ShotClass c) { return c == ShotClass::Over ? "OVER" : "UNDER"; }

struct ShotRecord {
  double free_height = 0.0;
  ShotClass cls = ShotClass::Over;
  std::string reason;
  std::vector<double> masses;
};

struct TargetOptions {
  double r_max = 1e6;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int samples_per_decade = 40;
  double detect_threshold = 10.0;  // N in u + 2 log r < -N
  std::size_t max_iterations = 200;
};

struct TargetResult {
  std::vector<double> init_heights;
  RadialProfile profile;
  MassTotals totals;
  std::size_t iterations = 0;
  bool degenerate = false;  // the whole bracket decays; no sign change to bisect
  std::vector<ShotRecord> trace;
};

class BracketError : public std::runtime_error {
 public:
  BracketError(const std::string& what, std::vector<ShotRecord> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<ShotRecord>& trace() const { return trace_; }

 private:
  std::vector<ShotRecord> trace_;
};

// UNDER: the shot reached r_max, every channel satisfies the fast-decay test
// L_k·u + 2 log r < -N at the end, and every tail-extrapolated mass has
// converged to tol. Anything else (blow-up, still rising, slow tail) is OVER.
inline std::pair<ShotClass, std::string> classify_shot(const RadialProfile& p, double tol, double threshold,
                                                       MassTotals* totals_out = nullptr) {
  auto totals = total_masses(p, tol);
  if (totals_out) *totals_out = totals;
  if (p.termination != Termination::ReachedRMax)
    return {ShotClass::Over, std::string(termination_name(p.termination))};
  const std::size_t last = p.size() - 1;
  const double two_log_r = 2.0 * std::log(p.r_back());
  for (std::size_t k = 0; k < p.channels(); ++k)
    if (!(p.channel_exponent(k, last) + two_log_r < -threshold))
      return {ShotClass::Over, "channel " + std::to_string(k + 1) + " not fast-decaying at r_max"};
  for (std::size_t k = 0; k < p.channels(); ++k)
    if (!totals.converged[k]) return {ShotClass::Over, "channel " + std::to_string(k + 1) + " mass not converged"};
  return {ShotClass::Under, "decaying"};
}

// Bisection over the free initial height of a two-component system with the
// anchor component held fixed. One-component systems have no free height and
// return the anchor shot directly.
inline TargetResult find_decaying(const SystemKind& system, std::size_t anchor_component, double anchor_height,
                                  std::pair<double, double> interval, double tol,
                                  const TargetOptions& opt = {}) {
  const auto n = system.components();
  if (n > 2) throw std::invalid_argument("mass targeting supports one- and two-component systems");
  if (anchor_component >= n) throw std::invalid_argument("anchor component out of range");
  if (!(tol > 0.0)) throw std::invalid_argument("targeting tolerance must be positive");
  if (!std::isfinite(anchor_height)) throw std::invalid_argument("anchor height must be finite");
  auto [lo, hi] = interval;
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
    throw BracketError("search interval [" + std::to_string(lo) + ", " + std::to_string(hi) + "] is empty", {});

  TargetResult res;
  auto run = [&](double free_height) {
    std::vector<double> h(n, anchor_height);
    if (n == 2) h[1 - anchor_component] = free_height;
    auto spec = make_shoot_spec(system, h);
    spec.r_max = opt.r_max;
    spec.rel_tol = opt.rel_tol;
    spec.abs_tol = opt.abs_tol;
    spec.samples_per_decade = opt.samples_per_decade;
    auto prof = shoot(spec);
    MassTotals totals;
    auto [cls, why] = classify_shot(prof, tol, opt.detect_threshold, &totals);
    res.trace.push_back({free_height, cls, why, totals.total});
    ++res.iterations;
    return std::make_tuple(cls, std::move(prof), std::move(totals), std::move(h));
  };
  auto accept = [&](auto&& shot) {
    res.profile = std::move(std::get<1>(shot));
    res.totals = std::move(std::get<2>(shot));
    res.init_heights = std::move(std::get<3>(shot));
    return res;
  };

  if (n == 1) {
    auto shot = run(anchor_height);
    if (std::get<0>(shot) != ShotClass::Under)
      throw BracketError("anchor shot does not decay: " + res.trace.back().reason, res.trace);
    res.degenerate = true;
    return accept(std::move(shot));
  }

  auto s_lo = run(lo);
  auto s_hi = run(hi);
  const auto c_lo = std::get<0>(s_lo);
  const auto c_hi = std::get<0>(s_hi);
  if (c_lo == ShotClass::Over && c_hi == ShotClass::Over)
    throw BracketError("interval does not bracket a decaying solution (both ends OVER)", res.trace);

  if (c_lo == ShotClass::Under && c_hi == ShotClass::Under) {
    auto mid = run(0.5 * (lo + hi));
    if (std::get<0>(mid) == ShotClass::Under) {
      res.degenerate = true;
      return accept(std::move(mid));
    }
    // The midpoint is OVER: bisect towards the lower half.
    hi = 0.5 * (lo + hi);
    s_hi = std::move(mid);
  }

  // Invariant: exactly one end is UNDER.
  bool under_is_lo = std::get<0>(s_lo) == ShotClass::Under;
  while (hi - lo > tol * std::max(1.0, std::abs(0.5 * (lo + hi)))) {
    if (res.iterations >= opt.max_iterations)
      throw std::runtime_error("mass targeting exceeded " + std::to_string(opt.max_iterations) + " iterations");
    const double mid_h = 0.5 * (lo + hi);
    auto mid = run(mid_h);
    const bool mid_under = std::get<0>(mid) == ShotClass::Under;
    if (mid_under == under_is_lo) {
      lo = mid_h;
      s_lo = std::move(mid);
    } else {
      hi = mid_h;
      s_hi = std::move(mid);
    }
  }
  return accept(under_is_lo ? std::move(s_lo) : std::move(s_hi));
}

}  // namespace toda
