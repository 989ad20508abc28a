#pragma once

// Verifiers connecting radial profiles to the quantization statements:
// Pohozaev residuals on profiles, the fast/slow decay test, annulus scans and
// bubble-family local-mass extraction with nearest-spectrum matching.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "toda/ode_engine.hpp"
#include "toda/spectrum.hpp"

namespace toda {

using MeasuredTriple = std::array<double, 3>;

// ---------------------------------------------------------------------------
// Channel to triple maps

enum class TripleFamily { SU3, SU4 };

// How the mass channels of a variant sit inside (σ1, σ2, σ3):
//   Liouville  -> (σ, 0, 0)          SinhGordon -> (σ+, σ+, σ-)
//   LimitPair  -> (σu, 0, σv)        AffineSU3  -> (σ1, σ2, σ3)
//   AffineSU4  -> (σ1, σ2, σ3) in the SU(4) family
inline TripleFamily triple_family(SystemVariant v) {
  switch (v) {
    case SystemVariant::LiouvilleScalar:
    case SystemVariant::SinhGordon:
    case SystemVariant::AffineSU3:
    case SystemVariant::LimitPair: return TripleFamily::SU3;
    case SystemVariant::AffineSU4: return TripleFamily::SU4;
    case SystemVariant::TzitzeicaScalar: break;
  }
  throw std::invalid_argument(std::string(system_name(v)) + " has no mass-triple embedding");
}

inline MeasuredTriple embed_triple(SystemVariant v, const std::vector<double>& ch) {
  switch (v) {
    case SystemVariant::LiouvilleScalar: return {ch.at(0), 0.0, 0.0};
    case SystemVariant::SinhGordon: return {ch.at(0), ch.at(0), ch.at(1)};
    case SystemVariant::LimitPair: return {ch.at(0), 0.0, ch.at(1)};
    case SystemVariant::AffineSU3:
    case SystemVariant::AffineSU4: return {ch.at(0), ch.at(1), ch.at(2)};
    case SystemVariant::TzitzeicaScalar: break;
  }
  throw std::invalid_argument(std::string(system_name(v)) + " has no mass-triple embedding");
}

inline MeasuredTriple measured_triple(const RadialProfile& p, double r) {
  return embed_triple(p.system().variant(), cumulative_mass(p, r));
}

inline double su3_residual(const MeasuredTriple& s) {
  const double a = s[0] - s[2];
  const double b = s[1] - s[2];
  return a * a + b * b - 4.0 * (s[0] + s[1] + 2.0 * s[2]);
}

inline double su4_pair_sum(const MeasuredTriple& s) {
  const double a = s[0] - s[1], b = s[1] - s[2], c = s[2] - s[0];
  return a * a + b * b + c * c;
}

inline double su4_residual(const MeasuredTriple& s, Su4Form form = Su4Form::Printed) {
  return su4_pair_sum(s) - (form == Su4Form::Printed ? 12.0 : 8.0) * (s[0] + s[1] + s[2]);
}

namespace detail {

inline void require_regular(const RadialProfile& p, const char* what) {
  if (p.system().is_singular()) throw std::invalid_argument(std::string(what) + " requires a regular start");
}

inline std::vector<double> channel_densities_at(const RadialProfile& p, double r) {
  const auto u = value_at(p, r);
  const auto& c = p.system().coeffs();
  std::vector<double> rho(p.channels());
  for (std::size_t k = 0; k < rho.size(); ++k) {
    double e = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) e += c.l(k, j) * u[j];
    rho[k] = std::exp(e);
  }
  return rho;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pohozaev on profiles

struct PohozaevResidual {
  MeasuredTriple triple{};  // σ(r) embedded in the SU(3) triple
  double residual = 0.0;    // (σ1-σ3)^2 + (σ2-σ3)^2 - 4(σ1+σ2+2σ3)
  double flux_defect = 0.0; // 2 r^2 (e^{u1} + e^{u2} + 2 e^{u3}) at r
};

// Mass-form residual at radius r. For a regular radial solution the dilation
// balance gives residual + flux_defect = 0 exactly, so the residual vanishes
// precisely where the boundary densities do (fast decay).
inline PohozaevResidual pohozaev_profile_residual(const RadialProfile& p, double r) {
  detail::require_regular(p, "pohozaev_profile_residual");
  const auto v = p.system().variant();
  if (triple_family(v) != TripleFamily::SU3)
    throw std::invalid_argument("pohozaev_profile_residual needs an SU3-family profile; use su4_pohozaev_balance");
  PohozaevResidual out;
  out.triple = measured_triple(p, r);
  out.residual = su3_residual(out.triple);
  const auto rho = embed_triple(v, detail::channel_densities_at(p, r));
  out.flux_defect = 2.0 * r * r * (rho[0] + rho[1] + 2.0 * rho[2]);
  return out;
}

struct Su4PohozaevBalance {
  MeasuredTriple triple{};
  double pair_sum = 0.0;        // (σ1-σ2)^2 + (σ2-σ3)^2 + (σ3-σ1)^2
  double mass_sum = 0.0;        // σ1 + σ2 + σ3
  double flux_energy = 0.0;     // ½ Σ (r u_i')^2
  double boundary_density = 0.0;// (3/2) r^2 Σ e^{u_i}
  // ½|r u'|^2 + (3/2) r^2 Σ e^{u_i} - 3 Σ σ_i, zero for every regular radial solution.
  double balance() const { return flux_energy + boundary_density - 3.0 * mass_sum; }
  // Coefficient k in pair_sum = k · mass_sum predicted from the derivative data:
  // pair_sum = (4/3)|r u'|^2 once the mean-value identity holds.
  double flux_coefficient() const { return mass_sum > 0.0 ? (8.0 / 3.0) * flux_energy / mass_sum : 0.0; }
  double mass_coefficient() const { return mass_sum > 0.0 ? pair_sum / mass_sum : 0.0; }
};

// Radial Pohozaev computation for the rescaled SU(4) system. Pairing
// (r p_i)' = -r^2 Σ_k A_ik e^{u_k} with p_i = r u_i' and using Σ_i p_i = 0
// gives d/dt[½|p|^2 + (3/2) r^2 Σ e^{u_k} - 3 Σ σ_k] = 0.
inline Su4PohozaevBalance su4_pohozaev_balance(const RadialProfile& p, double r) {
  detail::require_regular(p, "su4_pohozaev_balance");
  if (p.system().variant() != SystemVariant::AffineSU4)
    throw std::invalid_argument("su4_pohozaev_balance needs an AffineSU4 profile");
  Su4PohozaevBalance out;
  out.triple = measured_triple(p, r);
  out.pair_sum = su4_pair_sum(out.triple);
  out.mass_sum = out.triple[0] + out.triple[1] + out.triple[2];
  const auto flux = flux_at(p, r);
  for (double f : flux) out.flux_energy += 0.5 * f * f;
  const auto rho = detail::channel_densities_at(p, r);
  out.boundary_density = 1.5 * r * r * (rho[0] + rho[1] + rho[2]);
  return out;
}

// max_j,i |r u_i' - 2 b_i + Σ_k A_ik σ_k| / (1 + Σ_k σ_k) over the grid.
inline double max_mean_value_residual(const RadialProfile& p) {
  const auto& c = p.system().coeffs();
  const auto& b = p.system().singular_weights();
  double worst = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    double total = 0.0;
    for (std::size_t k = 0; k < p.channels(); ++k) total += p.masses[k][j];
    for (std::size_t i = 0; i < p.components(); ++i) {
      double e = p.grid[j] * p.derivs[i][j] - 2.0 * b[i];
      for (std::size_t k = 0; k < p.channels(); ++k) e += c.a(i, k) * p.masses[k][j];
      worst = std::max(worst, std::abs(e) / (1.0 + total));
    }
  }
  return worst;
}

// max_j |c·u| / (1 + max_i |u_i|) for constrained systems; nullopt otherwise.
inline std::optional<double> max_constraint_violation(const RadialProfile& p) {
  const auto& w = p.system().coeffs().constraint;
  if (w.empty()) return std::nullopt;
  double worst = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    double s = 0.0, mag = 0.0;
    for (std::size_t i = 0; i < p.components(); ++i) {
      s += w[i] * p.values[i][j];
      mag = std::max(mag, std::abs(p.values[i][j]));
    }
    worst = std::max(worst, std::abs(s) / (1.0 + mag));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Decay

enum class DecayKind { Fast, Slow };

struct DecayVerdict {
  DecayKind kind = DecayKind::Slow;
  double witness = 0.0;    // max over the tested channels of L_k·u(r) + 2 log r
  double threshold = 0.0;  // N
  std::vector<double> channel_witness;
};

inline DecayVerdict decay_classify(const RadialProfile& p, double r, double threshold,
                                   const std::vector<std::size_t>& channels = {}) {
  if (!(threshold > 0.0)) throw std::invalid_argument("decay threshold must be positive");
  const auto u = value_at(p, r);
  const auto& c = p.system().coeffs();
  DecayVerdict v;
  v.threshold = threshold;
  v.channel_witness.resize(p.channels());
  for (std::size_t k = 0; k < p.channels(); ++k) {
    double e = 2.0 * std::log(r);
    for (std::size_t j = 0; j < u.size(); ++j) e += c.l(k, j) * u[j];
    v.channel_witness[k] = e;
  }
  std::vector<std::size_t> tested = channels;
  if (tested.empty())
    for (std::size_t k = 0; k < p.channels(); ++k) tested.push_back(k);
  v.witness = -std::numeric_limits<double>::infinity();
  for (auto k : tested) {
    if (k >= p.channels()) throw std::invalid_argument("channel index out of range");
    v.witness = std::max(v.witness, v.channel_witness[k]);
  }
  v.kind = v.witness <= -threshold ? DecayKind::Fast : DecayKind::Slow;
  return v;
}

struct DecayScan {
  std::optional<double> radius;  // first radius in [a, b] with witness <= -N
  double annulus_mass = 0.0;     // σ(b) - σ(a) for the scanned channel
};

// Walks the grid inside [a, b]; the first crossing is refined by bisection on
// the interpolated witness.
inline DecayScan fast_decay_radius_scan(const RadialProfile& p, std::size_t channel, double a, double b,
                                        double threshold) {
  if (channel >= p.channels()) throw std::invalid_argument("channel index out of range");
  if (!(a < b)) throw std::invalid_argument("scan interval must satisfy a < b");
  if (p.size() == 0 || a < p.r_front() || b > p.r_back())
    throw std::out_of_range("scan interval outside profile range");
  auto witness = [&](double r) { return decay_classify(p, r, threshold, {channel}).witness; };
  DecayScan out;
  out.annulus_mass = cumulative_mass(p, b)[channel] - cumulative_mass(p, a)[channel];

  std::vector<double> pts{a};
  for (double r : p.grid)
    if (r > a && r < b) pts.push_back(r);
  pts.push_back(b);
  if (witness(a) <= -threshold) {
    out.radius = a;
    return out;
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (witness(pts[i]) <= -threshold) {
      double lo = pts[i - 1], hi = pts[i];
      for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (witness(mid) <= -threshold) hi = mid;
        else lo = mid;
      }
      out.radius = hi;
      return out;
    }
  }
  return out;
}

// First grid radius at which every channel decays fast after at least one
// channel was slow: the smallest fast-decay circle enclosing a concentration.
inline std::optional<double> enclosing_fast_decay_radius(const RadialProfile& p, double threshold) {
  bool seen_slow = false;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double tlr = 2.0 * std::log(p.grid[j]);
    bool fast = true;
    for (std::size_t k = 0; k < p.channels() && fast; ++k) fast = p.channel_exponent(k, j) + tlr <= -threshold;
    if (!fast) seen_slow = true;
    else if (seen_slow) return p.grid[j];
  }
  return std::nullopt;
}

struct DecayPlateau {
  double r_begin = 0.0;
  double r_end = 0.0;
  double r_read = 0.0;   // deepest point of the run: smallest max witness
  double witness = 0.0;
  MeasuredTriple triple{};
};

// Maximal runs of grid points where every channel decays fast, each preceded
// by a slow stretch. Masses are read at the deepest point of the run; on a
// bubble tower these are the successive local-mass plateaus.
inline std::vector<DecayPlateau> fast_decay_plateaus(const RadialProfile& p, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("decay threshold must be positive");
  const auto v = p.system().variant();
  std::vector<DecayPlateau> out;
  bool seen_slow = false;
  std::optional<DecayPlateau> run;
  std::size_t best = 0;
  auto close = [&] {
    std::vector<double> m(p.channels());
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = p.masses[k][best];
    run->triple = embed_triple(v, m);
    out.push_back(*run);
    run.reset();
  };
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double tlr = 2.0 * std::log(p.grid[j]);
    double w = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < p.channels(); ++k) w = std::max(w, p.channel_exponent(k, j) + tlr);
    const bool fast = w <= -threshold;
    if (!fast) {
      if (run) close();
      seen_slow = true;
      continue;
    }
    if (!seen_slow) continue;
    if (!run) {
      run = DecayPlateau{p.grid[j], p.grid[j], p.grid[j], w, {}};
      best = j;
    }
    run->r_end = p.grid[j];
    if (w < run->witness) {
      run->witness = w;
      run->r_read = p.grid[j];
      best = j;
    }
  }
  if (run) close();
  return out;
}

// ---------------------------------------------------------------------------
// Bubble families

struct BubbleReport {
  MeasuredTriple measured{};
  MassTriple nearest;
  std::optional<ParamIndex> nearest_index;
  double distance = 0.0;
  double pohozaev_residual = 0.0;  // of the measured triple, in the family's form
  double delta_used = 0.0;         // δ at which `measured` was read
  std::optional<double> base_fast_decay_radius;
  bool resolved = false;           // δ_used / ε_K exceeded the base fast-decay radius
  std::vector<std::pair<double, MeasuredTriple>> eps_table;     // (ε_k, σ(δ; u_k))
  std::vector<std::pair<double, MeasuredTriple>> delta_ladder;  // (δ_j, σ(δ_j; u_K))
};

inline double triple_distance(const MeasuredTriple& a, const MassTriple& b) {
  const double d1 = a[0] - static_cast<double>(b.s1);
  const double d2 = a[1] - static_cast<double>(b.s2);
  const double d3 = a[2] - static_cast<double>(b.s3);
  return std::sqrt(d1 * d1 + d2 * d2 + d3 * d3);
}

// Euclidean nearest member; members are sorted so the first minimum is the
// lexicographically smallest on ties.
inline const SpectrumMember& nearest_member(const SpectrumSet& s, const MeasuredTriple& t) {
  if (s.empty()) throw std::invalid_argument("spectrum set is empty");
  const SpectrumMember* best = &s.members.front();
  double best_d = triple_distance(t, best->triple);
  for (const auto& m : s.members) {
    const double d = triple_distance(t, m.triple);
    if (d < best_d) {
      best_d = d;
      best = &m;
    }
  }
  return *best;
}

// Blow-up sequence u_k(x) = base(x/ε_k) - 2 log ε_k, i.e. rescale(base, 1/ε_k),
// so σ(δ; u_k) = σ(δ/ε_k; base). The iterated limit is read off at the smallest
// ε, at the smallest ladder δ_j = δ 10^{-j} with δ_j/ε_K beyond the base's
// enclosing fast-decay radius.
inline BubbleReport bubble_masses(const RadialProfile& base, const std::vector<double>& eps_ladder, double delta,
                                  const SpectrumSet& spectrum, double threshold = 10.0) {
  if (eps_ladder.empty()) throw std::invalid_argument("epsilon ladder is empty");
  for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
    if (!(eps_ladder[i] > 0.0) || !std::isfinite(eps_ladder[i]))
      throw std::invalid_argument("epsilon ladder entries must be positive");
    if (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1]))
      throw std::invalid_argument("epsilon ladder must be strictly decreasing");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be positive");
  if (base.size() == 0) throw std::invalid_argument("empty base profile");
  const auto family = triple_family(base.system().variant());
  if ((family == TripleFamily::SU3) != (spectrum.variant == SpectrumVariant::SU3Affine))
    throw std::invalid_argument("spectrum variant does not match the profile's system");

  // Readings come from the rescaled profile; clamp away one-ulp drift at the ends.
  auto read = [&](const RadialProfile& u_k, double d) {
    const double lo = u_k.r_front(), hi = u_k.r_back();
    if (d < lo * (1.0 - 1e-12) || d > hi * (1.0 + 1e-12))
      throw std::out_of_range("delta outside the rescaled profile range");
    return measured_triple(u_k, std::clamp(d, lo, hi));
  };

  BubbleReport rep;
  for (double eps : eps_ladder) {
    const auto u_k = rescale(base, 1.0 / eps);
    rep.eps_table.emplace_back(eps, read(u_k, delta));
  }
  const double eps_K = eps_ladder.back();
  const auto u_K = rescale(base, 1.0 / eps_K);
  rep.base_fast_decay_radius = enclosing_fast_decay_radius(base, threshold);

  for (int j = 0; j < 64; ++j) {
    const double d = delta * std::pow(10.0, -j);
    if (d < u_K.r_front()) break;
    rep.delta_ladder.emplace_back(d, read(u_K, d));
  }
  rep.measured = rep.delta_ladder.front().second;
  rep.delta_used = delta;
  if (rep.base_fast_decay_radius) {
    for (const auto& [d, t] : rep.delta_ladder) {
      if (d / eps_K >= *rep.base_fast_decay_radius) {
        rep.measured = t;
        rep.delta_used = d;
        rep.resolved = true;
      }
    }
  }

  const auto& near = nearest_member(spectrum, rep.measured);
  rep.nearest = near.triple;
  rep.nearest_index = near.index;
  if (!rep.nearest_index && spectrum.variant == SpectrumVariant::SU3Affine)
    rep.nearest_index = membership_su3(near.triple);
  rep.distance = triple_distance(rep.measured, rep.nearest);
  rep.pohozaev_residual = family == TripleFamily::SU3 ? su3_residual(rep.measured) : su4_residual(rep.measured);
  return rep;
}

}  // namespace toda
