#pragma once

// Exact arithmetic on local-mass triples of the affine Toda systems.
//
// Masses are stored as the integers sigma_i themselves (not sigma_i / 4), so
// every Pohozaev residual in this header is an exact std::int64_t. No floating
// point is used anywhere below.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace toda {

using Mass = std::int64_t;

struct MassTriple {
  Mass s1 = 0;
  Mass s2 = 0;
  Mass s3 = 0;

  friend constexpr auto operator<=>(const MassTriple&, const MassTriple&) = default;

  constexpr std::array<Mass, 3> as_array() const { return {s1, s2, s3}; }
  constexpr bool is_zero() const { return s1 == 0 && s2 == 0 && s3 == 0; }
  constexpr Mass max() const { return std::max({s1, s2, s3}); }
};

inline std::ostream& operator<<(std::ostream& os, const MassTriple& t) {
  return os << '(' << t.s1 << ',' << t.s2 << ',' << t.s3 << ')';
}

// (m1, m2) parametrization of the SU(3)-affine quantization set.
struct ParamIndex {
  std::int64_t m1 = 0;
  std::int64_t m2 = 0;

  friend constexpr auto operator<=>(const ParamIndex&, const ParamIndex&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const ParamIndex& p) {
  return os << '(' << p.m1 << ',' << p.m2 << ')';
}

enum class SpectrumVariant { SU3Affine, SU4Affine };

// Which quadratic defines the SU(4) candidate set.
//   Printed:       (s1-s2)^2 + (s2-s3)^2 + (s3-s1)^2 = 12 (s1+s2+s3)
//   RadialDerived: same left side = 8 (s1+s2+s3), the balance obtained by
//                  integrating the radial system (5.4) against r u'.
enum class Su4Form { Printed, RadialDerived };

struct SpectrumMember {
  MassTriple triple;
  std::optional<ParamIndex> index;  // only set for SU3 members

  friend constexpr bool operator==(const SpectrumMember& a, const SpectrumMember& b) {
    return a.triple == b.triple && a.index == b.index;
  }
};

struct SpectrumSet {
  SpectrumVariant variant = SpectrumVariant::SU3Affine;
  Mass bound = 0;
  std::vector<SpectrumMember> members;  // distinct, lexicographically sorted

  bool contains(const MassTriple& t) const {
    auto it = std::lower_bound(members.begin(), members.end(), t,
                               [](const SpectrumMember& m, const MassTriple& x) { return m.triple < x; });
    return it != members.end() && it->triple == t;
  }
  std::size_t size() const { return members.size(); }
  bool empty() const { return members.empty(); }
};

inline std::string_view variant_name(SpectrumVariant v) {
  return v == SpectrumVariant::SU3Affine ? "su3" : "su4";
}

// ---------------------------------------------------------------------------
// Residuals

constexpr Mass pohozaev_residual_su3(const MassTriple& t) {
  const Mass a = t.s1 - t.s3;
  const Mass b = t.s2 - t.s3;
  return a * a + b * b - 4 * (t.s1 + t.s2 + 2 * t.s3);
}

constexpr Mass su4_pair_sum(const MassTriple& t) {
  const Mass a = t.s1 - t.s2;
  const Mass b = t.s2 - t.s3;
  const Mass c = t.s3 - t.s1;
  return a * a + b * b + c * c;
}

constexpr Mass pohozaev_residual_su4(const MassTriple& t, Su4Form form = Su4Form::Printed) {
  const Mass k = form == Su4Form::Printed ? 12 : 8;
  return su4_pair_sum(t) - k * (t.s1 + t.s2 + t.s3);
}

// ---------------------------------------------------------------------------
// Parametrization

namespace detail {

constexpr std::int64_t floor_mod4(std::int64_t m) {
  const std::int64_t r = m % 4;
  return r < 0 ? r + 4 : r;
}

// Smallest s >= 0 with s*s >= n.
constexpr std::int64_t isqrt_ceil(std::int64_t n) {
  if (n <= 0) return 0;
  std::int64_t lo = 0, hi = 1;
  while (hi * hi < n) hi *= 2;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (mid * mid >= n) hi = mid;
    else lo = mid + 1;
  }
  return lo;
}

}  // namespace detail

// Both indices in {0,1} mod 4, or both in {2,3} mod 4. Equivalent to
// sigma_3 = m1(m1-1) + m2(m2-1) being divisible by 4.
constexpr bool residue_condition(const ParamIndex& p) {
  const auto a = detail::floor_mod4(p.m1);
  const auto b = detail::floor_mod4(p.m2);
  return (a <= 1 && b <= 1) || (a >= 2 && b >= 2);
}

constexpr MassTriple triple_from_params(const ParamIndex& p) {
  const auto m1 = p.m1;
  const auto m2 = p.m2;
  return {m1 * (m1 + 3) + m2 * (m2 - 1),
          m1 * (m1 - 1) + m2 * (m2 + 3),
          m1 * (m1 - 1) + m2 * (m2 - 1)};
}

constexpr std::optional<ParamIndex> membership_su3(const MassTriple& t) {
  for (Mass s : t.as_array())
    if (s < 0 || s % 4 != 0) return std::nullopt;
  if (t.is_zero()) return std::nullopt;
  const ParamIndex p{(t.s1 - t.s3) / 4, (t.s2 - t.s3) / 4};
  if (p.m1 * (p.m1 - 1) + p.m2 * (p.m2 - 1) != t.s3) return std::nullopt;
  if (!residue_condition(p)) return std::nullopt;
  return p;
}

constexpr bool membership_su4(const MassTriple& t, Su4Form form = Su4Form::Printed) {
  for (Mass s : t.as_array())
    if (s < 0 || s % 4 != 0) return false;
  return !t.is_zero() && pohozaev_residual_su4(t, form) == 0;
}

// Index window |m_i| <= 1 + ceil(sqrt(bound)). Sufficient because
// sigma_3 >= m_i (m_i - 1) for each i, and m(m-1) <= bound forces
// |m| <= 1 + sqrt(bound).
constexpr std::int64_t param_window(Mass bound) { return 1 + detail::isqrt_ceil(bound); }

// ---------------------------------------------------------------------------
// Enumeration

namespace detail {

inline void check_bound(Mass bound) {
  if (bound < 0) throw std::invalid_argument("spectrum bound must be non-negative, got " + std::to_string(bound));
}

inline void sort_members(std::vector<SpectrumMember>& v) {
  std::sort(v.begin(), v.end(), [](const SpectrumMember& a, const SpectrumMember& b) { return a.triple < b.triple; });
}

}  // namespace detail

// Brute force over sigma_i = 4 n_i against the quadratic. Members are not
// annotated with indices.
inline SpectrumSet enumerate_su3_bruteforce(Mass bound) {
  detail::check_bound(bound);
  SpectrumSet out{SpectrumVariant::SU3Affine, bound, {}};
  const Mass nmax = bound / 4;
  for (Mass n1 = 0; n1 <= nmax; ++n1)
    for (Mass n2 = 0; n2 <= nmax; ++n2)
      for (Mass n3 = 0; n3 <= nmax; ++n3) {
        const MassTriple t{4 * n1, 4 * n2, 4 * n3};
        if (!t.is_zero() && pohozaev_residual_su3(t) == 0) out.members.push_back({t, std::nullopt});
      }
  detail::sort_members(out.members);
  return out;
}

// Sweep (m1, m2) over the index window; members carry their indices.
inline SpectrumSet enumerate_su3_parametrized(Mass bound) {
  detail::check_bound(bound);
  SpectrumSet out{SpectrumVariant::SU3Affine, bound, {}};
  const auto w = param_window(bound);
  for (std::int64_t m1 = -w; m1 <= w; ++m1)
    for (std::int64_t m2 = -w; m2 <= w; ++m2) {
      const ParamIndex p{m1, m2};
      if (!residue_condition(p)) continue;
      const MassTriple t = triple_from_params(p);
      if (t.is_zero() || t.s1 < 0 || t.s2 < 0 || t.s3 < 0 || t.max() > bound) continue;
      out.members.push_back({t, p});
    }
  detail::sort_members(out.members);
  return out;
}

inline bool same_triples(const SpectrumSet& a, const SpectrumSet& b) {
  return std::equal(a.members.begin(), a.members.end(), b.members.begin(), b.members.end(),
                    [](const SpectrumMember& x, const SpectrumMember& y) { return x.triple == y.triple; });
}

inline bool su3_enumerations_agree(Mass bound) {
  return same_triples(enumerate_su3_bruteforce(bound), enumerate_su3_parametrized(bound));
}

// Both productions are computed; a mismatch is a logic error.
inline SpectrumSet enumerate_su3(Mass bound) {
  auto brute = enumerate_su3_bruteforce(bound);
  auto param = enumerate_su3_parametrized(bound);
  if (!same_triples(brute, param))
    throw std::logic_error("brute-force and parametrized SU3 enumerations disagree at bound " +
                           std::to_string(bound));
  return param;
}

// Candidate SU(4) set: non-negative multiples of 4, not all zero, on the quadric.
inline SpectrumSet enumerate_su4(Mass bound, Su4Form form = Su4Form::Printed) {
  detail::check_bound(bound);
  SpectrumSet out{SpectrumVariant::SU4Affine, bound, {}};
  const Mass nmax = bound / 4;
  for (Mass n1 = 0; n1 <= nmax; ++n1)
    for (Mass n2 = 0; n2 <= nmax; ++n2)
      for (Mass n3 = 0; n3 <= nmax; ++n3) {
        const MassTriple t{4 * n1, 4 * n2, 4 * n3};
        if (!t.is_zero() && pohozaev_residual_su4(t, form) == 0) out.members.push_back({t, std::nullopt});
      }
  detail::sort_members(out.members);
  return out;
}

// Members with sigma_1 = sigma_2 (the sinh-Gordon sub-family).
inline std::vector<MassTriple> sinh_gordon_slice(const SpectrumSet& s) {
  if (s.variant != SpectrumVariant::SU3Affine)
    throw std::invalid_argument("sinh-Gordon slice is only defined for SU3-affine spectra");
  std::vector<MassTriple> out;
  for (const auto& m : s.members)
    if (m.triple.s1 == m.triple.s2) out.push_back(m.triple);
  return out;
}

}  // namespace toda
