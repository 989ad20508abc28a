#pragma once

// Coefficient structure of the radial systems
//
//   -Δu_i = Σ_k A_ik exp(L_k · u) - 4π b_i δ_0,
//
// where each exponential exp(L_k · u) is a "mass channel". For the Liouville
// type systems the channels are just e^{u_i}; the scalar sinh-Gordon and
// Tzitzéica equations carry two channels on one unknown.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace toda {

enum class SystemVariant {
  LiouvilleScalar,  // -Δu = e^u
  SinhGordon,       // -Δu = e^u - e^{-u}
  AffineSU3,        // -Δu1 = e1 - e3, -Δu2 = e2 - e3, -Δu3 = -e1/2 - e2/2 + e3
  LimitPair,        // -Δu = e^u - e^v, -Δv = -e^u/2 + e^v
  TzitzeicaScalar,  // -Δθ = e^{2θ} - e^{-θ}
  AffineSU4,        // -Δu_i = e_i - e_j/2 - e_k/2
};

inline constexpr std::array<SystemVariant, 6> kAllVariants = {
    SystemVariant::LiouvilleScalar, SystemVariant::SinhGordon,      SystemVariant::AffineSU3,
    SystemVariant::LimitPair,       SystemVariant::TzitzeicaScalar, SystemVariant::AffineSU4};

struct SystemCoefficients {
  std::size_t components = 0;
  std::size_t channels = 0;
  std::vector<double> coupling;   // components x channels, row-major: A_ik
  std::vector<double> exponents;  // channels x components, row-major: L_kj
  std::vector<double> constraint; // weights c with c·u conserved when started at 0; empty if none

  double a(std::size_t i, std::size_t k) const { return coupling[i * channels + k]; }
  double l(std::size_t k, std::size_t j) const { return exponents[k * components + j]; }
  // Σ_j L_kj, governs how channel k transforms under u(εr) + 2 log ε.
  double exponent_sum(std::size_t k) const {
    double s = 0.0;
    for (std::size_t j = 0; j < components; ++j) s += l(k, j);
    return s;
  }
};

inline const SystemCoefficients& coefficients(SystemVariant v) {
  static const SystemCoefficients liouville{1, 1, {1.0}, {1.0}, {}};
  static const SystemCoefficients sinh_gordon{1, 2, {1.0, -1.0}, {1.0, -1.0}, {}};
  static const SystemCoefficients su3{3,
                                      3,
                                      {1.0, 0.0, -1.0,  //
                                       0.0, 1.0, -1.0,  //
                                       -0.5, -0.5, 1.0},
                                      {1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0},
                                      {1.0, 1.0, 2.0}};
  static const SystemCoefficients limit_pair{2, 2, {1.0, -1.0, -0.5, 1.0}, {1.0, 0.0, 0.0, 1.0}, {}};
  static const SystemCoefficients tzitzeica{1, 2, {1.0, -1.0}, {2.0, -1.0}, {}};
  static const SystemCoefficients su4{3,
                                      3,
                                      {1.0, -0.5, -0.5,  //
                                       -0.5, 1.0, -0.5,  //
                                       -0.5, -0.5, 1.0},
                                      {1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0},
                                      {1.0, 1.0, 1.0}};
  switch (v) {
    case SystemVariant::LiouvilleScalar: return liouville;
    case SystemVariant::SinhGordon: return sinh_gordon;
    case SystemVariant::AffineSU3: return su3;
    case SystemVariant::LimitPair: return limit_pair;
    case SystemVariant::TzitzeicaScalar: return tzitzeica;
    case SystemVariant::AffineSU4: return su4;
  }
  throw std::invalid_argument("unknown system variant");
}

inline std::string_view system_name(SystemVariant v) {
  switch (v) {
    case SystemVariant::LiouvilleScalar: return "liouville";
    case SystemVariant::SinhGordon: return "sinh-gordon";
    case SystemVariant::AffineSU3: return "su3";
    case SystemVariant::LimitPair: return "limitpair";
    case SystemVariant::TzitzeicaScalar: return "tzitzeica";
    case SystemVariant::AffineSU4: return "su4";
  }
  return "?";
}

inline std::optional<SystemVariant> parse_system(std::string_view name) {
  for (auto v : kAllVariants)
    if (system_name(v) == name) return v;
  return std::nullopt;
}

// A system variant plus per-component Dirac weights at the origin.
class SystemKind {
 public:
  SystemKind() = default;
  explicit SystemKind(SystemVariant v, std::vector<double> singular_weights = {})
      : variant_(v), weights_(std::move(singular_weights)) {
    const auto n = coefficients(v).components;
    if (weights_.empty()) weights_.assign(n, 0.0);
    if (weights_.size() != n)
      throw std::invalid_argument(std::string(system_name(v)) + " expects " + std::to_string(n) +
                                  " singular weights, got " + std::to_string(weights_.size()));
    for (double b : weights_)
      if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("singular weights must be finite and >= 0");
  }

  SystemVariant variant() const { return variant_; }
  const std::vector<double>& singular_weights() const { return weights_; }
  const SystemCoefficients& coeffs() const { return coefficients(variant_); }
  std::size_t components() const { return coeffs().components; }
  std::size_t channels() const { return coeffs().channels; }
  bool is_singular() const {
    return std::any_of(weights_.begin(), weights_.end(), [](double b) { return b != 0.0; });
  }
  // Σ_j L_kj b_j: channel k behaves like r^{2β_k} near the origin.
  double channel_weight(std::size_t k) const {
    double s = 0.0;
    for (std::size_t j = 0; j < components(); ++j) s += coeffs().l(k, j) * weights_[j];
    return s;
  }

  friend bool operator==(const SystemKind&, const SystemKind&) = default;

 private:
  SystemVariant variant_ = SystemVariant::LiouvilleScalar;
  std::vector<double> weights_ = {0.0};
};

}  // namespace toda
