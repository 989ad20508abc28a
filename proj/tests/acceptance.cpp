// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only
//
// Exit status is 0 iff every selected criterion passed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "toda/toda.hpp"

using namespace toda;

namespace {

// Pinned tolerances.
constexpr Mass kEquivBound = 400;
constexpr double kEquivSeconds = 1.0;
constexpr Mass kNonMemberMax = 100;
constexpr Mass kNonMemberGap = 4;
constexpr double kLiouvilleRelErr = 1e-8;
constexpr double kLiouvilleMassErr = 1e-6;
constexpr double kLiouvilleSeconds = 1.0;
constexpr double kLimitPairRelErr = 1e-2;
constexpr double kLimitPairSeconds = 30.0;
constexpr double kSingularRelErr = 5e-3;
constexpr double kMeanValueTol = 1e-7;
constexpr double kRescaleTol = 1e-9;
constexpr double kScanRelErr = 1e-2;
constexpr double kSu4RelErr = 1e-2;
constexpr double kSliceDistance = 5e-2;
constexpr double kPlateauThreshold = 8.0;

const double kLog8 = std::log(8.0);

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::set<std::string> failed;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failed.insert(what);
    }
  }
  std::string text() const {
    std::string s = detail.str();
    if (!failed.empty()) {
      s += " [failed:";
      for (const auto& f : failed) s += " " + f + ";";
      s += "]";
    }
    return s;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

std::string fmt(const MeasuredTriple& t, int prec = 6) {
  return "(" + fmt(t[0], prec) + "," + fmt(t[1], prec) + "," + fmt(t[2], prec) + ")";
}

// Independent restatements used as oracles.
bool oracle_on_quadric(Mass a, Mass b, Mass c) {
  return (a - c) * (a - c) + (b - c) * (b - c) == 4 * (a + b + 2 * c);
}

double oracle_liouville(double r) { return kLog8 - 2.0 * std::log1p(r * r); }

ShootSpec su3_eta_zero(double w, double r_max) {
  const auto u = from_w_eta({w, 0.0});
  auto s = make_shoot_spec(SystemKind(SystemVariant::AffineSU3), {u[0], u[1], u[2]});
  s.r_max = r_max;
  return s;
}

// AffineSU3 profiles shared by criteria 6 and 10.
const std::vector<RadialProfile>& su3_profiles() {
  static const std::vector<RadialProfile> all = [] {
    std::vector<RadialProfile> v;
    for (double w : {0.5, 2.0, 8.0, 30.0, 48.0}) v.push_back(shoot(su3_eta_zero(w, 1e2)));
    for (auto [w, eta] : {std::pair{0.3, 0.7}, std::pair{-1.0, 1.5}, std::pair{20.0, 3.0}}) {
      const auto u = from_w_eta({w, eta});
      auto s = make_shoot_spec(SystemKind(SystemVariant::AffineSU3), {u[0], u[1], u[2]});
      s.r_max = 1e2;
      v.push_back(shoot(s));
    }
    return v;
  }();
  return all;
}

// ---------------------------------------------------------------------------

Outcome criterion_1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  Mass disagree = -1;
  for (Mass b = 0; b <= kEquivBound; ++b)
    if (!su3_enumerations_agree(b)) {
      disagree = b;
      break;
    }
  const double dt = seconds_since(t0);
  o.require(disagree < 0, "enumerations differ at bound " + std::to_string(disagree));
  o.require(dt < kEquivSeconds, "runtime");

  // Independent brute-force oracle at the top bound.
  std::set<MassTriple> want;
  for (Mass a = 0; a <= kEquivBound; a += 4)
    for (Mass b = 0; b <= kEquivBound; b += 4)
      for (Mass c = 0; c <= kEquivBound; c += 4)
        if ((a || b || c) && oracle_on_quadric(a, b, c)) want.insert({a, b, c});
  const auto got = enumerate_su3(kEquivBound);
  std::set<MassTriple> have;
  for (const auto& m : got.members) have.insert(m.triple);
  o.require(have == want, "oracle mismatch at bound 400");

  const auto s12 = enumerate_su3(12);
  int listed = 0;
  for (MassTriple t : {MassTriple{0, 0, 4}, MassTriple{4, 0, 0}, MassTriple{4, 4, 0}, MassTriple{4, 4, 12},
                       MassTriple{12, 12, 4}})
    listed += s12.contains(t);
  o.require(listed == 5, "listed triples");
  o.detail << "bounds 0.." << kEquivBound << " agree in " << fmt(dt, 3) << " s; |V(400)|=" << got.size()
           << "; listed triples at bound 12: " << listed << "/5";
  return o;
}

Outcome criterion_2() {
  Outcome o;
  const auto members = enumerate_su3(kEquivBound);
  std::size_t nonzero = 0;
  for (const auto& m : members.members) nonzero += pohozaev_residual_su3(m.triple) != 0;
  o.require(nonzero == 0, "member with nonzero residual");

  const auto small = enumerate_su3(kNonMemberMax);
  std::size_t checked = 0, violations = 0;
  Mass min_abs = std::numeric_limits<Mass>::max();
  for (Mass a = 0; a <= kNonMemberMax; a += 4)
    for (Mass b = 0; b <= kNonMemberMax; b += 4)
      for (Mass c = 0; c <= kNonMemberMax; c += 4) {
        const MassTriple t{a, b, c};
        if (t.is_zero() || small.contains(t)) continue;
        ++checked;
        const Mass r = pohozaev_residual_su3(t);
        min_abs = std::min(min_abs, r < 0 ? -r : r);
        violations += (r < 0 ? -r : r) < kNonMemberGap;
      }
  o.require(violations == 0, "non-member with small residual");
  o.detail << members.size() << " members with residual 0; " << checked
           << " non-members, min |residual| = " << min_abs;
  return o;
}

Outcome criterion_3() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  auto s = make_shoot_spec(SystemKind(SystemVariant::LiouvilleScalar), {kLog8});
  s.r_start = 1e-4;
  s.r_max = 1e3;
  const auto p = shoot(s);
  const auto totals = total_masses(p);
  const double dt = seconds_since(t0);
  double worst = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double exact = oracle_liouville(p.grid[j]);
    worst = std::max(worst, std::abs(p.values[0][j] - exact) / std::max(1.0, std::abs(exact)));
  }
  // The exact mass by quadrature of the closed form.
  const double quad = oracle::radial_mass(oracle_liouville, 1e-9, 1e9);
  const double mass_err = std::abs(totals.total[0] - quad);
  o.require(p.termination == Termination::ReachedRMax, "termination");
  o.require(worst <= kLiouvilleRelErr, "profile error");
  o.require(mass_err <= kLiouvilleMassErr, "mass error");
  o.require(dt < kLiouvilleSeconds, "runtime");
  o.detail << "max rel err " << fmt(worst, 3) << " on [1e-4,1e3]; total mass " << fmt(totals.total[0], 12)
           << " (quadrature " << fmt(quad, 12) << ", tail " << fmt(totals.tail[0], 3) << "); " << fmt(dt, 3) << " s";
  return o;
}

Outcome criterion_4() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = find_decaying(SystemKind(SystemVariant::LimitPair), 0, kLog8, {-5.0, 5.0}, 1e-3);
  const double dt = seconds_since(t0);
  const double su = res.totals.total[0], sv = res.totals.total[1];
  o.require(std::abs(su - 16.0) <= kLimitPairRelErr * 16.0, "sigma_u");
  o.require(std::abs(sv - 12.0) <= kLimitPairRelErr * 12.0, "sigma_v");
  o.require(dt < kLimitPairSeconds, "runtime");

  // Fixed-step RK4 oracle from the same initial data.
  const auto y = oracle::limit_pair_rk4(kLog8, res.init_heights[1], 1e-6, 1e3, 400);
  const auto m = cumulative_mass(res.profile, 1e3);
  o.require(std::abs(m[0] - y[4]) < 1e-6 && std::abs(m[1] - y[5]) < 1e-6, "RK4 oracle");

  const MassTriple rounded{std::llround(su / 4) * 4, 0, std::llround(sv / 4) * 4};
  const auto idx = membership_su3(rounded);
  o.require(idx && *idx == ParamIndex{1, -3}, "membership (1,-3)");
  o.detail << "v(0)=" << fmt(res.init_heights[1]) << " -> (sigma_u, sigma_v) = (" << fmt(su, 8) << ", "
           << fmt(sv, 8) << "); " << rounded << " index "
           << (idx ? "(" + std::to_string(idx->m1) + "," + std::to_string(idx->m2) + ")" : std::string("none"))
           << "; " << res.iterations << " shots, " << fmt(dt, 3) << " s";
  return o;
}

Outcome criterion_5() {
  Outcome o;
  for (double b : {1.0, 2.0, 3.0}) {
    // Mass does not depend on the additive constant; use two of them.
    for (double c : {0.0, 1.5}) {
      auto s = make_shoot_spec(SystemKind(SystemVariant::LiouvilleScalar, {b}), {c});
      s.r_max = 1e6;
      const auto p = shoot(s);
      const double got = total_masses(p).total[0];
      const double want = 4.0 * (1.0 + b);
      o.require(p.termination == Termination::ReachedRMax, "termination");
      o.require(std::abs(got - want) <= kSingularRelErr * want, "b=" + fmt(b));
      if (c == 0.0) o.detail << "b=" << fmt(b) << ": " << fmt(got, 9) << "  ";
    }
    // Quadrature of the closed form agrees with 4(1+b).
    const double q = oracle::radial_mass(
        [b](double r) {
          const double y = std::pow(r, 2 * (1 + b));
          return std::log(8 * (1 + b) * (1 + b)) + 2 * b * std::log(r) - 2 * std::log1p(y);
        },
        1e-9, 1e7);
    o.require(std::abs(q - 4.0 * (1.0 + b)) < 1e-6, "quadrature oracle");
  }
  return o;
}

Outcome criterion_6() {
  Outcome o;
  double worst = 0.0;
  for (const auto& p : su3_profiles()) worst = std::max(worst, max_mean_value_residual(p));
  o.require(worst <= kMeanValueTol, "mean-value residual");
  o.detail << su3_profiles().size() << " AffineSU3 profiles, max |r u' - combo| / (1+sum sigma) = " << fmt(worst, 3);
  return o;
}

Outcome criterion_7() {
  Outcome o;
  std::vector<RadialProfile> stored;
  {
    auto s = make_shoot_spec(SystemKind(SystemVariant::LiouvilleScalar), {kLog8});
    s.r_max = 1e4;
    stored.push_back(shoot(s));
    s = make_shoot_spec(SystemKind(SystemVariant::LimitPair), {kLog8, 0.0});
    s.r_max = 1e4;
    stored.push_back(shoot(s));
    s = make_shoot_spec(SystemKind(SystemVariant::LiouvilleScalar, {1.0}), {0.0});
    s.r_max = 1e4;
    stored.push_back(shoot(s));
    stored.push_back(shoot(su3_eta_zero(48.0, 1.0)));
  }
  double worst = 0.0;
  std::size_t n = 0;
  for (const auto& p : stored)
    for (double eps : {1e-3, 1.0, 1e3}) {
      const auto q = rescale(p, eps);
      for (std::size_t j = 0; j + 1 < p.size(); ++j) {
        for (double r : {p.grid[j], std::sqrt(p.grid[j] * p.grid[j + 1])}) {
          const double rq = std::clamp(r / eps, q.r_front(), q.r_back());
          const auto a = cumulative_mass(q, rq);
          const auto b = cumulative_mass(p, std::clamp(eps * rq, p.r_front(), p.r_back()));
          for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
          ++n;
        }
      }
    }
  o.require(worst <= kRescaleTol, "rescale mass law");
  o.detail << n << " radii over " << stored.size() << " profiles x eps {1e-3,1,1e3}; max |diff| = " << fmt(worst, 3);
  return o;
}

Outcome criterion_8() {
  Outcome o;
  auto s = make_shoot_spec(SystemKind(SystemVariant::LiouvilleScalar), {kLog8});
  s.r_max = 1e6;
  const auto p = shoot(s);
  for (double N : {5.0, 10.0}) {
    const double predicted = oracle::bisect(
        [N](double r) { return oracle_liouville(r) + 2 * std::log(r) + N; }, 2.0, 1e5);
    std::size_t flip = 0;
    for (std::size_t j = 1; j < p.size(); ++j)
      if (p.grid[j] > 1.0 && decay_classify(p, p.grid[j - 1], N).kind == DecayKind::Slow &&
          decay_classify(p, p.grid[j], N).kind == DecayKind::Fast) {
        flip = j;
        break;
      }
    const bool ok = flip > 0 && p.grid[flip - 1] < predicted && predicted <= p.grid[flip];
    o.require(ok, "flip N=" + fmt(N));
    o.detail << "N=" << fmt(N) << ": predicted " << fmt(predicted, 10) << ", flip in ["
             << (flip ? fmt(p.grid[flip - 1], 8) : "?") << ", " << (flip ? fmt(p.grid[flip], 8) : "?") << "]; ";
  }
  const double root =
      oracle::bisect([](double r) { return oracle_liouville(r) + 2 * std::log(r) + 5.0; }, 10.0, 1000.0);
  const auto scan = fast_decay_radius_scan(p, 0, 10.0, 1000.0, 5.0);
  o.require(scan.radius && std::abs(*scan.radius - root) <= kScanRelErr * root, "scan radius");
  o.detail << "scan [10,1000] N=5: " << (scan.radius ? fmt(*scan.radius, 10) : "none") << " vs root "
           << fmt(root, 10);
  return o;
}

Outcome criterion_9() {
  Outcome o;
  // Tall data concentrate one or two components first: Liouville and open SU(3)
  // Toda bubbles inside the SU(4) system, followed by the next tower level.
  struct Run {
    const char* label;
    VarsThetaPhi start;
  };
  const Run runs[] = {{"u(0)=(40,-20,-20)", {-10.0, 10.0}}, {"u(0)=(45,45,-90)", {-45.0, 0.0}}};
  std::size_t plateaus = 0;
  for (const auto& run : runs) {
    const auto u = from_theta_phi(run.start);
    auto s = make_shoot_spec(SystemKind(SystemVariant::AffineSU4), {u[0], u[1], u[2]});
    s.r_max = 1e2;
    const auto p = shoot(s);
    for (const auto& pl : fast_decay_plateaus(p, 10.0)) {
      ++plateaus;
      const auto bal = su4_pohozaev_balance(p, pl.r_read);
      // Derived identity: pair_sum = k * mass_sum with k from the derivative data alone.
      const double k_derived = bal.flux_coefficient();
      const double printed = su4_residual(pl.triple, Su4Form::Printed);
      const double scale = 12.0 * bal.mass_sum;
      o.require(std::abs(k_derived - 12.0) <= kSu4RelErr * 12.0, "derived coefficient vs 12");
      o.require(std::abs(printed) <= kSu4RelErr * scale, "12-form residual");
      o.detail << run.label << " sigma=" << fmt(pl.triple, 6) << " pair_sum/sum=" << fmt(bal.mass_coefficient(), 7)
               << " derived k=" << fmt(k_derived, 7) << " 12-form residual=" << fmt(printed, 4)
               << " 8-form residual=" << fmt(su4_residual(pl.triple, Su4Form::RadialDerived), 3) << "; ";
    }
  }
  o.require(plateaus >= 2, "decaying plateaus");
  return o;
}

Outcome criterion_10() {
  Outcome o;
  const auto slice = sinh_gordon_slice(enumerate_su3(kEquivBound));
  double worst_sym = 0.0, worst_dist = 0.0;
  std::size_t plateaus = 0;
  std::set<MassTriple> seen;
  for (double w : {0.5, 2.0, 8.0, 30.0, 48.0}) {
    const auto spec = su3_eta_zero(w, 1e2);
    const auto p = shoot(spec);
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double mag = std::max({std::abs(p.values[0][j]), std::abs(p.values[1][j]), std::abs(p.values[2][j])});
      worst_sym = std::max(worst_sym, std::abs(p.values[0][j] - p.values[1][j]) / (1.0 + mag));
    }
    for (const auto& pl : fast_decay_plateaus(p, kPlateauThreshold)) {
      ++plateaus;
      double best = std::numeric_limits<double>::infinity();
      MassTriple near{};
      for (const auto& t : slice)
        if (triple_distance(pl.triple, t) < best) {
          best = triple_distance(pl.triple, t);
          near = t;
        }
      worst_dist = std::max(worst_dist, best);
      o.require(pl.triple[0] == pl.triple[1], "sigma1 = sigma2");
      seen.insert(near);
    }
  }
  o.require(worst_sym <= 10 * 1e-10, "u1 = u2");
  o.require(plateaus >= 2, "bubble plateaus found");
  o.require(worst_dist <= kSliceDistance, "distance to slice");
  o.detail << "max |u1-u2|/(1+|u|) = " << fmt(worst_sym, 3) << "; " << plateaus << " plateaus, nearest slice members";
  for (const auto& t : seen) o.detail << " " << t;
  o.detail << ", max distance " << fmt(worst_dist, 3);
  return o;
}

const char* kTitles[] = {"",
                         "spectrum equivalence",
                         "Pohozaev exactness on V",
                         "Liouville oracle",
                         "limit pair masses (16,12)",
                         "singular bubble masses 4(1+b)",
                         "mean-value identities",
                         "rescaling law",
                         "decay dichotomy",
                         "SU(4) identity cross-check",
                         "sinh-Gordon consistency"};

const std::function<Outcome()> kCriteria[] = {nullptr,     criterion_1, criterion_2, criterion_3,
                                              criterion_4, criterion_5, criterion_6, criterion_7,
                                              criterion_8, criterion_9, criterion_10};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      which.push_back(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (which.empty())
    for (int c = 1; c <= 10; ++c) which.push_back(c);

  int failed = 0;
  for (int c : which) {
    if (c < 1 || c > 10) {
      std::fprintf(stderr, "no criterion %d\n", c);
      return 2;
    }
    Outcome o;
    try {
      o = kCriteria[c]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    failed += !o.pass;
    std::printf("criterion %2d %-32s %s  %s\n", c, kTitles[c], o.pass ? "PASS" : "FAIL", o.text().c_str());
  }
  return failed == 0 ? 0 : 1;
}
