// Shoots the affine SU(3) system on the u1 = u2 slice from growing central
// heights and lists the bubble plateaus each profile passes through.

#include <cstdio>
#include <cstdlib>

#include "toda/toda.hpp"

using namespace toda;

int main(int argc, char** argv) {
  const double threshold = argc > 1 ? std::atof(argv[1]) : 8.0;
  const auto members = enumerate_su3(400);

  std::printf("%6s  %10s  %10s  %28s  %12s  %s\n", "w(0)", "r_begin", "r_end", "sigma", "nearest", "distance");
  for (double w : {0.5, 2.0, 8.0, 30.0, 48.0}) {
    const auto u = from_w_eta({w, 0.0});
    auto spec = make_shoot_spec(SystemKind(SystemVariant::AffineSU3), {u[0], u[1], u[2]});
    spec.r_max = 100.0;
    const auto p = shoot(spec);
    const auto plateaus = fast_decay_plateaus(p, threshold);
    if (plateaus.empty()) std::printf("%6.1f  no plateau at N = %g\n", w, threshold);
    for (const auto& pl : plateaus) {
      const auto& near = nearest_member(members, pl.triple);
      char nearest[32];
      std::snprintf(nearest, sizeof nearest, "(%lld,%lld,%lld)", static_cast<long long>(near.triple.s1),
                    static_cast<long long>(near.triple.s2), static_cast<long long>(near.triple.s3));
      std::printf("%6.1f  %10.4g  %10.4g  (%8.4f, %8.4f, %8.4f)  %12s  %.2e\n", w, pl.r_begin, pl.r_end,
                  pl.triple[0], pl.triple[1], pl.triple[2], nearest, triple_distance(pl.triple, near.triple));
    }
  }
  return 0;
}
