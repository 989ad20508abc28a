#include <gtest/gtest.h>

#include <sstream>

#include "toda/io.hpp"

using namespace toda;

namespace {

RadialProfile small_profile(SystemVariant v, std::vector<double> h) {
  auto s = make_shoot_spec(SystemKind(v), std::move(h));
  s.r_max = 10;
  s.samples_per_decade = 7;
  return shoot(s);
}

void expect_same(const RadialProfile& a, const RadialProfile& b) {
  EXPECT_EQ(a.spec.system, b.spec.system);
  EXPECT_EQ(a.spec.init_heights, b.spec.init_heights);
  EXPECT_EQ(a.spec.r_start, b.spec.r_start);
  EXPECT_EQ(a.spec.r_max, b.spec.r_max);
  EXPECT_EQ(a.termination, b.termination);
  EXPECT_EQ(a.grid, b.grid);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.derivs, b.derivs);
  EXPECT_EQ(a.masses, b.masses);
}

}  // namespace

TEST(SpectrumText, RoundTrip) {
  const auto s = enumerate_su3(40);
  std::stringstream ss;
  io::write_spectrum_text(ss, s);
  const auto back = io::read_spectrum_text(ss, SpectrumVariant::SU3Affine, 40);
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(back.members[i].triple, s.members[i].triple);
    EXPECT_EQ(back.members[i].index, s.members[i].index);
  }
}

TEST(SpectrumText, Malformed) {
  std::stringstream ss("4 0 0\n4 x 0\n");
  EXPECT_THROW(io::read_spectrum_text(ss, SpectrumVariant::SU3Affine, 4), std::runtime_error);
}

TEST(SpectrumJson, Shape) {
  const auto j = io::spectrum_to_json(enumerate_su3(4));
  EXPECT_EQ(j["count"], 4);
  EXPECT_EQ(j["members"][0]["sigma"], io::json::array({0, 0, 4}));
  EXPECT_EQ(j["members"][0]["m"], io::json::array({-1, -1}));
}

TEST(ProfileCsv, HeaderAndRoundTrip) {
  const auto p = small_profile(SystemVariant::AffineSU3, {0.3, -0.5, 0.1});
  EXPECT_EQ(io::profile_csv_header(p), "r,u1,u2,u3,du1,du2,du3,sigma1,sigma2,sigma3");
  std::stringstream ss;
  io::write_profile_csv(ss, p, io::json{{"command", "shoot"}});
  const auto back = io::read_profile_csv(ss);
  expect_same(p, back);
}

TEST(ProfileCsv, TwoChannelScalar) {
  const auto p = small_profile(SystemVariant::SinhGordon, {0.4});
  EXPECT_EQ(io::profile_csv_header(p), "r,u1,du1,sigma1,sigma2");
  std::stringstream ss;
  io::write_profile_csv(ss, p);
  expect_same(p, io::read_profile_csv(ss));
}

TEST(ProfileCsv, Rejections) {
  std::stringstream a("r,u1\n1,2\n");
  EXPECT_THROW(io::read_profile_csv(a), std::runtime_error);
  const auto p = small_profile(SystemVariant::LiouvilleScalar, {1.0});
  std::stringstream ss;
  io::write_profile_csv(ss, p);
  std::string text = ss.str();
  text += "1e3,1,2\n";
  std::stringstream bad(text);
  EXPECT_THROW(io::read_profile_csv(bad), std::runtime_error);
}

TEST(ProfileJson, RoundTripIsExact) {
  const auto p = small_profile(SystemVariant::LimitPair, {std::log(8.0), 0.25});
  const auto j = io::profile_to_json(p, io::json{{"k", 1}});
  EXPECT_EQ(j["config"]["k"], 1);
  const auto back = io::profile_from_json(io::json::parse(j.dump()));
  expect_same(p, back);
}

TEST(ProfileJson, SingularWeightsSurvive) {
  auto s = make_shoot_spec(SystemKind(SystemVariant::LiouvilleScalar, {2.0}), {1.0});
  s.r_max = 5;
  const auto p = shoot(s);
  const auto back = io::profile_from_json(io::profile_to_json(p));
  EXPECT_EQ(back.system().singular_weights(), std::vector<double>{2.0});
  expect_same(p, back);
}

TEST(ProfileJson, ShapeMismatchRejected) {
  const auto p = small_profile(SystemVariant::LiouvilleScalar, {1.0});
  auto j = io::profile_to_json(p);
  j["values"].push_back(j["values"][0]);
  EXPECT_THROW(io::profile_from_json(j), std::runtime_error);
  j = io::profile_to_json(p);
  j["spec"]["system"] = "nope";
  EXPECT_THROW(io::profile_from_json(j), std::runtime_error);
}

TEST(Series, TwoColumns) {
  std::stringstream ss;
  io::write_series(ss, {1.0, 0.1}, {4.0, 3.5});
  EXPECT_EQ(ss.str(), "1 4\n0.10000000000000001 3.5\n");
  EXPECT_THROW(io::write_series(ss, {1.0}, {}), std::invalid_argument);
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 2.0794415416798357, -1e-300, 6.02e23})
    EXPECT_EQ(std::stod(io::format_double(v)), v);
}
