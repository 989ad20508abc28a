#pragma once

// File formats:
//   spectrum text  "sigma1 sigma2 sigma3 [m1 m2]" per line, sorted
//   profile CSV    "# toda_lab <json config>" line, then header
//                  r,u1[,u2[,u3]],du1[,...],sigma1[,...] and rows at 17 digits
//   profile JSON   spec + arrays, round-trips exactly
//   bubble report  JSON
//   series         two whitespace-separated columns

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "toda/analysis.hpp"
#include "toda/ode_engine.hpp"
#include "toda/spectrum.hpp"

namespace toda::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Spectrum

inline void write_spectrum_text(std::ostream& os, const SpectrumSet& s) {
  for (const auto& m : s.members) {
    os << m.triple.s1 << ' ' << m.triple.s2 << ' ' << m.triple.s3;
    if (m.index) os << ' ' << m.index->m1 << ' ' << m.index->m2;
    os << '\n';
  }
}

inline SpectrumSet read_spectrum_text(std::istream& is, SpectrumVariant variant, Mass bound) {
  SpectrumSet s{variant, bound, {}};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<long long> v;
    long long x;
    while (ls >> x) v.push_back(x);
    if (!ls.eof() || (v.size() != 3 && v.size() != 5))
      throw std::runtime_error("malformed spectrum line " + std::to_string(lineno));
    SpectrumMember m{{v[0], v[1], v[2]}, std::nullopt};
    if (v.size() == 5) m.index = ParamIndex{v[3], v[4]};
    s.members.push_back(m);
  }
  return s;
}

inline json triple_json(const MassTriple& t) { return json::array({t.s1, t.s2, t.s3}); }
inline json triple_json(const MeasuredTriple& t) { return json::array({t[0], t[1], t[2]}); }

inline json spectrum_to_json(const SpectrumSet& s) {
  json members = json::array();
  for (const auto& m : s.members) {
    json e{{"sigma", triple_json(m.triple)}};
    if (m.index) e["m"] = json::array({m.index->m1, m.index->m2});
    members.push_back(std::move(e));
  }
  return json{{"schema_version", kSchemaVersion},
              {"variant", std::string(variant_name(s.variant))},
              {"bound", s.bound},
              {"count", s.members.size()},
              {"members", std::move(members)}};
}

// ---------------------------------------------------------------------------
// Shoot spec and profiles

inline json spec_to_json(const ShootSpec& s) {
  return json{{"system", std::string(system_name(s.system.variant()))},
              {"singular_weights", s.system.singular_weights()},
              {"init_heights", s.init_heights},
              {"r_start", s.r_start},
              {"r_max", s.r_max},
              {"rel_tol", s.rel_tol},
              {"abs_tol", s.abs_tol},
              {"samples_per_decade", s.samples_per_decade},
              {"blowup_cap", s.blowup_cap},
              {"max_steps", s.max_steps}};
}

inline ShootSpec spec_from_json(const json& j) {
  const auto name = j.at("system").get<std::string>();
  const auto v = parse_system(name);
  if (!v) throw std::runtime_error("unknown system '" + name + "'");
  ShootSpec s;
  s.system = SystemKind(*v, j.value("singular_weights", std::vector<double>{}));
  s.init_heights = j.at("init_heights").get<std::vector<double>>();
  s.r_start = j.at("r_start").get<double>();
  s.r_max = j.at("r_max").get<double>();
  s.rel_tol = j.value("rel_tol", s.rel_tol);
  s.abs_tol = j.value("abs_tol", s.abs_tol);
  s.samples_per_decade = j.value("samples_per_decade", s.samples_per_decade);
  s.blowup_cap = j.value("blowup_cap", s.blowup_cap);
  s.max_steps = j.value("max_steps", s.max_steps);
  return s;
}

inline json profile_to_json(const RadialProfile& p, const json& config = nullptr) {
  json j{{"schema_version", kSchemaVersion},
         {"spec", spec_to_json(p.spec)},
         {"scale", p.scale},
         {"termination", std::string(termination_name(p.termination))},
         {"accepted_steps", p.accepted_steps},
         {"rejected_steps", p.rejected_steps},
         {"grid", p.grid},
         {"values", p.values},
         {"derivs", p.derivs},
         {"masses", p.masses}};
  if (!config.is_null()) j["config"] = config;
  return j;
}

namespace detail {

inline void check_profile_shape(const RadialProfile& p) {
  const auto n = p.system().components();
  const auto K = p.system().channels();
  if (p.values.size() != n || p.derivs.size() != n || p.masses.size() != K)
    throw std::runtime_error("profile arrays do not match the system's component count");
  for (const auto* arr : {&p.values, &p.derivs, &p.masses})
    for (const auto& row : *arr)
      if (row.size() != p.grid.size()) throw std::runtime_error("profile array length mismatch");
  for (std::size_t j = 1; j < p.grid.size(); ++j)
    if (!(p.grid[j] > p.grid[j - 1])) throw std::runtime_error("profile grid is not strictly increasing");
}

inline Termination termination_from(const std::string& s) {
  auto t = parse_termination(s);
  if (!t) throw std::runtime_error("unknown termination '" + s + "'");
  return *t;
}

}  // namespace detail

inline RadialProfile profile_from_json(const json& j) {
  RadialProfile p;
  p.spec = spec_from_json(j.at("spec"));
  p.scale = j.value("scale", 1.0);
  p.termination = detail::termination_from(j.value("termination", std::string("reached_r_max")));
  p.accepted_steps = j.value("accepted_steps", std::size_t{0});
  p.rejected_steps = j.value("rejected_steps", std::size_t{0});
  p.grid = j.at("grid").get<std::vector<double>>();
  p.values = j.at("values").get<std::vector<std::vector<double>>>();
  p.derivs = j.at("derivs").get<std::vector<std::vector<double>>>();
  p.masses = j.at("masses").get<std::vector<std::vector<double>>>();
  detail::check_profile_shape(p);
  return p;
}

inline std::string profile_csv_header(const RadialProfile& p) {
  std::string h = "r";
  for (std::size_t i = 0; i < p.components(); ++i) h += ",u" + std::to_string(i + 1);
  for (std::size_t i = 0; i < p.components(); ++i) h += ",du" + std::to_string(i + 1);
  for (std::size_t k = 0; k < p.channels(); ++k) h += ",sigma" + std::to_string(k + 1);
  return h;
}

inline void write_profile_csv(std::ostream& os, const RadialProfile& p, const json& config = nullptr) {
  json meta{{"schema_version", kSchemaVersion},
            {"spec", spec_to_json(p.spec)},
            {"scale", p.scale},
            {"termination", std::string(termination_name(p.termination))}};
  if (!config.is_null()) meta["config"] = config;
  os << "# toda_lab " << meta.dump() << '\n';
  os << profile_csv_header(p) << '\n';
  for (std::size_t j = 0; j < p.size(); ++j) {
    os << format_double(p.grid[j]);
    for (const auto& c : p.values) os << ',' << format_double(c[j]);
    for (const auto& c : p.derivs) os << ',' << format_double(c[j]);
    for (const auto& c : p.masses) os << ',' << format_double(c[j]);
    os << '\n';
  }
}

inline RadialProfile read_profile_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# toda_lab ", 0) != 0)
    throw std::runtime_error("profile CSV lacks the '# toda_lab' metadata line");
  const json meta = json::parse(line.substr(11));
  RadialProfile p;
  p.spec = spec_from_json(meta.at("spec"));
  p.scale = meta.value("scale", 1.0);
  p.termination = detail::termination_from(meta.value("termination", std::string("reached_r_max")));
  const auto n = p.system().components();
  const auto K = p.system().channels();
  p.values.assign(n, {});
  p.derivs.assign(n, {});
  p.masses.assign(K, {});
  if (!std::getline(is, line) || line != profile_csv_header(p))
    throw std::runtime_error("profile CSV header does not match its system");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != 1 + 2 * n + K) throw std::runtime_error("profile CSV row has the wrong column count");
    p.grid.push_back(row[0]);
    for (std::size_t i = 0; i < n; ++i) p.values[i].push_back(row[1 + i]);
    for (std::size_t i = 0; i < n; ++i) p.derivs[i].push_back(row[1 + n + i]);
    for (std::size_t k = 0; k < K; ++k) p.masses[k].push_back(row[1 + 2 * n + k]);
  }
  detail::check_profile_shape(p);
  return p;
}

// ---------------------------------------------------------------------------
// Bubble report and series

inline json bubble_report_to_json(const BubbleReport& r, const json& config = nullptr) {
  json eps = json::array();
  for (const auto& [e, t] : r.eps_table) eps.push_back({{"eps", e}, {"sigma", triple_json(t)}});
  json ladder = json::array();
  for (const auto& [d, t] : r.delta_ladder) ladder.push_back({{"delta", d}, {"sigma", triple_json(t)}});
  json nearest{{"sigma", triple_json(r.nearest)}};
  if (r.nearest_index) nearest["m"] = json::array({r.nearest_index->m1, r.nearest_index->m2});
  json j{{"schema_version", kSchemaVersion},
         {"measured", triple_json(r.measured)},
         {"nearest", std::move(nearest)},
         {"distance", r.distance},
         {"pohozaev_residual", r.pohozaev_residual},
         {"delta_used", r.delta_used},
         {"resolved", r.resolved},
         {"base_fast_decay_radius", r.base_fast_decay_radius ? json(*r.base_fast_decay_radius) : json(nullptr)},
         {"eps_table", std::move(eps)},
         {"delta_ladder", std::move(ladder)}};
  if (!config.is_null()) j["config"] = config;
  return j;
}

inline void write_series(std::ostream& os, const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("series columns differ in length");
  for (std::size_t i = 0; i < x.size(); ++i) os << format_double(x[i]) << ' ' << format_double(y[i]) << '\n';
}

}  // namespace toda::io
