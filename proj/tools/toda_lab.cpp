// toda_lab: spectra, radial shots, mass targeting and bubble reports.
//
// Exit status: 0 success, 1 domain failure, 2 usage error.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "run_config.hpp"
#include "toda/io.hpp"
#include "toda/toda.hpp"

namespace fs = std::filesystem;
using namespace toda;
using namespace toda_lab;

namespace {

constexpr int kOk = 0;
constexpr int kDomain = 1;
constexpr int kUsage = 2;

struct Context {
  bool json_out = false;
  fs::path out_dir;
  unsigned threads = 1;
};

struct Outcome {
  int status = kOk;
  json doc;
  std::string text;
};

Outcome finish(int status, const std::string& state, json doc, std::string text) {
  doc["status"] = state;
  doc["exit_code"] = status;
  return {status, std::move(doc), std::move(text)};
}

// Runs f(0..n-1) on a pool of worker threads; results come back in input order.
template <class F>
auto run_pool(std::size_t n, unsigned threads, F f) {
  using R = decltype(f(std::size_t{}));
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto t = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < t; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  std::vector<R> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

std::string fmt(double v, int prec = 10) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

std::string fmt_list(const std::vector<double>& v, int prec = 10) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i], prec);
  return s + ")";
}

std::string fmt_triple(const MeasuredTriple& t, int prec = 8) { return fmt_list({t[0], t[1], t[2]}, prec); }

SystemVariant system_param(const json& cfg) {
  const auto name = get<std::string>(cfg, "system");
  const auto v = parse_system(name);
  if (!v) throw UsageError("unknown system '" + name + "' (liouville, sinh-gordon, su3, limitpair, tzitzeica, su4)");
  return *v;
}

Su4Form su4_form_param(const json& cfg) {
  const auto f = get<std::string>(cfg, "su4_form");
  if (f == "printed") return Su4Form::Printed;
  if (f == "derived") return Su4Form::RadialDerived;
  throw UsageError("--su4-form must be printed or derived");
}

Mass bound_param(const json& cfg) {
  const auto b = get<long long>(cfg, "bound");
  if (b < 0) throw UsageError("--bound must be nonnegative");
  return b;
}

std::string stem_of(const std::string& out, const std::string& fallback) {
  if (out.empty()) return fallback;
  fs::path p(out);
  return p.has_extension() ? (p.parent_path() / p.stem()).string() : out;
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << body;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::string config_comment(const json& config) { return "# toda_lab " + config.dump() + "\n"; }

void write_series_file(const fs::path& path, const json& config, const std::vector<double>& x,
                       const std::vector<double>& y) {
  std::ostringstream os;
  os << config_comment(config);
  io::write_series(os, x, y);
  write_text(path, os.str());
}

// r against L_k·u + 2 log r on the profile grid
std::vector<double> witness_series(const RadialProfile& p, std::size_t k) {
  std::vector<double> w(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) w[j] = p.channel_exponent(k, j) + 2.0 * std::log(p.grid[j]);
  return w;
}

// ---------------------------------------------------------------------------
// spectrum

Outcome cmd_enumerate(const json& cfg, const json& config, const Context& ctx) {
  const auto variant = get<std::string>(cfg, "variant");
  const auto bound = bound_param(cfg);
  SpectrumSet s;
  if (variant == "su3") s = enumerate_su3(bound);
  else if (variant == "su4") s = enumerate_su4(bound, su4_form_param(cfg));
  else throw UsageError("--variant must be su3 or su4");

  const auto path = output_path(ctx.out_dir, get<std::string>(cfg, "out"),
                                "spectrum_" + variant + "_" + std::to_string(bound) + ".txt");
  std::ostringstream os;
  os << config_comment(config);
  io::write_spectrum_text(os, s);
  write_text(path, os.str());

  json doc = io::spectrum_to_json(s);
  doc["file"] = path.string();
  std::ostringstream text;
  text << s.size() << " members of V(" << bound << ") [" << variant << "] written to " << path.string() << "\n";
  return finish(kOk, "ok", std::move(doc), text.str());
}

Outcome cmd_check(const json& cfg, const json&, const Context&) {
  const auto& raw = cfg.at("triple");
  if (!raw.is_array() || raw.size() != 3) throw UsageError("--triple needs three comma-separated integers");
  Mass v[3];
  for (int i = 0; i < 3; ++i) {
    if (!raw[i].is_number_integer()) throw UsageError("--triple entries must be integers: " + raw.dump());
    v[i] = raw[i].get<Mass>();
    if (v[i] < 0) throw UsageError("--triple entries must be nonnegative");
  }
  const MassTriple t{v[0], v[1], v[2]};
  const auto variant = get<std::string>(cfg, "variant");

  json doc{{"triple", io::triple_json(t)}, {"variant", variant}};
  std::ostringstream text;
  bool member = false;
  if (variant == "su3") {
    const auto idx = membership_su3(t);
    member = idx.has_value();
    const auto res = pohozaev_residual_su3(t);
    doc["member"] = member;
    doc["residual"] = res;
    doc["sum_mod_4"] = (t.s1 + t.s2 + t.s3) % 4;
    doc["m"] = idx ? json::array({idx->m1, idx->m2}) : json(nullptr);
    text << t << (member ? " is a member of V" : " is not a member of V") << "\n";
    if (idx) text << "  m = " << *idx << "\n";
    text << "  residual (s1-s3)^2+(s2-s3)^2-4(s1+s2+2s3) = " << res << "\n";
    text << "  sum mod 4 = " << (t.s1 + t.s2 + t.s3) % 4 << "\n";
  } else if (variant == "su4") {
    const auto form = su4_form_param(cfg);
    member = membership_su4(t, form);
    const auto res = pohozaev_residual_su4(t, form);
    doc["member"] = member;
    doc["residual"] = res;
    doc["su4_form"] = get<std::string>(cfg, "su4_form");
    doc["sum_mod_4"] = (t.s1 + t.s2 + t.s3) % 4;
    text << t << (member ? " is a member" : " is not a member") << " of the SU(4) set ("
         << get<std::string>(cfg, "su4_form") << " form)\n";
    text << "  residual = " << res << "\n";
  } else {
    throw UsageError("--variant must be su3 or su4");
  }
  return finish(member ? kOk : kDomain, member ? "member" : "non_member", std::move(doc), text.str());
}

Outcome cmd_equiv(const json& cfg, const json&, const Context&) {
  const auto bound = bound_param(cfg);
  const auto brute = enumerate_su3_bruteforce(bound);
  const auto param = enumerate_su3_parametrized(bound);
  const bool agree = same_triples(brute, param);
  json doc{{"bound", bound}, {"agree", agree}, {"bruteforce_count", brute.size()}, {"parametrized_count", param.size()}};
  std::ostringstream text;
  text << "bound " << bound << ": brute force " << brute.size() << ", parametrized " << param.size() << " -> "
       << (agree ? "agree" : "DISAGREE") << "\n";
  return finish(agree ? kOk : kDomain, agree ? "agree" : "disagree", std::move(doc), text.str());
}

// ---------------------------------------------------------------------------
// shoot

SystemKind system_kind(const json& cfg) {
  const auto v = system_param(cfg);
  return SystemKind(v, get<std::vector<double>>(cfg, "weights"));
}

ShootSpec shoot_spec(const json& cfg, const SystemKind& kind, const std::vector<double>& heights) {
  if (heights.size() != kind.components())
    throw UsageError(std::string(system_name(kind.variant())) + " needs " + std::to_string(kind.components()) +
                     " heights, got " + std::to_string(heights.size()));
  auto s = make_shoot_spec(kind, heights);
  if (const double r0 = get<double>(cfg, "r_start"); r0 != 0.0) s.r_start = r0;
  s.r_max = get<double>(cfg, "r_max");
  s.rel_tol = get<double>(cfg, "rel_tol");
  s.abs_tol = get<double>(cfg, "abs_tol");
  s.samples_per_decade = get<int>(cfg, "samples_per_decade");
  s.blowup_cap = get<double>(cfg, "blowup_cap");
  const auto steps = get<long long>(cfg, "max_steps");
  if (steps <= 0) throw UsageError("--max-steps must be positive");
  s.max_steps = static_cast<std::size_t>(steps);
  s.validate();
  return s;
}

bool solver_failed(Termination t) {
  return t == Termination::NonFinite || t == Termination::Underflow || t == Termination::StepLimit;
}

struct ShotReport {
  json doc;
  std::string text;
  bool failed = false;
};

ShotReport report_shot(const RadialProfile& p, double threshold, double mass_tol) {
  MassTotals totals;
  const auto [cls, why] = classify_shot(p, mass_tol, threshold, &totals);
  const auto cv = max_constraint_violation(p);
  const double mv = max_mean_value_residual(p);
  ShotReport r;
  r.failed = solver_failed(p.termination);
  r.doc = json{{"system", std::string(system_name(p.system().variant()))},
               {"heights", p.spec.init_heights},
               {"weights", p.system().singular_weights()},
               {"termination", std::string(termination_name(p.termination))},
               {"r_end", p.r_back()},
               {"samples", p.size()},
               {"accepted_steps", p.accepted_steps},
               {"rejected_steps", p.rejected_steps},
               {"masses_at_end", totals.at_end},
               {"masses_total", totals.total},
               {"tail", totals.tail},
               {"tail_converged", totals.converged},
               {"decaying", cls == ShotClass::Under},
               {"classification", why},
               {"max_constraint_violation", cv ? json(*cv) : json(nullptr)},
               {"max_mean_value_residual", mv}};
  std::ostringstream t;
  t << "system      " << system_name(p.system().variant()) << "  heights " << fmt_list(p.spec.init_heights) << "\n"
    << "termination " << termination_name(p.termination) << " at r = " << fmt(p.r_back(), 6) << " (" << p.size()
    << " samples, " << p.accepted_steps << " steps)\n"
    << "sigma(r)    " << fmt_list(totals.at_end) << "\n"
    << "sigma total " << fmt_list(totals.total) << (totals.all_converged() ? "  tail converged" : "  tail open")
    << "\n"
    << "decaying    " << (cls == ShotClass::Under ? "yes" : "no") << " (" << why << ")\n"
    << "constraint  " << (cv ? fmt(*cv, 3) : std::string("n/a")) << "\n"
    << "mean value  " << fmt(mv, 3) << "\n";
  r.text = t.str();
  return r;
}

std::vector<fs::path> write_profile(const RadialProfile& p, const std::string& format, const fs::path& dir,
                                    const std::string& stem, const json& config) {
  if (format == "csv") {
    const auto path = output_path(dir, stem + ".csv", "");
    std::ostringstream os;
    io::write_profile_csv(os, p, config);
    write_text(path, os.str());
    return {path};
  }
  if (format == "json") {
    const auto path = output_path(dir, stem + ".json", "");
    write_text(path, io::profile_to_json(p, config).dump() + "\n");
    return {path};
  }
  std::vector<fs::path> files;
  for (std::size_t i = 0; i < p.components(); ++i) {
    files.push_back(output_path(dir, stem + "_u" + std::to_string(i + 1) + ".txt", ""));
    write_series_file(files.back(), config, p.grid, p.values[i]);
  }
  for (std::size_t k = 0; k < p.channels(); ++k) {
    files.push_back(output_path(dir, stem + "_sigma" + std::to_string(k + 1) + ".txt", ""));
    write_series_file(files.back(), config, p.grid, p.masses[k]);
    files.push_back(output_path(dir, stem + "_witness" + std::to_string(k + 1) + ".txt", ""));
    write_series_file(files.back(), config, p.grid, witness_series(p, k));
  }
  return files;
}

void check_format(const std::string& f) {
  if (f != "csv" && f != "json" && f != "series") throw UsageError("--format must be csv, json or series");
}

json paths_json(const std::vector<fs::path>& files) {
  json a = json::array();
  for (const auto& f : files) a.push_back(f.string());
  return a;
}

Outcome cmd_shoot(const json& cfg, const json& config, const Context& ctx) {
  const auto kind = system_kind(cfg);
  const auto base = get<std::vector<double>>(cfg, "heights");
  const auto format = get<std::string>(cfg, "format");
  check_format(format);
  const double threshold = get<double>(cfg, "threshold");
  const double mass_tol = get<double>(cfg, "mass_tol");
  if (!(threshold > 0.0)) throw UsageError("--threshold must be positive");
  if (!(mass_tol > 0.0)) throw UsageError("--mass-tol must be positive");
  const auto sweep = get<std::vector<double>>(cfg, "sweep");
  const auto comp = get<long long>(cfg, "sweep_component");
  if (!sweep.empty() && (comp < 1 || comp > static_cast<long long>(kind.components())))
    throw UsageError("--sweep-component out of range");

  // Every run is validated before any integration starts.
  std::vector<ShootSpec> specs;
  if (sweep.empty()) {
    specs.push_back(shoot_spec(cfg, kind, base));
  } else {
    for (double h : sweep) {
      auto hs = base;
      if (hs.size() == kind.components()) hs[comp - 1] = h;
      specs.push_back(shoot_spec(cfg, kind, hs));
    }
  }
  const auto stem = stem_of(get<std::string>(cfg, "out"), "shoot_" + std::string(system_name(kind.variant())));

  struct Run {
    ShotReport report;
    std::vector<fs::path> files;
  };
  auto runs = run_pool(specs.size(), ctx.threads, [&](std::size_t i) {
    const auto p = shoot(specs[i]);
    json cfg_i = config;
    std::string stem_i = stem;
    if (!sweep.empty()) {
      cfg_i["run"] = json{{"index", i}, {"heights", specs[i].init_heights}};
      stem_i += "_" + std::to_string(i);
    }
    Run r{report_shot(p, threshold, mass_tol), write_profile(p, format, ctx.out_dir, stem_i, cfg_i)};
    r.report.doc["files"] = paths_json(r.files);
    return r;
  });

  bool failed = false;
  json shots = json::array();
  std::string text;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    failed = failed || runs[i].report.failed;
    shots.push_back(runs[i].report.doc);
    if (runs.size() > 1) text += "[" + std::to_string(i) + "]\n";
    text += runs[i].report.text;
    for (const auto& f : runs[i].files) text += "wrote       " + f.string() + "\n";
  }
  json doc;
  if (sweep.empty()) doc = shots[0];
  else doc = json{{"sweep_component", comp}, {"shots", shots}};
  return finish(failed ? kDomain : kOk, failed ? "solver_failure" : "ok", std::move(doc), text);
}

// ---------------------------------------------------------------------------
// target

std::optional<double> triple_residual(SystemVariant v, const std::vector<double>& masses) {
  try {
    const auto t = embed_triple(v, masses);
    return triple_family(v) == TripleFamily::SU3 ? su3_residual(t) : su4_residual(t);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

json trace_json(const std::vector<ShotRecord>& trace) {
  json a = json::array();
  for (const auto& s : trace)
    a.push_back({{"free_height", s.free_height},
                 {"class", std::string(shot_class_name(s.cls))},
                 {"reason", s.reason},
                 {"masses", s.masses}});
  return a;
}

std::string trace_text(const std::vector<ShotRecord>& trace) {
  std::ostringstream os;
  for (const auto& s : trace)
    os << "  " << std::setw(18) << fmt(s.free_height, 12) << "  " << shot_class_name(s.cls) << "  " << s.reason
       << "\n";
  return os.str();
}

Outcome cmd_target(const json& cfg, const json& config, const Context& ctx) {
  const auto kind = system_kind(cfg);
  const auto anchor = get<double>(cfg, "anchor");
  const auto comp = get<long long>(cfg, "anchor_component");
  if (comp < 1 || comp > static_cast<long long>(kind.components()))
    throw UsageError("--anchor-component out of range");
  const auto bracket = get<std::vector<double>>(cfg, "bracket");
  if (bracket.size() != 2) throw UsageError("--bracket needs two comma-separated numbers lo,hi");
  const auto format = get<std::string>(cfg, "format");
  if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");
  const double tol = get<double>(cfg, "tol");

  TargetOptions opt;
  opt.r_max = get<double>(cfg, "r_max");
  opt.rel_tol = get<double>(cfg, "rel_tol");
  opt.abs_tol = get<double>(cfg, "abs_tol");
  opt.samples_per_decade = get<int>(cfg, "samples_per_decade");
  opt.detect_threshold = get<double>(cfg, "threshold");
  const auto iters = get<long long>(cfg, "max_iterations");
  if (iters <= 0) throw UsageError("--max-iterations must be positive");
  opt.max_iterations = static_cast<std::size_t>(iters);
  if (!(opt.detect_threshold > 0.0)) throw UsageError("--threshold must be positive");

  TargetResult res;
  try {
    res = find_decaying(kind, static_cast<std::size_t>(comp - 1), anchor, {bracket[0], bracket[1]}, tol, opt);
  } catch (const BracketError& e) {
    json doc{{"message", e.what()}, {"trace", trace_json(e.trace())}};
    std::string text = std::string("bracket failure: ") + e.what() + "\n";
    if (!e.trace().empty()) text += "trace (free height, class, reason):\n" + trace_text(e.trace());
    return finish(kDomain, "bracket_failure", std::move(doc), text);
  }

  const auto v = kind.variant();
  const auto residual = triple_residual(v, res.totals.total);
  const auto stem = stem_of(get<std::string>(cfg, "out"), "target_" + std::string(system_name(v)));
  const auto files = write_profile(res.profile, format, ctx.out_dir, stem, config);

  json doc{{"system", std::string(system_name(v))},
           {"init_heights", res.init_heights},
           {"iterations", res.iterations},
           {"degenerate", res.degenerate},
           {"masses_at_end", res.totals.at_end},
           {"masses_total", res.totals.total},
           {"tail_converged", res.totals.converged},
           {"pohozaev_residual", residual ? json(*residual) : json(nullptr)},
           {"trace", trace_json(res.trace)},
           {"files", paths_json(files)}};
  std::ostringstream text;
  text << "initial heights " << fmt_list(res.init_heights, 12) << " after " << res.iterations << " shots"
       << (res.degenerate ? " (whole bracket decays)" : "") << "\n"
       << "masses          " << fmt_list(res.totals.total) << "\n"
       << "pohozaev        " << (residual ? fmt(*residual, 4) : std::string("n/a")) << "\n";
  for (const auto& f : files) text << "wrote           " << f.string() << "\n";
  return finish(kOk, "ok", std::move(doc), text.str());
}

// ---------------------------------------------------------------------------
// bubble

RadialProfile load_profile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read base profile '" + path + "'");
  const auto ext = fs::path(path).extension().string();
  try {
    if (ext == ".json") return io::profile_from_json(json::parse(in));
    return io::read_profile_csv(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("base profile '" + path + "' is not a profile: " + e.what());
  }
}

Outcome cmd_bubble(const json& cfg, const json& config, const Context& ctx) {
  const auto base_path = get<std::string>(cfg, "base");
  const auto eps = get<std::vector<double>>(cfg, "eps");
  const double delta = get<double>(cfg, "delta");
  const double threshold = get<double>(cfg, "threshold");
  const auto bound = bound_param(cfg);
  const auto form = su4_form_param(cfg);
  const bool series = get<bool>(cfg, "series");
  auto deltas = get<std::vector<double>>(cfg, "sweep");
  const bool sweeping = !deltas.empty();
  if (!sweeping) deltas = {delta};
  if (!(threshold > 0.0)) throw UsageError("--threshold must be positive");
  if (eps.empty()) throw UsageError("--eps ladder is empty");
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (!(eps[i] > 0.0) || (i > 0 && !(eps[i] < eps[i - 1])))
      throw UsageError("--eps must be positive and strictly decreasing");
  for (double d : deltas)
    if (!(d > 0.0) || !std::isfinite(d)) throw UsageError("delta values must be positive");

  const auto base = load_profile(base_path);
  const auto family = triple_family(base.system().variant());
  const auto spectrum = family == TripleFamily::SU3 ? enumerate_su3(bound) : enumerate_su4(bound, form);
  const auto stem = stem_of(get<std::string>(cfg, "out"), fs::path(base_path).stem().string() + "_bubble");

  struct Run {
    BubbleReport rep;
    std::vector<fs::path> files;
  };
  auto runs = run_pool(deltas.size(), ctx.threads, [&](std::size_t i) {
    Run r{bubble_masses(base, eps, deltas[i], spectrum, threshold), {}};
    json cfg_i = config;
    std::string stem_i = stem;
    if (sweeping) {
      cfg_i["run"] = json{{"index", i}, {"delta", deltas[i]}};
      stem_i += "_" + std::to_string(i);
    }
    r.files.push_back(output_path(ctx.out_dir, stem_i + ".json", ""));
    write_text(r.files.back(), io::bubble_report_to_json(r.rep, cfg_i).dump(2) + "\n");
    if (series) {
      std::vector<double> ds, es;
      for (const auto& [d, t] : r.rep.delta_ladder) ds.push_back(d);
      for (const auto& [e, t] : r.rep.eps_table) es.push_back(e);
      for (int c = 0; c < 3; ++c) {
        std::vector<double> ys, ye;
        for (const auto& [d, t] : r.rep.delta_ladder) ys.push_back(t[c]);
        for (const auto& [e, t] : r.rep.eps_table) ye.push_back(t[c]);
        r.files.push_back(output_path(ctx.out_dir, stem_i + "_delta_sigma" + std::to_string(c + 1) + ".txt", ""));
        write_series_file(r.files.back(), cfg_i, ds, ys);
        r.files.push_back(output_path(ctx.out_dir, stem_i + "_eps_sigma" + std::to_string(c + 1) + ".txt", ""));
        write_series_file(r.files.back(), cfg_i, es, ye);
      }
      for (std::size_t k = 0; k < base.channels(); ++k) {
        r.files.push_back(output_path(ctx.out_dir, stem_i + "_witness" + std::to_string(k + 1) + ".txt", ""));
        write_series_file(r.files.back(), cfg_i, base.grid, witness_series(base, k));
      }
    }
    return r;
  });

  json reports = json::array();
  std::ostringstream text;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& rep = runs[i].rep;
    json d = io::bubble_report_to_json(rep);
    d["files"] = paths_json(runs[i].files);
    reports.push_back(std::move(d));
    if (runs.size() > 1) text << "[" << i << "] delta " << fmt(deltas[i]) << "\n";
    text << "measured    " << fmt_triple(rep.measured) << " at delta " << fmt(rep.delta_used, 6) << "\n"
         << "nearest     " << rep.nearest;
    if (rep.nearest_index) text << "  m = " << *rep.nearest_index;
    text << "  distance " << fmt(rep.distance, 4) << "\n"
         << "pohozaev    " << fmt(rep.pohozaev_residual, 4) << "\n"
         << "resolved    " << (rep.resolved ? "yes" : "no");
    if (rep.base_fast_decay_radius) text << " (base fast-decay radius " << fmt(*rep.base_fast_decay_radius, 6) << ")";
    text << "\n";
    for (const auto& f : runs[i].files) text << "wrote       " << f.string() << "\n";
  }
  json doc = sweeping ? json{{"reports", reports}} : reports[0];
  return finish(kOk, "ok", std::move(doc), text.str());
}

// ---------------------------------------------------------------------------

struct Command {
  std::string name;
  CLI::App* app = nullptr;
  ParamSet params;
  Outcome (*run)(const json&, const json&, const Context&);
};

const json kNoDefault = nullptr;

std::vector<Param> integration_params() {
  return {{"r_start", 0.0, "start radius; 0 picks one from the heights"},
          {"r_max", 1e6, "end radius"},
          {"rel_tol", 1e-10, "relative step tolerance"},
          {"abs_tol", 1e-12, "absolute step tolerance"}};
}

std::vector<Param> concat(std::vector<Param> a, const std::vector<Param>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial blow-up lab for Toda systems"};
  app.require_subcommand(1);
  app.fallthrough();

  bool json_out = false, print_config = false;
  std::string config_path, out_dir;
  unsigned threads = 0;
  app.add_flag("--json", json_out, "print one JSON document on stdout");
  app.add_option("--config", config_path, "JSON run config {schema_version, command, params}");
  app.add_flag("--print-config", print_config, "print the resolved config and exit");
  app.add_option("--out-dir", out_dir, std::string("output directory [default $") + kOutDirEnv + " or .]");
  app.add_option("--threads", threads, "worker threads for sweeps [default: hardware]");

  const std::map<std::string, json::value_t> strings{{"system", json::value_t::string},
                                                     {"base", json::value_t::string},
                                                     {"bound", json::value_t::number_integer},
                                                     {"anchor", json::value_t::number_float}};

  std::vector<Command> commands;
  auto* spectrum = app.add_subcommand("spectrum", "enumerate and check mass triples");
  spectrum->require_subcommand(1);
  spectrum->fallthrough();
  commands.push_back({"spectrum enumerate", spectrum->add_subcommand("enumerate", "write the set V(bound)"),
                      ParamSet("spectrum enumerate",
                               {{"variant", "su3", "su3 or su4"},
                                {"bound", kNoDefault, "largest triple sum"},
                                {"su4_form", "printed", "SU(4) quadratic form: printed or derived"},
                                {"out", "", "output file"}},
                               strings),
                      cmd_enumerate});
  commands.push_back({"spectrum check", spectrum->add_subcommand("check", "test one triple for membership"),
                      ParamSet("spectrum check",
                               {{"triple", kNoDefault, "s1,s2,s3"},
                                {"variant", "su3", "su3 or su4"},
                                {"su4_form", "printed", "SU(4) quadratic form: printed or derived"}},
                               strings),
                      cmd_check});
  commands.push_back({"spectrum equiv", spectrum->add_subcommand("equiv", "compare both SU(3) enumerations"),
                      ParamSet("spectrum equiv", {{"bound", kNoDefault, "largest triple sum"}}, strings), cmd_equiv});
  commands.push_back(
      {"shoot", app.add_subcommand("shoot", "integrate one radial shot or a sweep of them"),
       ParamSet("shoot",
                concat({{"system", kNoDefault, "liouville, sinh-gordon, su3, limitpair, tzitzeica or su4"},
                        {"heights", kNoDefault, "initial heights u_i(0), comma separated", "--height"},
                        {"weights", json::array(), "singular weights b_i at the origin"}},
                       concat(integration_params(),
                              {{"samples_per_decade", 50, "stored samples per decade of r"},
                               {"blowup_cap", 50.0, "stop when a component exceeds this"},
                               {"max_steps", 5000000, "integrator step limit"},
                               {"threshold", 10.0, "N in the fast-decay test L_k.u + 2 log r < -N"},
                               {"mass_tol", 1e-6, "relative tail size counted as converged"},
                               {"format", "csv", "csv, json or series"},
                               {"out", "", "output file or stem"},
                               {"sweep", json::array(), "values for one height component, one shot each"},
                               {"sweep_component", 1, "1-based component the sweep replaces"}})),
                strings),
       cmd_shoot});
  commands.push_back(
      {"target", app.add_subcommand("target", "bisect the free height for a decaying solution"),
       ParamSet("target",
                concat({{"system", "limitpair", "two-component or scalar system"},
                        {"anchor", kNoDefault, "fixed initial height"},
                        {"anchor_component", 1, "1-based component held at the anchor"},
                        {"bracket", kNoDefault, "lo,hi for the free height"},
                        {"tol", 1e-3, "bisection tolerance and tail tolerance"},
                        {"weights", json::array(), "singular weights b_i at the origin"}},
                       concat(integration_params(),
                              {{"samples_per_decade", 40, "stored samples per decade of r"},
                               {"threshold", 10.0, "N in the fast-decay test"},
                               {"max_iterations", 200, "shot limit"},
                               {"format", "json", "csv or json"},
                               {"out", "", "output file or stem"}})),
                strings),
       cmd_target});
  commands.push_back({"bubble", app.add_subcommand("bubble", "local masses of the rescaled sequence of a stored profile"),
                      ParamSet("bubble",
                               {{"base", kNoDefault, "stored profile (.csv or .json)"},
                                {"eps", json::array({1e-1, 1e-2, 1e-3, 1e-4}), "decreasing scales eps_k"},
                                {"delta", 0.1, "outer radius of the local mass"},
                                {"threshold", 10.0, "N in the fast-decay test"},
                                {"bound", 400, "spectrum bound for the nearest member"},
                                {"su4_form", "printed", "SU(4) quadratic form: printed or derived"},
                                {"series", true, "write two-column series files"},
                                {"out", "", "report file or stem"},
                                {"sweep", json::array(), "several delta values, one report each"}},
                               strings),
                      cmd_bubble});
  for (auto& c : commands) {
    c.params.attach(c.app);
    c.app->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "toda_lab: " << e.what() << "\nRun with --help for usage.\n";
    if (json_out) std::cout << json{{"status", "usage_error"}, {"exit_code", kUsage}, {"message", e.what()}}.dump(2) << "\n";
    return kUsage;
  }

  Command* cmd = nullptr;
  for (auto& c : commands)
    if (c.app->parsed()) cmd = &c;

  auto fail = [&](int status, const std::string& state, const std::string& msg) {
    std::cerr << "toda_lab: " << msg << "\n";
    if (json_out) std::cout << json{{"status", state}, {"exit_code", status}, {"message", msg}}.dump(2) << "\n";
    return status;
  };

  try {
    const json file = config_path.empty() ? json(nullptr) : load_config_file(config_path, cmd->name);
    const json params = cmd->params.resolve(file);
    const json config = run_config(cmd->name, params);
    if (print_config) {
      std::cout << config.dump(2) << "\n";
      return kOk;
    }
    cmd->params.require_all(params);

    Context ctx;
    ctx.json_out = json_out;
    ctx.out_dir = output_dir(out_dir);
    ctx.threads = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    const auto out = cmd->run(params, config, ctx);
    if (json_out) std::cout << out.doc.dump(2) << "\n";
    else std::cout << out.text;
    return out.status;
  } catch (const UsageError& e) {
    return fail(kUsage, "usage_error", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kUsage, "usage_error", e.what());
  } catch (const std::exception& e) {
    return fail(kDomain, "error", e.what());
  }
}
