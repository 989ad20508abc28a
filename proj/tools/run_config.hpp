#pragma once

// Parameter records for toda_lab subcommands. Each parameter has a JSON
// default; a --config file and then explicit flags override it, in that order.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace toda_lab {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kOutDirEnv = "TODA_LAB_OUTPUT_DIR";

// Bad flags or parameter values: exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Param {
  std::string name;  // JSON key; the flag is --name with '_' -> '-'
  json def;          // null means required
  std::string help;
  std::string alias = {};  // extra flag name, e.g. "--height"
};

inline std::string flag_of(const std::string& key) {
  std::string f = "--" + key;
  for (auto& c : f)
    if (c == '_') c = '-';
  return f;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline double parse_number(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError(flag_of(key) + ": '" + s + "' is not a number");
  }
  if (used != s.size()) throw UsageError(flag_of(key) + ": '" + s + "' is not a number");
  return v;
}

inline long long parse_integer(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw UsageError(flag_of(key) + ": '" + s + "' is not an integer");
  }
  if (used != s.size()) throw UsageError(flag_of(key) + ": '" + s + "' is not an integer");
  return v;
}

// Flag text -> JSON, typed after the default. Lists are comma separated and
// keep integer entries as integers.
inline json convert_flag(const Param& p, const std::string& text, json::value_t kind) {
  switch (kind) {
    case json::value_t::number_integer:
    case json::value_t::number_unsigned: return parse_integer(p.name, text);
    case json::value_t::number_float: return parse_number(p.name, text);
    case json::value_t::boolean:
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw UsageError(flag_of(p.name) + ": expected true or false");
    case json::value_t::string: return text;
    default: break;
  }
  json arr = json::array();
  if (text.empty()) return arr;
  for (const auto& item : split(text, ',')) {
    if (item.empty()) throw UsageError(flag_of(p.name) + ": empty list entry in '" + text + "'");
    if (item.find_first_not_of("+-0123456789") == std::string::npos) arr.push_back(parse_integer(p.name, item));
    else arr.push_back(parse_number(p.name, item));
  }
  return arr;
}

class ParamSet {
 public:
  ParamSet(std::string command, std::vector<Param> params, std::map<std::string, json::value_t> null_kinds = {})
      : command_(std::move(command)), params_(std::move(params)), null_kinds_(std::move(null_kinds)) {}

  void attach(CLI::App* app) {
    for (const auto& p : params_) {
      std::string names = flag_of(p.name);
      if (!p.alias.empty()) names += "," + p.alias;
      std::string help = p.help;
      if (!p.def.is_null()) help += " [default " + p.def.dump() + "]";
      else help += " [required]";
      options_[p.name] = app->add_option(names, raw_[p.name], help)->allow_extra_args(false);
    }
  }

  const std::string& command() const { return command_; }

  // defaults <- config file <- flags
  json resolve(const json& file_config) const {
    json out = json::object();
    for (const auto& p : params_) out[p.name] = p.def;
    if (!file_config.is_null()) {
      const auto& params = file_config.contains("params") ? file_config.at("params") : json::object();
      for (auto it = params.begin(); it != params.end(); ++it) {
        if (!out.contains(it.key())) throw UsageError("config: unknown parameter '" + it.key() + "' for " + command_);
        out[it.key()] = it.value();
      }
    }
    for (const auto& p : params_) {
      const auto* opt = options_.at(p.name);
      if (opt->count() == 0) continue;
      auto kind = p.def.type();
      if (p.def.is_null()) {
        auto k = null_kinds_.find(p.name);
        kind = k == null_kinds_.end() ? json::value_t::array : k->second;
      }
      out[p.name] = convert_flag(p, raw_.at(p.name), kind);
    }
    return out;
  }

  void require_all(const json& resolved) const {
    for (const auto& p : params_)
      if (resolved.at(p.name).is_null()) throw UsageError("missing required parameter " + flag_of(p.name));
  }

 private:
  std::string command_;
  std::vector<Param> params_;
  std::map<std::string, json::value_t> null_kinds_;
  std::map<std::string, std::string> raw_;
  std::map<std::string, CLI::Option*> options_;
};

inline json load_config_file(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  if (j.value("schema_version", 0) != kSchemaVersion)
    throw UsageError("config file schema_version must be " + std::to_string(kSchemaVersion));
  if (j.contains("command") && j.at("command") != command)
    throw UsageError("config file is for '" + j.at("command").get<std::string>() + "', not '" + command + "'");
  return j;
}

inline json run_config(const std::string& command, const json& params) {
  return json{{"schema_version", kSchemaVersion}, {"command", command}, {"params", params}};
}

// Typed accessors; a wrong JSON type is a usage error.
template <class T>
T get(const json& cfg, const std::string& key) {
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError("parameter " + flag_of(key) + " has the wrong type: " + cfg.at(key).dump());
  }
}

inline std::filesystem::path output_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return ".";
}

// Relative paths land in the output directory; absolute ones are kept.
inline std::filesystem::path output_path(const std::filesystem::path& dir, const std::string& requested,
                                         const std::string& fallback) {
  std::filesystem::path p = requested.empty() ? std::filesystem::path(fallback) : std::filesystem::path(requested);
  if (p.is_relative()) p = dir / p;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  return p;
}

}  // namespace toda_lab
