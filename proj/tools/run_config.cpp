#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "bbmlab/report.hpp"
#include "json.hpp"

namespace bbmcli {

using nlohmann::json;

namespace {

const std::vector<std::string> kGammaRules{"matched", "printed", "printed-alt"};

std::vector<KeySpec> make_registry() {
  using K = KeyKind;
  return {
      {"grid.L", K::number, "60", "--grid-L", "half length of the line grid used for profiles"},
      {"grid.n", K::integer, "4096", "--grid-n", "points on the line grid"},
      {"identities.tol", K::number, "1e-7", "--tol", "relative tolerance of each identity"},

      {"coeffs.lambda", K::number, "0.5", "--lambda", "lambda in [0, 1); 0 evaluates the closed forms only"},
      {"coeffs.sweep", K::boolean, "false", "--sweep", "tabulate lambda_min..lambda_max instead of one lambda"},
      {"coeffs.lambda_min", K::number, "0", "--lambda-min", "first lambda of the sweep"},
      {"coeffs.lambda_max", K::number, "0.9", "--lambda-max", "last lambda of the sweep"},
      {"coeffs.points", K::integer, "10", "--points", "evenly spaced lambdas in the sweep"},
      {"coeffs.gamma_rule", K::text, "matched", "--gamma-rule", "level-3 gamma constants", kGammaRules},
      {"coeffs.b20_tol", K::number, "1e-5", "--b20-tol", "relative tolerance, numeric b20 against q(lambda)"},

      {"profiles.lambda", K::number, "0.5", "--lambda", "lambda in (0, 1)"},
      {"profiles.stride", K::integer, "16", "--stride", "write every stride-th grid point"},
      {"profiles.gamma_rule", K::text, "matched", "--gamma-rule", "level-3 gamma constants", kGammaRules},
      {"profiles.residual_tol", K::number, "1e-6", "--residual-tol", "bound on the (1,0) system residuals"},

      {"scan.lambda", K::number, "0.5", "--lambda", "lambda in (0, 1)"},
      {"scan.sigma_min", K::number, "0.02", "--sigma-min", "smallest sigma"},
      {"scan.sigma_max", K::number, "0.2", "--sigma-max", "largest sigma"},
      {"scan.points", K::integer, "6", "--points", "log-spaced sigmas"},
      {"scan.variant", K::text, "both", "--variant", "which residual slopes to fit", {"z", "z-sharp", "both"}},
      {"scan.endpoints", K::boolean, "true", "--endpoints", "also measure the decompositions at +-tau"},
      {"scan.gamma_rule", K::text, "matched", "--gamma-rule", "level-3 gamma constants", kGammaRules},
      {"scan.z_min_slope", K::number, "3.4", "--z-min-slope", "least acceptable sigma-exponent of ||S(z)||"},
      {"scan.zs_min_slope", K::number, "2.7", "--zs-min-slope", "least acceptable sigma-exponent of ||S(z#)||"},

      {"simulate.c", K::number, "2", "--c", "soliton speed"},
      {"simulate.x0", K::number, "-20", "--x0", "initial center"},
      {"simulate.L", K::number, "100", "--L", "half length of the periodic grid"},
      {"simulate.n", K::integer, "2048", "--n", "grid points"},
      {"simulate.dt", K::number, "0.01", "--dt", "time step"},
      {"simulate.t_end", K::number, "20", "--t-end", "final time"},
      {"simulate.frame_speed", K::number, "0", "--frame-speed", "speed of the computational frame"},
      {"simulate.dealias", K::boolean, "false", "--dealias", "2/3 rule on u^2"},
      {"simulate.conv_dt", K::number, "0.2", "--conv-dt", "largest step of the convergence ladder"},
      {"simulate.conv_levels", K::integer, "4", "--conv-levels", "steps in the ladder, each half the previous"},
      {"simulate.error_tol", K::number, "1e-5", "--error-tol", "bound on the relative H1 error"},
      {"simulate.drift_tol", K::number, "1e-8", "--drift-tol", "bound on the relative N and E drift"},
      {"simulate.order_tol", K::number, "0.2", "--order-tol", "allowed relative deviation of the order from 4"},

      {"collide.c1", K::number, "2", "--c1", "speed of the big wave"},
      {"collide.c2", K::number, "1.1", "--c2", "speed of the small wave, 1 < c2 < c1"},
      {"collide.mode", K::text, "sum", "--mode", "initial data: separated sum or v(-T)", {"sum", "approx"}},
      {"collide.separation", K::number, "0", "--separation", "initial distance, 0: from overlap_tol"},
      {"collide.overlap_tol", K::number, "1e-12", "--overlap-tol", "bound on int phi_c1 phi_c2 at the start"},
      {"collide.t_multiplier", K::number, "1", "--t-multiplier", "approx mode starts at -t_multiplier T"},
      {"collide.h", K::number, "0.35", "--spacing", "largest grid spacing"},
      {"collide.L", K::number, "0", "--L", "half length, 0: sized from the run"},
      {"collide.dt_collision", K::number, "0.005", "--dt-collision", "step until the big wave is removed"},
      {"collide.dt", K::number, "0.025", "--dt", "step afterwards"},
      {"collide.separation_widths", K::number, "30", "--separation-widths",
       "small-wave widths between the waves when the big one is removed"},
      {"collide.cut_clearance", K::number, "8", "--cut-clearance",
       "small-wave widths between the small wave and the cut at the end"},
      {"collide.radiation_speed", K::number, "1.2", "--radiation-speed", "radiation speed used to size the domain"},
      {"collide.fit_window", K::number, "30", "--fit-window", "half fit window in widths of the fitted wave"},
      {"collide.sample_dt", K::number, "2", "--sample-dt", "time between fits"},
      {"collide.late_samples", K::integer, "4", "--late-samples", "residue samples late in the run"},
      {"collide.refine", K::boolean, "false", "--refine", "rerun with halved steps to measure the noise floor"},
      {"collide.dealias", K::boolean, "false", "--dealias", "2/3 rule on u^2"},
      {"collide.trace", K::boolean, "true", "--trace", "include the fit trace in the JSON report"},

      {"scaling.c2_list", K::list, "1.03,1.0405,1.0548,1.074,1.1", "--c2-list", "small-wave speeds of the sweep"},
  };
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string json_scalar(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return bbm::fmt(v.get<double>());
  if (v.is_array()) {
    std::string out;
    for (auto& e : v) {
      if (!e.is_number()) throw UsageError(key + ": list entries must be numbers");
      if (!out.empty()) out += ',';
      out += bbm::fmt(e.get<double>());
    }
    return out;
  }
  throw UsageError(key + ": unsupported JSON value");
}

}  // namespace

const std::vector<KeySpec>& key_registry() {
  static const std::vector<KeySpec> r = make_registry();
  return r;
}

const KeySpec* find_key(const std::string& key) {
  for (auto& k : key_registry())
    if (k.key == key) return &k;
  return nullptr;
}

std::vector<const KeySpec*> keys_for(const std::vector<std::string>& sections) {
  std::vector<const KeySpec*> out;
  for (auto& k : key_registry()) {
    std::string sec = k.key.substr(0, k.key.find('.'));
    if (std::find(sections.begin(), sections.end(), sec) != sections.end()) out.push_back(&k);
  }
  return out;
}

std::string describe_keys(const std::vector<const KeySpec*>& keys) {
  size_t w = 0;
  for (auto* k : keys) w = std::max(w, k->key.size() + 3 + k->def.size());
  std::string out;
  for (auto* k : keys) {
    std::string head = k->key + " = " + k->def;
    out += "  " + head + std::string(w + 2 - head.size(), ' ') + k->help;
    if (!k->choices.empty()) {
      out += " (";
      for (size_t i = 0; i < k->choices.size(); ++i) out += (i ? "|" : "") + k->choices[i];
      out += ")";
    }
    out += "  [" + k->flag + "]\n";
  }
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  std::string t = trim(s);
  double v = 0.0;
  auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
    throw UsageError(what + ": '" + s + "' is not a number");
  return v;
}

long parse_integer(const std::string& s, const std::string& what) {
  std::string t = trim(s);
  long v = 0;
  auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
    throw UsageError(what + ": '" + s + "' is not an integer");
  return v;
}

bool parse_boolean(const std::string& s, const std::string& what) {
  std::string t = trim(s);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw UsageError(what + ": '" + s + "' is not a boolean");
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_number(item, what));
  if (out.empty()) throw UsageError(what + ": empty list");
  return out;
}

RunConfig::RunConfig() {
  for (auto& k : key_registry()) values_[k.key] = k.def;
}

const KeySpec& RunConfig::spec(const std::string& key) const {
  const KeySpec* k = find_key(key);
  if (!k) throw UsageError("unknown config key '" + key + "' (see --help for the list)");
  return *k;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const KeySpec& k = spec(key);
  std::string v = trim(value);
  switch (k.kind) {
    case KeyKind::number: parse_number(v, key); break;
    case KeyKind::integer: parse_integer(v, key); break;
    case KeyKind::boolean: v = parse_boolean(v, key) ? "true" : "false"; break;
    case KeyKind::list: parse_list(v, key); break;
    case KeyKind::text:
      if (!k.choices.empty() && std::find(k.choices.begin(), k.choices.end(), v) == k.choices.end())
        throw UsageError(key + ": '" + v + "' is not one of the allowed values");
      break;
  }
  values_[key] = v;
}

void RunConfig::set_assignment(const std::string& kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos) throw UsageError("expected key=value, got '" + kv + "'");
  set(trim(kv.substr(0, eq)), kv.substr(eq + 1));
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0)
    load_json(ss.str(), path);
  else
    load_text(ss.str(), path);
}

void RunConfig::load_text(const std::string& text, const std::string& origin) {
  std::stringstream ss(text);
  std::string section;
  int lineno = 0;
  for (std::string line; std::getline(ss, line);) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (t.front() == '[') {
      if (t.back() != ']') throw UsageError(where + ": unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError(where + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
    try {
      set(key, t.substr(eq + 1));
    } catch (const UsageError& e) {
      throw UsageError(where + ": " + e.what());
    }
  }
}

void RunConfig::load_json(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError(origin + ": the top level must be an object");
  for (auto& [name, v] : j.items()) {
    if (v.is_object()) {
      for (auto& [sub, w] : v.items()) set(name + "." + sub, json_scalar(w, name + "." + sub));
    } else {
      set(name, json_scalar(v, name));
    }
  }
}

const std::string& RunConfig::raw(const std::string& key) const {
  spec(key);
  return values_.at(key);
}

double RunConfig::number(const std::string& key) const { return parse_number(raw(key), key); }

int RunConfig::integer(const std::string& key) const { return static_cast<int>(parse_integer(raw(key), key)); }

bool RunConfig::boolean(const std::string& key) const { return parse_boolean(raw(key), key); }

const std::string& RunConfig::text(const std::string& key) const { return raw(key); }

std::vector<double> RunConfig::list(const std::string& key) const { return parse_list(raw(key), key); }

std::string RunConfig::resolved_json() const {
  json j = json::object();
  for (auto& k : key_registry()) {
    auto dot = k.key.find('.');
    const std::string sec = k.key.substr(0, dot), name = k.key.substr(dot + 1);
    const std::string& v = values_.at(k.key);
    switch (k.kind) {
      case KeyKind::number: j[sec][name] = parse_number(v, k.key); break;
      case KeyKind::integer: j[sec][name] = parse_integer(v, k.key); break;
      case KeyKind::boolean: j[sec][name] = parse_boolean(v, k.key); break;
      case KeyKind::list: j[sec][name] = parse_list(v, k.key); break;
      case KeyKind::text: j[sec][name] = v; break;
    }
  }
  return j.dump();
}

std::string RunConfig::resolved_text() const {
  std::string out, section;
  for (auto& k : key_registry()) {
    auto dot = k.key.find('.');
    std::string sec = k.key.substr(0, dot);
    if (sec != section) {
      out += (out.empty() ? "[" : "\n[") + sec + "]\n";
      section = sec;
    }
    out += k.key.substr(dot + 1) + " = " + values_.at(k.key) + "\n";
  }
  return out;
}

}  // namespace bbmcli
