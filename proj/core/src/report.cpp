#include "bbmlab/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#ifndef BBMLAB_VERSION
#define BBMLAB_VERSION "0.0.0"
#endif
#ifndef BBMLAB_GIT_HASH
#define BBMLAB_GIT_HASH "unknown"
#endif

namespace bbm {

using nlohmann::json;

const char* library_version() { return BBMLAB_VERSION; }
const char* version_hash() { return BBMLAB_GIT_HASH; }

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string csv_escape(const std::string& f) {
  if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

CsvTable::CsvTable(std::vector<std::string> columns) : cols_(std::move(columns)) {}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != cols_.size()) throw std::invalid_argument("CSV row width does not match the header");
  rows_.push_back(std::move(row));
}

void CsvTable::add_numbers(const std::vector<double>& row) {
  std::vector<std::string> s;
  for (double x : row) s.push_back(fmt(x));
  add(std::move(s));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& r) {
    for (size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(r[i]);
    }
    out += "\r\n";
  };
  line(cols_);
  for (auto& r : rows_) line(r);
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << content;
  if (!f) throw std::runtime_error("write to " + path + " failed");
}

namespace {

// JSON has no inf/nan; they go out as null
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json cfg_json(const ExperimentConfig& c) {
  return {{"c1", c.c1},
          {"c2", c.c2},
          {"initial_mode", to_string(c.initial_mode)},
          {"separation", c.separation},
          {"overlap_tol", c.overlap_tol},
          {"t_multiplier", c.t_multiplier},
          {"h", c.h},
          {"L", c.L},
          {"dt_collision", c.dt_collision},
          {"dt", c.dt},
          {"separation_widths", c.separation_widths},
          {"cut_clearance", c.cut_clearance},
          {"radiation_speed", c.radiation_speed},
          {"fit_window_width", c.fit_window_width},
          {"sample_dt", c.sample_dt},
          {"late_samples", c.late_samples},
          {"refine_check", c.refine_check},
          {"dealias", c.dealias}};
}

json norms_json(const ResidueNorms& r) {
  return {{"t", r.t},
          {"cut", r.cut},
          {"behind", {{"H1", num(r.behind_h1)}, {"H1_c2", num(r.behind_h1_c2)}, {"L2", num(r.behind_l2)},
                      {"dx_L2", num(r.behind_dx_l2)}}},
          {"ahead", {{"H1", num(r.ahead_h1)}, {"H1_c2", num(r.ahead_h1_c2)}, {"L2", num(r.ahead_l2)}}},
          {"functional", num(r.functional)}};
}

json report_json(const CollisionReport& r, bool with_trace) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = cfg_json(r.config);
  j["grid"] = {{"L", r.grid.L}, {"n", r.grid.n}, {"kind", "periodic"}};
  j["frame_speed"] = r.frame_speed;
  j["t_collision"] = num(r.t_collision);
  j["x_collision"] = num(r.x_collision);
  j["t_removal"] = r.t_removal;
  j["t_final"] = r.t_final;
  j["c1_in"] = num(r.c1_in);
  j["c2_in"] = num(r.c2_in);
  j["c1_plus"] = num(r.c1_plus);
  j["c2_plus"] = num(r.c2_plus);
  j["delta_c1"] = num(r.delta_c1);
  j["delta_c2"] = num(r.delta_c2);
  j["delta_c1_vs_in"] = num(r.delta_c1_vs_in);
  j["delta_c2_vs_in"] = num(r.delta_c2_vs_in);
  json rn = json::array();
  for (auto& n : r.residue_norms) rn.push_back(norms_json(n));
  j["residue_norms"] = rn;
  j["residue_stability"] = num(r.residue_stability);
  j["ahead_decay"] = num(r.ahead_decay);
  j["shift_meas"] = {{"Delta1", num(r.shift1)}, {"Delta2", num(r.shift2)}};
  j["shift_leading"] = {{"Delta1", r.shift_leading.Delta1},
                        {"Delta2", r.shift_leading.Delta2},
                        {"Delta2_delta_sigma", r.shift_leading.Delta2_delta_sigma}};
  j["budget_check"] = {{"c1_ratio", num(r.budget1)}, {"c2_ratio", num(r.budget2)}};
  json ds = json::array();
  for (auto& s : r.diagnostics.samples) ds.push_back({{"t", s.t}, {"m", s.m}, {"N1", num(s.N1)}, {"G", num(s.G)}});
  j["diagnostics"] = {{"kappa", r.diagnostics.kappa},
                      {"a2", num(r.diagnostics.a2)},
                      {"N1_max_increase", num(r.diagnostics.n1_max_increase)},
                      {"G_back_drop", num(r.diagnostics.g_back_drop)},
                      {"G_T_minus_T0", num(r.diagnostics.g_T_minus_T0)},
                      {"samples", ds}};
  j["drift"] = {{"N", num(r.drift_N)}, {"E", num(r.drift_E)}};
  j["noise_floor"] = num(r.noise_floor);
  j["residue_detected"] = r.residue_detected;
  if (r.refined)
    j["refine"] = {{"H1_change", num(r.refine_change_h1)},
                   {"delta_c1_change", num(r.refine_change_dc1)},
                   {"delta_c2_change", num(r.refine_change_dc2)}};
  j["initial_overlap"] = num(r.initial_overlap);
  j["wall_seconds"] = r.wall_seconds;
  if (with_trace) {
    json tr = json::array();
    for (auto& p : r.trace) {
      json q = {{"t", p.t}, {"N", p.N}, {"E", p.E}};
      if (p.has1) q["rho1"] = p.rho1, q["c1"] = p.c1;
      if (p.has2) q["rho2"] = p.rho2, q["c2"] = p.c2;
      tr.push_back(q);
    }
    j["trace"] = tr;
  }
  return j;
}

json fit_json(const ExponentFit& f) {
  return {{"name", f.name}, {"exponent", num(f.exponent)}, {"ci95", {num(f.lo), num(f.hi)}},
          {"prefactor", num(f.prefactor)}, {"points", f.points}};
}

}  // namespace

std::string to_json(const CollisionReport& r, bool with_trace) { return report_json(r, with_trace).dump(2); }

std::string to_json(const ExperimentConfig& c) { return cfg_json(c).dump(2); }

std::string to_json(const ScalingStudy& s) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["c1"] = s.c1;
  j["eps"] = s.eps;
  j["fits"] = {fit_json(s.residue), fit_json(s.dc1), fit_json(s.dc2)};
  j["monotone_dc1"] = s.monotone_dc1;
  j["monotone_dc2"] = s.monotone_dc2;
  j["budget1_band"] = num(s.budget1_band);
  j["budget2_band"] = num(s.budget2_band);
  json runs = json::array();
  for (auto& r : s.runs) runs.push_back(report_json(r, false));
  j["runs"] = runs;
  return j.dump(2);
}

std::string to_json(const ScanPoint& p) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["lambda"] = p.lambda;
  j["sigma"] = p.sigma;
  j["norm_S"] = num(p.norm_S);
  j["norm_S_sharp"] = num(p.norm_S_sharp);
  j["norm_diff"] = num(p.norm_diff);
  j["norm_fu_removed"] = num(p.norm_fu_removed);
  j["norm_E"] = num(p.norm_E);
  j["alpha_sup"] = num(p.alpha_sup);
  j["alpha_p_sup"] = num(p.alpha_p_sup);
  j["times"] = p.times;
  j["S_at"] = p.S_at;
  j["S_sharp_at"] = p.S_sharp_at;
  const auto& e = p.endpoints;
  j["endpoints"] = {{"time", e.time},         {"z_plus", num(e.z_plus)},
                    {"z_minus", num(e.z_minus)}, {"z_plus_no_d", num(e.z_plus_no_d)},
                    {"zs_plus", num(e.zs_plus)}, {"zs_minus", num(e.zs_minus)},
                    {"zs_minus_with_d", num(e.zs_minus_with_d)}};
  const auto& s = p.shifts;
  j["shifts"] = {{"delta", s.delta}, {"delta_sigma", s.delta_sigma}, {"Delta1", s.Delta1},
                 {"Delta2", s.Delta2}, {"T", s.T},                  {"D", s.D},
                 {"tau", s.tau}};
  return j.dump(2);
}

CsvTable sweep_csv(const std::vector<CollisionReport>& runs) {
  CsvTable t({"c1", "c2", "eps", "c1_plus", "c2_plus", "delta_c1", "delta_c2", "delta_c1_vs_in", "delta_c2_vs_in",
              "residue_H1", "residue_H1_c2", "residue_functional", "ahead_H1", "Delta1", "Delta2", "Delta1_leading",
              "Delta2_leading", "budget1", "budget2", "drift_N", "noise_floor", "residue_detected"});
  for (auto& r : runs) {
    ResidueNorms w = r.residue_norms.empty() ? ResidueNorms{} : r.residue_norms.back();
    std::vector<std::string> row;
    for (double x : {r.config.c1, r.config.c2, r.config.c2 - 1.0, r.c1_plus, r.c2_plus, r.delta_c1, r.delta_c2,
                     r.delta_c1_vs_in, r.delta_c2_vs_in, w.behind_h1, w.behind_h1_c2, w.functional, w.ahead_h1,
                     r.shift1, r.shift2, r.shift_leading.Delta1, r.shift_leading.Delta2, r.budget1, r.budget2,
                     r.drift_N, r.noise_floor})
      row.push_back(fmt(x));
    row.push_back(r.residue_detected ? "true" : "false");
    t.add(std::move(row));
  }
  return t;
}

}  // namespace bbm
