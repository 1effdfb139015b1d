// warpfreq/io.hpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef WARPFREQ_IO_HPP
#define WARPFREQ_IO_HPP

#include <bit>
#include <fstream>
#include <string>

#include <json.hpp>

#include "warpfreq/admissibility.hpp"
#include "warpfreq/covering.hpp"
#include "warpfreq/kernels.hpp"
#include "warpfreq/phase_grid.hpp"
#include "warpfreq/radial.hpp"
#include "warpfreq/transform.hpp"

static_assert(std::endian::native == std::endian::little,
              "signal files are little-endian; this build targets little-endian hosts");

namespace warpfreq {

using nlohmann::json;

/// I/O failure distinct from bad configuration.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// warp descriptors

inline json warp_to_json(const Warp& w) {
  json j;
  j["type"] = w.type;
  j["d"] = w.dim;
  if (w.type == "separable") {
    json comps = json::array();
    for (const auto& c : w.components) comps.push_back(warp_to_json(c));
    j["components"] = comps;
  } else if (w.type == "radial") {
    const RadialComponent& rc = *w.radial;
    json s;
    s["family"] = rc.sigma().family;
    if (rc.sigma().family == "power") s["p"] = rc.sigma().p;
    j["sigma"] = s;
    j["epsilon"] = rc.eps();
    j["c"] = rc.slope();
    j["mollifier"] = "standard";
  }
  return j;
}

inline Warp warp_from_json(const json& j) {
  if (!j.contains("type")) throw std::invalid_argument("warp descriptor: missing type");
  const std::string type = j.at("type").get<std::string>();
  if (type == "identity") return make_identity_warp(j.value("d", 1));
  if (type == "log") return make_log_warp1d();
  if (type == "exotic2d") return make_exotic2d_warp();
  if (type == "separable") {
    std::vector<Warp> comps;
    for (const auto& cj : j.at("components")) comps.push_back(warp_from_json(cj));
    return make_separable_warp(std::move(comps));
  }
  if (type == "radial") {
    const json& s = j.at("sigma");
    const std::string family = s.at("family").get<std::string>();
    SigmaMap sigma;
    if (family == "log1p")
      sigma = sigma_log1p();
    else if (family == "power")
      sigma = sigma_power(s.at("p").get<double>());
    else
      throw std::invalid_argument("warp descriptor: unknown sigma family " + family);
    const double eps = j.value("epsilon", 1.0);
    const double c = j.value("c", -1.0);
    return make_radial_warp(slow_start(sigma, eps, c), j.value("d", 1));
  }
  throw std::invalid_argument("warp descriptor: unknown type " + type);
}

inline Warp load_warp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open warp descriptor " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed warp descriptor: ") + e.what());
  }
  return warp_from_json(j);
}

// ---------------------------------------------------------------------------
// signal files: little-endian float64 (re, im) pairs in row-major grid
// order, with a JSON sidecar <path>.json

inline void write_signal(const std::string& path, const CVec& data, int d, const IVec& shape,
                         const Vec& box_lo, const Vec& box_hi, const std::string& domain) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write signal " + path);
  for (const Cpx& v : data) {
    const double re = v.real(), im = v.imag();
    out.write(reinterpret_cast<const char*>(&re), sizeof(double));
    out.write(reinterpret_cast<const char*>(&im), sizeof(double));
  }
  if (!out) throw IoError("short write to " + path);
  json meta;
  meta["d"] = d;
  meta["shape"] = shape;
  meta["box_min"] = box_lo;
  meta["box_max"] = box_hi;
  meta["domain"] = domain;
  std::ofstream mout(path + ".json");
  if (!mout) throw IoError("cannot write sidecar " + path + ".json");
  mout << meta.dump(2) << "\n";
}

struct SignalFile {
  CVec data;
  int d = 0;
  IVec shape;
  Vec box_lo, box_hi;
  std::string domain;
};

inline SignalFile read_signal(const std::string& path) {
  std::ifstream min(path + ".json");
  if (!min) throw IoError("cannot open sidecar " + path + ".json");
  json meta;
  try {
    min >> meta;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed signal sidecar: ") + e.what());
  }
  SignalFile s;
  s.d = meta.at("d").get<int>();
  s.shape = meta.at("shape").get<IVec>();
  s.box_lo = meta.at("box_min").get<Vec>();
  s.box_hi = meta.at("box_max").get<Vec>();
  s.domain = meta.value("domain", "");
  std::size_t total = 1;
  for (int n : s.shape) total *= static_cast<std::size_t>(n);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open signal " + path);
  s.data.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    double re, im;
    in.read(reinterpret_cast<char*>(&re), sizeof(double));
    in.read(reinterpret_cast<char*>(&im), sizeof(double));
    if (!in) throw IoError("signal file truncated: " + path);
    s.data[i] = Cpx(re, im);
  }
  return s;
}

// ---------------------------------------------------------------------------
// coefficient files: JSON index header + the same binary payload

inline void write_coefficients(const std::string& path, const Coefficients& c,
                               const PhaseGrid& g) {
  json head;
  head["d"] = g.dim();
  head["delta"] = g.delta();
  head["shape"] = g.shape();
  head["box_min"] = g.box_lo();
  head["box_max"] = g.box_hi();
  json chans = json::array();
  for (std::size_t ki = 0; ki < g.channels().size(); ++ki) {
    const auto& ch = g.channels()[ki];
    json cj;
    cj["k"] = ch.k;
    cj["tau"] = ch.tau;
    cj["omega"] = ch.omega;
    cj["stride"] = ch.stride;
    cj["count"] = c.blocks[ki].size();
    cj["edge"] = ch.edge;
    chans.push_back(cj);
  }
  head["channels"] = chans;
  std::ofstream hout(path + ".json");
  if (!hout) throw IoError("cannot write coefficient header " + path + ".json");
  hout << head.dump(2) << "\n";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write coefficients " + path);
  for (const auto& block : c.blocks)
    for (const Cpx& v : block) {
      const double re = v.real(), im = v.imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof(double));
      out.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
}

inline Coefficients read_coefficients(const std::string& path, const PhaseGrid& g) {
  std::ifstream hin(path + ".json");
  if (!hin) throw IoError("cannot open coefficient header " + path + ".json");
  json head;
  try {
    hin >> head;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed coefficient header: ") + e.what());
  }
  const auto& chans = head.at("channels");
  if (chans.size() != g.channels().size())
    throw std::invalid_argument("coefficient header does not match the sampling grid");
  Coefficients c;
  c.grid = &g;
  c.blocks.resize(chans.size());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open coefficients " + path);
  for (std::size_t ki = 0; ki < chans.size(); ++ki) {
    const std::size_t count = chans[ki].at("count").get<std::size_t>();
    if (count != g.lattice_size(g.channels()[ki]))
      throw std::invalid_argument("coefficient block size does not match its time lattice");
    c.blocks[ki].resize(count);
    for (std::size_t m = 0; m < count; ++m) {
      double re, im;
      in.read(reinterpret_cast<char*>(&re), sizeof(double));
      in.read(reinterpret_cast<char*>(&im), sizeof(double));
      if (!in) throw IoError("coefficient file truncated: " + path);
      c.blocks[ki][m] = Cpx(re, im);
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// covering export and reports

inline json covering_to_json(const Covering& cov) {
  json cells = json::array();
  for (std::size_t ci = 0; ci < cov.size(); ++ci) {
    const auto& sh = cov.shell_of(ci);
    json c;
    c["l"] = cov.l_of(ci);
    c["k"] = sh.k;
    c["freq_center"] = sh.freq_center;
    c["freq_bbox_min"] = sh.fb_lo;
    c["freq_bbox_max"] = sh.fb_hi;
    c["time_lattice_matrix"] = sh.M.a;
    c["time_center"] = cov.time_center(ci);
    c["mu1"] = sh.mu1;
    c["mu2"] = sh.mu2;
    c["w_U"] = cov.covering_weight(ci);
    c["sample_point_time"] = cov.sample_time(ci);
    c["sample_point_freq"] = cov.sample_freq(ci);
    cells.push_back(c);
  }
  json j;
  j["delta"] = cov.delta();
  j["d"] = cov.warp().dim;
  j["cells"] = cells;
  return j;
}

inline json report_to_json(const AdmissibilityReport& r) {
  json j;
  j["condition"] = r.condition;
  j["grid"] = r.grid;
  j["worst_ratio"] = r.worst_ratio;
  j["constants"] = r.constants;
  j["pass"] = r.pass;
  j["tolerance"] = r.tolerance;
  json pts = json::array();
  for (const auto& p : r.worst_points) pts.push_back(p);
  j["worst_points"] = pts;
  return j;
}

inline std::string decay_table_csv(const DecayTable& t) {
  std::ostringstream os;
  os << "delta,osc_bm,gram_bm,contraction,converged\n";
  os.precision(12);
  for (const auto& r : t.rows)
    os << r.delta << "," << r.osc_bm << "," << r.gram_bm << "," << r.contraction << ","
       << (r.converged ? 1 : 0) << "\n";
  return os.str();
}

}  // namespace warpfreq

#endif  // WARPFREQ_IO_HPP
