// tools/warpfreq_cli.cpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Command-line front end: build and inspect warps, run admissibility
// reports, compute transforms, export coverings, and run frame-bound and
// kernel-decay sweeps. Exit codes: 0 success, 1 numerical-check failure,
// 2 usage or configuration error, 3 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "warpfreq/warpfreq.hpp"

using namespace warpfreq;

namespace {

Vec parse_number_list(const std::string& s) {
  Vec out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::invalid_argument("empty numeric list: " + s);
  return out;
}

// "lo,hi" per axis, axes separated by ';'
void parse_box(const std::string& s, Vec& lo, Vec& hi) {
  lo.clear();
  hi.clear();
  std::stringstream ss(s);
  std::string axis;
  while (std::getline(ss, axis, ';')) {
    const Vec pair = parse_number_list(axis);
    if (pair.size() != 2) throw std::invalid_argument("box axis needs lo,hi: " + axis);
    lo.push_back(pair[0]);
    hi.push_back(pair[1]);
  }
  if (lo.empty()) throw std::invalid_argument("empty box spec");
}

IVec parse_shape(const std::string& s) {
  IVec out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  if (out.empty()) throw std::invalid_argument("empty shape spec");
  return out;
}

struct CommonOpts {
  std::string warp_path;
  std::string preset;
  int d = 1;
  double preset_p = 2.0;
  std::string theta = "bump:1";
  double delta = 0.5;
  std::string delta_list;
  std::string box = "-128,128";
  std::string time_extent;
  double p = 2.0, q = 2.0;
  double tol = 1e-8;
  std::uint64_t seed = 7;
  int threads = 0;
  std::string out;
  std::string shape = "4096";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--warp", o.warp_path, "warp descriptor JSON path");
  cmd->add_option("--preset", o.preset, "warp preset: gabor|wavelet1d|alpha|exotic2d|log1d");
  cmd->add_option("--d", o.d, "dimension for dimension-generic presets");
  cmd->add_option("--preset-p", o.preset_p, "exponent for the alpha preset");
  cmd->add_option("--theta", o.theta, "prototype: gauss | bump:r");
  cmd->add_option("--delta", o.delta, "covering/grid fineness");
  cmd->add_option("--delta-list", o.delta_list, "comma-separated, strictly decreasing");
  cmd->add_option("--box", o.box, "frequency box, 'lo,hi' per axis joined by ';'");
  cmd->add_option("--time-extent", o.time_extent, "time box, same format");
  cmd->add_option("--shape", o.shape, "grid nodes per axis, ';'-joined");
  cmd->add_option("--p", o.p, "inner mixed-norm exponent");
  cmd->add_option("--q", o.q, "outer mixed-norm exponent");
  cmd->add_option("--tol", o.tol, "tolerance override");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--threads", o.threads, "worker cap (0 = hardware)");
  cmd->add_option("--out", o.out, "output path");
}

Warp resolve_warp(const CommonOpts& o) {
  if (!o.warp_path.empty()) return load_warp(o.warp_path);
  if (!o.preset.empty()) return make_preset(o.preset, o.d, o.preset_p);
  throw std::invalid_argument("need --warp or --preset");
}

Prototype resolve_theta(const CommonOpts& o) {
  if (o.theta == "gauss") return Prototype::gaussian();
  if (o.theta.rfind("bump:", 0) == 0) return Prototype::bump(std::stod(o.theta.substr(5)));
  if (o.theta == "bump") return Prototype::bump(1.0);
  throw std::invalid_argument("unknown theta spec: " + o.theta);
}

PhaseGrid resolve_grid(const CommonOpts& o, const Warp& warp, const Prototype& theta) {
  Vec lo, hi;
  parse_box(o.box, lo, hi);
  IVec shape = parse_shape(o.shape);
  if (static_cast<int>(lo.size()) == 1 && warp.dim > 1) {
    lo.assign(static_cast<std::size_t>(warp.dim), lo[0]);
    hi.assign(static_cast<std::size_t>(warp.dim), hi[0]);
  }
  if (static_cast<int>(shape.size()) == 1 && warp.dim > 1)
    shape.assign(static_cast<std::size_t>(warp.dim), shape[0]);
  return PhaseGrid::build(warp, lo, hi, shape, o.delta, theta);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

int cmd_info(const CommonOpts& o) {
  const Warp w = resolve_warp(o);
  std::printf("warp type: %s, d = %d, smoothness order %d\n", w.type.c_str(), w.dim,
              w.smoothness);
  std::printf("domain: ");
  for (int i = 0; i < w.dim; ++i)
    std::printf("(%g, %g)%s", w.domain.lo[static_cast<std::size_t>(i)],
                w.domain.hi[static_cast<std::size_t>(i)], i + 1 < w.dim ? " x " : "\n");
  if (w.control)
    std::printf("control weight: %s, C=%.6g, poly=%.3g, rate=%.3g\n",
                w.control->family.c_str(), w.control->constant, w.control->poly_exponent,
                w.control->exp_rate);
  else
    std::printf("control weight: none\n");

  // probe the weight and the round trip on a small deterministic net
  Rng rng(o.seed);
  std::printf("%-28s %-14s %-14s\n", "tau", "w(tau)", "roundtrip residual");
  double worst = 0.0;
  for (int i = 0; i < 8; ++i) {
    Vec tau(static_cast<std::size_t>(w.dim));
    for (auto& v : tau) v = rng.uniform(-2.0, 2.0);
    const Vec xi = w.inverse(tau);
    const Vec back = w.forward(xi);
    const double res = dist(back, tau) / (1.0 + norm(tau));
    worst = std::max(worst, res);
    std::ostringstream ts;
    ts << "(";
    for (int k = 0; k < w.dim; ++k)
      ts << tau[static_cast<std::size_t>(k)] << (k + 1 < w.dim ? ", " : ")");
    std::printf("%-28s %-14.6g %-14.3e\n", ts.str().c_str(), w.weight(tau), res);
  }
  std::printf("worst roundtrip residual: %.3e\n", worst);
  return 0;
}

int cmd_check(const CommonOpts& o) {
  const Warp w = resolve_warp(o);
  std::vector<AdmissibilityReport> reports;
  GridSpec grid;
  grid.n_radial = 24;
  grid.n_angular = w.dim == 1 ? 2 : 12;

  if (w.control) {
    const ControlWeight v0 = *w.control;
    reports.push_back(check_submultiplicative([&](const Vec& t) { return v0(t); }, grid, w.dim));
    reports.back().condition = "v0-submultiplicative";
    const int d = w.dim;
    reports.push_back(check_moderate([&](const Vec& t) { return w.weight(t); },
                                     [&, d](const Vec& t) { return std::pow(v0(t), d); }, grid,
                                     w.dim));
    reports.back().condition = "w-moderate-v0^d";
    GridSpec pgrid;
    pgrid.n_radial = w.dim >= 3 ? 8 : 12;
    pgrid.n_angular = w.dim == 1 ? 2 : 6;
    reports.push_back(check_phi_derivative_bound(
        w, [&](const Vec& t) { return v0(t); }, 2, pgrid, o.tol > 0 ? o.tol : 1e-6));
  }
  if (w.type == "radial") {
    const SigmaMap& s = w.radial->sigma();
    std::function<double(double)> u;
    if (s.family == "log1p")
      u = [](double x) { return std::exp(x); };
    else if (s.family == "power") {
      const double e = std::abs(s.p - 1.0);
      u = [e](double x) { return std::pow(1.0 + x, e); };
    }
    if (u) reports.push_back(check_weak_admissibility(s, 1.0, 2, 20.0, u));
  }
  if (reports.empty()) {
    std::printf("no checkable structure (warp carries no control weight)\n");
    return 0;
  }

  json out = json::array();
  bool all_pass = true;
  std::printf("%-26s %-12s %-8s constants\n", "condition", "worst", "pass");
  for (const auto& r : reports) {
    all_pass = all_pass && r.pass;
    out.push_back(report_to_json(r));
    std::ostringstream cs;
    for (const auto& [k, v] : r.constants) cs << k << "=" << v << " ";
    std::printf("%-26s %-12.6g %-8s %s\n", r.condition.c_str(), r.worst_ratio,
                r.pass ? "ok" : "FAIL", cs.str().c_str());
  }
  if (!o.out.empty()) write_text(o.out, out.dump(2) + "\n");
  return all_pass ? 0 : 1;
}

int cmd_make_signal(const CommonOpts& o, const std::string& kind) {
  const Warp w = resolve_warp(o);
  const Prototype theta = resolve_theta(o);
  const PhaseGrid g = resolve_grid(o, w, theta);
  if (o.out.empty()) throw std::invalid_argument("make-signal needs --out");
  CVec f(g.grid_size(), Cpx(0, 0));
  Rng rng(o.seed);
  const Vec& wlo = g.warped_lo();
  const Vec& whi = g.warped_hi();
  const double band = 2.0 * theta.effective_radius(1e-8) + 1.5 * g.dtau();
  // random smooth band-interior signal: a few bumps in warped frequency
  const int nbumps = kind == "chirp" ? 1 : 3;
  for (int b = 0; b < nbumps; ++b) {
    const double width = rng.uniform(0.3, 0.8) *
                         std::min(1.0, 0.5 * (whi[0] - wlo[0]) - band);
    Vec center(static_cast<std::size_t>(g.dim()));
    for (int i = 0; i < g.dim(); ++i)
      center[static_cast<std::size_t>(i)] = rng.uniform(wlo[static_cast<std::size_t>(i)] + band + width,
                                                        whi[static_cast<std::size_t>(i)] - band - width);
    const double phase_rate = rng.uniform(-3.0, 3.0);
    for (std::size_t j = 0; j < g.grid_size(); ++j) {
      if (!g.in_domain(j)) continue;
      const double* t = g.warped_point(j);
      double d2 = 0.0;
      for (int i = 0; i < g.dim(); ++i) {
        const double dd = (t[i] - center[static_cast<std::size_t>(i)]) / width;
        d2 += dd * dd;
      }
      if (d2 >= 1.0) continue;
      const double env = std::exp(-1.0 / (1.0 - d2));
      const double ph = phase_rate * t[0];
      f[j] += env * Cpx(std::cos(ph), std::sin(ph));
    }
  }
  write_signal(o.out, f, g.dim(), g.shape(), g.box_lo(), g.box_hi(),
               w.type == "log" || w.type == "separable" ? "orthant" : "full");
  std::printf("wrote %zu samples to %s\n", f.size(), o.out.c_str());
  return 0;
}

int cmd_analyze(const CommonOpts& o, const std::string& in_path) {
  const Warp w = resolve_warp(o);
  const Prototype theta = resolve_theta(o);
  const PhaseGrid g = resolve_grid(o, w, theta);
  const SignalFile s = read_signal(in_path);
  if (s.data.size() != g.grid_size())
    throw std::invalid_argument("signal size does not match the grid (check --box/--shape)");
  const Coefficients c = analyze(s.data, theta, w, g);
  if (o.out.empty()) throw std::invalid_argument("analyze needs --out");
  write_coefficients(o.out, c, g);
  std::printf("analyzed %zu samples into %zu coefficients over %zu channels\n", s.data.size(),
              c.total(), g.channels().size());
  return 0;
}

int cmd_synthesize(const CommonOpts& o, const std::string& in_path) {
  const Warp w = resolve_warp(o);
  const Prototype theta = resolve_theta(o);
  const PhaseGrid g = resolve_grid(o, w, theta);
  const Coefficients c = read_coefficients(in_path, g);
  const CVec f = synthesize(c, theta, w, g);
  if (o.out.empty()) throw std::invalid_argument("synthesize needs --out");
  write_signal(o.out, f, g.dim(), g.shape(), g.box_lo(), g.box_hi(), "full");
  std::printf("synthesized %zu samples\n", f.size());
  return 0;
}

int cmd_roundtrip(const CommonOpts& o, const std::string& in_path) {
  const Warp w = resolve_warp(o);
  const Prototype theta = resolve_theta(o);
  const PhaseGrid g = resolve_grid(o, w, theta);
  const SignalFile s = read_signal(in_path);
  if (s.data.size() != g.grid_size())
    throw std::invalid_argument("signal size does not match the grid (check --box/--shape)");

  // warn about content near excluded edge channels
  const double band = 2.0 * theta.effective_radius(1e-8) + 1.5 * g.dtau();
  double edge_energy = 0.0, total_energy = 0.0;
  for (std::size_t j = 0; j < g.grid_size(); ++j) {
    const double e = std::norm(s.data[j]);
    total_energy += e;
    if (!g.in_domain(j) || !g.interior_band(j, band)) edge_energy += e;
  }
  if (total_energy > 0.0 && edge_energy > 1e-6 * total_energy)
    std::fprintf(stderr,
                 "warning: %.2f%% of signal energy lies in the edge band; "
                 "edge channels are excluded from frame guarantees\n",
                 100.0 * edge_energy / total_energy);

  const Coefficients c = analyze(s.data, theta, w, g);
  const ReconstructResult rec = reconstruct(c, theta, w, g, o.tol, 200);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < s.data.size(); ++j) {
    num += std::norm(rec.fhat[j] - s.data[j]);
    den += std::norm(s.data[j]);
  }
  const double rel = den > 0 ? std::sqrt(num / den) : 0.0;
  std::printf("roundtrip relative error: %.6e after %d CG iterations\n", rel, rec.iterations);
  if (!o.out.empty())
    write_signal(o.out, rec.fhat, g.dim(), g.shape(), g.box_lo(), g.box_hi(), "full");
  return rel <= std::max(1e-6, 10.0 * o.tol) ? 0 : 1;
}

std::function<double(const Vec&, const Vec&)> resolve_kappa(const std::string& spec) {
  if (spec.empty() || spec == "one") return [](const Vec&, const Vec&) { return 1.0; };
  if (spec.rfind("poly:", 0) == 0) {
    const double a = std::stod(spec.substr(5));
    return [a](const Vec&, const Vec& om) { return std::pow(1.0 + norm(om), a); };
  }
  throw std::invalid_argument("unknown kappa spec: " + spec);
}

int cmd_covering(const CommonOpts& o, const std::string& kappa_spec) {
  const Warp w = resolve_warp(o);
  Vec lo, hi;
  parse_box(o.box, lo, hi);
  Vec tlo, thi;
  if (o.time_extent.empty()) {
    tlo.assign(static_cast<std::size_t>(w.dim), -4.0);
    thi.assign(static_cast<std::size_t>(w.dim), 4.0);
  } else {
    parse_box(o.time_extent, tlo, thi);
  }
  const Covering cov = build_covering(w, o.delta, lo, hi, tlo, thi);
  std::printf("covering: %zu cells over %zu frequency shells\n", cov.size(),
              cov.shells().size());
  json j = covering_to_json(cov);
  // weighted sequence-space weights for the requested (p, q, kappa)
  Vec kflat, ksharp;
  cov.discrete_weights(resolve_kappa(kappa_spec), o.p, o.q, kflat, ksharp);
  j["p"] = o.p;
  j["q"] = o.q;
  j["kappa"] = kappa_spec.empty() ? "one" : kappa_spec;
  for (std::size_t ci = 0; ci < cov.size(); ++ci) {
    j["cells"][ci]["kappa_flat"] = kflat[ci];
    j["cells"][ci]["kappa_sharp"] = ksharp[ci];
  }
  if (!o.out.empty()) write_text(o.out, j.dump(2) + "\n");
  return 0;
}

int cmd_frame_bounds(const CommonOpts& o) {
  const Warp w = resolve_warp(o);
  const Prototype theta = resolve_theta(o);
  std::vector<double> deltas;
  if (!o.delta_list.empty())
    for (double v : parse_number_list(o.delta_list)) deltas.push_back(v);
  else
    deltas.push_back(o.delta);
  double dtau_max = 0.0;
  for (double dd : deltas) dtau_max = std::max(dtau_max, dd / std::sqrt(double(w.dim)));
  const double band = 2.0 * theta.effective_radius(1e-8) + 1.5 * dtau_max;
  std::ostringstream csv;
  csv << "delta,lower,upper,ratio,converged\n";
  csv.precision(12);
  std::printf("%-8s %-14s %-14s %-10s\n", "delta", "A_est", "B_est", "ratio");
  double prev_ratio = std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (double dd : deltas) {
    CommonOpts od = o;
    od.delta = dd;
    const PhaseGrid g = resolve_grid(od, w, theta);
    const FrameBounds fb = frame_bounds(theta, w, g, 200, o.seed, band);
    const double ratio = fb.upper / fb.lower;
    monotone = monotone && ratio <= prev_ratio;
    prev_ratio = ratio;
    std::printf("%-8.4g %-14.6g %-14.6g %-10.6g%s\n", dd, fb.lower, fb.upper, ratio,
                fb.converged ? "" : "  (iteration cap)");
    csv << dd << "," << fb.lower << "," << fb.upper << "," << ratio << ","
        << (fb.converged ? 1 : 0) << "\n";
  }
  if (!o.out.empty()) write_text(o.out, csv.str());
  return 0;
}

int cmd_kernel_decay(const CommonOpts& o) {
  const Warp w = resolve_warp(o);
  const Prototype theta = resolve_theta(o);
  std::vector<double> deltas = {1.0, 0.5, 0.25};
  if (!o.delta_list.empty()) {
    deltas.clear();
    for (double v : parse_number_list(o.delta_list)) deltas.push_back(v);
  }
  Vec lo, hi;
  parse_box(o.box, lo, hi);
  if (static_cast<int>(lo.size()) == 1 && w.dim > 1) {
    lo.assign(static_cast<std::size_t>(w.dim), lo[0]);
    hi.assign(static_cast<std::size_t>(w.dim), hi[0]);
  }

  KernelSpec spec{theta, theta, &w, {0.0, nullptr}, {24, 1e-6, 4}};
  // truncated Lambda-grid: warped channels within the box hull, time
  // offsets to a modest extent
  Vec probe_lo = w.forward(lo), probe_hi = w.forward(hi);
  double tau_lo = std::min(probe_lo[0], probe_hi[0]) * 0.6;
  double tau_hi = std::max(probe_lo[0], probe_hi[0]) * 0.6;
  const LambdaGrid grid = LambdaGrid::regular(w, 8.0, 17, tau_lo, tau_hi, 13);
  Vec tlo(static_cast<std::size_t>(w.dim), -10.0), thi(static_cast<std::size_t>(w.dim), 10.0);
  const DecayTable table = decay_sweep(spec, deltas, grid, lo, hi, tlo, thi);
  const std::string csv = decay_table_csv(table);
  std::printf("%s", csv.c_str());
  if (table.first_passing >= 0)
    std::printf("first contraction < 1 at delta = %g\n",
                table.rows[static_cast<std::size_t>(table.first_passing)].delta);
  if (!o.out.empty()) write_text(o.out, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"warped time-frequency systems: transforms, coverings, frames, kernels"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string in_path, make_kind = "bumps";

  auto* info = app.add_subcommand("info", "print warp metadata and probe values");
  add_common(info, o);
  auto* check = app.add_subcommand("check", "run admissibility reports");
  add_common(check, o);
  auto* mksig = app.add_subcommand("make-signal", "generate a band-interior test signal");
  add_common(mksig, o);
  mksig->add_option("--kind", make_kind, "bumps | chirp");
  auto* an = app.add_subcommand("analyze", "signal file -> coefficients");
  add_common(an, o);
  an->add_option("--in", in_path, "input signal path")->required();
  auto* sy = app.add_subcommand("synthesize", "coefficients -> signal file");
  add_common(sy, o);
  sy->add_option("--in", in_path, "input coefficients path")->required();
  auto* rt = app.add_subcommand("roundtrip", "analyze then reconstruct; print error");
  add_common(rt, o);
  rt->add_option("--in", in_path, "input signal path")->required();
  std::string kappa_spec = "one";
  auto* cv = app.add_subcommand("covering", "export the induced covering as JSON");
  add_common(cv, o);
  cv->add_option("--kappa", kappa_spec, "weight: one | poly:a");
  auto* fbs = app.add_subcommand("frame-bounds", "frame-bound table over a delta list");
  add_common(fbs, o);
  auto* kd = app.add_subcommand("kernel-decay", "oscillation decay sweep CSV");
  add_common(kd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (o.threads > 0) thread_cap() = o.threads;

  try {
    if (info->parsed()) return cmd_info(o);
    if (check->parsed()) return cmd_check(o);
    if (mksig->parsed()) return cmd_make_signal(o, make_kind);
    if (an->parsed()) return cmd_analyze(o, in_path);
    if (sy->parsed()) return cmd_synthesize(o, in_path);
    if (rt->parsed()) return cmd_roundtrip(o, in_path);
    if (cv->parsed()) return cmd_covering(o, kappa_spec);
    if (fbs->parsed()) return cmd_frame_bounds(o);
    if (kd->parsed()) return cmd_kernel_decay(o);
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  } catch (const CgStagnation& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
