// warpfreq/kernels.hpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef WARPFREQ_KERNELS_HPP
#define WARPFREQ_KERNELS_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "warpfreq/covering.hpp"
#include "warpfreq/parallel.hpp"
#include "warpfreq/prototype.hpp"
#include "warpfreq/rng.hpp"
#include "warpfreq/transform.hpp"

namespace warpfreq {

/// Weight m((y,xi),(z,eta)) = (1+|y-z|)^p * v1(Phi(xi) - Phi(eta)).
struct WeightM {
  double p = 0.0;
  std::function<double(const Vec&)> v1;  // even and submultiplicative; null means 1

  double eval(const Vec& x, const Vec& dtau) const {
    return std::pow(1.0 + norm(x), p) * (v1 ? v1(dtau) : 1.0);
  }
};

struct QuadOpts {
  int n0 = 24;
  double rel_tol = 1e-7;
  int max_level = 5;
};

/// Truncated quadrature grid over Lambda slices: time offsets (with volume
/// element dx) and warped channel centers (with d-omega measure per node).
struct LambdaGrid {
  int dim = 1;
  int nx = 1;       // nodes per time axis
  double hx = 1.0;  // time spacing
  std::vector<Vec> xs;
  double dx = 1.0;
  std::vector<Vec> taus;
  std::vector<double> dmu;

  /// Product grid: time offsets on [-X, X]^d, warped centers on
  /// [tau_lo, tau_hi]^d with the Jacobian measure d omega = w(tau) d tau.
  static LambdaGrid regular(const Warp& warp, double x_extent, int nx, double tau_lo,
                            double tau_hi, int ntau) {
    const int d = warp.dim;
    LambdaGrid g;
    g.dim = d;
    g.nx = nx;
    g.hx = 2.0 * x_extent / nx;
    g.dx = std::pow(g.hx, d);
    std::size_t txn = 1, tfn = 1;
    for (int i = 0; i < d; ++i) {
      txn *= static_cast<std::size_t>(nx);
      tfn *= static_cast<std::size_t>(ntau);
    }
    const double ht = (tau_hi - tau_lo) / ntau;
    for (std::size_t idx = 0; idx < txn; ++idx) {
      Vec x(static_cast<std::size_t>(d));
      std::size_t rem = idx;
      for (int i = d - 1; i >= 0; --i) {
        x[static_cast<std::size_t>(i)] = -x_extent + (static_cast<double>(rem % nx) + 0.5) * g.hx;
        rem /= static_cast<std::size_t>(nx);
      }
      g.xs.push_back(std::move(x));
    }
    for (std::size_t idx = 0; idx < tfn; ++idx) {
      Vec t(static_cast<std::size_t>(d));
      std::size_t rem = idx;
      for (int i = d - 1; i >= 0; --i) {
        t[static_cast<std::size_t>(i)] = tau_lo + (static_cast<double>(rem % ntau) + 0.5) * ht;
        rem /= static_cast<std::size_t>(ntau);
      }
      g.dmu.push_back(warp.weight(t) * std::pow(ht, d));
      g.taus.push_back(std::move(t));
    }
    return g;
  }
};

/// Prototypes, warp, weight and quadrature for kernel estimation.
struct KernelSpec {
  Prototype theta1, theta2;
  const Warp* warp = nullptr;
  WeightM m;
  QuadOpts quad;
};

namespace detail {

struct CpxRefined {
  Cpx value{0, 0};
  bool converged = false;
};

// Midpoint rule with doubling refinement for a complex integrand on a box.
inline CpxRefined midpoint_box_cpx(const std::function<Cpx(const Vec&)>& f, const Vec& lo,
                                   const Vec& hi, int n0, double rel_tol, int max_level,
                                   double abs_floor) {
  const int d = static_cast<int>(lo.size());
  CpxRefined out;
  Cpx prev(0, 0);
  int n = n0;
  for (int level = 0; level < max_level; ++level, n *= 2) {
    Vec h(static_cast<std::size_t>(d));
    double cellvol = 1.0;
    for (int i = 0; i < d; ++i) {
      h[static_cast<std::size_t>(i)] = (hi[i] - lo[i]) / n;
      cellvol *= h[static_cast<std::size_t>(i)];
    }
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
    Cpx sum(0, 0);
    Vec pt(static_cast<std::size_t>(d));
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx;
      for (int i = d - 1; i >= 0; --i) {
        pt[static_cast<std::size_t>(i)] =
            lo[i] + (static_cast<double>(rem % static_cast<std::size_t>(n)) + 0.5) *
                        h[static_cast<std::size_t>(i)];
        rem /= static_cast<std::size_t>(n);
      }
      sum += f(pt);
    }
    const Cpx val = sum * cellvol;
    if (level > 0 && std::abs(val - prev) <= rel_tol * (std::abs(val) + abs_floor)) {
      out.value = val;
      out.converged = true;
      return out;
    }
    prev = val;
    out.value = val;
  }
  return out;
}

}  // namespace detail

/// Gram kernel in translation-reduced form: the inner product of atoms at
/// phase-space offsets x = z - y with warped frequencies tau_omega, tau_eta,
/// as the oscillatory frequency-domain integral in warped coordinates.
inline Cpx gram_kernel_x(const KernelSpec& spec, const Vec& x, const Vec& tau_omega,
                         const Vec& tau_eta, bool* converged = nullptr) {
  const Warp& warp = *spec.warp;
  const int d = warp.dim;
  const double r1 = spec.theta1.effective_radius(1e-10);
  const double r2 = spec.theta2.effective_radius(1e-10);
  // support: |ups| < r2 and |ups + tau_eta - tau_omega| < r1
  Vec lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const double delta_i = tau_omega[static_cast<std::size_t>(i)] - tau_eta[static_cast<std::size_t>(i)];
    lo[static_cast<std::size_t>(i)] = std::max(-r2, delta_i - r1);
    hi[static_cast<std::size_t>(i)] = std::min(r2, delta_i + r1);
    if (!(lo[static_cast<std::size_t>(i)] < hi[static_cast<std::size_t>(i)])) {
      if (converged) *converged = true;
      return Cpx(0, 0);
    }
  }
  if (dist(tau_omega, tau_eta) >= r1 + r2) {
    if (converged) *converged = true;
    return Cpx(0, 0);
  }

  const double w_eta = warp.weight(tau_eta);
  const double w_omega = warp.weight(tau_omega);
  const double nf = 1.0 / std::sqrt(w_eta * w_omega);
  const Vec delta_tau = tau_omega - tau_eta;

  auto integrand = [&](const Vec& ups) -> Cpx {
    const double th2 = spec.theta2(ups);
    if (th2 == 0.0) return Cpx(0, 0);
    const double th1 = spec.theta1(ups - delta_tau);
    if (th1 == 0.0) return Cpx(0, 0);
    const Vec t = ups + tau_eta;
    const Vec xi = warp.inverse(t);
    const double ph = -2.0 * std::numbers::pi * dot(x, xi);
    return th2 * th1 * warp.weight(t) * nf * Cpx(std::cos(ph), std::sin(ph));
  };

  // start finer when the phase oscillates fast across the support
  int n0 = spec.quad.n0;
  {
    const Mat at = transpose(warp.inv_jacobian(tau_eta));
    const double rate = norm(at * x);
    const double width = norm(hi - lo);
    n0 = std::max(n0, static_cast<int>(std::ceil(3.0 * rate * width)));
    n0 = std::min(n0, 512);
  }
  auto res = detail::midpoint_box_cpx(integrand, lo, hi, n0, spec.quad.rel_tol,
                                      spec.quad.max_level, 1e-14);
  if (converged) *converged = res.converged;
  return res.value;
}

/// Gram kernel at phase-space points lambda = (y, omega), rho = (z, eta).
inline Cpx gram_kernel(const KernelSpec& spec, const Vec& y, const Vec& omega, const Vec& z,
                       const Vec& eta, bool* converged = nullptr) {
  return gram_kernel_x(spec, z - y, spec.warp->forward(omega), spec.warp->forward(eta),
                       converged);
}

/// Estimated norm with its refinement trail.
struct NormEstimate {
  double value = 0.0;
  std::vector<double> history;
  bool converged = false;
};

/// Translation-reduced kernel evaluator K(x, tau_omega, tau_eta).
using TransKernel = std::function<Cpx(const Vec&, const Vec&, const Vec&)>;

inline TransKernel gram_trans_kernel(const KernelSpec& spec) {
  return [&spec](const Vec& x, const Vec& ta, const Vec& tb) {
    return gram_kernel_x(spec, x, ta, tb, nullptr);
  };
}

// |K| tabulated on the difference grid of time offsets (2 nx - 1 nodes per
// axis, spacing hx) times all channel pairs. Weight-independent, so one
// table serves several norm estimates.
struct KernelTable {
  int d = 1, nxd = 1;
  double hx = 1.0;
  std::size_t ndiff = 1, nt = 1;
  std::vector<Vec> diffs;
  std::vector<double> absk;  // [diff][a][b]

  double at(std::size_t di, std::size_t a, std::size_t b) const {
    return absk[(di * nt + a) * nt + b];
  }
};

inline KernelTable tabulate_kernel(const TransKernel& K, const LambdaGrid& grid) {
  KernelTable t;
  t.d = grid.dim;
  t.nxd = 2 * grid.nx - 1;
  t.hx = grid.hx;
  t.nt = grid.taus.size();
  t.ndiff = 1;
  for (int i = 0; i < t.d; ++i) t.ndiff *= static_cast<std::size_t>(t.nxd);
  for (std::size_t idx = 0; idx < t.ndiff; ++idx) {
    Vec x(static_cast<std::size_t>(t.d));
    std::size_t rem = idx;
    for (int i = t.d - 1; i >= 0; --i) {
      const int j = static_cast<int>(rem % static_cast<std::size_t>(t.nxd)) - (grid.nx - 1);
      x[static_cast<std::size_t>(i)] = j * t.hx;
      rem /= static_cast<std::size_t>(t.nxd);
    }
    t.diffs.push_back(std::move(x));
  }
  t.absk.assign(t.ndiff * t.nt * t.nt, 0.0);
  parallel_for(t.ndiff, [&](std::size_t di) {
    for (std::size_t a = 0; a < t.nt; ++a)
      for (std::size_t b = 0; b < t.nt; ++b)
        t.absk[(di * t.nt + a) * t.nt + b] =
            std::abs(K(t.diffs[di], grid.taus[a], grid.taus[b]));
  });
  return t;
}

namespace detail {

// Difference index of xs[iy] - xs[iz] (per-axis index arithmetic).
inline std::size_t diff_index(const LambdaGrid& grid, const KernelTable& t, std::size_t iy,
                              std::size_t iz) {
  std::size_t idx = 0;
  std::size_t ry = iy, rz = iz;
  // row-major decode from the back, then re-encode
  std::vector<int> dj(static_cast<std::size_t>(t.d));
  for (int i = t.d - 1; i >= 0; --i) {
    const int jy = static_cast<int>(ry % static_cast<std::size_t>(grid.nx));
    const int jz = static_cast<int>(rz % static_cast<std::size_t>(grid.nx));
    ry /= static_cast<std::size_t>(grid.nx);
    rz /= static_cast<std::size_t>(grid.nx);
    dj[static_cast<std::size_t>(i)] = jy - jz + (grid.nx - 1);
  }
  for (int i = 0; i < t.d; ++i)
    idx = idx * static_cast<std::size_t>(t.nxd) + static_cast<std::size_t>(dj[static_cast<std::size_t>(i)]);
  return idx;
}

// A_m estimate over genuine phase-space rows (z, eta): both sup-integral
// orderings, on the (possibly stride-subsampled) grid.
inline double am_pass(const KernelSpec& spec, const KernelTable& t, const LambdaGrid& grid,
                      int stride) {
  std::vector<std::size_t> xi_idx, ti_idx;
  for (std::size_t i = 0; i < grid.xs.size(); i += static_cast<std::size_t>(stride))
    xi_idx.push_back(i);
  for (std::size_t i = 0; i < grid.taus.size(); i += static_cast<std::size_t>(stride))
    ti_idx.push_back(i);
  const double sf = std::pow(static_cast<double>(stride), grid.dim);
  const double dx = grid.dx * sf;

  double best = 0.0;
  // rows are rho = (z, eta); integrate over lambda = (y, omega);
  // K(rho, lambda) = Ktilde(y - z, tau_eta, tau_omega)
  for (std::size_t ib : ti_idx) {
    for (std::size_t iz : xi_idx) {
      double acc = 0.0;
      for (std::size_t ia : ti_idx) {
        const Vec dtau = grid.taus[ib] - grid.taus[ia];
        double xsum = 0.0;
        for (std::size_t iy : xi_idx) {
          const double kv = t.at(diff_index(grid, t, iy, iz), ib, ia);
          if (kv == 0.0) continue;
          xsum += spec.m.eval(grid.xs[iy] - grid.xs[iz], dtau) * kv;
        }
        acc += xsum * grid.dmu[ia] * sf;
      }
      best = std::max(best, acc * dx);
    }
  }
  // transposed ordering: rows lambda, integrate over rho
  for (std::size_t ia : ti_idx) {
    for (std::size_t iy : xi_idx) {
      double acc = 0.0;
      for (std::size_t ib : ti_idx) {
        const Vec dtau = grid.taus[ia] - grid.taus[ib];
        double xsum = 0.0;
        for (std::size_t iz : xi_idx) {
          const double kv = t.at(diff_index(grid, t, iz, iy), ia, ib);
          if (kv == 0.0) continue;
          xsum += spec.m.eval(grid.xs[iz] - grid.xs[iy], dtau) * kv;
        }
        acc += xsum * grid.dmu[ib] * sf;
      }
      best = std::max(best, acc * dx);
    }
  }
  return best;
}

// B_m estimate: inner A_1 over full time slices (all differences), outer
// A_1 over the frequency component.
inline double bm_pass(const KernelSpec& spec, const KernelTable& t, const LambdaGrid& grid,
                      int stride) {
  std::vector<std::size_t> ti_idx;
  for (std::size_t i = 0; i < grid.taus.size(); i += static_cast<std::size_t>(stride))
    ti_idx.push_back(i);
  const double sf = std::pow(static_cast<double>(stride), grid.dim);
  const double dxdiff = std::pow(t.hx * stride, grid.dim);

  std::vector<std::size_t> di_idx;
  for (std::size_t di = 0; di < t.ndiff; ++di) di_idx.push_back(di);
  // (stride the difference set too, matching the coarse pass)
  if (stride > 1) {
    di_idx.clear();
    for (std::size_t di = 0; di < t.ndiff; ++di) {
      std::size_t rem = di;
      bool keep = true;
      for (int i = t.d - 1; i >= 0; --i) {
        const int j = static_cast<int>(rem % static_cast<std::size_t>(t.nxd)) - (grid.nx - 1);
        rem /= static_cast<std::size_t>(t.nxd);
        if (j % stride != 0) keep = false;
      }
      if (keep) di_idx.push_back(di);
    }
  }

  const std::size_t m = ti_idx.size();
  std::vector<double> G(m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      const Vec dtau = grid.taus[ti_idx[a]] - grid.taus[ti_idx[b]];
      double acc = 0.0;
      for (std::size_t di : di_idx) {
        const double kv = t.at(di, ti_idx[a], ti_idx[b]);
        if (kv == 0.0) continue;
        acc += spec.m.eval(t.diffs[di], dtau) * kv;
      }
      G[a * m + b] = acc * dxdiff;
    }

  double best = 0.0;
  for (std::size_t b = 0; b < m; ++b) {
    double row = 0.0;
    for (std::size_t a = 0; a < m; ++a) row += G[a * m + b] * grid.dmu[ti_idx[a]] * sf;
    best = std::max(best, row);
  }
  for (std::size_t a = 0; a < m; ++a) {
    double col = 0.0;
    for (std::size_t b = 0; b < m; ++b) col += G[a * m + b] * grid.dmu[ti_idx[b]] * sf;
    best = std::max(best, col);
  }
  return best;
}

}  // namespace detail

/// A_m norm estimate (a lower bound: ess-sups become maxima over grid rows,
/// integrals Riemann sums truncated to the declared grid). The table
/// overloads reuse a prebuilt |K| table across weights and norms.
inline NormEstimate am_norm(const KernelSpec& spec, const KernelTable& table,
                            const LambdaGrid& grid, double rel_tol = 0.05) {
  NormEstimate est;
  const double coarse = detail::am_pass(spec, table, grid, 2);
  const double fine = detail::am_pass(spec, table, grid, 1);
  est.history = {coarse, fine};
  est.value = fine;
  est.converged = std::abs(fine - coarse) <= rel_tol * (std::abs(fine) + 1e-300);
  return est;
}

inline NormEstimate am_norm(const KernelSpec& spec, const TransKernel& K,
                            const LambdaGrid& grid, double rel_tol = 0.05) {
  return am_norm(spec, tabulate_kernel(K, grid), grid, rel_tol);
}

/// B_m norm estimate: inner A_1 norm over time slices, outer A_1 over the
/// frequency component, with the weight applied pointwise.
inline NormEstimate bm_norm(const KernelSpec& spec, const KernelTable& table,
                            const LambdaGrid& grid, double rel_tol = 0.05) {
  NormEstimate est;
  const double coarse = detail::bm_pass(spec, table, grid, 2);
  const double fine = detail::bm_pass(spec, table, grid, 1);
  est.history = {coarse, fine};
  est.value = fine;
  est.converged = std::abs(fine - coarse) <= rel_tol * (std::abs(fine) + 1e-300);
  return est;
}

inline NormEstimate bm_norm(const KernelSpec& spec, const TransKernel& K,
                            const LambdaGrid& grid, double rel_tol = 0.05) {
  return bm_norm(spec, tabulate_kernel(K, grid), grid, rel_tol);
}

namespace detail {

// Deterministic probe points in a covering cell: the sample point plus
// Halton points mapped into the cell's product geometry.
inline std::vector<std::pair<Vec, Vec>> cell_probes(const Covering& cov, std::size_t cell,
                                                    int count) {
  const int d = cov.warp().dim;
  std::vector<std::pair<Vec, Vec>> out;
  out.emplace_back(cov.sample_time(cell), cov.sample_freq(cell));
  const auto& sh = cov.shell_of(cell);
  const Vec lu = cov.scaled(cov.l_of(cell));
  std::size_t hi = 0;
  while (static_cast<int>(out.size()) < count) {
    const Vec ht = halton_point(hi, 2 * d);
    ++hi;
    Vec ut(static_cast<std::size_t>(d)), uf(static_cast<std::size_t>(d));
    double nt = 0.0, nf = 0.0;
    for (int i = 0; i < d; ++i) {
      ut[static_cast<std::size_t>(i)] = 2.0 * ht[static_cast<std::size_t>(i)] - 1.0;
      uf[static_cast<std::size_t>(i)] = 2.0 * ht[static_cast<std::size_t>(d + i)] - 1.0;
      nt += ut[static_cast<std::size_t>(i)] * ut[static_cast<std::size_t>(i)];
      nf += uf[static_cast<std::size_t>(i)] * uf[static_cast<std::size_t>(i)];
    }
    if (nt >= 1.0 || nf >= 1.0) continue;  // keep to the open balls
    Vec tau = sh.tau;
    Vec u = lu;
    for (int i = 0; i < d; ++i) {
      u[static_cast<std::size_t>(i)] += cov.delta() * ut[static_cast<std::size_t>(i)];
      tau[static_cast<std::size_t>(i)] += cov.delta() * uf[static_cast<std::size_t>(i)];
    }
    out.emplace_back(sh.M * u, cov.warp().inverse(tau));
  }
  return out;
}

}  // namespace detail

/// Gamma-oscillation at (lambda, rho): sup over probe points nu of the
/// cells containing rho of |K(lambda,rho) - Gamma(rho,nu) K(lambda,nu)|,
/// with the phase correction Gamma((y,w),(z,e)) = e^{-2 pi i <y-z, w>}.
inline double oscillation(const KernelSpec& spec, const Covering& cov, const Vec& y,
                          const Vec& omega, const Vec& z, const Vec& eta,
                          int probes_per_cell = 9) {
  const auto cells = cov.cells_containing(z, eta);
  if (cells.empty()) return 0.0;
  const Vec tau_omega = spec.warp->forward(omega);
  const Cpx k_rho = gram_kernel_x(spec, z - y, tau_omega, spec.warp->forward(eta));
  double sup = 0.0;
  for (std::size_t cell : cells) {
    for (const auto& [ny, nom] : detail::cell_probes(cov, cell, probes_per_cell)) {
      const Cpx k_nu = gram_kernel_x(spec, ny - y, tau_omega, spec.warp->forward(nom));
      const double ph = -2.0 * std::numbers::pi * dot(z - ny, eta);
      const Cpx gamma(std::cos(ph), std::sin(ph));
      sup = std::max(sup, std::abs(k_rho - gamma * k_nu));
    }
  }
  return sup;
}

/// Maximal kernel at (lambda, rho): sup over probe points nu of the cells
/// containing lambda of |K(nu, rho)|; lambda itself is always probed.
inline double max_kernel(const KernelSpec& spec, const Covering& cov, const Vec& y,
                         const Vec& omega, const Vec& z, const Vec& eta,
                         int probes_per_cell = 9) {
  const Vec tau_eta = spec.warp->forward(eta);
  double sup = std::abs(gram_kernel_x(spec, z - y, spec.warp->forward(omega), tau_eta));
  for (std::size_t cell : cov.cells_containing(y, omega)) {
    for (const auto& [ny, nom] : detail::cell_probes(cov, cell, probes_per_cell)) {
      sup = std::max(sup, std::abs(gram_kernel_x(spec, z - ny, spec.warp->forward(nom), tau_eta)));
    }
  }
  return sup;
}

/// One row of the discretization decay table.
struct DecayRow {
  double delta = 0.0;
  double osc_bm = 0.0;
  double gram_bm = 0.0;
  double contraction = 0.0;
  bool converged = false;
};

struct DecayTable {
  std::vector<DecayRow> rows;
  int first_passing = -1;  // first delta with contraction < 1
};

/// Sweeps decreasing deltas: for each, builds the induced covering, then
/// estimates ||osc||_{B_m} and the contraction quantity
/// osc * (2 ||K||_{B_m} + osc). The Gram-kernel norm is delta-independent
/// and computed once.
inline DecayTable decay_sweep(const KernelSpec& spec, const std::vector<double>& deltas,
                              const LambdaGrid& grid, const Vec& freq_box_lo,
                              const Vec& freq_box_hi, const Vec& time_lo, const Vec& time_hi,
                              int probes_per_cell = 9) {
  for (std::size_t i = 1; i < deltas.size(); ++i)
    if (!(deltas[i] < deltas[i - 1]))
      throw std::invalid_argument("decay_sweep: delta list must be strictly decreasing");

  DecayTable table;
  const NormEstimate gram = bm_norm(spec, gram_trans_kernel(spec), grid);
  for (double delta : deltas) {
    const Covering cov =
        build_covering(*spec.warp, delta, freq_box_lo, freq_box_hi, time_lo, time_hi);
    TransKernel osc_kernel = [&spec, &cov, probes_per_cell](const Vec& x, const Vec& ta,
                                                            const Vec& tb) {
      const Vec omega = spec.warp->inverse(ta);
      const Vec eta = spec.warp->inverse(tb);
      const Vec y(static_cast<std::size_t>(spec.warp->dim), 0.0);
      return Cpx(oscillation(spec, cov, y, omega, x, eta, probes_per_cell), 0.0);
    };
    const NormEstimate osc = bm_norm(spec, osc_kernel, grid);
    DecayRow row;
    row.delta = delta;
    row.osc_bm = osc.value;
    row.gram_bm = gram.value;
    row.contraction = osc.value * (2.0 * gram.value + osc.value);
    row.converged = osc.converged && gram.converged;
    if (table.first_passing < 0 && row.contraction < 1.0)
      table.first_passing = static_cast<int>(table.rows.size());
    table.rows.push_back(row);
  }
  return table;
}

/// Residual of the prototype-mixing identity: the phase-space product of
/// the two pure kernels against <theta1,theta2> times the mixed kernel,
/// max relative deviation over a probe set. When the prototypes are
/// orthogonal an auxiliary theta3 must be supplied and the identity is
/// checked through it instead.
inline double mixed_kernel_identity_check(const Prototype& th1, const Prototype& th2,
                                          const Prototype* th3, const Warp& warp,
                                          const LambdaGrid& grid, const QuadOpts& quad = {}) {
  const int d = warp.dim;
  KernelSpec pure1{th1, th1, &warp, {}, quad};
  KernelSpec pure2{th2, th2, &warp, {}, quad};
  KernelSpec mixed{th1, th2, &warp, {}, quad};
  const double ip = inner_theta(th1, th2, d);
  const double scale1 = std::sqrt(th1.l2_norm_sq(d));
  const double scale2 = std::sqrt(th2.l2_norm_sq(d));
  if (std::abs(ip) < 1e-6 * scale1 * scale2) {
    if (!th3)
      throw std::invalid_argument(
          "mixed_kernel_identity_check: prototypes are orthogonal; supply theta3");
    return std::max(mixed_kernel_identity_check(th1, *th3, nullptr, warp, grid, quad),
                    mixed_kernel_identity_check(*th3, th2, nullptr, warp, grid, quad));
  }

  // probe pairs (lambda, rho) around the middle of the grid
  std::vector<std::pair<std::size_t, std::size_t>> probes;
  const std::size_t nt = grid.taus.size();
  probes.emplace_back(nt / 2, nt / 2);
  if (nt >= 3) probes.emplace_back(nt / 2, nt / 2 + 1);
  if (nt >= 5) probes.emplace_back(nt / 2 - 1, nt / 2 + 1);

  const Vec x_probe(static_cast<std::size_t>(d), 0.35);
  double worst = 0.0;
  for (const auto& [ia, ib] : probes) {
    const Vec& ta = grid.taus[ia];
    const Vec& tb = grid.taus[ib];
    // lhs = int K1(lambda, nu) K2(nu, rho) d nu; K(lambda,nu) in reduced
    // form is K(x_nu - x_lambda, tau_lambda, tau_nu)
    Cpx lhs(0, 0);
    for (std::size_t ti = 0; ti < nt; ++ti) {
      Cpx xacc(0, 0);
      for (const Vec& xv : grid.xs) {
        const Cpx k1 = gram_kernel_x(pure1, xv, ta, grid.taus[ti]);
        const Cpx k2 = gram_kernel_x(pure2, x_probe - xv, grid.taus[ti], tb);
        xacc += k1 * k2;
      }
      lhs += xacc * grid.dx * grid.dmu[ti];
    }
    const Cpx rhs = ip * gram_kernel_x(mixed, x_probe, ta, tb);
    const double denom = std::max({std::abs(rhs), std::abs(lhs), 1e-12});
    worst = std::max(worst, std::abs(lhs - rhs) / denom);
  }
  return worst;
}

}  // namespace warpfreq

#endif  // WARPFREQ_KERNELS_HPP
