// warpfreq/admissibility.hpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef WARPFREQ_ADMISSIBILITY_HPP
#define WARPFREQ_ADMISSIBILITY_HPP

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "warpfreq/fd.hpp"
#include "warpfreq/parallel.hpp"
#include "warpfreq/radial.hpp"
#include "warpfreq/warp.hpp"

namespace warpfreq {

/// Result of one sampled admissibility check.
struct AdmissibilityReport {
  std::string condition;
  std::string grid;
  double worst_ratio = 0.0;
  std::map<std::string, double> constants;
  bool pass = false;
  double tolerance = 0.0;
  std::vector<Vec> worst_points;
};

/// Moderateness f(tau + ups) <= v(ups) f(tau) over all sampled pairs.
/// Reports the max ratio and a fitted constant (max ratio times 1.05).
inline AdmissibilityReport check_moderate(const std::function<double(const Vec&)>& f,
                                          const std::function<double(const Vec&)>& v,
                                          const GridSpec& grid, int d, double tol = 1e-9) {
  AdmissibilityReport rep;
  rep.condition = "moderate";
  rep.grid = grid.describe(d);
  rep.tolerance = tol;
  const auto pts = grid.points(d);
  for (const auto& p : pts) {
    const double fv = f(p), vv = v(p);
    if (fv < 0.0 || vv < 0.0 || !std::isfinite(fv) || !std::isfinite(vv))
      throw std::invalid_argument("check_moderate: negative or non-finite sample value");
  }
  // zero denominators count as an infinite ratio (failing), not an error
  double worst = 0.0;
  Vec wt, wu;
  for (const auto& tau : pts)
    for (const auto& ups : pts) {
      const double den = v(ups) * f(tau);
      const double num = f(tau + ups);
      const double ratio = den > 0.0 ? num / den
                                     : (num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      if (ratio > worst) {
        worst = ratio;
        wt = tau;
        wu = ups;
      }
    }
  rep.worst_ratio = worst;
  rep.constants["C"] = worst * 1.05;
  rep.pass = worst <= 1.0 + tol;
  rep.worst_points = {wt, wu};
  return rep;
}

inline AdmissibilityReport check_submultiplicative(const std::function<double(const Vec&)>& v,
                                                   const GridSpec& grid, int d,
                                                   double tol = 1e-9) {
  AdmissibilityReport rep = check_moderate(v, v, grid, d, tol);
  rep.condition = "submultiplicative";
  return rep;
}

/// Estimates all partial derivatives d^alpha phi_tau(ups), |alpha| <= k, by
/// nested central differences and reports the worst ||.|| / v0(ups) ratio
/// together with the fitted constant (worst ratio times 1.05). In
/// verification mode (fit_cap == 0) the check passes when the supplied v0
/// dominates outright; with fit_cap > 0, v0 is treated as the weight shape
/// and the check passes when a finite constant below the cap makes the
/// bound hold on the grid.
inline AdmissibilityReport check_phi_derivative_bound(
    const Warp& warp, const std::function<double(const Vec&)>& v0, int k,
    const GridSpec& grid = GridSpec{1e-2, 10.0, 16, 8}, double tol = 1e-6,
    double fit_cap = 0.0) {
  AdmissibilityReport rep;
  rep.condition = "phi-derivative-bound";
  rep.grid = grid.describe(warp.dim);
  rep.tolerance = tol;
  const int d = warp.dim;
  const auto pts = grid.points(d);
  const auto alphas = multi_indices_up_to(d, k);
  // embarrassingly parallel over the tau rows; deterministic reduction
  struct RowResult {
    double worst = 0.0;
    int breakdowns = 0;
    Vec wt, wu;
  };
  std::vector<RowResult> rows(pts.size());
  parallel_for(pts.size(), [&](std::size_t ti) {
    const Vec& tau = pts[ti];
    RowResult& row = rows[ti];
    const Mat a_inv = inverse(warp.inv_jacobian(tau));
    auto phi = [&](const Vec& u) { return transpose(a_inv * warp.inv_jacobian(u + tau)); };
    for (const auto& ups : pts) {
      const double denom = v0(ups);
      for (const auto& alpha : alphas) {
        int total = 0;
        for (int ai : alpha) total += ai;
        Vec steps(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i)
          steps[static_cast<std::size_t>(i)] =
              std::pow(2.220446049250313e-16, 1.0 / (total + 2)) *
              (1.0 + std::abs(ups[static_cast<std::size_t>(i)]));
        const Mat der = total == 0 ? phi(ups) : fd_partial_mat(phi, ups, alpha, steps);
        bool finite = true;
        for (double x : der.a) finite = finite && std::isfinite(x);
        if (!finite) {
          ++row.breakdowns;
          continue;
        }
        const double ratio = op_norm(der) / denom;
        if (ratio > row.worst) {
          row.worst = ratio;
          row.wt = tau;
          row.wu = ups;
        }
      }
    }
  });
  double worst = 0.0;
  int breakdowns = 0;
  Vec wt, wu;
  for (const auto& row : rows) {
    breakdowns += row.breakdowns;
    if (row.worst > worst) {
      worst = row.worst;
      wt = row.wt;
      wu = row.wu;
    }
  }
  rep.worst_ratio = worst;
  rep.constants["C"] = worst * 1.05;
  rep.constants["fd_breakdowns"] = static_cast<double>(breakdowns);
  if (fit_cap > 0.0)
    rep.pass = std::isfinite(worst) && worst * 1.05 <= fit_cap && breakdowns == 0;
  else
    rep.pass = worst <= 1.0 + tol && breakdowns == 0;
  rep.worst_points = {wt, wu};
  return rep;
}

struct WeakAdmissibilityCaps {
  double c0_floor = 0.2;   // the power-law lower bound must not degenerate
  double c1_cap = 1e3;     // exponential-growth cap on the inverse profile
  double u_constant_cap = 1e3;
};

/// Weak admissibility of a radial profile sigma on [delta, T]: fits the
/// derivative sandwich constants of the inverse profile and the u-moderation
/// constants, in both sandwich forms (the plain form against sigma*, and
/// the (1+xi)-weighted form against sigma*(xi)/xi). Pass requires finite
/// fits within the configured caps.
inline AdmissibilityReport check_weak_admissibility(
    const SigmaMap& sigma, double delta, int k, double T,
    const std::function<double(double)>& u, int n_grid = 96,
    const WeakAdmissibilityCaps& caps = {}) {
  AdmissibilityReport rep;
  rep.condition = "weak-admissibility";
  {
    std::ostringstream os;
    os << "uniform grid on [" << delta << ", " << T << "], " << n_grid << " points";
    rep.grid = os.str();
  }
  Vec xs(static_cast<std::size_t>(n_grid));
  for (int i = 0; i < n_grid; ++i)
    xs[static_cast<std::size_t>(i)] = delta + (T - delta) * i / (n_grid - 1.0);

  // monotonicity of sigma itself on the sampled range
  double prev = sigma.eval(0.0);
  for (int i = 1; i <= 64; ++i) {
    const double v = sigma.eval((i / 64.0) * T);
    if (!(v > prev)) throw std::invalid_argument("check_weak_admissibility: non-monotone sigma");
    prev = v;
  }

  Vec inv(static_cast<std::size_t>(n_grid)), dinv(static_cast<std::size_t>(n_grid));
  for (int i = 0; i < n_grid; ++i) {
    inv[static_cast<std::size_t>(i)] = sigma.inv(xs[static_cast<std::size_t>(i)]);
    dinv[static_cast<std::size_t>(i)] = sigma.inv_deriv(xs[static_cast<std::size_t>(i)], 1);
  }

  double c0 = std::numeric_limits<double>::infinity();
  double c1 = 0.0, c1_alt = 0.0;
  Vec worst_c0;
  for (int i = 0; i < n_grid; ++i) {
    const double x = xs[static_cast<std::size_t>(i)];
    const double lower = dinv[static_cast<std::size_t>(i)] * x / inv[static_cast<std::size_t>(i)];
    if (lower < c0) {
      c0 = lower;
      worst_c0 = {x};
    }
    c1 = std::max(c1, dinv[static_cast<std::size_t>(i)] / inv[static_cast<std::size_t>(i)]);
    c1_alt = std::max(c1_alt, dinv[static_cast<std::size_t>(i)] * x /
                                  ((1.0 + x) * inv[static_cast<std::size_t>(i)]));
  }

  double cmod = 0.0, cder = 0.0;
  for (int i = 0; i < n_grid; ++i)
    for (int j = 0; j < n_grid; ++j) {
      const double xi = xs[static_cast<std::size_t>(i)], eta = xs[static_cast<std::size_t>(j)];
      const double uv = u(std::abs(xi - eta));
      cmod = std::max(cmod, (inv[static_cast<std::size_t>(i)] / xi) /
                                ((inv[static_cast<std::size_t>(j)] / eta) * uv));
      for (int m = 1; m <= k + 1; ++m) {
        const double dm = std::abs(sigma.inv_deriv(xi, m));
        cder = std::max(cder, dm / (dinv[static_cast<std::size_t>(j)] * uv));
      }
    }

  rep.constants["C0"] = c0;
  rep.constants["C1"] = c1;
  rep.constants["C1_alt"] = c1_alt;
  rep.constants["Cmod"] = cmod * 1.05;
  rep.constants["Cder"] = cder * 1.05;
  rep.worst_ratio = std::max(cmod, cder);
  rep.worst_points = {worst_c0};
  rep.pass = std::isfinite(c0) && std::isfinite(c1) && std::isfinite(cmod) &&
             std::isfinite(cder) && c0 >= caps.c0_floor && c1 <= caps.c1_cap &&
             cmod <= caps.u_constant_cap && cder <= caps.u_constant_cap;
  return rep;
}

}  // namespace warpfreq

#endif  // WARPFREQ_ADMISSIBILITY_HPP
