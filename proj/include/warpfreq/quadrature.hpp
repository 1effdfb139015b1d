// warpfreq/quadrature.hpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef WARPFREQ_QUADRATURE_HPP
#define WARPFREQ_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "warpfreq/linalg.hpp"

namespace warpfreq {

/// Value plus its refinement trail; converged means the last two refinement
/// levels agreed to the requested tolerance.
struct Refined {
  double value = 0.0;
  std::vector<double> history;
  bool converged = false;
};

/// Gauss-Legendre nodes/weights on [-1,1], cached per order.
inline const std::pair<Vec, Vec>& gauss_legendre(int n) {
  static std::map<int, std::pair<Vec, Vec>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Vec x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Newton iteration from the Chebyshev initial guess.
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[static_cast<std::size_t>(i)] = t;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

inline double gl_integrate(const std::function<double(double)>& f, double a, double b, int order) {
  const auto& [x, w] = gauss_legendre(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(mid + half * x[i]);
  return s * half;
}

/// Adaptive panel-splitting Gauss-Legendre on [a,b].
inline double adaptive_gl(const std::function<double(double)>& f, double a, double b,
                          double tol, int order = 20, int max_depth = 24) {
  struct Rec {
    static double go(const std::function<double(double)>& f, double a, double b,
                     double whole, double tol, int order, int depth) {
      const double m = 0.5 * (a + b);
      const double left = gl_integrate(f, a, m, order);
      const double right = gl_integrate(f, m, b, order);
      if (depth <= 0 || std::abs(left + right - whole) <= tol)
        return left + right;
      return go(f, a, m, left, 0.5 * tol, order, depth - 1) +
             go(f, m, b, right, 0.5 * tol, order, depth - 1);
    }
  };
  const double whole = gl_integrate(f, a, b, order);
  return Rec::go(f, a, b, whole, tol, order, max_depth);
}

/// Midpoint rule over a box, refined by doubling until two consecutive
/// levels agree; best suited to smooth integrands that vanish (with all
/// derivatives) at the box boundary.
inline Refined midpoint_box(const std::function<double(const Vec&)>& f,
                            const Vec& lo, const Vec& hi, int n0, double rel_tol,
                            int max_level = 6) {
  const int d = static_cast<int>(lo.size());
  Refined out;
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
    double sum = 0.0;
    Vec pt(static_cast<std::size_t>(d));
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx;
      for (int i = d - 1; i >= 0; --i) {
        const std::size_t q = rem % static_cast<std::size_t>(n);
        rem /= static_cast<std::size_t>(n);
        pt[static_cast<std::size_t>(i)] = lo[i] + (static_cast<double>(q) + 0.5) * h[static_cast<std::size_t>(i)];
      }
      sum += f(pt);
    }
    const double val = sum * cellvol;
    out.history.push_back(val);
    if (level > 0) {
      const double prev = out.history[out.history.size() - 2];
      if (std::abs(val - prev) <= rel_tol * (std::abs(val) + 1e-300)) {
        out.value = val;
        out.converged = true;
        return out;
      }
    }
    out.value = val;
  }
  return out;
}

/// Integral of f over the Euclidean ball B_r(center) in dimension d <= 3,
/// in polar form: Gauss-Legendre radially, exact-degree angular rules
/// (endpoints for d=1, uniform circle for d=2, product rule for d=3).
inline Refined ball_integral(const std::function<double(const Vec&)>& f,
                             const Vec& center, double r, double rel_tol,
                             int n0 = 16, int max_level = 5) {
  const int d = static_cast<int>(center.size());
  if (d > 3) throw std::invalid_argument("ball_integral: only d <= 3 supported");
  Refined out;
  int n = n0;
  for (int level = 0; level < max_level; ++level, n *= 2) {
    const auto& [gx, gw] = gauss_legendre(n);
    double total = 0.0;
    Vec pt(static_cast<std::size_t>(d));
    for (std::size_t ir = 0; ir < gx.size(); ++ir) {
      const double rr = 0.5 * r * (gx[ir] + 1.0);
      const double wr = 0.5 * r * gw[ir];
      double shell = 0.0;
      if (d == 1) {
        pt[0] = center[0] + rr;
        shell += f(pt);
        pt[0] = center[0] - rr;
        shell += f(pt);
      } else if (d == 2) {
        const int na = 4 * n;
        const double da = 2.0 * std::numbers::pi / na;
        double s = 0.0;
        for (int ia = 0; ia < na; ++ia) {
          const double a = da * ia;
          pt[0] = center[0] + rr * std::cos(a);
          pt[1] = center[1] + rr * std::sin(a);
          s += f(pt);
        }
        shell = s * da * rr;
      } else {
        const auto& [cx, cw] = gauss_legendre(n);  // cos(theta) in [-1,1]
        const int na = 2 * n;
        const double da = 2.0 * std::numbers::pi / na;
        double s = 0.0;
        for (std::size_t ic = 0; ic < cx.size(); ++ic) {
          const double ct = cx[ic], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
          double ring = 0.0;
          for (int ia = 0; ia < na; ++ia) {
            const double a = da * ia;
            pt[0] = center[0] + rr * st * std::cos(a);
            pt[1] = center[1] + rr * st * std::sin(a);
            pt[2] = center[2] + rr * ct;
            ring += f(pt);
          }
          s += cw[ic] * ring * da;
        }
        shell = s * rr * rr;
      }
      total += wr * shell;
    }
    out.history.push_back(total);
    if (level > 0) {
      const double prev = out.history[out.history.size() - 2];
      if (std::abs(total - prev) <= rel_tol * (std::abs(total) + 1e-300)) {
        out.value = total;
        out.converged = true;
        return out;
      }
    }
    out.value = total;
  }
  return out;
}

/// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

/// Surface area of the unit sphere S^{d-1}.
inline double unit_sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

}  // namespace warpfreq

#endif  // WARPFREQ_QUADRATURE_HPP
