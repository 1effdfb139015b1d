// warpfreq/fd.hpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef WARPFREQ_FD_HPP
#define WARPFREQ_FD_HPP

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "warpfreq/linalg.hpp"

namespace warpfreq {

/// Sampled evaluation net: log-spaced radii times a deterministic set of
/// directions, plus the origin. A falsification tool, not a proof.
struct GridSpec {
  double r_min = 1e-2;
  double r_max = 10.0;
  int n_radial = 64;
  int n_angular = 16;
  bool include_origin = true;

  std::vector<Vec> points(int d) const {
    std::vector<Vec> dirs;
    if (d == 1) {
      dirs = {{1.0}, {-1.0}};
    } else if (d == 2) {
      for (int i = 0; i < n_angular; ++i) {
        const double a = 2.0 * std::numbers::pi * i / n_angular;
        dirs.push_back({std::cos(a), std::sin(a)});
      }
    } else if (d == 3) {
      // Fibonacci sphere
      const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
      for (int i = 0; i < n_angular; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / n_angular;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        dirs.push_back({r * std::cos(ga * i), r * std::sin(ga * i), z});
      }
    } else {
      for (int i = 0; i < d; ++i)
        for (double s : {1.0, -1.0}) {
          Vec e(static_cast<std::size_t>(d), 0.0);
          e[static_cast<std::size_t>(i)] = s;
          dirs.push_back(e);
        }
      Vec diag(static_cast<std::size_t>(d), 1.0 / std::sqrt(static_cast<double>(d)));
      dirs.push_back(diag);
    }
    std::vector<Vec> pts;
    if (include_origin) pts.push_back(Vec(static_cast<std::size_t>(d), 0.0));
    for (int i = 0; i < n_radial; ++i) {
      const double t = n_radial == 1 ? 0.0 : static_cast<double>(i) / (n_radial - 1);
      const double r = r_min * std::pow(r_max / r_min, t);
      for (const auto& dir : dirs) pts.push_back(r * dir);
    }
    return pts;
  }

  std::string describe(int d) const {
    std::ostringstream os;
    os << "log radial net r in [" << r_min << ", " << r_max << "], " << n_radial
       << " radii x " << n_angular << " directions, d=" << d;
    return os.str();
  }
};

/// Central-difference Jacobian of F: R^d -> R^d at x, step h per axis.
inline Mat fd_jacobian(const std::function<Vec(const Vec&)>& F, const Vec& x, double h) {
  const int d = static_cast<int>(x.size());
  Mat J(d);
  for (int j = 0; j < d; ++j) {
    Vec xp = x, xm = x;
    xp[static_cast<std::size_t>(j)] += h;
    xm[static_cast<std::size_t>(j)] -= h;
    const Vec fp = F(xp), fm = F(xm);
    for (int i = 0; i < d; ++i)
      J(i, j) = (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) / (2.0 * h);
  }
  return J;
}

/// One step of Richardson extrapolation over the central difference:
/// (4 J(h/2) - J(h)) / 3, killing the leading O(h^2) term.
inline Mat fd_jacobian_richardson(const std::function<Vec(const Vec&)>& F, const Vec& x, double h) {
  const Mat j1 = fd_jacobian(F, x, h);
  const Mat j2 = fd_jacobian(F, x, 0.5 * h);
  Mat out(j1.n);
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] = (4.0 * j2.a[i] - j1.a[i]) / 3.0;
  return out;
}

/// Mixed partial d^alpha of a matrix-valued map by nested central
/// differences; steps[i] is the per-axis step.
inline Mat fd_partial_mat(const std::function<Mat(const Vec&)>& G, const Vec& ups,
                          const IVec& alpha, const Vec& steps) {
  int axis = -1;
  for (std::size_t i = 0; i < alpha.size(); ++i)
    if (alpha[i] > 0) {
      axis = static_cast<int>(i);
      break;
    }
  if (axis < 0) return G(ups);
  IVec rest = alpha;
  rest[static_cast<std::size_t>(axis)] -= 1;
  const double h = steps[static_cast<std::size_t>(axis)];
  Vec up = ups, um = ups;
  up[static_cast<std::size_t>(axis)] += h;
  um[static_cast<std::size_t>(axis)] -= h;
  const Mat gp = fd_partial_mat(G, up, rest, steps);
  const Mat gm = fd_partial_mat(G, um, rest, steps);
  Mat out(gp.n);
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] = (gp.a[i] - gm.a[i]) / (2.0 * h);
  return out;
}

/// m-th derivative of a scalar function by iterated central differences.
inline double fd_scalar_deriv(const std::function<double(double)>& f, double x, int m, double h) {
  if (m == 0) return f(x);
  if (m == 1) return (f(x + h) - f(x - h)) / (2.0 * h);
  auto lower = [&](double t) { return fd_scalar_deriv(f, t, m - 1, h); };
  return (lower(x + h) - lower(x - h)) / (2.0 * h);
}

/// Multi-index enumeration: all alpha in N_0^d with |alpha| <= k.
inline std::vector<IVec> multi_indices_up_to(int d, int k) {
  std::vector<IVec> out;
  IVec cur(static_cast<std::size_t>(d), 0);
  std::function<void(int, int)> rec = [&](int axis, int remaining) {
    if (axis == d) {
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      cur[static_cast<std::size_t>(axis)] = v;
      rec(axis + 1, remaining - v);
    }
    cur[static_cast<std::size_t>(axis)] = 0;
  };
  rec(0, k);
  return out;
}

}  // namespace warpfreq

#endif  // WARPFREQ_FD_HPP
