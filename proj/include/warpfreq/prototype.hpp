// warpfreq/prototype.hpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef WARPFREQ_PROTOTYPE_HPP
#define WARPFREQ_PROTOTYPE_HPP

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "warpfreq/fd.hpp"
#include "warpfreq/linalg.hpp"
#include "warpfreq/quadrature.hpp"

namespace warpfreq {

/// Smooth window theta on warped-frequency space. Real-valued built-ins:
/// the Gaussian e^{-pi |u|^2} and the compactly supported bump
/// exp(-1/(1-|u/r|^2)) on B_r(0), which vanishes exactly outside B_r.
class Prototype {
 public:
  std::string family;                 // "gaussian" | "bump" | "custom"
  double support_radius = std::numeric_limits<double>::infinity();

  double operator()(const Vec& ups) const { return eval_(ups); }

  /// Partial derivative d^alpha theta: closed-form Hermite recurrence for
  /// the Gaussian, nested central differences otherwise.
  double deriv(const Vec& ups, const IVec& alpha) const {
    int total = 0;
    for (int a : alpha) total += a;
    if (total == 0) return eval_(ups);
    if (family == "gaussian") {
      double prod = 1.0;
      for (std::size_t i = 0; i < alpha.size(); ++i)
        prod *= gaussian_axis_deriv(ups[i], alpha[i]);
      return prod;
    }
    auto f = eval_;
    std::function<double(const Vec&, IVec)> rec = [&](const Vec& x, IVec a) -> double {
      int axis = -1;
      for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > 0) {
          axis = static_cast<int>(i);
          break;
        }
      if (axis < 0) return f(x);
      int tot = 0;
      for (int ai : a) tot += ai;
      const double h = std::pow(2.220446049250313e-16, 1.0 / (tot + 2)) *
                       (1.0 + std::abs(x[static_cast<std::size_t>(axis)]));
      a[static_cast<std::size_t>(axis)] -= 1;
      Vec xp = x, xm = x;
      xp[static_cast<std::size_t>(axis)] += h;
      xm[static_cast<std::size_t>(axis)] -= h;
      return (rec(xp, a) - rec(xm, a)) / (2.0 * h);
    };
    return rec(ups, IVec(alpha));
  }

  /// ||theta||_{L^2(R^d)}^2, computed once per dimension and cached.
  double l2_norm_sq(int d) const {
    std::lock_guard<std::mutex> lock(state_->mtx);
    auto it = state_->norms.find(d);
    if (it != state_->norms.end()) return it->second;
    double v;
    if (family == "gaussian") {
      v = std::pow(2.0, -0.5 * d);
    } else {
      // radial profile: |S^{d-1}| * int_0^R theta(t)^2 t^{d-1} dt
      const double R = support_radius;
      auto f1 = eval_;
      v = unit_sphere_area(d) *
          adaptive_gl(
              [&](double t) {
                Vec u(static_cast<std::size_t>(d), 0.0);
                u[0] = t;
                const double th = f1(u);
                return th * th * std::pow(t, d - 1);
              },
              0.0, std::isfinite(R) ? R : effective_radius(1e-14), 1e-14, 24);
    }
    state_->norms.emplace(d, v);
    return v;
  }

  /// Radius beyond which |theta| is certified below rel * theta-peak.
  double effective_radius(double rel = 1e-8) const {
    if (std::isfinite(support_radius)) return support_radius;
    return std::sqrt(std::log(1.0 / rel) / std::numbers::pi);
  }

  bool compact() const { return std::isfinite(support_radius); }

  static Prototype gaussian() {
    Prototype p;
    p.family = "gaussian";
    p.eval_ = [](const Vec& u) { return std::exp(-std::numbers::pi * norm2(u)); };
    p.state_ = std::make_shared<State>();
    return p;
  }

  static Prototype bump(double r) {
    if (!(r > 0.0)) throw std::invalid_argument("bump prototype: r > 0 required");
    Prototype p;
    p.family = "bump";
    p.support_radius = r;
    p.eval_ = [r](const Vec& u) {
      const double q = 1.0 - norm2(u) / (r * r);
      return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
    };
    p.state_ = std::make_shared<State>();
    return p;
  }

  /// Radial user-supplied window; support_radius may be infinite, in which
  /// case an effective radius must make the tails certifiable.
  static Prototype custom(std::function<double(const Vec&)> f, double support_radius) {
    Prototype p;
    p.family = "custom";
    p.support_radius = support_radius;
    p.eval_ = std::move(f);
    p.state_ = std::make_shared<State>();
    return p;
  }

 private:
  static double gaussian_axis_deriv(double x, int n) {
    // d^n/dx^n e^{-pi x^2} = (-sqrt(pi))^n H_n(sqrt(pi) x) e^{-pi x^2}
    const double s = std::sqrt(std::numbers::pi);
    const double t = s * x;
    double h0 = 1.0, h1 = 2.0 * t;
    double hn = n == 0 ? h0 : h1;
    for (int k = 1; k < n; ++k) {
      const double h2 = 2.0 * t * h1 - 2.0 * k * h0;
      h0 = h1;
      h1 = h2;
      hn = h2;
    }
    double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sign * std::pow(s, n) * hn * std::exp(-std::numbers::pi * x * x);
  }

  struct State {
    std::mutex mtx;
    std::map<int, double> norms;
  };

  std::function<double(const Vec&)> eval_;
  std::shared_ptr<State> state_;
};

}  // namespace warpfreq

#endif  // WARPFREQ_PROTOTYPE_HPP
