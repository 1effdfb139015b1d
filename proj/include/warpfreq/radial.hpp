// warpfreq/radial.hpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef WARPFREQ_RADIAL_HPP
#define WARPFREQ_RADIAL_HPP

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <stdexcept>
#include <string>
#include <vector>

#include "warpfreq/fd.hpp"
#include "warpfreq/linalg.hpp"
#include "warpfreq/quadrature.hpp"
#include "warpfreq/warp.hpp"

namespace warpfreq {

/// A scalar frequency profile sigma on [0,inf): continuous, strictly
/// increasing, sigma(0) = 0, sigma -> inf. Built-ins carry closed-form
/// derivatives and inverses; custom maps fall back to finite differences
/// and bisection.
struct SigmaMap {
  std::string family = "custom";  // "log1p" | "power" | "custom"
  double p = 0.0;                 // exponent for the power family

  std::function<double(double)> eval;
  std::function<double(double, int)> deriv;      // m-th derivative, m >= 1
  std::function<double(double)> inv;             // sigma^{-1}
  std::function<double(double, int)> inv_deriv;  // m-th derivative of sigma^{-1}
};

inline SigmaMap sigma_log1p() {
  SigmaMap s;
  s.family = "log1p";
  s.eval = [](double x) { return std::log1p(x); };
  s.deriv = [](double x, int m) {
    double f = 1.0;
    for (int j = 1; j < m; ++j) f *= -j;
    return f / std::pow(1.0 + x, m);
  };
  s.inv = [](double y) { return std::expm1(y); };
  s.inv_deriv = [](double y, int) { return std::exp(y); };
  return s;
}

/// sigma(x) = (1+x)^{1/p} - 1, inverse (1+y)^p - 1.
inline SigmaMap sigma_power(double p) {
  if (p <= 0.0) throw std::invalid_argument("sigma_power: p > 0 required");
  SigmaMap s;
  s.family = "power";
  s.p = p;
  s.eval = [p](double x) { return std::pow(1.0 + x, 1.0 / p) - 1.0; };
  s.deriv = [p](double x, int m) {
    double c = 1.0, e = 1.0 / p;
    for (int j = 0; j < m; ++j) c *= (e - j);
    return c * std::pow(1.0 + x, e - m);
  };
  s.inv = [p](double y) { return std::pow(1.0 + y, p) - 1.0; };
  s.inv_deriv = [p](double y, int m) {
    double c = 1.0;
    for (int j = 0; j < m; ++j) c *= (p - j);
    return c * std::pow(1.0 + y, p - m);
  };
  return s;
}

/// Wraps an arbitrary profile. The inverse is found by expanding-bracket
/// bisection plus Newton polish; derivatives use iterated central
/// differences with step eps_mach^{1/(m+2)} * (1+x).
inline SigmaMap sigma_custom(std::function<double(double)> f,
                             std::function<double(double)> finv = nullptr) {
  SigmaMap s;
  s.family = "custom";
  s.eval = f;
  s.deriv = [f](double x, int m) {
    const double h = std::pow(2.220446049250313e-16, 1.0 / (m + 2)) * (1.0 + std::abs(x));
    return fd_scalar_deriv(f, x, m, h);
  };
  if (finv) {
    s.inv = finv;
  } else {
    s.inv = [f](double y) {
      if (y <= 0.0) return 0.0;
      double hi = 1.0;
      while (f(hi) < y) {
        hi *= 2.0;
        if (hi > 1e100) throw std::runtime_error("sigma_custom: inverse bracket failed");
      }
      double lo = 0.0;
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < y ? lo : hi) = mid;
        if (hi - lo <= 1e-15 * (1.0 + hi)) break;
      }
      return 0.5 * (lo + hi);
    };
  }
  auto inv_copy = s.inv;
  s.inv_deriv = [inv_copy](double y, int m) {
    const double h = std::pow(2.220446049250313e-16, 1.0 / (m + 2)) * (1.0 + std::abs(y));
    return fd_scalar_deriv(inv_copy, y, m, h);
  };
  return s;
}

/// Smooth bump supported on (eps, 2*eps), normalized to unit integral.
struct Mollifier {
  double eps = 1.0;
  std::function<double(double)> raw;  // un-normalized profile on (eps, 2eps)
  double norm_const = 1.0;

  double operator()(double t) const {
    if (t <= eps || t >= 2.0 * eps) return 0.0;
    return norm_const * raw(t);
  }

  static Mollifier standard_bump(double eps) {
    Mollifier m;
    m.eps = eps;
    m.raw = [eps](double t) {
      const double s = (2.0 * t - 3.0 * eps) / eps;
      const double q = 1.0 - s * s;
      return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
    };
    const double integral =
        adaptive_gl([&m](double t) { return m.raw(t); }, eps, 2.0 * eps, 1e-15, 24);
    if (!(integral > 0.0)) throw std::invalid_argument("mollifier: vanishing integral");
    m.norm_const = 1.0 / integral;
    return m;
  }

  static Mollifier custom(double eps, std::function<double(double)> raw) {
    Mollifier m;
    m.eps = eps;
    m.raw = std::move(raw);
    for (int i = 1; i < 64; ++i) {
      const double t = eps + (i / 64.0) * eps;
      if (m.raw(t) < 0.0) throw std::invalid_argument("mollifier: must be nonnegative");
    }
    const double integral =
        adaptive_gl([&m](double t) { return m.raw(t); }, eps, 2.0 * eps, 1e-15, 24);
    if (!(integral > 0.0)) throw std::invalid_argument("mollifier: vanishing integral");
    m.norm_const = 1.0 / integral;
    return m;
  }
};

/// Slow-start radial component: a strictly increasing antisymmetric scalar
/// diffeomorphism rho of R that equals c*xi on (-eps, eps), equals
/// sgn(xi)*sigma(|xi|) outside (-2eps, 2eps), and blends smoothly in
/// between through the mollified ramp Omega.
class RadialComponent {
 public:
  RadialComponent(SigmaMap sigma, double eps, double c, Mollifier phi, int order)
      : sigma_(std::move(sigma)), eps_(eps), c_(c), phi_(std::move(phi)), order_(order) {
    build_ramp_table();
    sigma_2eps_ = sigma_.eval(2.0 * eps_);
    build_inverse_table();
  }

  double eps() const { return eps_; }
  double slope() const { return c_; }
  int order() const { return order_; }
  const SigmaMap& sigma() const { return sigma_; }

  /// rho(x); exact branches on the linear region and on [2eps, inf).
  double rho(double x) const {
    if (x < 0.0) return -rho_pos(-x);
    return rho_pos(x);
  }

  double drho(double x) const { return drho_pos(std::abs(x)); }

  /// m-th derivative of rho at x (by parity for x < 0): closed form on the
  /// exact branches, finite differences through the blend.
  double rho_deriv(double x, int m) const {
    const double t = std::abs(x);
    double v;
    if (m == 1) {
      v = drho_pos(t);
    } else if (t < 0.5 * eps_) {
      v = 0.0;
    } else if (t >= 2.05 * eps_) {
      v = sigma_.deriv(t, m);
    } else {
      const double h = std::pow(2.220446049250313e-16, 1.0 / (m + 2)) * (1.0 + t);
      v = fd_scalar_deriv([this](double u) { return rho_pos(u); }, t, m, h);
    }
    if (x < 0.0 && m % 2 == 0) return -v;  // odd function: even derivs flip sign
    return v;
  }

  /// rho^{-1}; closed form outside the transition zone, bisection plus
  /// Newton polish (to 1e-14 relative) inside it.
  double rho_inv(double y) const {
    if (y < 0.0) return -rho_inv_pos(-y);
    return rho_inv_pos(y);
  }

  double drho_inv(double y) const { return 1.0 / drho(rho_inv(y)); }

  /// m-th derivative of rho^{-1} at y >= 0 (by parity elsewhere):
  /// closed form on the outer branches, finite differences in between.
  double rho_inv_deriv(double y, int m) const {
    const double t = std::abs(y);
    double v;
    if (m == 1) {
      v = drho_inv(t);
    } else if (t < c_ * eps_ * 0.5) {
      v = 0.0;
    } else if (t >= sigma_2eps_ * 1.05 && sigma_.inv_deriv) {
      v = sigma_.inv_deriv(t, m);
    } else {
      const double h = std::pow(2.220446049250313e-16, 1.0 / (m + 2)) * (1.0 + t);
      v = fd_scalar_deriv([this](double u) { return rho_inv_pos(u); }, t, m, h);
    }
    if (y < 0.0 && m % 2 == 0) return -v;  // odd function: even derivs flip sign
    return v;
  }

  /// rho(x)/x, continued by c through the origin.
  double rho_tilde(double x) const {
    const double t = std::abs(x);
    if (t < 0.5 * eps_) return c_;
    return rho_pos(t) / t;
  }

  /// rho^{-1}(y)/y, continued by 1/c. The constant branch stops at half the
  /// *image* linearity radius c*eps (not eps itself), since that is where
  /// the inverse is exactly linear.
  double rho_inv_tilde(double y) const {
    const double t = std::abs(y);
    if (t < 0.5 * c_ * eps_) return 1.0 / c_;
    return rho_inv_pos(t) / t;
  }

  double sigma_at_2eps() const { return sigma_2eps_; }

 private:
  double rho_pos(double t) const {
    if (t < eps_) return c_ * t;
    if (t >= 2.0 * eps_) return sigma_.eval(t);
    const double W = ramp(t);
    return c_ * t * (1.0 - W) + W * sigma_.eval(t);
  }

  double drho_pos(double t) const {
    if (t < eps_) return c_;
    if (t >= 2.0 * eps_) return sigma_.deriv(t, 1);
    const double W = ramp(t);
    return c_ * (1.0 - W) + W * sigma_.deriv(t, 1) + phi_(t) * (sigma_.eval(t) - c_ * t);
  }

  double rho_inv_pos(double u) const {
    if (u < c_ * eps_) return u / c_;
    if (u >= sigma_2eps_) return sigma_.inv(u);
    // transition zone maps [eps, 2eps] -> [c*eps, sigma(2eps)]; seed from
    // the tabulated inverse, then Newton-polish to 1e-14 relative
    const std::size_t n = inv_x_.size();
    std::size_t lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (inv_u_[mid] <= u ? lo : hi) = mid;
    }
    const double du = inv_u_[hi] - inv_u_[lo];
    double x = du > 0.0 ? inv_x_[lo] + (u - inv_u_[lo]) * (inv_x_[hi] - inv_x_[lo]) / du
                        : inv_x_[lo];
    for (int i = 0; i < 3; ++i) {
      const double f = rho_pos(x) - u;
      const double df = drho_pos(x);
      if (df <= 0.0) break;
      const double step = f / df;
      x -= step;
      if (x < eps_) x = eps_;
      if (x > 2.0 * eps_) x = 2.0 * eps_;
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(x))) break;
    }
    return x;
  }

  void build_inverse_table() {
    const int n = 2048;
    inv_x_.resize(n + 1);
    inv_u_.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
      const double x = eps_ + (static_cast<double>(i) / n) * eps_;
      inv_x_[static_cast<std::size_t>(i)] = x;
      inv_u_[static_cast<std::size_t>(i)] = rho_pos(x);
    }
  }

  // Cumulative mollifier mass W(t) = integral of phi over [eps, t], tabulated
  // once on [eps, 2eps] and evaluated by cubic Hermite interpolation (the
  // derivative phi is known exactly at the nodes).
  void build_ramp_table() {
    const int n = 2048;
    wnodes_.resize(n + 1);
    wvals_.resize(n + 1);
    const double h = eps_ / n;
    wnodes_[0] = eps_;
    wvals_[0] = 0.0;
    for (int i = 1; i <= n; ++i) {
      const double a = eps_ + (i - 1) * h, b = eps_ + i * h;
      wnodes_[static_cast<std::size_t>(i)] = b;
      wvals_[static_cast<std::size_t>(i)] =
          wvals_[static_cast<std::size_t>(i - 1)] +
          gl_integrate([this](double t) { return phi_(t); }, a, b, 16);
    }
    // renormalize the tabulated mass so W(2eps) = 1 exactly
    const double total = wvals_.back();
    if (!(total > 0.0)) throw std::invalid_argument("slow_start: mollifier mass vanished");
    for (auto& v : wvals_) v /= total;
    ramp_scale_ = 1.0 / total;
  }

  double ramp(double t) const {
    if (t <= eps_) return 0.0;
    if (t >= 2.0 * eps_) return 1.0;
    const double h = eps_ / (static_cast<double>(wnodes_.size()) - 1.0);
    std::size_t i = static_cast<std::size_t>((t - eps_) / h);
    if (i >= wvals_.size() - 1) i = wvals_.size() - 2;
    const double t0 = wnodes_[i], t1 = wnodes_[i + 1];
    const double u = (t - t0) / (t1 - t0);
    const double y0 = wvals_[i], y1 = wvals_[i + 1];
    const double d0 = ramp_scale_ * phi_(t0) * (t1 - t0);
    const double d1 = ramp_scale_ * phi_(t1) * (t1 - t0);
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * d0 +
           (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * d1;
  }

  SigmaMap sigma_;
  double eps_;
  double c_;
  Mollifier phi_;
  int order_;
  double sigma_2eps_ = 0.0;
  Vec wnodes_, wvals_;
  double ramp_scale_ = 1.0;
  Vec inv_x_, inv_u_;  // tabulated transition inverse (Newton seeds)
};

inline double default_slow_start_slope(const SigmaMap& sigma, double eps) {
  return 0.5 * sigma.eval(eps) / (2.0 * eps);
}

/// Builds the slow-start version of sigma. Omitting c (NaN) takes the
/// default slope, the midpoint of the admissible interval
/// (0, sigma(eps)/(2 eps)); explicit slopes outside that interval are
/// rejected.
inline std::shared_ptr<const RadialComponent> slow_start(
    const SigmaMap& sigma, double eps, double c = std::numeric_limits<double>::quiet_NaN(),
    const Mollifier* mollifier = nullptr, int order = 100) {
  if (!(eps > 0.0)) throw std::invalid_argument("slow_start: eps > 0 required");
  if (std::abs(sigma.eval(0.0)) > 1e-12)
    throw std::invalid_argument("slow_start: sigma(0) = 0 required");
  // reject non-increasing profiles on a sampled range
  double prev = 0.0;
  for (int i = 1; i <= 512; ++i) {
    const double x = (i / 512.0) * std::max(10.0, 4.0 * eps);
    const double v = sigma.eval(x);
    if (!(v > prev)) throw std::invalid_argument("slow_start: sigma must be strictly increasing");
    prev = v;
  }
  const double cmax = sigma.eval(eps) / (2.0 * eps);
  if (std::isnan(c)) c = 0.5 * cmax;
  if (!(c > 0.0 && c < cmax))
    throw std::invalid_argument("slow_start: slope c must lie in (0, sigma(eps)/(2 eps))");
  Mollifier phi = mollifier ? *mollifier : Mollifier::standard_bump(eps);
  if (std::abs(phi.eps - eps) > 1e-12 * (1.0 + eps))
    throw std::invalid_argument("slow_start: mollifier support must be (eps, 2 eps)");
  return std::make_shared<const RadialComponent>(sigma, eps, c, std::move(phi), order);
}

namespace detail {

// Control-weight base u(r) for the built-in sigma families.
inline bool radial_control_base(const SigmaMap& s, double& poly_exp, double& exp_rate) {
  if (s.family == "log1p") {
    poly_exp = 1.0;
    exp_rate = 1.0;
    return true;
  }
  if (s.family == "power") {
    poly_exp = 1.0 + std::abs(s.p - 1.0);
    exp_rate = 0.0;
    return true;
  }
  return false;
}

}  // namespace detail

/// Radial warp Phi(xi) = rho(|xi|)/|xi| * xi on D = R^d, with inverse
/// Phi_{rho^{-1}} and Jacobian split into the projections parallel and
/// orthogonal to the argument.
inline Warp make_radial_warp(std::shared_ptr<const RadialComponent> rc, int d) {
  if (d < 1) throw std::invalid_argument("make_radial_warp: d >= 1 required");
  if (!rc) throw std::invalid_argument("make_radial_warp: null radial component");

  Warp w;
  w.dim = d;
  w.domain = Domain::full_space(d);
  w.smoothness = rc->order();
  w.type = "radial";
  w.radial = rc;

  w.forward = [rc](const Vec& xi) {
    const double s = rc->rho_tilde(norm(xi));
    return s * xi;
  };
  w.inverse = [rc](const Vec& tau) {
    const double s = rc->rho_inv_tilde(norm(tau));
    return s * tau;
  };
  w.inv_jacobian = [rc, d](const Vec& tau) {
    const double r = norm(tau);
    const double tilde = rc->rho_inv_tilde(r);
    Mat m(d);
    if (r < 0.25 * rc->slope() * rc->eps()) {
      for (int i = 0; i < d; ++i) m(i, i) = tilde;
      return m;
    }
    const double dpar = rc->drho_inv(r);
    for (int i = 0; i < d; ++i) m(i, i) = tilde;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        m(i, j) += (dpar - tilde) * (tau[static_cast<std::size_t>(i)] / r) *
                   (tau[static_cast<std::size_t>(j)] / r);
    return m;
  };
  w.weight = [rc, d](const Vec& tau) {
    const double r = norm(tau);
    return rc->drho_inv(r) * std::pow(rc->rho_inv_tilde(r), d - 1);
  };

  // Ship v0(r) = C * (1+r)^a * e^{b r} for the built-in profile families,
  // with the constant fitted over the derivative orders |alpha| <= 2 on
  // the same log-radial net geometry that the admissibility checks use.
  // The net must resolve the slow-start transition zone, where the
  // inverse-profile derivatives peak like negative powers of the slope c.
  // Fits are memoized per parameter combination.
  double base_poly = 0.0, base_rate = 0.0;
  if (detail::radial_control_base(rc->sigma(), base_poly, base_rate)) {
    static std::map<std::tuple<std::string, double, double, double, int>, double> cache;
    static std::mutex cache_mtx;
    const auto key = std::make_tuple(rc->sigma().family, rc->sigma().p, rc->eps(),
                                     rc->slope(), d);
    double cfit = -1.0;
    {
      std::lock_guard<std::mutex> lock(cache_mtx);
      auto it = cache.find(key);
      if (it != cache.end()) cfit = it->second;
    }
    if (cfit < 0.0) {
      GridSpec tau_net{1e-2, 12.0, 10, d == 3 ? 6 : 6};
      GridSpec ups_net{1e-2, 12.0, 12, d == 3 ? 10 : 10};
      const auto tau_pts = tau_net.points(d);
      const auto ups_pts = ups_net.points(d);
      const auto alphas = multi_indices_up_to(d, std::min(2, rc->order()));
      cfit = 0.0;
      for (const Vec& tau : tau_pts) {
        const Mat a_tau_inv = inverse(w.inv_jacobian(tau));
        auto phi_fun = [&](const Vec& u) {
          return transpose(a_tau_inv * w.inv_jacobian(u + tau));
        };
        for (const Vec& ups : ups_pts) {
          const double base =
              std::pow(1.0 + norm(ups), base_poly) * std::exp(base_rate * norm(ups));
          for (const auto& alpha : alphas) {
            int total = 0;
            for (int ai : alpha) total += ai;
            Vec steps(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i)
              steps[static_cast<std::size_t>(i)] =
                  std::pow(2.220446049250313e-16, 1.0 / (total + 2)) *
                  (1.0 + std::abs(ups[static_cast<std::size_t>(i)]));
            const Mat der =
                total == 0 ? phi_fun(ups) : fd_partial_mat(phi_fun, ups, alpha, steps);
            cfit = std::max(cfit, op_norm(der) / base);
          }
        }
      }
      std::lock_guard<std::mutex> lock(cache_mtx);
      cache.emplace(key, cfit);
    }
    ControlWeight cw;
    cw.family = base_rate != 0.0 ? "exponential" : "polynomial";
    cw.constant = cfit * 2.5;
    cw.poly_exponent = base_poly;
    cw.exp_rate = base_rate;
    w.control = cw;
  }
  return w;
}

}  // namespace warpfreq

#endif  // WARPFREQ_RADIAL_HPP
