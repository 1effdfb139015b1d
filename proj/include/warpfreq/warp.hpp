// warpfreq/warp.hpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef WARPFREQ_WARP_HPP
#define WARPFREQ_WARP_HPP

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "warpfreq/linalg.hpp"

namespace warpfreq {

class RadialComponent;

/// Open frequency domain: a product of open intervals per axis, with
/// +-infinity for unbounded sides. Membership uses a half-open test with a
/// small interior margin so grid boundary points classify deterministically.
struct Domain {
  int dim = 0;
  Vec lo, hi;

  static Domain full_space(int d) {
    Domain dm;
    dm.dim = d;
    dm.lo.assign(static_cast<std::size_t>(d), -std::numeric_limits<double>::infinity());
    dm.hi.assign(static_cast<std::size_t>(d), std::numeric_limits<double>::infinity());
    return dm;
  }

  static Domain positive_orthant(int d) {
    Domain dm = full_space(d);
    for (auto& v : dm.lo) v = 0.0;
    return dm;
  }

  static Domain box(Vec lo_, Vec hi_) {
    Domain dm;
    dm.dim = static_cast<int>(lo_.size());
    dm.lo = std::move(lo_);
    dm.hi = std::move(hi_);
    return dm;
  }

  bool bounded_below(int i) const { return std::isfinite(lo[static_cast<std::size_t>(i)]); }
  bool bounded_above(int i) const { return std::isfinite(hi[static_cast<std::size_t>(i)]); }

  bool contains(const Vec& xi, double margin_rel = 1e-9) const {
    if (static_cast<int>(xi.size()) != dim) return false;
    for (int i = 0; i < dim; ++i) {
      const double x = xi[static_cast<std::size_t>(i)];
      if (bounded_below(i)) {
        const double eps = margin_rel * (1.0 + std::abs(lo[static_cast<std::size_t>(i)]));
        if (!(x >= lo[static_cast<std::size_t>(i)] + eps)) return false;
      }
      if (bounded_above(i)) {
        const double eps = margin_rel * (1.0 + std::abs(hi[static_cast<std::size_t>(i)]));
        if (!(x < hi[static_cast<std::size_t>(i)] - eps)) return false;
      }
    }
    return true;
  }
};

/// Submultiplicative, radially increasing control weight v0. Stored as a
/// function of |tau|; built-in families are C*(1+r)^a * e^(b*r).
struct ControlWeight {
  std::string family = "polynomial";  // "polynomial" | "exponential" | "custom"
  double constant = 1.0;
  double poly_exponent = 0.0;
  double exp_rate = 0.0;
  std::function<double(double)> custom;  // radial evaluator, used when family == "custom"

  double at_radius(double r) const {
    if (family == "custom") return custom(r);
    double v = constant * std::pow(1.0 + r, poly_exponent);
    if (exp_rate != 0.0) v *= std::exp(exp_rate * r);
    return v;
  }

  double operator()(const Vec& tau) const { return at_radius(norm(tau)); }

  static ControlWeight one() { return ControlWeight{}; }

  static ControlWeight polynomial(double c, double a) {
    ControlWeight w;
    w.family = "polynomial";
    w.constant = c;
    w.poly_exponent = a;
    return w;
  }

  /// C * (1+r)^a * e^r
  static ControlWeight exponential(double c, double a = 0.0) {
    ControlWeight w;
    w.family = "exponential";
    w.constant = c;
    w.poly_exponent = a;
    w.exp_rate = 1.0;
    return w;
  }
};

/// A warping function: a diffeomorphism Phi from the open frequency domain
/// D onto R^d, together with its inverse, the inverse Jacobian
/// A(tau) = D(Phi^{-1})(tau), and the weight w(tau) = det A(tau) > 0.
/// Immutable after construction; all evaluators are pure.
struct Warp {
  int dim = 0;
  Domain domain;
  int smoothness = 0;  // evaluations of A are C^k along the checked stencils

  std::function<Vec(const Vec&)> forward;        // Phi
  std::function<Vec(const Vec&)> inverse;        // Phi^{-1}
  std::function<Mat(const Vec&)> inv_jacobian;   // A(tau)
  std::function<double(const Vec&)> weight;      // w(tau) = det A(tau)

  std::optional<ControlWeight> control;  // v0, when the construction provides one

  // descriptor payload for serialization
  std::string type;
  std::vector<Warp> components;                      // separable
  std::shared_ptr<const RadialComponent> radial;     // radial
};

inline Warp make_identity_warp(int d) {
  if (d < 1) throw std::invalid_argument("make_identity_warp: d >= 1 required");
  Warp w;
  w.dim = d;
  w.domain = Domain::full_space(d);
  w.smoothness = 100;
  w.forward = [](const Vec& xi) { return xi; };
  w.inverse = [](const Vec& tau) { return tau; };
  w.inv_jacobian = [d](const Vec&) { return Mat::identity(d); };
  w.weight = [](const Vec&) { return 1.0; };
  w.control = ControlWeight::one();
  w.type = "identity";
  return w;
}

/// The 1-d logarithmic warp Phi = log on D = (0, inf); Phi^{-1} = exp and
/// w(tau) = e^tau. Serves as a separable component for anisotropic wavelets.
inline Warp make_log_warp1d() {
  Warp w;
  w.dim = 1;
  w.domain = Domain::positive_orthant(1);
  w.smoothness = 100;
  w.forward = [](const Vec& xi) { return Vec{std::log(xi[0])}; };
  w.inverse = [](const Vec& tau) { return Vec{std::exp(tau[0])}; };
  w.inv_jacobian = [](const Vec& tau) {
    Mat m(1);
    m(0, 0) = std::exp(tau[0]);
    return m;
  };
  w.weight = [](const Vec& tau) { return std::exp(tau[0]); };
  w.control = ControlWeight::exponential(1.0);
  w.type = "log";
  return w;
}

inline Warp make_separable_warp(std::vector<Warp> comps) {
  if (comps.empty()) throw std::invalid_argument("make_separable_warp: no components");
  for (const auto& c : comps)
    if (c.dim != 1) throw std::invalid_argument("make_separable_warp: components must be 1-d");
  const int d = static_cast<int>(comps.size());

  Warp w;
  w.dim = d;
  Vec lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    lo[static_cast<std::size_t>(i)] = comps[static_cast<std::size_t>(i)].domain.lo[0];
    hi[static_cast<std::size_t>(i)] = comps[static_cast<std::size_t>(i)].domain.hi[0];
  }
  w.domain = Domain::box(std::move(lo), std::move(hi));
  w.smoothness = 100;
  for (const auto& c : comps) w.smoothness = std::min(w.smoothness, c.smoothness);

  auto shared = std::make_shared<std::vector<Warp>>(comps);
  w.forward = [shared, d](const Vec& xi) {
    if (static_cast<int>(xi.size()) != d)
      throw std::invalid_argument("separable warp: dimension mismatch");
    Vec out(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
      out[static_cast<std::size_t>(i)] = (*shared)[static_cast<std::size_t>(i)].forward({xi[static_cast<std::size_t>(i)]})[0];
    return out;
  };
  w.inverse = [shared, d](const Vec& tau) {
    if (static_cast<int>(tau.size()) != d)
      throw std::invalid_argument("separable warp: dimension mismatch");
    Vec out(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
      out[static_cast<std::size_t>(i)] = (*shared)[static_cast<std::size_t>(i)].inverse({tau[static_cast<std::size_t>(i)]})[0];
    return out;
  };
  w.inv_jacobian = [shared, d](const Vec& tau) {
    Mat m(d);
    for (int i = 0; i < d; ++i)
      m(i, i) = (*shared)[static_cast<std::size_t>(i)].inv_jacobian({tau[static_cast<std::size_t>(i)]})(0, 0);
    return m;
  };
  w.weight = [shared, d](const Vec& tau) {
    double p = 1.0;
    for (int i = 0; i < d; ++i)
      p *= (*shared)[static_cast<std::size_t>(i)].weight({tau[static_cast<std::size_t>(i)]});
    return p;
  };

  // v0(r) = max_i v0_i(r); the diagonal structure makes per-axis bounds
  // carry over, and a max of submultiplicative radial weights stays one.
  bool all_control = true;
  for (const auto& c : comps) all_control = all_control && c.control.has_value();
  if (all_control) {
    std::vector<ControlWeight> cws;
    for (const auto& c : comps) cws.push_back(*c.control);
    ControlWeight cw;
    cw.family = "custom";
    cw.custom = [cws](double r) {
      double m = 0.0;
      for (const auto& c : cws) m = std::max(m, c.at_radius(r));
      return m;
    };
    w.control = cw;
  }
  w.type = "separable";
  w.components = std::move(comps);
  return w;
}

/// The explicit non-separable, non-radial 2-d example
/// Phi(xi) = (e^{xi_2} xi_1, xi_2) with w(tau) = e^{-tau_2}.
inline Warp make_exotic2d_warp() {
  Warp w;
  w.dim = 2;
  w.domain = Domain::full_space(2);
  w.smoothness = 100;
  w.forward = [](const Vec& xi) { return Vec{std::exp(xi[1]) * xi[0], xi[1]}; };
  w.inverse = [](const Vec& tau) { return Vec{std::exp(-tau[1]) * tau[0], tau[1]}; };
  w.inv_jacobian = [](const Vec& tau) {
    Mat m(2);
    const double e = std::exp(-tau[1]);
    m(0, 0) = e;
    m(0, 1) = -e * tau[0];
    m(1, 0) = 0.0;
    m(1, 1) = 1.0;
    return m;
  };
  w.weight = [](const Vec& tau) { return std::exp(-tau[1]); };
  // no control weight: the regularity ratio A^{-1}(tau) A(ups+tau) is
  // unbounded in tau_1, so no radially increasing v0 can dominate it
  w.type = "exotic2d";
  return w;
}

/// phi_tau(ups) = (A^{-1}(tau) A(ups+tau))^T, the regularity ratio of the
/// inverse Jacobian. When cond_out is given, receives the spectral
/// condition number of A(tau) as a near-singularity diagnostic.
inline Mat phi_tau(const Warp& w, const Vec& tau, const Vec& ups, double* cond_out = nullptr) {
  const Mat a_tau = w.inv_jacobian(tau);
  if (cond_out) *cond_out = cond2(a_tau);
  return transpose(inverse(a_tau) * w.inv_jacobian(ups + tau));
}

/// Splits eta into its components parallel and orthogonal to xi.
inline std::pair<Vec, Vec> projection_split(const Vec& xi, const Vec& eta) {
  const double n2 = norm2(xi);
  if (n2 == 0.0) throw std::invalid_argument("projection_split: xi must be nonzero");
  const double c = dot(eta, xi) / n2;
  Vec par = c * xi;
  Vec perp = eta - par;
  return {std::move(par), std::move(perp)};
}

}  // namespace warpfreq

#endif  // WARPFREQ_WARP_HPP
