// tests/test_warpcore.cpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include <catch_amalgamated.hpp>

#include "warpfreq/fd.hpp"
#include "warpfreq/radial.hpp"
#include "warpfreq/rng.hpp"
#include "warpfreq/warp.hpp"

using namespace warpfreq;

namespace {

std::vector<Warp> builtin_warps() {
  std::vector<Warp> out;
  out.push_back(make_identity_warp(2));
  out.push_back(make_log_warp1d());
  out.push_back(make_separable_warp({make_log_warp1d(), make_log_warp1d()}));
  out.push_back(make_exotic2d_warp());
  out.push_back(make_radial_warp(slow_start(sigma_log1p(), 1.0), 2));
  out.push_back(make_radial_warp(slow_start(sigma_power(2.0), 1.0), 3));
  return out;
}

Vec random_domain_point(const Warp& w, Rng& rng) {
  Vec xi(static_cast<std::size_t>(w.dim));
  for (int i = 0; i < w.dim; ++i) {
    const bool bounded = w.domain.bounded_below(i);
    xi[static_cast<std::size_t>(i)] = bounded ? rng.uniform(0.05, 6.0) : rng.uniform(-6.0, 6.0);
  }
  return xi;
}

}  // namespace

TEST_CASE("identity warp basics") {
  auto w = make_identity_warp(2);
  REQUIRE(w.weight({1.5, -3.0}) == 1.0);
  const Mat a = w.inv_jacobian({1.5, -3.0});
  REQUIRE(a(0, 0) == 1.0);
  REQUIRE(a(0, 1) == 0.0);
  REQUIRE(a(1, 1) == 1.0);

  auto w1 = make_identity_warp(1);
  REQUIRE(w1.forward({7.0})[0] == 7.0);

  auto w3 = make_identity_warp(3);
  Rng rng(1);
  const Vec xi = rng.uniform_vec(3, -5, 5);
  REQUIRE(w3.inverse(w3.forward(xi)) == xi);

  REQUIRE_THROWS_AS(make_identity_warp(0), std::invalid_argument);
}

TEST_CASE("separable log warp values") {
  auto ll = make_separable_warp({make_log_warp1d(), make_log_warp1d()});
  REQUIRE(ll.weight({0.0, 0.0}) == Catch::Approx(1.0));
  auto l1 = make_separable_warp({make_log_warp1d()});
  REQUIRE(l1.weight({2.0}) == Catch::Approx(std::exp(2.0)));
  auto mix = make_separable_warp({make_identity_warp(1), make_log_warp1d()});
  const Vec out = mix.forward({3.0, 1.0});
  REQUIRE(out[0] == 3.0);
  REQUIRE(out[1] == 0.0);
  REQUIRE_THROWS_AS(mix.forward({1.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(make_separable_warp({make_identity_warp(2)}), std::invalid_argument);
}

TEST_CASE("exotic 2-d warp values") {
  auto w = make_exotic2d_warp();
  REQUIRE(w.weight({0.0, 0.0}) == 1.0);
  const Mat a0 = w.inv_jacobian({0.0, 0.0});
  REQUIRE(a0(0, 0) == 1.0);
  REQUIRE(a0(1, 1) == 1.0);
  REQUIRE(a0(0, 1) == 0.0);
  REQUIRE(w.weight({5.0, 1.0}) == Catch::Approx(std::exp(-1.0)));
  const Vec img = w.forward({2.0, std::log(3.0)});
  REQUIRE(img[0] == Catch::Approx(6.0).epsilon(1e-14));
  REQUIRE(img[1] == Catch::Approx(std::log(3.0)));
}

TEST_CASE("slow start construction") {
  const double c = 0.3 * std::log(2.0);
  auto rc = slow_start(sigma_log1p(), 1.0, c);
  SECTION("linear region is exact") {
    REQUIRE(rc->rho(0.5) == 0.5 * c);
    REQUIRE(rc->rho(-0.25) == c * -0.25);
  }
  SECTION("outer region equals sigma exactly") {
    REQUIRE(rc->rho(3.0) == std::log1p(3.0));
    REQUIRE(rc->rho(3.0) == Catch::Approx(std::log(4.0)));
  }
  SECTION("transition is bracketed and monotone") {
    const double v = rc->rho(1.5);
    REQUIRE(v > c * 1.5);
    REQUIRE(v < std::log(2.5));
    double prev = rc->rho(0.0);
    for (int i = 1; i <= 4000; ++i) {
      const double x = i * (4.0 / 4000.0);
      const double cur = rc->rho(x);
      REQUIRE(cur > prev);
      prev = cur;
    }
  }
  SECTION("antisymmetry is exact") {
    for (double x : {0.3, 0.9, 1.4, 2.7, 11.0}) REQUIRE(rc->rho(-x) == -rc->rho(x));
  }
  SECTION("inverse round trip") {
    for (double x : {0.01, 0.3, 1.2, 1.9, 5.0}) {
      const double y = rc->rho(x);
      REQUIRE(rc->rho_inv(y) == Catch::Approx(x).epsilon(1e-13));
    }
    // closed-form inverse on the outer branch
    REQUIRE(rc->rho_inv(std::log(4.0)) == Catch::Approx(3.0).epsilon(1e-14));
  }
  SECTION("higher derivatives agree with the profile on the branches") {
    // forward: rho = sigma outside 2 eps; inverse: rho* = sigma^{-1}
    REQUIRE(rc->rho_deriv(4.0, 2) == Catch::Approx(-1.0 / 25.0).epsilon(1e-12));
    REQUIRE(rc->rho_deriv(-4.0, 2) == Catch::Approx(1.0 / 25.0).epsilon(1e-12));
    REQUIRE(rc->rho_deriv(0.3, 2) == 0.0);
    REQUIRE(rc->rho_inv_deriv(2.0, 3) == Catch::Approx(std::exp(2.0)).epsilon(1e-12));
    REQUIRE(rc->rho_inv_deriv(0.05, 2) == 0.0);
    // finite-difference cross-check through the blend
    const double fd = fd_scalar_deriv([&](double u) { return rc->rho(u); }, 1.4, 2, 1e-4);
    REQUIRE(rc->rho_deriv(1.4, 2) == Catch::Approx(fd).margin(1e-4));
  }
  SECTION("rejects invalid slopes") {
    const double cmax = std::log(2.0) / 2.0;
    REQUIRE_THROWS_AS(slow_start(sigma_log1p(), 1.0, cmax * 1.01), std::invalid_argument);
    REQUIRE_THROWS_AS(slow_start(sigma_log1p(), 1.0, -0.1), std::invalid_argument);
  }
  SECTION("rejects non-increasing profiles") {
    REQUIRE_THROWS_AS(slow_start(sigma_custom([](double x) { return x * (2.0 - 0.2 * x); }), 1.0),
                      std::invalid_argument);
  }
}

TEST_CASE("radial warp weight and inverse") {
  auto rc = slow_start(sigma_log1p(), 1.0);
  const double c = rc->slope();
  for (int d : {1, 2, 3}) {
    auto w = make_radial_warp(rc, d);
    REQUIRE(w.weight(Vec(static_cast<std::size_t>(d), 0.0)) ==
            Catch::Approx(std::pow(c, -d)).epsilon(1e-12));
  }
  // outer-branch weight: rho* = e^t - 1 beyond sigma(2 eps), so
  // w(tau) = e^{|tau|} ((e^{|tau|} - 1)/|tau|)^{d-1}
  auto w3 = make_radial_warp(rc, 3);
  const double t = 2.4;  // >= sigma(2) = log(3)
  Vec tau{t / std::sqrt(3.0), t / std::sqrt(3.0), t / std::sqrt(3.0)};
  const double r = norm(tau);
  const double expected = std::exp(r) * std::pow((std::exp(r) - 1.0) / r, 2);
  REQUIRE(w3.weight(tau) == Catch::Approx(expected).epsilon(1e-12));

  // finite-difference Jacobian determinant oracle (Richardson)
  Rng rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    Vec p = rng.uniform_vec(3, -3.0, 3.0);
    const Mat jfd = fd_jacobian_richardson(w3.inverse, p, 1e-5 * (1.0 + norm(p)));
    REQUIRE(w3.weight(p) == Catch::Approx(det(jfd)).epsilon(1e-6));
  }
}

TEST_CASE("round trip, Jacobian consistency, weight positivity") {
  Rng rng(9);
  for (const Warp& w : builtin_warps()) {
    INFO("warp type " << w.type << " d=" << w.dim);
    double worst_rt = 0.0;
    for (int rep = 0; rep < 10000; ++rep) {
      const Vec xi = random_domain_point(w, rng);
      const Vec back = w.inverse(w.forward(xi));
      worst_rt = std::max(worst_rt, dist(back, xi) / (1.0 + norm(xi)));
    }
    REQUIRE(worst_rt <= 1e-10);

    for (int rep = 0; rep < 25; ++rep) {
      const Vec xi = random_domain_point(w, rng);
      const Vec tau = w.forward(xi);
      // A(Phi(xi)) * DPhi_fd(xi) = I
      const Mat dphi = fd_jacobian(w.forward, xi, 1e-6 * (1.0 + norm(xi)));
      const Mat prod = w.inv_jacobian(tau) * dphi;
      const Mat id = Mat::identity(w.dim);
      REQUIRE(op_norm(prod - id) < 1e-5);
      // w = det A exactly along the analytic path
      const double wv = w.weight(tau);
      REQUIRE(wv > 0.0);
      REQUIRE(std::abs(wv - det(w.inv_jacobian(tau))) <= 1e-12 * wv);
      // w matches the finite-difference determinant
      const Mat jfd = fd_jacobian_richardson(w.inverse, tau, 1e-5 * (1.0 + norm(tau)));
      REQUIRE(wv == Catch::Approx(det(jfd)).epsilon(1e-6));
    }
  }
}

TEST_CASE("phi_tau values and cocycle identity") {
  auto idw = make_identity_warp(2);
  const Mat p = phi_tau(idw, {0.4, -1.0}, {2.0, 0.7});
  REQUIRE(op_norm(p - Mat::identity(2)) < 1e-14);

  auto lg = make_log_warp1d();
  REQUIRE(phi_tau(lg, {0.0}, {1.0})(0, 0) == Catch::Approx(std::exp(1.0)));
  // ups = 0 gives the identity for any warp
  auto rw = make_radial_warp(slow_start(sigma_log1p(), 1.0), 2);
  REQUIRE(op_norm(phi_tau(rw, {0.3, 1.1}, {0.0, 0.0}) - Mat::identity(2)) < 1e-12);

  double cond = 0.0;
  phi_tau(rw, {0.3, 1.1}, {0.5, 0.5}, &cond);
  REQUIRE(cond >= 1.0);

  // cocycle: phi_{t0}(u) = phi_{t0+t}(u - t) phi_{t0}(t)
  Rng rng(4);
  for (const Warp& w : builtin_warps()) {
    INFO("warp type " << w.type);
    for (int rep = 0; rep < 50; ++rep) {
      const Vec t0 = rng.uniform_vec(w.dim, -2, 2);
      const Vec t = rng.uniform_vec(w.dim, -2, 2);
      const Vec u = rng.uniform_vec(w.dim, -2, 2);
      const Mat lhs = phi_tau(w, t0, u);
      const Mat rhs = phi_tau(w, t0 + t, u - t) * phi_tau(w, t0, t);
      REQUIRE(op_norm(lhs - rhs) <= 1e-10 * (1.0 + op_norm(lhs)));
    }
  }
}

TEST_CASE("phi_tau is sandwiched by the control weight") {
  Rng rng(12);
  for (const Warp& w : builtin_warps()) {
    if (!w.control) continue;
    INFO("warp type " << w.type << " d=" << w.dim);
    const ControlWeight& v0 = *w.control;
    for (int rep = 0; rep < 200; ++rep) {
      const Vec ups = rng.uniform_vec(w.dim, -3, 3);
      const Vec tau = rng.uniform_vec(w.dim, -3, 3);
      Vec gamma = rng.uniform_vec(w.dim, -1, 1);
      const double gn = norm(gamma);
      if (gn < 1e-9) continue;
      const Vec img = phi_tau(w, ups, tau) * gamma;
      const double bound = v0(tau);
      REQUIRE(norm(img) <= bound * gn * (1.0 + 1e-9));
      REQUIRE(norm(img) >= gn / bound * (1.0 - 1e-9));
    }
  }
}

TEST_CASE("projection split") {
  auto [par, perp] = projection_split({1.0, 0.0}, {3.0, 4.0});
  REQUIRE(par[0] == Catch::Approx(3.0));
  REQUIRE(par[1] == Catch::Approx(0.0));
  REQUIRE(perp[0] == Catch::Approx(0.0));
  REQUIRE(perp[1] == Catch::Approx(4.0));

  // eta parallel to xi
  auto [p2, q2] = projection_split({2.0, -1.0}, {4.0, -2.0});
  REQUIRE(norm(q2) < 1e-14);

  REQUIRE_THROWS_AS(projection_split({0.0, 0.0}, {1.0, 1.0}), std::invalid_argument);

  // the sqrt(2) estimate (full-scale sweep lives in the acceptance suite)
  Rng rng(21);
  for (int rep = 0; rep < 20000; ++rep) {
    const Vec xi = rng.uniform_vec(3, -5, 5);
    const Vec eta = rng.uniform_vec(3, -5, 5);
    if (norm(xi) < 1e-6 || norm(eta) < 1e-6) continue;
    const Vec eta0 = (1.0 / norm(eta)) * eta;
    const auto [pp, qq] = projection_split(xi, eta0);
    const double lhs = std::max(norm(xi), norm(eta)) * norm(qq);
    REQUIRE(lhs <= std::sqrt(2.0) * dist(xi, eta) * (1.0 + 1e-12));
  }
}

TEST_CASE("domain membership uses a deterministic interior margin") {
  auto lg = make_log_warp1d();
  REQUIRE(lg.domain.contains({1.0}));
  REQUIRE_FALSE(lg.domain.contains({0.0}));
  REQUIRE_FALSE(lg.domain.contains({-1.0}));
  REQUIRE_FALSE(lg.domain.contains({5e-10}));

  Domain box = Domain::box({0.0, -1.0}, {2.0, 1.0});
  REQUIRE(box.contains({1.0, 0.0}));
  REQUIRE_FALSE(box.contains({2.0, 0.0}));  // half-open at the top
  REQUIRE_FALSE(box.contains({1.0, 1.0}));
}
