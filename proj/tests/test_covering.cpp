// tests/test_covering.cpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include <catch_amalgamated.hpp>

#include <set>

#include "warpfreq/covering.hpp"
#include "warpfreq/radial.hpp"
#include "warpfreq/rng.hpp"

using namespace warpfreq;

TEST_CASE("identity covering, d=1, delta=1") {
  auto w = make_identity_warp(1);
  auto cov = build_covering(w, 1.0, {-0.5}, {0.5}, {-3.0}, {3.0});

  std::set<int> ks;
  for (const auto& sh : cov.shells()) ks.insert(sh.k[0]);
  REQUIRE(ks == std::set<int>{-1, 0, 1});

  // Q_k = (k-1, k+1): membership through cells_containing
  REQUIRE_FALSE(cov.cells_containing({0.0}, {1.05}).empty());
  {
    // 0.5 lies in Q_0 = (-1,1) and Q_1 = (0,2)
    std::set<int> hit;
    for (auto ci : cov.cells_containing({0.0}, {0.5})) hit.insert(cov.k_of(ci)[0]);
    REQUIRE(hit == std::set<int>{0, 1});
  }

  // time-cell center = A^{-T}(delta k) <delta l> = l here
  const std::size_t c01 = cov.index_of({2}, {0});
  REQUIRE(cov.time_center(c01)[0] == Catch::Approx(2.0));

  // measures: intervals of length 2, w = 1
  const auto [mu1, mu2] = cov.cell_measures(c01);
  REQUIRE(mu1 == Catch::Approx(2.0));
  REQUIRE(mu2 == Catch::Approx(2.0).epsilon(1e-9));
  REQUIRE(cov.covering_weight(c01) == Catch::Approx(1.0));

  // neighbors of (0,0): the 3x3 block including itself
  auto nb = cov.neighbors(cov.index_of({0}, {0}));
  std::set<std::pair<int, int>> got;
  for (auto ci : nb) got.insert({cov.l_of(ci)[0], cov.k_of(ci)[0]});
  REQUIRE(got.count({0, 1}) == 1);
  REQUIRE(got.count({0, -1}) == 1);
  REQUIRE(got.count({1, 0}) == 1);
  REQUIRE(got.count({-1, 0}) == 1);
  REQUIRE(got.count({0, 0}) == 1);
  REQUIRE(got.size() == 9);
  // tangent cells |l - l0| = 2 are open-disjoint
  REQUIRE(got.count({2, 0}) == 0);
}

TEST_CASE("log warp frequency cell is the exponential preimage") {
  auto lg = make_log_warp1d();
  auto cov = build_covering(lg, 1.0, {0.5}, {2.5}, {-2.0}, {2.0});
  // Q_0 = Phi^{-1}((-1,1)) = (1/e, e)
  bool found = false;
  for (const auto& sh : cov.shells())
    if (sh.k[0] == 0) {
      found = true;
      REQUIRE(sh.freq_center[0] == Catch::Approx(1.0));
      REQUIRE(sh.fb_lo[0] <= std::exp(-1.0));
      REQUIRE(sh.fb_hi[0] >= std::exp(1.0));
    }
  REQUIRE(found);
  // membership at the edges of Q_0
  auto inside = cov.cells_containing({0.0}, {std::exp(-1.0) + 1e-3});
  bool k0 = false;
  for (auto ci : inside) k0 = k0 || cov.k_of(ci)[0] == 0;
  REQUIRE(k0);
  bool k0_out = false;
  for (auto ci : cov.cells_containing({0.0}, {std::exp(1.0) + 1e-3}))
    k0_out = k0_out || cov.k_of(ci)[0] == 0;
  REQUIRE_FALSE(k0_out);
}

TEST_CASE("identity d=2 disc measure") {
  auto w = make_identity_warp(2);
  auto cov = build_covering(w, 0.5, {-0.4, -0.4}, {0.4, 0.4}, {-1.0, -1.0}, {1.0, 1.0});
  const auto& sh = cov.shells().front();
  REQUIRE(sh.mu2_converged);
  REQUIRE(sh.mu2 == Catch::Approx(std::numbers::pi * 0.25).epsilon(1e-8));
}

TEST_CASE("errors on a box touching the domain boundary") {
  auto lg = make_log_warp1d();
  REQUIRE_THROWS_AS(build_covering(lg, 1.0, {0.0}, {2.0}, {-1.0}, {1.0}),
                    std::invalid_argument);
}

TEST_CASE("disjointness prefilter is exact and neighbor counts are bounded") {
  auto rc = slow_start(sigma_log1p(), 1.0);
  for (int d : {1, 2}) {
    auto w = make_radial_warp(rc, d);
    const double delta = 0.5;
    Vec blo(static_cast<std::size_t>(d), -2.0), bhi(static_cast<std::size_t>(d), 2.0);
    Vec tlo(static_cast<std::size_t>(d), -1.0), thi(static_cast<std::size_t>(d), 1.0);
    auto cov = build_covering(w, delta, blo, bhi, tlo, thi);
    REQUIRE(cov.size() > 0);

    const double v0d = (*w.control).at_radius(2.0 * delta);
    const double bound = std::pow(1.0 + 4.0 * d, d) *
                         std::pow(1.0 + 2.0 * std::sqrt(static_cast<double>(d)) * (1.0 + v0d), d);

    Rng rng(3);
    std::vector<std::size_t> sample;
    for (int i = 0; i < 40; ++i)
      sample.push_back(static_cast<std::size_t>(rng.uniform01() * cov.size()) % cov.size());
    for (std::size_t ci : sample) {
      auto nb = cov.neighbors(ci);
      REQUIRE(static_cast<double>(nb.size()) <= bound);
      // brute force: cells beyond the 2 sqrt(d) shell never intersect
      for (std::size_t cj : nb) {
        double kk = 0.0;
        for (int i = 0; i < d; ++i) {
          const double dk = cov.k_of(ci)[static_cast<std::size_t>(i)] -
                            cov.k_of(cj)[static_cast<std::size_t>(i)];
          kk += dk * dk;
        }
        REQUIRE(std::sqrt(kk) <= 2.0 * std::sqrt(static_cast<double>(d)));
      }
    }
  }
}

TEST_CASE("measure sandwich for built-in warps") {
  // [v0(delta)]^{-d} <= mu(V)/(vol(B_1)^2 delta^{2d}) <= [v0(delta)]^{d}
  auto rc = slow_start(sigma_log1p(), 1.0);
  for (double delta : {0.25, 0.5, 1.0}) {
    for (int d : {1, 2}) {
      auto w = make_radial_warp(rc, d);
      Vec blo(static_cast<std::size_t>(d), -2.0), bhi(static_cast<std::size_t>(d), 2.0);
      Vec tlo(static_cast<std::size_t>(d), -0.5), thi(static_cast<std::size_t>(d), 0.5);
      auto cov = build_covering(w, delta, blo, bhi, tlo, thi);
      const double v0 = (*w.control).at_radius(delta);
      const double denom = std::pow(unit_ball_volume(d), 2) * std::pow(delta, 2 * d);
      for (const auto& sh : cov.shells()) {
        const double ratio = sh.mu1 * sh.mu2 / denom;
        REQUIRE(ratio <= std::pow(v0, d) * (1.0 + 1e-9));
        REQUIRE(ratio >= std::pow(v0, -d) * (1.0 - 1e-9));
      }
    }
  }
}

TEST_CASE("covering weight moderate on neighbors") {
  auto w = make_radial_warp(slow_start(sigma_log1p(), 1.0), 1);
  auto cov = build_covering(w, 0.5, {-6.0}, {6.0}, {-2.0}, {2.0});
  double worst = 0.0;
  Rng rng(5);
  for (int i = 0; i < 30; ++i) {
    const std::size_t ci = static_cast<std::size_t>(rng.uniform01() * cov.size()) % cov.size();
    for (std::size_t cj : cov.neighbors(ci))
      worst = std::max(worst, cov.covering_weight(ci) / cov.covering_weight(cj));
  }
  REQUIRE(std::isfinite(worst));
  REQUIRE(worst < 50.0);
}

TEST_CASE("covering weight formula") {
  // min{1, mu1, mu2, mu1 mu2}
  auto w = make_identity_warp(1);
  auto cov = build_covering(w, 1.0, {-0.5}, {0.5}, {-2.0}, {2.0});
  const std::size_t ci = cov.index_of({0}, {0});
  REQUIRE(cov.covering_weight(ci) == Catch::Approx(1.0));  // mu1 = mu2 = 2
  auto cov_small = build_covering(w, 0.25, {-0.5}, {0.5}, {-2.0}, {2.0});
  const std::size_t cs = cov_small.index_of({0}, {0});
  const auto [m1, m2] = cov_small.cell_measures(cs);
  REQUIRE(cov_small.covering_weight(cs) ==
          Catch::Approx(std::min(std::min(1.0, m1), std::min(m2, m1 * m2))));
}

TEST_CASE("discrete weights") {
  auto w = make_identity_warp(1);
  auto cov = build_covering(w, 1.0, {-0.5}, {0.5}, {-2.0}, {2.0});
  auto one = [](const Vec&, const Vec&) { return 1.0; };
  Vec flat, sharp;
  cov.discrete_weights(one, 1.0, 1.0, flat, sharp);
  for (std::size_t c = 0; c < cov.size(); ++c) {
    REQUIRE(flat[c] == Catch::Approx(4.0).epsilon(1e-8));   // mu1 mu2 = 4
    REQUIRE(sharp[c] == Catch::Approx(1.0).epsilon(1e-8));  // exponents 1/p - 1 = 0
  }
  const double inf = std::numeric_limits<double>::infinity();
  cov.discrete_weights(one, inf, inf, flat, sharp);
  for (std::size_t c = 0; c < cov.size(); ++c) {
    REQUIRE(flat[c] == Catch::Approx(1.0));
    REQUIRE(sharp[c] == Catch::Approx(0.25).epsilon(1e-8));
  }
  cov.discrete_weights(one, 2.0, 2.0, flat, sharp);
  for (std::size_t c = 0; c < cov.size(); ++c)
    REQUIRE(flat[c] == Catch::Approx(2.0).epsilon(1e-8));  // sqrt(2) sqrt(2)
}

TEST_CASE("oscillation superset contains every cell holding the point") {
  auto w = make_identity_warp(2);
  auto cov = build_covering(w, 0.5, {-1.0, -1.0}, {1.0, 1.0}, {-1.0, -1.0}, {1.0, 1.0});
  const Vec y{0.2, -0.1}, om{0.3, 0.4};
  auto sup = cov.oscillation_superset(y, om);
  // identity with v0 = 1: P = B_{2 delta}(0), Q = B_{2 delta}(omega)
  REQUIRE(sup.freq_set.radius == Catch::Approx(1.0));
  REQUIRE(sup.time_set.r == Catch::Approx(1.0));
  REQUIRE(sup.time_set.contains(y));

  // sampled inclusion: probe points of each containing cell lie inside
  Rng rng(8);
  for (std::size_t ci : cov.cells_containing(y, om)) {
    const Ellipsoid tc = cov.time_cell(ci);
    const auto& sh = cov.shell_of(ci);
    for (int rep = 0; rep < 50; ++rep) {
      Vec u = rng.uniform_vec(2, -1, 1);
      if (norm(u) >= 1.0) continue;
      const Vec yp = tc.M * (tc.center_u + cov.delta() * u);
      REQUIRE(sup.time_set.contains(yp));
      Vec tf = sh.tau;
      Vec uf = rng.uniform_vec(2, -1, 1);
      if (norm(uf) < 1.0) {
        for (int i = 0; i < 2; ++i) tf[static_cast<std::size_t>(i)] += cov.delta() * uf[static_cast<std::size_t>(i)];
        REQUIRE(dist(tf, sup.freq_set.tau_center) < sup.freq_set.radius + 1e-12);
      }
    }
  }

  // shrinking delta shrinks the superset diameters monotonically
  double prev_r = 1e100;
  for (double dd : {1.0, 0.5, 0.25}) {
    auto c2 = build_covering(w, dd, {-1.0, -1.0}, {1.0, 1.0}, {-1.0, -1.0}, {1.0, 1.0});
    auto s2 = c2.oscillation_superset(y, om);
    REQUIRE(s2.freq_set.radius < prev_r);
    prev_r = s2.freq_set.radius;
  }

  auto noctl = make_exotic2d_warp();
  auto cov2 = build_covering(noctl, 0.5, {-1.0, -1.0}, {1.0, 1.0}, {-1.0, -1.0}, {1.0, 1.0});
  REQUIRE_THROWS_AS(cov2.oscillation_superset(y, om), std::invalid_argument);
}

TEST_CASE("coverage of the target box") {
  auto w = make_radial_warp(slow_start(sigma_log1p(), 1.0), 1);
  auto cov = build_covering(w, 0.5, {-4.0}, {4.0}, {-1.0}, {1.0});
  for (int i = 0; i <= 64; ++i) {
    const double xi = -4.0 + 8.0 * i / 64.0;
    const Vec tau = w.forward({xi});
    bool covered = false;
    for (const auto& sh : cov.shells()) covered = covered || dist(tau, sh.tau) < cov.delta();
    REQUIRE(covered);
  }
}
