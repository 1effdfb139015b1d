// tests/test_admissibility.cpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include <catch_amalgamated.hpp>

#include "warpfreq/admissibility.hpp"

using namespace warpfreq;

namespace {
GridSpec small_grid(int nr = 24, int na = 8) {
  GridSpec g;
  g.n_radial = nr;
  g.n_angular = na;
  return g;
}
}  // namespace

TEST_CASE("moderateness of the log-warp weight") {
  // e^{tau+ups} <= e^tau e^{|ups|}
  auto rep = check_moderate([](const Vec& t) { return std::exp(t[0]); },
                            [](const Vec& t) { return std::exp(norm(t)); }, small_grid(), 1);
  REQUIRE(rep.pass);
  REQUIRE(rep.worst_ratio <= 1.0 + 1e-12);

  auto one = check_moderate([](const Vec&) { return 1.0; }, [](const Vec&) { return 1.0; },
                            small_grid(), 2);
  REQUIRE(one.pass);
  REQUIRE(one.worst_ratio == Catch::Approx(1.0));
}

TEST_CASE("radial-log weight is moderate against its fitted control weight") {
  auto rw = make_radial_warp(slow_start(sigma_log1p(), 1.0), 2);
  const ControlWeight v0 = *rw.control;
  auto rep = check_moderate([&](const Vec& t) { return rw.weight(t); },
                            [&](const Vec& t) { return std::pow(v0(t), 2); },
                            small_grid(16, 8), 2);
  REQUIRE(rep.pass);
  REQUIRE(rep.constants.at("C") > 0.0);
}

TEST_CASE("submultiplicativity checks") {
  auto poly = check_submultiplicative([](const Vec& t) { return 1.0 + norm(t); },
                                      small_grid(), 2);
  REQUIRE(poly.pass);
  auto expw = check_submultiplicative([](const Vec& t) { return std::exp(norm(t)); },
                                      small_grid(), 1);
  REQUIRE(expw.pass);
  auto bad = check_submultiplicative([](const Vec& t) { return norm(t); }, small_grid(), 1);
  REQUIRE_FALSE(bad.pass);

  REQUIRE_THROWS_AS(check_submultiplicative([](const Vec& t) { return -1.0 - norm(t); },
                                            small_grid(), 1),
                    std::invalid_argument);
}

TEST_CASE("phi derivative bounds") {
  SECTION("identity warp, any v0 >= 1") {
    auto idw = make_identity_warp(2);
    auto rep = check_phi_derivative_bound(idw, [](const Vec&) { return 1.0; }, 2,
                                          small_grid(8, 6));
    REQUIRE(rep.pass);
    REQUIRE(rep.worst_ratio == Catch::Approx(1.0).margin(1e-9));
  }
  SECTION("1-d log warp: phi_tau(ups) = e^ups <= e^{|ups|}") {
    auto lg = make_log_warp1d();
    auto rep = check_phi_derivative_bound(lg, [](const Vec& u) { return std::exp(norm(u)); }, 1,
                                          small_grid(16, 2));
    REQUIRE(rep.pass);
  }
  SECTION("radial-log warp d=2 against the weight shape (1+|u|)e^{|u|}, k=3") {
    // fitting mode: find the constant C'' making the k=3 bound hold
    auto rw = make_radial_warp(slow_start(sigma_log1p(), 1.0), 2);
    auto rep = check_phi_derivative_bound(
        rw, [](const Vec& u) { return (1.0 + norm(u)) * std::exp(norm(u)); }, 3,
        small_grid(10, 6), 1e-6, /*fit_cap=*/1e8);
    REQUIRE(rep.pass);
    REQUIRE(rep.constants.at("C") > 1.0);
    REQUIRE(std::isfinite(rep.constants.at("C")));
  }
}

TEST_CASE("every built-in warp with a control weight passes at k=2") {
  std::vector<Warp> warps;
  warps.push_back(make_identity_warp(1));
  warps.push_back(make_identity_warp(3));
  warps.push_back(make_log_warp1d());
  warps.push_back(make_separable_warp({make_log_warp1d(), make_log_warp1d()}));
  warps.push_back(make_radial_warp(slow_start(sigma_log1p(), 1.0), 2));
  warps.push_back(make_radial_warp(slow_start(sigma_power(2.0), 1.0), 2));
  warps.push_back(make_radial_warp(slow_start(sigma_log1p(), 1.0), 3));
  for (const Warp& w : warps) {
    REQUIRE(w.control.has_value());
    const ControlWeight v0 = *w.control;
    auto rep = check_phi_derivative_bound(w, [&](const Vec& u) { return v0(u); }, 2,
                                          small_grid(w.dim >= 3 ? 8 : 12, w.dim == 1 ? 2 : 6));
    INFO("warp " << w.type << " d=" << w.dim << " worst " << rep.worst_ratio);
    REQUIRE(rep.pass);
  }
}

TEST_CASE("weak admissibility of the example profiles") {
  SECTION("logarithmic profile") {
    auto rep = check_weak_admissibility(sigma_log1p(), 1.0, 3, 20.0,
                                        [](double x) { return std::exp(x); });
    REQUIRE(rep.pass);
    // the analytic constants: the optimal C0 on [1,inf) is e/(e-1) and the
    // optimal C1 equals (1 - 1/e)^{-1}, attained at xi = 1
    const double c1_paper = 1.0 / (1.0 - std::exp(-1.0));
    REQUIRE(rep.constants.at("C0") >= 0.9 * 1.0);  // the claimed C0 = 1 is valid
    REQUIRE(rep.constants.at("C1") <= 1.1 * c1_paper);
    REQUIRE(rep.constants.at("C1") == Catch::Approx(c1_paper).epsilon(1e-6));
  }
  SECTION("power profile, p = 2") {
    auto rep = check_weak_admissibility(sigma_power(2.0), 1.0, 3, 20.0,
                                        [](double x) { return 1.0 + x; });
    REQUIRE(rep.pass);
    REQUIRE(rep.constants.at("C0") >= 0.9);
  }
  SECTION("super-exponential inverse growth fails") {
    auto bad = sigma_custom([](double x) { return std::exp(x * x) - 1.0; },
                            [](double y) { return std::sqrt(std::log1p(y)); });
    auto rep = check_weak_admissibility(bad, 1.0, 1, 20.0,
                                        [](double x) { return std::exp(x); });
    REQUIRE_FALSE(rep.pass);
  }
  SECTION("rejects non-monotone profiles") {
    auto nm = sigma_custom([](double x) { return x * (30.0 - x); },
                           [](double y) { return y / 30.0; });
    REQUIRE_THROWS_AS(check_weak_admissibility(nm, 1.0, 1, 20.0,
                                               [](double x) { return std::exp(x); }),
                      std::invalid_argument);
  }
}

TEST_CASE("reports are deterministic given the grid") {
  auto lg = make_log_warp1d();
  auto r1 = check_phi_derivative_bound(lg, [](const Vec& u) { return std::exp(norm(u)); }, 1,
                                       small_grid(12, 2));
  auto r2 = check_phi_derivative_bound(lg, [](const Vec& u) { return std::exp(norm(u)); }, 1,
                                       small_grid(12, 2));
  REQUIRE(r1.worst_ratio == r2.worst_ratio);
  REQUIRE(r1.constants.at("C") == r2.constants.at("C"));
}
