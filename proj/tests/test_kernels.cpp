// tests/test_kernels.cpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include <catch_amalgamated.hpp>

#include "warpfreq/kernels.hpp"
#include "warpfreq/radial.hpp"

using namespace warpfreq;

namespace {

KernelSpec gaussian_identity_spec(const Warp& w) {
  return KernelSpec{Prototype::gaussian(), Prototype::gaussian(), &w, {}, {32, 1e-9, 6}};
}

// closed-form cross-ambiguity of unit gaussians per axis:
// int e^{-pi(xi-a)^2} e^{-pi(xi-b)^2} e^{-2 pi i x xi} d xi
Cpx gaussian_ambiguity_1d(double a, double b, double x) {
  const double mod =
      std::exp(-std::numbers::pi * ((a - b) * (a - b) + x * x) / 2.0) / std::sqrt(2.0);
  const double ph = -2.0 * std::numbers::pi * x * 0.5 * (a + b);
  return mod * Cpx(std::cos(ph), std::sin(ph));
}

}  // namespace

TEST_CASE("gram kernel against the gaussian ambiguity oracle") {
  auto w = make_identity_warp(1);
  auto spec = gaussian_identity_spec(w);
  for (double a : {-0.6, 0.4})
    for (double b : {0.0, 1.1})
      for (double x : {0.0, 0.8, -2.3}) {
        // K((y,omega),(z,eta)) with omega = a, eta = b, x = z - y
        bool conv = false;
        const Cpx got = gram_kernel_x(spec, {x}, {a}, {b}, &conv);
        const Cpx want = gaussian_ambiguity_1d(b, a, x);
        // theta2 sits at eta, conj(theta1) at omega, phase e^{-2 pi i x xi}
        REQUIRE(std::abs(got - want) < 1e-8);
      }
  // 2-d separates into the per-axis product
  auto w2 = make_identity_warp(2);
  auto spec2 = gaussian_identity_spec(w2);
  const Cpx got = gram_kernel_x(spec2, {0.5, -0.25}, {0.3, 0.1}, {-0.2, 0.4});
  const Cpx want =
      gaussian_ambiguity_1d(-0.2, 0.3, 0.5) * gaussian_ambiguity_1d(0.4, 0.1, -0.25);
  REQUIRE(std::abs(got - want) < 1e-8);
}

TEST_CASE("self-gram value is the atom energy") {
  auto w = make_identity_warp(1);
  auto spec = gaussian_identity_spec(w);
  const Cpx k = gram_kernel(spec, {0.3}, {0.7}, {0.3}, {0.7});
  REQUIRE(k.imag() == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(k.real() == Catch::Approx(Prototype::gaussian().l2_norm_sq(1)).epsilon(1e-8));
  REQUIRE(k.real() > 0.0);
}

TEST_CASE("gram kernel against a direct grid-quadrature oracle on a warped system") {
  // independent route: Plancherel sum of two atoms over a fine grid
  auto w = make_radial_warp(slow_start(sigma_log1p(), 1.0), 1);
  auto th = Prototype::bump(1.0);
  KernelSpec spec{th, th, &w, {}, {48, 1e-9, 6}};
  auto g = PhaseGrid::build(w, {-64.0}, {64.0}, {16384}, 0.5, th);
  const Vec omega{1.4}, eta{2.2}, y{0.0}, z{0.6};
  const Vec a1 = atom_freq(th, w, omega, g);
  const Vec a2 = atom_freq(th, w, eta, g);
  Cpx oracle(0, 0);
  for (std::size_t j = 0; j < g.grid_size(); ++j) {
    if (a1[j] == 0.0 || a2[j] == 0.0) continue;
    const double ph = -2.0 * std::numbers::pi * (z[0] - y[0]) * g.grid_point(j)[0];
    oracle += a2[j] * a1[j] * Cpx(std::cos(ph), std::sin(ph));
  }
  oracle *= g.hvol();
  const Cpx got = gram_kernel(spec, y, omega, z, eta);
  REQUIRE(std::abs(got - oracle) < 1e-6);
}

TEST_CASE("hermitian symmetry and translation structure") {
  auto w = make_radial_warp(slow_start(sigma_log1p(), 1.0), 1);
  auto th = Prototype::bump(1.0);
  KernelSpec spec{th, th, &w, {}, {32, 1e-10, 6}};
  const Vec y{0.2}, z{-0.5}, om{0.8}, et{1.3};
  const Cpx k1 = gram_kernel(spec, y, om, z, et);
  const Cpx k2 = gram_kernel(spec, z, et, y, om);
  REQUIRE(std::abs(k1 - std::conj(k2)) <= 1e-10);
  // shifting both time arguments leaves the kernel unchanged
  const Cpx k3 = gram_kernel(spec, {0.2 + 5.0}, om, {-0.5 + 5.0}, et);
  REQUIRE(std::abs(k1 - k3) <= 1e-10);
}

TEST_CASE("kernel decay envelope for the compact window") {
  // |K(x)| (1+|x|)^k stays below a constant fitted at moderate x
  auto w = make_identity_warp(1);
  auto th = Prototype::bump(1.0);
  KernelSpec spec{th, th, &w, {}, {64, 1e-10, 6}};
  const int k = 2;
  double cfit = 0.0;
  for (double x : {0.5, 1.0, 2.0, 3.0, 4.0})
    cfit = std::max(cfit, std::abs(gram_kernel_x(spec, {x}, {0.3}, {0.0})) * std::pow(1.0 + x, k));
  for (double x : {6.0, 8.0, 12.0}) {
    const double v = std::abs(gram_kernel_x(spec, {x}, {0.3}, {0.0})) * std::pow(1.0 + x, k);
    REQUIRE(v <= cfit * 1.5);
  }
  // exact vanishing once the warped supports separate
  REQUIRE(gram_kernel_x(spec, {1.0}, {2.5}, {0.0}) == Cpx(0, 0));
}

TEST_CASE("mixed kernel identity") {
  auto w = make_identity_warp(1);
  auto th = Prototype::bump(1.0);
  const LambdaGrid grid = LambdaGrid::regular(w, 6.0, 25, -2.0, 2.0, 17);

  SECTION("equal prototypes") {
    const double res = mixed_kernel_identity_check(th, th, nullptr, w, grid, {24, 1e-7, 5});
    REQUIRE(res <= 1e-3);
  }
  SECTION("orthogonal prototypes need theta3") {
    auto odd = Prototype::custom(
        [](const Vec& u) {
          const double q = 1.0 - norm2(u);
          return q > 0 ? u[0] * std::exp(-1.0 / q) : 0.0;
        },
        1.0);
    REQUIRE_THROWS_AS(mixed_kernel_identity_check(th, odd, nullptr, w, grid, {16, 1e-6, 4}),
                      std::invalid_argument);
  }
  SECTION("scaling either prototype leaves the residual unchanged") {
    auto th2 = Prototype::custom(
        [](const Vec& u) {
          const double q = 1.0 - norm2(u);
          return q > 0 ? 2.0 * std::exp(-1.0 / q) : 0.0;
        },
        1.0);
    const double r1 = mixed_kernel_identity_check(th, th, nullptr, w, grid, {16, 1e-6, 4});
    const double r2 = mixed_kernel_identity_check(th, th2, nullptr, w, grid, {16, 1e-6, 4});
    REQUIRE(r1 == Catch::Approx(r2).margin(5e-4));
  }
}

TEST_CASE("norm estimators on synthetic kernels") {
  auto w = make_identity_warp(1);
  auto th = Prototype::bump(1.0);
  KernelSpec spec{th, th, &w, {0.0, nullptr}, {}};
  const LambdaGrid grid = LambdaGrid::regular(w, 4.0, 33, -2.0, 2.0, 9);

  SECTION("diagonal band kernel gives the band measure") {
    TransKernel K = [](const Vec& x, const Vec& ta, const Vec& tb) {
      return (std::abs(x[0]) < 0.5 && dist(ta, tb) < 1e-12) ? Cpx(1, 0) : Cpx(0, 0);
    };
    auto est = am_norm(spec, K, grid);
    // expected: the discrete band mass times one channel's measure
    double band_mass = 0.0;
    for (int j = -(grid.nx - 1); j <= grid.nx - 1; ++j)
      if (std::abs(j * grid.hx) < 0.5) band_mass += grid.hx;
    const double want = band_mass * grid.dmu[4];
    REQUIRE(est.value == Catch::Approx(want).epsilon(1e-9));
  }

  SECTION("separable nonnegative kernel has the closed-form norm") {
    auto afun = [](const Vec& t) { return 1.0 + 0.5 * t[0]; };
    auto bfun = [](const Vec& t) { return 2.0 - 0.3 * t[0]; };
    TransKernel K = [&](const Vec& x, const Vec& ta, const Vec& tb) {
      return std::abs(x[0]) < 1.0 ? Cpx(afun(ta) * bfun(tb), 0.0) : Cpx(0, 0);
    };
    auto est = am_norm(spec, K, grid);
    double max_a = 0.0, max_b = 0.0, int_a = 0.0, int_b = 0.0;
    for (std::size_t i = 0; i < grid.taus.size(); ++i) {
      max_a = std::max(max_a, afun(grid.taus[i]));
      max_b = std::max(max_b, bfun(grid.taus[i]));
      int_a += afun(grid.taus[i]) * grid.dmu[i];
      int_b += bfun(grid.taus[i]) * grid.dmu[i];
    }
    double xmass = 0.0;  // discrete indicator mass
    for (int j = -(grid.nx - 1); j <= grid.nx - 1; ++j)
      if (std::abs(j * grid.hx) < 1.0) xmass += grid.hx;
    const double want = xmass * std::max(max_b * int_a, max_a * int_b);
    REQUIRE(est.value == Catch::Approx(want).epsilon(1e-9));
    // a kernel separable into time slice x frequency slice factors into
    // the product of the slice A_1 norms
    auto bm = bm_norm(spec, K, grid);
    REQUIRE(bm.value == Catch::Approx(xmass * std::max(max_b * int_a, max_a * int_b))
                            .epsilon(1e-9));
  }
}

TEST_CASE("gram-kernel norms: finiteness, ordering, transpose symmetry") {
  auto lg = make_radial_warp(slow_start(sigma_log1p(), 1.0), 1);
  auto th = Prototype::bump(1.0);
  // the time grid must resolve the kernel's oscillation (scale 1/|xi_max|)
  // for the refinement flag to certify the estimate
  const LambdaGrid grid = LambdaGrid::regular(lg, 4.0, 128, -1.5, 1.5, 21);
  KernelSpec base{th, th, &lg, {}, {24, 1e-5, 3}};
  const auto table = tabulate_kernel(gram_trans_kernel(base), grid);

  for (double p : {0.0, 1.0}) {
    KernelSpec spec = base;
    spec.m = WeightM{p, [](const Vec& t) { return 1.0 + 0.2 * norm(t); }};
    auto am = am_norm(spec, table, grid);
    auto bm = bm_norm(spec, table, grid);
    INFO("p=" << p << " am=" << am.value << " bm=" << bm.value);
    REQUIRE(std::isfinite(bm.value));
    REQUIRE(bm.converged);
    REQUIRE(am.value <= bm.value * (1.0 + 1e-9));
    REQUIRE(am.history.size() == 2);
  }

  // transpose: K^T(x, ta, tb) = K(-x, tb, ta); swap-symmetric grid
  KernelSpec spec = base;
  spec.m = WeightM{0.0, nullptr};
  const TransKernel K = gram_trans_kernel(spec);
  TransKernel KT = [&K](const Vec& x, const Vec& ta, const Vec& tb) {
    return K(-1.0 * x, tb, ta);
  };
  const LambdaGrid small = LambdaGrid::regular(lg, 3.0, 33, -1.0, 1.0, 9);
  auto bm1 = bm_norm(spec, K, small);
  auto bm2 = bm_norm(spec, KT, small);
  REQUIRE(bm2.value == Catch::Approx(bm1.value).epsilon(1e-9));
}

TEST_CASE("oscillation and maximal kernel") {
  auto w = make_radial_warp(slow_start(sigma_log1p(), 1.0), 1);
  auto th = Prototype::bump(1.0);
  KernelSpec spec{th, th, &w, {}, {24, 1e-6, 4}};
  const Vec y{0.0}, om{0.4}, z{0.7}, et{0.9};

  SECTION("nonnegative, zero beyond disjoint supports, decreasing in delta") {
    // denser probing keeps the sup under-approximation fair across deltas
    double prev = std::numeric_limits<double>::infinity();
    for (double delta : {1.0, 0.5, 0.25}) {
      auto cov = build_covering(w, delta, {-8.0}, {8.0}, {-3.0}, {3.0});
      const double o = oscillation(spec, cov, y, om, z, et, 33);
      REQUIRE(o >= 0.0);
      REQUIRE(o < prev);
      prev = o;
    }
    auto cov = build_covering(w, 0.5, {-8.0}, {8.0}, {-3.0}, {3.0});
    // far apart in warped frequency: both K terms vanish
    REQUIRE(oscillation(spec, cov, y, {-4.0}, z, {4.0}) == 0.0);
  }

  SECTION("maximal kernel dominates |K| and obeys the oscillation bound") {
    auto cov = build_covering(w, 0.5, {-8.0}, {8.0}, {-3.0}, {3.0});
    const double mk = max_kernel(spec, cov, y, om, z, et);
    const double kabs = std::abs(gram_kernel(spec, y, om, z, et));
    REQUIRE(mk >= kabs);
    // transposed oscillation over the same probe set bounds the excess
    const double osc_star = oscillation(spec, cov, z, et, y, om, 9);
    REQUIRE(mk <= kabs + osc_star + 1e-9);
  }

  SECTION("tiny delta brings the maximal kernel close to |K|") {
    // away from steep kernel tails, shrinking cells pin the sup to |K|
    auto idw = make_identity_warp(1);
    auto gau = Prototype::gaussian();
    KernelSpec gspec{gau, gau, &idw, {}, {24, 1e-8, 5}};
    auto cov = build_covering(idw, 0.01, {0.3, }, {0.5}, {-0.3}, {0.3});
    const Vec yy{0.0}, oo{0.4}, zz{0.1}, ee{0.42};
    const double mk = max_kernel(gspec, cov, yy, oo, zz, ee);
    const double kabs = std::abs(gram_kernel(gspec, yy, oo, zz, ee));
    REQUIRE(mk >= kabs);
    REQUIRE(mk <= kabs * 1.01);
  }
}

TEST_CASE("decay sweep produces a decreasing contraction column") {
  auto w = make_radial_warp(slow_start(sigma_log1p(), 1.0), 1);
  auto th = Prototype::bump(1.0);
  KernelSpec spec{th, th, &w, {0.0, nullptr}, {16, 1e-5, 4}};
  const LambdaGrid grid = LambdaGrid::regular(w, 4.0, 9, -1.5, 1.5, 7);
  const auto table = decay_sweep(spec, {1.0, 0.5}, grid, {-8.0}, {8.0}, {-6.0}, {6.0}, 5);
  REQUIRE(table.rows.size() == 2);
  REQUIRE(table.rows[1].contraction < table.rows[0].contraction);
  REQUIRE(table.rows[0].gram_bm == table.rows[1].gram_bm);
  REQUIRE_THROWS_AS(
      decay_sweep(spec, {0.5, 1.0}, grid, {-8.0}, {8.0}, {-6.0}, {6.0}, 5),
      std::invalid_argument);
}
