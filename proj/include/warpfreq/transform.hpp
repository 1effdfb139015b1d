// warpfreq/transform.hpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef WARPFREQ_TRANSFORM_HPP
#define WARPFREQ_TRANSFORM_HPP

#include <complex>
#include <numbers>
#include <stdexcept>

#include "warpfreq/fft.hpp"
#include "warpfreq/parallel.hpp"
#include "warpfreq/phase_grid.hpp"
#include "warpfreq/prototype.hpp"
#include "warpfreq/rng.hpp"

namespace warpfreq {

/// Raised when conjugate gradients stalls before reaching the requested
/// tolerance. The frame is likely too coarsely sampled.
struct CgStagnation : std::runtime_error {
  double residual;
  explicit CgStagnation(double res)
      : std::runtime_error("conjugate gradients stagnated at relative residual " +
                           std::to_string(res)),
        residual(res) {}
};

/// Coefficients of the sampled voice transform, one block per channel,
/// row-major over the channel's strided time lattice.
struct Coefficients {
  const PhaseGrid* grid = nullptr;
  std::vector<CVec> blocks;

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.size();
    return n;
  }
};

namespace detail {

inline void require_same_grid(const Coefficients& c, const PhaseGrid& g) {
  if (c.grid != &g || c.blocks.size() != g.channels().size())
    throw std::invalid_argument("coefficients are indexed by a different sampling");
  for (std::size_t k = 0; k < c.blocks.size(); ++k)
    if (c.blocks[k].size() != g.lattice_size(g.channels()[k]))
      throw std::invalid_argument("coefficient block does not match its time lattice");
}

// Flat grid index of the full-rate lattice node m * stride.
inline std::size_t strided_flat(const PhaseGrid& g, const PhaseGrid::Channel& ch,
                                std::size_t m) {
  std::size_t flat = 0, rem = m;
  for (int i = g.dim() - 1; i >= 0; --i) {
    const std::size_t n = static_cast<std::size_t>(g.shape()[static_cast<std::size_t>(i)]);
    const std::size_t q = static_cast<std::size_t>(ch.stride[static_cast<std::size_t>(i)]);
    const std::size_t cnt = n / q;
    const std::size_t mi = rem % cnt;
    rem /= cnt;
    std::size_t axis_stride = 1;
    for (int a = g.dim() - 1; a > i; --a)
      axis_stride *= static_cast<std::size_t>(g.shape()[static_cast<std::size_t>(a)]);
    flat += mi * q * axis_stride;
  }
  return flat;
}

}  // namespace detail

/// Samples of the warped atom in the frequency domain,
/// g_omega(xi) = w(Phi(omega))^{-1/2} theta(Phi(xi) - Phi(omega)),
/// zero (by convention) at grid nodes outside the warp domain.
inline Vec atom_freq(const Prototype& theta, const Warp& warp, const Vec& omega,
                     const PhaseGrid& g) {
  if (!warp.domain.contains(omega))
    throw std::invalid_argument("atom_freq: omega outside the warp domain");
  const Vec tau0 = warp.forward(omega);
  const double nf = 1.0 / std::sqrt(warp.weight(tau0));
  const int d = g.dim();
  Vec out(g.grid_size(), 0.0);
  Vec u(static_cast<std::size_t>(d));
  for (std::size_t j = 0; j < g.grid_size(); ++j) {
    if (!g.in_domain(j)) continue;
    const double* t = g.warped_point(j);
    for (int i = 0; i < d; ++i) u[static_cast<std::size_t>(i)] = t[i] - tau0[static_cast<std::size_t>(i)];
    out[j] = nf * theta(u);
  }
  return out;
}

namespace detail {

inline Vec channel_atom(const Prototype& theta, const PhaseGrid& g,
                        const PhaseGrid::Channel& ch) {
  const int d = g.dim();
  Vec out(g.grid_size(), 0.0);
  Vec u(static_cast<std::size_t>(d));
  for (std::size_t j = 0; j < g.grid_size(); ++j) {
    if (!g.in_domain(j)) continue;
    const double* t = g.warped_point(j);
    double d2 = 0.0;
    for (int i = 0; i < d; ++i) {
      u[static_cast<std::size_t>(i)] = t[i] - ch.tau[static_cast<std::size_t>(i)];
      d2 += u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
    }
    if (theta.compact() && d2 >= theta.support_radius * theta.support_radius) continue;
    out[j] = ch.norm_fac * theta(u);
  }
  return out;
}

inline Cpx lattice_phase(const PhaseGrid& g, const Vec& y, int sign) {
  double ph = 0.0;
  for (int i = 0; i < g.dim(); ++i)
    ph += y[static_cast<std::size_t>(i)] *
          (g.box_lo()[static_cast<std::size_t>(i)] + 0.5 * g.h()[static_cast<std::size_t>(i)]);
  ph *= 2.0 * std::numbers::pi * sign;
  return Cpx(std::cos(ph), std::sin(ph));
}

}  // namespace detail

/// Sampled voice transform: per channel one inverse FFT over the time
/// lattice of f_hat times the conjugate atom (Parseval form of the inner
/// product with the time-translated atom).
inline Coefficients analyze(const CVec& fhat, const Prototype& theta, const Warp& warp,
                            const PhaseGrid& g, bool skip_edge = false) {
  if (fhat.size() != g.grid_size())
    throw std::invalid_argument("analyze: signal does not match the grid");
  if (warp.dim != g.dim()) throw std::invalid_argument("analyze: warp/grid dimension mismatch");
  Coefficients c;
  c.grid = &g;
  c.blocks.resize(g.channels().size());
  parallel_for(g.channels().size(), [&](std::size_t ki) {
    const auto& ch = g.channels()[ki];
    const std::size_t m_total = g.lattice_size(ch);
    if (skip_edge && ch.edge) {
      c.blocks[ki].assign(m_total, Cpx(0, 0));
      return;
    }
    const Vec atom = detail::channel_atom(theta, g, ch);
    CVec p(g.grid_size());
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = fhat[j] * atom[j];
    fft_nd(p, g.shape(), +1);
    CVec block(m_total);
    for (std::size_t m = 0; m < m_total; ++m) {
      const Vec y = g.lattice_point(ch, m);
      block[m] = g.hvol() * detail::lattice_phase(g, y, +1) * p[detail::strided_flat(g, ch, m)];
    }
    c.blocks[ki] = std::move(block);
  });
  return c;
}

/// Adjoint of analyze with respect to the grid inner product on signals
/// and the cell-measure weighted inner product on coefficients:
/// f_hat(xi) = sum_{l,k} c_{l,k} g_k(xi) e^{-2 pi i <y_l, xi>} mu_{l,k}.
inline CVec synthesize(const Coefficients& c, const Prototype& theta, const Warp& warp,
                       const PhaseGrid& g, bool skip_edge = false) {
  detail::require_same_grid(c, g);
  if (warp.dim != g.dim()) throw std::invalid_argument("synthesize: warp/grid dimension mismatch");
  std::vector<CVec> partial(g.channels().size());
  parallel_for(g.channels().size(), [&](std::size_t ki) {
    const auto& ch = g.channels()[ki];
    if (skip_edge && ch.edge) return;
    const double mu = ch.dt_vol * ch.dmu_omega;
    CVec u(g.grid_size(), Cpx(0, 0));
    const std::size_t m_total = g.lattice_size(ch);
    for (std::size_t m = 0; m < m_total; ++m) {
      const Vec y = g.lattice_point(ch, m);
      u[detail::strided_flat(g, ch, m)] =
          c.blocks[ki][m] * mu * detail::lattice_phase(g, y, -1);
    }
    fft_nd(u, g.shape(), -1);
    const Vec atom = detail::channel_atom(theta, g, ch);
    for (std::size_t j = 0; j < u.size(); ++j) u[j] *= atom[j];
    partial[ki] = std::move(u);
  });
  CVec out(g.grid_size(), Cpx(0, 0));
  for (const auto& pk : partial) {
    if (pk.empty()) continue;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += pk[j];
  }
  return out;
}

inline CVec frame_apply(const CVec& fhat, const Prototype& theta, const Warp& warp,
                        const PhaseGrid& g, bool skip_edge = false) {
  return synthesize(analyze(fhat, theta, warp, g, skip_edge), theta, warp, g, skip_edge);
}

inline Cpx grid_inner(const PhaseGrid& g, const CVec& a, const CVec& b) {
  Cpx s(0, 0);
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * std::conj(b[j]);
  return g.hvol() * s;
}

/// Weighted coefficient norm: sum over cells of |c|^2 times the cell
/// quadrature weight.
inline double coeff_energy(const Coefficients& c, const PhaseGrid& g) {
  detail::require_same_grid(c, g);
  double s = 0.0;
  for (std::size_t ki = 0; ki < c.blocks.size(); ++ki) {
    const double mu = g.channels()[ki].dt_vol * g.channels()[ki].dmu_omega;
    double e = 0.0;
    for (const Cpx& v : c.blocks[ki]) e += std::norm(v);
    s += mu * e;
  }
  return s;
}

/// Tightness diagnostic: quadrature (in omega, not in warped coordinates)
/// of int_D |g_omega(xi)|^2 d omega, which for an exact warp/weight pair
/// equals ||theta||^2 independently of xi.
inline Refined tightness_profile(const Prototype& theta, const Warp& warp, const Vec& xi,
                                 double rel_tol = 1e-7, int n0 = 24, int max_level = 5) {
  if (!warp.domain.contains(xi))
    throw std::invalid_argument("tightness_profile: xi outside the warp domain");
  const int d = warp.dim;
  const Vec tau_xi = warp.forward(xi);
  const double r = theta.effective_radius(1e-10);

  // bounding box of Phi^{-1}(B_r(Phi(xi))), probed on axis/diagonal rays
  std::vector<Vec> probes;
  probes.push_back(warp.inverse(tau_xi));
  for (double frac : {0.35, 0.7, 1.0}) {
    for (int i = 0; i < d; ++i)
      for (double sgn : {-1.0, 1.0}) {
        Vec t = tau_xi;
        t[static_cast<std::size_t>(i)] += sgn * frac * r;
        probes.push_back(warp.inverse(t));
      }
    const double diag = frac * r / std::sqrt(static_cast<double>(d));
    for (int corner = 0; corner < (1 << d); ++corner) {
      Vec t = tau_xi;
      for (int i = 0; i < d; ++i)
        t[static_cast<std::size_t>(i)] += ((corner >> i) & 1) ? diag : -diag;
      probes.push_back(warp.inverse(t));
    }
  }
  Vec lo = probes.front(), hi = probes.front();
  for (const auto& p : probes)
    for (int i = 0; i < d; ++i) {
      lo[static_cast<std::size_t>(i)] = std::min(lo[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i)]);
      hi[static_cast<std::size_t>(i)] = std::max(hi[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i)]);
    }
  for (int i = 0; i < d; ++i) {
    const double pad = 0.1 * (hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]) + 1e-12;
    lo[static_cast<std::size_t>(i)] -= pad;
    hi[static_cast<std::size_t>(i)] += pad;
    // stay inside the open domain
    if (warp.domain.bounded_below(i))
      lo[static_cast<std::size_t>(i)] = std::max(lo[static_cast<std::size_t>(i)],
                                                 warp.domain.lo[static_cast<std::size_t>(i)] + 1e-12);
    if (warp.domain.bounded_above(i))
      hi[static_cast<std::size_t>(i)] = std::min(hi[static_cast<std::size_t>(i)],
                                                 warp.domain.hi[static_cast<std::size_t>(i)] - 1e-12);
  }

  auto integrand = [&](const Vec& om) {
    if (!warp.domain.contains(om, 1e-12)) return 0.0;
    const Vec t = warp.forward(om);
    Vec u(static_cast<std::size_t>(d));
    double d2 = 0.0;
    for (int i = 0; i < d; ++i) {
      u[static_cast<std::size_t>(i)] = tau_xi[static_cast<std::size_t>(i)] - t[static_cast<std::size_t>(i)];
      d2 += u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
    }
    if (theta.compact() && d2 >= theta.support_radius * theta.support_radius) return 0.0;
    const double th = theta(u);
    return th * th / warp.weight(t);
  };
  return midpoint_box(integrand, lo, hi, n0, rel_tol, max_level);
}

/// L^2 inner product <theta_a, theta_b> on R^d by quadrature (closed form
/// when both are the same built-in).
inline double inner_theta(const Prototype& a, const Prototype& b, int d) {
  if (a.family == b.family && a.family != "custom" &&
      std::abs(a.support_radius - b.support_radius) < 1e-14)
    return a.l2_norm_sq(d);
  const double r = std::min(a.effective_radius(1e-12), b.effective_radius(1e-12));
  Vec lo(static_cast<std::size_t>(d), -r), hi(static_cast<std::size_t>(d), r);
  return midpoint_box([&](const Vec& u) { return a(u) * b(u); }, lo, hi, 32, 1e-9, 5).value;
}

/// Both sides of the orthogonality relation: the phase-space pairing of two
/// voice transforms against <f1,f2><theta2,theta1>. The time integral per
/// channel collapses by Parseval on the dual lattice; the frequency
/// integral is a midpoint rule in warped coordinates.
inline std::pair<Cpx, Cpx> orthogonality_check(const CVec& f1, const CVec& f2,
                                               const Prototype& th1, const Prototype& th2,
                                               const Warp& warp, const PhaseGrid& g) {
  if (f1.size() != g.grid_size() || f2.size() != g.grid_size())
    throw std::invalid_argument("orthogonality_check: signal grid mismatch");
  if (warp.dim != g.dim())
    throw std::invalid_argument("orthogonality_check: warp/grid dimension mismatch");
  const int d = g.dim();
  const double dtau_vol = std::pow(g.dtau(), d);
  std::vector<Cpx> per_channel(g.channels().size(), Cpx(0, 0));
  parallel_for(g.channels().size(), [&](std::size_t ki) {
    const auto& ch = g.channels()[ki];
    const Vec a1 = detail::channel_atom(th1, g, ch);
    const Vec a2 = detail::channel_atom(th2, g, ch);
    Cpx s(0, 0);
    for (std::size_t j = 0; j < a1.size(); ++j)
      s += f1[j] * std::conj(f2[j]) * a1[j] * a2[j];
    per_channel[ki] = s * g.hvol() * ch.wtau * dtau_vol;
  });
  Cpx lhs(0, 0);
  for (const Cpx& v : per_channel) lhs += v;
  Cpx f12(0, 0);
  for (std::size_t j = 0; j < f1.size(); ++j) f12 += f1[j] * std::conj(f2[j]);
  f12 *= g.hvol();
  const Cpx rhs = f12 * inner_theta(th2, th1, d);
  return {lhs, rhs};
}

namespace detail {

struct CgResult {
  CVec x;
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

inline CgResult conjugate_gradients(const std::function<CVec(const CVec&)>& apply,
                                    const CVec& b, double tol, int max_iter) {
  CgResult res;
  res.x.assign(b.size(), Cpx(0, 0));
  CVec r = b, p = b, ap;
  auto cdot = [](const CVec& u, const CVec& v) {
    Cpx s(0, 0);
    for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
    return s;
  };
  double b2 = 0.0;
  for (const Cpx& v : b) b2 += std::norm(v);
  if (b2 == 0.0) {
    res.converged = true;
    return res;
  }
  double r2 = b2;
  for (int it = 0; it < max_iter; ++it) {
    ap = apply(p);
    const Cpx pap = cdot(p, ap);
    if (std::abs(pap) <= 1e-300) break;
    const double alpha = r2 / pap.real();
    for (std::size_t i = 0; i < res.x.size(); ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    double r2n = 0.0;
    for (const Cpx& v : r) r2n += std::norm(v);
    res.iterations = it + 1;
    res.rel_residual = std::sqrt(r2n / b2);
    if (res.rel_residual <= tol) {
      res.converged = true;
      return res;
    }
    const double beta = r2n / r2;
    r2 = r2n;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
  }
  res.rel_residual = std::sqrt(r2 / b2);
  return res;
}

}  // namespace detail

struct FrameBounds {
  double lower = 0.0;  // A estimate
  double upper = 0.0;  // B estimate
  bool converged = false;
  int power_iterations = 0;
  int inverse_iterations = 0;
};

/// Frame-bound estimates on the interior band: largest Rayleigh quotient of
/// the sampled frame operator by power iteration, smallest by inverse power
/// iteration with CG solves. Edge channels are excluded; signals are
/// restricted to grid nodes whose warped coordinate keeps `band` distance
/// from the warped box hull.
inline FrameBounds frame_bounds(const Prototype& theta, const Warp& warp, const PhaseGrid& g,
                                int iterations = 200, std::uint64_t seed = 7,
                                double band = -1.0) {
  if (g.channels().empty()) throw std::invalid_argument("frame_bounds: empty sampling");
  bool any_interior = false;
  for (const auto& ch : g.channels()) any_interior = any_interior || !ch.edge;
  if (!any_interior) throw std::invalid_argument("frame_bounds: all channels are edge channels");
  // interior-band width: every channel whose atom touches a masked node
  // must itself be a complete (non-edge) channel
  if (band < 0.0) band = 2.0 * theta.effective_radius(1e-8) + 1.5 * g.dtau();

  std::vector<bool> mask(g.grid_size(), false);
  std::size_t inside = 0;
  for (std::size_t j = 0; j < g.grid_size(); ++j) {
    mask[j] = g.in_domain(j) && g.interior_band(j, band);
    if (mask[j]) ++inside;
  }
  if (inside == 0)
    throw std::invalid_argument("frame_bounds: interior band is empty; widen the box");

  auto project = [&](CVec& v) {
    for (std::size_t j = 0; j < v.size(); ++j)
      if (!mask[j]) v[j] = Cpx(0, 0);
  };
  auto apply = [&](const CVec& v) {
    CVec in = v;
    project(in);
    CVec out = frame_apply(in, theta, warp, g, /*skip_edge=*/true);
    project(out);
    return out;
  };

  Rng rng(seed);
  CVec v(g.grid_size());
  for (auto& z : v) z = Cpx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  project(v);

  FrameBounds fb;
  double prev = 0.0;
  CVec sv;
  for (int it = 0; it < iterations; ++it) {
    sv = apply(v);
    const double num = grid_inner(g, sv, v).real();
    const double den = grid_inner(g, v, v).real();
    const double lam = num / den;
    fb.power_iterations = it + 1;
    double nrm = 0.0;
    for (const Cpx& z : sv) nrm += std::norm(z);
    nrm = std::sqrt(nrm);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = sv[j] / nrm;
    if (it > 2 && std::abs(lam - prev) <= 1e-7 * lam) {
      fb.upper = lam;
      fb.converged = true;
      break;
    }
    prev = lam;
    fb.upper = lam;
  }

  // inverse power iteration for the smallest Rayleigh quotient (inexact
  // inner solves are fine: they still steer toward the bottom eigenspace)
  CVec w(g.grid_size());
  for (auto& z : w) z = Cpx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  project(w);
  double lam_min = 0.0, prev_min = -1.0;
  bool inv_converged = false;
  const int inv_iters = std::max(6, iterations / 10);
  for (int it = 0; it < inv_iters; ++it) {
    auto sol = detail::conjugate_gradients(apply, w, 1e-8, 300);
    w = std::move(sol.x);
    project(w);
    double nrm = 0.0;
    for (const Cpx& z : w) nrm += std::norm(z);
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) break;
    for (auto& z : w) z /= nrm;
    const CVec sw = apply(w);
    lam_min = grid_inner(g, sw, w).real() / grid_inner(g, w, w).real();
    fb.inverse_iterations = it + 1;
    if (prev_min > 0.0 && std::abs(lam_min - prev_min) <= 1e-5 * lam_min) {
      inv_converged = true;
      break;
    }
    prev_min = lam_min;
  }
  fb.lower = lam_min;
  fb.converged = fb.converged && inv_converged;
  return fb;
}

struct ReconstructResult {
  CVec fhat;
  int iterations = 0;
  double rel_residual = 0.0;
};

/// Inverts the sampled frame operator by conjugate gradients:
/// returns f with ||S f - synthesize(c)|| <= tol * ||synthesize(c)||.
inline ReconstructResult reconstruct(const Coefficients& c, const Prototype& theta,
                                     const Warp& warp, const PhaseGrid& g, double tol = 1e-8,
                                     int max_iter = 100) {
  const CVec b = synthesize(c, theta, warp, g);
  auto apply = [&](const CVec& v) { return frame_apply(v, theta, warp, g); };
  auto sol = detail::conjugate_gradients(apply, b, tol, max_iter);
  if (!sol.converged) throw CgStagnation(sol.rel_residual);
  return {std::move(sol.x), sol.iterations, sol.rel_residual};
}

}  // namespace warpfreq

#endif  // WARPFREQ_TRANSFORM_HPP
