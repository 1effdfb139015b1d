// warpfreq/covering.hpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef WARPFREQ_COVERING_HPP
#define WARPFREQ_COVERING_HPP

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "warpfreq/linalg.hpp"
#include "warpfreq/parallel.hpp"
#include "warpfreq/quadrature.hpp"
#include "warpfreq/warp.hpp"

namespace warpfreq {

/// Image of a Euclidean ball under a linear map: {M u : |u - cu| < r}.
struct Ellipsoid {
  Mat M, Minv;
  Vec center_u;  // ball center in parameter coordinates
  double r = 1.0;

  Vec center() const { return M * center_u; }

  bool contains(const Vec& y) const { return dist(Minv * y, center_u) < r; }

  void bbox(Vec& lo, Vec& hi) const {
    const int d = M.n;
    const Vec c = center();
    lo.resize(static_cast<std::size_t>(d));
    hi.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      double rownorm = 0.0;
      for (int j = 0; j < d; ++j) rownorm += M(i, j) * M(i, j);
      rownorm = std::sqrt(rownorm);
      lo[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)] - r * rownorm;
      hi[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)] + r * rownorm;
    }
  }
};

/// Exact open-ellipsoid overlap via the Perram-Wertheim contact function:
/// the two ellipsoids overlap iff max_{s in [0,1]} F(s) < 1, where
/// F(s) = s(1-s) d^T [(1-s) Q1 + s Q2]^{-1} d with Q_i = r_i^2 M_i M_i^T.
inline bool ellipsoids_overlap(const Ellipsoid& a, const Ellipsoid& b) {
  const Vec d = b.center() - a.center();
  if (norm2(d) == 0.0) return true;
  const Mat qa = (a.r * a.r) * (a.M * transpose(a.M));
  const Mat qb = (b.r * b.r) * (b.M * transpose(b.M));
  auto F = [&](double s) {
    Mat q(qa.n);
    for (std::size_t i = 0; i < q.a.size(); ++i)
      q.a[i] = (1.0 - s) * qa.a[i] + s * qb.a[i];
    return s * (1.0 - s) * dot(d, solve(q, d));
  };
  // F is unimodal on [0,1]; golden-section for the max
  double lo = 0.0, hi = 1.0;
  const double gr = 0.6180339887498949;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = F(x1), f2 = F(x2);
  for (int it = 0; it < 52; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = F(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = F(x1);
    }
  }
  return std::max(f1, f2) < 1.0 - 1e-12;
}

struct WarpedBall {
  Vec tau_center;
  double radius = 0.0;
};

struct OscSuperset {
  Ellipsoid time_set;   // y + v0(delta) A^{-T}(Phi(omega)) <B_{2 delta}(0)>
  WarpedBall freq_set;  // Phi^{-1}(Phi(omega) + B_{2 delta}(0))
};

/// Phase-space covering induced by a warp: cells
/// V_{l,k} = A^{-T}(delta k/sqrt(d)) <delta B_1(l/sqrt(d))> x Phi^{-1}(delta B_1(k/sqrt(d))),
/// restricted to a frequency box and a time extent.
class Covering {
 public:
  struct Shell {
    IVec k;
    Vec tau;          // delta * k / sqrt(d)
    Vec freq_center;  // Phi^{-1}(tau)
    Vec fb_lo, fb_hi;  // bounding box of the frequency cell (padded)
    Mat M, Minv;      // M = A^{-T}(tau)
    Vec row_norm;     // per-axis |row_i(M)|, the time-cell bbox half-widths / delta
    double mu1 = 0.0;  // exact: vol(B_1) delta^d / w(tau)
    double mu2 = 0.0;  // quadrature of w over the warped ball
    bool mu2_converged = true;
  };

  struct Cell {
    int shell = 0;
    IVec l;
  };

  const Warp& warp() const { return warp_; }
  double delta() const { return delta_; }
  double spacing() const { return spacing_; }  // delta / sqrt(d)
  const std::vector<Shell>& shells() const { return shells_; }
  const std::vector<Cell>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }

  const Shell& shell_of(std::size_t cell) const {
    return shells_[static_cast<std::size_t>(cells_[cell].shell)];
  }

  const IVec& l_of(std::size_t cell) const { return cells_[cell].l; }
  const IVec& k_of(std::size_t cell) const { return shell_of(cell).k; }

  const std::vector<std::size_t>& cells_of_shell(std::size_t si) const {
    return shell_cells_[si];
  }

  Vec time_center(std::size_t cell) const {
    const Shell& s = shell_of(cell);
    return s.M * scaled(cells_[cell].l);
  }

  /// Sample points default to the cell parameter centers; an offset in
  /// parameter (warped/ball) coordinates, |u| < 1 per part, moves every
  /// sample point inside its cell.
  void set_sample_offset(const Vec& time_u, const Vec& freq_u) {
    if (norm(time_u) >= 1.0 || norm(freq_u) >= 1.0)
      throw std::invalid_argument("sample offset must stay inside the unit ball");
    sample_time_u_ = time_u;
    sample_freq_u_ = freq_u;
  }

  Vec sample_time(std::size_t cell) const {
    const Shell& s = shell_of(cell);
    Vec u = scaled(cells_[cell].l);
    if (!sample_time_u_.empty())
      for (int i = 0; i < dim_; ++i)
        u[static_cast<std::size_t>(i)] += delta_ * sample_time_u_[static_cast<std::size_t>(i)];
    return s.M * u;
  }

  Vec sample_freq(std::size_t cell) const {
    const Shell& s = shell_of(cell);
    if (sample_freq_u_.empty()) return s.freq_center;
    Vec t = s.tau;
    for (int i = 0; i < dim_; ++i)
      t[static_cast<std::size_t>(i)] += delta_ * sample_freq_u_[static_cast<std::size_t>(i)];
    return warp_.inverse(t);
  }

  Ellipsoid time_cell(std::size_t cell) const {
    const Shell& s = shell_of(cell);
    Ellipsoid e;
    e.M = s.M;
    e.Minv = s.Minv;
    e.center_u = scaled(cells_[cell].l);
    e.r = delta_;
    return e;
  }

  std::pair<double, double> cell_measures(std::size_t cell) const {
    const Shell& s = shell_of(cell);
    return {s.mu1, s.mu2};
  }

  double covering_weight(std::size_t cell) const {
    const Shell& s = shell_of(cell);
    return std::min(std::min(1.0, s.mu1), std::min(s.mu2, s.mu1 * s.mu2));
  }

  /// All cells intersecting the given one, including itself. Frequency
  /// disjointness beyond |k - k0| >= 2 sqrt(d) is exact; inside the shell
  /// the time ellipsoids get the exact overlap test.
  std::vector<std::size_t> neighbors(std::size_t cell) const {
    const Shell& s = shell_of(cell);
    const Ellipsoid mine = time_cell(cell);
    const Vec my_center = mine.center();
    std::vector<std::size_t> out;
    const double shell_radius = 2.0 * std::sqrt(static_cast<double>(dim_));
    for (std::size_t si = 0; si < shells_.size(); ++si) {
      const Shell& other = shells_[si];
      double kk = 0.0;
      for (int i = 0; i < dim_; ++i) {
        const double dl = static_cast<double>(s.k[static_cast<std::size_t>(i)] -
                                              other.k[static_cast<std::size_t>(i)]);
        kk += dl * dl;
      }
      if (!(std::sqrt(kk) < shell_radius)) continue;
      for (std::size_t ci : shell_cells_[si]) {
        // bounding-box reject before the exact contact test
        const Vec oc = other.M * scaled(cells_[ci].l);
        bool maybe = true;
        for (int i = 0; i < dim_ && maybe; ++i) {
          const double reach = delta_ * (s.row_norm[static_cast<std::size_t>(i)] +
                                         other.row_norm[static_cast<std::size_t>(i)]);
          maybe = std::abs(oc[static_cast<std::size_t>(i)] - my_center[static_cast<std::size_t>(i)]) <= reach;
        }
        if (!maybe) continue;
        Ellipsoid theirs = time_cell(ci);
        if (ellipsoids_overlap(mine, theirs)) out.push_back(ci);
      }
    }
    return out;
  }

  /// Cells whose open product set contains lambda = (y, omega).
  std::vector<std::size_t> cells_containing(const Vec& y, const Vec& omega) const {
    std::vector<std::size_t> out;
    const Vec tau = warp_.forward(omega);
    for (std::size_t si = 0; si < shells_.size(); ++si) {
      const Shell& s = shells_[si];
      if (!(dist(tau, s.tau) < delta_)) continue;
      const Vec u = s.Minv * y;
      for (std::size_t ci : shell_cells_[si]) {
        if (dist(u, scaled(cells_[ci].l)) < delta_) out.push_back(ci);
      }
    }
    return out;
  }

  /// Superset (y + P, Q) of the union of cells containing lambda; requires
  /// a control weight on the warp.
  OscSuperset oscillation_superset(const Vec& y, const Vec& omega) const {
    if (!warp_.control)
      throw std::invalid_argument("oscillation_superset: warp has no control weight");
    const double v0d = warp_.control->at_radius(delta_);
    const Vec tau = warp_.forward(omega);
    const Mat a = warp_.inv_jacobian(tau);
    OscSuperset out;
    out.time_set.M = v0d * transpose(inverse(a));
    out.time_set.Minv = inverse(out.time_set.M);
    out.time_set.center_u = out.time_set.Minv * y;
    out.time_set.r = 2.0 * delta_;
    out.freq_set.tau_center = tau;
    out.freq_set.radius = 2.0 * delta_;
    return out;
  }

  /// Lemma-2.15 style discrete weights: cell sup of kappa approximated by a
  /// 3^{2d} probe stencil; exponents 1/p with 1/inf = 0.
  void discrete_weights(const std::function<double(const Vec&, const Vec&)>& kappa,
                        double p, double q, Vec& flat, Vec& sharp) const {
    const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
    const double iq = std::isinf(q) ? 0.0 : 1.0 / q;
    flat.resize(cells_.size());
    sharp.resize(cells_.size());
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      const Shell& s = shell_of(c);
      double ksup = 0.0;
      const double h = 0.5 * delta_;
      for (int ti = 0; ti < pow3(dim_); ++ti)
        for (int fi = 0; fi < pow3(dim_); ++fi) {
          Vec ut = scaled(cells_[c].l), uf = s.tau;
          int tt = ti, ff = fi;
          for (int ax = 0; ax < dim_; ++ax) {
            ut[static_cast<std::size_t>(ax)] += h * ((tt % 3) - 1);
            uf[static_cast<std::size_t>(ax)] += h * ((ff % 3) - 1);
            tt /= 3;
            ff /= 3;
          }
          ksup = std::max(ksup, kappa(s.M * ut, warp_.inverse(uf)));
        }
      flat[c] = std::pow(s.mu1, ip) * std::pow(s.mu2, iq) * ksup;
      sharp[c] = std::pow(s.mu1, ip - 1.0) * std::pow(s.mu2, iq - 1.0) * ksup;
    }
  }

  std::size_t index_of(const IVec& l, const IVec& k) const {
    auto it = lookup_.find(std::make_pair(l, k));
    if (it == lookup_.end()) throw std::out_of_range("covering: no such cell");
    return it->second;
  }

  bool has_cell(const IVec& l, const IVec& k) const {
    return lookup_.count(std::make_pair(l, k)) > 0;
  }

  Vec scaled(const IVec& l) const {
    Vec v(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) v[i] = spacing_ * static_cast<double>(l[i]);
    return v;
  }

  friend Covering build_covering(const Warp& warp, double delta, const Vec& box_lo,
                                 const Vec& box_hi, const Vec& time_lo, const Vec& time_hi);

 private:
  static int pow3(int d) {
    int r = 1;
    for (int i = 0; i < d; ++i) r *= 3;
    return r;
  }

  Warp warp_;
  int dim_ = 0;
  double delta_ = 0.0, spacing_ = 0.0;
  Vec sample_time_u_, sample_freq_u_;
  Vec box_lo_, box_hi_, time_lo_, time_hi_;
  std::vector<Shell> shells_;
  std::vector<Cell> cells_;
  std::vector<std::vector<std::size_t>> shell_cells_;
  std::map<std::pair<IVec, IVec>, std::size_t> lookup_;
};

/// Builds the covering restricted to a frequency box (strictly inside the
/// warp domain) and a time extent box. Retains the k whose warped ball
/// meets the image of the box, probed on a deterministic net, and the l
/// whose time-cell bounding box meets the time extent.
inline Covering build_covering(const Warp& warp, double delta, const Vec& box_lo,
                               const Vec& box_hi, const Vec& time_lo, const Vec& time_hi) {
  const int d = warp.dim;
  if (!(delta > 0.0)) throw std::invalid_argument("build_covering: delta > 0 required");
  if (static_cast<int>(box_lo.size()) != d || static_cast<int>(box_hi.size()) != d)
    throw std::invalid_argument("build_covering: box dimension mismatch");
  if (!warp.domain.contains(box_lo) || !warp.domain.contains(box_hi))
    throw std::invalid_argument("build_covering: freq box must lie strictly inside the domain");

  Covering cov;
  cov.warp_ = warp;
  cov.dim_ = d;
  cov.delta_ = delta;
  cov.spacing_ = delta / std::sqrt(static_cast<double>(d));
  cov.box_lo_ = box_lo;
  cov.box_hi_ = box_hi;
  cov.time_lo_ = time_lo;
  cov.time_hi_ = time_hi;

  // probe the warped image of the box
  const int np = d <= 2 ? 33 : (d == 3 ? 13 : 5);
  std::vector<Vec> probes;
  {
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(np);
    probes.reserve(total);
    Vec xi(static_cast<std::size_t>(d));
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx;
      for (int i = d - 1; i >= 0; --i) {
        const int q = static_cast<int>(rem % static_cast<std::size_t>(np));
        rem /= static_cast<std::size_t>(np);
        xi[static_cast<std::size_t>(i)] =
            box_lo[static_cast<std::size_t>(i)] +
            (box_hi[static_cast<std::size_t>(i)] - box_lo[static_cast<std::size_t>(i)]) * q /
                (np - 1.0);
      }
      if (warp.domain.contains(xi)) probes.push_back(warp.forward(xi));
    }
  }
  if (probes.empty()) throw std::invalid_argument("build_covering: box probes left the domain");
  Vec tmin = probes.front(), tmax = probes.front();
  for (const auto& t : probes)
    for (int i = 0; i < d; ++i) {
      tmin[static_cast<std::size_t>(i)] = std::min(tmin[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(i)]);
      tmax[static_cast<std::size_t>(i)] = std::max(tmax[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(i)]);
    }

  const double s = cov.spacing_;
  IVec klo(static_cast<std::size_t>(d)), khi(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    klo[static_cast<std::size_t>(i)] = static_cast<int>(std::ceil((tmin[static_cast<std::size_t>(i)] - delta) / s));
    khi[static_cast<std::size_t>(i)] = static_cast<int>(std::floor((tmax[static_cast<std::size_t>(i)] + delta) / s));
  }

  // enumerate candidate k and retain those whose ball meets the image
  std::vector<IVec> kept;
  IVec k(static_cast<std::size_t>(d), 0);
  std::function<void(int)> rec = [&](int axis) {
    if (axis == d) {
      const Vec tau = cov.scaled(k);
      bool hit = false;
      for (const auto& t : probes)
        if (dist(t, tau) < delta) {
          hit = true;
          break;
        }
      if (!hit) {
        const Vec pre = warp.inverse(tau);
        hit = true;
        for (int i = 0; i < d; ++i)
          if (pre[static_cast<std::size_t>(i)] < box_lo[static_cast<std::size_t>(i)] ||
              pre[static_cast<std::size_t>(i)] > box_hi[static_cast<std::size_t>(i)]) {
            hit = false;
            break;
          }
      }
      if (hit) kept.push_back(k);
      return;
    }
    for (int v = klo[static_cast<std::size_t>(axis)]; v <= khi[static_cast<std::size_t>(axis)]; ++v) {
      k[static_cast<std::size_t>(axis)] = v;
      rec(axis + 1);
    }
  };
  rec(0);

  const double vb = unit_ball_volume(d);
  cov.shells_.resize(kept.size());
  parallel_for(kept.size(), [&](std::size_t shell_idx) {
    const IVec& kk = kept[shell_idx];
    Covering::Shell sh;
    sh.k = kk;
    sh.tau = cov.scaled(kk);
    sh.freq_center = warp.inverse(sh.tau);
    const Mat a = warp.inv_jacobian(sh.tau);
    sh.M = transpose(inverse(a));
    sh.Minv = inverse(sh.M);
    sh.row_norm.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      double rn = 0.0;
      for (int j = 0; j < d; ++j) rn += sh.M(i, j) * sh.M(i, j);
      sh.row_norm[static_cast<std::size_t>(i)] = std::sqrt(rn);
    }
    sh.mu1 = vb * std::pow(delta, d) / warp.weight(sh.tau);
    if (d <= 3) {
      Refined q = ball_integral([&warp](const Vec& t) { return warp.weight(t); }, sh.tau,
                                delta, 1e-9, 8, 5);
      sh.mu2 = q.value;
      sh.mu2_converged = q.converged;
    } else {
      Vec lo = sh.tau, hi = sh.tau;
      for (auto& v : lo) v -= delta;
      for (auto& v : hi) v += delta;
      const Vec tau_c = sh.tau;
      Refined q = midpoint_box(
          [&warp, &tau_c, delta](const Vec& t) {
            return dist(t, tau_c) < delta ? warp.weight(t) : 0.0;
          },
          lo, hi, 8, 1e-4, 6);
      sh.mu2 = q.value;
      sh.mu2_converged = q.converged;
    }

    // frequency-cell bounding box from 2d + 2^d mapped probe points, padded 5%
    {
      std::vector<Vec> fp;
      fp.push_back(sh.freq_center);
      for (int i = 0; i < d; ++i)
        for (double sgn : {-1.0, 1.0}) {
          Vec t = sh.tau;
          t[static_cast<std::size_t>(i)] += sgn * delta;
          fp.push_back(warp.inverse(t));
        }
      const double diag = delta / std::sqrt(static_cast<double>(d));
      for (int corner = 0; corner < (1 << d); ++corner) {
        Vec t = sh.tau;
        for (int i = 0; i < d; ++i)
          t[static_cast<std::size_t>(i)] += ((corner >> i) & 1) ? diag : -diag;
        fp.push_back(warp.inverse(t));
      }
      sh.fb_lo = fp.front();
      sh.fb_hi = fp.front();
      for (const auto& ppt : fp)
        for (int i = 0; i < d; ++i) {
          sh.fb_lo[static_cast<std::size_t>(i)] = std::min(sh.fb_lo[static_cast<std::size_t>(i)], ppt[static_cast<std::size_t>(i)]);
          sh.fb_hi[static_cast<std::size_t>(i)] = std::max(sh.fb_hi[static_cast<std::size_t>(i)], ppt[static_cast<std::size_t>(i)]);
        }
      for (int i = 0; i < d; ++i) {
        const double pad = 0.05 * (sh.fb_hi[static_cast<std::size_t>(i)] - sh.fb_lo[static_cast<std::size_t>(i)]);
        sh.fb_lo[static_cast<std::size_t>(i)] -= pad;
        sh.fb_hi[static_cast<std::size_t>(i)] += pad;
      }
    }
    cov.shells_[shell_idx] = std::move(sh);
  });

  // time cells per shell: l whose ellipsoid bounding box meets the extent
  cov.shell_cells_.resize(cov.shells_.size());
  for (std::size_t si = 0; si < cov.shells_.size(); ++si) {
    const Covering::Shell& sh = cov.shells_[si];
    // map the time box corners through M^{-1} to get the l search window
    Vec ulo(static_cast<std::size_t>(d), 0.0), uhi(static_cast<std::size_t>(d), 0.0);
    bool first = true;
    for (int corner = 0; corner < (1 << d); ++corner) {
      Vec y(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i)
        y[static_cast<std::size_t>(i)] = ((corner >> i) & 1) ? time_hi[static_cast<std::size_t>(i)] : time_lo[static_cast<std::size_t>(i)];
      const Vec u = sh.Minv * y;
      if (first) {
        ulo = u;
        uhi = u;
        first = false;
      } else {
        for (int i = 0; i < d; ++i) {
          ulo[static_cast<std::size_t>(i)] = std::min(ulo[static_cast<std::size_t>(i)], u[static_cast<std::size_t>(i)]);
          uhi[static_cast<std::size_t>(i)] = std::max(uhi[static_cast<std::size_t>(i)], u[static_cast<std::size_t>(i)]);
        }
      }
    }
    IVec llo(static_cast<std::size_t>(d)), lhi(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      llo[static_cast<std::size_t>(i)] = static_cast<int>(std::ceil((ulo[static_cast<std::size_t>(i)] - delta) / s));
      lhi[static_cast<std::size_t>(i)] = static_cast<int>(std::floor((uhi[static_cast<std::size_t>(i)] + delta) / s));
    }
    IVec l(static_cast<std::size_t>(d), 0);
    std::function<void(int)> lrec = [&](int axis) {
      if (axis == d) {
        Ellipsoid e;
        e.M = sh.M;
        e.Minv = sh.Minv;
        e.center_u = cov.scaled(l);
        e.r = delta;
        Vec blo, bhi;
        e.bbox(blo, bhi);
        for (int i = 0; i < d; ++i)
          if (bhi[static_cast<std::size_t>(i)] < time_lo[static_cast<std::size_t>(i)] ||
              blo[static_cast<std::size_t>(i)] > time_hi[static_cast<std::size_t>(i)])
            return;
        const std::size_t ci = cov.cells_.size();
        cov.cells_.push_back({static_cast<int>(si), l});
        cov.shell_cells_[si].push_back(ci);
        cov.lookup_.emplace(std::make_pair(l, sh.k), ci);
        return;
      }
      for (int v = llo[static_cast<std::size_t>(axis)]; v <= lhi[static_cast<std::size_t>(axis)]; ++v) {
        l[static_cast<std::size_t>(axis)] = v;
        lrec(axis + 1);
      }
    };
    lrec(0);
  }
  return cov;
}

}  // namespace warpfreq

#endif  // WARPFREQ_COVERING_HPP
