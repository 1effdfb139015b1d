// warpfreq/phase_grid.hpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef WARPFREQ_PHASE_GRID_HPP
#define WARPFREQ_PHASE_GRID_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "warpfreq/covering.hpp"
#include "warpfreq/linalg.hpp"
#include "warpfreq/prototype.hpp"
#include "warpfreq/quadrature.hpp"
#include "warpfreq/warp.hpp"

namespace warpfreq {

/// Discretization of the phase space: a frequency box inside the warp
/// domain carrying a uniform grid (midpoint-offset nodes, FFT-periodic),
/// plus one strided dual-lattice time grid per frequency channel. Channel
/// centers are uniform in warped coordinates with per-axis spacing
/// dtau = delta/sqrt(d), matching the covering geometry.
class PhaseGrid {
 public:
  struct Channel {
    IVec k;
    Vec tau;          // warped center
    Vec omega;        // Phi^{-1}(tau)
    double wtau = 1.0;
    double norm_fac = 1.0;  // w(Phi(omega))^{-1/2}
    IVec stride;            // per-axis dual-lattice subsampling, divides shape
    double mu2 = 0.0;       // covering-cell measure (w over the warped ball)
    double dmu_omega = 0.0;  // disjoint-cube midpoint measure w(tau) dtau^d
    double dt_vol = 0.0;    // time-lattice cell volume
    bool edge = false;
  };

  int dim() const { return dim_; }
  const Vec& box_lo() const { return box_lo_; }
  const Vec& box_hi() const { return box_hi_; }
  const IVec& shape() const { return shape_; }
  const Vec& h() const { return h_; }
  double hvol() const { return hvol_; }
  const Vec& dual_spacing() const { return dual_; }
  double delta() const { return delta_; }
  double dtau() const { return dtau_; }
  std::size_t grid_size() const { return total_; }
  const std::vector<Channel>& channels() const { return channels_; }
  const Warp& warp() const { return warp_; }

  /// Frequency node j (row-major flattened index).
  Vec grid_point(std::size_t flat) const {
    Vec xi(static_cast<std::size_t>(dim_));
    std::size_t rem = flat;
    for (int i = dim_ - 1; i >= 0; --i) {
      const std::size_t n = static_cast<std::size_t>(shape_[static_cast<std::size_t>(i)]);
      xi[static_cast<std::size_t>(i)] =
          box_lo_[static_cast<std::size_t>(i)] +
          (static_cast<double>(rem % n) + 0.5) * h_[static_cast<std::size_t>(i)];
      rem /= n;
    }
    return xi;
  }

  bool in_domain(std::size_t flat) const { return in_domain_[flat]; }

  /// Warped coordinate Phi(xi_j), cached at construction.
  const double* warped_point(std::size_t flat) const {
    return warped_.data() + flat * static_cast<std::size_t>(dim_);
  }

  /// Number of time-lattice points of a channel.
  std::size_t lattice_size(const Channel& ch) const {
    std::size_t m = 1;
    for (int i = 0; i < dim_; ++i)
      m *= static_cast<std::size_t>(shape_[static_cast<std::size_t>(i)] / ch.stride[static_cast<std::size_t>(i)]);
    return m;
  }

  /// Time point of lattice index m (row-major over the strided lattice).
  Vec lattice_point(const Channel& ch, std::size_t m) const {
    Vec y(static_cast<std::size_t>(dim_));
    std::size_t rem = m;
    for (int i = dim_ - 1; i >= 0; --i) {
      const std::size_t cnt = static_cast<std::size_t>(shape_[static_cast<std::size_t>(i)] / ch.stride[static_cast<std::size_t>(i)]);
      y[static_cast<std::size_t>(i)] = static_cast<double>(rem % cnt) *
                                       ch.stride[static_cast<std::size_t>(i)] *
                                       dual_[static_cast<std::size_t>(i)];
      rem /= cnt;
    }
    return y;
  }

  /// True when the warped coordinate of grid node `flat` sits at least
  /// `band` away (in warped distance, per axis) from the warped box hull.
  bool interior_band(std::size_t flat, double band) const {
    const double* t = warped_point(flat);
    for (int i = 0; i < dim_; ++i) {
      if (t[i] < warped_lo_[static_cast<std::size_t>(i)] + band ||
          t[i] > warped_hi_[static_cast<std::size_t>(i)] - band)
        return false;
    }
    return true;
  }

  const Vec& warped_lo() const { return warped_lo_; }
  const Vec& warped_hi() const { return warped_hi_; }

  /// Regular construction: channels at tau = dtau * k covering the warped
  /// image of the box (padded by the prototype radius). Channels whose
  /// atom support leaves the margin-shrunk warped box are flagged "edge".
  static PhaseGrid build(const Warp& warp, const Vec& box_lo, const Vec& box_hi,
                         const IVec& shape, double delta, const Prototype& theta,
                         double oversample = 1.0) {
    PhaseGrid g;
    g.init_box(warp, box_lo, box_hi, shape);
    g.delta_ = delta;
    g.dtau_ = delta / std::sqrt(static_cast<double>(g.dim_));
    g.make_channels(theta, oversample, nullptr);
    return g;
  }

  /// Channels taken from the covering's frequency shells; the covering's
  /// cached cell measures feed the synthesis quadrature weights.
  static PhaseGrid from_covering(const Covering& cov, const Vec& box_lo, const Vec& box_hi,
                                 const IVec& shape, const Prototype& theta,
                                 double oversample = 1.0) {
    PhaseGrid g;
    g.init_box(cov.warp(), box_lo, box_hi, shape);
    g.delta_ = cov.delta();
    g.dtau_ = cov.spacing();
    g.make_channels(theta, oversample, &cov);
    return g;
  }

 private:
  void init_box(const Warp& warp, const Vec& box_lo, const Vec& box_hi, const IVec& shape) {
    dim_ = warp.dim;
    if (static_cast<int>(shape.size()) != dim_)
      throw std::invalid_argument("phase grid: shape dimension mismatch");
    if (!warp.domain.contains(box_lo) || !warp.domain.contains(box_hi))
      throw std::invalid_argument("phase grid: box must lie strictly inside the warp domain");
    warp_ = warp;
    box_lo_ = box_lo;
    box_hi_ = box_hi;
    shape_ = shape;
    h_.resize(static_cast<std::size_t>(dim_));
    dual_.resize(static_cast<std::size_t>(dim_));
    hvol_ = 1.0;
    total_ = 1;
    for (int i = 0; i < dim_; ++i) {
      if (shape[static_cast<std::size_t>(i)] < 2)
        throw std::invalid_argument("phase grid: need at least 2 nodes per axis");
      h_[static_cast<std::size_t>(i)] =
          (box_hi[static_cast<std::size_t>(i)] - box_lo[static_cast<std::size_t>(i)]) /
          shape[static_cast<std::size_t>(i)];
      dual_[static_cast<std::size_t>(i)] =
          1.0 / (shape[static_cast<std::size_t>(i)] * h_[static_cast<std::size_t>(i)]);
      hvol_ *= h_[static_cast<std::size_t>(i)];
      total_ *= static_cast<std::size_t>(shape[static_cast<std::size_t>(i)]);
    }
    warped_.resize(total_ * static_cast<std::size_t>(dim_));
    in_domain_.assign(total_, false);
    warped_lo_.assign(static_cast<std::size_t>(dim_), std::numeric_limits<double>::infinity());
    warped_hi_.assign(static_cast<std::size_t>(dim_), -std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < total_; ++j) {
      const Vec xi = grid_point(j);
      if (!warp.domain.contains(xi)) continue;
      in_domain_[j] = true;
      const Vec t = warp.forward(xi);
      for (int i = 0; i < dim_; ++i) {
        warped_[j * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i)];
        warped_lo_[static_cast<std::size_t>(i)] = std::min(warped_lo_[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(i)]);
        warped_hi_[static_cast<std::size_t>(i)] = std::max(warped_hi_[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(i)]);
      }
    }
  }

  void make_channels(const Prototype& theta, double oversample, const Covering* cov) {
    const double r = theta.effective_radius(1e-8);
    const int d = dim_;
    std::vector<IVec> ks;
    if (cov) {
      for (const auto& sh : cov->shells()) ks.push_back(sh.k);
    } else {
      IVec klo(static_cast<std::size_t>(d)), khi(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) {
        klo[static_cast<std::size_t>(i)] =
            static_cast<int>(std::ceil((warped_lo_[static_cast<std::size_t>(i)] - r) / dtau_));
        khi[static_cast<std::size_t>(i)] =
            static_cast<int>(std::floor((warped_hi_[static_cast<std::size_t>(i)] + r) / dtau_));
      }
      IVec k(static_cast<std::size_t>(d), 0);
      std::function<void(int)> rec = [&](int axis) {
        if (axis == d) {
          ks.push_back(k);
          return;
        }
        for (int v = klo[static_cast<std::size_t>(axis)]; v <= khi[static_cast<std::size_t>(axis)]; ++v) {
          k[static_cast<std::size_t>(axis)] = v;
          rec(axis + 1);
        }
      };
      rec(0);
    }

    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      Channel ch;
      ch.k = ks[ki];
      ch.tau.resize(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) ch.tau[static_cast<std::size_t>(i)] = dtau_ * ch.k[static_cast<std::size_t>(i)];
      ch.omega = warp_.inverse(ch.tau);
      ch.wtau = warp_.weight(ch.tau);
      ch.norm_fac = 1.0 / std::sqrt(ch.wtau);

      // channel centers stay inside the box hull
      if (!cov) {
        bool inside = true;
        for (int i = 0; i < d; ++i)
          inside = inside && ch.tau[static_cast<std::size_t>(i)] >= warped_lo_[static_cast<std::size_t>(i)] - 1e-12 &&
                   ch.tau[static_cast<std::size_t>(i)] <= warped_hi_[static_cast<std::size_t>(i)] + 1e-12;
        if (!inside) continue;
      }

      // drop channels whose atom cannot touch any in-domain grid node
      if (!cov) {
        bool touches = false;
        for (std::size_t j = 0; j < total_ && !touches; ++j) {
          if (!in_domain_[j]) continue;
          double d2 = 0.0;
          const double* t = warped_point(j);
          for (int i = 0; i < d; ++i) {
            const double dd = t[i] - ch.tau[static_cast<std::size_t>(i)];
            d2 += dd * dd;
          }
          touches = d2 < r * r;
        }
        if (!touches) continue;
      }

      // time lattice stride: target the covering lattice density
      const Mat a = warp_.inv_jacobian(ch.tau);
      const Mat m = transpose(inverse(a));
      ch.stride.resize(static_cast<std::size_t>(d));
      ch.dt_vol = 1.0;
      for (int i = 0; i < d; ++i) {
        double rownorm = 0.0;
        for (int j = 0; j < d; ++j) rownorm += m(i, j) * m(i, j);
        rownorm = std::sqrt(rownorm);
        const double target = dtau_ * rownorm / std::max(oversample, 1e-9);
        int q = std::max(1, static_cast<int>(std::floor(target / dual_[static_cast<std::size_t>(i)])));
        const int n = shape_[static_cast<std::size_t>(i)];
        if (q > n) q = n;
        while (n % q != 0) --q;  // strides must divide the grid
        ch.stride[static_cast<std::size_t>(i)] = q;
        ch.dt_vol *= q * dual_[static_cast<std::size_t>(i)];
      }

      // covering-cell measure (reported) and the disjoint-cube midpoint
      // measure that weights the synthesis quadrature
      ch.dmu_omega = ch.wtau * std::pow(dtau_, d);
      if (cov) {
        ch.mu2 = cov->shells()[ki].mu2;
      } else if (d <= 3) {
        Refined q2 = ball_integral([this](const Vec& t) { return warp_.weight(t); }, ch.tau,
                                   delta_, 1e-8, 8, 4);
        ch.mu2 = q2.value;
      } else {
        ch.mu2 = warp_.weight(ch.tau) * unit_ball_volume(d) * std::pow(delta_, d);
      }

      // edge flag: the atom support ball, probed on axis and diagonal
      // directions, must map strictly inside the margin-shrunk box
      ch.edge = false;
      const double margin = 0.25 * dtau_;
      auto probe_inside = [&](const Vec& t) {
        const Vec om = warp_.inverse(t);
        for (int i = 0; i < d; ++i) {
          const double lo = box_lo_[static_cast<std::size_t>(i)] + margin * h_[static_cast<std::size_t>(i)];
          const double hi = box_hi_[static_cast<std::size_t>(i)] - margin * h_[static_cast<std::size_t>(i)];
          if (om[static_cast<std::size_t>(i)] < lo || om[static_cast<std::size_t>(i)] > hi) return false;
        }
        return true;
      };
      if (!probe_inside(ch.tau)) ch.edge = true;
      for (int i = 0; i < d && !ch.edge; ++i)
        for (double sgn : {-1.0, 1.0}) {
          Vec t = ch.tau;
          t[static_cast<std::size_t>(i)] += sgn * r;
          if (!probe_inside(t)) {
            ch.edge = true;
            break;
          }
        }
      const double diag = r / std::sqrt(static_cast<double>(d));
      for (int corner = 0; corner < (1 << d) && !ch.edge; ++corner) {
        Vec t = ch.tau;
        for (int i = 0; i < d; ++i)
          t[static_cast<std::size_t>(i)] += ((corner >> i) & 1) ? diag : -diag;
        if (!probe_inside(t)) ch.edge = true;
      }

      channels_.push_back(std::move(ch));
    }
    if (channels_.empty()) throw std::invalid_argument("phase grid: no channels retained");
  }

  Warp warp_;
  int dim_ = 0;
  Vec box_lo_, box_hi_, h_, dual_;
  IVec shape_;
  double hvol_ = 1.0;
  std::size_t total_ = 0;
  double delta_ = 1.0, dtau_ = 1.0;
  std::vector<Channel> channels_;
  std::vector<double> warped_;
  std::vector<bool> in_domain_;
  Vec warped_lo_, warped_hi_;
};

}  // namespace warpfreq

#endif  // WARPFREQ_PHASE_GRID_HPP
