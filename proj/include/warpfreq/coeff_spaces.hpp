// warpfreq/coeff_spaces.hpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef WARPFREQ_COEFF_SPACES_HPP
#define WARPFREQ_COEFF_SPACES_HPP

#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

#include "warpfreq/covering.hpp"
#include "warpfreq/fft.hpp"

namespace warpfreq {

/// Coefficients indexed by the cells of a covering (one value per cell).
struct CellCoefficients {
  const Covering* cov = nullptr;
  CVec values;

  void require_match(const Covering& c) const {
    if (cov != &c || values.size() != c.size())
      throw std::invalid_argument("cell coefficients indexed by a different covering");
  }
};

/// Weighted mixed-norm sequence space spec: inner l^p over the time index,
/// outer l^q over the frequency index, with a positive weight per cell.
struct MixedNormSpec {
  double p = 2.0, q = 2.0;
  std::function<double(const Vec& y, const Vec& omega)> kappa;  // null means 1
  const Covering* cov = nullptr;

  double kappa_at(const Vec& y, const Vec& om) const { return kappa ? kappa(y, om) : 1.0; }
};

namespace detail {

inline double lp_accumulate(const std::vector<double>& vals, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : vals) m = std::max(m, v);
    return m;
  }
  double s = 0.0;
  for (double v : vals) s += std::pow(v, p);
  return std::pow(s, 1.0 / p);
}

}  // namespace detail

/// Discrete mixed norm || k -> || kappa(.,k) c_{.,k} ||_{l^p} ||_{l^q} with
/// the weight evaluated at the cell sample points.
inline double lpq_norm(const CellCoefficients& c, const MixedNormSpec& spec) {
  if (!spec.cov) throw std::invalid_argument("lpq_norm: spec has no covering");
  c.require_match(*spec.cov);
  const Covering& cov = *spec.cov;
  std::map<IVec, std::vector<double>> per_shell;
  for (std::size_t ci = 0; ci < cov.size(); ++ci) {
    const double w = spec.kappa_at(cov.sample_time(ci), cov.sample_freq(ci));
    per_shell[cov.k_of(ci)].push_back(w * std::abs(c.values[ci]));
  }
  std::vector<double> outer;
  outer.reserve(per_shell.size());
  for (const auto& [k, vals] : per_shell) outer.push_back(detail::lp_accumulate(vals, spec.p));
  return detail::lp_accumulate(outer, spec.q);
}

struct RasterGrid {
  Vec time_lo, time_hi;
  IVec time_shape;
  Vec freq_lo, freq_hi;  // in warped coordinates
  IVec freq_shape;
};

namespace detail {

// Continuous mixed norm of the rasterized indicator sum
// F(y, omega) = sum_j a_j 1_{V_j}(y, omega), evaluated as inner L^p over
// the time grid and outer L^q over frequency (d omega = w(tau) d tau).
inline double raster_mixed_norm(const Covering& cov, const std::vector<double>& amps,
                                const MixedNormSpec& spec, const RasterGrid& grid) {
  const int d = cov.warp().dim;
  const double p = spec.p, q = spec.q;

  std::size_t tn = 1, fn = 1;
  for (int i = 0; i < d; ++i) {
    tn *= static_cast<std::size_t>(grid.time_shape[static_cast<std::size_t>(i)]);
    fn *= static_cast<std::size_t>(grid.freq_shape[static_cast<std::size_t>(i)]);
  }
  Vec th(static_cast<std::size_t>(d)), fh(static_cast<std::size_t>(d));
  double tvol = 1.0, fvol = 1.0;
  for (int i = 0; i < d; ++i) {
    th[static_cast<std::size_t>(i)] = (grid.time_hi[static_cast<std::size_t>(i)] - grid.time_lo[static_cast<std::size_t>(i)]) /
                                      grid.time_shape[static_cast<std::size_t>(i)];
    fh[static_cast<std::size_t>(i)] = (grid.freq_hi[static_cast<std::size_t>(i)] - grid.freq_lo[static_cast<std::size_t>(i)]) /
                                      grid.freq_shape[static_cast<std::size_t>(i)];
    tvol *= th[static_cast<std::size_t>(i)];
    fvol *= fh[static_cast<std::size_t>(i)];
  }

  // raster-point coverage check: every cell needs >= 4 nodes per time axis
  // inside; with midpoint nodes that means spacing <= cell extent / 4
  for (std::size_t ci = 0; ci < cov.size(); ++ci) {
    Ellipsoid e = cov.time_cell(ci);
    Vec blo, bhi;
    e.bbox(blo, bhi);
    for (int i = 0; i < d; ++i)
      if ((bhi[static_cast<std::size_t>(i)] - blo[static_cast<std::size_t>(i)]) <
          4.0 * th[static_cast<std::size_t>(i)])
        throw std::invalid_argument("raster grid too coarse for covering cell");
  }

  // time membership is frequency-independent: precompute, per shell, the
  // partial indicator sums over all time raster nodes
  std::vector<Vec> time_pts(tn);
  {
    Vec y(static_cast<std::size_t>(d));
    for (std::size_t ti = 0; ti < tn; ++ti) {
      std::size_t trem = ti;
      for (int i = d - 1; i >= 0; --i) {
        const std::size_t n = static_cast<std::size_t>(grid.time_shape[static_cast<std::size_t>(i)]);
        y[static_cast<std::size_t>(i)] = grid.time_lo[static_cast<std::size_t>(i)] +
                                         (static_cast<double>(trem % n) + 0.5) * th[static_cast<std::size_t>(i)];
        trem /= n;
      }
      time_pts[ti] = y;
    }
  }
  std::vector<std::vector<double>> shell_time_sum(cov.shells().size());
  for (std::size_t si = 0; si < cov.shells().size(); ++si) {
    shell_time_sum[si].assign(tn, 0.0);
    const Covering::Shell& sh = cov.shells()[si];
    const auto& cells = cov.cells_of_shell(si);
    for (std::size_t ti = 0; ti < tn; ++ti) {
      const Vec u = sh.Minv * time_pts[ti];
      double s = 0.0;
      for (std::size_t ci : cells)
        if (dist(u, cov.scaled(cov.l_of(ci))) < cov.delta()) s += amps[ci];
      shell_time_sum[si][ti] = s;
    }
  }

  Vec tau(static_cast<std::size_t>(d));
  double outer_acc = 0.0, outer_max = 0.0;
  for (std::size_t fi = 0; fi < fn; ++fi) {
    std::size_t rem = fi;
    for (int i = d - 1; i >= 0; --i) {
      const std::size_t n = static_cast<std::size_t>(grid.freq_shape[static_cast<std::size_t>(i)]);
      tau[static_cast<std::size_t>(i)] = grid.freq_lo[static_cast<std::size_t>(i)] +
                                         (static_cast<double>(rem % n) + 0.5) * fh[static_cast<std::size_t>(i)];
      rem /= n;
    }
    // shells whose warped ball contains tau
    std::vector<std::size_t> active_shells;
    for (std::size_t si = 0; si < cov.shells().size(); ++si)
      if (dist(tau, cov.shells()[si].tau) < cov.delta()) active_shells.push_back(si);
    if (active_shells.empty()) continue;
    const Vec omega = cov.warp().inverse(tau);
    const double wtau = cov.warp().weight(tau);

    double inner_acc = 0.0, inner_max = 0.0;
    for (std::size_t ti = 0; ti < tn; ++ti) {
      double F = 0.0;
      for (std::size_t si : active_shells) F += shell_time_sum[si][ti];
      if (F == 0.0) continue;
      const double v = F * spec.kappa_at(time_pts[ti], omega);
      if (std::isinf(p))
        inner_max = std::max(inner_max, v);
      else
        inner_acc += std::pow(v, p);
    }
    const double inner = std::isinf(p) ? inner_max : std::pow(inner_acc * tvol, 1.0 / p);
    if (std::isinf(q))
      outer_max = std::max(outer_max, inner);
    else
      outer_acc += std::pow(inner, q) * wtau * fvol;  // d omega = w(tau) d tau
  }
  return std::isinf(q) ? outer_max : std::pow(outer_acc, 1.0 / q);
}

}  // namespace detail

/// Continuous Y^flat norm: || sum_j |c_j| 1_{V_j} ||_{L^{p,q}_kappa} by
/// rasterization on a phase-space grid.
inline double flat_norm(const CellCoefficients& c, const MixedNormSpec& spec,
                        const RasterGrid& grid) {
  if (!spec.cov) throw std::invalid_argument("flat_norm: spec has no covering");
  c.require_match(*spec.cov);
  std::vector<double> amps(c.values.size());
  for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = std::abs(c.values[i]);
  return detail::raster_mixed_norm(*spec.cov, amps, spec, grid);
}

/// Continuous Y^sharp norm: amplitudes |c_j| / mu(V_j).
inline double sharp_norm(const CellCoefficients& c, const MixedNormSpec& spec,
                         const RasterGrid& grid) {
  if (!spec.cov) throw std::invalid_argument("sharp_norm: spec has no covering");
  c.require_match(*spec.cov);
  std::vector<double> amps(c.values.size());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const auto [mu1, mu2] = spec.cov->cell_measures(i);
    amps[i] = std::abs(c.values[i]) / (mu1 * mu2);
  }
  return detail::raster_mixed_norm(*spec.cov, amps, spec, grid);
}

/// Zeroes all coefficients with |c| below the threshold; an absolute cut
/// when `absolute`, otherwise a fraction of the largest magnitude.
/// Returns the number of retained coefficients.
inline std::size_t threshold(CVec& values, double level, bool absolute) {
  double cut = level;
  if (!absolute) {
    double peak = 0.0;
    for (const auto& v : values) peak = std::max(peak, std::abs(v));
    cut = level * peak;
  }
  std::size_t kept = 0;
  for (auto& v : values) {
    if (std::abs(v) < cut)
      v = Cpx(0, 0);
    else
      ++kept;
  }
  return kept;
}

inline std::size_t threshold(CellCoefficients& c, double level, bool absolute = false) {
  return threshold(c.values, level, absolute);
}

}  // namespace warpfreq

#endif  // WARPFREQ_COEFF_SPACES_HPP
