// warpfreq/warpfreq.hpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef WARPFREQ_WARPFREQ_HPP
#define WARPFREQ_WARPFREQ_HPP

#include "warpfreq/admissibility.hpp"
#include "warpfreq/coeff_spaces.hpp"
#include "warpfreq/covering.hpp"
#include "warpfreq/fft.hpp"
#include "warpfreq/io.hpp"
#include "warpfreq/kernels.hpp"
#include "warpfreq/linalg.hpp"
#include "warpfreq/phase_grid.hpp"
#include "warpfreq/prototype.hpp"
#include "warpfreq/quadrature.hpp"
#include "warpfreq/radial.hpp"
#include "warpfreq/rng.hpp"
#include "warpfreq/transform.hpp"
#include "warpfreq/warp.hpp"

namespace warpfreq {

/// Built-in warp presets used across the command-line tools and tests.
/// "gabor": identity warp; "wavelet1d": slow-started logarithmic radial
/// warp on R; "alpha": slow-started power-law radial warp; "exotic2d":
/// the non-separable shear-type example.
inline Warp make_preset(const std::string& name, int d = 1, double p = 2.0) {
  if (name == "gabor") return make_identity_warp(d);
  if (name == "wavelet1d") return make_radial_warp(slow_start(sigma_log1p(), 1.0), 1);
  if (name == "radial-log") return make_radial_warp(slow_start(sigma_log1p(), 1.0), d);
  if (name == "alpha") return make_radial_warp(slow_start(sigma_power(p), 1.0), d);
  if (name == "exotic2d") return make_exotic2d_warp();
  if (name == "log1d") return make_log_warp1d();
  throw std::invalid_argument("unknown preset: " + name);
}

}  // namespace warpfreq

#endif  // WARPFREQ_WARPFREQ_HPP
