// warpfreq/fft.hpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef WARPFREQ_FFT_HPP
#define WARPFREQ_FFT_HPP

#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "warpfreq/linalg.hpp"

namespace warpfreq {

using Cpx = std::complex<double>;
using CVec = std::vector<Cpx>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Unnormalized in-place radix-2 transform: x[k] <- sum_j x[j] e^{sign*2pi i jk/n}.
inline void fft_pow2(Cpx* x, std::size_t n, int sign) {
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const Cpx wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      Cpx w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const Cpx u = x[i + j];
        const Cpx v = x[i + j + len / 2] * w;
        x[i + j] = u + v;
        x[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// Bluestein's algorithm for arbitrary length, built on the radix-2 kernel.
inline void fft_bluestein(Cpx* x, std::size_t n, int sign) {
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  CVec a(m, Cpx(0, 0)), b(m, Cpx(0, 0));
  CVec chirp(n);
  for (std::size_t j = 0; j < n; ++j) {
    // j^2 mod 2n keeps the argument small for long transforms
    const std::size_t j2 = (j * j) % (2 * n);
    const double ang = sign * std::numbers::pi * static_cast<double>(j2) / static_cast<double>(n);
    chirp[j] = Cpx(std::cos(ang), std::sin(ang));
  }
  for (std::size_t j = 0; j < n; ++j) a[j] = x[j] * chirp[j];
  b[0] = Cpx(1, 0);
  for (std::size_t j = 1; j < n; ++j) b[j] = b[m - j] = std::conj(chirp[j]);
  fft_pow2(a.data(), m, -1);
  fft_pow2(b.data(), m, -1);
  for (std::size_t j = 0; j < m; ++j) a[j] *= b[j];
  fft_pow2(a.data(), m, +1);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t j = 0; j < n; ++j) x[j] = a[j] * inv_m * chirp[j];
}

}  // namespace detail

/// Unnormalized DFT, any length: x[k] <- sum_j x[j] e^{sign*2pi i jk/n},
/// sign = -1 for the forward (analysis) kernel, +1 for the inverse kernel.
inline void fft(CVec& x, int sign) {
  if (x.empty()) return;
  if (detail::is_pow2(x.size()))
    detail::fft_pow2(x.data(), x.size(), sign);
  else
    detail::fft_bluestein(x.data(), x.size(), sign);
}

/// Row-major n-dimensional transform, one pass per axis.
inline void fft_nd(CVec& x, const IVec& shape, int sign) {
  std::size_t total = 1;
  for (int s : shape) total *= static_cast<std::size_t>(s);
  if (x.size() != total) throw std::invalid_argument("fft_nd: shape mismatch");
  std::size_t stride = 1;
  for (int ax = static_cast<int>(shape.size()) - 1; ax >= 0; --ax) {
    const std::size_t n = static_cast<std::size_t>(shape[ax]);
    CVec line(n);
    const std::size_t block = stride * n;
    for (std::size_t base = 0; base < total; base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        for (std::size_t j = 0; j < n; ++j) line[j] = x[base + off + j * stride];
        fft(line, sign);
        for (std::size_t j = 0; j < n; ++j) x[base + off + j * stride] = line[j];
      }
    }
    stride = block;
  }
}

}  // namespace warpfreq

#endif  // WARPFREQ_FFT_HPP
