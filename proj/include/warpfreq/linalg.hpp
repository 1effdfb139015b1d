// warpfreq/linalg.hpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef WARPFREQ_LINALG_HPP
#define WARPFREQ_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace warpfreq {

using Vec = std::vector<double>;
using IVec = std::vector<int>;

inline Vec operator+(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec operator*(double s, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline double dist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/// Dense square matrix, row-major. Dimensions here are tiny (the space
/// dimension d), so no attempt is made at blocking or sparsity.
struct Mat {
  int n = 0;
  std::vector<double> a;

  Mat() = default;
  explicit Mat(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}

  static Mat identity(int n) {
    Mat m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

inline Mat operator*(const Mat& x, const Mat& y) {
  Mat r(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k) {
      const double v = x(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < x.n; ++j) r(i, j) += v * y(k, j);
    }
  return r;
}

inline Vec operator*(const Mat& m, const Vec& v) {
  Vec r(static_cast<std::size_t>(m.n), 0.0);
  for (int i = 0; i < m.n; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.n; ++j) s += m(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

inline Mat operator-(const Mat& x, const Mat& y) {
  Mat r(x.n);
  for (std::size_t i = 0; i < x.a.size(); ++i) r.a[i] = x.a[i] - y.a[i];
  return r;
}

inline Mat operator*(double s, const Mat& x) {
  Mat r(x.n);
  for (std::size_t i = 0; i < x.a.size(); ++i) r.a[i] = s * x.a[i];
  return r;
}

inline Mat transpose(const Mat& m) {
  Mat r(m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) r(j, i) = m(i, j);
  return r;
}

inline double frobenius(const Mat& m) {
  double s = 0.0;
  for (double v : m.a) s += v * v;
  return std::sqrt(s);
}

/// LU decomposition with partial pivoting; returns false on (numerical)
/// singularity. lu holds both factors, perm the row permutation.
inline bool lu_decompose(Mat& lu, IVec& perm, double& det_sign) {
  const int n = lu.n;
  perm.resize(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  det_sign = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    double best = std::abs(lu(c, c));
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(lu(r, c)) > best) {
        best = std::abs(lu(r, c));
        piv = r;
      }
    }
    if (best == 0.0) return false;
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(lu(c, j), lu(piv, j));
      std::swap(perm[c], perm[piv]);
      det_sign = -det_sign;
    }
    const double d = lu(c, c);
    for (int r = c + 1; r < n; ++r) {
      const double f = lu(r, c) / d;
      lu(r, c) = f;
      for (int j = c + 1; j < n; ++j) lu(r, j) -= f * lu(c, j);
    }
  }
  return true;
}

inline double det(const Mat& m) {
  if (m.n == 1) return m(0, 0);
  if (m.n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (m.n == 3) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  }
  Mat lu = m;
  IVec perm;
  double sign;
  if (!lu_decompose(lu, perm, sign)) return 0.0;
  double d = sign;
  for (int i = 0; i < m.n; ++i) d *= lu(i, i);
  return d;
}

inline Vec solve(const Mat& m, const Vec& rhs) {
  Mat lu = m;
  IVec perm;
  double sign;
  if (!lu_decompose(lu, perm, sign))
    throw std::runtime_error("linalg: singular matrix in solve");
  const int n = m.n;
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = rhs[perm[i]];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) x[i] -= lu(i, j) * x[j];
    x[i] /= lu(i, i);
  }
  return x;
}

inline Mat inverse(const Mat& m) {
  Mat lu = m;
  IVec perm;
  double sign;
  if (!lu_decompose(lu, perm, sign))
    throw std::runtime_error("linalg: singular matrix in inverse");
  const int n = m.n;
  Mat inv(n);
  Vec e(static_cast<std::size_t>(n), 0.0), col;
  for (int c = 0; c < n; ++c) {
    std::fill(e.begin(), e.end(), 0.0);
    e[c] = 1.0;
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = e[perm[i]];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
    for (int i = n - 1; i >= 0; --i) {
      for (int j = i + 1; j < n; ++j) x[i] -= lu(i, j) * x[j];
      x[i] /= lu(i, i);
    }
    for (int i = 0; i < n; ++i) inv(i, c) = x[i];
  }
  return inv;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
inline Vec sym_eigenvalues(Mat m) {
  const int n = m.n;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(m(p, q)) < 1e-300) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
      }
  }
  Vec ev(n);
  for (int i = 0; i < n; ++i) ev[i] = m(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Spectral norm ‖M‖ = largest singular value, via eigenvalues of MᵀM.
inline double op_norm(const Mat& m) {
  if (m.n == 1) return std::abs(m(0, 0));
  const Vec ev = sym_eigenvalues(transpose(m) * m);
  return std::sqrt(std::max(0.0, ev.back()));
}

/// Condition number in the spectral norm (max/min singular value).
inline double cond2(const Mat& m) {
  if (m.n == 1) return 1.0;
  const Vec ev = sym_eigenvalues(transpose(m) * m);
  const double lo = std::max(ev.front(), 0.0);
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(ev.back() / lo);
}

}  // namespace warpfreq

#endif  // WARPFREQ_LINALG_HPP
