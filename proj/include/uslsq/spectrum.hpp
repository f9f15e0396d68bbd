#pragma once

// Eigenvalues of scaled information matrices and Schur dominance.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "uslsq/design.hpp"
#include "uslsq/error.hpp"

namespace uslsq {

inline constexpr double kJacobiTolerance = 1e-12;
inline constexpr double kClusterTolerance = 1e-7;

/// All eigenvalues of a symmetric n x n row-major matrix by cyclic Jacobi
/// rotations, sorted ascending.
inline std::vector<double> sym_eig(std::vector<double> a, std::size_t n) {
  if (a.size() != n * n) throw Error("sym_eig: matrix is not " + std::to_string(n) + "x" + std::to_string(n));
  auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(A(i, j) - A(j, i)) > kJacobiTolerance)
        throw Error("sym_eig: matrix is not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");

  auto off_norm = [&] {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2 * A(i, j) * A(i, j);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && off_norm() > kJacobiTolerance; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = A(p, q);
        if (std::abs(apq) < 1e-300) continue;
        double theta = (A(q, q) - A(p, p)) / (2 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = A(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// F = I - (rk)^{-1} Lambda, row-major v x v.
inline std::vector<double> scaled_information_matrix(const BlockDesign& d) {
  auto p = d.require_params("scaled information matrix");
  auto lam = concurrence_matrix(d);
  std::size_t v = d.v();
  std::vector<double> f(v * v);
  double rk = static_cast<double>(p.r) * p.k;
  for (std::size_t i = 0; i < v; ++i)
    for (std::size_t j = 0; j < v; ++j)
      f[i * v + j] = (i == j ? 1.0 : 0.0) - lam.at(static_cast<int>(i), static_cast<int>(j)) / rk;
  return f;
}

/// Clustered eigenvalues (value, multiplicity), ascending.
struct Spectrum {
  std::vector<std::pair<double, int>> clusters;
  // True when the structural zero eigenvalue of the all-one vector was removed.
  bool excludes_trivial_zero = true;

  int size() const {
    int s = 0;
    for (auto& c : clusters) s += c.second;
    return s;
  }
  std::vector<double> expanded() const {
    std::vector<double> out;
    for (auto& [val, m] : clusters) out.insert(out.end(), m, val);
    return out;
  }
};

inline Spectrum cluster_eigenvalues(std::vector<double> ev, bool excludes_zero) {
  std::sort(ev.begin(), ev.end());
  Spectrum s;
  s.excludes_trivial_zero = excludes_zero;
  std::size_t i = 0;
  while (i < ev.size()) {
    std::size_t j = i;
    double sum = 0;
    while (j < ev.size() && ev[j] - ev[i] <= kClusterTolerance) sum += ev[j++];
    double mean = sum / static_cast<double>(j - i);
    if (mean < 0 && mean > -kClusterTolerance) mean = 0;
    if (mean > 1 && mean < 1 + kClusterTolerance) mean = 1;
    s.clusters.emplace_back(mean, static_cast<int>(j - i));
    i = j;
  }
  return s;
}

/// Eigenvalues of F(d) with the all-one eigenvector's zero removed.
inline Spectrum canonical_efficiency_factors(const BlockDesign& d) {
  auto ev = sym_eig(scaled_information_matrix(d), d.v());
  // The smallest eigenvalue is the structural zero (F is positive semidefinite).
  ev.erase(ev.begin());
  return cluster_eigenvalues(std::move(ev), true);
}

/// Every ascending prefix sum of a is at least the matching prefix sum of b.
inline bool schur_dominates(const Spectrum& a, const Spectrum& b) {
  auto x = a.expanded(), y = b.expanded();
  if (x.size() != y.size())
    throw Error("schur_dominates: spectra have " + std::to_string(x.size()) + " and " + std::to_string(y.size()) +
                " values");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    if (sx < sy - kClusterTolerance) return false;
  }
  return true;
}

}  // namespace uslsq
