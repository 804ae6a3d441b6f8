#pragma once

// Independent reference implementations used as oracles by the unit tests.
// None of these call into the library's decompositions.

#include "ptrace_lab/matrix.hpp"
#include "ptrace_lab/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace ptl::oracle {

/// Characteristic polynomial coefficients of a Hermitian h by Faddeev-LeVerrier:
/// det(x - h) = x^d + c[1] x^{d-1} + ... + c[d].
inline std::vector<double> charpoly(const Matrix& h) {
  const Index d = h.rows();
  std::vector<double> c(static_cast<std::size_t>(d + 1), 0.0);
  c[0] = 1.0;
  Matrix mk = Matrix::Zero(d, d);
  for (Index k = 1; k <= d; ++k) {
    Matrix next = mk;
    for (Index i = 0; i < d; ++i) next(i, i) += c[static_cast<std::size_t>(k - 1)];
    mk = h * next;
    c[static_cast<std::size_t>(k)] = -mk.trace().real() / static_cast<double>(k);
  }
  return c;
}

inline double horner(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (double a : c) v = v * x + a;
  return v;
}

/// Singular values (descending) from the roots of the characteristic polynomial
/// of m* m, found by a sign-change scan followed by bisection. Requires simple
/// roots, which holds for generic random input.
inline std::vector<double> singular_values(const Matrix& m) {
  const Matrix h = m.adjoint() * m;
  const auto c = charpoly(h);
  const Index d = h.rows();
  const double hi = h.trace().real() * (1.0 + 1e-9) + 1e-12;
  const int grid = 200000;
  std::vector<double> roots;
  double x0 = -1e-12 * (1.0 + hi);
  double f0 = horner(c, x0);
  for (int i = 1; i <= grid && static_cast<Index>(roots.size()) < d; ++i) {
    const double x1 = x0 + (hi - x0) / static_cast<double>(grid - i + 1);
    const double f1 = horner(c, x1);
    if (f0 == 0.0) {
      roots.push_back(x0);
    } else if ((f0 < 0) != (f1 < 0)) {
      double lo = x0, up = x1, flo = f0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + up);
        const double fm = horner(c, mid);
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          up = mid;
        }
      }
      roots.push_back(0.5 * (lo + up));
    }
    x0 = x1;
    f0 = f1;
  }
  std::vector<double> out;
  for (double r : roots) out.push_back(std::sqrt(std::max(r, 0.0)));
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

/// Partial trace by explicit multi-index loops over every factor.
inline Matrix partial_trace(const Matrix& m, const std::vector<Index>& dims, const std::vector<bool>& traced) {
  const std::size_t n = dims.size();
  Index total = 1;
  for (Index d : dims) total *= d;
  Index kept = 1;
  for (std::size_t i = 0; i < n; ++i) if (!traced[i]) kept *= dims[i];
  Matrix out = Matrix::Zero(kept, kept);
  auto digits = [&](Index idx) {
    std::vector<Index> dg(n);
    for (std::size_t i = n; i-- > 0;) {
      dg[i] = idx % dims[i];
      idx /= dims[i];
    }
    return dg;
  };
  auto kept_index = [&](const std::vector<Index>& dg) {
    Index idx = 0;
    for (std::size_t i = 0; i < n; ++i) if (!traced[i]) idx = idx * dims[i] + dg[i];
    return idx;
  };
  for (Index r = 0; r < total; ++r) {
    const auto dr = digits(r);
    for (Index c = 0; c < total; ++c) {
      const auto dc = digits(c);
      bool diag = true;
      for (std::size_t i = 0; i < n && diag; ++i) if (traced[i] && dr[i] != dc[i]) diag = false;
      if (diag) out(kept_index(dr), kept_index(dc)) += m(r, c);
    }
  }
  return out;
}

/// Support function h(theta) = lambda_max(Re(e^{-i theta} X)) by power iteration
/// on a shifted copy, independent of the library eigen-solver.
inline double lambda_max(const Matrix& h) {
  const Index d = h.rows();
  const double shift = h.norm() + 1.0;
  Matrix s = h;
  for (Index i = 0; i < d; ++i) s(i, i) += shift;
  Vector v = Vector::Ones(d) / std::sqrt(static_cast<double>(d));
  for (Index i = 0; i < d; ++i) v(i) += Complex(0.01 * static_cast<double>(i + 1), 0.003 * static_cast<double>(i));
  v.normalize();
  double lam = 0.0;
  for (int it = 0; it < 20000; ++it) {
    Vector w = s * v;
    const double nl = w.norm();
    w /= nl;
    const bool done = std::abs(nl - lam) < 1e-15 * nl;
    lam = nl;
    v = w;
    if (done) break;
  }
  return (v.adjoint() * h * v)(0, 0).real();
}

}  // namespace ptl::oracle
