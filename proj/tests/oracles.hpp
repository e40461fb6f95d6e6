#pragma once

// Independent reference values for the test suites. Nothing here calls into
// the dual-expectation or kernel code of the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace oracle {

/// Maclaurin series in long double; accurate for |x| <= 4.
inline double erf_series(double x) {
  const long double z = x;
  long double term = z;
  long double sum = z;
  for (int n = 1; n < 400; ++n) {
    term *= -z * z / n;
    const long double add = term / (2 * n + 1);
    sum += add;
    if (std::fabs(static_cast<double>(add)) < 1e-30L) break;
  }
  return static_cast<double>(2.0L / std::sqrt(std::numbers::pi_v<long double>) * sum);
}

/// E over U ~ N(0, var) of g(U), trapezoid on [-12 sd, 12 sd].
template <class G>
double gauss_1d(double var, G g, int nodes = 6001) {
  if (var <= 0.0) return g(0.0);
  const double sd = std::sqrt(var);
  const double h = 24.0 / (nodes - 1);
  double s = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double z = -12.0 + h * i;
    const double w = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
    s += w * std::exp(-0.5 * z * z) * g(sd * z);
  }
  return s * h / std::sqrt(2.0 * std::numbers::pi);
}

/// E[erf(m1 U) erf(m2 V)] by conditioning V on U.
inline double erf_pair(double s11, double s22, double s12, double m1, double m2) {
  const double beta = s11 > 0.0 ? s12 / s11 : 0.0;
  const double v = s11 > 0.0 ? std::max(0.0, s22 - s12 * s12 / s11) : s22;
  const double scale = std::sqrt(1.0 + 2.0 * m2 * m2 * v);
  return gauss_1d(s11, [&](double u) { return std::erf(m1 * u) * std::erf(m2 * beta * u / scale); });
}

/// E[erf_m1'(U) erf_m2'(V)].
inline double derf_pair(double s11, double s22, double s12, double m1, double m2) {
  const double beta = s11 > 0.0 ? s12 / s11 : 0.0;
  const double v = s11 > 0.0 ? std::max(0.0, s22 - s12 * s12 / s11) : s22;
  const double k = 1.0 + 2.0 * m2 * m2 * v;
  const double c = 2.0 / std::sqrt(std::numbers::pi);
  return gauss_1d(s11, [&](double u) {
    const double mu = beta * u;
    return c * m1 * std::exp(-m1 * m1 * u * u) * c * m2 * std::exp(-m2 * m2 * mu * mu / k) / std::sqrt(k);
  });
}

struct Net {
  std::size_t depth = 3;
  double sw = 1.0;
  double sb = 0.1;
};

struct Cov {
  double a, b, c;
};

inline Cov base(const Net& n, std::span<const double> x, std::span<const double> y) {
  double xx = 0, yy = 0, xy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx += x[i] * x[i];
    yy += y[i] * y[i];
    xy += x[i] * y[i];
  }
  const double s = n.sw * n.sw / x.size();
  const double b = n.sb * n.sb;
  return {s * xx + b, s * yy + b, s * xy + b};
}

/// NTK of an erf_m network with surrogate erf_ms' in the second slot; ms = 0
/// means the true derivative.
inline double erf_kernel(const Net& n, double m, double ms, std::span<const double> x, std::span<const double> y) {
  const double sw2 = n.sw * n.sw;
  const double sb2 = n.sb * n.sb;
  Cov c = base(n, x, y);
  double k = c.c;
  for (std::size_t l = 2; l <= n.depth; ++l) {
    const double d = sw2 * derf_pair(c.a, c.b, c.c, m, ms > 0.0 ? ms : m);
    Cov nx{sw2 * erf_pair(c.a, c.a, c.a, m, m) + sb2, sw2 * erf_pair(c.b, c.b, c.b, m, m) + sb2,
           sw2 * erf_pair(c.a, c.b, c.c, m, m) + sb2};
    k = nx.c + k * d;
    c = nx;
  }
  return k;
}

/// Arc-cosine recursion of the infinite-scale sign network: NNGP value and,
/// with `surrogate_m` > 0, the SG-NTK whose second slot is erf_{surrogate_m}'.
/// Without a surrogate only off-diagonal NTK values are finite.
inline double sign_kernel(const Net& n, double surrogate_m, std::span<const double> x, std::span<const double> y) {
  const double sw2 = n.sw * n.sw;
  const double sb2 = n.sb * n.sb;
  const double pi = std::numbers::pi;
  Cov c = base(n, x, y);
  double k = c.c;
  for (std::size_t l = 2; l <= n.depth; ++l) {
    const double det = std::max(0.0, c.a * c.b - c.c * c.c);
    double d;
    if (surrogate_m > 0.0) {
      // E[2 delta(U) erf_s'(V)] = 2 p_U(0) E[erf_s'(V) | U = 0]
      const double m = surrogate_m;
      const double tau2 = det / c.a;
      d = sw2 * 2.0 / std::sqrt(2.0 * pi * c.a) * (2.0 * m / std::sqrt(pi)) / std::sqrt(1.0 + 2.0 * m * m * tau2);
    } else {
      d = sw2 * 2.0 / (pi * std::sqrt(det));
    }
    const double rho = std::clamp(c.c / std::sqrt(c.a * c.b), -1.0, 1.0);
    const Cov nx{sw2 + sb2, sw2 + sb2, sw2 * (1.0 - 2.0 * std::acos(rho) / pi) + sb2};
    k = nx.c + k * d;
    c = nx;
  }
  return k;
}

/// Cross NNGP of two erf activations sharing first-layer weights, depth 2.
inline double cross_nngp2(const Net& n, double m1, double m2, std::span<const double> x, std::span<const double> y) {
  const Cov c = base(n, x, y);
  return n.sw * n.sw * erf_pair(c.a, c.b, c.c, m1, m2) + n.sb * n.sb;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
