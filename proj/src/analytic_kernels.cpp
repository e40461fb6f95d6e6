#include "sgntk/analytic_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sgntk/dual_expectations.hpp"
#include "sgntk/errors.hpp"
#include "sgntk/parallel.hpp"

namespace sgntk {

namespace {

constexpr double kSingularTolerance = 1e-15;

bool uses_derivatives(KernelKind k) {
  return k == KernelKind::NngpDot || k == KernelKind::Ntk || k == KernelKind::SurrogateSigma ||
         k == KernelKind::SgNtk;
}

bool two_slot(KernelKind k) {
  return k == KernelKind::CrossNngp || k == KernelKind::SurrogateSigma || k == KernelKind::SgNtk;
}

/// E[s(Y)], Y ~ N(0, variance); exact for rect, and for erf' when `closed`.
double surrogate_mean(const SurrogateSpec& s, double variance, std::size_t order, bool closed) {
  switch (s.kind) {
    case SurrogateKind::Rect:
      if (variance <= 0.0) return s.eval(0.0);
      return std::erf(0.5 * s.scale / std::sqrt(2.0 * variance));
    case SurrogateKind::ErfDerivative:
      if (!closed) return gh_expect_1d(variance, s.eval, order);
      return 2.0 * s.scale / std::sqrt(std::numbers::pi) / std::sqrt(1.0 + 2.0 * s.scale * s.scale * variance);
    default:
      return gh_expect_1d(variance, s.eval, order);
  }
}

Cov2 swapped(const Triple& t) { return {t.b, t.a, t.c}; }

}  // namespace

const char* to_string(KernelKind kind) noexcept {
  switch (kind) {
    case KernelKind::Nngp: return "nngp";
    case KernelKind::NngpDot: return "nngp-dot";
    case KernelKind::Ntk: return "ntk";
    case KernelKind::CrossNngp: return "cross-nngp";
    case KernelKind::SurrogateSigma: return "surrogate-sigma";
    case KernelKind::SgNtk: return "sgntk";
  }
  return "?";
}

const char* to_string(KernelMode mode) noexcept {
  switch (mode) {
    case KernelMode::ClosedForm: return "closed-form";
    case KernelMode::Quadrature: return "quadrature";
    case KernelMode::SignLimit: return "sign-limit";
  }
  return "?";
}

KernelSpec KernelSpec::nngp(std::size_t depth, ActivationSpec activation, KernelMode mode) {
  KernelSpec s;
  s.kind = KernelKind::Nngp;
  s.depth = depth;
  s.activation2 = activation;
  s.activation1 = std::move(activation);
  s.mode = mode;
  return s;
}

KernelSpec KernelSpec::ntk(std::size_t depth, ActivationSpec activation, KernelMode mode) {
  KernelSpec s = nngp(depth, std::move(activation), mode);
  s.kind = KernelKind::Ntk;
  return s;
}

KernelSpec KernelSpec::sg_ntk(std::size_t depth, ActivationSpec activation, SurrogateSpec surrogate,
                              KernelMode mode) {
  KernelSpec s = nngp(depth, std::move(activation), mode);
  s.kind = KernelKind::SgNtk;
  s.surrogate2 = std::move(surrogate);
  return s;
}

KernelSpec KernelSpec::cross_nngp(std::size_t depth, ActivationSpec first, ActivationSpec second,
                                  KernelMode mode) {
  KernelSpec s;
  s.kind = KernelKind::CrossNngp;
  s.depth = depth;
  s.activation1 = std::move(first);
  s.activation2 = std::move(second);
  s.mode = mode;
  return s;
}

const ActivationSpec& KernelSpec::second_activation() const noexcept {
  return two_slot(kind) ? activation2 : activation1;
}

SurrogateSpec KernelSpec::first_derivative() const {
  return surrogate1 ? *surrogate1 : activation1.derivative();
}

SurrogateSpec KernelSpec::second_derivative() const {
  if (!two_slot(kind)) return first_derivative();
  return surrogate2 ? *surrogate2 : activation2.derivative();
}

bool KernelSpec::symmetric() const {
  if (!two_slot(kind)) return true;
  if (activation1.name != activation2.name) return false;
  if (kind == KernelKind::CrossNngp) return true;
  return first_derivative().name == second_derivative().name;
}

void KernelSpec::validate() const {
  if (depth < 1) raise(Errc::InvalidArgument, "kernel depth must be >= 1");
  if ((kind == KernelKind::NngpDot || kind == KernelKind::SurrogateSigma) && depth < 2) {
    raise(Errc::InvalidArgument, std::string(to_string(kind)) + " needs depth >= 2");
  }
  if (!(sigma_w > 0.0) || !(sigma_b >= 0.0)) raise(Errc::InvalidArgument, "need sigma_w > 0, sigma_b >= 0");
  if (order < 8 || order > 256) raise(Errc::InvalidArgument, "quadrature order must lie in [8, 256]");
  const ActivationSpec& second = second_activation();
  for (const ActivationSpec* a : {&activation1, &second}) {
    if (mode == KernelMode::ClosedForm && a->kind != ActivationKind::Erf) {
      raise(Errc::InvalidArgument, "closed-form mode needs erf activations, got " + a->name);
    }
    if (mode == KernelMode::SignLimit && a->kind != ActivationKind::Sign) {
      raise(Errc::InvalidArgument, "sign-limit mode needs sign activations, got " + a->name);
    }
    if (mode == KernelMode::Quadrature && !a->eval) raise(Errc::InvalidArgument, "activation has no evaluator");
  }
  if (uses_derivatives(kind)) {
    first_derivative();
    second_derivative();
  }
}

double KernelValue::get() const {
  if (divergent) raise(Errc::DivergentKernel, "kernel value diverges");
  return value;
}

Triple base_covariance(const KernelSpec& spec, std::span<const double> x, std::span<const double> xp) {
  if (x.size() != xp.size() || x.empty()) raise(Errc::DimensionMismatch, "input dimensions differ");
  const double s = spec.sigma_w * spec.sigma_w / static_cast<double>(x.size());
  const double beta = spec.sigma_b * spec.sigma_b;
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;
  double dist = 0.0;
  double cross = 0.0;  // Lagrange identity for |x|^2|x'|^2 - <x,x'>^2
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx += x[i] * x[i];
    yy += xp[i] * xp[i];
    xy += x[i] * xp[i];
    dist += (x[i] - xp[i]) * (x[i] - xp[i]);
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double w = x[i] * xp[j] - x[j] * xp[i];
      cross += w * w;
    }
  }
  return {s * xx + beta, s * yy + beta, s * xy + beta, s * s * cross + s * beta * dist};
}

Triple next_covariance(const KernelSpec& spec, const Triple& t) {
  const double sw2 = spec.sigma_w * spec.sigma_w;
  const double sb2 = spec.sigma_b * spec.sigma_b;
  const ActivationSpec& act1 = spec.activation1;
  const ActivationSpec& act2 = spec.second_activation();
  if (!(t.a > 0.0) || !(t.b > 0.0)) {
    if (spec.mode == KernelMode::SignLimit || t.a < 0.0 || t.b < 0.0) {
      raise(Errc::ZeroDiagonal, "zero input variance; use sigma_b > 0 or nonzero inputs");
    }
  }
  const bool coincident = t.det <= 0.0 && t.a == t.b && t.a == t.c && act1.name == act2.name;
  Triple n;
  switch (spec.mode) {
    case KernelMode::SignLimit: {
      // E[sign sign] = 1 - 2 theta / pi with theta the angle between the arguments
      const double theta = std::atan2(std::sqrt(std::max(t.det, 0.0)), t.c);
      n.a = n.b = sw2 + sb2;
      n.c = sw2 * (1.0 - 2.0 * theta / std::numbers::pi) + sb2;
      n.det = sw2 * (2.0 * theta / std::numbers::pi) * (n.a + n.c);
      return n;
    }
    case KernelMode::ClosedForm: {
      const double m1 = act1.scale;
      const double m2 = act2.scale;
      n.a = sw2 * t_erf_pair({t.a, t.a, t.a}, m1, m1) + sb2;
      n.b = sw2 * t_erf_pair({t.b, t.b, t.b}, m2, m2) + sb2;
      n.c = coincident ? n.a : sw2 * t_erf_pair({t.a, t.b, t.c}, m1, m2) + sb2;
      break;
    }
    case KernelMode::Quadrature: {
      const ScalarFn& f1 = act1.eval;
      const ScalarFn& f2 = act2.eval;
      n.a = sw2 * gh_expect_1d(t.a, [&](double z) { const double v = f1(z); return v * v; }, spec.order) + sb2;
      n.b = sw2 * gh_expect_1d(t.b, [&](double z) { const double v = f2(z); return v * v; }, spec.order) + sb2;
      n.c = coincident ? n.a : sw2 * gh_expect({t.a, t.b, t.c}, f1, f2, spec.order) + sb2;
      break;
    }
  }
  n.det = coincident ? 0.0 : std::max(0.0, n.a * n.b - n.c * n.c);
  return n;
}

KernelValue derivative_expectation(const KernelSpec& spec, const Triple& t) {
  const double sw2 = spec.sigma_w * spec.sigma_w;
  const SurrogateSpec d1 = spec.first_derivative();
  const SurrogateSpec d2 = spec.second_derivative();
  const bool closed = spec.closed_form_surrogates && spec.mode != KernelMode::Quadrature;
  const Cov2 cov{t.a, t.b, t.c};
  const double pi = std::numbers::pi;

  if (d1.is_dirac() && d2.is_dirac()) {
    if (!(t.a > 0.0) || !(t.b > 0.0)) raise(Errc::ZeroDiagonal, "Dirac pair needs positive variances");
    if (t.det <= kSingularTolerance * t.a * t.b) {
      return KernelValue::diverging(2.0 * sw2 / pi / std::sqrt(t.a), 1);
    }
    return KernelValue::finite(2.0 * sw2 / pi / std::sqrt(t.det));
  }
  // orient so that a Dirac or erf' factor sits in the first slot
  auto one_sided = [&](const SurrogateSpec& s, const SurrogateSpec& g, const Cov2& c, double det) {
    if (s.is_dirac()) {
      if (closed && g.kind == SurrogateKind::ErfDerivative) {
        const double m = g.scale;
        return 2.0 / pi * m / std::sqrt(0.5 * c.s11 + m * m * det);
      }
      if (!(c.s11 > 0.0)) raise(Errc::ZeroDiagonal, "Dirac slot needs a positive variance");
      return std::sqrt(2.0 / pi) / std::sqrt(c.s11) * surrogate_mean(g, det / c.s11, spec.order, closed);
    }
    // erf' factor: exact Gaussian tilt of Z1, then E[g(Y)]
    const double m = s.scale;
    const double scale = 1.0 + 2.0 * m * m * c.s11;
    double tau2 = c.s22;
    if (c.s11 > 0.0) {
      const double beta = c.s12 / c.s11;
      tau2 = std::max(0.0, det / c.s11) + beta * beta * c.s11 / scale;
    }
    return 2.0 * m / std::sqrt(pi) / std::sqrt(scale) * surrogate_mean(g, tau2, spec.order, closed);
  };
  double e = 0.0;
  if (d2.is_dirac()) {
    e = one_sided(d2, d1, swapped(t), t.det);
  } else if (d1.is_dirac()) {
    e = one_sided(d1, d2, cov, t.det);
  } else if (closed && d1.kind == SurrogateKind::ErfDerivative && d2.kind == SurrogateKind::ErfDerivative) {
    e = tdot_erf_pair(cov, d1.scale, d2.scale);
  } else if (d1.kind == SurrogateKind::ErfDerivative) {
    e = one_sided(d1, d2, cov, t.det);
  } else if (d2.kind == SurrogateKind::ErfDerivative) {
    e = one_sided(d2, d1, swapped(t), t.det);
  } else {
    e = gh_expect(cov, d1.eval, d2.eval, spec.order);
  }
  return KernelValue::finite(sw2 * e);
}

namespace {

/// K_l = c_l + K_{l-1} D_l with divergence bookkeeping.
KernelValue accumulate(double c, const KernelValue& previous, const KernelValue& d) {
  if (d.divergent) {
    const double base = previous.divergent ? previous.rate : previous.value;
    return KernelValue::diverging(base * d.rate, previous.order + d.order);
  }
  if (previous.divergent) return KernelValue::diverging(previous.rate * d.value, previous.order);
  return KernelValue::finite(c + previous.value * d.value);
}

void check_parallel(const KernelSpec& spec, const Triple& base, std::span<const double> x,
                    std::span<const double> xp) {
  if (spec.mode != KernelMode::SignLimit || spec.sigma_b > 0.0 || !uses_derivatives(spec.kind)) return;
  if (!spec.first_derivative().is_dirac() || !spec.second_derivative().is_dirac()) return;
  const bool same = std::equal(x.begin(), x.end(), xp.begin(), xp.end());
  if (!same && base.det <= kSingularTolerance * base.a * base.b) {
    raise(Errc::NonParallelRequired, "sign-limit kernel at parallel inputs needs sigma_b > 0");
  }
}

KernelValue run(const KernelSpec& spec, KernelKind kind, std::size_t depth, std::span<const double> x,
                std::span<const double> xp) {
  KernelSpec s = spec;
  s.kind = kind;
  s.depth = depth;
  s.validate();
  Triple t = base_covariance(s, x, xp);
  check_parallel(s, t, x, xp);
  if (depth >= 2 && (!(t.a > 0.0) || !(t.b > 0.0))) {
    raise(Errc::ZeroDiagonal, "zero first-layer variance; use sigma_b > 0 or nonzero inputs");
  }
  const bool recursive = kind == KernelKind::Ntk || kind == KernelKind::SgNtk;
  KernelValue k = KernelValue::finite(t.c);
  KernelValue d;
  for (std::size_t l = 2; l <= depth; ++l) {
    if (recursive || (uses_derivatives(kind) && l == depth)) d = derivative_expectation(s, t);
    t = next_covariance(s, t);
    if (recursive) k = accumulate(t.c, k, d);
  }
  switch (kind) {
    case KernelKind::Nngp:
    case KernelKind::CrossNngp: return KernelValue::finite(t.c);
    case KernelKind::NngpDot:
    case KernelKind::SurrogateSigma: return d;
    case KernelKind::Ntk:
    case KernelKind::SgNtk: return k;
  }
  return k;
}

}  // namespace

KernelValue evaluate(const KernelSpec& spec, std::span<const double> x, std::span<const double> xp) {
  return run(spec, spec.kind, spec.depth, x, xp);
}

double nngp(const KernelSpec& spec, std::size_t depth, std::span<const double> x, std::span<const double> xp) {
  return run(spec, KernelKind::Nngp, depth, x, xp).value;
}

KernelValue nngp_dot(const KernelSpec& spec, std::size_t depth, std::span<const double> x,
                     std::span<const double> xp) {
  return run(spec, KernelKind::NngpDot, depth, x, xp);
}

KernelValue ntk(const KernelSpec& spec, std::size_t depth, std::span<const double> x, std::span<const double> xp) {
  return run(spec, KernelKind::Ntk, depth, x, xp);
}

double cross_nngp(const KernelSpec& spec, std::size_t depth, std::span<const double> x,
                  std::span<const double> xp) {
  return run(spec, KernelKind::CrossNngp, depth, x, xp).value;
}

double surrogate_sigma(const KernelSpec& spec, std::size_t depth, std::span<const double> x,
                       std::span<const double> xp) {
  return run(spec, KernelKind::SurrogateSigma, depth, x, xp).get();
}

double sg_ntk(const KernelSpec& spec, std::size_t depth, std::span<const double> x, std::span<const double> xp) {
  return run(spec, KernelKind::SgNtk, depth, x, xp).get();
}

namespace {

KernelMatrix gram(const KernelSpec& spec, const Points& left, const Points& right, bool same,
                  std::size_t threads) {
  spec.validate();
  const bool mirror = same && spec.symmetric();
  KernelMatrix k(Matrix(left.size(), right.size()));
  std::vector<KernelValue> values(left.size() * right.size());
  parallel_for(
      left.size(),
      [&](std::size_t p) {
        for (std::size_t q = mirror ? p : 0; q < right.size(); ++q) {
          values[p * right.size() + q] = evaluate(spec, left[p], right[q]);
        }
      },
      threads);
  for (std::size_t p = 0; p < left.size(); ++p)
    for (std::size_t q = 0; q < right.size(); ++q) {
      const KernelValue& v = (mirror && q < p) ? values[q * right.size() + p] : values[p * right.size() + q];
      if (v.divergent) {
        k.mark_divergent(p, q, v.rate);
      } else {
        k.values(p, q) = v.value;
      }
    }
  return k;
}

}  // namespace

KernelMatrix analytic_gram(const KernelSpec& spec, const Points& left, const Points& right, std::size_t threads) {
  return gram(spec, left, right, &left == &right, threads);
}

KernelMatrix analytic_gram(const KernelSpec& spec, const Points& points, std::size_t threads) {
  return gram(spec, points, points, true, threads);
}

ExponentFit singular_exponent(const KernelSpec& spec, std::size_t depth, double gap_lo, double gap_hi,
                              std::size_t samples) {
  if (depth < 2) raise(Errc::InvalidArgument, "singular exponent needs depth >= 2");
  if (!(gap_lo > 0.0) || !(gap_hi > gap_lo) || gap_hi >= 1.0 || samples < 2) {
    raise(Errc::InvalidArgument, "bad fit window");
  }
  const std::vector<double> x{1.0, 0.0};
  double sx = 0.0;
  double sy = 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  const double ratio = std::log(gap_hi / gap_lo);
  for (std::size_t k = 0; k < samples; ++k) {
    const double gap = gap_lo * std::exp(ratio * static_cast<double>(k) / static_cast<double>(samples - 1));
    const double z = 1.0 - gap;
    // sqrt(1 - z^2) without cancellation
    const std::vector<double> xp{z, std::sqrt(gap * (2.0 - gap))};
    const double lx = std::log(gap);
    const double ly = std::log(ntk(spec, depth, x, xp).get());
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(samples);
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {-slope, (sy - slope * sx) / n};
}

}  // namespace sgntk
