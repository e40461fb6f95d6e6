#include "sgntk/gp_regression.hpp"

#include <algorithm>
#include <cmath>

#include "sgntk/errors.hpp"

namespace sgntk {

GramFn gram_fn(const KernelSpec& spec, std::size_t threads) {
  return [spec, threads](const Points& left, const Points& right) {
    return &left == &right ? analytic_gram(spec, left, threads) : analytic_gram(spec, left, right, threads);
  };
}

KernelSpec prior_spec(const KernelSpec& dynamics) {
  KernelSpec s = dynamics;
  switch (dynamics.kind) {
    case KernelKind::SgNtk:
    case KernelKind::CrossNngp:
    case KernelKind::SurrogateSigma:
      s.kind = dynamics.activation1.name == dynamics.activation2.name ? KernelKind::Nngp : KernelKind::CrossNngp;
      break;
    default: s.kind = KernelKind::Nngp; break;
  }
  s.surrogate1.reset();
  s.surrogate2.reset();
  return s;
}

GPPosterior::GPPosterior(const KernelSpec& dynamics, Dataset train, std::optional<double> time, double eta,
                         double kappa, std::size_t threads)
    : GPPosterior(gram_fn(dynamics, threads), gram_fn(prior_spec(dynamics), threads), dynamics.symmetric(),
                  std::move(train), time, eta, kappa) {}

GPPosterior::GPPosterior(GramFn dynamics, GramFn prior, bool symmetric, Dataset train,
                         std::optional<double> time, double eta, double kappa)
    : dynamics_(std::move(dynamics)),
      prior_(std::move(prior)),
      symmetric_(symmetric),
      train_(std::move(train)),
      time_(time),
      eta_(eta),
      kappa_(kappa) {
  train_.validate();
  if (time_ && !(*time_ >= 0.0)) raise(Errc::InvalidArgument, "time must be >= 0");
  if (!(eta_ > 0.0)) raise(Errc::InvalidArgument, "eta must be > 0");
  if (!(kappa_ > 0.0) || kappa_ > 1.0) raise(Errc::InvalidScale, "kappa must lie in (0, 1]");
  const Points& x = train_.inputs;
  s_xx_ = this->prior(x, x);
  k_xx_ = this->kernel(x, x);
  const std::size_t d = x.size();
  Matrix rhs = Matrix::identity(d);
  if (time_) rhs -= matrix_exp(k_xx_, -eta_ * *time_);
  if (time_ && *time_ == 0.0) {
    w_ = Matrix(d, d);
  } else if (symmetric_) {
    w_ = solve_spd(symmetrized(k_xx_), rhs);
  } else {
    w_ = solve_lu(k_xx_, rhs);
  }
  Matrix y(d, train_.targets.front().size());
  for (std::size_t p = 0; p < d; ++p)
    for (std::size_t j = 0; j < y.cols(); ++j) y(p, j) = train_.targets[p][j];
  wy_ = w_ * y;
}

Matrix GPPosterior::prior(const Points& left, const Points& right) const {
  Matrix s = prior_(left, right).finite();
  return kappa_ == 1.0 ? s : (kappa_ * kappa_) * s;
}

Matrix GPPosterior::kernel(const Points& left, const Points& right) const {
  Matrix k = dynamics_(left, right).finite();
  if (kappa_ == 1.0) return k;
  const Matrix s = prior_(left, right).finite();
  return s + (kappa_ * kappa_) * (k - s);
}

Matrix GPPosterior::weights_for(const Points& test) const { return kernel(test, train_.inputs) * w_; }

Matrix GPPosterior::mean(const Points& test) const { return kernel(test, train_.inputs) * wy_; }

Matrix GPPosterior::covariance(const Points& test) const {
  const Matrix a = weights_for(test);
  const Matrix s_tx = prior(test, train_.inputs);
  const Matrix at = a.transposed();
  Matrix cov = prior(test, test);
  const Matrix cross = s_tx * at;
  cov -= cross;
  cov -= cross.transposed();
  cov += a * (s_xx_ * at);
  return symmetrized(cov);
}

std::vector<double> GPPosterior::variance(const Points& test) const {
  const Matrix cov = covariance(test);
  std::vector<double> v(test.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = cov(i, i);
  return v;
}

int nw_classify(const PairKernel& kernel, const Points& train_x, std::span<const double> labels,
                std::span<const double> x) {
  if (train_x.size() != labels.size()) raise(Errc::DimensionMismatch, "labels and points differ in count");
  for (std::size_t i = 0; i < train_x.size(); ++i) {
    if (std::equal(x.begin(), x.end(), train_x[i].begin(), train_x[i].end())) {
      return labels[i] > 0.0 ? 1 : (labels[i] < 0.0 ? -1 : 0);
    }
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < train_x.size(); ++i) sum += kernel(x, train_x[i]) * labels[i];
  return sum > 0.0 ? 1 : (sum < 0.0 ? -1 : 0);
}

int nw_classify(const KernelSpec& spec, const Points& train_x, std::span<const double> labels,
                std::span<const double> x) {
  const PairKernel k = [&spec](std::span<const double> a, std::span<const double> b) {
    try {
      return evaluate(spec, a, b).get();
    } catch (const Error& e) {
      if (e.code() == Errc::NonParallelRequired || e.code() == Errc::DivergentKernel) {
        raise(Errc::PreconditionViolated, std::string("classifier needs sigma_b > 0 or non-parallel inputs: ") +
                                              e.what());
      }
      throw;
    }
  };
  return nw_classify(k, train_x, labels, x);
}

std::pair<double, double> gram_spectrum(const Matrix& k) {
  if (!k.is_square() || k.empty()) raise(Errc::DimensionMismatch, "spectrum needs a square matrix");
  const SymEig eig = eig_sym(symmetrized(k));
  return {eig.values.front(), eig.values.back()};
}

std::pair<double, double> gram_spectrum(const KernelSpec& spec, const Points& x) {
  return gram_spectrum(analytic_gram(spec, x).finite());
}

}  // namespace sgntk
