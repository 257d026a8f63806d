#include "metais/kriging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "kriging_internal.hpp"
#include "metais/simd.hpp"

namespace metais {

void TrendBasis::eval(std::span<const double> x, std::span<double> out) const noexcept {
  out[0] = 1.0;
  if (kind_ == TrendKind::linear)
    for (std::size_t k = 0; k < x.size(); ++k) out[k + 1] = x[k];
}

void DesignOfExperiments::add(std::span<const double> x, double y) {
  if (x.size() != dim()) throw DimensionError("DesignOfExperiments::add: dimension mismatch");
  if (!std::isfinite(y)) throw std::invalid_argument("DesignOfExperiments::add: observation must be finite");
  for (std::size_t i = 0; i < size(); ++i)
    if (std::equal(x.begin(), x.end(), points_[i].begin()))
      throw std::invalid_argument("DesignOfExperiments::add: duplicate point (index " + std::to_string(i) + ")");
  points_.push_back(x);
  observations_.push_back(y);
}

DesignOfExperiments DesignOfExperiments::without(std::size_t i) const {
  DesignOfExperiments out(dim());
  for (std::size_t j = 0; j < size(); ++j)
    if (j != i) {
      out.points_.push_back(points_[j]);
      out.observations_.push_back(observations_[j]);
    }
  return out;
}

std::vector<Prediction> Surrogate::predict_batch(const PointSet& xs) const {
  std::vector<Prediction> out;
  out.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out.push_back(predict(xs[i]));
  return out;
}

double correlation(std::span<const double> dx, std::span<const double> lengths) {
  if (dx.size() != lengths.size()) throw DimensionError("correlation: dimension mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < dx.size(); ++k) {
    if (!(lengths[k] > 0.0)) throw std::invalid_argument("correlation: lengths must be > 0");
    const double t = dx[k] / lengths[k];
    s += t * t;
  }
  return std::exp(-s);
}

LengthBounds default_length_bounds(const DesignOfExperiments& doe) {
  LengthBounds b;
  for (std::size_t k = 0; k < doe.dim(); ++k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < doe.size(); ++i) {
      lo = std::min(lo, doe.point(i)[k]);
      hi = std::max(hi, doe.point(i)[k]);
    }
    double range = hi - lo;
    if (!(range > 0.0)) range = 1.0;
    b.lower.push_back(1e-2 * range);
    b.upper.push_back(1e2 * range);
  }
  return b;
}

namespace detail {

Eigen::MatrixXd correlation_matrix(const PointSet& points, const std::vector<double>& cols,
                                   std::span<const double> inv_lengths) {
  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd R(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    // column i, rows 0..i: squared distances of point i to points 0..i
    double* col = R.col(i).data();
    simd::scaled_sq_dist(points[static_cast<std::size_t>(i)], cols.data(), static_cast<std::size_t>(m),
                         inv_lengths, std::span<double>(col, static_cast<std::size_t>(i + 1)));
    for (Eigen::Index j = 0; j <= i; ++j) col[j] = std::exp(-col[j]);
    col[i] = 1.0;
  }
  R.triangularView<Eigen::StrictlyLower>() = R.transpose();
  return R;
}

Eigen::MatrixXd regression_matrix(const PointSet& points, TrendBasis basis) {
  const std::size_t p = basis.size(points.dim());
  Eigen::MatrixXd F(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(p));
  std::vector<double> f(p);
  for (std::size_t i = 0; i < points.size(); ++i) {
    basis.eval(points[i], f);
    for (std::size_t j = 0; j < p; ++j) F(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f[j];
  }
  return F;
}

std::optional<GlsFactor> factorize(const Eigen::MatrixXd& base_corr, const Eigen::VectorXd& y,
                                   const Eigen::MatrixXd& F, std::optional<double> nugget) {
  const Eigen::Index m = base_corr.rows();
  GlsFactor out;
  bool ok = false;
  double nug = nugget.value_or(KrigingModel::kInitialNugget);
  for (;;) {
    Eigen::MatrixXd R = base_corr;
    R.diagonal().array() += nug;
    Eigen::LLT<Eigen::MatrixXd> llt(R);
    if (llt.info() == Eigen::Success) {
      out.chol = llt.matrixL();
      const auto d = out.chol.diagonal();
      ok = (d.array() > 0.0).all() && d.allFinite();
    }
    if (ok || nugget || nug >= KrigingModel::kMaxNugget * (1.0 - 1e-9)) break;
    nug *= 10.0;
  }
  if (!ok) return std::nullopt;
  out.nugget = nug;

  const auto L = out.chol.triangularView<Eigen::Lower>();
  out.linv_f = L.solve(F);
  const Eigen::VectorXd linv_y = L.solve(y);
  const Eigen::MatrixXd gram = out.linv_f.transpose() * out.linv_f;
  Eigen::LLT<Eigen::MatrixXd> gram_llt(gram);
  if (gram_llt.info() != Eigen::Success) return std::nullopt;
  out.gram_chol = gram_llt.matrixL();
  out.beta = gram_llt.solve(out.linv_f.transpose() * linv_y);
  out.linv_resid = linv_y - out.linv_f * out.beta;
  out.sigma2 = out.linv_resid.squaredNorm() / static_cast<double>(m);
  out.log_det = 2.0 * out.chol.diagonal().array().log().sum();
  if (!std::isfinite(out.sigma2) || !std::isfinite(out.log_det) || !out.beta.allFinite()) return std::nullopt;
  return out;
}

}  // namespace detail

namespace {

std::string nearest_pair_message(const DesignOfExperiments& doe, std::size_t& a, std::size_t& b) {
  double best = std::numeric_limits<double>::infinity();
  a = b = 0;
  for (std::size_t i = 0; i < doe.size(); ++i)
    for (std::size_t j = i + 1; j < doe.size(); ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < doe.dim(); ++k) {
        const double t = doe.point(i)[k] - doe.point(j)[k];
        d += t * t;
      }
      if (d < best) {
        best = d;
        a = i;
        b = j;
      }
    }
  std::ostringstream os;
  os << "kriging: correlation matrix singular after nugget escalation; nearest design points are #" << a
     << " and #" << b << " (distance " << std::sqrt(best) << ")";
  return os.str();
}

}  // namespace

KrigingModel KrigingModel::fit(const DesignOfExperiments& doe, TrendBasis basis, std::vector<double> lengths) {
  return build(doe, basis, std::move(lengths), std::nullopt, std::nullopt);
}

KrigingModel KrigingModel::fit(const DesignOfExperiments& doe, TrendBasis basis, std::vector<double> lengths,
                               double process_variance) {
  if (!(process_variance >= 0.0) || !std::isfinite(process_variance))
    throw std::invalid_argument("KrigingModel::fit: process variance must be finite and >= 0");
  return build(doe, basis, std::move(lengths), std::nullopt, process_variance);
}

KrigingModel KrigingModel::build(const DesignOfExperiments& doe, TrendBasis basis, std::vector<double> lengths,
                                 std::optional<double> nugget, std::optional<double> variance) {
  const std::size_t m = doe.size();
  const std::size_t n = doe.dim();
  if (lengths.size() != n) throw DimensionError("KrigingModel::fit: one correlation length per dimension required");
  for (double l : lengths)
    if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("KrigingModel::fit: lengths must be > 0");
  const std::size_t p = basis.size(n);
  if (m < p) throw std::invalid_argument("KrigingModel::fit: need at least as many points as trend terms");

  KrigingModel model(doe, basis);
  model.p_ = p;
  model.lengths_ = std::move(lengths);
  for (double l : model.lengths_) model.inv_lengths_.push_back(1.0 / l);
  model.cols_ = doe.points().columns();

  const Eigen::MatrixXd F = detail::regression_matrix(doe.points(), basis);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(doe.observations().data(), static_cast<Eigen::Index>(m));
  const auto factor = detail::factorize(detail::correlation_matrix(doe.points(), model.cols_, model.inv_lengths_), y,
                                        F, nugget);
  if (!factor) {
    std::size_t a = 0, b = 0;
    const std::string msg = nearest_pair_message(doe, a, b);
    throw SingularModelError(msg, a, b);
  }

  model.nugget_ = factor->nugget;
  model.chol_.resize(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      model.chol_[i * m + j] = j <= i ? factor->chol(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) : 0.0;
  model.linv_f_.assign(factor->linv_f.data(), factor->linv_f.data() + m * p);
  model.gram_chol_ = factor->gram_chol;
  model.beta_.assign(factor->beta.data(), factor->beta.data() + p);
  const Eigen::VectorXd alpha = factor->chol.triangularView<Eigen::Lower>().transpose().solve(factor->linv_resid);
  model.alpha_.assign(alpha.data(), alpha.data() + m);

  const bool constant_y = std::all_of(doe.observations().begin(), doe.observations().end(),
                                      [&](double v) { return v == doe.observations().front(); });
  model.sigma2_ = variance.value_or(factor->sigma2);
  if (constant_y || !(model.sigma2_ > 0.0)) {
    model.sigma2_ = variance.value_or(0.0);
    model.degenerate_ = true;
  }
  model.objective_ = factor->sigma2 > 0.0
                         ? static_cast<double>(m) * std::log(factor->sigma2) + factor->log_det
                         : -std::numeric_limits<double>::infinity();
  return model;
}

double KrigingModel::sigma_tolerance() const { return 1e-9 * std::sqrt(sigma2_); }

Prediction KrigingModel::predict_into(std::span<const double> x, std::vector<double>& r,
                                      std::vector<double>& v) const {
  const std::size_t m = doe_.size();
  r.resize(m);
  v.resize(m);
  simd::scaled_sq_dist(x, cols_.data(), m, inv_lengths_, r);
  // the nugget acts at zero lag only, so design points are reproduced exactly
  for (double& t : r) t = t == 0.0 ? 1.0 + nugget_ : std::exp(-t);

  double f[64];
  std::vector<double> f_heap;
  double* fp = f;
  if (p_ > 64) {
    f_heap.resize(p_);
    fp = f_heap.data();
  }
  basis_.eval(x, std::span<double>(fp, p_));

  double mean = simd::dot(r, alpha_);
  for (std::size_t j = 0; j < p_; ++j) mean += fp[j] * beta_[j];

  // v = L^-1 r
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = chol_.data() + i * m;
    v[i] = (r[i] - simd::dot(std::span<const double>(row, i), std::span<const double>(v.data(), i))) / row[i];
  }
  const double rr = simd::dot(v, v);

  // u = F' R^-1 r - f, then |G^-1 u|^2 with G G' = F' R^-1 F
  double ww = 0.0;
  std::vector<double> w(p_);
  for (std::size_t j = 0; j < p_; ++j) {
    double u = simd::dot(std::span<const double>(linv_f_.data() + j * m, m), v) - fp[j];
    for (std::size_t l = 0; l < j; ++l) u -= gram_chol_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) * w[l];
    w[j] = u / gram_chol_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
    ww += w[j] * w[j];
  }
  const double var = sigma2_ * (1.0 - rr + ww);
  return {mean, var > 0.0 ? std::sqrt(var) : 0.0};
}

Prediction KrigingModel::predict(std::span<const double> x) const {
  if (x.size() != dim()) throw DimensionError("KrigingModel::predict: dimension mismatch");
  std::vector<double> r, v;
  return predict_into(x, r, v);
}

std::vector<Prediction> KrigingModel::predict_batch(const PointSet& xs) const {
  if (!xs.empty() && xs.dim() != dim()) throw DimensionError("KrigingModel::predict_batch: dimension mismatch");
  std::vector<Prediction> out(xs.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<double> r, v;
    for (std::size_t i = begin; i < end; ++i) out[i] = predict_into(xs[i], r, v);
  };
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t threads = std::min<std::size_t>(hw, xs.size() / 512);
  if (threads <= 1) {
    work(0, xs.size());
    return out;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (xs.size() + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(xs.size(), begin + chunk);
    if (begin < end) pool.emplace_back(work, begin, end);
  }
  return out;
}

Prediction KrigingModel::loo_predict(std::size_t i, LooMethod method) const {
  const std::size_t m = doe_.size();
  if (i >= m) throw std::out_of_range("KrigingModel::loo_predict: index out of range");
  if (m < p_ + 2) throw std::invalid_argument("KrigingModel::loo_predict: need at least p + 2 design points");
  if (method == LooMethod::refit) {
    const KrigingModel reduced = build(doe_.without(i), basis_, lengths_, nugget_, sigma2_);
    return reduced.predict(doe_.point(i));
  }
  // Bordered-system identities: with Q the inverse of [[R, F], [F', 0]],
  // y_i - mu_(-i) = alpha_i / Q_ii and the reduced variance is sigma^2 (1 / Q_ii - nugget).
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> L(
      chol_.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  e(static_cast<Eigen::Index>(i)) = 1.0;
  const Eigen::VectorXd z = L.triangularView<Eigen::Lower>().solve(e);
  Eigen::Map<const Eigen::MatrixXd> linv_f(linv_f_.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(p_));
  const Eigen::VectorXd h = linv_f.transpose() * z;
  const Eigen::VectorXd t = gram_chol_.triangularView<Eigen::Lower>().solve(h);
  const double q = z.squaredNorm() - t.squaredNorm();
  const double var = sigma2_ * (1.0 / q - nugget_);
  return {doe_.observation(i) - alpha_[i] / q, var > 0.0 ? std::sqrt(var) : 0.0};
}

std::vector<Prediction> KrigingModel::loo_predict_all(LooMethod method) const {
  const std::size_t m = doe_.size();
  if (m < p_ + 2) throw std::invalid_argument("KrigingModel::loo_predict_all: need at least p + 2 design points");
  std::vector<Prediction> out(m);
  if (method == LooMethod::refit) {
    for (std::size_t i = 0; i < m; ++i) out[i] = loo_predict(i, method);
    return out;
  }
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> L(
      chol_.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  const Eigen::MatrixXd linv = L.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)));
  Eigen::Map<const Eigen::MatrixXd> linv_f(linv_f_.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(p_));
  const Eigen::MatrixXd rinv_f = linv.transpose() * linv_f;  // m x p
  const Eigen::MatrixXd t = gram_chol_.triangularView<Eigen::Lower>().solve(rinv_f.transpose());  // p x m
  for (std::size_t i = 0; i < m; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double q = linv.col(ii).squaredNorm() - t.col(ii).squaredNorm();
    const double var = sigma2_ * (1.0 / q - nugget_);
    out[i] = {doe_.observation(i) - alpha_[i] / q, var > 0.0 ? std::sqrt(var) : 0.0};
  }
  return out;
}

double KrigingModel::press(LooMethod method) const {
  const auto loo = loo_predict_all(method);
  double s = 0.0;
  for (std::size_t i = 0; i < loo.size(); ++i) {
    const double d = loo[i].mean - doe_.observation(i);
    s += d * d;
  }
  return s / static_cast<double>(loo.size());
}

std::vector<double> KrigingModel::gls_residual() const {
  const std::size_t m = doe_.size();
  const Eigen::MatrixXd F = regression_matrix();
  Eigen::Map<const Eigen::VectorXd> alpha(alpha_.data(), static_cast<Eigen::Index>(m));
  const Eigen::VectorXd g = F.transpose() * alpha;
  return {g.data(), g.data() + g.size()};
}

Eigen::MatrixXd KrigingModel::regression_matrix() const { return detail::regression_matrix(doe_.points(), basis_); }

Eigen::MatrixXd KrigingModel::correlation_matrix() const {
  Eigen::MatrixXd R = detail::correlation_matrix(doe_.points(), cols_, inv_lengths_);
  R.diagonal().array() += nugget_;
  return R;
}

}  // namespace metais
