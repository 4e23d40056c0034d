#include "blocksel/core_model.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>

namespace blocksel {

namespace {
constexpr double kRankTol = 1e-8;  // relative R-diagonal tolerance
}

Matrix submatrix(const Matrix& X, const ModelSet& model) {
  Matrix out(X.rows(), model.size());
  int c = 0;
  for (int i : model.indices()) {
    if (i >= X.cols())
      fail(ErrorCode::dimension_mismatch, "model index beyond design columns");
    out.col(c++) = X.col(i);
  }
  return out;
}

namespace {

Eigen::ColPivHouseholderQR<Matrix> qr_full_rank(const Matrix& Xm) {
  Eigen::ColPivHouseholderQR<Matrix> qr(Xm);
  qr.setThreshold(kRankTol);
  if (qr.rank() < Xm.cols())
    fail(ErrorCode::rank_deficient, "X_M is numerically rank deficient");
  return qr;
}

}  // namespace

CoefEstimate fit_mle(const RegressionData& data, const ModelSet& model,
                     FitVariant variant) {
  data.validate();
  CoefEstimate out;
  out.model = model;
  if (model.is_empty()) {
    out.beta.resize(0);
    out.fitted_norm_sq = 0.0;
    return out;
  }
  Matrix Xm = submatrix(data.X, model);
  if (variant == FitVariant::plain) {
    if (Xm.cols() > Xm.rows())
      fail(ErrorCode::rank_deficient, "more columns than observations");
    auto qr = qr_full_rank(Xm);
    out.beta = qr.solve(data.y);
  } else {
    Matrix G = Xm.transpose() * Xm;
    G.diagonal().array() += 1.0 / static_cast<double>(data.n());
    out.beta = G.llt().solve(Xm.transpose() * data.y);
  }
  out.fitted_norm_sq = (Xm * out.beta).squaredNorm();
  return out;
}

double score(const RegressionData& data, const ModelSet& model,
             const BlockPartition& partition, const PenaltySpec& pen,
             FitVariant variant) {
  pen.validate(partition);
  if (partition.p() != data.p())
    fail(ErrorCode::dimension_mismatch, "partition size does not match design");
  const CoefEstimate fit = fit_mle(data, model, variant);
  const double fitted_scaled = fit.fitted_norm_sq / (data.sigma * data.sigma);
  double penalty = 0.0;
  const auto counts = model.block_counts(partition);
  for (int j = 0; j < partition.blocks(); ++j)
    penalty += pen.kappas[j] * counts[j];
  return 0.5 * fitted_scaled - penalty;
}

std::vector<std::pair<ModelSet, double>> normalized_scores(
    const std::vector<std::pair<ModelSet, double>>& raw) {
  if (raw.empty())
    fail(ErrorCode::empty_collection, "no scores to normalize");
  double cmax = -std::numeric_limits<double>::infinity();
  for (const auto& [m, c] : raw) {
    if (!std::isfinite(c))
      fail(ErrorCode::invalid_argument, "scores must be finite");
    cmax = std::max(cmax, c);
  }
  double denom = 0.0;
  for (const auto& [m, c] : raw) denom += std::exp(c - cmax);
  std::vector<std::pair<ModelSet, double>> out;
  out.reserve(raw.size());
  for (const auto& [m, c] : raw)
    out.emplace_back(m, std::exp(c - cmax) / denom);
  return out;
}

double delta_penalty(const ModelSet& M, const ModelSet& T,
                     const BlockPartition& partition, const PenaltySpec& pen) {
  pen.validate(partition);
  const auto cm = M.block_counts(partition);
  const auto ct = T.block_counts(partition);
  double out = 0.0;
  for (int j = 0; j < partition.blocks(); ++j)
    out += pen.kappas[j] * (cm[j] - ct[j]);
  return out;
}

double likelihood_gap(const RegressionData& data, const ModelSet& T,
                      const ModelSet& M, FitVariant variant) {
  return fit_mle(data, T, variant).fitted_norm_sq -
         fit_mle(data, M, variant).fitted_norm_sq;
}

Matrix project_onto(const Matrix& X, const ModelSet& model, const Matrix& rhs) {
  if (model.is_empty()) return Matrix::Zero(rhs.rows(), rhs.cols());
  Matrix Xm = submatrix(X, model);
  auto qr = qr_full_rank(Xm);
  return Xm * qr.solve(rhs);
}

double noncentrality(const RegressionData& data, const ModelSet& Q,
                     const ModelSet& M, const Vector& beta_true) {
  data.validate();
  if (!M.subset_of(Q))
    fail(ErrorCode::not_nested, "noncentrality requires M to be nested in Q");
  if (beta_true.size() != data.p())
    fail(ErrorCode::dimension_mismatch, "beta_true length must equal p");
  const ModelSet extra = Q.set_difference(M);
  if (extra.is_empty()) return 0.0;
  Vector beta_extra(extra.size());
  int c = 0;
  for (int i : extra.indices()) beta_extra[c++] = beta_true[i];
  const Vector v = submatrix(data.X, extra) * beta_extra;
  const Vector residual = v - project_onto(data.X, M, v);
  return residual.squaredNorm();
}

}  // namespace blocksel
