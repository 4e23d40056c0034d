#ifndef BLOCKSEL_CORE_MODEL_HPP
#define BLOCKSEL_CORE_MODEL_HPP

#include <utility>
#include <vector>

#include "blocksel/types.hpp"

namespace blocksel {

enum class FitVariant { plain, zellner };

/// Least squares restricted to the columns in `model`.
///
/// plain: QR solve of min ||y - X_M beta||; throws RankDeficient when the
/// R diagonal drops below 1e-8 of its largest entry (such models are
/// excluded from the candidate set).
/// zellner: solves (X_M'X_M + n^{-1} I) beta = X_M'y, always well posed.
CoefEstimate fit_mle(const RegressionData& data, const ModelSet& model,
                     FitVariant variant = FitVariant::plain);

/// Block-penalized score C(M) = ||X_M beta~||^2 / (2 sigma^2) - sum_j kappa_j |M_j|.
/// The response is scored on the y/sigma scale, so rescaling (y, sigma) by a
/// common factor leaves every score unchanged.
double score(const RegressionData& data, const ModelSet& model,
             const BlockPartition& partition, const PenaltySpec& pen,
             FitVariant variant = FitVariant::plain);

/// Softmax of raw scores: NC(M) = exp(C(M)) / sum exp(C(M')).
/// Computed with a max shift; the output sums to 1 and preserves order.
std::vector<std::pair<ModelSet, double>> normalized_scores(
    const std::vector<std::pair<ModelSet, double>>& raw);

/// Delta_{MT} = sum_j kappa_j (|M_j| - |T_j|).
double delta_penalty(const ModelSet& M, const ModelSet& T,
                     const BlockPartition& partition, const PenaltySpec& pen);

/// L_{TM} = ||X_T beta~^(T)||^2 - ||X_M beta~^(M)||^2 (raw y scale).
double likelihood_gap(const RegressionData& data, const ModelSet& T,
                      const ModelSet& M, FitVariant variant = FitVariant::plain);

/// Noncentrality mu_{QM} = ||(I - P_M) X_{Q\M} beta*_{Q\M}||^2, for M subset of Q.
double noncentrality(const RegressionData& data, const ModelSet& Q,
                     const ModelSet& M, const Vector& beta_true);

/// n x |M| submatrix of the columns in `model`.
Matrix submatrix(const Matrix& X, const ModelSet& model);

/// Projector P_M = X_M (X_M'X_M)^{-1} X_M' applied to a vector/matrix via QR.
/// Throws RankDeficient when X_M is rank deficient. Empty model gives 0.
Matrix project_onto(const Matrix& X, const ModelSet& model, const Matrix& rhs);

}  // namespace blocksel

#endif  // BLOCKSEL_CORE_MODEL_HPP
