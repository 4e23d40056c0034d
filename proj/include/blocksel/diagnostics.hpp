#ifndef BLOCKSEL_DIAGNOSTICS_HPP
#define BLOCKSEL_DIAGNOSTICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "blocksel/seqmodel.hpp"
#include "blocksel/types.hpp"

namespace blocksel {

/// Design-dependent quantities entering the regression-side conditions.
/// Defaults describe the orthonormal reference design.
struct DesignDiagnostics {
  double rho = 1.0;
  bool rho_exact = true;
  double lambda_bar = 1.0;
  std::vector<double> lambda_underline;  // per block; empty means all 1
  double gamma = 0.75;

  double lambda_underline_for(int j) const {
    return lambda_underline.empty() ? 1.0 : lambda_underline.at(j);
  }
};

enum class RhoStrategy { exact, restricted };

struct RhoResult {
  double value = 0.0;
  bool exact = true;
};

/// rho(X) = min over full-rank M not containing S of
/// lambda_min(X_{S\M}' (I - P_M) X_{S\M} / n).
/// exact: enumerate every such M (model count capped by `budget`).
/// restricted: minimize over the proper subsets of S and their one-variable
/// augmentations; an upper surrogate, flagged exact=false.
RhoResult rho_X(const RegressionData& data, const ModelSet& S,
                RhoStrategy strategy, std::int64_t budget = 1 << 20);

/// lambda_max(X_S' X_S / n).
double lambda_bar(const RegressionData& data, const ModelSet& S);

struct BlockCorrelation {
  double lambda_min = 1.0;        // clamped to [0, 1]; NaN when no usable column
  std::vector<int> excluded;      // inactive columns collinear with S (0-based)
};

/// Per block j: the minimum eigenvalue of the correlation matrix of the unit
/// residual directions (I - P_S) x_i for the inactive i in B_j. Columns whose
/// residual norm falls below 1e-10 are excluded and reported.
std::vector<BlockCorrelation> lambda_underline(const RegressionData& data,
                                               const ModelSet& S,
                                               const BlockPartition& partition);

/// gamma = (1 + max_j ln(p_j - s_j) / kappa_j) / 2; valid in (1/2, 1) exactly
/// when every kappa_j exceeds ln(p_j - s_j).
double gamma_from_penalties(const BlockConfig& cfg, const PenaltySpec& pen);

/// Oracle penalties sqrt(kappa*_j) = c beta_j / 2 + (ln(p_j-s_j) - ln s_j) / (2 c beta_j)
/// with c = sqrt((1-gamma) n rho / 6). Requires the betamin premise that makes
/// the right-hand side positive.
PenaltySpec oracle_penalties_reg(const BlockConfig& cfg, double rho,
                                 double gamma);

/// Misselection bound 6 (2^{2b} - 2b) r sum_j [ e^{-delta/2 (kappa_j - ln(p_j-s_j))}
/// + e^{-delta/2 ((c beta_j - sqrt kappa_j)^2 - ln s_j)} ]; the oracle variant
/// substitutes the balanced exponent (1-gamma) n rho beta_j^2 / 24 - ln max(...)
/// with prefactor 12 (2^{2b} - 2b) r.
double regression_rate_bound(const BlockConfig& cfg, const PenaltySpec& pen,
                             double rho, double gamma, double delta = 0.99,
                             double r = 1.01, bool oracle = false);

struct AssumptionBlockReport {
  double f_margin = 0.0;  // kappa_j - ln(p_j - s_j)
  bool a6_ok = false;
  double g_margin = 0.0;  // c beta_j - sqrt(kappa_j) - sqrt(ln s_j)
  bool a7_ok = false;
  double nec_penalty_ratio = 0.0;  // kappa_j / (lambda_und_j^2 ln(p_j - s_j))
  bool nec_penalty_ok = false;     // ratio >= 1
  double nec_betamin_ratio = 0.0;  // sqrt(n lambda_bar) beta_j / (lambda_und_j sqrt(ln(p_j-s_j)))
  bool nec_betamin_ok = false;     // ratio > 0
};

struct AssumptionReport {
  double gamma = 0.0;
  bool gamma_valid = false;
  std::vector<AssumptionBlockReport> blocks;

  bool all_sufficient() const;
  std::string table() const;
};

/// Finite-n margins for the sufficient conditions (penalty size and betamin)
/// and ratios for the necessary ones, per block.
AssumptionReport assumption_check(const BlockConfig& cfg,
                                  const PenaltySpec& pen,
                                  const DesignDiagnostics& diag);

struct SignalClasses {
  std::vector<int> small;
  std::vector<int> intermediate;
  std::vector<int> large;
};

/// Partition of the true support by signal size relative to the penalties:
/// small when sqrt(n lambda_bar)|beta_i| <= c_small sqrt(kappa_j); large when
/// the A7-style margin is positive; intermediate otherwise.
SignalClasses signal_classes(const Vector& beta_true,
                             const BlockPartition& partition,
                             const PenaltySpec& pen, double n, double rho,
                             double lambda_bar_value, double gamma,
                             double c_small = 0.1);

}  // namespace blocksel

#endif  // BLOCKSEL_DIAGNOSTICS_HPP
