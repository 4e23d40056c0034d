#ifndef BLOCKSEL_SEQMODEL_HPP
#define BLOCKSEL_SEQMODEL_HPP

#include <optional>
#include <vector>

#include "blocksel/types.hpp"

namespace blocksel {

/// Observations y = sqrt(n) beta* + eps in the sequence model.
struct SequenceData {
  Vector y;
  long n = 1;

  static SequenceData from_observations(Vector y, long n);
  /// Builds y = beta_tilde * sqrt(n), so that beta_tilde() returns the input.
  static SequenceData from_means(const Vector& beta_tilde, long n);

  long p() const { return y.size(); }
  Vector beta_tilde() const;
};

/// Per-block counts and signal floors for the closed-form calculators and the
/// simulation scenarios. Counts are integral-valued (stored as double so the
/// derived quantities are uniform); inactive = p_j - s_j, active = s_j.
struct BlockCounts {
  double inactive = 0;
  double active = 0;
  double beta_min = 1.0;
};

struct BlockConfig {
  long n = 1;
  std::vector<BlockCounts> blocks;

  int b() const { return static_cast<int>(blocks.size()); }
  double inactive_total() const;
  double active_total() const;
  double beta_min_overall() const;
  double p_total() const { return inactive_total() + active_total(); }
};

/// S_j = {i in B_j : |beta_tilde_i| > tau_j}, strict inequality.
ModelSet threshold_select(const SequenceData& seq,
                          const BlockPartition& partition,
                          const ThresholdSpec& thr);

/// tau_j = sqrt(2 kappa_j / n): the thresholds equivalent to block l0
/// penalties on an orthonormal design.
ThresholdSpec penalty_to_threshold(const PenaltySpec& pen, double n);

/// Oracle thresholds tau*_j = beta_min_j/2 + ln(p_j/s_j - 1) / (n beta_min_j).
ThresholdSpec oracle_thresholds(const BlockConfig& cfg);

struct ThresholdInterval {
  double lo = 0;
  double hi = 0;
  bool empty() const { return lo > hi; }
};

/// Threshold ranges [sqrt(2 ln(p_j-s_j)/n), beta_min_j - sqrt(2 ln(s_j)/n)]
/// sufficient for consistent recovery; pooled variant aggregates counts and
/// takes beta_min = min_j beta_min_j.
std::vector<ThresholdInterval> consistency_range(const BlockConfig& cfg,
                                                 bool pooled);

struct RateBoundChecks {
  bool a4_ok = true;  // sqrt(n) tau_j >= sqrt(2 ln(p_j - s_j)) for all j
  bool a5_ok = true;  // sqrt(n)(beta_min_j - tau_j) >= sqrt(2 ln s_j) for all j
};

/// Misselection bound: with oracle=false the two-term per-block bound at the
/// given thresholds; with oracle=true the bound at tau* which depends only on
/// the configuration, 2 sum_j exp(-(n/8) beta_j^2 + ln max(p_j-s_j, s_j)).
double rate_bound(const BlockConfig& cfg, const ThresholdSpec& thr,
                  bool oracle = false, RateBoundChecks* checks = nullptr);

/// Ratio of block to pooled oracle rates,
/// sum_j exp(-(n/8)(beta_j^2 - beta^2) - (ln max(p-s,s) - ln max(p_j-s_j,s_j))).
/// At most 1 whenever every block is sparse (s_j < p_j - s_j); exactly 1 for
/// b = 1 or equal beta_min across sparse blocks.
double rate_ratio(const BlockConfig& cfg);

/// Smallest recoverable signal sqrt(2 ln(p-s)/n) + sqrt(2 ln(s)/n); the block
/// variant evaluates the block hosting the overall minimum (default: last).
double smallest_recoverable(const BlockConfig& cfg, bool pooled,
                            std::optional<int> host_block = std::nullopt);

enum class LassoVariant { lasso, adaptive_mle, adaptive_lasso };

/// Thresholds whose selection matches the support of the block lasso /
/// adaptive lasso solutions in the sequence model:
///   lasso           tau_j = lambda_j / n
///   adaptive (MLE)  tau_j = sqrt(lambda_j / n)
///   adaptive (lasso weights, penalty lambda0)
///                   tau_j = lambda0/(2n) + sqrt((lambda0/(2n))^2 + lambda_j/n)
ThresholdSpec lasso_equivalent_threshold(const std::vector<double>& lambdas,
                                         double n, LassoVariant variant,
                                         double lambda0 = 0.0);

/// Two-block configurations of the worked examples (1..4) plus the simulation
/// example 5; counts are rounded half-up, s_j = max(1, round(1.5 ln n)).
/// Throws InfeasibleN when a rounded count drops below 1 or exceeds 2^53.
BlockConfig example_config(int example_id, long n,
                           const std::vector<double>& beta_min = {});

/// Default Table-2 signal floors per example (figure values for example 2).
std::vector<double> example_default_beta_min(int example_id);

}  // namespace blocksel

#endif  // BLOCKSEL_SEQMODEL_HPP
