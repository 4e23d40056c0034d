#ifndef BLOCKSEL_EBAYES_HPP
#define BLOCKSEL_EBAYES_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "blocksel/search.hpp"
#include "blocksel/types.hpp"

namespace blocksel {

/// kappa = ln(n)/2 + ln(1/theta - 1): the block penalty matching prior
/// inclusion probability theta under the BIC approximation.
double prior_to_penalty(double theta, double n);

/// Inverse map: theta = 1 / (1 + exp(kappa - ln(n)/2)).
double penalty_to_prior(double kappa, double n);

/// Step-1 penalty kappa0 = ln(p) + ln(n)/2, replicated across b blocks.
PenaltySpec step1_penalty(int p, double n, int b);

enum class Step2Variant { EB, A };

/// s_hat_j clamped into [0.5, p_j - 0.5] so the step-2 logs stay finite.
std::vector<double> clamp_shat(const std::vector<double>& shat,
                               const std::vector<int>& block_sizes);

/// Step-2 penalties: EB gives ln(p_j/s_hat_j - 1) + ln(n)/2, A gives
/// ln(p_j - s_hat_j) + ln(n)/2 (so kappa_A - kappa_EB = ln s_hat_j).
PenaltySpec step2_penalties(const std::vector<double>& shat,
                            const BlockPartition& partition, double n,
                            Step2Variant variant);

enum class SelectorVariant { EB, A, EB_pooled, A_pooled };

const char* selector_variant_name(SelectorVariant v);

struct AlgoConfig {
  SearchConfig search;
  int p_limit = 12;  // enumerate exactly when p <= p_limit, else run the MCMC
  std::int64_t enum_budget = 1 << 20;
  bool step2_fresh_search = false;  // sensitivity option: re-run the chain at
                                    // step-2 penalties and merge the ledgers
};

struct EBResult {
  SelectorVariant variant = SelectorVariant::EB;
  PenaltySpec step1_penalties;
  ModelLedger step1_ledger;
  InclusionProbs step1_inclusion;
  /// Clamped estimates feeding step 2: per block for the block variants, a
  /// single pooled value otherwise.
  std::vector<double> shat_used;
  PenaltySpec penalties_used;
  ModelSet selected;
  double selected_score = 0.0;
};

struct Step1Result {
  PenaltySpec penalties;  // kappa0 in every block
  ModelLedger ledger;
  InclusionProbs inclusion;
};

struct Step2Selection {
  std::vector<double> shat_used;
  PenaltySpec penalties;
  ModelSet selected;
  double score = 0.0;
};

/// Search at kappa0 and estimate per-block sparsity from the visited models.
Step1Result algorithm1_step1(const RegressionData& data,
                             const BlockPartition& partition,
                             const AlgoConfig& cfg);

/// Rescore a step-1 ledger under the variant's penalties. Several variants
/// can share one step-1 run; only the penalty term is recomputed.
Step2Selection algorithm1_step2(const BlockPartition& partition, double n,
                                const Step1Result& step1,
                                SelectorVariant variant);

/// The two-step selector. Step 1 searches at the uniform penalty kappa0 and
/// estimates block sparsity from the visited models; step 2 rescores the
/// step-1 ledger under the variant's penalties and returns its argmax.
EBResult algorithm1(const RegressionData& data, const BlockPartition& partition,
                    const AlgoConfig& cfg, SelectorVariant variant);

/// eta(|M|) = zeta * ln C(p, |M|) + ln(n)/2, via log-gamma.
double ebic_penalty(long p, int model_size, double n, double zeta);

PenaltyFn ebic_penalty_fn(long p, double n, double zeta);

/// Comparator: the same search machinery scoring C(M) = fit/2 - eta(|M|).
/// The penalty depends on |M| only (block-blind).
std::pair<ModelSet, ModelLedger> ebic_select(const RegressionData& data,
                                             const AlgoConfig& cfg,
                                             double zeta = 1.0);

}  // namespace blocksel

#endif  // BLOCKSEL_EBAYES_HPP
