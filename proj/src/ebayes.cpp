#include "blocksel/ebayes.hpp"

#include <cmath>

#include "blocksel/rng.hpp"

namespace blocksel {

double prior_to_penalty(double theta, double n) {
  if (!(theta > 0.0 && theta < 1.0))
    fail(ErrorCode::out_of_range, "theta must be in (0,1)");
  if (n < 1) fail(ErrorCode::invalid_argument, "n must be >= 1");
  return 0.5 * std::log(n) + std::log(1.0 / theta - 1.0);
}

double penalty_to_prior(double kappa, double n) {
  if (n < 1) fail(ErrorCode::invalid_argument, "n must be >= 1");
  return 1.0 / (1.0 + std::exp(kappa - 0.5 * std::log(n)));
}

PenaltySpec step1_penalty(int p, double n, int b) {
  if (p < 1 || n < 1 || b < 1)
    fail(ErrorCode::invalid_argument, "p, n, b must be >= 1");
  return PenaltySpec::uniform(b, std::log(static_cast<double>(p)) +
                                     0.5 * std::log(n));
}

std::vector<double> clamp_shat(const std::vector<double>& shat,
                               const std::vector<int>& block_sizes) {
  if (shat.size() != block_sizes.size())
    fail(ErrorCode::dimension_mismatch, "one s_hat per block required");
  std::vector<double> out(shat.size());
  for (std::size_t j = 0; j < shat.size(); ++j) {
    const double hi = static_cast<double>(block_sizes[j]) - 0.5;
    out[j] = std::min(std::max(shat[j], 0.5), hi);
  }
  return out;
}

PenaltySpec step2_penalties(const std::vector<double>& shat,
                            const BlockPartition& partition, double n,
                            Step2Variant variant) {
  std::vector<int> sizes(partition.blocks());
  for (int j = 0; j < partition.blocks(); ++j) sizes[j] = partition.block_size(j);
  const auto s = clamp_shat(shat, sizes);
  PenaltySpec out;
  const double half_log_n = 0.5 * std::log(n);
  for (int j = 0; j < partition.blocks(); ++j) {
    const double pj = sizes[j];
    const double kappa = variant == Step2Variant::EB
                             ? std::log(pj / s[j] - 1.0) + half_log_n
                             : std::log(pj - s[j]) + half_log_n;
    out.kappas.push_back(kappa);
  }
  return out;
}

const char* selector_variant_name(SelectorVariant v) {
  switch (v) {
    case SelectorVariant::EB: return "EB_b";
    case SelectorVariant::A: return "A_b";
    case SelectorVariant::EB_pooled: return "EB_pooled";
    case SelectorVariant::A_pooled: return "A_pooled";
  }
  return "?";
}

namespace {

std::pair<ModelSet, ModelLedger> run_search(const RegressionData& data,
                                            const BlockPartition& partition,
                                            const PenaltySpec& pen,
                                            const AlgoConfig& cfg,
                                            std::uint64_t seed) {
  if (data.p() <= cfg.p_limit) {
    EnumerateOptions opts;
    opts.p_limit = cfg.p_limit;
    opts.budget = cfg.enum_budget;
    opts.max_model_size = cfg.search.max_model_size;
    return enumerate_select(data, partition, pen, opts);
  }
  SearchConfig sc = cfg.search;
  sc.seed = seed;
  return mcmc_search(data, partition, pen, sc);
}

}  // namespace

Step1Result algorithm1_step1(const RegressionData& data,
                             const BlockPartition& partition,
                             const AlgoConfig& cfg) {
  data.validate();
  if (partition.p() != data.p())
    fail(ErrorCode::dimension_mismatch, "partition size does not match design");
  Step1Result out;
  out.penalties = step1_penalty(static_cast<int>(data.p()),
                                static_cast<double>(data.n()),
                                partition.blocks());
  auto [best, ledger] =
      run_search(data, partition, out.penalties, cfg, cfg.search.seed);
  out.ledger = std::move(ledger);
  out.inclusion = inclusion_probabilities(out.ledger, partition);
  return out;
}

Step2Selection algorithm1_step2(const BlockPartition& partition, double n,
                                const Step1Result& step1,
                                SelectorVariant variant) {
  const int p = partition.p();
  const int b = partition.blocks();
  const bool pooled = variant == SelectorVariant::EB_pooled ||
                      variant == SelectorVariant::A_pooled;
  const Step2Variant step2 = (variant == SelectorVariant::EB ||
                              variant == SelectorVariant::EB_pooled)
                                 ? Step2Variant::EB
                                 : Step2Variant::A;
  Step2Selection out;
  if (pooled) {
    double shat_total = 0.0;
    for (double s : step1.inclusion.shat) shat_total += s;
    out.shat_used = clamp_shat({shat_total}, {p});
    const double half_log_n = 0.5 * std::log(n);
    const double kappa =
        step2 == Step2Variant::EB
            ? std::log(static_cast<double>(p) / out.shat_used[0] - 1.0) +
                  half_log_n
            : std::log(static_cast<double>(p) - out.shat_used[0]) + half_log_n;
    out.penalties = PenaltySpec::uniform(b, kappa);
  } else {
    std::vector<int> sizes(b);
    for (int j = 0; j < b; ++j) sizes[j] = partition.block_size(j);
    out.shat_used = clamp_shat(step1.inclusion.shat, sizes);
    out.penalties = step2_penalties(step1.inclusion.shat, partition, n, step2);
  }
  auto [sel, sc] =
      step1.ledger.argmax_rescored(linear_penalty(partition, out.penalties));
  out.selected = sel;
  out.score = sc;
  return out;
}

EBResult algorithm1(const RegressionData& data, const BlockPartition& partition,
                    const AlgoConfig& cfg, SelectorVariant variant) {
  Step1Result step1 = algorithm1_step1(data, partition, cfg);
  Step2Selection sel = algorithm1_step2(
      partition, static_cast<double>(data.n()), step1, variant);

  EBResult out;
  out.variant = variant;
  out.step1_penalties = step1.penalties;
  out.step1_inclusion = step1.inclusion;
  out.shat_used = sel.shat_used;
  out.penalties_used = sel.penalties;

  if (cfg.step2_fresh_search && data.p() > cfg.p_limit) {
    AlgoConfig fresh = cfg;
    fresh.step2_fresh_search = false;
    auto [best2, ledger2] = run_search(data, partition, out.penalties_used,
                                       fresh, splitmix64(cfg.search.seed + 1));
    ModelLedger merged = step1.ledger;
    merged.merge(ledger2);
    auto [m, sc] =
        merged.argmax_rescored(linear_penalty(partition, out.penalties_used));
    out.selected = m;
    out.selected_score = sc;
  } else {
    out.selected = sel.selected;
    out.selected_score = sel.score;
  }
  out.step1_ledger = std::move(step1.ledger);
  return out;
}

double ebic_penalty(long p, int model_size, double n, double zeta) {
  if (zeta < 0) fail(ErrorCode::invalid_argument, "zeta must be >= 0");
  if (model_size < 0 || model_size > p)
    fail(ErrorCode::invalid_argument, "model size out of range");
  const double pd = static_cast<double>(p);
  const double kd = static_cast<double>(model_size);
  const double log_binom =
      std::lgamma(pd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(pd - kd + 1.0);
  return zeta * log_binom + 0.5 * std::log(n);
}

PenaltyFn ebic_penalty_fn(long p, double n, double zeta) {
  return [p, n, zeta](const ModelSet& m) {
    return ebic_penalty(p, m.size(), n, zeta);
  };
}

std::pair<ModelSet, ModelLedger> ebic_select(const RegressionData& data,
                                             const AlgoConfig& cfg,
                                             double zeta) {
  data.validate();
  const PenaltyFn penalty =
      ebic_penalty_fn(data.p(), static_cast<double>(data.n()), zeta);
  if (data.p() <= cfg.p_limit) {
    EnumerateOptions opts;
    opts.p_limit = cfg.p_limit;
    opts.budget = cfg.enum_budget;
    opts.max_model_size = cfg.search.max_model_size;
    return enumerate_select_fn(data, penalty, opts);
  }
  return mcmc_search_fn(data, penalty, cfg.search);
}

}  // namespace blocksel
