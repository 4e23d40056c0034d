#include "blocksel/seqmodel.hpp"

#include <cmath>
#include <sstream>

namespace blocksel {

namespace {

constexpr double kMaxExactCount = 9007199254740992.0;  // 2^53

double round_half_up(double x) { return std::floor(x + 0.5); }

void check_block_index(const BlockConfig& cfg, int j) {
  if (j < 0 || j >= cfg.b())
    fail(ErrorCode::invalid_argument, "block index out of range");
}

void require_counts(const BlockCounts& blk, double min_inactive,
                    double min_active) {
  if (blk.inactive < min_inactive || blk.active < min_active)
    fail(ErrorCode::degenerate_block,
         "block counts too small for this calculator");
}

}  // namespace

SequenceData SequenceData::from_observations(Vector y, long n) {
  if (y.size() < 1) fail(ErrorCode::invalid_argument, "empty sequence");
  if (n < 1) fail(ErrorCode::invalid_argument, "n must be >= 1");
  SequenceData out;
  out.y = std::move(y);
  out.n = n;
  return out;
}

SequenceData SequenceData::from_means(const Vector& beta_tilde, long n) {
  return from_observations(beta_tilde * std::sqrt(static_cast<double>(n)), n);
}

Vector SequenceData::beta_tilde() const {
  return y / std::sqrt(static_cast<double>(n));
}

double BlockConfig::inactive_total() const {
  double t = 0;
  for (const auto& blk : blocks) t += blk.inactive;
  return t;
}

double BlockConfig::active_total() const {
  double t = 0;
  for (const auto& blk : blocks) t += blk.active;
  return t;
}

double BlockConfig::beta_min_overall() const {
  double m = blocks.empty() ? 0.0 : blocks.front().beta_min;
  for (const auto& blk : blocks) m = std::min(m, blk.beta_min);
  return m;
}

ModelSet threshold_select(const SequenceData& seq,
                          const BlockPartition& partition,
                          const ThresholdSpec& thr) {
  if (partition.p() != seq.p())
    fail(ErrorCode::dimension_mismatch, "partition size does not match sequence");
  thr.validate(partition);
  const Vector bt = seq.beta_tilde();
  std::vector<int> idx;
  for (int i = 0; i < seq.p(); ++i)
    if (std::abs(bt[i]) > thr.taus[partition.block_of(i)]) idx.push_back(i);
  return ModelSet::of(std::move(idx), static_cast<int>(seq.p()));
}

ThresholdSpec penalty_to_threshold(const PenaltySpec& pen, double n) {
  if (n < 1) fail(ErrorCode::invalid_argument, "n must be >= 1");
  ThresholdSpec out;
  out.taus.reserve(pen.kappas.size());
  for (double k : pen.kappas) {
    if (k < 0) fail(ErrorCode::invalid_argument, "kappa must be >= 0");
    out.taus.push_back(std::sqrt(2.0 * k / n));
  }
  return out;
}

ThresholdSpec oracle_thresholds(const BlockConfig& cfg) {
  ThresholdSpec out;
  for (const auto& blk : cfg.blocks) {
    if (blk.active < 1 || blk.inactive < 1)
      fail(ErrorCode::degenerate_block,
           "oracle threshold needs 0 < s_j < p_j");
    const double beta = blk.beta_min;
    out.taus.push_back(beta / 2.0 + std::log(blk.inactive / blk.active) /
                                        (static_cast<double>(cfg.n) * beta));
  }
  return out;
}

std::vector<ThresholdInterval> consistency_range(const BlockConfig& cfg,
                                                 bool pooled) {
  const double n = static_cast<double>(cfg.n);
  std::vector<ThresholdInterval> out;
  auto one = [&](double inactive, double active, double beta) {
    if (inactive < 1 || active < 1)
      fail(ErrorCode::degenerate_block, "range needs p_j-s_j >= 1 and s_j >= 1");
    ThresholdInterval iv;
    iv.lo = std::sqrt(2.0 * std::log(inactive) / n);
    iv.hi = beta - std::sqrt(2.0 * std::log(active) / n);
    return iv;
  };
  if (pooled) {
    out.push_back(
        one(cfg.inactive_total(), cfg.active_total(), cfg.beta_min_overall()));
  } else {
    for (const auto& blk : cfg.blocks)
      out.push_back(one(blk.inactive, blk.active, blk.beta_min));
  }
  return out;
}

double rate_bound(const BlockConfig& cfg, const ThresholdSpec& thr,
                  bool oracle, RateBoundChecks* checks) {
  const double n = static_cast<double>(cfg.n);
  if (!oracle && static_cast<int>(thr.taus.size()) != cfg.b())
    fail(ErrorCode::dimension_mismatch, "one threshold per block required");
  if (checks) *checks = RateBoundChecks{};
  double bound = 0.0;
  for (int j = 0; j < cfg.b(); ++j) {
    const auto& blk = cfg.blocks[j];
    if (oracle) {
      require_counts(blk, 1, 1);
      const double lmax = std::log(std::max(blk.inactive, blk.active));
      bound += 2.0 * std::exp(-(n / 8.0) * blk.beta_min * blk.beta_min + lmax);
      continue;
    }
    require_counts(blk, 1.0 + 1e-12, 1.0 + 1e-12);  // logs must be positive
    const double tau = thr.taus[j];
    const double lp = std::log(blk.inactive);
    const double ls = std::log(blk.active);
    if (checks) {
      if (std::sqrt(n) * tau < std::sqrt(2.0 * lp)) checks->a4_ok = false;
      if (std::sqrt(n) * (blk.beta_min - tau) < std::sqrt(2.0 * ls))
        checks->a5_ok = false;
    }
    const double gap = blk.beta_min - tau;
    bound += std::exp(-(n / 2.0) * (tau * tau - 2.0 * lp / n)) /
             std::sqrt(M_PI * lp);
    bound += std::exp(-(n / 2.0) * (gap * gap - 2.0 * ls / n)) /
             std::sqrt(M_PI * ls);
  }
  return bound;
}

double rate_ratio(const BlockConfig& cfg) {
  const double n = static_cast<double>(cfg.n);
  const double beta0 = cfg.beta_min_overall();
  const double lmax_pool =
      std::log(std::max(cfg.inactive_total(), cfg.active_total()));
  double ratio = 0.0;
  for (const auto& blk : cfg.blocks) {
    require_counts(blk, 1, 1);
    const double lmax_j = std::log(std::max(blk.inactive, blk.active));
    ratio += std::exp(-(n / 8.0) * (blk.beta_min * blk.beta_min - beta0 * beta0) -
                      (lmax_pool - lmax_j));
  }
  return ratio;
}

double smallest_recoverable(const BlockConfig& cfg, bool pooled,
                            std::optional<int> host_block) {
  const double n = static_cast<double>(cfg.n);
  double inactive, active;
  if (pooled) {
    inactive = cfg.inactive_total();
    active = cfg.active_total();
  } else {
    const int j = host_block.value_or(cfg.b() - 1);
    check_block_index(cfg, j);
    inactive = cfg.blocks[j].inactive;
    active = cfg.blocks[j].active;
  }
  if (inactive < 1 || active < 1)
    fail(ErrorCode::degenerate_block, "counts must be >= 1");
  return std::sqrt(2.0 * std::log(inactive) / n) +
         std::sqrt(2.0 * std::log(active) / n);
}

ThresholdSpec lasso_equivalent_threshold(const std::vector<double>& lambdas,
                                         double n, LassoVariant variant,
                                         double lambda0) {
  if (n < 1) fail(ErrorCode::invalid_argument, "n must be >= 1");
  if (lambda0 < 0)
    fail(ErrorCode::invalid_argument, "lambda0 must be >= 0");
  ThresholdSpec out;
  for (double lam : lambdas) {
    if (lam < 0) fail(ErrorCode::invalid_argument, "lambda must be >= 0");
    switch (variant) {
      case LassoVariant::lasso:
        out.taus.push_back(lam / n);
        break;
      case LassoVariant::adaptive_mle:
        out.taus.push_back(std::sqrt(lam / n));
        break;
      case LassoVariant::adaptive_lasso: {
        const double h = lambda0 / (2.0 * n);
        out.taus.push_back(h + std::sqrt(h * h + lam / n));
        break;
      }
    }
  }
  return out;
}

std::vector<double> example_default_beta_min(int example_id) {
  switch (example_id) {
    case 1: return {0.8, 0.33};
    case 2: return {2.0 / 3.0, 0.1};  // figure parameterization; not simulated
    case 3: return {0.8, 0.33};
    case 4: return {0.33, 0.33};
    case 5: return {0.8, 0.2};
    default:
      fail(ErrorCode::invalid_argument, "example_id must be in 1..5");
  }
}

BlockConfig example_config(int example_id, long n,
                           const std::vector<double>& beta_min) {
  if (n < 2) fail(ErrorCode::infeasible_n, "n too small");
  const double nd = static_cast<double>(n);
  const double sqn = std::sqrt(nd);
  double inact1 = 0, inact2 = 0;
  switch (example_id) {
    case 1:
      inact1 = 1.5 * nd - sqn;
      inact2 = sqn;
      break;
    case 2:
      inact1 = std::exp(nd / 20.0) - nd * nd;
      inact2 = nd * nd;
      break;
    case 3:
      inact1 = nd - std::log(nd);
      inact2 = std::log(nd);
      break;
    case 4:
      inact1 = nd / 2.0;
      inact2 = nd / 2.0;
      break;
    case 5:
      inact1 = (nd - sqn) / 2.0;
      inact2 = sqn / 2.0;
      break;
    default:
      fail(ErrorCode::invalid_argument, "example_id must be in 1..5");
  }
  const std::vector<double> betas =
      beta_min.empty() ? example_default_beta_min(example_id) : beta_min;
  if (betas.size() != 2)
    fail(ErrorCode::invalid_argument, "two-block examples need two beta_min values");

  const double s_each = std::max(1.0, round_half_up(1.5 * std::log(nd)));
  BlockConfig cfg;
  cfg.n = n;
  for (double raw : {inact1, inact2}) {
    BlockCounts blk;
    blk.inactive = round_half_up(raw);
    blk.active = s_each;
    if (!(blk.inactive >= 1)) {
      std::ostringstream ss;
      ss << "example " << example_id << " infeasible at n=" << n
         << ": a rounded inactive count is below 1";
      fail(ErrorCode::infeasible_n, ss.str());
    }
    if (blk.inactive > kMaxExactCount) {
      std::ostringstream ss;
      ss << "example " << example_id << " infeasible at n=" << n
         << ": count exceeds 2^53 and cannot be represented exactly";
      fail(ErrorCode::infeasible_n, ss.str());
    }
    cfg.blocks.push_back(blk);
  }
  cfg.blocks[0].beta_min = betas[0];
  cfg.blocks[1].beta_min = betas[1];
  return cfg;
}

}  // namespace blocksel
