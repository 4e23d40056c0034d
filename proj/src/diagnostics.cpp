#include "blocksel/diagnostics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <sstream>

#include "blocksel/core_model.hpp"

namespace blocksel {

namespace {

constexpr double kResidualTol = 1e-10;

double lambda_min_sym(const Matrix& A) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// lambda_min of X_{S\M}'(I - P_M) X_{S\M} / n, or nullopt when X_M is
/// rank deficient (M outside the candidate set).
std::optional<double> residual_eigmin(const RegressionData& data,
                                      const ModelSet& S, const ModelSet& M) {
  const ModelSet rest = S.set_difference(M);
  if (rest.is_empty()) return std::nullopt;
  Matrix Xr = submatrix(data.X, rest);
  Matrix R;
  try {
    R = Xr - project_onto(data.X, M, Xr);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::rank_deficient) return std::nullopt;
    throw;
  }
  Matrix W = (R.transpose() * R) / static_cast<double>(data.n());
  return lambda_min_sym(W);
}

}  // namespace

RhoResult rho_X(const RegressionData& data, const ModelSet& S,
                RhoStrategy strategy, std::int64_t budget) {
  data.validate();
  if (S.is_empty()) fail(ErrorCode::invalid_argument, "S must be non-empty");
  {
    // X_S itself must be full rank for rho to be meaningful.
    Eigen::ColPivHouseholderQR<Matrix> qr(submatrix(data.X, S));
    qr.setThreshold(1e-8);
    if (qr.rank() < S.size())
      fail(ErrorCode::rank_deficient, "X_S is rank deficient");
  }
  const int p = static_cast<int>(data.p());
  const int s = S.size();
  double best = std::numeric_limits<double>::infinity();

  if (strategy == RhoStrategy::exact) {
    if (p > 62) fail(ErrorCode::too_large, "exact rho enumeration needs p <= 62");
    const double count = std::ldexp(1.0, p) - std::ldexp(1.0, p - s);
    if (count > static_cast<double>(budget))
      fail(ErrorCode::too_large, "exact rho enumeration exceeds the budget");
    std::uint64_t smask = 0;
    for (int i : S.indices()) smask |= (1ull << i);
    const std::uint64_t limit = 1ull << p;
    for (std::uint64_t mask = 0; mask < limit; ++mask) {
      if ((mask & smask) == smask) continue;  // M contains S
      std::vector<int> idx;
      for (int i = 0; i < p; ++i)
        if (mask & (1ull << i)) idx.push_back(i);
      const auto v = residual_eigmin(data, S, ModelSet::of(idx, p));
      if (v) best = std::min(best, *v);
    }
    return {best, true};
  }

  // Restricted family: proper subsets of S and their one-variable
  // augmentations by an inactive column.
  const double family =
      (std::ldexp(1.0, s) - 1.0) * static_cast<double>(p - s + 1);
  if (family > static_cast<double>(budget))
    fail(ErrorCode::too_large, "restricted rho family exceeds the budget");
  const auto& sidx = S.indices();
  const std::uint64_t subsets = 1ull << s;
  for (std::uint64_t mask = 0; mask + 1 < subsets; ++mask) {
    std::vector<int> idx;
    for (int k = 0; k < s; ++k)
      if (mask & (1ull << k)) idx.push_back(sidx[k]);
    ModelSet base = ModelSet::of(idx, p);
    if (auto v = residual_eigmin(data, S, base)) best = std::min(best, *v);
    for (int k = 0; k < p; ++k) {
      if (S.contains(k)) continue;
      if (auto v = residual_eigmin(data, S, base.with(k)))
        best = std::min(best, *v);
    }
  }
  return {best, false};
}

double lambda_bar(const RegressionData& data, const ModelSet& S) {
  data.validate();
  if (S.is_empty()) fail(ErrorCode::invalid_argument, "S must be non-empty");
  Matrix Xs = submatrix(data.X, S);
  Matrix G = (Xs.transpose() * Xs) / static_cast<double>(data.n());
  Eigen::SelfAdjointEigenSolver<Matrix> es(G, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

std::vector<BlockCorrelation> lambda_underline(const RegressionData& data,
                                               const ModelSet& S,
                                               const BlockPartition& partition) {
  data.validate();
  if (partition.p() != data.p())
    fail(ErrorCode::dimension_mismatch, "partition size does not match design");
  std::vector<BlockCorrelation> out(partition.blocks());
  for (int j = 0; j < partition.blocks(); ++j) {
    std::vector<int> inactive;
    for (int i : partition.members(j))
      if (!S.contains(i)) inactive.push_back(i);
    if (inactive.empty())
      fail(ErrorCode::degenerate_block,
           "block has no inactive variables; lambda_underline undefined");
    Matrix Xi = submatrix(data.X, ModelSet::of(inactive, partition.p()));
    Matrix R = Xi - project_onto(data.X, S, Xi);
    std::vector<int> keep;
    for (int c = 0; c < R.cols(); ++c) {
      if (R.col(c).norm() < kResidualTol)
        out[j].excluded.push_back(inactive[c]);
      else
        keep.push_back(c);
    }
    if (keep.empty()) {
      out[j].lambda_min = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    Matrix V(R.rows(), keep.size());
    for (std::size_t c = 0; c < keep.size(); ++c)
      V.col(c) = R.col(keep[c]) / R.col(keep[c]).norm();
    const double lmin = lambda_min_sym(V.transpose() * V);
    out[j].lambda_min = std::min(1.0, std::max(0.0, lmin));
  }
  return out;
}

double gamma_from_penalties(const BlockConfig& cfg, const PenaltySpec& pen) {
  if (static_cast<int>(pen.kappas.size()) != cfg.b())
    fail(ErrorCode::dimension_mismatch, "one penalty per block required");
  double worst = 0.0;
  for (int j = 0; j < cfg.b(); ++j) {
    if (cfg.blocks[j].inactive < 1)
      fail(ErrorCode::degenerate_block, "p_j - s_j must be >= 1");
    if (!(pen.kappas[j] > 0))
      fail(ErrorCode::invalid_argument, "kappa_j must be positive");
    worst = std::max(worst, std::log(cfg.blocks[j].inactive) / pen.kappas[j]);
  }
  return 0.5 * (1.0 + worst);
}

PenaltySpec oracle_penalties_reg(const BlockConfig& cfg, double rho,
                                 double gamma) {
  if (!(rho > 0)) fail(ErrorCode::invalid_argument, "rho must be positive");
  if (!(gamma > 0.5 && gamma < 1.0))
    fail(ErrorCode::out_of_range, "gamma must lie in (1/2, 1)");
  const double n = static_cast<double>(cfg.n);
  const double c = std::sqrt((1.0 - gamma) * n * rho / 6.0);
  PenaltySpec out;
  for (const auto& blk : cfg.blocks) {
    if (blk.active < 1 || blk.inactive < 1)
      fail(ErrorCode::degenerate_block, "oracle penalty needs 0 < s_j < p_j");
    const double diff = std::log(blk.inactive) - std::log(blk.active);
    const double sk = 0.5 * c * blk.beta_min + 0.5 * diff / (c * blk.beta_min);
    if (!(sk > 0))
      fail(ErrorCode::degenerate_block,
           "betamin too small for the oracle penalty premise");
    out.kappas.push_back(sk * sk);
  }
  return out;
}

double regression_rate_bound(const BlockConfig& cfg, const PenaltySpec& pen,
                             double rho, double gamma, double delta, double r,
                             bool oracle) {
  if (!(delta > 0 && delta < 1))
    fail(ErrorCode::out_of_range, "delta must lie in (0,1)");
  if (!(r > 1)) fail(ErrorCode::out_of_range, "r must exceed 1");
  if (!(gamma > 0.5 && gamma < 1.0))
    fail(ErrorCode::out_of_range, "gamma must lie in (1/2, 1)");
  const double n = static_cast<double>(cfg.n);
  const int b = cfg.b();
  const double prefactor = std::pow(2.0, 2 * b) - 2.0 * b;
  double sum = 0.0;
  for (int j = 0; j < b; ++j) {
    const auto& blk = cfg.blocks[j];
    if (blk.active < 1 || blk.inactive < 1)
      fail(ErrorCode::degenerate_block, "counts must be >= 1");
    if (oracle) {
      const double expo = (1.0 - gamma) * n * rho * blk.beta_min * blk.beta_min /
                              24.0 -
                          std::log(std::max(blk.inactive, blk.active));
      sum += 2.0 * std::exp(-0.5 * delta * expo);
    } else {
      const double kappa = pen.kappas.at(j);
      const double margin =
          std::sqrt((1.0 - gamma) * n * rho / 6.0) * blk.beta_min -
          std::sqrt(kappa);
      sum += std::exp(-0.5 * delta * (kappa - std::log(blk.inactive)));
      sum += std::exp(
          -0.5 * delta * (margin * margin - std::log(blk.active)));
    }
  }
  return 6.0 * prefactor * r * sum;
}

bool AssumptionReport::all_sufficient() const {
  for (const auto& blk : blocks)
    if (!blk.a6_ok || !blk.a7_ok) return false;
  return gamma_valid;
}

std::string AssumptionReport::table() const {
  std::ostringstream ss;
  ss.precision(4);
  ss << "gamma = " << gamma << (gamma_valid ? "" : "  (outside (1/2,1))")
     << "\n";
  ss << "block  f_j=k-ln(pj-sj)  A6   g_j margin   A7   k/(l_j^2 ln(pj-sj))  "
        "nec-pen  betamin ratio  nec-bmin\n";
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    const auto& blk = blocks[j];
    ss << j + 1 << "      " << blk.f_margin << "\t" << (blk.a6_ok ? "ok" : "NO")
       << "   " << blk.g_margin << "\t" << (blk.a7_ok ? "ok" : "NO") << "   "
       << blk.nec_penalty_ratio << "\t"
       << (blk.nec_penalty_ok ? "ok" : "VIOLATED") << "  "
       << blk.nec_betamin_ratio << "\t"
       << (blk.nec_betamin_ok ? "ok" : "VIOLATED") << "\n";
  }
  return ss.str();
}

AssumptionReport assumption_check(const BlockConfig& cfg,
                                  const PenaltySpec& pen,
                                  const DesignDiagnostics& diag) {
  if (static_cast<int>(pen.kappas.size()) != cfg.b())
    fail(ErrorCode::dimension_mismatch, "one penalty per block required");
  AssumptionReport out;
  out.gamma = gamma_from_penalties(cfg, pen);
  out.gamma_valid = out.gamma > 0.5 && out.gamma < 1.0;
  const double n = static_cast<double>(cfg.n);
  for (int j = 0; j < cfg.b(); ++j) {
    const auto& blk = cfg.blocks[j];
    AssumptionBlockReport r;
    const double lp = std::log(blk.inactive);
    const double ls = blk.active >= 1 ? std::log(blk.active) : 0.0;
    r.f_margin = pen.kappas[j] - lp;
    r.a6_ok = r.f_margin > 0;
    if (out.gamma_valid) {
      r.g_margin = std::sqrt((1.0 - out.gamma) * n * diag.rho / 6.0) *
                       blk.beta_min -
                   std::sqrt(pen.kappas[j]) - std::sqrt(ls);
      r.a7_ok = r.g_margin > 0;
    } else {
      r.g_margin = std::numeric_limits<double>::quiet_NaN();
      r.a7_ok = false;
    }
    const double lu = diag.lambda_underline_for(j);
    r.nec_penalty_ratio =
        lp > 0 ? pen.kappas[j] / (lu * lu * lp)
               : std::numeric_limits<double>::infinity();
    r.nec_penalty_ok = r.nec_penalty_ratio >= 1.0;
    r.nec_betamin_ratio =
        lp > 0 ? std::sqrt(n * diag.lambda_bar) * blk.beta_min /
                     (lu * std::sqrt(lp))
               : std::numeric_limits<double>::infinity();
    r.nec_betamin_ok = r.nec_betamin_ratio > 0.0;
    out.blocks.push_back(r);
  }
  return out;
}

SignalClasses signal_classes(const Vector& beta_true,
                             const BlockPartition& partition,
                             const PenaltySpec& pen, double n, double rho,
                             double lambda_bar_value, double gamma,
                             double c_small) {
  if (beta_true.size() != partition.p())
    fail(ErrorCode::dimension_mismatch, "beta length must equal p");
  pen.validate(partition);
  if (!(gamma > 0.5 && gamma < 1.0))
    fail(ErrorCode::out_of_range, "gamma must lie in (1/2, 1)");
  if (n < 1) fail(ErrorCode::invalid_argument, "n must be >= 1");
  std::vector<int> active_per_block(partition.blocks(), 0);
  for (int i = 0; i < partition.p(); ++i)
    if (beta_true[i] != 0.0) ++active_per_block[partition.block_of(i)];
  SignalClasses out;
  for (int i = 0; i < partition.p(); ++i) {
    if (beta_true[i] == 0.0) continue;
    const int j = partition.block_of(i);
    const double kappa = pen.kappas[j];
    const double abs_b = std::abs(beta_true[i]);
    if (std::sqrt(n * lambda_bar_value) * abs_b <= c_small * std::sqrt(kappa)) {
      out.small.push_back(i);
      continue;
    }
    const double ls =
        active_per_block[j] >= 1 ? std::log(double(active_per_block[j])) : 0.0;
    const double margin = std::sqrt((1.0 - gamma) * n * rho / 6.0) * abs_b -
                          std::sqrt(kappa) - std::sqrt(ls);
    if (margin > 0)
      out.large.push_back(i);
    else
      out.intermediate.push_back(i);
  }
  return out;
}

}  // namespace blocksel
