#ifndef BLOCKSEL_SEARCH_HPP
#define BLOCKSEL_SEARCH_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "blocksel/types.hpp"

namespace blocksel {

/// Penalty term of C(M); linear block penalties and the EBIC comparator both
/// fit this shape, and rescoring a ledger under new penalties only needs it.
using PenaltyFn = std::function<double(const ModelSet&)>;

PenaltyFn linear_penalty(const BlockPartition& partition,
                         const PenaltySpec& pen);

/// Deduplicated record of every model evaluated during a search, keyed by the
/// sorted index list. Stores the penalty-independent fitted term so that
/// rescoring under different penalties reuses the cached fits.
class ModelLedger {
 public:
  struct Row {
    ModelSet model;
    double fitted_half;  // ||X_M beta~||^2 / (2 sigma^2)
    double score;        // C(M) under the penalties of the producing run
  };

  /// Returns false when the model was already present.
  bool insert(const ModelSet& model, double fitted_half, double score);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const ModelSet& best_model() const;
  double best_score() const;

  bool contains(const ModelSet& model) const;
  std::optional<double> fitted_half(const ModelSet& model) const;

  std::vector<Row> rows() const;
  /// Rows sorted by score descending, lexicographic on ties.
  std::vector<Row> rows_by_score() const;

  /// Argmax of fitted_half - penalty(M) over the stored models, with the
  /// lexicographically smallest model breaking score ties.
  std::pair<ModelSet, double> argmax_rescored(const PenaltyFn& penalty) const;

  void merge(const ModelLedger& other);

  /// CSV export: model (semicolon-joined 1-based indices), C, NC.
  std::string to_csv() const;

 private:
  struct Entry {
    double fitted_half;
    double score;
  };
  struct KeyHash {
    std::size_t operator()(const std::vector<int>& v) const noexcept;
  };
  std::unordered_map<std::vector<int>, Entry, KeyHash> entries_;
  ModelSet best_model_;
  double best_score_ = 0.0;
  bool has_best_ = false;

  void consider_best(const ModelSet& model, double score);
};

struct SearchConfig {
  std::int64_t iterations = 10000;
  std::uint64_t seed = 0;
  enum class Init { empty, full, given } init = Init::empty;
  ModelSet init_model;
  double swap_probability = 0.5;
  std::optional<int> max_model_size;

  void validate() const;
};

/// Per-variable marginal inclusion probabilities under the visited-set
/// normalization, and their per-block sums s_hat_j.
struct InclusionProbs {
  std::vector<double> per_variable;
  std::vector<double> shat;
};

struct EnumerateOptions {
  int p_limit = 20;
  std::int64_t budget = 1 << 20;  // max number of models to score
  std::optional<int> max_model_size;
};

/// Exact argmax of C(M) over all full-rank subsets (optionally capped in
/// size). Rank-deficient subsets are excluded from the candidate set.
std::pair<ModelSet, ModelLedger> enumerate_select(
    const RegressionData& data, const BlockPartition& partition,
    const PenaltySpec& pen, const EnumerateOptions& options = {});

/// Metropolis search over inclusion vectors: proposals flip one uniformly
/// chosen index or, with probability swap_probability, exchange an included
/// and an excluded index; acceptance probability min(1, exp(C' - C)).
/// Rank-deficient proposals are rejected. Deterministic given the seed.
std::pair<ModelSet, ModelLedger> mcmc_search(const RegressionData& data,
                                             const BlockPartition& partition,
                                             const PenaltySpec& pen,
                                             const SearchConfig& cfg);

/// Generic-penalty variants used by the EBIC comparator.
std::pair<ModelSet, ModelLedger> enumerate_select_fn(
    const RegressionData& data, const PenaltyFn& penalty,
    const EnumerateOptions& options = {});
std::pair<ModelSet, ModelLedger> mcmc_search_fn(const RegressionData& data,
                                                const PenaltyFn& penalty,
                                                const SearchConfig& cfg);

InclusionProbs inclusion_probabilities(const ModelLedger& ledger,
                                       const BlockPartition& partition);

/// Cached evaluator of the fitted term: precomputes X'X and X'y once and
/// solves each model's normal equations by Cholesky with a pivot tolerance.
/// Returns nullopt for rank-deficient models.
class ModelScorer {
 public:
  explicit ModelScorer(const RegressionData& data);
  std::optional<double> fitted_half(const ModelSet& model) const;
  long p() const { return gram_.cols(); }

 private:
  Matrix gram_;
  Vector xty_;
  double inv_two_sigma_sq_;
};

}  // namespace blocksel

#endif  // BLOCKSEL_SEARCH_HPP
