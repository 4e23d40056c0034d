#ifndef BLOCKSEL_TYPES_HPP
#define BLOCKSEL_TYPES_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace blocksel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  rank_deficient,
  not_nested,
  empty_collection,
  degenerate_block,
  degenerate_direction,
  infeasible_n,
  too_large,
  out_of_range,
  parse_error,
  io_error,
  internal
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

/// Assignment of each of p variables to one of b non-empty blocks.
/// Labels are 0-based internally; external formats use 1..b.
class BlockPartition {
 public:
  BlockPartition() = default;

  /// Build from external labels in {1..b}. Labels must cover 1..b with no gap.
  static BlockPartition from_labels(const std::vector<int>& labels_one_based);

  /// All p variables in a single block.
  static BlockPartition single_block(int p);

  /// Contiguous blocks of the given sizes: block 0 holds the first sizes[0]
  /// variables, and so on.
  static BlockPartition contiguous(const std::vector<int>& sizes);

  int p() const { return static_cast<int>(assignment_.size()); }
  int blocks() const { return b_; }
  int block_of(int i) const { return assignment_[i]; }
  int block_size(int j) const { return block_sizes_[j]; }
  const std::vector<int>& assignment() const { return assignment_; }

  /// Variables belonging to block j, ascending.
  std::vector<int> members(int j) const;

 private:
  std::vector<int> assignment_;  // size p, values in [0, b)
  std::vector<int> block_sizes_;
  int b_ = 0;
};

/// A candidate support M: strictly increasing 0-based variable indices.
class ModelSet {
 public:
  ModelSet() = default;

  static ModelSet of(std::vector<int> indices, int p);
  static ModelSet empty() { return ModelSet(); }
  static ModelSet full(int p);

  int size() const { return static_cast<int>(idx_.size()); }
  bool is_empty() const { return idx_.empty(); }
  const std::vector<int>& indices() const { return idx_; }
  bool contains(int i) const {
    return std::binary_search(idx_.begin(), idx_.end(), i);
  }

  ModelSet with(int i) const;
  ModelSet without(int i) const;
  ModelSet set_union(const ModelSet& other) const;
  ModelSet set_difference(const ModelSet& other) const;
  bool subset_of(const ModelSet& other) const;
  int symmetric_difference_size(const ModelSet& other) const;

  /// |M_j| for each block of the partition.
  std::vector<int> block_counts(const BlockPartition& partition) const;

  bool operator==(const ModelSet& other) const { return idx_ == other.idx_; }
  bool operator!=(const ModelSet& other) const { return idx_ != other.idx_; }
  /// Lexicographic order on the index lists; used to break score ties.
  bool operator<(const ModelSet& other) const { return idx_ < other.idx_; }

 private:
  std::vector<int> idx_;
};

/// Design matrix, response and noise level for the regression problem.
struct RegressionData {
  Matrix X;
  Vector y;
  double sigma = 1.0;

  long n() const { return X.rows(); }
  long p() const { return X.cols(); }

  /// Throws on non-finite entries, shape mismatch or sigma <= 0.
  void validate() const;
};

/// Per-block penalty rates kappa_1..kappa_b, all finite and >= 0.
struct PenaltySpec {
  std::vector<double> kappas;

  static PenaltySpec uniform(int b, double kappa);
  int blocks() const { return static_cast<int>(kappas.size()); }
  void validate(const BlockPartition& partition) const;
};

/// Per-block thresholds tau_1..tau_b, all finite and > 0 (0 allowed as the
/// degenerate kappa=0 image under penalty_to_threshold).
struct ThresholdSpec {
  std::vector<double> taus;

  int blocks() const { return static_cast<int>(taus.size()); }
  void validate(const BlockPartition& partition) const;
};

/// Least-squares fit restricted to a model.
struct CoefEstimate {
  ModelSet model;
  Vector beta;              // coefficients, in model-index order
  double fitted_norm_sq{};  // ||X_M beta||^2
};

}  // namespace blocksel

#endif  // BLOCKSEL_TYPES_HPP
