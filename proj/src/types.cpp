#include "blocksel/types.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace blocksel {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::rank_deficient: return "RankDeficient";
    case ErrorCode::not_nested: return "NotNested";
    case ErrorCode::empty_collection: return "EmptyCollection";
    case ErrorCode::degenerate_block: return "DegenerateBlock";
    case ErrorCode::degenerate_direction: return "DegenerateDirection";
    case ErrorCode::infeasible_n: return "InfeasibleN";
    case ErrorCode::too_large: return "TooLarge";
    case ErrorCode::out_of_range: return "OutOfRange";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::io_error: return "IoError";
    case ErrorCode::internal: return "Internal";
  }
  return "Unknown";
}

BlockPartition BlockPartition::from_labels(const std::vector<int>& labels) {
  if (labels.empty())
    fail(ErrorCode::invalid_argument, "partition needs at least one variable");
  int b = 0;
  for (int l : labels) b = std::max(b, l);
  if (b < 1)
    fail(ErrorCode::invalid_argument, "block labels must be in 1..b");
  BlockPartition out;
  out.b_ = b;
  out.block_sizes_.assign(b, 0);
  out.assignment_.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int l = labels[i];
    if (l < 1 || l > b) {
      std::ostringstream ss;
      ss << "block label " << l << " for variable " << (i + 1)
         << " is outside 1.." << b;
      fail(ErrorCode::invalid_argument, ss.str());
    }
    out.assignment_.push_back(l - 1);
    ++out.block_sizes_[l - 1];
  }
  for (int j = 0; j < b; ++j) {
    if (out.block_sizes_[j] == 0) {
      std::ostringstream ss;
      ss << "block " << (j + 1) << " is empty: labels must cover 1..b";
      fail(ErrorCode::invalid_argument, ss.str());
    }
  }
  return out;
}

BlockPartition BlockPartition::single_block(int p) {
  if (p < 1) fail(ErrorCode::invalid_argument, "p must be >= 1");
  BlockPartition out;
  out.b_ = 1;
  out.assignment_.assign(p, 0);
  out.block_sizes_ = {p};
  return out;
}

BlockPartition BlockPartition::contiguous(const std::vector<int>& sizes) {
  if (sizes.empty()) fail(ErrorCode::invalid_argument, "no block sizes given");
  BlockPartition out;
  out.b_ = static_cast<int>(sizes.size());
  out.block_sizes_ = sizes;
  for (int j = 0; j < out.b_; ++j) {
    if (sizes[j] < 1)
      fail(ErrorCode::invalid_argument, "every block must be non-empty");
    out.assignment_.insert(out.assignment_.end(), sizes[j], j);
  }
  return out;
}

std::vector<int> BlockPartition::members(int j) const {
  std::vector<int> out;
  for (int i = 0; i < p(); ++i)
    if (assignment_[i] == j) out.push_back(i);
  return out;
}

ModelSet ModelSet::of(std::vector<int> indices, int p) {
  std::sort(indices.begin(), indices.end());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] < 0 || indices[k] >= p)
      fail(ErrorCode::invalid_argument, "model index out of range");
    if (k > 0 && indices[k] == indices[k - 1])
      fail(ErrorCode::invalid_argument, "duplicate model index");
  }
  ModelSet out;
  out.idx_ = std::move(indices);
  return out;
}

ModelSet ModelSet::full(int p) {
  ModelSet out;
  out.idx_.resize(p);
  std::iota(out.idx_.begin(), out.idx_.end(), 0);
  return out;
}

ModelSet ModelSet::with(int i) const {
  ModelSet out(*this);
  auto it = std::lower_bound(out.idx_.begin(), out.idx_.end(), i);
  if (it == out.idx_.end() || *it != i) out.idx_.insert(it, i);
  return out;
}

ModelSet ModelSet::without(int i) const {
  ModelSet out(*this);
  auto it = std::lower_bound(out.idx_.begin(), out.idx_.end(), i);
  if (it != out.idx_.end() && *it == i) out.idx_.erase(it);
  return out;
}

ModelSet ModelSet::set_union(const ModelSet& other) const {
  ModelSet out;
  std::set_union(idx_.begin(), idx_.end(), other.idx_.begin(),
                 other.idx_.end(), std::back_inserter(out.idx_));
  return out;
}

ModelSet ModelSet::set_difference(const ModelSet& other) const {
  ModelSet out;
  std::set_difference(idx_.begin(), idx_.end(), other.idx_.begin(),
                      other.idx_.end(), std::back_inserter(out.idx_));
  return out;
}

bool ModelSet::subset_of(const ModelSet& other) const {
  return std::includes(other.idx_.begin(), other.idx_.end(), idx_.begin(),
                       idx_.end());
}

int ModelSet::symmetric_difference_size(const ModelSet& other) const {
  std::size_t i = 0, k = 0, d = 0;
  while (i < idx_.size() && k < other.idx_.size()) {
    if (idx_[i] == other.idx_[k]) {
      ++i;
      ++k;
    } else if (idx_[i] < other.idx_[k]) {
      ++i;
      ++d;
    } else {
      ++k;
      ++d;
    }
  }
  d += (idx_.size() - i) + (other.idx_.size() - k);
  return static_cast<int>(d);
}

std::vector<int> ModelSet::block_counts(const BlockPartition& partition) const {
  std::vector<int> counts(partition.blocks(), 0);
  for (int i : idx_) {
    if (i >= partition.p())
      fail(ErrorCode::dimension_mismatch, "model index beyond partition size");
    ++counts[partition.block_of(i)];
  }
  return counts;
}

void RegressionData::validate() const {
  if (X.rows() < 1 || X.cols() < 1)
    fail(ErrorCode::invalid_argument, "design must be at least 1x1");
  if (y.size() != X.rows())
    fail(ErrorCode::dimension_mismatch,
         "response length does not match design rows");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    fail(ErrorCode::invalid_argument, "sigma must be a positive real");
  if (!X.allFinite() || !y.allFinite())
    fail(ErrorCode::invalid_argument, "design/response contain non-finite entries");
}

PenaltySpec PenaltySpec::uniform(int b, double kappa) {
  PenaltySpec out;
  out.kappas.assign(b, kappa);
  return out;
}

void PenaltySpec::validate(const BlockPartition& partition) const {
  if (blocks() != partition.blocks())
    fail(ErrorCode::dimension_mismatch, "penalty count does not match blocks");
  for (double k : kappas)
    if (!std::isfinite(k) || k < 0.0)
      fail(ErrorCode::invalid_argument, "penalties must be finite and >= 0");
}

void ThresholdSpec::validate(const BlockPartition& partition) const {
  if (blocks() != partition.blocks())
    fail(ErrorCode::dimension_mismatch, "threshold count does not match blocks");
  for (double t : taus)
    if (!std::isfinite(t) || t < 0.0)
      fail(ErrorCode::invalid_argument, "thresholds must be finite and >= 0");
}

}  // namespace blocksel
