#include "blocksel/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "blocksel/rng.hpp"

namespace blocksel {

PenaltyFn linear_penalty(const BlockPartition& partition,
                         const PenaltySpec& pen) {
  pen.validate(partition);
  return [partition, pen](const ModelSet& m) {
    double out = 0.0;
    for (int i : m.indices()) out += pen.kappas[partition.block_of(i)];
    return out;
  };
}

std::size_t ModelLedger::KeyHash::operator()(
    const std::vector<int>& v) const noexcept {
  std::size_t h = 0x9E3779B97F4A7C15ull ^ v.size();
  for (int x : v) {
    h ^= static_cast<std::size_t>(x) + 0x9E3779B97F4A7C15ull + (h << 6) +
         (h >> 2);
  }
  return h;
}

void ModelLedger::consider_best(const ModelSet& model, double score) {
  if (!has_best_ || score > best_score_ ||
      (score == best_score_ && model < best_model_)) {
    best_model_ = model;
    best_score_ = score;
    has_best_ = true;
  }
}

bool ModelLedger::insert(const ModelSet& model, double fitted_half,
                         double score) {
  auto [it, inserted] =
      entries_.try_emplace(model.indices(), Entry{fitted_half, score});
  if (inserted) consider_best(model, score);
  return inserted;
}

const ModelSet& ModelLedger::best_model() const {
  if (!has_best_) fail(ErrorCode::empty_collection, "ledger is empty");
  return best_model_;
}

double ModelLedger::best_score() const {
  if (!has_best_) fail(ErrorCode::empty_collection, "ledger is empty");
  return best_score_;
}

bool ModelLedger::contains(const ModelSet& model) const {
  return entries_.count(model.indices()) > 0;
}

std::optional<double> ModelLedger::fitted_half(const ModelSet& model) const {
  auto it = entries_.find(model.indices());
  if (it == entries_.end()) return std::nullopt;
  return it->second.fitted_half;
}

std::vector<ModelLedger::Row> ModelLedger::rows() const {
  std::vector<Row> out;
  out.reserve(entries_.size());
  for (const auto& [key, e] : entries_) {
    Row r;
    r.model = ModelSet::of(key, std::numeric_limits<int>::max());
    r.fitted_half = e.fitted_half;
    r.score = e.score;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ModelLedger::Row> ModelLedger::rows_by_score() const {
  auto out = rows();
  std::sort(out.begin(), out.end(), [](const Row& a, const Row& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.model < b.model;
  });
  return out;
}

std::pair<ModelSet, double> ModelLedger::argmax_rescored(
    const PenaltyFn& penalty) const {
  if (entries_.empty()) fail(ErrorCode::empty_collection, "ledger is empty");
  bool first = true;
  ModelSet best;
  double best_score = 0.0;
  for (const auto& [key, e] : entries_) {
    ModelSet m = ModelSet::of(key, std::numeric_limits<int>::max());
    const double s = e.fitted_half - penalty(m);
    if (first || s > best_score || (s == best_score && m < best)) {
      best = std::move(m);
      best_score = s;
      first = false;
    }
  }
  return {best, best_score};
}

void ModelLedger::merge(const ModelLedger& other) {
  for (const auto& [key, e] : other.entries_) {
    ModelSet m = ModelSet::of(key, std::numeric_limits<int>::max());
    insert(m, e.fitted_half, e.score);
  }
}

std::string ModelLedger::to_csv() const {
  const auto sorted = rows_by_score();
  double cmax = -std::numeric_limits<double>::infinity();
  for (const auto& r : sorted) cmax = std::max(cmax, r.score);
  double denom = 0.0;
  for (const auto& r : sorted) denom += std::exp(r.score - cmax);
  std::ostringstream ss;
  ss.precision(17);
  ss << "model,C,NC\n";
  for (const auto& r : sorted) {
    std::string key;
    for (std::size_t k = 0; k < r.model.indices().size(); ++k) {
      if (k) key += ';';
      key += std::to_string(r.model.indices()[k] + 1);
    }
    ss << key << ',' << r.score << ','
       << std::exp(r.score - cmax) / denom << '\n';
  }
  return ss.str();
}

void SearchConfig::validate() const {
  if (iterations < 1)
    fail(ErrorCode::invalid_argument, "iterations must be >= 1");
  if (!(swap_probability >= 0.0 && swap_probability <= 1.0))
    fail(ErrorCode::invalid_argument, "swap_probability must be in [0,1]");
  if (max_model_size && *max_model_size < 0)
    fail(ErrorCode::invalid_argument, "max_model_size must be >= 0");
}

ModelScorer::ModelScorer(const RegressionData& data) {
  data.validate();
  gram_ = Matrix(data.p(), data.p());
  gram_.setZero();
  // lower triangle only; extraction below always reads row >= col
  gram_.selfadjointView<Eigen::Lower>().rankUpdate(data.X.transpose());
  xty_ = data.X.transpose() * data.y;
  inv_two_sigma_sq_ = 1.0 / (2.0 * data.sigma * data.sigma);
}

std::optional<double> ModelScorer::fitted_half(const ModelSet& model) const {
  const int k = model.size();
  if (k == 0) return 0.0;
  if (k > gram_.rows()) return std::nullopt;
  const auto& idx = model.indices();
  Matrix G(k, k);
  Vector g(k);
  for (int a = 0; a < k; ++a) {
    g[a] = xty_[idx[a]];
    for (int c = 0; c <= a; ++c) G(a, c) = gram_(idx[a], idx[c]);
  }
  // Left-looking Cholesky with a relative pivot tolerance; a failed pivot
  // marks the model rank deficient.
  double max_diag = 0.0;
  for (int a = 0; a < k; ++a) max_diag = std::max(max_diag, G(a, a));
  const double tol = 1e-12 * std::max(max_diag, 1e-300);
  Matrix L = Matrix::Zero(k, k);
  for (int c = 0; c < k; ++c) {
    double d = G(c, c);
    for (int a = 0; a < c; ++a) d -= L(c, a) * L(c, a);
    if (!(d > tol)) return std::nullopt;
    L(c, c) = std::sqrt(d);
    for (int r = c + 1; r < k; ++r) {
      double v = G(r, c);
      for (int a = 0; a < c; ++a) v -= L(r, a) * L(c, a);
      L(r, c) = v / L(c, c);
    }
  }
  // fitted = g' (G)^{-1} g = ||L^{-1} g||^2
  Vector z = L.triangularView<Eigen::Lower>().solve(g);
  return z.squaredNorm() * inv_two_sigma_sq_;
}

namespace {

double binomial_total(int p, int cap) {
  // sum_{k<=cap} C(p,k), saturating
  double total = 0.0;
  double term = 1.0;
  for (int k = 0; k <= cap; ++k) {
    total += term;
    if (total > 1e18) return 1e18;
    term *= static_cast<double>(p - k) / static_cast<double>(k + 1);
  }
  return total;
}

void enumerate_subsets(int p, int cap, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> comb;
  visit(comb);  // empty model
  for (int k = 1; k <= cap; ++k) {
    comb.resize(k);
    for (int i = 0; i < k; ++i) comb[i] = i;
    while (true) {
      visit(comb);
      int i = k - 1;
      while (i >= 0 && comb[i] == p - k + i) --i;
      if (i < 0) break;
      ++comb[i];
      for (int r = i + 1; r < k; ++r) comb[r] = comb[r - 1] + 1;
    }
  }
}

}  // namespace

std::pair<ModelSet, ModelLedger> enumerate_select_fn(
    const RegressionData& data, const PenaltyFn& penalty,
    const EnumerateOptions& options) {
  const int p = static_cast<int>(data.p());
  if (p > options.p_limit)
    fail(ErrorCode::too_large, "p exceeds the enumeration limit");
  const int cap = options.max_model_size ? std::min(*options.max_model_size, p) : p;
  if (binomial_total(p, cap) > static_cast<double>(options.budget))
    fail(ErrorCode::too_large, "enumeration exceeds the model-count budget");

  ModelScorer scorer(data);
  ModelLedger ledger;
  enumerate_subsets(p, cap, [&](const std::vector<int>& comb) {
    ModelSet m = ModelSet::of(comb, p);
    const auto fh = scorer.fitted_half(m);
    if (!fh) return;  // rank deficient: not in the candidate set
    ledger.insert(m, *fh, *fh - penalty(m));
  });
  return {ledger.best_model(), ledger};
}

std::pair<ModelSet, ModelLedger> enumerate_select(
    const RegressionData& data, const BlockPartition& partition,
    const PenaltySpec& pen, const EnumerateOptions& options) {
  if (partition.p() != data.p())
    fail(ErrorCode::dimension_mismatch, "partition size does not match design");
  return enumerate_select_fn(data, linear_penalty(partition, pen), options);
}

std::pair<ModelSet, ModelLedger> mcmc_search_fn(const RegressionData& data,
                                                const PenaltyFn& penalty,
                                                const SearchConfig& cfg) {
  cfg.validate();
  const int p = static_cast<int>(data.p());
  ModelScorer scorer(data);
  ModelLedger ledger;
  Rng rng(cfg.seed);

  ModelSet current;
  switch (cfg.init) {
    case SearchConfig::Init::empty: current = ModelSet::empty(); break;
    case SearchConfig::Init::full: current = ModelSet::full(p); break;
    case SearchConfig::Init::given: current = cfg.init_model; break;
  }
  auto fh0 = scorer.fitted_half(current);
  if (!fh0)
    fail(ErrorCode::rank_deficient, "initial model is rank deficient");
  double current_score = *fh0 - penalty(current);
  ledger.insert(current, *fh0, current_score);

  std::vector<char> member(p, 0);
  for (int i : current.indices()) member[i] = 1;
  int size = current.size();

  for (std::int64_t t = 0; t < cfg.iterations; ++t) {
    ModelSet proposal;
    const bool want_swap = rng.uniform() < cfg.swap_probability;
    if (want_swap && size >= 1 && size <= p - 1) {
      const int pos_in = static_cast<int>(rng.uniform_index(size));
      const int pos_out = static_cast<int>(rng.uniform_index(p - size));
      const int drop = current.indices()[pos_in];
      int add = -1, seen = 0;
      for (int i = 0; i < p; ++i) {
        if (!member[i] && seen++ == pos_out) {
          add = i;
          break;
        }
      }
      proposal = current.without(drop).with(add);
    } else if (want_swap) {
      continue;  // swap impossible from an empty/full state: hold
    } else {
      const int i = static_cast<int>(rng.uniform_index(p));
      proposal = member[i] ? current.without(i) : current.with(i);
    }
    if (cfg.max_model_size && proposal.size() > *cfg.max_model_size) continue;

    const auto fh = scorer.fitted_half(proposal);
    if (!fh) continue;  // rank-deficient proposal: auto-reject
    const double proposal_score = *fh - penalty(proposal);

    // The ledger records the models the chain visits (its accepted states):
    // an uphill move is always accepted, so the best evaluated model is
    // always visited.
    const double diff = proposal_score - current_score;
    if (diff >= 0.0 || rng.uniform() < std::exp(diff)) {
      for (int i : current.indices()) member[i] = 0;
      current = std::move(proposal);
      for (int i : current.indices()) member[i] = 1;
      size = current.size();
      current_score = proposal_score;
      ledger.insert(current, *fh, current_score);
    }
  }
  return {ledger.best_model(), ledger};
}

std::pair<ModelSet, ModelLedger> mcmc_search(const RegressionData& data,
                                             const BlockPartition& partition,
                                             const PenaltySpec& pen,
                                             const SearchConfig& cfg) {
  if (partition.p() != data.p())
    fail(ErrorCode::dimension_mismatch, "partition size does not match design");
  return mcmc_search_fn(data, linear_penalty(partition, pen), cfg);
}

InclusionProbs inclusion_probabilities(const ModelLedger& ledger,
                                       const BlockPartition& partition) {
  if (ledger.empty()) fail(ErrorCode::empty_collection, "ledger is empty");
  const auto rows = ledger.rows();
  double cmax = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows) cmax = std::max(cmax, r.score);
  double denom = 0.0;
  for (const auto& r : rows) denom += std::exp(r.score - cmax);

  InclusionProbs out;
  out.per_variable.assign(partition.p(), 0.0);
  out.shat.assign(partition.blocks(), 0.0);
  for (const auto& r : rows) {
    const double nc = std::exp(r.score - cmax) / denom;
    for (int i : r.model.indices()) {
      if (i >= partition.p())
        fail(ErrorCode::dimension_mismatch, "ledger model beyond partition");
      out.per_variable[i] += nc;
    }
  }
  for (int i = 0; i < partition.p(); ++i) {
    out.per_variable[i] = std::min(out.per_variable[i], 1.0);
    out.shat[partition.block_of(i)] += out.per_variable[i];
  }
  return out;
}

}  // namespace blocksel
