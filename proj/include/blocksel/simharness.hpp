#ifndef BLOCKSEL_SIMHARNESS_HPP
#define BLOCKSEL_SIMHARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "blocksel/ebayes.hpp"
#include "blocksel/rng.hpp"
#include "blocksel/seqmodel.hpp"
#include "blocksel/types.hpp"

namespace blocksel {

inline constexpr std::uint64_t kDefaultSeed = 185640929;  // 0xB10C5E1

struct SelectorSpec {
  enum class Kind { EB_b, A_b, EB_pooled, A_pooled, EBIC };
  Kind kind = Kind::EB_b;
  double zeta = 1.0;  // EBIC only

  std::string id() const;
  static SelectorSpec parse(const std::string& text);
  static std::vector<SelectorSpec> all();
};

/// One generative configuration of the numerical experiments.
struct SimScenario {
  std::string name;  // defaults to "example<em>_n<n>"
  int example_id = 1;
  long n = 100;
  std::vector<double> beta_min;  // per block; empty uses the example defaults
  std::string signal_law = "uniform(1,3)";
  double design_corr = 0.5;
  double sigma = 1.0;
  int replicates = 100;
  std::uint64_t seed = kDefaultSeed;
  std::vector<SelectorSpec> selectors;  // empty means all five
  long iterations = 10000;
  int p_limit = 12;
  double swap_probability = 0.5;
  bool step2_fresh_search = false;

  void validate() const;
  /// Fully-resolved scenario (defaults materialized); re-running it is
  /// bit-identical to running the original.
  std::string to_json() const;
  static SimScenario from_json(const std::string& text);
};

struct SelectorSummary {
  std::string id;
  double freq_correct = 0.0;
  double mean_symdiff = 0.0;
  std::vector<double> mean_shat;  // per block, pooled selectors report one
  int failures = 0;
};

struct SimResult {
  SimScenario scenario;
  BlockConfig config;  // realized integer counts
  long p = 0;
  long s = 0;
  std::vector<SelectorSummary> selectors;
  int completed = 0;
  double elapsed_seconds = 0.0;

  /// Long format: scenario,n,selector,metric,value.
  std::string csv_long() const;
  std::string metadata_json() const;
};

/// Rows i.i.d. N(0, (1-corr) I + corr 11'), by the equicorrelated
/// factorization sqrt(1-corr) z + sqrt(corr) w 1.
Matrix gen_design(long n, long p, double corr, Rng& rng);

struct Truth {
  Vector beta;
  ModelSet support;
  BlockPartition partition;
  BlockConfig config;
};

/// Active positions drawn uniformly within each block; one position per block
/// carries beta_min_j, the rest are U[1,3]; signs all positive.
Truth gen_truth(const SimScenario& scenario, Rng& rng);

/// Runs the scenario's replicates (concurrently when jobs != 1) with
/// pre-split RNG streams, so the result is independent of scheduling.
/// Per-replicate failures are recorded and skipped; throws only when more
/// than 10% of replicates fail.
SimResult run_replicates(const SimScenario& scenario, int jobs = 0);

enum class FigureKind { fig1, fig2_left, fig2_right };

FigureKind figure_kind_parse(const std::string& text);

struct FigureRow {
  int example = 0;
  long n = 0;
  std::string series;
  double value = 0.0;
  bool flag = false;  // empty interval, or infeasible configuration
};

/// Deterministic curves behind the paper-style figures. Counts too large to
/// materialize are handled through their exact logarithms, so example 2 can
/// be evaluated on any n grid.
std::vector<FigureRow> figure_curves(FigureKind kind,
                                     const std::vector<long>& n_grid);

/// CSV with header example,n,series,value,empty_flag.
std::string figure_csv(const std::vector<FigureRow>& rows);

/// Rescales the thin-QR orthonormal factor so that X'X = n I exactly
/// (up to floating point); used to connect regression and sequence model.
Matrix orthonormalize_to_scale(const Matrix& X);

}  // namespace blocksel

#endif  // BLOCKSEL_SIMHARNESS_HPP
