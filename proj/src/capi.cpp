#include "blocksel.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include <json.hpp>

#include "blocksel/diagnostics.hpp"
#include "blocksel/ebayes.hpp"
#include "blocksel/io.hpp"
#include "blocksel/search.hpp"
#include "blocksel/seqmodel.hpp"
#include "blocksel/simharness.hpp"
#include "blocksel/types.hpp"
#include "blocksel/version.hpp"

using nlohmann::json;

struct bsel_dataset {
  blocksel::RegressionData data;
};

struct bsel_partition {
  blocksel::BlockPartition partition;
};

namespace {

thread_local std::string g_last_error;

bsel_status map_code(blocksel::ErrorCode code) {
  using EC = blocksel::ErrorCode;
  switch (code) {
    case EC::invalid_argument: return BSEL_ERR_INVALID_ARGUMENT;
    case EC::dimension_mismatch: return BSEL_ERR_DIMENSION;
    case EC::rank_deficient: return BSEL_ERR_RANK_DEFICIENT;
    case EC::not_nested: return BSEL_ERR_NOT_NESTED;
    case EC::empty_collection: return BSEL_ERR_EMPTY;
    case EC::degenerate_block:
    case EC::degenerate_direction: return BSEL_ERR_DEGENERATE;
    case EC::infeasible_n: return BSEL_ERR_INFEASIBLE;
    case EC::too_large: return BSEL_ERR_TOO_LARGE;
    case EC::out_of_range: return BSEL_ERR_OUT_OF_RANGE;
    case EC::parse_error: return BSEL_ERR_PARSE;
    case EC::io_error: return BSEL_ERR_IO;
    case EC::internal: return BSEL_ERR_INTERNAL;
  }
  return BSEL_ERR_INTERNAL;
}

template <typename Fn>
bsel_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return BSEL_OK;
  } catch (const blocksel::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return BSEL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BSEL_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(::operator new(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) blocksel::fail(blocksel::ErrorCode::invalid_argument, what);
}

json model_to_json(const blocksel::ModelSet& m) {
  json out = json::array();
  for (int i : m.indices()) out.push_back(i + 1);
  return out;
}

json parse_options(const char* options_json) {
  if (options_json == nullptr || options_json[0] == '\0')
    return json::object();
  try {
    json j = json::parse(options_json);
    if (!j.is_object())
      blocksel::fail(blocksel::ErrorCode::parse_error,
                     "options must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    blocksel::fail(blocksel::ErrorCode::parse_error,
                   std::string("options JSON: ") + e.what());
  }
}

}  // namespace

extern "C" {

const char* bsel_version(void) { return BLOCKSEL_VERSION; }

const char* bsel_status_name(bsel_status status) {
  switch (status) {
    case BSEL_OK: return "ok";
    case BSEL_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case BSEL_ERR_DIMENSION: return "dimension-mismatch";
    case BSEL_ERR_RANK_DEFICIENT: return "rank-deficient";
    case BSEL_ERR_NOT_NESTED: return "not-nested";
    case BSEL_ERR_EMPTY: return "empty-collection";
    case BSEL_ERR_DEGENERATE: return "degenerate";
    case BSEL_ERR_INFEASIBLE: return "infeasible";
    case BSEL_ERR_TOO_LARGE: return "too-large";
    case BSEL_ERR_OUT_OF_RANGE: return "out-of-range";
    case BSEL_ERR_PARSE: return "parse-error";
    case BSEL_ERR_IO: return "io-error";
    case BSEL_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* bsel_last_error(void) { return g_last_error.c_str(); }

void bsel_string_free(char* s) { ::operator delete(s); }

bsel_status bsel_dataset_create(const double* x, int64_t n, int64_t p,
                                const double* y, double sigma,
                                bsel_dataset** out) {
  return guarded([&] {
    require(x && y && out, "null pointer argument");
    require(n >= 1 && p >= 1, "n and p must be >= 1");
    auto ds = std::make_unique<bsel_dataset>();
    ds->data.X.resize(n, p);
    for (int64_t r = 0; r < n; ++r)
      for (int64_t c = 0; c < p; ++c) ds->data.X(r, c) = x[r * p + c];
    ds->data.y = Eigen::Map<const blocksel::Vector>(y, n);
    ds->data.sigma = sigma;
    ds->data.validate();
    *out = ds.release();
  });
}

bsel_status bsel_dataset_load_csv(const char* design_path,
                                  const char* response_path, double sigma,
                                  bsel_dataset** out) {
  return guarded([&] {
    require(design_path && response_path && out, "null pointer argument");
    auto ds = std::make_unique<bsel_dataset>();
    ds->data.X = blocksel::read_csv_matrix(design_path);
    ds->data.y = blocksel::read_csv_vector(response_path);
    ds->data.sigma = sigma;
    ds->data.validate();
    *out = ds.release();
  });
}

void bsel_dataset_free(bsel_dataset* ds) { delete ds; }

int64_t bsel_dataset_rows(const bsel_dataset* ds) {
  return ds ? ds->data.n() : 0;
}

int64_t bsel_dataset_cols(const bsel_dataset* ds) {
  return ds ? ds->data.p() : 0;
}

bsel_status bsel_partition_create(const int32_t* labels, int64_t p,
                                  bsel_partition** out) {
  return guarded([&] {
    require(labels && out, "null pointer argument");
    require(p >= 1, "p must be >= 1");
    std::vector<int> v(labels, labels + p);
    auto pt = std::make_unique<bsel_partition>();
    pt->partition = blocksel::BlockPartition::from_labels(v);
    *out = pt.release();
  });
}

bsel_status bsel_partition_load_csv(const char* path, bsel_partition** out) {
  return guarded([&] {
    require(path && out, "null pointer argument");
    auto pt = std::make_unique<bsel_partition>();
    pt->partition =
        blocksel::BlockPartition::from_labels(blocksel::read_csv_ints(path));
    *out = pt.release();
  });
}

void bsel_partition_free(bsel_partition* pt) { delete pt; }

int32_t bsel_partition_blocks(const bsel_partition* pt) {
  return pt ? pt->partition.blocks() : 0;
}

int64_t bsel_partition_size(const bsel_partition* pt) {
  return pt ? pt->partition.p() : 0;
}

bsel_status bsel_select(const bsel_dataset* ds, const bsel_partition* pt,
                        const char* options_json, char** result_json,
                        char** ledger_csv) {
  return guarded([&] {
    require(ds && pt && result_json, "null pointer argument");
    const json opts = parse_options(options_json);
    const std::string variant = opts.value("variant", "eb");

    blocksel::AlgoConfig cfg;
    cfg.search.iterations = opts.value("iterations", int64_t{10000});
    cfg.search.seed = opts.value("seed", blocksel::kDefaultSeed);
    cfg.search.swap_probability = opts.value("swap_probability", 0.5);
    cfg.p_limit = opts.value("p_limit", 12);
    cfg.step2_fresh_search = opts.value("step2_fresh_search", false);

    json out;
    out["version"] = BLOCKSEL_VERSION;
    out["rng"] = blocksel::kRngId;
    out["seed"] = cfg.search.seed;
    out["n"] = ds->data.n();
    out["p"] = ds->data.p();
    out["variant"] = variant;

    const blocksel::ModelLedger* ledger = nullptr;
    blocksel::EBResult eb;
    std::pair<blocksel::ModelSet, blocksel::ModelLedger> ebic_out;
    if (variant == "ebic") {
      const double zeta = opts.value("zeta", 1.0);
      ebic_out = blocksel::ebic_select(ds->data, cfg, zeta);
      out["zeta"] = zeta;
      out["selected"] = model_to_json(ebic_out.first);
      out["ledger_size"] = ebic_out.second.size();
      ledger = &ebic_out.second;
    } else {
      blocksel::SelectorVariant v;
      if (variant == "eb") {
        v = blocksel::SelectorVariant::EB;
      } else if (variant == "a") {
        v = blocksel::SelectorVariant::A;
      } else if (variant == "eb-pooled") {
        v = blocksel::SelectorVariant::EB_pooled;
      } else if (variant == "a-pooled") {
        v = blocksel::SelectorVariant::A_pooled;
      } else {
        blocksel::fail(blocksel::ErrorCode::invalid_argument,
                       "unknown variant: " + variant);
      }
      eb = blocksel::algorithm1(ds->data, pt->partition, cfg, v);
      out["selected"] = model_to_json(eb.selected);
      out["selected_score"] = eb.selected_score;
      out["kappa_step1"] = eb.step1_penalties.kappas;
      out["kappa_step2"] = eb.penalties_used.kappas;
      out["shat"] = eb.step1_inclusion.shat;
      out["shat_used"] = eb.shat_used;
      out["ledger_size"] = eb.step1_ledger.size();
      {
        const auto top = eb.step1_ledger.rows_by_score();
        json best = json::array();
        for (std::size_t k = 0; k < top.size() && k < 5; ++k)
          best.push_back({{"model", model_to_json(top[k].model)},
                          {"C", top[k].score}});
        out["step1_top_models"] = best;
      }
      ledger = &eb.step1_ledger;
    }
    if (ledger_csv) *ledger_csv = dup_string(ledger->to_csv());
    *result_json = dup_string(out.dump(2));
  });
}

bsel_status bsel_sequence_select(const double* y, int64_t p, double n,
                                 const bsel_partition* pt, const double* taus,
                                 const double* kappas, char** result_json) {
  return guarded([&] {
    require(y && pt && result_json, "null pointer argument");
    require((taus == nullptr) != (kappas == nullptr),
            "pass exactly one of taus/kappas");
    require(p == pt->partition.p(), "y length must match the partition");
    require(n >= 1, "n must be >= 1");
    const int b = pt->partition.blocks();
    blocksel::ThresholdSpec thr;
    if (taus) {
      thr.taus.assign(taus, taus + b);
    } else {
      blocksel::PenaltySpec pen;
      pen.kappas.assign(kappas, kappas + b);
      thr = blocksel::penalty_to_threshold(pen, n);
    }
    auto seq = blocksel::SequenceData::from_observations(
        Eigen::Map<const blocksel::Vector>(y, p), static_cast<long>(n));
    const auto selected = blocksel::threshold_select(seq, pt->partition, thr);
    json out;
    out["version"] = BLOCKSEL_VERSION;
    out["n"] = n;
    out["p"] = p;
    out["taus"] = thr.taus;
    out["selected"] = model_to_json(selected);
    *result_json = dup_string(out.dump(2));
  });
}

bsel_status bsel_diagnose(const bsel_dataset* ds, const bsel_partition* pt,
                          const int32_t* support, int64_t support_len,
                          const char* options_json, char** result_json,
                          char** table_text) {
  return guarded([&] {
    require(ds && pt && support && result_json, "null pointer argument");
    const json opts = parse_options(options_json);
    const long p = ds->data.p();
    std::vector<int> sidx;
    for (int64_t k = 0; k < support_len; ++k) sidx.push_back(support[k] - 1);
    const auto S = blocksel::ModelSet::of(sidx, static_cast<int>(p));
    if (S.is_empty())
      blocksel::fail(blocksel::ErrorCode::invalid_argument,
                     "support must be non-empty");

    std::string strategy = opts.value("rho_strategy", "auto");
    const int64_t budget = opts.value("rho_budget", int64_t{1} << 20);
    blocksel::RhoResult rho;
    if (strategy == "auto") {
      const double exact_count =
          std::ldexp(1.0, static_cast<int>(std::min<long>(p, 1023))) -
          std::ldexp(1.0, static_cast<int>(std::min<long>(p - S.size(), 1023)));
      strategy = (p <= 62 && exact_count <= static_cast<double>(budget))
                     ? "exact"
                     : "restricted";
    }
    if (strategy == "exact") {
      rho = blocksel::rho_X(ds->data, S, blocksel::RhoStrategy::exact, budget);
    } else if (strategy == "restricted") {
      rho = blocksel::rho_X(ds->data, S, blocksel::RhoStrategy::restricted,
                            budget);
    } else {
      blocksel::fail(blocksel::ErrorCode::invalid_argument,
                     "rho_strategy must be exact, restricted or auto");
    }

    const double lbar = blocksel::lambda_bar(ds->data, S);
    const auto lund = blocksel::lambda_underline(ds->data, S, pt->partition);

    // Assumption margins need a block configuration.
    const int b = pt->partition.blocks();
    const auto counts = S.block_counts(pt->partition);
    blocksel::BlockConfig cfg;
    cfg.n = ds->data.n();
    std::vector<double> beta_min =
        opts.value("beta_min", std::vector<double>{});
    for (int j = 0; j < b; ++j) {
      blocksel::BlockCounts blk;
      blk.active = counts[j];
      blk.inactive = pt->partition.block_size(j) - counts[j];
      blk.beta_min = beta_min.empty() ? 1.0 : beta_min.at(j);
      cfg.blocks.push_back(blk);
    }
    blocksel::PenaltySpec pen;
    if (opts.contains("kappa")) {
      pen.kappas = opts["kappa"].get<std::vector<double>>();
      pen.validate(pt->partition);
    } else {
      pen = blocksel::step1_penalty(static_cast<int>(p),
                                    static_cast<double>(ds->data.n()), b);
    }

    blocksel::DesignDiagnostics diag;
    diag.rho = rho.value;
    diag.rho_exact = rho.exact;
    diag.lambda_bar = lbar;
    for (const auto& lc : lund) diag.lambda_underline.push_back(lc.lambda_min);
    const auto report = blocksel::assumption_check(cfg, pen, diag);

    json out;
    out["version"] = BLOCKSEL_VERSION;
    out["rho"] = rho.value;
    out["rho_exact"] = rho.exact;
    out["rho_strategy"] = strategy;
    out["lambda_bar"] = lbar;
    json jl = json::array();
    for (const auto& lc : lund) {
      json e;
      e["lambda_min"] = lc.lambda_min;
      json ex = json::array();
      for (int i : lc.excluded) ex.push_back(i + 1);
      e["excluded"] = ex;
      jl.push_back(e);
    }
    out["lambda_underline"] = jl;
    out["gamma"] = report.gamma;
    out["gamma_valid"] = report.gamma_valid;
    out["kappa"] = pen.kappas;
    json jb = json::array();
    for (const auto& blk : report.blocks) {
      jb.push_back({{"f_margin", blk.f_margin},
                    {"a6_ok", blk.a6_ok},
                    {"g_margin", blk.g_margin},
                    {"a7_ok", blk.a7_ok},
                    {"nec_penalty_ratio", blk.nec_penalty_ratio},
                    {"nec_penalty_ok", blk.nec_penalty_ok},
                    {"nec_betamin_ratio", blk.nec_betamin_ratio},
                    {"nec_betamin_ok", blk.nec_betamin_ok}});
    }
    out["assumptions"] = jb;
    if (table_text) *table_text = dup_string(report.table());
    *result_json = dup_string(out.dump(2));
  });
}

bsel_status bsel_simulate(const char* scenario_json, int jobs, char** csv,
                          char** metadata_json) {
  return guarded([&] {
    require(scenario_json && csv, "null pointer argument");
    const auto scenario = blocksel::SimScenario::from_json(scenario_json);
    const auto result = blocksel::run_replicates(scenario, jobs);
    *csv = dup_string(result.csv_long());
    if (metadata_json) *metadata_json = dup_string(result.metadata_json());
  });
}

bsel_status bsel_scenario_normalize(const char* scenario_json,
                                    char** normalized_json) {
  return guarded([&] {
    require(scenario_json && normalized_json, "null pointer argument");
    const auto scenario = blocksel::SimScenario::from_json(scenario_json);
    *normalized_json = dup_string(scenario.to_json());
  });
}

bsel_status bsel_figure_curves(const char* which, const int64_t* n_grid,
                               int64_t grid_len, char** csv) {
  return guarded([&] {
    require(which && n_grid && csv, "null pointer argument");
    require(grid_len >= 1, "empty n grid");
    std::vector<long> grid(n_grid, n_grid + grid_len);
    const auto rows =
        blocksel::figure_curves(blocksel::figure_kind_parse(which), grid);
    *csv = dup_string(blocksel::figure_csv(rows));
  });
}

}  // extern "C"
