// Command-line front end. Talks to the library exclusively through the
// extern-C API in blocksel.h.
//
// Exit codes: 0 success, 2 malformed input, 3 infeasible configuration,
// 4 internal error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blocksel.h"

namespace {

constexpr std::uint64_t kDefaultSeed = 185640929;  // documented default

int exit_code_for(bsel_status st) {
  switch (st) {
    case BSEL_OK:
      return 0;
    case BSEL_ERR_INVALID_ARGUMENT:
    case BSEL_ERR_DIMENSION:
    case BSEL_ERR_EMPTY:
    case BSEL_ERR_OUT_OF_RANGE:
    case BSEL_ERR_PARSE:
    case BSEL_ERR_IO:
      return 2;
    case BSEL_ERR_RANK_DEFICIENT:
    case BSEL_ERR_NOT_NESTED:
    case BSEL_ERR_DEGENERATE:
    case BSEL_ERR_INFEASIBLE:
    case BSEL_ERR_TOO_LARGE:
      return 3;
    default:
      return 4;
  }
}

[[noreturn]] void die(bsel_status st) {
  std::cerr << "error (" << bsel_status_name(st) << "): " << bsel_last_error()
            << "\n";
  std::exit(exit_code_for(st));
}

void check(bsel_status st) {
  if (st != BSEL_OK) die(st);
}

struct StringOut {
  char* s = nullptr;
  ~StringOut() { bsel_string_free(s); }
  std::string str() const { return s ? std::string(s) : std::string(); }
};

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << out_path << "\n";
    std::exit(2);
  }
  out << content;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    std::exit(2);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      std::cerr << "error: expected a number, got '" << cell << "'\n";
      std::exit(2);
    }
  }
  return out;
}

std::vector<std::int64_t> parse_longs(const std::string& text) {
  std::vector<std::int64_t> out;
  for (double v : parse_doubles(text)) out.push_back(static_cast<std::int64_t>(v));
  return out;
}

// Whitespace/comma separated numbers, e.g. a response vector or an index list.
std::vector<double> read_number_file(const std::string& path) {
  const std::string text = slurp(path);
  std::vector<double> out;
  std::string cell;
  auto flush = [&]() {
    if (cell.empty()) return;
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      std::cerr << "error: " << path << ": expected a number, got '" << cell
                << "'\n";
      std::exit(2);
    }
    cell.clear();
  };
  for (char c : text) {
    if (c == ',' || c == '\n' || c == '\r' || c == ' ' || c == '\t')
      flush();
    else
      cell.push_back(c);
  }
  flush();
  if (out.empty()) {
    std::cerr << "error: " << path << ": no values\n";
    std::exit(2);
  }
  return out;
}

using DatasetPtr = std::unique_ptr<bsel_dataset, decltype(&bsel_dataset_free)>;
using PartitionPtr =
    std::unique_ptr<bsel_partition, decltype(&bsel_partition_free)>;

DatasetPtr load_dataset(const std::string& design, const std::string& response,
                        double sigma) {
  bsel_dataset* ds = nullptr;
  check(bsel_dataset_load_csv(design.c_str(), response.c_str(), sigma, &ds));
  return DatasetPtr(ds, &bsel_dataset_free);
}

PartitionPtr load_partition(const std::string& path) {
  bsel_partition* pt = nullptr;
  check(bsel_partition_load_csv(path.c_str(), &pt));
  return PartitionPtr(pt, &bsel_partition_free);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"block-penalized variable selection"};
  app.set_version_flag("--version", std::string(bsel_version()));
  app.require_subcommand(1);

  // ---- select ----------------------------------------------------------
  auto* select = app.add_subcommand(
      "select", "two-step block selection on a regression dataset");
  std::string design, response, partition, out_path, ledger_out;
  std::string variant = "eb";
  double zeta = 1.0, sigma = 1.0, swap_probability = 0.5;
  std::int64_t iterations = 10000;
  std::uint64_t seed = kDefaultSeed;
  int p_limit = 12;
  bool step2_fresh = false;
  select->add_option("--design", design, "design matrix CSV (n x p, no header)")
      ->required();
  select->add_option("--response", response, "response vector CSV")->required();
  select->add_option("--partition", partition,
                     "block label per variable (1..b)")
      ->required();
  select->add_option("--variant", variant,
                     "eb | a | eb-pooled | a-pooled | ebic");
  select->add_option("--zeta", zeta, "EBIC penalty strength");
  select->add_option("--sigma", sigma, "noise standard deviation");
  select->add_option("--iterations", iterations, "MCMC iterations");
  select->add_option("--seed", seed, "RNG seed");
  select->add_option("--p-limit", p_limit, "exhaustive enumeration cutoff");
  select->add_option("--swap-probability", swap_probability,
                     "MCMC swap-move probability");
  select->add_flag("--step2-fresh-search", step2_fresh,
                   "re-run the chain at step-2 penalties");
  select->add_option("--out", out_path, "result JSON path (default stdout)");
  select->add_option("--ledger-out", ledger_out,
                     "visited-model CSV (model,C,NC)");

  // ---- sequence ---------------------------------------------------------
  auto* sequence = app.add_subcommand(
      "sequence", "block thresholding in the Gaussian sequence model");
  std::string seq_y, seq_tau, seq_kappa;
  double seq_n = 0;
  sequence->add_option("--y", seq_y, "observation vector CSV")->required();
  sequence->add_option("--n", seq_n, "scale n of the sequence model")
      ->required();
  sequence->add_option("--partition", partition, "block label per variable")
      ->required();
  sequence->add_option("--tau", seq_tau, "per-block thresholds, comma separated");
  sequence->add_option("--kappa", seq_kappa,
                       "per-block penalties (converted to thresholds)");
  sequence->add_option("--out", out_path, "result JSON path (default stdout)");

  // ---- simulate ----------------------------------------------------------
  auto* simulate =
      app.add_subcommand("simulate", "Monte Carlo scenario replication");
  std::string scenario_path, metadata_out, emit_config;
  int jobs = 0;
  simulate->add_option("--scenario", scenario_path, "scenario JSON file")
      ->required();
  simulate->add_option("--jobs", jobs, "worker threads (0 = all cores)");
  simulate->add_option("--out", out_path, "results CSV path (default stdout)");
  simulate->add_option("--metadata-out", metadata_out,
                       "metadata JSON (seeds, realized counts)");
  simulate->add_option(
      "--emit-config", emit_config,
      "write the resolved scenario JSON and exit without running");

  // ---- diagnose ----------------------------------------------------------
  auto* diagnose = app.add_subcommand(
      "diagnose", "design diagnostics (rho, lambdas, assumption margins)");
  std::string support_path, kappa_list, beta_min_list;
  std::string rho_strategy = "auto";
  std::int64_t rho_budget = std::int64_t{1} << 20;
  diagnose->add_option("--design", design, "design matrix CSV")->required();
  diagnose->add_option("--response", response, "response vector CSV")
      ->required();
  diagnose->add_option("--partition", partition, "block label per variable")
      ->required();
  diagnose
      ->add_option("--support", support_path,
                   "CSV of 1-based active indices (the reference model S)")
      ->required();
  diagnose->add_option("--sigma", sigma, "noise standard deviation");
  diagnose->add_option("--kappa", kappa_list,
                       "per-block penalties for the assumption table");
  diagnose->add_option("--beta-min", beta_min_list,
                       "per-block smallest-signal values");
  diagnose->add_option("--rho-strategy", rho_strategy,
                       "exact | restricted | auto");
  diagnose->add_option("--rho-budget", rho_budget,
                       "model budget for exact enumeration");
  diagnose->add_option("--out", out_path, "report JSON path (default stdout)");

  // ---- figures -------------------------------------------------------------
  auto* figures = app.add_subcommand(
      "figures", "deterministic curves (threshold ranges, ratio curves)");
  std::string which = "fig2-left", n_grid = "20,50,100,200,400,700";
  figures->add_option("--which", which, "fig1 | fig2-left | fig2-right");
  figures->add_option("--n-grid", n_grid, "comma-separated n values");
  figures->add_option("--out", out_path, "CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  if (*select) {
    auto ds = load_dataset(design, response, sigma);
    auto pt = load_partition(partition);
    std::ostringstream opts;
    opts << "{\"variant\":\"" << variant << "\",\"zeta\":" << zeta
         << ",\"iterations\":" << iterations << ",\"seed\":" << seed
         << ",\"p_limit\":" << p_limit
         << ",\"swap_probability\":" << swap_probability
         << ",\"step2_fresh_search\":" << (step2_fresh ? "true" : "false")
         << "}";
    StringOut result, ledger;
    check(bsel_select(ds.get(), pt.get(), opts.str().c_str(), &result.s,
                      ledger_out.empty() ? nullptr : &ledger.s));
    if (!ledger_out.empty()) emit(ledger.str(), ledger_out);
    emit(result.str(), out_path);
    return 0;
  }

  if (*sequence) {
    auto pt = load_partition(partition);
    const auto y = read_number_file(seq_y);
    if (seq_tau.empty() == seq_kappa.empty()) {
      std::cerr << "error: pass exactly one of --tau / --kappa\n";
      return 2;
    }
    const auto vals = parse_doubles(seq_tau.empty() ? seq_kappa : seq_tau);
    if (static_cast<int>(vals.size()) != bsel_partition_blocks(pt.get())) {
      std::cerr << "error: need one value per block ("
                << bsel_partition_blocks(pt.get()) << ")\n";
      return 2;
    }
    StringOut result;
    check(bsel_sequence_select(
        y.data(), static_cast<std::int64_t>(y.size()), seq_n, pt.get(),
        seq_tau.empty() ? nullptr : vals.data(),
        seq_tau.empty() ? vals.data() : nullptr, &result.s));
    emit(result.str(), out_path);
    return 0;
  }

  if (*simulate) {
    const std::string scenario = slurp(scenario_path);
    if (!emit_config.empty()) {
      StringOut normalized;
      check(bsel_scenario_normalize(scenario.c_str(), &normalized.s));
      emit(normalized.str(), emit_config);
      return 0;
    }
    StringOut csv, meta;
    check(bsel_simulate(scenario.c_str(), jobs, &csv.s, &meta.s));
    if (!metadata_out.empty()) emit(meta.str(), metadata_out);
    emit(csv.str(), out_path);
    return 0;
  }

  if (*diagnose) {
    auto ds = load_dataset(design, response, sigma);
    auto pt = load_partition(partition);
    std::vector<std::int32_t> support;
    for (double v : read_number_file(support_path))
      support.push_back(static_cast<std::int32_t>(v));
    std::ostringstream opts;
    opts << "{\"rho_strategy\":\"" << rho_strategy
         << "\",\"rho_budget\":" << rho_budget;
    auto append_list = [&](const char* key, const std::string& text) {
      if (text.empty()) return;
      opts << ",\"" << key << "\":[";
      const auto vals = parse_doubles(text);
      for (std::size_t i = 0; i < vals.size(); ++i)
        opts << (i ? "," : "") << vals[i];
      opts << "]";
    };
    append_list("kappa", kappa_list);
    append_list("beta_min", beta_min_list);
    opts << "}";
    StringOut result, table;
    check(bsel_diagnose(ds.get(), pt.get(), support.data(),
                        static_cast<std::int64_t>(support.size()),
                        opts.str().c_str(), &result.s, &table.s));
    std::cerr << table.str();  // readable table to the terminal
    emit(result.str(), out_path);
    return 0;
  }

  if (*figures) {
    const auto grid = parse_longs(n_grid);
    StringOut csv;
    check(bsel_figure_curves(which.c_str(), grid.data(),
                             static_cast<std::int64_t>(grid.size()), &csv.s));
    emit(csv.str(), out_path);
    return 0;
  }

  return 0;
}
