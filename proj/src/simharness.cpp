#include "blocksel/simharness.hpp"

#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "blocksel/version.hpp"

namespace blocksel {

using nlohmann::json;

std::string SelectorSpec::id() const {
  switch (kind) {
    case Kind::EB_b: return "EB_b";
    case Kind::A_b: return "A_b";
    case Kind::EB_pooled: return "EB_pooled";
    case Kind::A_pooled: return "A_pooled";
    case Kind::EBIC: {
      std::ostringstream ss;
      ss << "EBIC(" << zeta << ")";
      return ss.str();
    }
  }
  return "?";
}

SelectorSpec SelectorSpec::parse(const std::string& text) {
  SelectorSpec out;
  if (text == "EB_b" || text == "eb") {
    out.kind = Kind::EB_b;
  } else if (text == "A_b" || text == "a") {
    out.kind = Kind::A_b;
  } else if (text == "EB_pooled" || text == "eb-pooled") {
    out.kind = Kind::EB_pooled;
  } else if (text == "A_pooled" || text == "a-pooled") {
    out.kind = Kind::A_pooled;
  } else if (text.rfind("EBIC", 0) == 0 || text == "ebic") {
    out.kind = Kind::EBIC;
    out.zeta = 1.0;
    const auto lp = text.find('(');
    if (lp != std::string::npos) {
      const auto rp = text.find(')', lp);
      if (rp == std::string::npos)
        fail(ErrorCode::parse_error, "unclosed EBIC zeta: " + text);
      try {
        out.zeta = std::stod(text.substr(lp + 1, rp - lp - 1));
      } catch (const std::exception&) {
        fail(ErrorCode::parse_error, "bad EBIC zeta in: " + text);
      }
    }
  } else {
    fail(ErrorCode::parse_error, "unknown selector: " + text);
  }
  return out;
}

std::vector<SelectorSpec> SelectorSpec::all() {
  std::vector<SelectorSpec> out;
  out.push_back({Kind::EB_b, 1.0});
  out.push_back({Kind::A_b, 1.0});
  out.push_back({Kind::EB_pooled, 1.0});
  out.push_back({Kind::A_pooled, 1.0});
  out.push_back({Kind::EBIC, 1.0});
  return out;
}

void SimScenario::validate() const {
  if (example_id < 1 || example_id > 5)
    fail(ErrorCode::invalid_argument, "example_id must be in 1..5");
  if (replicates < 1)
    fail(ErrorCode::invalid_argument, "replicates must be >= 1");
  if (!(design_corr >= 0.0 && design_corr < 1.0))
    fail(ErrorCode::invalid_argument, "design_corr must lie in [0,1)");
  if (!(sigma > 0.0))
    fail(ErrorCode::invalid_argument, "sigma must be positive");
  if (signal_law != "uniform(1,3)")
    fail(ErrorCode::invalid_argument,
         "unsupported signal_law (only uniform(1,3))");
  if (iterations < 1)
    fail(ErrorCode::invalid_argument, "iterations must be >= 1");
  for (double b : beta_min)
    if (!(b > 0.0 && b <= 1.0))
      fail(ErrorCode::invalid_argument,
           "beta_min entries must lie in (0,1] so they stay below the "
           "uniform(1,3) draws");
}

namespace {

SimScenario resolved(const SimScenario& in) {
  SimScenario sc = in;
  if (sc.beta_min.empty()) sc.beta_min = example_default_beta_min(sc.example_id);
  if (sc.selectors.empty()) sc.selectors = SelectorSpec::all();
  if (sc.name.empty()) {
    std::ostringstream ss;
    ss << "example" << sc.example_id << "_n" << sc.n;
    sc.name = ss.str();
  }
  sc.validate();
  return sc;
}

}  // namespace

std::string SimScenario::to_json() const {
  const SimScenario sc = resolved(*this);
  json j;
  j["name"] = sc.name;
  j["example_id"] = sc.example_id;
  j["n"] = sc.n;
  j["beta_min"] = sc.beta_min;
  j["signal_law"] = sc.signal_law;
  j["design_corr"] = sc.design_corr;
  j["sigma"] = sc.sigma;
  j["replicates"] = sc.replicates;
  j["seed"] = sc.seed;
  std::vector<std::string> ids;
  for (const auto& s : sc.selectors) ids.push_back(s.id());
  j["selectors"] = ids;
  j["iterations"] = sc.iterations;
  j["p_limit"] = sc.p_limit;
  j["swap_probability"] = sc.swap_probability;
  j["step2_fresh_search"] = sc.step2_fresh_search;
  return j.dump(2);
}

SimScenario SimScenario::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::parse_error, std::string("scenario JSON: ") + e.what());
  }
  SimScenario sc;
  try {
    if (j.contains("name")) sc.name = j["name"].get<std::string>();
    if (j.contains("example_id")) sc.example_id = j["example_id"].get<int>();
    if (j.contains("n")) sc.n = j["n"].get<long>();
    if (j.contains("beta_min"))
      sc.beta_min = j["beta_min"].get<std::vector<double>>();
    if (j.contains("signal_law"))
      sc.signal_law = j["signal_law"].get<std::string>();
    if (j.contains("design_corr")) sc.design_corr = j["design_corr"].get<double>();
    if (j.contains("sigma")) sc.sigma = j["sigma"].get<double>();
    if (j.contains("replicates")) sc.replicates = j["replicates"].get<int>();
    if (j.contains("seed")) sc.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("selectors")) {
      sc.selectors.clear();
      for (const auto& s : j["selectors"])
        sc.selectors.push_back(SelectorSpec::parse(s.get<std::string>()));
    }
    if (j.contains("iterations")) sc.iterations = j["iterations"].get<long>();
    if (j.contains("p_limit")) sc.p_limit = j["p_limit"].get<int>();
    if (j.contains("swap_probability"))
      sc.swap_probability = j["swap_probability"].get<double>();
    if (j.contains("step2_fresh_search"))
      sc.step2_fresh_search = j["step2_fresh_search"].get<bool>();
  } catch (const json::exception& e) {
    fail(ErrorCode::parse_error, std::string("scenario JSON: ") + e.what());
  }
  return resolved(sc);
}

Matrix gen_design(long n, long p, double corr, Rng& rng) {
  if (!(corr >= 0.0 && corr < 1.0))
    fail(ErrorCode::invalid_argument, "corr must lie in [0,1)");
  Matrix X(n, p);
  const double a = std::sqrt(1.0 - corr);
  const double c = std::sqrt(corr);
  for (long i = 0; i < n; ++i) {
    const double shared = c == 0.0 ? 0.0 : c * rng.normal();
    for (long k = 0; k < p; ++k) X(i, k) = a * rng.normal() + shared;
  }
  return X;
}

Truth gen_truth(const SimScenario& scenario, Rng& rng) {
  const SimScenario sc = resolved(scenario);
  Truth out;
  out.config = example_config(sc.example_id, sc.n, sc.beta_min);
  std::vector<int> sizes;
  long p = 0;
  for (const auto& blk : out.config.blocks) {
    const long pj = std::llround(blk.inactive + blk.active);
    sizes.push_back(static_cast<int>(pj));
    p += pj;
  }
  if (p > 2'000'000)
    fail(ErrorCode::infeasible_n, "scenario materializes too many variables");
  out.partition = BlockPartition::contiguous(sizes);
  out.beta = Vector::Zero(p);
  std::vector<int> active;
  int offset = 0;
  for (int j = 0; j < out.config.b(); ++j) {
    const int pj = sizes[j];
    const int sj = static_cast<int>(std::llround(out.config.blocks[j].active));
    std::vector<int> pool(pj);
    for (int k = 0; k < pj; ++k) pool[k] = offset + k;
    for (int k = 0; k < sj; ++k) {
      const int swap_with =
          k + static_cast<int>(rng.uniform_index(pj - k));
      std::swap(pool[k], pool[swap_with]);
    }
    // first drawn position carries the block minimum
    out.beta[pool[0]] = out.config.blocks[j].beta_min;
    active.push_back(pool[0]);
    for (int k = 1; k < sj; ++k) {
      out.beta[pool[k]] = rng.uniform(1.0, 3.0);
      active.push_back(pool[k]);
    }
    offset += pj;
  }
  out.support = ModelSet::of(active, static_cast<int>(p));
  return out;
}

namespace {

struct RepPerSelector {
  bool correct = false;
  int symdiff = 0;
  std::vector<double> shat;
};

struct RepOutcome {
  bool failed = false;
  std::string error;
  std::vector<RepPerSelector> sel;
};

RepOutcome run_one(const SimScenario& sc, int r) {
  RepOutcome out;
  try {
    Rng design_rng = Rng::substream(sc.seed, 6ull * r + 0);
    Rng truth_rng = Rng::substream(sc.seed, 6ull * r + 1);
    Rng noise_rng = Rng::substream(sc.seed, 6ull * r + 2);
    const std::uint64_t step1_seed = substream_seed(sc.seed, 6ull * r + 3);
    const std::uint64_t ebic_seed = substream_seed(sc.seed, 6ull * r + 4);

    Truth truth = gen_truth(sc, truth_rng);
    const long p = truth.partition.p();
    RegressionData data;
    data.X = gen_design(sc.n, p, sc.design_corr, design_rng);
    Vector noise(sc.n);
    for (long i = 0; i < sc.n; ++i) noise[i] = noise_rng.normal();
    data.y = data.X * truth.beta + sc.sigma * noise;
    data.sigma = sc.sigma;

    AlgoConfig acfg;
    acfg.search.iterations = sc.iterations;
    acfg.search.seed = step1_seed;
    acfg.search.swap_probability = sc.swap_probability;
    acfg.p_limit = sc.p_limit;
    acfg.step2_fresh_search = sc.step2_fresh_search;

    bool need_step1 = false;
    for (const auto& s : sc.selectors)
      if (s.kind != SelectorSpec::Kind::EBIC) need_step1 = true;
    Step1Result step1;
    if (need_step1) step1 = algorithm1_step1(data, truth.partition, acfg);

    for (const auto& s : sc.selectors) {
      RepPerSelector rp;
      ModelSet selected;
      if (s.kind == SelectorSpec::Kind::EBIC) {
        AlgoConfig ecfg = acfg;
        ecfg.search.seed = ebic_seed;
        selected = ebic_select(data, ecfg, s.zeta).first;
      } else {
        SelectorVariant v = SelectorVariant::EB;
        if (s.kind == SelectorSpec::Kind::A_b) v = SelectorVariant::A;
        if (s.kind == SelectorSpec::Kind::EB_pooled)
          v = SelectorVariant::EB_pooled;
        if (s.kind == SelectorSpec::Kind::A_pooled)
          v = SelectorVariant::A_pooled;
        auto sel = algorithm1_step2(truth.partition,
                                    static_cast<double>(sc.n), step1, v);
        selected = sel.selected;
        rp.shat = sel.shat_used;
      }
      rp.correct = selected == truth.support;
      rp.symdiff = selected.symmetric_difference_size(truth.support);
      out.sel.push_back(std::move(rp));
    }
  } catch (const std::exception& e) {
    out.failed = true;
    out.error = e.what();
  }
  return out;
}

}  // namespace

SimResult run_replicates(const SimScenario& scenario, int jobs) {
  const SimScenario sc = resolved(scenario);
  const auto t0 = std::chrono::steady_clock::now();

  SimResult result;
  result.scenario = sc;
  result.config = example_config(sc.example_id, sc.n, sc.beta_min);
  result.p = std::llround(result.config.p_total());
  result.s = std::llround(result.config.active_total());

  std::vector<RepOutcome> outcomes(sc.replicates);
  int nthreads = jobs > 0 ? jobs
                          : static_cast<int>(std::max(
                                1u, std::thread::hardware_concurrency()));
  nthreads = std::min<int>(nthreads, sc.replicates);
  if (nthreads <= 1) {
    for (int r = 0; r < sc.replicates; ++r) outcomes[r] = run_one(sc, r);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t]() {
        for (int r = t; r < sc.replicates; r += nthreads)
          outcomes[r] = run_one(sc, r);
      });
    }
    for (auto& th : pool) th.join();
  }

  int failed = 0;
  std::string first_error;
  for (const auto& o : outcomes)
    if (o.failed) {
      ++failed;
      if (first_error.empty()) first_error = o.error;
    }
  result.completed = sc.replicates - failed;
  if (failed * 10 > sc.replicates) {
    std::ostringstream ss;
    ss << failed << "/" << sc.replicates
       << " replicates failed; first error: " << first_error;
    fail(ErrorCode::internal, ss.str());
  }

  for (std::size_t k = 0; k < sc.selectors.size(); ++k) {
    SelectorSummary sum;
    sum.id = sc.selectors[k].id();
    sum.failures = failed;
    long correct = 0;
    double symdiff = 0.0;
    std::vector<double> shat;
    for (const auto& o : outcomes) {
      if (o.failed) continue;
      const auto& rp = o.sel[k];
      correct += rp.correct ? 1 : 0;
      symdiff += rp.symdiff;
      if (shat.size() < rp.shat.size()) shat.resize(rp.shat.size(), 0.0);
      for (std::size_t j = 0; j < rp.shat.size(); ++j) shat[j] += rp.shat[j];
    }
    const double denom = std::max(1, result.completed);
    sum.freq_correct = static_cast<double>(correct) / denom;
    sum.mean_symdiff = symdiff / denom;
    for (double& v : shat) v /= denom;
    sum.mean_shat = std::move(shat);
    result.selectors.push_back(std::move(sum));
  }
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

std::string SimResult::csv_long() const {
  std::ostringstream ss;
  ss.precision(12);
  ss << "scenario,n,selector,metric,value\n";
  for (const auto& sel : selectors) {
    auto row = [&](const std::string& metric, double value) {
      ss << scenario.name << ',' << scenario.n << ',' << sel.id << ','
         << metric << ',' << value << '\n';
    };
    row("correct_selection", sel.freq_correct);
    row("mean_symdiff", sel.mean_symdiff);
    if (sel.mean_shat.size() == 1) {
      row("mean_shat", sel.mean_shat[0]);
    } else {
      for (std::size_t j = 0; j < sel.mean_shat.size(); ++j)
        row("mean_shat_" + std::to_string(j + 1), sel.mean_shat[j]);
    }
    row("failures", sel.failures);
  }
  return ss.str();
}

std::string SimResult::metadata_json() const {
  json j;
  j["version"] = BLOCKSEL_VERSION;
  j["rng"] = kRngId;
  j["seed"] = scenario.seed;
  j["stream_rule"] =
      "stage k of replicate r draws from substream 6*r+k of the scenario "
      "seed; substream m is mt19937_64 seeded with splitmix64(seed+m+1); "
      "stages: 0 design, 1 truth, 2 noise, 3 step-1 chain, 4 ebic chain";
  j["scenario"] = json::parse(scenario.to_json());
  json blocks = json::array();
  for (const auto& blk : config.blocks) {
    blocks.push_back({{"p_j", std::llround(blk.inactive + blk.active)},
                      {"s_j", std::llround(blk.active)},
                      {"beta_min_j", blk.beta_min}});
  }
  j["realized_counts"] = {{"p", p}, {"s", s}, {"blocks", blocks}};
  j["completed"] = completed;
  j["elapsed_seconds"] = elapsed_seconds;
  return j.dump(2);
}

namespace {

constexpr double kMaxExact = 9007199254740992.0;  // 2^53

double logaddexp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

struct LogBlock {
  double log_inactive = 0;
  double active = 1;
};

struct LogCfg {
  bool feasible = true;
  std::vector<LogBlock> blocks;
  double log_inactive_pool = 0;
  double active_pool = 0;
};

// Analytic-log counterpart of example_config: identical to the rounded
// counts whenever they are representable, and exact in log space beyond 2^53
// (where unit rounding is below double precision anyway).
LogCfg example_log_cfg(int id, long n) {
  LogCfg out;
  const double nd = static_cast<double>(n);
  const double sqn = std::sqrt(nd);
  const double s_each = std::max(1.0, std::floor(1.5 * std::log(nd) + 0.5));
  double raw1 = 0, raw2 = 0;
  bool huge1 = false;
  double log1_huge = 0;
  switch (id) {
    case 1:
      raw1 = 1.5 * nd - sqn;
      raw2 = sqn;
      break;
    case 2: {
      raw2 = nd * nd;
      const double expo = nd / 20.0;
      if (expo <= std::log(kMaxExact)) {
        raw1 = std::exp(expo) - raw2;
      } else {
        huge1 = true;
        log1_huge = expo + std::log1p(-raw2 * std::exp(-expo));
      }
      break;
    }
    case 3:
      raw1 = nd - std::log(nd);
      raw2 = std::log(nd);
      break;
    case 4:
      raw1 = nd / 2.0;
      raw2 = nd / 2.0;
      break;
    case 5:
      raw1 = (nd - sqn) / 2.0;
      raw2 = sqn / 2.0;
      break;
    default:
      fail(ErrorCode::invalid_argument, "example_id must be in 1..4 (or 5)");
  }
  auto log_count = [&](double raw, bool huge, double log_huge) {
    if (huge) return log_huge;
    const double rounded = std::floor(raw + 0.5);
    if (rounded < 1.0) out.feasible = false;
    return rounded >= 1.0 ? std::log(rounded) : 0.0;
  };
  LogBlock b1, b2;
  b1.log_inactive = log_count(raw1, huge1, log1_huge);
  b1.active = s_each;
  b2.log_inactive = log_count(raw2, false, 0);
  b2.active = s_each;
  out.blocks = {b1, b2};
  out.log_inactive_pool = logaddexp(b1.log_inactive, b2.log_inactive);
  out.active_pool = 2 * s_each;
  return out;
}

}  // namespace

FigureKind figure_kind_parse(const std::string& text) {
  if (text == "fig1") return FigureKind::fig1;
  if (text == "fig2-left" || text == "fig2_left") return FigureKind::fig2_left;
  if (text == "fig2-right" || text == "fig2_right")
    return FigureKind::fig2_right;
  fail(ErrorCode::parse_error, "unknown figure: " + text);
}

std::vector<FigureRow> figure_curves(FigureKind kind,
                                     const std::vector<long>& n_grid) {
  if (n_grid.empty()) fail(ErrorCode::invalid_argument, "empty n grid");
  for (long n : n_grid)
    if (n < 2) fail(ErrorCode::invalid_argument, "grid entries must be >= 2");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<FigureRow> rows;
  const std::vector<int> examples =
      kind == FigureKind::fig2_right ? std::vector<int>{1, 2, 3}
                                     : std::vector<int>{1, 2, 3, 4};
  for (int ex : examples) {
    for (long n : n_grid) {
      const LogCfg cfg = example_log_cfg(ex, n);
      const double nd = static_cast<double>(n);
      auto push = [&](const std::string& series, double value, bool flag) {
        rows.push_back({ex, n, series, value, flag});
      };
      if (!cfg.feasible) {
        switch (kind) {
          case FigureKind::fig1:
            for (const char* s : {"tau_lo", "tau_hi", "tau1_lo", "tau1_hi",
                                  "tau2_lo", "tau2_hi"})
              push(s, nan, true);
            break;
          case FigureKind::fig2_left:
            push("beta_ratio", nan, true);
            break;
          case FigureKind::fig2_right:
            push("rate_ratio", nan, true);
            break;
        }
        continue;
      }
      switch (kind) {
        case FigureKind::fig1: {
          // Figure-1 parameterization: beta_min1 = 2/3, beta_min2 = 1/10.
          const double beta1 = 2.0 / 3.0, beta2 = 0.1;
          const double beta_pool = std::min(beta1, beta2);
          auto interval = [&](double log_inactive, double active, double beta,
                              const std::string& series) {
            const double lo = std::sqrt(2.0 * log_inactive / nd);
            const double hi = beta - std::sqrt(2.0 * std::log(active) / nd);
            const bool empty = lo > hi;
            push(series + "_lo", lo, empty);
            push(series + "_hi", hi, empty);
          };
          interval(cfg.log_inactive_pool, cfg.active_pool, beta_pool, "tau");
          interval(cfg.blocks[0].log_inactive, cfg.blocks[0].active, beta1,
                   "tau1");
          interval(cfg.blocks[1].log_inactive, cfg.blocks[1].active, beta2,
                   "tau2");
          break;
        }
        case FigureKind::fig2_left: {
          const double num =
              std::sqrt(2.0 * cfg.blocks[1].log_inactive / nd) +
              std::sqrt(2.0 * std::log(cfg.blocks[1].active) / nd);
          const double den =
              std::sqrt(2.0 * cfg.log_inactive_pool / nd) +
              std::sqrt(2.0 * std::log(cfg.active_pool) / nd);
          push("beta_ratio", num / den, false);
          break;
        }
        case FigureKind::fig2_right: {
          const double beta_pool = 0.2;  // beta_min2 = 1/5, beta_min1 = 1.3x
          const double betas[2] = {1.3 * beta_pool, beta_pool};
          const double lmax_pool =
              std::max(cfg.log_inactive_pool, std::log(cfg.active_pool));
          double ratio = 0.0;
          for (int j = 0; j < 2; ++j) {
            const double lmax_j = std::max(cfg.blocks[j].log_inactive,
                                           std::log(cfg.blocks[j].active));
            ratio += std::exp(
                -(nd / 8.0) * (betas[j] * betas[j] - beta_pool * beta_pool) -
                (lmax_pool - lmax_j));
          }
          push("rate_ratio", ratio, false);
          break;
        }
      }
    }
  }
  return rows;
}

std::string figure_csv(const std::vector<FigureRow>& rows) {
  std::ostringstream ss;
  ss.precision(12);
  ss << "example,n,series,value,empty_flag\n";
  for (const auto& r : rows) {
    ss << r.example << ',' << r.n << ',' << r.series << ',';
    if (std::isnan(r.value))
      ss << "";
    else
      ss << r.value;
    ss << ',' << (r.flag ? 1 : 0) << '\n';
  }
  return ss.str();
}

Matrix orthonormalize_to_scale(const Matrix& X) {
  if (X.rows() < X.cols())
    fail(ErrorCode::invalid_argument, "need n >= p to orthonormalize");
  Eigen::HouseholderQR<Matrix> qr(X);
  Matrix Q = qr.householderQ() * Matrix::Identity(X.rows(), X.cols());
  return Q * std::sqrt(static_cast<double>(X.rows()));
}

}  // namespace blocksel
