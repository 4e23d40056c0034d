// Exercises the shared-library surface: handles, error codes, JSON payloads.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "blocksel.h"

namespace {

struct Out {
  char* s = nullptr;
  ~Out() { bsel_string_free(s); }
  std::string str() const { return s ? std::string(s) : std::string(); }
};

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(bsel_version()) > 0);
  CHECK(std::string(bsel_status_name(BSEL_OK)) == "ok");
  CHECK(std::string(bsel_status_name(BSEL_ERR_PARSE)) == "parse-error");
}

TEST_CASE("dataset and partition handles") {
  const std::vector<double> x = {1, 0, 0, 1, 1, 1};  // 3x2 row major
  const std::vector<double> y = {1, 2, 3};
  bsel_dataset* ds = nullptr;
  REQUIRE(bsel_dataset_create(x.data(), 3, 2, y.data(), 1.0, &ds) == BSEL_OK);
  CHECK(bsel_dataset_rows(ds) == 3);
  CHECK(bsel_dataset_cols(ds) == 2);

  const std::vector<int32_t> labels = {1, 2};
  bsel_partition* pt = nullptr;
  REQUIRE(bsel_partition_create(labels.data(), 2, &pt) == BSEL_OK);
  CHECK(bsel_partition_blocks(pt) == 2);
  CHECK(bsel_partition_size(pt) == 2);

  bsel_partition_free(pt);
  bsel_dataset_free(ds);
}

TEST_CASE("invalid partition labels set an error message") {
  const std::vector<int32_t> labels = {1, 3};  // gap: block 2 missing
  bsel_partition* pt = nullptr;
  CHECK(bsel_partition_create(labels.data(), 2, &pt) ==
        BSEL_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(bsel_last_error()) > 0);
}

TEST_CASE("bad sigma is rejected") {
  const std::vector<double> x = {1, 2, 3};
  const std::vector<double> y = {1, 2, 3};
  bsel_dataset* ds = nullptr;
  CHECK(bsel_dataset_create(x.data(), 3, 1, y.data(), 0.0, &ds) ==
        BSEL_ERR_INVALID_ARGUMENT);
}

TEST_CASE("select on a small strong-signal instance") {
  // n = 50, p = 4; the first column carries the signal.
  std::mt19937_64 eng(12345);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = 50, p = 4;
  std::vector<double> x(n * p), y(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < p; ++k) x[i * p + k] = gauss(eng);
    y[i] = 3.0 * x[i * p + 0] + 0.2 * gauss(eng);
  }
  bsel_dataset* ds = nullptr;
  REQUIRE(bsel_dataset_create(x.data(), n, p, y.data(), 1.0, &ds) == BSEL_OK);
  const std::vector<int32_t> labels = {1, 1, 2, 2};
  bsel_partition* pt = nullptr;
  REQUIRE(bsel_partition_create(labels.data(), p, &pt) == BSEL_OK);

  Out result, ledger;
  REQUIRE(bsel_select(ds, pt, "{\"variant\":\"eb\",\"p_limit\":4}", &result.s,
                      &ledger.s) == BSEL_OK);
  CHECK(result.str().find("\"selected\": [\n    1\n  ]") != std::string::npos);
  CHECK(ledger.str().rfind("model,C,NC\n", 0) == 0);

  Out ebic;
  REQUIRE(bsel_select(ds, pt, "{\"variant\":\"ebic\",\"p_limit\":4}", &ebic.s,
                      nullptr) == BSEL_OK);
  CHECK(ebic.str().find("\"zeta\"") != std::string::npos);

  CHECK(bsel_select(ds, pt, "{\"variant\":\"bogus\"}", &result.s, nullptr) ==
        BSEL_ERR_INVALID_ARGUMENT);
  CHECK(bsel_select(ds, pt, "not json", &result.s, nullptr) == BSEL_ERR_PARSE);

  bsel_partition_free(pt);
  bsel_dataset_free(ds);
}

TEST_CASE("sequence select via kappas") {
  const std::vector<double> y = {3.0, 1.0, 2.0};  // beta~ = y / 10
  const std::vector<int32_t> labels = {1, 1, 2};
  bsel_partition* pt = nullptr;
  REQUIRE(bsel_partition_create(labels.data(), 3, &pt) == BSEL_OK);
  const std::vector<double> kappas = {100.0 * 0.25 * 0.25 / 2.0,
                                      100.0 * 0.15 * 0.15 / 2.0};
  Out result;
  REQUIRE(bsel_sequence_select(y.data(), 3, 100.0, pt, nullptr, kappas.data(),
                               &result.s) == BSEL_OK);
  // beta~ = (0.3, 0.1, 0.2), taus = (0.25, 0.15): coordinates 1 and 3 pass
  CHECK(result.str().find("\"selected\": [\n    1,\n    3\n  ]") !=
        std::string::npos);
  CHECK(bsel_sequence_select(y.data(), 3, 100.0, pt, nullptr, nullptr,
                             &result.s) == BSEL_ERR_INVALID_ARGUMENT);
  bsel_partition_free(pt);
}

TEST_CASE("diagnose on a tiny instance") {
  std::mt19937_64 eng(777);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = 40, p = 6;
  std::vector<double> x(n * p), y(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < p; ++k) x[i * p + k] = gauss(eng);
    y[i] = x[i * p + 0] - x[i * p + 3] + gauss(eng);
  }
  bsel_dataset* ds = nullptr;
  REQUIRE(bsel_dataset_create(x.data(), n, p, y.data(), 1.0, &ds) == BSEL_OK);
  const std::vector<int32_t> labels = {1, 1, 1, 2, 2, 2};
  bsel_partition* pt = nullptr;
  REQUIRE(bsel_partition_create(labels.data(), p, &pt) == BSEL_OK);
  const std::vector<int32_t> support = {1, 4};

  Out result, table;
  REQUIRE(bsel_diagnose(ds, pt, support.data(), 2, "{}", &result.s,
                        &table.s) == BSEL_OK);
  CHECK(result.str().find("\"rho\"") != std::string::npos);
  CHECK(result.str().find("\"lambda_bar\"") != std::string::npos);
  CHECK(result.str().find("\"assumptions\"") != std::string::npos);
  CHECK(table.str().find("gamma") != std::string::npos);

  bsel_partition_free(pt);
  bsel_dataset_free(ds);
}

TEST_CASE("simulate and scenario normalization") {
  const char* scenario =
      "{\"example_id\":4,\"n\":30,\"replicates\":3,\"iterations\":200,"
      "\"selectors\":[\"EB_b\"],\"seed\":5}";
  Out normalized;
  REQUIRE(bsel_scenario_normalize(scenario, &normalized.s) == BSEL_OK);
  CHECK(normalized.str().find("\"beta_min\"") != std::string::npos);

  Out csv, meta;
  REQUIRE(bsel_simulate(scenario, 1, &csv.s, &meta.s) == BSEL_OK);
  CHECK(csv.str().rfind("scenario,n,selector,metric,value\n", 0) == 0);
  CHECK(meta.str().find("\"completed\": 3") != std::string::npos);

  // resolved scenario re-runs identically
  Out csv2;
  REQUIRE(bsel_simulate(normalized.str().c_str(), 2, &csv2.s, nullptr) ==
          BSEL_OK);
  CHECK(csv.str() == csv2.str());

  CHECK(bsel_simulate("{\"example_id\":2,\"n\":30}", 1, &csv.s, nullptr) ==
        BSEL_ERR_INFEASIBLE);
}

TEST_CASE("figure curves") {
  const std::vector<int64_t> grid = {100, 700};
  Out csv;
  REQUIRE(bsel_figure_curves("fig2-left", grid.data(), 2, &csv.s) == BSEL_OK);
  CHECK(csv.str().rfind("example,n,series,value,empty_flag\n", 0) == 0);
  CHECK(bsel_figure_curves("nope", grid.data(), 2, &csv.s) == BSEL_ERR_PARSE);
}
