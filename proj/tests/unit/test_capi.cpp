#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "invdens/invdens.h"

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("invdens_capi_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(invdens_version(), "0.1.0");
  EXPECT_STREQ(invdens_status_name(INVDENS_E_CONFIG), "config error");
}

TEST(CApi, PipelineThroughHandles) {
  invdens_scheme scheme{2048, 0.0078125, 1.0, 3};
  invdens_series* series = nullptr;
  ASSERT_EQ(invdens_simulate_ou(0.5, 1, &scheme, &series), INVDENS_OK);
  size_t n = 0, dim = 0;
  double delta = 0.0, tau = 0.0;
  ASSERT_EQ(invdens_series_info(series, &n, &dim, &delta, &tau), INVDENS_OK);
  EXPECT_EQ(n, 2048u);
  EXPECT_EQ(dim, 1u);
  EXPECT_EQ(tau, 1.0);
  std::vector<double> obs(n + 1);
  EXPECT_EQ(invdens_series_observed(series, obs.data(), obs.size()), INVDENS_OK);
  EXPECT_EQ(invdens_series_observed(series, obs.data(), 3), INVDENS_E_PARAMETER);

  invdens_sample* sample = nullptr;
  ASSERT_EQ(invdens_preaverage(series, 11, &sample), INVDENS_OK);
  size_t count = 0;
  double tt = 0.0;
  ASSERT_EQ(invdens_sample_info(sample, &count, nullptr, &tt), INVDENS_OK);
  EXPECT_EQ(count, 2048u / 11u);
  double expected_tt = 0.0;
  ASSERT_EQ(invdens_effective_noise(1.0, 0.0078125, 11, &expected_tt), INVDENS_OK);
  EXPECT_EQ(tt, expected_tt);

  const double h = 0.3;
  invdens_kernel* kernel = nullptr;
  ASSERT_EQ(invdens_kernel_create(1, &h, 1, &kernel), INVDENS_OK);
  double kv = 0.0;
  const double zero = 0.0;
  ASSERT_EQ(invdens_kernel_eval(kernel, &zero, &kv), INVDENS_OK);
  EXPECT_DOUBLE_EQ(kv, 0.5 / 0.3);

  invdens_weights* weights = nullptr;
  ASSERT_EQ(invdens_weights_create(2, &weights), INVDENS_OK);
  double u[3];
  ASSERT_EQ(invdens_weights_values(weights, u, 3), INVDENS_OK);
  EXPECT_EQ(u[0], 0.5);
  EXPECT_EQ(u[1], 1.0);
  EXPECT_EQ(u[2], -0.5);
  char* det = nullptr;
  ASSERT_EQ(invdens_weights_determinant(weights, &det), INVDENS_OK);
  EXPECT_STREQ(det, "2");
  invdens_string_free(det);

  double nu = 0.0, mu = 0.0, naive = 0.0;
  ASSERT_EQ(invdens_nu_hat(sample, kernel, &zero, 1, &nu), INVDENS_OK);
  ASSERT_EQ(invdens_mu_hat(sample, kernel, weights, &zero, 1, &mu), INVDENS_OK);
  ASSERT_EQ(invdens_naive(series, kernel, &zero, 1, &naive), INVDENS_OK);
  EXPECT_GT(nu, 0.0);
  EXPECT_TRUE(std::isfinite(mu));
  EXPECT_GT(naive, 0.0);
  const double two[] = {0.0, 0.0};
  EXPECT_EQ(invdens_nu_hat(sample, kernel, two, 2, &nu), INVDENS_E_DIMENSIONALITY);
  EXPECT_NE(std::string(invdens_last_error()), "");

  invdens_weights_free(weights);
  invdens_kernel_free(kernel);
  invdens_sample_free(sample);
  invdens_series_free(series);
}

TEST(CApi, ErrorCodesAndNullHandles) {
  invdens_sample* sample = nullptr;
  EXPECT_EQ(invdens_preaverage(nullptr, 2, &sample), INVDENS_E_INVALID_HANDLE);
  invdens_weights* w = nullptr;
  EXPECT_EQ(invdens_weights_create(13, &w), INVDENS_E_PARAMETER);
  size_t p = 0;
  EXPECT_EQ(invdens_choose_p(1.0, 0.0078125, 2.0, 0, &p), INVDENS_OK);
  EXPECT_EQ(p, 11u);
  EXPECT_EQ(invdens_choose_p(1.0, 0.0078125, 2.0, 1, &p), INVDENS_OK);
  EXPECT_EQ(p, 6u);
  EXPECT_EQ(invdens_choose_p(1.0, 0.0078125, 2.0, 7, &p), INVDENS_E_PARAMETER);
  invdens_series* s = nullptr;
  EXPECT_EQ(invdens_simulate_config("{\"oops\": 1}", 0, &s), INVDENS_E_CONFIG);
  EXPECT_EQ(invdens_series_read_csv("/nonexistent/file.csv", 0.0, &s), INVDENS_E_IO);
  invdens_series_free(nullptr);
}

TEST(CApi, PlanText) {
  const double alpha[] = {2.0};
  char* text = nullptr;
  ASSERT_EQ(invdens_plan(alpha, 1, 16384, 0.0078125, 1.0, 0, &text), INVDENS_OK);
  EXPECT_NE(std::string(text).find("p_star=11"), std::string::npos);
  invdens_string_free(text);
  ASSERT_EQ(invdens_plan_config("{}", &text), INVDENS_OK);
  EXPECT_NE(std::string(text).find("d_class=LowDim"), std::string::npos);
  invdens_string_free(text);
}

TEST(CApi, SeriesCsvRoundTrip) {
  const auto dir = temp_dir("csv");
  const auto path = (dir / "series.csv").string();
  ASSERT_EQ(invdens_simulate_to_csv("{\"scheme\": {\"n\": 64, \"delta\": 0.1, \"tau\": 0.5}}", path.c_str()),
            INVDENS_OK);
  invdens_series* s = nullptr;
  ASSERT_EQ(invdens_series_read_csv(path.c_str(), 0.5, &s), INVDENS_OK);
  const auto again = (dir / "again.csv").string();
  ASSERT_EQ(invdens_series_write_csv(s, again.c_str()), INVDENS_OK);
  EXPECT_EQ(slurp(path), slurp(again));
  invdens_series_free(s);
}

TEST(CApi, WorkflowsWriteFiles) {
  const auto dir = temp_dir("flows");
  const char* cfg = R"({"scheme": {"n": 2048, "delta": 0.0078125, "tau": 1}, "replications": 4,
                        "table2": {"block_sizes": [1, "p*"], "points": [0]}})";
  const auto est = (dir / "estimate.csv").string();
  ASSERT_EQ(invdens_estimate(cfg, nullptr, est.c_str(), 0), INVDENS_OK);
  EXPECT_EQ(slurp(est).rfind("x_1,nu_hat,mu_hat,target\n", 0), 0u);
  invdens_run_options options{2, 0};
  char* summary = nullptr;
  ASSERT_EQ(invdens_bench_run("table2", cfg, dir.string().c_str(), &options, &summary), INVDENS_OK);
  EXPECT_NE(std::string(summary).find("p_star=11"), std::string::npos);
  invdens_string_free(summary);
  EXPECT_TRUE(std::filesystem::exists(dir / "table2.csv"));
  EXPECT_EQ(invdens_bench_run("table9", cfg, dir.string().c_str(), &options, nullptr), INVDENS_E_CONFIG);

  const char* gl = R"({"model": {"dim": 3}, "scheme": {"n": 4096, "delta": 0.03125, "tau": 0.1},
                       "bandwidth": {"policy": "gl"}, "eval_points": [[0, 0, 0]]})";
  const auto trace = (dir / "gl_trace.csv").string();
  ASSERT_EQ(invdens_adapt(gl, trace.c_str(), 0, &summary), INVDENS_OK);
  EXPECT_NE(std::string(summary).find("h_star="), std::string::npos);
  invdens_string_free(summary);
  EXPECT_EQ(slurp(trace).rfind("h_1,h_2,h_3,A,V,criterion,selected\n", 0), 0u);
  EXPECT_EQ(invdens_adapt("{}", trace.c_str(), 0, nullptr), INVDENS_E_UNSUPPORTED);
}
