#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <string>

#include "rieszcap/rieszcap.h"

namespace {

struct MeasureDeleter {
  void operator()(rc_measure* m) const { rc_measure_free(m); }
};
struct CapacityDeleter {
  void operator()(rc_capacity* c) const { rc_capacity_free(c); }
};
using Measure = std::unique_ptr<rc_measure, MeasureDeleter>;
using Capacity = std::unique_ptr<rc_capacity, CapacityDeleter>;

std::string take(char* s) {
  std::string out = s ? s : "";
  rc_string_free(s);
  return out;
}

Measure collinear() {
  const double coords[] = {0, 0, 1, 0, 2, 0};
  const double weights[] = {1, 1, 1};
  rc_measure* m = nullptr;
  EXPECT_EQ(rc_measure_create(2, 3, coords, weights, 0.5, &m), RC_OK);
  return Measure(m);
}

Measure cantor(unsigned depth, double dim = 1.0) {
  rc_cantor_spec spec;
  rc_cantor_spec_default(&spec);
  EXPECT_EQ(rc_cantor_ratio_for_dimension(2, dim, &spec.lambda), RC_OK);
  spec.depth = depth;
  rc_measure* m = nullptr;
  EXPECT_EQ(rc_generate_cantor(&spec, &m), RC_OK);
  return Measure(m);
}

rc_window window(double eps) { return {eps, INFINITY}; }

}  // namespace

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(rc_version(), "0.1.0");
  EXPECT_STRNE(rc_status_name(RC_ERR_SIZE), rc_status_name(RC_ERR_PARSE));
}

TEST(CApi, MeasureLifecycle) {
  auto mu = collinear();
  EXPECT_EQ(rc_measure_dim(mu.get()), 2u);
  EXPECT_EQ(rc_measure_size(mu.get()), 3u);
  EXPECT_DOUBLE_EQ(rc_measure_delta(mu.get()), 0.5);
  EXPECT_DOUBLE_EQ(rc_measure_total_mass(mu.get()), 3.0);
  EXPECT_DOUBLE_EQ(rc_measure_diameter(mu.get()), 2.0);
  double xy[2], w = 0;
  ASSERT_EQ(rc_measure_atom(mu.get(), 2, xy, &w), RC_OK);
  EXPECT_EQ(xy[0], 2.0);
  EXPECT_EQ(rc_measure_atom(mu.get(), 3, xy, &w), RC_ERR_ARGUMENT);

  rc_measure* d = nullptr;
  ASSERT_EQ(rc_measure_dilate(mu.get(), 2.0, &d), RC_OK);
  Measure dil(d);
  EXPECT_DOUBLE_EQ(rc_measure_diameter(dil.get()), 4.0);
  rc_measure* n = nullptr;
  ASSERT_EQ(rc_measure_normalize(mu.get(), &n), RC_OK);
  Measure norm(n);
  EXPECT_DOUBLE_EQ(rc_measure_total_mass(norm.get()), 1.0);

  char* text = nullptr;
  ASSERT_EQ(rc_measure_to_json(mu.get(), &text), RC_OK);
  const std::string json = take(text);
  rc_measure* back = nullptr;
  ASSERT_EQ(rc_measure_from_json(json.c_str(), &back), RC_OK);
  Measure round(back);
  EXPECT_EQ(rc_measure_size(round.get()), 3u);
}

TEST(CApi, ErrorCodes) {
  const double coords[] = {0, 0, 1, 0};
  const double bad_w[] = {1, -1};
  rc_measure* m = nullptr;
  EXPECT_EQ(rc_measure_create(2, 2, coords, bad_w, 0.0, &m), RC_ERR_DOMAIN);
  EXPECT_EQ(m, nullptr);
  EXPECT_STRNE(rc_last_error(), "");
  EXPECT_EQ(rc_measure_create(2, 2, nullptr, bad_w, 0.0, &m), RC_ERR_ARGUMENT);
  EXPECT_EQ(rc_measure_from_json("{", &m), RC_ERR_PARSE);
  EXPECT_EQ(rc_measure_load("/nonexistent/dir/m.json", &m), RC_ERR_IO);

  rc_cantor_spec spec;
  rc_cantor_spec_default(&spec);
  spec.depth = 9;
  EXPECT_EQ(rc_generate_cantor(&spec, &m), RC_ERR_SIZE);

  auto mu = collinear();
  double out = 0;
  EXPECT_EQ(rc_p_alpha_energy(mu.get(), 2.5, window(0.5), &out), RC_ERR_DOMAIN);
  EXPECT_EQ(rc_p_alpha_energy(mu.get(), 0.5, window(0.0), &out), RC_ERR_ARGUMENT);
  double x[2] = {0, 0};
  EXPECT_EQ(rc_wolff_potential(mu.get(), x, 1.0, 2.0, 0.5, window(0.5), &out),
            RC_ERR_UNSUPPORTED_EXPONENT);
  EXPECT_EQ(rc_p_alpha_energy(nullptr, 0.5, window(0.5), &out), RC_ERR_ARGUMENT);
}

TEST(CApi, Energies) {
  auto mu = collinear();
  const double root = std::sqrt(2.0) - 1.0;
  double v = 0;
  const double a[] = {0, 0}, b[] = {1, 0}, c[] = {2, 0};
  ASSERT_EQ(rc_p_alpha_triple(2, a, b, c, 0.5, &v), RC_OK);
  EXPECT_NEAR(v, root, 1e-14);
  ASSERT_EQ(rc_p_alpha_energy(mu.get(), 0.5, window(0.5), &v), RC_OK);
  EXPECT_NEAR(v, 6.0 * root, 1e-13);
  const double x[] = {-1, 0};
  ASSERT_EQ(rc_pointwise_p_potential(mu.get(), x, 0.5, window(0.5), &v), RC_OK);
  EXPECT_GT(v, 0.0);

  rc_energy_report r;
  ASSERT_EQ(rc_energy_report_compute(mu.get(), 0.5, window(0.5), &r), RC_OK);
  EXPECT_EQ(r.atoms, 3u);
  EXPECT_NEAR(r.p_alpha, 6.0 * root, 1e-13);
  double w = 0, e = 0;
  ASSERT_EQ(rc_wolff_energy(mu.get(), 0.5, window(0.5), &w), RC_OK);
  ASSERT_EQ(rc_tolsa_energy(mu.get(), 0.5, window(0.5), &e), RC_OK);
  EXPECT_EQ(r.wolff, w);
  EXPECT_EQ(r.e_alpha, e);
  EXPECT_STREQ(rc_energy_csv_header(), "n,alpha,eps,N_atoms,p_alpha,riesz_l2,wolff,E_alpha,M_max");
  char* row = nullptr;
  ASSERT_EQ(rc_energy_report_csv_row(&r, &row), RC_OK);
  EXPECT_EQ(take(row).rfind("2,0.5,0.5,3,2.48528", 0), 0u);
}

TEST(CApi, CapacityHandles) {
  auto mu = cantor(2, 0.75);
  rc_optimizer_config cfg;
  rc_optimizer_config_default(&cfg);
  rc_capacity* cap = nullptr;
  ASSERT_EQ(rc_estimate_gamma_plus(mu.get(), 0.5, window(rc_measure_delta(mu.get())), &cfg, &cap),
            RC_OK);
  Capacity est(cap);
  EXPECT_GT(rc_capacity_value(est.get()), 0.0);
  EXPECT_STREQ(rc_capacity_method(est.get()), "tolsa-energy");
  double energy = 0;
  ASSERT_EQ(rc_capacity_diagnostic(est.get(), "energy", &energy), RC_OK);
  EXPECT_NEAR(rc_capacity_value(est.get()), 1.0 / energy, 1e-12);
  EXPECT_EQ(rc_capacity_diagnostic(est.get(), "nope", &energy), RC_ERR_ARGUMENT);
  rc_measure* wit = nullptr;
  ASSERT_EQ(rc_capacity_witness(est.get(), &wit), RC_OK);
  Measure witness(wit);
  EXPECT_NEAR(rc_measure_total_mass(witness.get()), 1.0, 1e-12);
  char* json = nullptr;
  ASSERT_EQ(rc_capacity_to_json(est.get(), &json), RC_OK);
  EXPECT_NE(take(json).find("\"witness\""), std::string::npos);

  rc_comparability cmp;
  ASSERT_EQ(rc_comparability_report(mu.get(), 0.5, window(rc_measure_delta(mu.get())), &cfg, &cmp),
            RC_OK);
  EXPECT_NEAR(cmp.ratio, cmp.gamma_plus_proxy / cmp.csp_proxy, 1e-15);
}

TEST(CApi, ChebyshevAndBilipschitz) {
  const double coords[] = {0, 1};
  const double weights[] = {0.5, 0.5};
  rc_measure* m = nullptr;
  ASSERT_EQ(rc_measure_create(1, 2, coords, weights, 0.0, &m), RC_OK);
  Measure mu(m);
  const double pot[] = {1.0, 3.0};
  double kept = 0;
  rc_measure* r = nullptr;
  ASSERT_EQ(rc_chebyshev_restrict(mu.get(), pot, 2.0, &kept, &r), RC_OK);
  Measure restricted(r);
  EXPECT_DOUBLE_EQ(kept, 0.5);
  EXPECT_EQ(rc_measure_size(restricted.get()), 1u);
  EXPECT_EQ(rc_chebyshev_restrict(mu.get(), pot, 0.5, &kept, nullptr), RC_ERR_EMPTY_RESTRICTION);

  ASSERT_GE(rc_bilipschitz_map_count(), 5u);
  EXPECT_STREQ(rc_bilipschitz_map_id(0), "identity");
  auto c = cantor(2, 0.75);
  rc_optimizer_config cfg;
  rc_optimizer_config_default(&cfg);
  rc_bilipschitz out;
  ASSERT_EQ(rc_bilipschitz_experiment(c.get(), "identity", 0.5, window(rc_measure_delta(c.get())),
                                      &cfg, 0.0, &out),
            RC_OK);
  EXPECT_EQ(out.ratio, 1.0);
  EXPECT_EQ(out.bound, 5.0);
  EXPECT_EQ(rc_bilipschitz_experiment(c.get(), "fold", 0.5, window(rc_measure_delta(c.get())),
                                      &cfg, 0.0, &out),
            RC_ERR_ARGUMENT);
}

TEST(CApi, CapacityRow) {
  rc_capacity_row row{};
  row.set_id = "s";
  row.n = 2;
  row.alpha = 0.5;
  row.dim = NAN;
  row.depth = -1;
  row.eps = 0.25;
  row.method = "tolsa-energy";
  row.value = 1.0;
  row.energy = 1.0;
  row.iters = 3;
  row.status = "ok";
  row.csp_value = row.csp_energy = row.ratio = NAN;
  char* text = nullptr;
  ASSERT_EQ(rc_capacity_csv_row(&row, &text), RC_OK);
  EXPECT_EQ(take(text), "s,2,0.5,,,0.25,tolsa-energy,1,1,3,ok,,,");
  EXPECT_EQ(std::string(rc_capacity_csv_header()).substr(0, 6), "set_id");
}

TEST(CApi, VerifySubset) {
  rc_verify_config cfg;
  rc_verify_config_default(&cfg);
  cfg.quick = 1;
  cfg.suites = "sandwich,menger";
  rc_verify_report* rep = nullptr;
  ASSERT_EQ(rc_verify_run(&cfg, &rep), RC_OK);
  EXPECT_TRUE(rc_verify_passed(rep));
  ASSERT_EQ(rc_verify_suite_count(rep), 2u);
  rc_suite_info info;
  ASSERT_EQ(rc_verify_suite(rep, 1, &info), RC_OK);
  EXPECT_STREQ(info.name, "menger");
  EXPECT_EQ(info.criterion, 2);
  char* json = nullptr;
  ASSERT_EQ(rc_verify_summary_json(rep, &json), RC_OK);
  EXPECT_NE(take(json).find("\"passed\": true"), std::string::npos);
  rc_verify_report_free(rep);

  cfg.suites = "bogus";
  EXPECT_EQ(rc_verify_run(&cfg, &rep), RC_ERR_ARGUMENT);
  EXPECT_GE(rc_verify_suite_name_count(), 12u);
}

TEST(CApi, ThreadLimitRoundTrip) {
  rc_set_thread_limit(1);
  EXPECT_EQ(rc_thread_limit(), 1u);
  rc_set_thread_limit(0);
  EXPECT_GE(rc_thread_limit(), 1u);
}
