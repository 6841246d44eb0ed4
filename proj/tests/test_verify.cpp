#include <gtest/gtest.h>

#include <algorithm>

#include "rieszcap/error.hpp"
#include "rieszcap/verify.hpp"

using namespace rieszcap;

TEST(Verify, QuickBatteryPasses) {
  VerifyConfig cfg;
  cfg.quick = true;
  const auto report = run_verify(cfg);
  for (const auto& s : report.suites) EXPECT_TRUE(s.passed) << s.name << ": " << s.message;
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(report.suites.size(), verify_suite_names().size());
}

TEST(Verify, SummaryIsDeterministic) {
  VerifyConfig cfg;
  cfg.quick = true;
  cfg.suites = {"sandwich", "decomposition", "optimizer"};
  EXPECT_EQ(run_verify(cfg).summary_json(), run_verify(cfg).summary_json());
}

TEST(Verify, InjectedFaultIsCaughtBySandwich) {
  VerifyConfig cfg;
  cfg.quick = true;
  cfg.p_alpha_fault_scale = 1.01;
  const auto report = run_verify(cfg);
  ASSERT_FALSE(report.passed());
  ASSERT_NE(report.first_failure(), nullptr);
  EXPECT_EQ(report.first_failure()->name, "sandwich");
  EXPECT_EQ(report.first_failure()->criterion, 1);
}

TEST(Verify, SuiteSelection) {
  VerifyConfig cfg;
  cfg.quick = true;
  cfg.suites = {"menger"};
  const auto report = run_verify(cfg);
  ASSERT_EQ(report.suites.size(), 1u);
  EXPECT_EQ(report.suites[0].criterion, 2);
  cfg.suites = {"no-such-suite"};
  EXPECT_THROW(run_verify(cfg), ArgumentError);
}
