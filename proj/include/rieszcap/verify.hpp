#pragma once

// Property battery run by `rieszcap verify` and by the acceptance test.
// Suites 1..11 are the numbered acceptance criteria; the rest are extra
// invariants (criterion 0). The summary JSON is a pure function of the
// config, so two runs with one seed compare byte-for-byte; timings are
// reported separately.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rieszcap {

struct VerifyConfig {
  std::uint64_t seed = 20260917;
  /// Reduced sample counts and depths for smoke runs. Acceptance uses full mode.
  bool quick = false;
  /// Where the comparability sweep archives its ratios (empty: not written).
  std::string ratio_csv_path;
  /// Mutation hook: every pointwise p_alpha is multiplied by this factor.
  double p_alpha_fault_scale = 1.0;
  /// Restrict to these suite names; empty runs everything.
  std::vector<std::string> suites;
};

struct SuiteResult {
  std::string name;
  int criterion = 0;
  bool passed = true;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::vector<std::pair<std::string, double>> metrics;
  /// First failing check, or the exception text.
  std::string message;
  double seconds = 0.0;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  bool quick = false;
  std::vector<SuiteResult> suites;

  bool passed() const;
  const SuiteResult* first_failure() const;
  const SuiteResult* find(const std::string& name) const;
  /// Deterministic summary: no timings.
  std::string summary_json() const;
  /// {"suite": seconds, ...}
  std::string timings_json() const;
};

/// Suite names in execution order.
std::vector<std::string> verify_suite_names();

/// Throws ArgumentError for an unknown suite name.
VerifyReport run_verify(const VerifyConfig& cfg);

}  // namespace rieszcap
