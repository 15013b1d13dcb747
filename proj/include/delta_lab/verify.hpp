#pragma once

// Property suites over ranges of n, shared by the command-line `verify`
// command and the acceptance run. Asserted properties count failures;
// monitors are reported only.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace delta_lab::verify {

struct Options {
  std::uint64_t n_max = 5000;
  std::uint64_t samples = 500;
  std::uint64_t seed = 0x5EED;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t checked = 0;
  std::uint64_t failures = 0;
  std::string first_failure;
  std::map<std::string, double> monitors;
  bool pass() const noexcept { return failures == 0; }
};

const std::vector<std::string>& suite_names();

// Throws ConfigError for an unknown name.
SuiteReport run_suite(const std::string& name, const Options& opts);

}  // namespace delta_lab::verify
