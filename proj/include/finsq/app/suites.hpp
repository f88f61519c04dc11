#pragma once

#include <string>
#include <vector>

#include "finsq/app/config.hpp"

namespace finsq::app {

struct CheckReport {
  Json config;
  std::string metric;
  std::vector<Certificate> suites;
  double wall_time = 0.0;

  bool pass() const;
  /// wall_time sits under "timing"; it is the only field that varies between identical runs.
  Json to_json(bool include_timing = true) const;
};

CheckReport run_suites(const RunConfig& config);

/// One suite on an already drawn sample set.
Certificate run_suite(const std::string& suite, const RunConfig& config, const SampleSet& samples);

Json certificate_json(const Certificate& cert);

/// Version strings reported alongside results.
std::string finsq_version();
std::string eigen_version();

}  // namespace finsq::app
