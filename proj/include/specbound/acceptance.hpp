#ifndef SPECBOUND_ACCEPTANCE_HPP
#define SPECBOUND_ACCEPTANCE_HPP

// The twelve acceptance criteria, shared by the acceptance test binary and
// the verify-all command.

#include "specbound/config.hpp"

#include <json.hpp>

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace specbound {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string summary;  // one line with the measured quantities
  nlohmann::json details;
  double seconds = 0.0;
};

/// CSV artifacts keyed by file name. Every file starts with one comment line.
using Artifacts = std::map<std::string, std::string>;

/// Upper/lower sweeps, projector, H^k, Ozawa and layer profile CSVs on the
/// unit disk, parameterized by the config grids.
Artifacts make_artifacts(const RunConfig& config, int jobs);

/// Text after the leading comment lines.
std::string csv_body(const std::string& csv);

/// Runs criteria 1..12 in order; `on_result` sees each result as it lands.
/// Criterion 12 compares two artifact passes (one thread vs `jobs`).
std::vector<CriterionResult> run_acceptance(const RunConfig& config,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// {"pass": bool, "fail": [ids], "details": [...]}.
nlohmann::json summary_json(const std::vector<CriterionResult>& results);

/// "[PASS] 3 title: summary (1.2 s)".
std::string format_line(const CriterionResult& r);

}  // namespace specbound

#endif  // SPECBOUND_ACCEPTANCE_HPP
