#pragma once

// JSON scenario/config files.
//
// {
//   "name": "scenario_01",                 optional, defaults to the file stem
//   "seed": 7,                              optional, default 1
//   "capacity_kbps": 622000,                required
//   "factory": "rdm",                       optional: mam | rdm | alloctc | grdm
//   "classes": [                            required, one object per class
//     {"bc_kbps": 248800}                   or "bc_percent": 40
//     ...                                   without a factory: htl_* and lth_*
//   ],                                      are required; with "grdm":
//                                           private_* is required
//   "workloads": [ {...}, ... ]             optional, one object per class
// }
//
// Workload keys (all optional): interarrival_mean_s (3), start_delay_s (0),
// count (1000), bandwidth_min_kbps (5000), bandwidth_max_kbps (10000),
// holding_mean_s (250).
//
// Percentages are of capacity_kbps and must convert to a whole number of
// kbps. Unknown keys are errors.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbam/simkit.hpp"

namespace gbam {

/// The file could not be read at all.
class ScenarioIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The file was read but its content is not a valid scenario document.
class ScenarioFileError : public std::runtime_error {
 public:
  explicit ScenarioFileError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Parses a document. Structural problems throw ScenarioFileError listing
/// every problem found; BC-sum and cap-within-BC violations are left for
/// Scenario::bam_config() to report.
Scenario parse_scenario_json(const std::string& text, const std::string& default_name);

Scenario load_scenario_file(const std::filesystem::path& path);

/// Exact percent-of-capacity conversion; nullopt if the result is not a
/// whole number of kbps. `percent_text` is a decimal such as "40" or "12.5".
std::optional<Bandwidth> percent_of(Bandwidth capacity, const std::string& percent_text);

}  // namespace gbam
