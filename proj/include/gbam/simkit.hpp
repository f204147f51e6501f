#pragma once

// Discrete-event simulation of LSP arrivals and departures on one link.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbam/engine.hpp"
#include "gbam/link_allocator.hpp"
#include "gbam/oracles.hpp"

namespace gbam {

class InvalidScenario : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Factory { kMam, kRdm, kAllocTc, kGrdm, kExplicit };

const char* to_string(Factory f);
std::optional<Factory> parse_factory(const std::string& text);

/// Where a scenario's BamConfig comes from.
struct ConfigSource {
  Factory factory = Factory::kExplicit;
  /// BC per class; always present.
  std::vector<Bandwidth> bcs;
  /// Private part per class, kGrdm only.
  std::vector<Bandwidth> privates;
  /// HTL/LTH caps per class, kExplicit only (bc repeated from `bcs`).
  std::vector<ClassConfig> classes;
};

struct ClassWorkload {
  double interarrival_mean_s = 3.0;
  double start_delay_s = 0.0;
  std::uint64_t count = 1000;
  Bandwidth bandwidth_min{5000};
  Bandwidth bandwidth_max{10000};
  double holding_mean_s = 250.0;
};

struct Scenario {
  std::string name;
  ConfigSource config;
  Bandwidth capacity;
  std::vector<ClassWorkload> workloads;
  std::uint64_t seed = 1;

  std::size_t class_count() const { return config.bcs.size(); }
  /// Throws InvalidScenario.
  void validate() const;
  /// The scenario's own configuration.
  BamConfig bam_config() const;
  /// The same BCs run through another factory. kGrdm needs privates in
  /// the scenario; kExplicit returns bam_config().
  BamConfig bam_config(Factory factory) const;
};

/// Link and BCs used by both reference scenarios: 622 Mbps, BCs 40/35/25 %.
inline constexpr Bandwidth kStm4Capacity{622000};
std::vector<Bandwidth> reference_bcs();

/// TC0 first, TC1 after 800 s, TC2 after 1400 s.
Scenario scenario_01(std::uint64_t count_per_class = 1000, std::uint64_t seed = 1,
                     Factory factory = Factory::kMam);
/// TC2 first, TC1 after 800 s, TC0 after 1400 s.
Scenario scenario_02(std::uint64_t count_per_class = 1000, std::uint64_t seed = 1,
                     Factory factory = Factory::kMam);

struct WorkloadItem {
  double arrival_time;
  ClassIndex class_index;
  Bandwidth bandwidth;
  double holding_time;
  friend bool operator==(const WorkloadItem&, const WorkloadItem&) = default;
};

/// Per class c, arrival k (k >= 1) is at start_delay + the sum of k
/// exponential interarrival draws; bandwidth is uniform on [min, max] kbps
/// and holding time exponential. The merged stream is ordered by time, then
/// class, then draw order.
std::vector<WorkloadItem> generate_workload(const Scenario& scenario, std::uint64_t seed);

/// Which admission engine a run uses.
struct EngineSpec {
  enum class Kind { kGbam, kOracle };
  Kind kind = Kind::kGbam;
  /// kGbam: factory applied to the scenario BCs; nullopt keeps the scenario's
  /// own configuration.
  std::optional<Factory> factory;
  OracleModel oracle = OracleModel::kMam;

  /// "gbam", "gbam:<factory>", "mam", "rdm" or "alloctc".
  static std::optional<EngineSpec> parse(const std::string& text);
  std::string label(const Scenario& scenario) const;
};

std::unique_ptr<AdmissionEngine> make_engine(const Scenario& scenario, const EngineSpec& spec,
                                             PackingMode mode = PackingMode::kLazy);

enum class EventKind { kArrival, kDeparture };
enum class RecordOutcome { kAdmitted, kBlocked, kReleased };

const char* to_string(RecordOutcome outcome);

struct TraceRecord {
  double time = 0.0;
  EventKind kind = EventKind::kArrival;
  LspId id;
  ClassIndex class_index = 0;
  Bandwidth bandwidth;
  RecordOutcome outcome = RecordOutcome::kAdmitted;
  Bandwidth shortfall;
  /// Post-event state.
  std::vector<Bandwidth> totals;
  std::vector<Bandwidth> borrowed_htl;
  std::vector<Bandwidth> borrowed_lth;

  bool changes_state() const {
    return outcome != RecordOutcome::kBlocked && !bandwidth.is_zero();
  }
  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct TraceMeta {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string engine;
  Bandwidth capacity;
  std::size_t class_count = 0;
  std::string config_digest;
  friend bool operator==(const TraceMeta&, const TraceMeta&) = default;
};

struct SimTrace {
  TraceMeta meta;
  std::vector<TraceRecord> records;
  friend bool operator==(const SimTrace&, const SimTrace&) = default;
};

/// Called after every processed event with the engine in its post-event state.
using StepObserver = std::function<void(const TraceRecord&, const AdmissionEngine&)>;

/// Runs the scenario's workload (seeded with scenario.seed) through `engine`,
/// which must be empty. Departures precede arrivals at equal timestamps, then
/// lower classes go first. Blocked requests are dropped. The run ends when
/// every arrival has been processed and every admitted LSP has departed.
SimTrace run(const Scenario& scenario, AdmissionEngine& engine, const StepObserver& observer = {});

SimTrace run(const Scenario& scenario, const EngineSpec& spec, const StepObserver& observer = {});

}  // namespace gbam
