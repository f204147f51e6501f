#pragma once

// Folds simulation traces into per-class load series and run summaries, and
// writes them as CSV.
//
// CSV conventions: UTF-8, comma separated, header row, '\n' line endings.
// Times and real-valued fields use the shortest decimal form that reads back
// to the same double ('.' as decimal point, no thousands separator);
// bandwidths are integer kbps.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbam/simkit.hpp"

namespace gbam {

class MalformedTrace : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadSample {
  double time;
  Bandwidth load;
  friend bool operator==(const LoadSample&, const LoadSample&) = default;
};

/// Per class, the load after each event that changed it. The series is a
/// right-continuous step function that is zero before its first sample.
struct LoadSeries {
  std::vector<std::vector<LoadSample>> per_class;

  /// Value at t (the last sample at or before t).
  Bandwidth at(ClassIndex c, double t) const;
  /// Samples on the grid 0, dt, 2dt, ... up to and including `end`.
  LoadSeries resample(double dt, double end) const;

  friend bool operator==(const LoadSeries&, const LoadSeries&) = default;
};

struct ClassSummary {
  std::uint64_t offered = 0;
  std::uint64_t admitted = 0;
  std::uint64_t blocked = 0;
  double blocking_ratio = 0.0;
  double mean_load_kbps = 0.0;
  Bandwidth peak_load;
  double mean_htl_borrowed_kbps = 0.0;
  double mean_lth_borrowed_kbps = 0.0;
};

struct RunSummary {
  Bandwidth capacity;
  double window_start = 0.0;
  double window_end = 0.0;
  std::vector<ClassSummary> classes;
  double mean_total_load_kbps = 0.0;
  Bandwidth peak_total_load;
  /// Time-averaged sum of class loads over capacity.
  double mean_utilization = 0.0;
};

struct FoldResult {
  LoadSeries series;
  RunSummary summary;
};

/// Time averages integrate the step functions exactly over
/// [warmup_s, last event time]; requests arriving before warmup_s are not
/// counted as offered. Throws MalformedTrace.
FoldResult fold_trace(const SimTrace& trace, double warmup_s = 0.0);

struct ExportedFiles {
  std::filesystem::path load;
  std::filesystem::path summary;
  std::filesystem::path meta;
};

/// Writes load.csv, summary.csv and meta.csv into `dir` (created if needed).
/// Throws CsvError naming the path on I/O failure.
ExportedFiles export_csv(const LoadSeries& series, const RunSummary& summary,
                         const TraceMeta& meta, const std::filesystem::path& dir);

/// Reads a load.csv written by export_csv.
LoadSeries parse_load_csv(const std::filesystem::path& path, std::size_t class_count);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace gbam
