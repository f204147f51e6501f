#pragma once

// Command implementations behind the `gbam` executable. Each returns the
// process exit status; data goes to `out`, diagnostics to `err`.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gbam/simkit.hpp"

namespace gbam::cli {

enum ExitStatus : int {
  kExitOk = 0,
  kExitFailure = 1,  // invalid content, failed validation, divergence
  kExitUsage = 2,    // bad flags, unreadable or unwritable paths
};

int cmd_validate(const std::filesystem::path& path, std::ostream& out, std::ostream& err);

/// The configuration and maximum-allocation tables for the MAM, RDM and
/// AllocTC factory configurations over the 40/35/25 split of an STM-4 link.
std::string render_tables();
int cmd_tables(std::ostream& out);

struct RunOptions {
  std::string engine = "gbam";
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir = "gbam-out";
  double warmup_s = 0.0;
};

int cmd_run(const std::filesystem::path& path, const RunOptions& options, std::ostream& out,
            std::ostream& err);

struct EnginePair {
  EngineSpec left;
  EngineSpec right;
  std::string text;
};

/// Parses "gbam:mam=mam,gbam:rdm=rdm"; nullopt on any malformed entry.
std::optional<std::vector<EnginePair>> parse_pairs(const std::string& text);

struct Divergence {
  std::size_t event_index = 0;
  TraceRecord left;
  TraceRecord right;
};

/// First record where the two runs disagree on the event, its outcome, the
/// shortfall or the resulting per-class totals.
std::optional<Divergence> first_divergence(const SimTrace& left, const SimTrace& right);

struct CompareOptions {
  std::string pairs = "gbam:mam=mam,gbam:rdm=rdm,gbam:alloctc=alloctc";
  std::uint64_t seeds = 20;
};

int cmd_compare(const std::filesystem::path& path, const CompareOptions& options,
                std::ostream& out, std::ostream& err);

}  // namespace gbam::cli
