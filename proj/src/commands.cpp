#include "gbam/commands.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "gbam/metrics.hpp"
#include "gbam/scenario_file.hpp"

namespace gbam::cli {

namespace {

// Left-aligned first column, right-aligned others, two spaces between.
class Grid {
 public:
  explicit Grid(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void print(std::ostream& out) const {
    std::vector<std::size_t> width;
    for (const auto& r : rows_) {
      width.resize(std::max(width.size(), r.size()));
      for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    for (const auto& r : rows_) {
      std::string line;
      for (std::size_t c = 0; c < r.size(); ++c) {
        const auto pad = std::string(width[c] - r[c].size(), ' ');
        if (c == 0) {
          line += r[c] + pad;
        } else {
          line += "  " + pad + r[c];
        }
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out << line << '\n';
    }
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

std::string kbps(Bandwidth b) { return std::to_string(b.kbps()); }

// part/whole as a percentage: integral when exact, else two decimals.
std::string percent(Bandwidth part, Bandwidth whole) {
  if (whole.is_zero()) return "-";
  const auto scaled = static_cast<unsigned __int128>(part.kbps()) * 100;
  if (scaled % whole.kbps() == 0) {
    return std::to_string(static_cast<std::uint64_t>(scaled / whole.kbps())) + "%";
  }
  std::ostringstream s;
  s << std::fixed << std::setprecision(2)
    << 100.0 * static_cast<double>(part.kbps()) / static_cast<double>(whole.kbps()) << '%';
  return s.str();
}

std::string class_label(ClassIndex i) { return "TC" + std::to_string(i); }

using Unit = std::string (*)(Bandwidth);

void print_config_table(std::ostream& out, const BamConfig& cfg, Unit unit,
                        const std::string& unit_name) {
  Grid g({"class", "BC (" + unit_name + ")", "HTL (%)", "HTL (" + unit_name + ")", "LTH (%)",
          "LTH (" + unit_name + ")", "Private (" + unit_name + ")"});
  for (ClassIndex i = 0; i < cfg.class_count(); ++i) {
    g.add({class_label(i), unit(cfg.bc(i)), percent(cfg.htl_cap(i), cfg.bc(i)),
           unit(cfg.htl_cap(i)), percent(cfg.lth_cap(i), cfg.bc(i)), unit(cfg.lth_cap(i)),
           unit(private_bandwidth(cfg, i))});
  }
  g.print(out);
}

// One row per class: BC, what each other class can lend it in each
// direction, and the resulting maximum allocation.
void print_max_table(std::ostream& out, const BamConfig& cfg, Unit unit,
                     const std::string& unit_name) {
  const std::size_t n = cfg.class_count();
  std::vector<std::string> header{"class", "BC"};
  for (ClassIndex j = 0; j < n; ++j) header.push_back("HTL " + class_label(j));
  header.push_back("HTL total");
  for (ClassIndex j = 0; j < n; ++j) header.push_back("LTH " + class_label(j));
  header.push_back("LTH total");
  header.push_back("Max N (" + unit_name + ")");
  Grid g(header);
  for (ClassIndex i = 0; i < n; ++i) {
    std::vector<std::string> row{class_label(i), unit(cfg.bc(i))};
    Bandwidth htl_total, lth_total;
    for (ClassIndex j = 0; j < n; ++j) {
      if (j > i) {
        htl_total += cfg.htl_cap(j);
        row.push_back(unit(cfg.htl_cap(j)));
      } else {
        row.push_back("-");
      }
    }
    row.push_back(unit(htl_total));
    for (ClassIndex j = 0; j < n; ++j) {
      if (j < i) {
        lth_total += cfg.lth_cap(j);
        row.push_back(unit(cfg.lth_cap(j)));
      } else {
        row.push_back("-");
      }
    }
    row.push_back(unit(lth_total));
    row.push_back(unit(static_max_allocation(cfg, i)));
    g.add(std::move(row));
  }
  g.print(out);
}

void print_errors(std::ostream& err, const std::string& prefix,
                  const std::vector<ConfigError>& errors) {
  for (const auto& e : errors) err << prefix << e.message() << '\n';
}

// Loads a scenario, mapping failures to exit statuses. Returns nullopt after
// reporting on `err`.
std::optional<Scenario> load(const std::filesystem::path& path, std::ostream& err, int& status) {
  try {
    return load_scenario_file(path);
  } catch (const ScenarioIoError& e) {
    err << "error: " << e.what() << '\n';
    status = kExitUsage;
  } catch (const ScenarioFileError& e) {
    for (const auto& p : e.problems()) err << "error: " << p << '\n';
    status = kExitFailure;
  }
  return std::nullopt;
}

std::string totals_text(const std::vector<Bandwidth>& totals) {
  std::string s = "[";
  for (std::size_t i = 0; i < totals.size(); ++i) s += (i ? "," : "") + kbps(totals[i]);
  return s + "]";
}

std::string record_text(const TraceRecord& r) {
  std::ostringstream s;
  s << (r.kind == EventKind::kArrival ? "arrival" : "departure") << " t=" << format_double(r.time)
    << " lsp=" << r.id.value << " class=" << r.class_index << " bw=" << r.bandwidth.kbps()
    << " -> " << to_string(r.outcome);
  if (r.outcome == RecordOutcome::kBlocked) s << " (shortfall " << r.shortfall.kbps() << ")";
  s << " totals=" << totals_text(r.totals);
  return s.str();
}

}  // namespace

int cmd_validate(const std::filesystem::path& path, std::ostream& out, std::ostream& err) {
  int status = kExitOk;
  const auto scenario = load(path, err, status);
  if (!scenario) return status;

  try {
    const auto cfg = scenario->bam_config();
    out << "scenario: " << scenario->name << '\n'
        << "capacity: " << kbps(cfg.capacity()) << " kbps (" << format_mbps(cfg.capacity())
        << " Mbps)\n"
        << "factory: " << to_string(scenario->config.factory) << '\n';
    Grid g({"class", "BC", "HTL", "LTH", "PRIVATE", "Max N", "effective Max N"});
    for (ClassIndex i = 0; i < cfg.class_count(); ++i) {
      g.add({class_label(i), kbps(cfg.bc(i)), kbps(cfg.htl_cap(i)), kbps(cfg.lth_cap(i)),
             kbps(private_bandwidth(cfg, i)), kbps(static_max_allocation(cfg, i)),
             kbps(effective_max_allocation(cfg, i))});
    }
    g.print(out);
    out << "sum of BCs: " << kbps(cfg.bc_sum()) << " kbps\n"
        << "digest: " << cfg.digest() << '\n'
        << "valid\n";
    return kExitOk;
  } catch (const InvalidConfig& e) {
    print_errors(err, "error: " + path.string() + ": ", e.errors());
  } catch (const InvalidScenario& e) {
    err << "error: " << path.string() << ": " << e.what() << '\n';
  }
  return kExitFailure;
}

std::string render_tables() {
  std::ostringstream out;
  const auto bcs = reference_bcs();
  const Bandwidth cap = kStm4Capacity;
  out << "Link capacity: " << kbps(cap) << " kbps (" << format_mbps(cap) << " Mbps)\n\n";
  out << "Bandwidth constraints per traffic class\n";
  Grid bc_grid({"BC", "Max BC (%)", "Max BC (kbps)", "Max BC (Mbps)"});
  for (ClassIndex i = 0; i < bcs.size(); ++i) {
    bc_grid.add({"BC" + std::to_string(i), percent(bcs[i], cap), kbps(bcs[i]),
                 format_mbps(bcs[i])});
  }
  bc_grid.print(out);

  struct Model {
    const char* title;
    BamConfig cfg;
  };
  const Model models[] = {
      {"MAM", mam_config(bcs, cap)},
      {"RDM", rdm_config(bcs, cap)},
      {"AllocTC-Sharing", alloctc_config(bcs, cap)},
  };
  for (const auto& m : models) {
    out << "\n== G-BAM configured as " << m.title << " ==\n";
    out << "\nConfiguration (kbps)\n";
    print_config_table(out, m.cfg, kbps, "kbps");
    out << "\nConfiguration (Mbps)\n";
    print_config_table(out, m.cfg, format_mbps, "Mbps");
    out << "\nMaximum allocation per class (kbps)\n";
    print_max_table(out, m.cfg, kbps, "kbps");
    out << "\nMaximum allocation per class (Mbps)\n";
    print_max_table(out, m.cfg, format_mbps, "Mbps");
  }
  return out.str();
}

int cmd_tables(std::ostream& out) {
  out << render_tables();
  return kExitOk;
}

int cmd_run(const std::filesystem::path& path, const RunOptions& options, std::ostream& out,
            std::ostream& err) {
  int status = kExitOk;
  auto scenario = load(path, err, status);
  if (!scenario) return status;
  if (options.seed) scenario->seed = *options.seed;

  const auto spec = EngineSpec::parse(options.engine);
  if (!spec) {
    err << "error: unknown engine '" << options.engine
        << "' (expected gbam, gbam:<factory>, mam, rdm or alloctc)\n";
    return kExitUsage;
  }

  std::unique_ptr<AdmissionEngine> engine;
  try {
    engine = make_engine(*scenario, *spec);
  } catch (const InvalidConfig& e) {
    print_errors(err, "error: " + path.string() + ": ", e.errors());
    return kExitFailure;
  } catch (const InvalidScenario& e) {
    err << "error: " << path.string() << ": " << e.what() << '\n';
    return kExitFailure;
  }

  std::vector<std::string> violations;
  std::size_t step = 0;
  auto observer = [&](const TraceRecord& rec, const AdmissionEngine& eng) {
    ++step;
    const auto* link = dynamic_cast<const LinkAllocator*>(&eng);
    if (!link || !violations.empty()) return;
    auto found = check_invariants(link->config(), link->totals(), link->packing());
    for (auto& v : found) {
      violations.push_back("step " + std::to_string(step) + " (" + record_text(rec) + "): " + v);
    }
  };

  const auto trace = run(*scenario, *engine, observer);
  if (!violations.empty()) {
    err << "internal error: allocator invariants violated\n";
    for (const auto& v : violations) err << "  " << v << '\n';
    return kExitFailure;
  }

  FoldResult folded;
  try {
    folded = fold_trace(trace, options.warmup_s);
  } catch (const MalformedTrace& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitFailure;
  }

  ExportedFiles files;
  try {
    files = export_csv(folded.series, folded.summary, trace.meta, options.out_dir);
  } catch (const CsvError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const auto& s = folded.summary;
  out << "scenario: " << trace.meta.scenario << "  engine: " << trace.meta.engine
      << "  seed: " << trace.meta.seed << '\n'
      << "window: [" << format_double(s.window_start) << ", " << format_double(s.window_end)
      << "] s\n";
  Grid g({"class", "offered", "admitted", "blocked", "blocking", "mean load (kbps)",
          "peak load (kbps)", "mean HTL borrowed", "mean LTH borrowed"});
  auto fixed = [](double v, int digits) {
    std::ostringstream o;
    o << std::fixed << std::setprecision(digits) << v;
    return o.str();
  };
  for (ClassIndex c = 0; c < s.classes.size(); ++c) {
    const auto& cs = s.classes[c];
    g.add({class_label(c), std::to_string(cs.offered), std::to_string(cs.admitted),
           std::to_string(cs.blocked), fixed(cs.blocking_ratio, 4), fixed(cs.mean_load_kbps, 1),
           kbps(cs.peak_load), fixed(cs.mean_htl_borrowed_kbps, 1),
           fixed(cs.mean_lth_borrowed_kbps, 1)});
  }
  g.add({"link", "", "", "", "", fixed(s.mean_total_load_kbps, 1), kbps(s.peak_total_load), "",
         ""});
  g.print(out);
  out << "mean utilization: " << fixed(s.mean_utilization, 4) << '\n'
      << "wrote " << files.load.string() << ", " << files.summary.string() << ", "
      << files.meta.string() << '\n';
  return kExitOk;
}

std::optional<std::vector<EnginePair>> parse_pairs(const std::string& text) {
  std::vector<EnginePair> pairs;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) return std::nullopt;
    auto left = EngineSpec::parse(item.substr(0, eq));
    auto right = EngineSpec::parse(item.substr(eq + 1));
    if (!left || !right) return std::nullopt;
    pairs.push_back({*left, *right, item});
  }
  return pairs;
}

std::optional<Divergence> first_divergence(const SimTrace& left, const SimTrace& right) {
  const std::size_t n = std::min(left.records.size(), right.records.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = left.records[i];
    const auto& b = right.records[i];
    if (a.kind != b.kind || a.id != b.id || a.outcome != b.outcome ||
        a.shortfall != b.shortfall || a.totals != b.totals) {
      return Divergence{i, a, b};
    }
  }
  if (left.records.size() != right.records.size()) {
    Divergence d;
    d.event_index = n;
    if (n < left.records.size()) d.left = left.records[n];
    if (n < right.records.size()) d.right = right.records[n];
    return d;
  }
  return std::nullopt;
}

int cmd_compare(const std::filesystem::path& path, const CompareOptions& options,
                std::ostream& out, std::ostream& err) {
  int status = kExitOk;
  auto scenario = load(path, err, status);
  if (!scenario) return status;

  const auto pairs = parse_pairs(options.pairs);
  if (!pairs || pairs->empty()) {
    err << "error: malformed --pairs '" << options.pairs << "' (expected e.g. gbam:mam=mam)\n";
    return kExitUsage;
  }
  if (options.seeds == 0) {
    out << "no runs\n";
    return kExitOk;
  }

  const std::uint64_t base_seed = scenario->seed;
  bool all_equivalent = true;
  for (const auto& pair : *pairs) {
    std::uint64_t diverged = 0;
    for (std::uint64_t k = 0; k < options.seeds; ++k) {
      scenario->seed = base_seed + k;
      SimTrace left, right;
      try {
        left = run(*scenario, pair.left);
        right = run(*scenario, pair.right);
      } catch (const InvalidConfig& e) {
        print_errors(err, "error: " + path.string() + ": ", e.errors());
        return kExitFailure;
      } catch (const InvalidScenario& e) {
        err << "error: " << path.string() << ": " << e.what() << '\n';
        return kExitFailure;
      }
      const auto d = first_divergence(left, right);
      if (!d) continue;
      ++diverged;
      if (diverged == 1) {
        err << pair.text << " seed " << scenario->seed << ": first divergence at event "
            << d->event_index << '\n'
            << "  " << left.meta.engine << ": " << record_text(d->left) << '\n'
            << "  " << right.meta.engine << ": " << record_text(d->right) << '\n';
      }
    }
    if (diverged == 0) {
      out << pair.text << ": equivalent on " << options.seeds << " seed(s)\n";
    } else {
      all_equivalent = false;
      out << pair.text << ": diverged on " << diverged << " of " << options.seeds
          << " seed(s)\n";
    }
  }
  return all_equivalent ? kExitOk : kExitFailure;
}

}  // namespace gbam::cli
