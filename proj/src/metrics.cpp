#include "gbam/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

namespace gbam {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Bandwidth LoadSeries::at(ClassIndex c, double t) const {
  const auto& s = per_class.at(c);
  auto it = std::upper_bound(s.begin(), s.end(), t,
                             [](double x, const LoadSample& smp) { return x < smp.time; });
  return it == s.begin() ? Bandwidth{} : std::prev(it)->load;
}

LoadSeries LoadSeries::resample(double dt, double end) const {
  if (!(dt > 0.0)) throw std::invalid_argument("resample: dt must be positive");
  LoadSeries out;
  out.per_class.resize(per_class.size());
  for (ClassIndex c = 0; c < per_class.size(); ++c) {
    for (std::uint64_t k = 0;; ++k) {
      const double t = static_cast<double>(k) * dt;
      if (t > end) break;
      out.per_class[c].push_back({t, at(c, t)});
    }
  }
  return out;
}

namespace {

// Neumaier-compensated sum in extended precision.
class Integral {
 public:
  void add(long double v) {
    const long double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0;
  long double comp_ = 0;
};

[[noreturn]] void malformed(std::size_t index, const std::string& why) {
  throw MalformedTrace("trace record " + std::to_string(index) + ": " + why);
}

}  // namespace

FoldResult fold_trace(const SimTrace& trace, double warmup_s) {
  const std::size_t n = trace.meta.class_count;
  FoldResult out;
  out.series.per_class.resize(n);
  auto& sum = out.summary;
  sum.capacity = trace.meta.capacity;
  sum.classes.resize(n);
  sum.window_start = warmup_s;
  sum.window_end = warmup_s;
  if (trace.records.empty()) return out;

  const double end = std::max(warmup_s, trace.records.back().time);
  sum.window_end = end;

  std::vector<Bandwidth> load(n), htl(n), lth(n);
  std::vector<Integral> load_int(n), htl_int(n), lth_int(n);
  Integral total_int;
  Bandwidth peak_total;
  std::map<LspId, std::pair<ClassIndex, Bandwidth>> live;
  double cursor = warmup_s;
  double last_time = -INFINITY;

  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const auto& r = trace.records[k];
    if (!(r.time >= last_time)) malformed(k, "time goes backwards");
    last_time = r.time;
    if (r.class_index >= n) malformed(k, "class out of range");
    if (r.totals.size() != n || r.borrowed_htl.size() != n || r.borrowed_lth.size() != n) {
      malformed(k, "per-class vectors have the wrong length");
    }

    std::vector<Bandwidth> expected = load;
    if (r.kind == EventKind::kArrival) {
      if (r.outcome == RecordOutcome::kReleased) malformed(k, "arrival marked released");
      if (r.outcome == RecordOutcome::kAdmitted) {
        if (!live.emplace(r.id, std::make_pair(r.class_index, r.bandwidth)).second) {
          malformed(k, "LSP admitted twice");
        }
        expected[r.class_index] += r.bandwidth;
      }
    } else {
      if (r.outcome != RecordOutcome::kReleased) malformed(k, "departure not marked released");
      auto it = live.find(r.id);
      if (it == live.end() || it->second != std::make_pair(r.class_index, r.bandwidth)) {
        malformed(k, "departure of an LSP that is not active");
      }
      live.erase(it);
      if (r.bandwidth > expected[r.class_index]) malformed(k, "load goes negative");
      expected[r.class_index] -= r.bandwidth;
    }
    if (expected != r.totals) malformed(k, "totals inconsistent with the event");

    if (r.time > cursor) {
      const long double dt = static_cast<long double>(r.time) - cursor;
      Bandwidth total;
      for (ClassIndex c = 0; c < n; ++c) {
        load_int[c].add(static_cast<long double>(load[c].kbps()) * dt);
        htl_int[c].add(static_cast<long double>(htl[c].kbps()) * dt);
        lth_int[c].add(static_cast<long double>(lth[c].kbps()) * dt);
        total += load[c];
        sum.classes[c].peak_load = std::max(sum.classes[c].peak_load, load[c]);
      }
      total_int.add(static_cast<long double>(total.kbps()) * dt);
      peak_total = std::max(peak_total, total);
      cursor = r.time;
    }

    load = r.totals;
    htl = r.borrowed_htl;
    lth = r.borrowed_lth;
    if (r.changes_state()) out.series.per_class[r.class_index].push_back({r.time, load[r.class_index]});

    if (r.time >= warmup_s) {
      Bandwidth total;
      for (ClassIndex c = 0; c < n; ++c) {
        sum.classes[c].peak_load = std::max(sum.classes[c].peak_load, load[c]);
        total += load[c];
      }
      peak_total = std::max(peak_total, total);
      if (r.kind == EventKind::kArrival) {
        auto& cs = sum.classes[r.class_index];
        ++cs.offered;
        (r.outcome == RecordOutcome::kAdmitted ? cs.admitted : cs.blocked) += 1;
      }
    }
  }

  const long double span = static_cast<long double>(end) - warmup_s;
  for (ClassIndex c = 0; c < n; ++c) {
    auto& cs = sum.classes[c];
    cs.blocking_ratio =
        cs.offered == 0 ? 0.0 : static_cast<double>(cs.blocked) / static_cast<double>(cs.offered);
    if (span > 0) {
      cs.mean_load_kbps = static_cast<double>(load_int[c].value() / span);
      cs.mean_htl_borrowed_kbps = static_cast<double>(htl_int[c].value() / span);
      cs.mean_lth_borrowed_kbps = static_cast<double>(lth_int[c].value() / span);
    }
  }
  if (span > 0) {
    sum.mean_total_load_kbps = static_cast<double>(total_int.value() / span);
    if (!sum.capacity.is_zero()) {
      sum.mean_utilization =
          static_cast<double>(total_int.value() / span / sum.capacity.kbps());
    }
  }
  sum.peak_total_load = peak_total;
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CsvError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw CsvError("write to '" + path.string() + "' failed");
}

std::string utilization_of(double kbps, Bandwidth capacity) {
  return format_double(capacity.is_zero() ? 0.0 : kbps / static_cast<double>(capacity.kbps()));
}

}  // namespace

ExportedFiles export_csv(const LoadSeries& series, const RunSummary& summary,
                         const TraceMeta& meta, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw CsvError("cannot create directory '" + dir.string() + "': " + ec.message());

  ExportedFiles files{dir / "load.csv", dir / "summary.csv", dir / "meta.csv"};

  {
    // Merge the per-class series back into time order.
    struct Row {
      double time;
      ClassIndex c;
      std::size_t k;
    };
    std::vector<Row> rows;
    for (ClassIndex c = 0; c < series.per_class.size(); ++c) {
      for (std::size_t k = 0; k < series.per_class[c].size(); ++k) {
        rows.push_back({series.per_class[c][k].time, c, k});
      }
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.time < b.time; });
    auto out = open_for_write(files.load);
    out << "time_s,class,load_kbps\n";
    for (const auto& r : rows) {
      out << format_double(r.time) << ',' << r.c << ','
          << series.per_class[r.c][r.k].load.kbps() << '\n';
    }
    finish(out, files.load);
  }

  {
    auto out = open_for_write(files.summary);
    out << "class,offered,admitted,blocked,blocking_ratio,mean_load_kbps,peak_load_kbps,"
           "mean_htl_borrowed_kbps,mean_lth_borrowed_kbps,utilization\n";
    if (!summary.classes.empty()) {
      ClassSummary link;
      for (ClassIndex c = 0; c < summary.classes.size(); ++c) {
        const auto& s = summary.classes[c];
        out << c << ',' << s.offered << ',' << s.admitted << ',' << s.blocked << ','
            << format_double(s.blocking_ratio) << ',' << format_double(s.mean_load_kbps) << ','
            << s.peak_load.kbps() << ',' << format_double(s.mean_htl_borrowed_kbps) << ','
            << format_double(s.mean_lth_borrowed_kbps) << ','
            << utilization_of(s.mean_load_kbps, summary.capacity) << '\n';
        link.offered += s.offered;
        link.admitted += s.admitted;
        link.blocked += s.blocked;
        link.mean_htl_borrowed_kbps += s.mean_htl_borrowed_kbps;
        link.mean_lth_borrowed_kbps += s.mean_lth_borrowed_kbps;
      }
      const double ratio = link.offered == 0 ? 0.0
                                             : static_cast<double>(link.blocked) /
                                                   static_cast<double>(link.offered);
      out << "link," << link.offered << ',' << link.admitted << ',' << link.blocked << ','
          << format_double(ratio) << ',' << format_double(summary.mean_total_load_kbps) << ','
          << summary.peak_total_load.kbps() << ','
          << format_double(link.mean_htl_borrowed_kbps) << ','
          << format_double(link.mean_lth_borrowed_kbps) << ','
          << format_double(summary.mean_utilization) << '\n';
    }
    finish(out, files.summary);
  }

  {
    auto out = open_for_write(files.meta);
    out << "key,value\n";
    out << "scenario," << csv_field(meta.scenario) << '\n';
    out << "seed," << meta.seed << '\n';
    out << "engine," << csv_field(meta.engine) << '\n';
    out << "config_digest," << meta.config_digest << '\n';
    out << "capacity_kbps," << meta.capacity.kbps() << '\n';
    out << "class_count," << meta.class_count << '\n';
    out << "window_start_s," << format_double(summary.window_start) << '\n';
    out << "window_end_s," << format_double(summary.window_end) << '\n';
    finish(out, files.meta);
  }
  return files;
}

LoadSeries parse_load_csv(const std::filesystem::path& path, std::size_t class_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open '" + path.string() + "'");
  LoadSeries series;
  series.per_class.resize(class_count);

  std::string line;
  if (!std::getline(in, line) || line != "time_s,class,load_kbps") {
    throw CsvError("'" + path.string() + "': missing or unexpected header");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fail = [&] {
      throw CsvError("'" + path.string() + "' line " + std::to_string(line_no) + ": bad row");
    };
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) fail();
    double t = 0;
    std::size_t cls = 0;
    std::uint64_t kbps = 0;
    const char* b = line.data();
    if (std::from_chars(b, b + c1, t).ec != std::errc{} ||
        std::from_chars(b + c1 + 1, b + c2, cls).ec != std::errc{} ||
        std::from_chars(b + c2 + 1, b + line.size(), kbps).ec != std::errc{}) {
      fail();
    }
    if (cls >= class_count) fail();
    series.per_class[cls].push_back({t, Bandwidth{kbps}});
  }
  return series;
}

}  // namespace gbam
