#include "gbam/scenario_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace gbam {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : "; ") + s;
  return out;
}

}  // namespace

ScenarioFileError::ScenarioFileError(std::vector<std::string> problems)
    : std::runtime_error("invalid scenario file: " + join(problems)),
      problems_(std::move(problems)) {}

std::optional<Bandwidth> percent_of(Bandwidth capacity, const std::string& text) {
  // value = mantissa * 10^exponent
  unsigned __int128 mantissa = 0;
  int exponent = 0;
  int digits = 0;
  bool seen_point = false;
  std::size_t i = 0;
  for (; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch >= '0' && ch <= '9') {
      if (mantissa == 0 && ch == '0') {
        if (seen_point) --exponent;
        continue;
      }
      if (++digits > 30) return std::nullopt;
      mantissa = mantissa * 10 + static_cast<unsigned>(ch - '0');
      if (seen_point) --exponent;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') return std::nullopt;
    int e = 0;
    const char* first = text.data() + i + 1;
    if (*first == '+') ++first;
    auto res = std::from_chars(first, text.data() + text.size(), e);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
    exponent += e;
  }
  if (mantissa == 0) return Bandwidth{};

  // kbps = capacity * mantissa * 10^exponent / 100
  unsigned __int128 num = static_cast<unsigned __int128>(capacity.kbps()) * mantissa;
  if (capacity.kbps() != 0 && num / capacity.kbps() != mantissa) return std::nullopt;
  exponent -= 2;
  for (; exponent > 0; --exponent) {
    if (num > (~static_cast<unsigned __int128>(0)) / 10) return std::nullopt;
    num *= 10;
  }
  for (; exponent < 0; ++exponent) {
    if (num % 10 != 0) return std::nullopt;
    num /= 10;
  }
  if (num > UINT64_MAX) return std::nullopt;
  return Bandwidth{static_cast<std::uint64_t>(num)};
}

namespace {

class Reader {
 public:
  std::vector<std::string> problems;

  void problem(const std::string& where, const std::string& what) {
    problems.push_back(where + ": " + what);
  }

  void reject_unknown(const json& obj, const std::string& where,
                      const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!allowed.count(it.key())) problem(where + "." + it.key(), "unknown key");
    }
  }

  std::optional<std::uint64_t> unsigned_int(const json& v, const std::string& where) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    problem(where, "expected a non-negative integer");
    return std::nullopt;
  }

  std::optional<double> seconds(const json& v, const std::string& where) {
    if (!v.is_number()) {
      problem(where, "expected a number of seconds");
      return std::nullopt;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d) || d < 0) {
      problem(where, "must be finite and non-negative");
      return std::nullopt;
    }
    return d;
  }

  // Reads "<stem>_kbps" or "<stem>_percent"; exactly one must be present
  // when `required`.
  std::optional<Bandwidth> amount(const json& obj, const std::string& where,
                                  const std::string& stem, Bandwidth capacity, bool required) {
    const bool has_kbps = obj.contains(stem + "_kbps");
    const bool has_pct = obj.contains(stem + "_percent");
    if (has_kbps && has_pct) {
      problem(where, stem + "_kbps and " + stem + "_percent are mutually exclusive");
      return std::nullopt;
    }
    if (has_kbps) {
      auto v = unsigned_int(obj.at(stem + "_kbps"), where + "." + stem + "_kbps");
      if (v) return Bandwidth{*v};
      return std::nullopt;
    }
    if (has_pct) {
      const auto key = where + "." + stem + "_percent";
      const json& v = obj.at(stem + "_percent");
      std::string text;
      if (v.is_number_unsigned()) {
        text = std::to_string(v.get<std::uint64_t>());
      } else if (v.is_number_integer()) {
        text = std::to_string(v.get<std::int64_t>());
      } else if (v.is_number_float()) {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, v.get<double>());
        text.assign(buf, res.ptr);
      } else {
        problem(key, "expected a number");
        return std::nullopt;
      }
      if (!text.empty() && text[0] == '-') {
        problem(key, "must be non-negative");
        return std::nullopt;
      }
      auto bw = percent_of(capacity, text);
      if (!bw) problem(key, text + "% of " + std::to_string(capacity.kbps()) +
                                " kbps is not a whole number of kbps");
      return bw;
    }
    if (required) problem(where, "missing " + stem + "_kbps or " + stem + "_percent");
    return std::nullopt;
  }
};

}  // namespace

Scenario parse_scenario_json(const std::string& text, const std::string& default_name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioFileError({std::string("JSON syntax error: ") + e.what()});
  }
  Reader rd;
  if (!doc.is_object()) throw ScenarioFileError({"top level: expected a JSON object"});
  rd.reject_unknown(doc, "$",
                    {"name", "seed", "capacity_kbps", "factory", "classes", "workloads"});

  Scenario s;
  s.name = default_name;
  if (doc.contains("name")) {
    if (doc["name"].is_string()) {
      s.name = doc["name"].get<std::string>();
    } else {
      rd.problem("$.name", "expected a string");
    }
  }
  if (doc.contains("seed")) {
    if (auto v = rd.unsigned_int(doc["seed"], "$.seed")) s.seed = *v;
  }
  if (!doc.contains("capacity_kbps")) {
    rd.problem("$", "missing capacity_kbps");
  } else if (auto v = rd.unsigned_int(doc["capacity_kbps"], "$.capacity_kbps")) {
    s.capacity = Bandwidth{*v};
  }

  std::optional<Factory> factory;
  if (doc.contains("factory")) {
    const auto& f = doc["factory"];
    factory = f.is_string() ? parse_factory(f.get<std::string>()) : std::nullopt;
    if (!factory || *factory == Factory::kExplicit) {
      rd.problem("$.factory", "expected one of mam, rdm, alloctc, grdm");
      factory.reset();
    }
  }
  s.config.factory = factory.value_or(Factory::kExplicit);
  const bool explicit_caps = !doc.contains("factory");
  const bool grdm = factory == Factory::kGrdm;

  if (!doc.contains("classes") || !doc["classes"].is_array()) {
    rd.problem("$", "missing classes array");
  } else {
    const auto& classes = doc["classes"];
    for (std::size_t i = 0; i < classes.size(); ++i) {
      const auto where = "$.classes[" + std::to_string(i) + "]";
      const auto& c = classes[i];
      if (!c.is_object()) {
        rd.problem(where, "expected an object");
        continue;
      }
      std::set<std::string> allowed{"bc_kbps", "bc_percent"};
      if (explicit_caps) allowed.insert({"htl_kbps", "htl_percent", "lth_kbps", "lth_percent"});
      if (grdm) allowed.insert({"private_kbps", "private_percent"});
      for (auto it = c.begin(); it != c.end(); ++it) {
        if (allowed.count(it.key())) continue;
        const bool is_cap = it.key().rfind("htl_", 0) == 0 || it.key().rfind("lth_", 0) == 0;
        rd.problem(where + "." + it.key(),
                   is_cap ? "cap keys are not allowed when a factory derives the caps"
                          : "unknown key");
      }
      const auto bc = rd.amount(c, where, "bc", s.capacity, true).value_or(Bandwidth{});
      s.config.bcs.push_back(bc);
      if (explicit_caps) {
        const auto htl = rd.amount(c, where, "htl", s.capacity, true).value_or(Bandwidth{});
        const auto lth = rd.amount(c, where, "lth", s.capacity, true).value_or(Bandwidth{});
        s.config.classes.push_back({bc, htl, lth});
      }
      if (grdm) {
        s.config.privates.push_back(
            rd.amount(c, where, "private", s.capacity, true).value_or(Bandwidth{}));
      }
    }
  }

  const std::size_t n = s.config.bcs.size();
  if (doc.contains("workloads")) {
    const auto& ws = doc["workloads"];
    if (!ws.is_array()) {
      rd.problem("$.workloads", "expected an array");
    } else {
      if (ws.size() != n) {
        rd.problem("$.workloads", std::to_string(ws.size()) + " entries for " +
                                      std::to_string(n) + " classes");
      }
      for (std::size_t i = 0; i < ws.size(); ++i) {
        const auto where = "$.workloads[" + std::to_string(i) + "]";
        const auto& w = ws[i];
        ClassWorkload cw;
        if (!w.is_object()) {
          rd.problem(where, "expected an object");
          s.workloads.push_back(cw);
          continue;
        }
        rd.reject_unknown(w, where,
                          {"interarrival_mean_s", "start_delay_s", "count", "bandwidth_min_kbps",
                           "bandwidth_max_kbps", "holding_mean_s"});
        auto sec = [&](const char* key, double& dst) {
          if (w.contains(key)) {
            if (auto v = rd.seconds(w[key], where + "." + key)) dst = *v;
          }
        };
        sec("interarrival_mean_s", cw.interarrival_mean_s);
        sec("start_delay_s", cw.start_delay_s);
        sec("holding_mean_s", cw.holding_mean_s);
        if (w.contains("count")) {
          if (auto v = rd.unsigned_int(w["count"], where + ".count")) cw.count = *v;
        }
        if (w.contains("bandwidth_min_kbps")) {
          if (auto v = rd.unsigned_int(w["bandwidth_min_kbps"], where + ".bandwidth_min_kbps")) {
            cw.bandwidth_min = Bandwidth{*v};
          }
        }
        if (w.contains("bandwidth_max_kbps")) {
          if (auto v = rd.unsigned_int(w["bandwidth_max_kbps"], where + ".bandwidth_max_kbps")) {
            cw.bandwidth_max = Bandwidth{*v};
          }
        }
        if (cw.bandwidth_min > cw.bandwidth_max) {
          rd.problem(where, "bandwidth_min_kbps exceeds bandwidth_max_kbps");
        }
        s.workloads.push_back(cw);
      }
    }
  } else {
    s.workloads.assign(n, ClassWorkload{});
  }

  if (!rd.problems.empty()) throw ScenarioFileError(std::move(rd.problems));
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioIoError("cannot read scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario_json(buf.str(), path.stem().string());
  } catch (const ScenarioFileError& e) {
    std::vector<std::string> problems;
    for (const auto& p : e.problems()) problems.push_back(path.string() + ": " + p);
    throw ScenarioFileError(std::move(problems));
  }
}

}  // namespace gbam
