#include "gbam/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

#include "gbam/rng.hpp"

namespace gbam {

const char* to_string(Factory f) {
  switch (f) {
    case Factory::kMam:
      return "mam";
    case Factory::kRdm:
      return "rdm";
    case Factory::kAllocTc:
      return "alloctc";
    case Factory::kGrdm:
      return "grdm";
    case Factory::kExplicit:
      return "explicit";
  }
  return "?";
}

std::optional<Factory> parse_factory(const std::string& text) {
  for (auto f : {Factory::kMam, Factory::kRdm, Factory::kAllocTc, Factory::kGrdm,
                 Factory::kExplicit}) {
    if (text == to_string(f)) return f;
  }
  return std::nullopt;
}

const char* to_string(RecordOutcome outcome) {
  switch (outcome) {
    case RecordOutcome::kAdmitted:
      return "admitted";
    case RecordOutcome::kBlocked:
      return "blocked";
    case RecordOutcome::kReleased:
      return "released";
  }
  return "?";
}

namespace {

bool finite_non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void Scenario::validate() const {
  const std::size_t n = class_count();
  if (workloads.size() != n) {
    throw InvalidScenario("scenario '" + name + "': " + std::to_string(workloads.size()) +
                          " workloads for " + std::to_string(n) + " classes");
  }
  for (std::size_t c = 0; c < n; ++c) {
    const auto& w = workloads[c];
    const auto where = "scenario '" + name + "' class " + std::to_string(c) + ": ";
    if (!finite_non_negative(w.interarrival_mean_s) || !finite_non_negative(w.start_delay_s) ||
        !finite_non_negative(w.holding_mean_s)) {
      throw InvalidScenario(where + "times must be finite and non-negative");
    }
    if (w.bandwidth_min > w.bandwidth_max) {
      throw InvalidScenario(where + "bandwidth_min exceeds bandwidth_max");
    }
  }
  if (config.factory == Factory::kGrdm && config.privates.size() != n) {
    throw InvalidScenario("scenario '" + name + "': grdm needs one private value per class");
  }
  if (config.factory == Factory::kExplicit && config.classes.size() != n) {
    throw InvalidScenario("scenario '" + name + "': explicit config needs caps per class");
  }
  bam_config();
}

BamConfig Scenario::bam_config() const { return bam_config(config.factory); }

BamConfig Scenario::bam_config(Factory factory) const {
  switch (factory) {
    case Factory::kMam:
      return mam_config(config.bcs, capacity);
    case Factory::kRdm:
      return rdm_config(config.bcs, capacity);
    case Factory::kAllocTc:
      return alloctc_config(config.bcs, capacity);
    case Factory::kGrdm:
      if (config.privates.size() != config.bcs.size()) {
        throw InvalidScenario("scenario '" + name + "' has no private values for grdm");
      }
      return grdm_config(config.bcs, config.privates, capacity);
    case Factory::kExplicit:
      if (config.factory != Factory::kExplicit) return bam_config(config.factory);
      return validate_config(RawConfig{capacity, config.classes}).value();
  }
  throw std::logic_error("unknown factory");
}

std::vector<Bandwidth> reference_bcs() {
  return {Bandwidth{248800}, Bandwidth{217700}, Bandwidth{155500}};
}

namespace {

Scenario reference_scenario(std::string name, std::uint64_t count, std::uint64_t seed,
                        Factory factory, const std::vector<double>& delays) {
  Scenario s;
  s.name = std::move(name);
  s.config.factory = factory;
  s.config.bcs = reference_bcs();
  if (factory == Factory::kGrdm) s.config.privates.assign(s.config.bcs.size(), Bandwidth{});
  if (factory == Factory::kExplicit) {
    for (auto bc : s.config.bcs) s.config.classes.push_back({bc, {}, {}});
  }
  s.capacity = kStm4Capacity;
  s.seed = seed;
  for (double d : delays) {
    ClassWorkload w;
    w.count = count;
    w.start_delay_s = d;
    s.workloads.push_back(w);
  }
  return s;
}

}  // namespace

Scenario scenario_01(std::uint64_t count_per_class, std::uint64_t seed, Factory factory) {
  return reference_scenario("scenario_01", count_per_class, seed, factory, {0.0, 800.0, 1400.0});
}

Scenario scenario_02(std::uint64_t count_per_class, std::uint64_t seed, Factory factory) {
  return reference_scenario("scenario_02", count_per_class, seed, factory, {1400.0, 800.0, 0.0});
}

std::vector<WorkloadItem> generate_workload(const Scenario& scenario, std::uint64_t seed) {
  scenario.validate();
  struct Keyed {
    WorkloadItem item;
    std::uint64_t draw;
  };
  std::vector<Keyed> all;
  for (ClassIndex c = 0; c < scenario.class_count(); ++c) {
    const auto& w = scenario.workloads[c];
    auto gaps = RandomStream::for_variate(seed, c, VariateKind::kInterarrival);
    auto sizes = RandomStream::for_variate(seed, c, VariateKind::kBandwidth);
    auto holds = RandomStream::for_variate(seed, c, VariateKind::kHolding);
    double t = w.start_delay_s;
    for (std::uint64_t k = 0; k < w.count; ++k) {
      t += gaps.exponential(w.interarrival_mean_s);
      const Bandwidth bw{sizes.uniform_int(w.bandwidth_min.kbps(), w.bandwidth_max.kbps())};
      const double hold = holds.exponential(w.holding_mean_s);
      all.push_back({{t, c, bw, hold}, k});
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const Keyed& a, const Keyed& b) {
    return std::tie(a.item.arrival_time, a.item.class_index, a.draw) <
           std::tie(b.item.arrival_time, b.item.class_index, b.draw);
  });
  std::vector<WorkloadItem> out;
  out.reserve(all.size());
  for (auto& k : all) out.push_back(k.item);
  return out;
}

std::optional<EngineSpec> EngineSpec::parse(const std::string& text) {
  EngineSpec spec;
  if (text == "gbam") return spec;
  if (text.rfind("gbam:", 0) == 0) {
    auto f = parse_factory(text.substr(5));
    if (!f) return std::nullopt;
    spec.factory = *f;
    return spec;
  }
  spec.kind = Kind::kOracle;
  for (auto m : {OracleModel::kMam, OracleModel::kRdm, OracleModel::kAllocTc}) {
    if (text == to_string(m)) {
      spec.oracle = m;
      return spec;
    }
  }
  return std::nullopt;
}

std::string EngineSpec::label(const Scenario& scenario) const {
  if (kind == Kind::kOracle) return to_string(oracle);
  Factory f = factory.value_or(scenario.config.factory);
  if (f == Factory::kExplicit) f = scenario.config.factory;
  return std::string("gbam:") + to_string(f);
}

namespace {

Factory factory_for(OracleModel m) {
  switch (m) {
    case OracleModel::kMam:
      return Factory::kMam;
    case OracleModel::kRdm:
      return Factory::kRdm;
    case OracleModel::kAllocTc:
      return Factory::kAllocTc;
  }
  return Factory::kMam;
}

std::string digest_for(const Scenario& scenario, const AdmissionEngine& engine) {
  if (const auto* link = dynamic_cast<const LinkAllocator*>(&engine)) {
    return link->config().digest();
  }
  if (const auto* oracle = dynamic_cast<const OracleEngine*>(&engine)) {
    return scenario.bam_config(factory_for(oracle->state().model)).digest();
  }
  return {};
}

}  // namespace

std::unique_ptr<AdmissionEngine> make_engine(const Scenario& scenario, const EngineSpec& spec,
                                             PackingMode mode) {
  scenario.validate();
  if (spec.kind == EngineSpec::Kind::kOracle) {
    return std::make_unique<OracleEngine>(spec.oracle, scenario.config.bcs, scenario.capacity);
  }
  return std::make_unique<LinkAllocator>(
      scenario.bam_config(spec.factory.value_or(scenario.config.factory)), mode,
      spec.label(scenario));
}

namespace {

struct PendingDeparture {
  double time;
  ClassIndex class_index;
  LspId id;

  // Min-heap order: earliest first, then lower class, then lower id.
  bool operator>(const PendingDeparture& o) const {
    return std::tie(time, class_index, id) > std::tie(o.time, o.class_index, o.id);
  }
};

}  // namespace

SimTrace run(const Scenario& scenario, AdmissionEngine& engine, const StepObserver& observer) {
  const auto workload = generate_workload(scenario, scenario.seed);
  if (engine.class_count() != scenario.class_count()) {
    throw InvalidScenario("engine class count does not match scenario");
  }

  SimTrace trace;
  trace.meta.scenario = scenario.name;
  trace.meta.seed = scenario.seed;
  trace.meta.engine = engine.name();
  trace.meta.capacity = engine.capacity();
  trace.meta.class_count = scenario.class_count();
  trace.meta.config_digest = digest_for(scenario, engine);
  trace.records.reserve(workload.size() * 2);

  std::priority_queue<PendingDeparture, std::vector<PendingDeparture>,
                      std::greater<PendingDeparture>>
      departures;

  auto record = [&](TraceRecord rec) {
    rec.totals = engine.totals();
    auto split = engine.loan_split();
    rec.borrowed_htl = std::move(split.via_htl);
    rec.borrowed_lth = std::move(split.via_lth);
    trace.records.push_back(std::move(rec));
    if (observer) observer(trace.records.back(), engine);
  };

  std::size_t next = 0;
  while (next < workload.size() || !departures.empty()) {
    const bool take_departure =
        !departures.empty() &&
        (next == workload.size() || departures.top().time <= workload[next].arrival_time);
    if (take_departure) {
      const auto dep = departures.top();
      departures.pop();
      const auto rel = engine.release(dep.id);
      TraceRecord rec;
      rec.time = dep.time;
      rec.kind = EventKind::kDeparture;
      rec.id = dep.id;
      rec.class_index = rel.class_index;
      rec.bandwidth = rel.bandwidth;
      rec.outcome = RecordOutcome::kReleased;
      record(std::move(rec));
      continue;
    }

    const auto& item = workload[next];
    const LspId id{next + 1};
    ++next;
    const auto decision = engine.admit({id, item.class_index, item.bandwidth});
    TraceRecord rec;
    rec.time = item.arrival_time;
    rec.kind = EventKind::kArrival;
    rec.id = id;
    rec.class_index = item.class_index;
    rec.bandwidth = item.bandwidth;
    if (decision.is_admitted()) {
      rec.outcome = RecordOutcome::kAdmitted;
      departures.push({item.arrival_time + item.holding_time, item.class_index, id});
    } else {
      rec.outcome = RecordOutcome::kBlocked;
      rec.shortfall = decision.shortfall;
    }
    record(std::move(rec));
  }
  return trace;
}

SimTrace run(const Scenario& scenario, const EngineSpec& spec, const StepObserver& observer) {
  auto engine = make_engine(scenario, spec);
  return run(scenario, *engine, observer);
}

}  // namespace gbam
