#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "gbam/rng.hpp"
#include "gbam/simkit.hpp"

using namespace gbam;
using namespace gbam::literals;

namespace {

Scenario tiny(std::uint64_t count, double interarrival, double holding) {
  Scenario s;
  s.name = "tiny";
  s.capacity = 100_kbps;
  s.config.factory = Factory::kMam;
  s.config.bcs = {60_kbps, 40_kbps};
  for (int c = 0; c < 2; ++c) {
    ClassWorkload w;
    w.count = count;
    w.interarrival_mean_s = interarrival;
    w.holding_mean_s = holding;
    w.bandwidth_min = 10_kbps;
    w.bandwidth_max = 30_kbps;
    s.workloads.push_back(w);
  }
  return s;
}

}  // namespace

TEST_CASE("random streams") {
  SUBCASE("are reproducible and independent per variate") {
    auto a = RandomStream::for_variate(42, 0, VariateKind::kBandwidth);
    auto b = RandomStream::for_variate(42, 0, VariateKind::kBandwidth);
    auto c = RandomStream::for_variate(42, 1, VariateKind::kBandwidth);
    auto d = RandomStream::for_variate(42, 0, VariateKind::kHolding);
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
    CHECK(x != d.next_u64());
  }
  SUBCASE("uniform_int covers both ends") {
    RandomStream r(1);
    std::set<std::uint64_t> seen;
    for (int k = 0; k < 2000; ++k) {
      const auto v = r.uniform_int(5, 9);
      REQUIRE(v >= 5);
      REQUIRE(v <= 9);
      seen.insert(v);
    }
    CHECK(seen.size() == 5);
    CHECK(r.uniform_int(7, 7) == 7);
    CHECK_THROWS_AS(r.uniform_int(8, 7), std::invalid_argument);
  }
  SUBCASE("exponential has the requested mean") {
    RandomStream r(3);
    double sum = 0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
      const double v = r.exponential(250.0);
      REQUIRE(v >= 0.0);
      sum += v;
    }
    // Standard error of the mean is 250/sqrt(n), about 0.56.
    CHECK(std::fabs(sum / n - 250.0) < 3.0);
    CHECK(r.exponential(0.0) == 0.0);
  }
  SUBCASE("uniform01 stays in [0, 1)") {
    RandomStream r(9);
    for (int k = 0; k < 10000; ++k) {
      const double u = r.uniform01();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
    }
  }
}

TEST_CASE("reference scenarios") {
  const auto s1 = scenario_01();
  CHECK(s1.capacity == 622000_kbps);
  CHECK(s1.config.bcs == std::vector{248800_kbps, 217700_kbps, 155500_kbps});
  REQUIRE(s1.workloads.size() == 3);
  CHECK(s1.workloads[0].start_delay_s == 0.0);
  CHECK(s1.workloads[1].start_delay_s == 800.0);
  CHECK(s1.workloads[2].start_delay_s == 1400.0);

  const auto s2 = scenario_02();
  CHECK(s2.workloads[0].start_delay_s == 1400.0);
  CHECK(s2.workloads[1].start_delay_s == 800.0);
  CHECK(s2.workloads[2].start_delay_s == 0.0);

  for (const auto* s : {&s1, &s2}) {
    for (const auto& w : s->workloads) {
      CHECK(w.holding_mean_s == 250.0);
      CHECK(w.interarrival_mean_s == 3.0);
      CHECK(w.count == 1000);
      CHECK(w.bandwidth_min == 5000_kbps);
      CHECK(w.bandwidth_max == 10000_kbps);
    }
  }
}

TEST_CASE("generated workload") {
  const auto s = scenario_01();
  const auto items = generate_workload(s, 5);
  std::vector<std::size_t> per_class(3);
  for (const auto& it : items) {
    ++per_class[it.class_index];
    CHECK(it.bandwidth >= 5000_kbps);
    CHECK(it.bandwidth <= 10000_kbps);
    CHECK(it.holding_time >= 0.0);
    if (it.class_index == 1) CHECK(it.arrival_time >= 800.0);
    if (it.class_index == 2) CHECK(it.arrival_time >= 1400.0);
  }
  CHECK(per_class == std::vector<std::size_t>{1000, 1000, 1000});
  CHECK(std::is_sorted(items.begin(), items.end(), [](const auto& a, const auto& b) {
    return a.arrival_time < b.arrival_time;
  }));
  CHECK(items == generate_workload(s, 5));
  CHECK_FALSE(items == generate_workload(s, 6));
}

TEST_CASE("changing one class leaves the other classes' draws alone") {
  auto s = scenario_01(200);
  const auto base = generate_workload(s, 1);
  s.workloads[1].count = 0;
  s.workloads[2].bandwidth_max = 20000_kbps;
  const auto changed = generate_workload(s, 1);
  auto only0 = [](const std::vector<WorkloadItem>& v) {
    std::vector<WorkloadItem> out;
    for (const auto& it : v) {
      if (it.class_index == 0) out.push_back(it);
    }
    return out;
  };
  CHECK(only0(base) == only0(changed));
}

TEST_CASE("invalid scenarios are rejected") {
  auto s = tiny(3, 1.0, 1.0);
  s.workloads.pop_back();
  CHECK_THROWS_AS(generate_workload(s, 1), InvalidScenario);

  auto t = tiny(3, 1.0, 1.0);
  t.workloads[0].bandwidth_min = 50_kbps;
  CHECK_THROWS_AS(generate_workload(t, 1), InvalidScenario);

  auto u = tiny(3, 1.0, 1.0);
  u.workloads[1].holding_mean_s = -1.0;
  CHECK_THROWS_AS(generate_workload(u, 1), InvalidScenario);

  auto v = tiny(3, 1.0, 1.0);
  v.config.bcs = {60_kbps, 41_kbps};
  CHECK_THROWS_AS(generate_workload(v, 1), InvalidConfig);
}

TEST_CASE("engine specs") {
  const auto s = scenario_01(10, 1, Factory::kRdm);
  CHECK(EngineSpec::parse("gbam")->label(s) == "gbam:rdm");
  CHECK(EngineSpec::parse("gbam:alloctc")->label(s) == "gbam:alloctc");
  CHECK(EngineSpec::parse("mam")->label(s) == "mam");
  CHECK(EngineSpec::parse("alloctc")->kind == EngineSpec::Kind::kOracle);
  CHECK_FALSE(EngineSpec::parse("gbam:nope"));
  CHECK_FALSE(EngineSpec::parse("rdm2"));
  CHECK(make_engine(s, *EngineSpec::parse("rdm"))->name() == "rdm");
}

TEST_CASE("run") {
  SUBCASE("zero counts give an empty trace") {
    const auto trace = run(tiny(0, 1.0, 1.0), *EngineSpec::parse("gbam"));
    CHECK(trace.records.empty());
    CHECK(trace.meta.class_count == 2);
  }
  SUBCASE("is deterministic") {
    const auto s = scenario_02(150, 4, Factory::kAllocTc);
    CHECK(run(s, *EngineSpec::parse("gbam")) == run(s, *EngineSpec::parse("gbam")));
  }
  SUBCASE("departures precede arrivals at equal times") {
    // Zero interarrival and holding times put every event at t = 0.
    const auto trace = run(tiny(3, 0.0, 0.0), *EngineSpec::parse("gbam"));
    REQUIRE(trace.records.size() == 12);
    for (std::size_t k = 0; k < trace.records.size(); k += 2) {
      CHECK(trace.records[k].kind == EventKind::kArrival);
      CHECK(trace.records[k + 1].kind == EventKind::kDeparture);
      CHECK(trace.records[k + 1].id == trace.records[k].id);
    }
    CHECK(trace.records[0].class_index == 0);
    CHECK(trace.records.back().class_index == 1);
  }
  SUBCASE("every departure belongs to an admitted LSP and the link never overflows") {
    const auto s = scenario_01(400, 2, Factory::kRdm);
    const auto trace = run(s, *EngineSpec::parse("gbam"));
    std::set<std::uint64_t> live;
    std::size_t arrivals = 0;
    double last = 0.0;
    for (const auto& r : trace.records) {
      CHECK(r.time >= last);
      last = r.time;
      Bandwidth sum;
      for (auto t : r.totals) sum += t;
      CHECK(sum <= s.capacity);
      if (r.kind == EventKind::kArrival) {
        ++arrivals;
        if (r.outcome == RecordOutcome::kAdmitted) live.insert(r.id.value);
      } else {
        CHECK(live.erase(r.id.value) == 1);
      }
    }
    CHECK(live.empty());
    CHECK(arrivals == 1200);
  }
  SUBCASE("MAM keeps class 0 inside its BC") {
    const auto trace = run(scenario_01(1000, 1, Factory::kMam), *EngineSpec::parse("gbam"));
    Bandwidth peak;
    for (const auto& r : trace.records) peak = std::max(peak, r.totals[0]);
    CHECK(peak <= 248800_kbps);
    CHECK(peak > 240000_kbps);  // saturated
  }
}

TEST_CASE("under MAM a class's decisions ignore the other classes") {
  auto s = scenario_01(300, 3, Factory::kMam);
  auto decisions_of_0 = [](const SimTrace& t) {
    std::vector<std::pair<std::uint64_t, RecordOutcome>> out;
    for (const auto& r : t.records) {
      if (r.class_index == 0 && r.kind == EventKind::kArrival) {
        out.emplace_back(r.id.value, r.outcome);
      }
    }
    return out;
  };
  s.workloads[1].start_delay_s = 0.0;
  s.workloads[2].start_delay_s = 0.0;
  const auto busy = run(s, *EngineSpec::parse("gbam"));
  s.workloads[1].count = 0;
  s.workloads[2].count = 0;
  const auto alone = run(s, *EngineSpec::parse("gbam"));
  const auto a = decisions_of_0(busy);
  const auto b = decisions_of_0(alone);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].second == b[k].second);
}
