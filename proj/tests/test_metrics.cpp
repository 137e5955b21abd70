#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "netsync/metrics/aoi.hpp"
#include "netsync/metrics/collector.hpp"
#include "netsync/metrics/timing.hpp"
#include "netsync/sim/rng.hpp"

using namespace netsync;
using metrics::AoiProcess;
using metrics::SyncExchange;

TEST_CASE("offset estimator recovers a known skew") {
  // Master at 0, slave 5 ms ahead, symmetric 10 ms path:
  // t2 = t1 + 10 + 5, t4 = t3 + 10 - 5 (all in ms here, stored as us).
  SyncExchange x{0, 15'000, 20'000, 25'000};
  CHECK(metrics::estimate_offset(x) == 5'000.0);
  CHECK(metrics::estimate_path_delay(x) == 10'000.0);
}

TEST_CASE("offset estimator sign and zero cases") {
  SyncExchange behind{0, 10'000, 20'000, 40'000};
  CHECK(metrics::estimate_offset(behind) == -5'000.0);
  SyncExchange zeros{0, 0, 0, 0};
  CHECK(metrics::estimate_offset(zeros) == 0.0);
  CHECK(metrics::estimate_path_delay(zeros) == 0.0);
}

TEST_CASE("asymmetric paths bias the offset by half the difference") {
  const sim::TimeUs d_f = 30'000, d_r = 10'000, theta = 2'000;
  SyncExchange x;
  x.t1 = 1'000'000;
  x.t2 = x.t1 + d_f + theta;
  x.t3 = x.t2 + 500;
  x.t4 = x.t3 + d_r - theta;
  const double err = metrics::estimate_offset(x) - static_cast<double>(theta);
  CHECK(err == static_cast<double>(d_f - d_r) / 2.0);
}

TEST_CASE("sliding median tracks the window") {
  metrics::SlidingMedian med(3);
  CHECK_FALSE(med.median().has_value());
  med.add(5.0);
  CHECK(*med.median() == 5.0);
  med.add(1.0);
  CHECK(*med.median() == 3.0);  // even count: midpoint
  med.add(9.0);
  CHECK(*med.median() == 5.0);
  med.add(100.0);  // evicts 5.0; window {1, 9, 100}
  CHECK(*med.median() == 9.0);
  CHECK(med.count() == 3);
  CHECK_THROWS_AS(metrics::SlidingMedian(0), std::invalid_argument);
}

TEST_CASE("mean, stddev and nearest-rank percentile") {
  std::vector<double> xs;
  for (int i = 1; i <= 10; ++i) {
    xs.push_back(i);
  }
  CHECK(metrics::mean(xs) == doctest::Approx(5.5));
  // Sample stddev of 1..10: sqrt(82.5 / 9).
  CHECK(metrics::sample_stddev(xs) == doctest::Approx(std::sqrt(82.5 / 9.0)));
  CHECK(metrics::percentile(xs, 50.0) == 5.0);
  CHECK(metrics::percentile(xs, 99.0) == 10.0);
  CHECK(metrics::percentile(xs, 10.0) == 1.0);
  CHECK(metrics::percentile(xs, 0.0) == 1.0);
  CHECK(metrics::mean({}) == 0.0);
  CHECK(metrics::sample_stddev({1.0}) == 0.0);
  CHECK_THROWS_AS(metrics::percentile(xs, 101.0), std::invalid_argument);
}

TEST_CASE("aoi age grows linearly from the freshest generation") {
  AoiProcess aoi;
  CHECK_FALSE(aoi.age_at(100).has_value());
  aoi.add_delivery(0, 2'000);
  CHECK_FALSE(aoi.age_at(1'999).has_value());
  CHECK(*aoi.age_at(2'000) == 2'000);
  CHECK(*aoi.age_at(8'000) == 8'000);
}

TEST_CASE("stale deliveries never reduce the age") {
  AoiProcess aoi;
  aoi.add_delivery(10'000, 12'000);
  aoi.add_delivery(5'000, 13'000);  // older generation, arrives later
  CHECK(aoi.effective_count() == 1);
  CHECK(*aoi.age_at(13'000) == 3'000);
}

TEST_CASE("periodic source has average age d + T/2 and peak d + T") {
  const sim::TimeUs T = 10'000, d = 2'000;
  AoiProcess aoi;
  for (int k = 0; k <= 100; ++k) {
    aoi.add_delivery(k * T, k * T + d);
  }
  // Whole cycles: [d, d + 100 T].
  const auto st = aoi.stats(d, d + 100 * T);
  CHECK(st.average_us == doctest::Approx(d + T / 2.0).epsilon(1e-12));
  CHECK(st.peak_us == d + T);
}

TEST_CASE("single update gives the triangle average over the window") {
  AoiProcess aoi;
  aoi.add_delivery(0, 0);
  // Age ramps 0 -> 15 ms over the window: average 7.5 ms.
  const auto st = aoi.stats(0, 15'000);
  CHECK(st.average_us == doctest::Approx(7'500.0));
  CHECK(st.peak_us == 15'000);
}

TEST_CASE("stats guards its window") {
  AoiProcess aoi;
  aoi.add_delivery(0, 5'000);
  CHECK_THROWS_AS(aoi.stats(0, 4'000), std::logic_error);
  CHECK_THROWS_AS(aoi.stats(6'000, 6'000), std::invalid_argument);
  CHECK_THROWS_AS(aoi.add_delivery(10, 5), std::invalid_argument);
}

TEST_CASE("sawtooth integral matches an independent trapezoid sum") {
  // Strictly increasing generations and deliveries so every delivery is
  // effective; the oracle then integrates each linear segment directly.
  sim::RngStream rng(123, "aoi.check");
  std::vector<sim::TimeUs> gens, dels;
  sim::TimeUs g = 0, dprev = 0;
  for (int k = 0; k < 200; ++k) {
    g += 1 + static_cast<sim::TimeUs>(rng.uniform_int(4'000));
    sim::TimeUs del = g + 1 + static_cast<sim::TimeUs>(rng.uniform_int(5'000));
    del = std::max(del, dprev + 1);
    gens.push_back(g);
    dels.push_back(del);
    dprev = del;
  }
  AoiProcess aoi;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    aoi.add_delivery(gens[i], dels[i]);
  }
  const sim::TimeUs t0 = dels.front(), t1 = dels.back() + 7'777;

  double area = 0.0;
  double peak = 0.0;
  sim::TimeUs seg_start = t0;
  sim::TimeUs gen = gens.front();
  for (std::size_t i = 1; i < dels.size(); ++i) {
    const sim::TimeUs seg_end = std::min(dels[i], t1);
    const double a0 = static_cast<double>(seg_start - gen);
    const double a1 = static_cast<double>(seg_end - gen);
    area += 0.5 * (a0 + a1) * static_cast<double>(seg_end - seg_start);
    peak = std::max(peak, a1);
    seg_start = seg_end;
    gen = gens[i];
  }
  const double a0 = static_cast<double>(seg_start - gen);
  const double a1 = static_cast<double>(t1 - gen);
  area += 0.5 * (a0 + a1) * static_cast<double>(t1 - seg_start);
  peak = std::max(peak, a1);

  const auto st = aoi.stats(t0, t1);
  const double expected_avg = area / static_cast<double>(t1 - t0);
  CHECK(st.average_us == doctest::Approx(expected_avg).epsilon(1e-12));
  CHECK(static_cast<double>(st.peak_us) == peak);
}

TEST_CASE("preset names round-trip") {
  for (auto p : {metrics::Preset::kNone, metrics::Preset::kFps,
                 metrics::Preset::kVr, metrics::Preset::kIiot}) {
    CHECK(metrics::preset_from_name(metrics::preset_name(p)) == p);
  }
  CHECK_THROWS_AS(metrics::preset_from_name("arcade"), std::invalid_argument);
}

TEST_CASE("fps classification uses the 100 ms round trip") {
  metrics::TimingReport r;
  r.mean_one_way_us = 40'000.0;  // RTT 80 ms
  auto v = metrics::classify(r, metrics::Preset::kFps);
  CHECK(v.overall);
  REQUIRE(v.requirements.size() == 1);
  CHECK(v.requirements[0].name == "rtt_us");

  r.mean_one_way_us = 60'000.0;  // RTT 120 ms
  CHECK_FALSE(metrics::classify(r, metrics::Preset::kFps).overall);
}

TEST_CASE("vr classification needs both RTT 20 ms and transmission 7 ms") {
  metrics::TimingReport r;
  r.mean_one_way_us = 9'000.0;  // RTT 18 ms fine, one-way 9 ms too slow
  auto v = metrics::classify(r, metrics::Preset::kVr);
  REQUIRE(v.requirements.size() == 2);
  CHECK(v.requirements[0].pass);
  CHECK_FALSE(v.requirements[1].pass);
  CHECK_FALSE(v.overall);

  r.mean_one_way_us = 6'000.0;
  CHECK(metrics::classify(r, metrics::Preset::kVr).overall);
}

TEST_CASE("iiot classification checks max delay and delivery ratio") {
  metrics::TimingReport r;
  r.max_one_way_us = 900.0;
  r.delivery_ratio = 1.0 - 1e-5;  // five nines only
  CHECK_FALSE(metrics::classify(r, metrics::Preset::kIiot).overall);
  r.delivery_ratio = 1.0;
  CHECK(metrics::classify(r, metrics::Preset::kIiot).overall);
  r.max_one_way_us = 1'001.0;
  CHECK_FALSE(metrics::classify(r, metrics::Preset::kIiot).overall);
}

TEST_CASE("the none preset has no requirements") {
  const auto v = metrics::classify({}, metrics::Preset::kNone);
  CHECK(v.requirements.empty());
  CHECK(v.overall);
}

TEST_CASE("collector csv is stable and ordered") {
  metrics::Collector c;
  c.record({100, "tick", 0, 1, 50, 2.0, 0.0});
  c.record({250, "render", 3, 9, 150, 1.5, -2.25});
  const std::string csv = c.to_csv();
  const auto header_end = csv.find('\n');
  CHECK(csv.substr(0, header_end) ==
        "time_us,kind,client_id,id,gen_time_us,value,value2");
  CHECK(csv.find("100,tick,0,1,50,") != std::string::npos);
  CHECK(csv.find("250,render,3,9,150,1.5,-2.25") != std::string::npos);
  CHECK(csv.find("tick") < csv.find("render"));
}
