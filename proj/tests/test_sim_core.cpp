#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "netsync/sim/event_queue.hpp"
#include "netsync/sim/link.hpp"
#include "netsync/sim/rng.hpp"

using namespace netsync;

TEST_CASE("equal fire times dispatch in insertion order") {
  sim::Simulator s;
  std::vector<char> order;
  s.schedule_at(100, 1, [&] { order.push_back('A'); });
  s.schedule_at(100, 2, [&] { order.push_back('B'); });
  s.schedule_at(100, 3, [&] { order.push_back('C'); });
  s.run_until(100);
  CHECK(order == std::vector<char>{'A', 'B', 'C'});
}

TEST_CASE("scheduling in the past throws") {
  sim::Simulator s;
  s.schedule_at(50, 0, [] {});
  s.run_until(50);
  CHECK(s.now() == 50);
  CHECK_THROWS_AS(s.schedule_at(49, 0, [] {}), std::logic_error);
  // Scheduling exactly at now is fine.
  CHECK_NOTHROW(s.schedule_at(50, 0, [] {}));
  CHECK_THROWS_AS(s.run_until(49), std::logic_error);
}

TEST_CASE("run_until dispatches only events at or before the horizon") {
  sim::Simulator s;
  int fired_40 = 0, fired_50 = 0;
  s.schedule_at(40, 0, [&] { ++fired_40; });
  s.schedule_at(50, 0, [&] { ++fired_50; });
  CHECK(s.run_until(45) == 1);
  CHECK(fired_40 == 1);
  CHECK(fired_50 == 0);
  CHECK(s.now() == 45);  // horizon reached even with work left queued
  CHECK(s.pending() == 1);
  CHECK(s.run_until(50) == 1);
  CHECK(fired_50 == 1);
}

TEST_CASE("run_until on an empty queue still advances the clock") {
  sim::Simulator s;
  CHECK(s.run_until(1'000) == 0);
  CHECK(s.now() == 1'000);
}

TEST_CASE("partial horizon dispatches 3 of 4") {
  sim::Simulator s;
  int count = 0;
  for (sim::TimeUs t : {10, 20, 30, 40}) {
    s.schedule_at(t, 0, [&] { ++count; });
  }
  CHECK(s.run_until(30) == 3);
  CHECK(count == 3);
}

TEST_CASE("cascaded events scheduled mid-run are dispatched and counted") {
  sim::Simulator s;
  std::vector<sim::TimeUs> fire_times;
  s.schedule_at(10, 0, [&] {
    fire_times.push_back(s.now());
    s.schedule_at(15, 0, [&] { fire_times.push_back(s.now()); });
  });
  // Oracle: the cascade lands inside the same run_until window, so the
  // dispatch count is 2 and now() is 15 at the second firing.
  CHECK(s.run_until(20) == 2);
  CHECK(fire_times == std::vector<sim::TimeUs>{10, 15});
}

TEST_CASE("dispatch trace records time, seq and target") {
  sim::Simulator s;
  s.set_trace_enabled(true);
  s.schedule_at(5, 7, [] {});
  s.schedule_at(5, 9, [] {});
  s.run_until(5);
  REQUIRE(s.trace().size() == 2);
  CHECK(s.trace()[0].target == 7);
  CHECK(s.trace()[1].target == 9);
  CHECK(s.trace()[0].seq < s.trace()[1].seq);
}

TEST_CASE("rng streams are reproducible") {
  sim::RngStream a(42, "link.up");
  sim::RngStream b(42, "link.up");
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("distinct stream ids give distinct sequences") {
  sim::RngStream a(42, "link.up");
  sim::RngStream b(42, "link.down");
  int equal = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) {
      ++equal;
    }
  }
  CHECK(equal == 0);
}

TEST_CASE("draws on one stream do not perturb another") {
  sim::RngStream a1(7, "a");
  sim::RngStream a2(7, "a");
  sim::RngStream noise(7, "b");
  std::vector<std::uint64_t> interleaved, straight;
  for (int i = 0; i < 32; ++i) {
    interleaved.push_back(a1.next_u64());
    noise.next_u64();
    noise.next_u64();
  }
  for (int i = 0; i < 32; ++i) {
    straight.push_back(a2.next_u64());
  }
  CHECK(interleaved == straight);
}

TEST_CASE("rng sampling ranges") {
  sim::RngStream r(1, "ranges");
  for (int i = 0; i < 1'000; ++i) {
    const double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = r.uniform(-3.0, 5.0);
    CHECK(v >= -3.0);
    CHECK(v < 5.0);
    CHECK(r.uniform_int(7) < 7);
  }
  CHECK_FALSE(r.bernoulli(0.0));
  CHECK(r.bernoulli(1.0));
  CHECK_THROWS_AS(r.uniform_int(0), std::invalid_argument);
  CHECK_THROWS_AS(r.uniform(2.0, 1.0), std::invalid_argument);
}

TEST_CASE("rng normal moments are sane") {
  sim::RngStream r(3, "normal");
  double sum = 0.0, sum_sq = 0.0;
  const int n = 20'000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal(2.0, 3.0);
    sum += x;
    sum_sq += x * x;
  }
  const double m = sum / n;
  const double var = sum_sq / n - m * m;
  CHECK(m == doctest::Approx(2.0).epsilon(0.05));
  CHECK(var == doctest::Approx(9.0).epsilon(0.05));
}

TEST_CASE("link delivers at base delay with no impairments") {
  sim::LinkModel m;
  m.base_delay_us = 10'000;
  sim::Link link(m, sim::RngStream(1, "l"));
  for (sim::TimeUs t : {0, 5'000, 123'456}) {
    auto d = link.send(t);
    REQUIRE(d.has_value());
    CHECK(*d == t + 10'000);
  }
}

TEST_CASE("loss 1 always drops, loss 0 always delivers") {
  sim::LinkModel drop;
  drop.loss_prob = 1.0;
  sim::Link ld(drop, sim::RngStream(1, "d"));
  sim::LinkModel keep;
  sim::Link lk(keep, sim::RngStream(1, "k"));
  for (int i = 0; i < 1'000; ++i) {
    CHECK_FALSE(ld.send(i).has_value());
    CHECK(lk.send(i).has_value());
  }
}

TEST_CASE("loss 0.3 empirical rate") {
  sim::LinkModel m;
  m.loss_prob = 0.3;
  sim::Link link(m, sim::RngStream(99, "loss"));
  const int n = 20'000;
  int lost = 0;
  for (int i = 0; i < n; ++i) {
    if (!link.send(i).has_value()) {
      ++lost;
    }
  }
  // Oracle: binomial(20000, 0.3) has stddev ~65, so +-0.01 is ~3 sigma.
  const double rate = static_cast<double>(lost) / n;
  CHECK(rate > 0.29);
  CHECK(rate < 0.31);
}

TEST_CASE("in-order links clamp delivery times monotonically") {
  sim::LinkModel m;
  m.base_delay_us = 5'000;
  m.jitter = sim::JitterSpec::uniform(0.0, 20'000.0);
  m.reorder_allowed = false;
  sim::Link link(m, sim::RngStream(5, "fifo"));
  sim::TimeUs prev = -1;
  for (int i = 0; i < 2'000; ++i) {
    auto d = link.send(i * 10);
    REQUIRE(d.has_value());
    CHECK(*d >= prev);
    prev = *d;
  }
}

TEST_CASE("reorder_allowed lets a later send arrive earlier") {
  sim::LinkModel m;
  m.jitter = sim::JitterSpec::trace({50'000, 0});
  m.reorder_allowed = true;
  sim::Link link(m, sim::RngStream(5, "reorder"));
  auto first = link.send(0);
  auto second = link.send(10);
  REQUIRE(first.has_value());
  REQUIRE(second.has_value());
  CHECK(*first == 50'000);
  CHECK(*second == 10);
  CHECK(*second < *first);
}

TEST_CASE("trace jitter cycles through its values") {
  sim::LinkModel m;
  m.jitter = sim::JitterSpec::trace({1'000, 3'000, 2'000});
  m.reorder_allowed = true;
  sim::Link link(m, sim::RngStream(5, "trace"));
  std::vector<sim::TimeUs> delays;
  for (int i = 0; i < 5; ++i) {
    delays.push_back(*link.send(0));
  }
  CHECK(delays == std::vector<sim::TimeUs>{1'000, 3'000, 2'000, 1'000, 3'000});
}

TEST_CASE("bandwidth adds serialization delay") {
  sim::LinkModel m;
  m.base_delay_us = 1'000;
  m.bandwidth_bytes_per_s = 1e6;  // 1 byte per microsecond
  sim::Link link(m, sim::RngStream(5, "bw"));
  // Oracle: 250 bytes / 1e6 B/s = 250 us of serialization.
  CHECK(*link.send(0, 250) == 1'250);
  CHECK(*link.send(10'000, 0) == 11'000);
}

TEST_CASE("link model validation") {
  sim::LinkModel m;
  m.base_delay_us = -1;
  CHECK_THROWS_AS(sim::validate(m), std::invalid_argument);
  m = {};
  m.loss_prob = 1.5;
  CHECK_THROWS_AS(sim::validate(m), std::invalid_argument);
  m = {};
  m.jitter = sim::JitterSpec::uniform(10.0, 5.0);
  CHECK_THROWS_AS(sim::validate(m), std::invalid_argument);
  m = {};
  m.jitter = sim::JitterSpec::trace({});
  CHECK_THROWS_AS(sim::validate(m), std::invalid_argument);
  m = {};
  m.bandwidth_bytes_per_s = 0.0;
  CHECK_THROWS_AS(sim::validate(m), std::invalid_argument);
  m = {};
  CHECK_NOTHROW(sim::validate(m));
}
