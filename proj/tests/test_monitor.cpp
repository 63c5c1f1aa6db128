#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <map>
#include <thread>

#include "doctest.h"
#include "v2r/monitor.hpp"
#include "v2r/rng.hpp"

using namespace v2r;

namespace {

WorkerStatus status(const std::string& id, uint64_t ts, float cpu = 10.0f) {
  WorkerStatus s;
  s.worker_id = id;
  s.timestamp = ts;
  s.cpu_pct = cpu;
  s.mem_bytes = 1 << 20;
  return s;
}

}  // namespace

TEST_CASE("first publish appears fresh") {
  StatusTable table;
  CHECK(table.publish(status("w1", 1000)));
  auto snap = table.snapshot(3000, 1500);
  REQUIRE(snap.workers.size() == 1);
  CHECK_FALSE(snap.workers.at("w1").stale);
  CHECK(snap.drops == 0);
}

TEST_CASE("out-of-order publish is dropped and counted") {
  StatusTable table;
  CHECK(table.publish(status("w1", 100, 40.0f)));
  CHECK_FALSE(table.publish(status("w1", 50, 90.0f)));
  CHECK(table.drops() == 1);
  auto snap = table.snapshot(3000, 200);
  CHECK(snap.workers.at("w1").status.timestamp == 100);
  CHECK(snap.workers.at("w1").status.cpu_pct == 40.0f);
  CHECK(snap.drops == 1);

  // equal timestamp replaces (monotone non-decreasing)
  CHECK(table.publish(status("w1", 100, 70.0f)));
  CHECK(table.snapshot(3000, 200).workers.at("w1").status.cpu_pct == 70.0f);
}

TEST_CASE("5 workers x 20 publishes keep the max-timestamp status each") {
  StatusTable table;
  SplitMix64 g(17);
  std::map<std::string, uint64_t> expect;
  for (int i = 0; i < 100; ++i) {
    std::string id = "w" + std::to_string(i % 5);
    uint64_t ts = 1000 + g.next_below(5000);
    table.publish(status(id, ts));
    auto it = expect.find(id);
    if (it == expect.end() || ts >= it->second) expect[id] = ts;
  }
  auto snap = table.snapshot(1u << 30, 10000);
  REQUIRE(snap.workers.size() == 5);
  for (const auto& [id, ts] : expect) CHECK(snap.workers.at(id).status.timestamp == ts);
}

TEST_CASE("staleness per the ttl rule") {
  StatusTable table;
  table.publish(status("old", 1000));
  table.publish(status("fresh", 9000));
  auto snap = table.snapshot(3000, 11000);
  CHECK(snap.workers.at("old").stale);        // 10s ago > 3s ttl
  CHECK_FALSE(snap.workers.at("fresh").stale);  // 2s ago

  // boundary: exactly ttl old is not stale (strict >)
  auto boundary = table.snapshot(2000, 11000);
  CHECK_FALSE(boundary.workers.at("fresh").stale);
  auto just_over = table.snapshot(1999, 11000);
  CHECK(just_over.workers.at("fresh").stale);
}

TEST_CASE("mixed-freshness 3-worker fixture with a mock timeline") {
  StatusTable table;
  table.publish(status("a", 10000));
  table.publish(status("b", 12000));
  table.publish(status("c", 14900));
  auto snap = table.snapshot(3000, 15000);
  CHECK(snap.workers.at("a").stale);
  CHECK_FALSE(snap.workers.at("b").stale);
  CHECK_FALSE(snap.workers.at("c").stale);
  CHECK(snap.taken_at == 15000);
}

TEST_CASE("empty table yields an empty snapshot") {
  StatusTable table;
  auto snap = table.snapshot(3000, 42);
  CHECK(snap.workers.empty());
  CHECK(snap.taken_at == 42);
}

TEST_CASE("malformed statuses are rejected") {
  StatusTable table;
  auto bad_cpu = status("w", 1);
  bad_cpu.cpu_pct = 150.0f;
  CHECK_THROWS_AS(table.publish(bad_cpu), Error);

  auto bad_device = status("w", 1);
  bad_device.device_util_pct = -3.0f;
  CHECK_THROWS_AS(table.publish(bad_device), Error);

  auto no_id = status("", 1);
  CHECK_THROWS_AS(table.publish(no_id), Error);
}

TEST_CASE("concurrent publishers: last writer wins per key, nothing lost") {
  StatusTable table;
  constexpr int kThreads = 4;
  constexpr int kPerThread = 2500;
  std::vector<std::thread> pool;
  for (int t = 0; t < kThreads; ++t) {
    pool.emplace_back([&table, t] {
      for (int i = 0; i < kPerThread; ++i)
        table.publish(status("w" + std::to_string(t), 1000 + i));
    });
  }
  for (auto& th : pool) th.join();
  auto snap = table.snapshot(1u << 30, 10000);
  REQUIRE(snap.workers.size() == kThreads);
  for (int t = 0; t < kThreads; ++t)
    CHECK(snap.workers.at("w" + std::to_string(t)).status.timestamp == 1000 + kPerThread - 1);
  CHECK(table.drops() == 0);  // per-thread timestamps were monotone
}

TEST_CASE("snapshot never contains a status newer than taken_at") {
  StatusTable table;
  SplitMix64 g(23);
  for (int i = 0; i < 50; ++i) table.publish(status("w" + std::to_string(i % 7), g.next_below(5000)));
  uint64_t now = 5000;
  auto snap = table.snapshot(1000, now);
  for (const auto& [id, entry] : snap.workers) CHECK(entry.status.timestamp <= now);
}
