/*
 * Copyright (c) 2026, the byzgather authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "byzgather/memsim.hpp"

using namespace byzgather;
using namespace byzgather::memsim;

namespace {

// a writes to even cells, b to odd cells (ownership convention).
ProgramFactory writer(int process, std::vector<std::pair<CellId, CellValue>> writes) {
  std::vector<Primitive> prims;
  for (auto& [c, v] : writes) prims.push_back(write_op(c, v));
  (void)process;
  return scripted(prims);
}

long binomial(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("single write produces a one-event log", "[memsim]") {
  auto log = execute({writer(0, {{0, "5"}})}, Adversary::seeded(1));
  REQUIRE(log.events.size() == 1);
  CHECK(log.events[0].kind == Event::Kind::Write);
  CHECK(log.events[0].cell == 0);
  CHECK(log.events[0].value == "5");
  CHECK(log.events[0].t == 1);
}

TEST_CASE("explicit strategy alternates processes as scripted", "[memsim]") {
  auto p0 = scripted({write_op(0, "a"), write_op(2, "b")});
  auto p1 = scripted({write_op(1, "x"), write_op(3, "y")});
  auto log = execute({p0, p1}, Adversary::scripted_order({0, 1, 0, 1}));
  REQUIRE(log.events.size() == 4);
  CHECK(log.events[0].process == 0);
  CHECK(log.events[1].process == 1);
  CHECK(log.events[2].process == 0);
  CHECK(log.events[3].process == 1);

  // Selecting a finished process is an enabled-set violation.
  CHECK_THROWS_AS(execute({p0, p1}, Adversary::scripted_order({0, 0, 0})),
                  std::invalid_argument);
}

TEST_CASE("seeded replay is byte-identical", "[memsim]") {
  auto p0 = scripted({write_op(0, "a"), snapshot_op(), write_op(2, "b")});
  auto p1 = scripted({write_op(1, "x"), snapshot_op(), write_op(3, "y")});
  for (std::uint64_t seed : {1ull, 7ull, 42ull}) {
    auto l1 = execute({p0, p1}, Adversary::seeded(seed));
    auto l2 = execute({p0, p1}, Adversary::seeded(seed));
    REQUIRE(l1 == l2);
  }
}

TEST_CASE("snapshots capture the exact write prefix", "[memsim]") {
  auto p0 = scripted({write_op(0, "5"), snapshot_op()});
  auto p1 = scripted({write_op(1, "7")});
  auto log = execute({p0, p1}, Adversary::scripted_order({0, 1, 0}));
  REQUIRE(log.events.size() == 3);
  const auto& snap = log.events[2];
  REQUIRE(snap.kind == Event::Kind::Snapshot);
  CHECK(snap.view.read(0) == CellValue("5"));
  CHECK(snap.view.read(1) == CellValue("7"));

  // snapshot_view applies writes strictly before t.
  auto before_any = snapshot_view(log, 1);
  CHECK(before_any.cells.empty());
  auto at_snap = snapshot_view(log, 3);
  CHECK(at_snap == snap.view);
  CHECK_THROWS_AS(snapshot_view(log, 99), std::invalid_argument);
}

TEST_CASE("snapshot_view matches the replay oracle on random logs", "[memsim]") {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<Primitive> a, b;
    int la = 1 + static_cast<int>(rng() % 3), lb = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < la; ++i) {
      a.push_back(rng() % 2 ? write_op(2 * static_cast<int>(rng() % 3), std::to_string(rng() % 10))
                            : snapshot_op());
    }
    for (int i = 0; i < lb; ++i) {
      b.push_back(rng() % 2
                      ? write_op(2 * static_cast<int>(rng() % 3) + 1, std::to_string(rng() % 10))
                      : snapshot_op());
    }
    auto log = execute({scripted(a), scripted(b)}, Adversary::seeded(rng()));
    for (const auto& e : log.events) {
      MemoryState replay;
      for (const auto& w : log.events) {
        if (w.t < e.t && w.kind == Event::Kind::Write) replay.cells[w.cell] = w.value;
      }
      REQUIRE(snapshot_view(log, e.t) == replay);
    }
    auto v = validate_log(log);
    REQUIRE(v.ok);
  }
}

TEST_CASE("crash injection stops a process permanently", "[memsim]") {
  auto p0 = scripted({write_op(0, "a"), write_op(2, "b"), write_op(4, "c")});
  auto p1 = scripted({write_op(1, "x")});
  auto log = execute({p0, p1}, Adversary::seeded(3, CrashPoint{0, 1}));
  int p0_writes = 0;
  bool crash_seen = false;
  for (const auto& e : log.events) {
    if (e.kind == Event::Kind::Crash) {
      CHECK(e.process == 0);
      crash_seen = true;
    }
    if (e.kind == Event::Kind::Write && e.process == 0) {
      ++p0_writes;
      CHECK_FALSE(crash_seen);
    }
  }
  CHECK(crash_seen);
  CHECK(p0_writes == 1);
  CHECK(validate_log(log).ok);
}

TEST_CASE("validator rejects non-owner writes", "[memsim]") {
  EventLog bad;
  Event e;
  e.t = 1;
  e.process = 0;
  e.kind = Event::Kind::Write;
  e.cell = 1;  // owned by process 1
  e.value = "v";
  bad.events.push_back(e);
  auto v = validate_log(bad);
  CHECK_FALSE(v.ok);
}

TEST_CASE("validator rejects events after a crash", "[memsim]") {
  EventLog bad;
  Event c;
  c.t = 1;
  c.process = 0;
  c.kind = Event::Kind::Crash;
  bad.events.push_back(c);
  Event w;
  w.t = 2;
  w.process = 0;
  w.kind = Event::Kind::Write;
  w.cell = 0;
  w.value = "v";
  bad.events.push_back(w);
  CHECK_FALSE(validate_log(bad).ok);
}

TEST_CASE("enumeration counts match binomials and validate", "[memsim]") {
  // 2 and 1 primitives: C(3,1) = 3 crash-free interleavings.
  auto p0 = writer(0, {{0, "a"}, {2, "b"}});
  auto p1 = writer(1, {{1, "x"}});
  auto logs = memsim::enumerate_interleavings({p0, p1}, 8);
  int crash_free = 0;
  for (const auto& log : logs) {
    bool crashed = false;
    for (const auto& e : log.events) {
      if (e.kind == Event::Kind::Crash) crashed = true;
    }
    if (!crashed) ++crash_free;
    REQUIRE(validate_log(log).ok);
  }
  CHECK(crash_free == 3);

  // 3 and 3 primitives: C(6,3) = 20 crash-free interleavings.
  auto q0 = scripted({write_op(0, "a"), snapshot_op(), write_op(2, "b")});
  auto q1 = scripted({write_op(1, "x"), snapshot_op(), write_op(3, "y")});
  auto logs2 = memsim::enumerate_interleavings({q0, q1}, 6);
  int crash_free2 = 0, with_crash2 = 0;
  for (const auto& log : logs2) {
    bool crashed = false;
    for (const auto& e : log.events) {
      if (e.kind == Event::Kind::Crash) crashed = true;
    }
    crashed ? ++with_crash2 : ++crash_free2;
    REQUIRE(validate_log(log).ok);
  }
  CHECK(crash_free2 == binomial(6, 3));
  // Per process: crash after 0, 1, 2 primitives against the other's full 3.
  CHECK(with_crash2 == 2 * (binomial(3, 0) + binomial(4, 1) + binomial(5, 2)));

  CHECK_THROWS_AS(memsim::enumerate_interleavings({q0, q1}, 25), std::invalid_argument);
  CHECK_THROWS_AS(memsim::enumerate_interleavings({q0, q1}, 5), std::invalid_argument);
}
