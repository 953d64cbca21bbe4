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

#ifndef BYZGATHER_MEMSIM_HPP_
#define BYZGATHER_MEMSIM_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace byzgather {
namespace memsim {

// A two-process single-writer multi-reader shared memory with atomic
// snapshot, simulated deterministically under full adversary control of the
// interleaving. Cell values are opaque serialized bytes; an absent cell is
// the initial "bottom".

using CellId = int;
using CellValue = std::string;

struct MemoryState {
  std::map<CellId, CellValue> cells;

  std::optional<CellValue> read(CellId c) const {
    auto it = cells.find(c);
    if (it == cells.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const MemoryState&, const MemoryState&) = default;
};

// Default ownership convention: even cells belong to process 0, odd cells to
// process 1 (the slot layout in slot.hpp is built on this).
inline int default_cell_owner(CellId c) { return static_cast<int>(c & 1); }

struct Primitive {
  enum class Kind { Write, Snapshot };
  Kind kind = Kind::Snapshot;
  CellId cell = 0;      // Write only
  CellValue value;      // Write only
};

inline Primitive write_op(CellId cell, CellValue value) {
  return Primitive{Primitive::Kind::Write, cell, std::move(value)};
}
inline Primitive snapshot_op() { return Primitive{Primitive::Kind::Snapshot, 0, {}}; }

struct Event {
  enum class Kind { Write, Snapshot, Crash };
  int t = 0;  // global timestamp, unique and totally ordered
  int process = 0;
  Kind kind = Kind::Write;
  CellId cell = 0;               // Write only
  CellValue value;               // Write only
  MemoryState view;              // Snapshot only: the atomically observed state

  friend bool operator==(const Event&, const Event&) = default;
};

struct EventLog {
  std::vector<Event> events;

  friend bool operator==(const EventLog&, const EventLog&) = default;
};

/**
 * A deterministic program of one process: a state machine that exposes the
 * next shared-memory primitive, consumes it on advance(), and receives the
 * view taken by its snapshot primitives. Local computation between
 * primitives is free and happens inside advance().
 */
class ProcessProgram {
 public:
  virtual ~ProcessProgram() = default;
  virtual bool done() const = 0;
  // Precondition: !done().
  virtual Primitive current() const = 0;
  // view is set iff the consumed primitive was a snapshot.
  virtual void advance(const std::optional<MemoryState>& view) = 0;
};

using ProgramFactory = std::function<std::unique_ptr<ProcessProgram>()>;

/** A scripted program that issues a fixed primitive sequence. */
class ScriptedProgram final : public ProcessProgram {
 public:
  explicit ScriptedProgram(std::vector<Primitive> prims) : prims_(std::move(prims)) {}
  bool done() const override { return next_ >= prims_.size(); }
  Primitive current() const override {
    if (done()) throw std::logic_error("ScriptedProgram: no pending primitive");
    return prims_[next_];
  }
  void advance(const std::optional<MemoryState>&) override { ++next_; }

 private:
  std::vector<Primitive> prims_;
  std::size_t next_ = 0;
};

inline ProgramFactory scripted(std::vector<Primitive> prims) {
  return [prims]() { return std::make_unique<ScriptedProgram>(prims); };
}

struct CrashPoint {
  int process = 0;
  int after_steps = 0;  // the process crashes once it has executed this many primitives

  friend bool operator==(const CrashPoint&, const CrashPoint&) = default;
};

/**
 * Interleaving adversary. The explicit strategy follows the given process
 * sequence and optionally falls back to round-robin over the enabled
 * processes once the script is exhausted; selecting a finished or crashed
 * process is an error. The exhaustive strategy is only meaningful through
 * enumerate_interleavings().
 */
struct Adversary {
  enum class Strategy { SeededRandom, Explicit, Exhaustive };
  Strategy strategy = Strategy::SeededRandom;
  std::uint64_t seed = 0;
  std::vector<int> sequence;       // Explicit
  bool tail_round_robin = false;   // Explicit: continue deterministically after the script
  int exhaustive_bound = 0;        // Exhaustive
  std::optional<CrashPoint> crash;

  static Adversary seeded(std::uint64_t seed, std::optional<CrashPoint> crash = std::nullopt) {
    Adversary a;
    a.strategy = Strategy::SeededRandom;
    a.seed = seed;
    a.crash = crash;
    return a;
  }
  static Adversary scripted_order(std::vector<int> sequence, bool tail_round_robin = false,
                                  std::optional<CrashPoint> crash = std::nullopt) {
    Adversary a;
    a.strategy = Strategy::Explicit;
    a.sequence = std::move(sequence);
    a.tail_round_robin = tail_round_robin;
    a.crash = crash;
    return a;
  }
};

/**
 * Runs the two programs to completion under the adversary and returns the
 * event log. Deterministic: identical inputs produce identical logs.
 */
inline EventLog execute(const std::vector<ProgramFactory>& factories, const Adversary& adv) {
  if (factories.empty() || factories.size() > 2) {
    throw std::invalid_argument("execute: expects one or two programs");
  }
  if (adv.strategy == Adversary::Strategy::Exhaustive) {
    throw std::invalid_argument("execute: exhaustive adversary requires enumerate_interleavings");
  }
  std::vector<std::unique_ptr<ProcessProgram>> progs;
  for (const auto& f : factories) progs.push_back(f());
  const int np = static_cast<int>(progs.size());

  EventLog log;
  MemoryState mem;
  std::vector<bool> crashed(static_cast<std::size_t>(np), false);
  std::vector<int> steps_done(static_cast<std::size_t>(np), 0);
  int clock = 0;
  std::mt19937_64 rng(adv.seed);
  std::size_t script_pos = 0;
  int rr_next = 0;
  int burst_proc = -1, burst_left = 0;

  auto inject_crash_if_due = [&]() {
    if (!adv.crash) return;
    int p = adv.crash->process;
    if (p < 0 || p >= np) return;
    if (crashed[static_cast<std::size_t>(p)]) return;
    if (steps_done[static_cast<std::size_t>(p)] >= adv.crash->after_steps &&
        !progs[static_cast<std::size_t>(p)]->done()) {
      crashed[static_cast<std::size_t>(p)] = true;
      Event e;
      e.t = ++clock;
      e.process = p;
      e.kind = Event::Kind::Crash;
      log.events.push_back(e);
    }
  };

  auto enabled = [&](int p) {
    return !crashed[static_cast<std::size_t>(p)] && !progs[static_cast<std::size_t>(p)]->done();
  };

  inject_crash_if_due();
  for (;;) {
    std::vector<int> en;
    for (int p = 0; p < np; ++p) {
      if (enabled(p)) en.push_back(p);
    }
    if (en.empty()) break;

    int p;
    if (adv.strategy == Adversary::Strategy::Explicit && script_pos < adv.sequence.size()) {
      p = adv.sequence[script_pos++];
      if (p < 0 || p >= np || !enabled(p)) {
        throw std::invalid_argument("adversary selected a finished or crashed process (step " +
                                    std::to_string(script_pos - 1) + ")");
      }
    } else if (adv.strategy == Adversary::Strategy::Explicit) {
      if (!adv.tail_round_robin) {
        throw std::invalid_argument("explicit adversary script exhausted before completion");
      }
      while (!enabled(rr_next % np)) ++rr_next;
      p = rr_next % np;
      ++rr_next;
    } else {
      // Seeded-random scheduling runs the chosen process for a short burst
      // (occasionally a long one), so leadership flips and one simulator
      // races ahead of the other: that is what creates contended and
      // transiently uncommitted slots.
      if (burst_left <= 0 || burst_proc < 0 || !enabled(burst_proc)) {
        burst_proc = en.size() == 1 ? en[0] : en[rng() % en.size()];
        burst_left = rng() % 4 == 0 ? 7 + static_cast<int>(rng() % 10)
                                    : 1 + static_cast<int>(rng() % 6);
      }
      p = burst_proc;
      --burst_left;
    }

    auto& prog = *progs[static_cast<std::size_t>(p)];
    Primitive op = prog.current();
    Event e;
    e.t = ++clock;
    e.process = p;
    if (op.kind == Primitive::Kind::Write) {
      e.kind = Event::Kind::Write;
      e.cell = op.cell;
      e.value = op.value;
      mem.cells[op.cell] = op.value;
      log.events.push_back(e);
      prog.advance(std::nullopt);
    } else {
      e.kind = Event::Kind::Snapshot;
      e.view = mem;
      log.events.push_back(e);
      prog.advance(mem);
    }
    ++steps_done[static_cast<std::size_t>(p)];
    inject_crash_if_due();
  }
  return log;
}

/**
 * Memory state after applying every write with timestamp strictly below t.
 * t must be the timestamp of some event in the log.
 */
inline MemoryState snapshot_view(const EventLog& log, int t) {
  bool found = false;
  for (const auto& e : log.events) {
    if (e.t == t) {
      found = true;
      break;
    }
  }
  if (!found) throw std::invalid_argument("snapshot_view: unknown timestamp " + std::to_string(t));
  MemoryState mem;
  for (const auto& e : log.events) {
    if (e.t < t && e.kind == Event::Kind::Write) mem.cells[e.cell] = e.value;
  }
  return mem;
}

// Memory state after all events with timestamp <= t (t = 0 gives the initial,
// all-bottom memory). Used to place reads at every inter-event point.
inline MemoryState view_after(const EventLog& log, int t) {
  MemoryState mem;
  for (const auto& e : log.events) {
    if (e.t <= t && e.kind == Event::Kind::Write) mem.cells[e.cell] = e.value;
  }
  return mem;
}

struct LogValidation {
  bool ok = true;
  std::vector<std::string> violations;

  void fail(std::string what) {
    ok = false;
    violations.push_back(std::move(what));
  }
};

/**
 * Independent replay validator: timestamps strictly increase, only owners
 * write their cells, no event follows a crash of the same process, and every
 * stored snapshot view equals the replay of the preceding write prefix.
 */
inline LogValidation validate_log(const EventLog& log,
                                  const std::function<int(CellId)>& owner = default_cell_owner) {
  LogValidation v;
  int last_t = 0;
  std::map<int, bool> crashed;
  MemoryState replay;
  for (const auto& e : log.events) {
    if (e.t <= last_t) v.fail("timestamps not strictly increasing at t=" + std::to_string(e.t));
    last_t = e.t;
    if (crashed[e.process]) {
      v.fail("event at t=" + std::to_string(e.t) + " after crash of process " +
             std::to_string(e.process));
    }
    switch (e.kind) {
      case Event::Kind::Write:
        if (owner(e.cell) != e.process) {
          v.fail("process " + std::to_string(e.process) + " wrote cell " + std::to_string(e.cell) +
                 " owned by " + std::to_string(owner(e.cell)));
        }
        replay.cells[e.cell] = e.value;
        break;
      case Event::Kind::Snapshot:
        if (!(e.view == replay)) {
          v.fail("snapshot at t=" + std::to_string(e.t) + " does not match the write prefix");
        }
        break;
      case Event::Kind::Crash:
        crashed[e.process] = true;
        break;
    }
  }
  int crash_count = 0;
  for (const auto& [p, c] : crashed) {
    if (c) ++crash_count;
  }
  if (crash_count > 1) v.fail("more than one crashed process");
  return v;
}

namespace detail {

inline void enumerate_orders(const std::vector<ProgramFactory>& factories,
                             const std::vector<int>& limits, std::optional<CrashPoint> crash,
                             std::vector<int>& order, std::vector<EventLog>& out) {
  std::vector<int> used(limits.size(), 0);
  for (int v : order) ++used[static_cast<std::size_t>(v)];
  bool complete = true;
  for (std::size_t p = 0; p < limits.size(); ++p) {
    if (used[p] < limits[p]) complete = false;
  }
  if (complete) {
    Adversary adv = Adversary::scripted_order(order, false, crash);
    out.push_back(execute(factories, adv));
    return;
  }
  for (std::size_t p = 0; p < limits.size(); ++p) {
    if (used[p] < limits[p]) {
      order.push_back(static_cast<int>(p));
      enumerate_orders(factories, limits, crash, order, out);
      order.pop_back();
    }
  }
}

inline int solo_length(const ProgramFactory& f) {
  auto prog = f();
  int len = 0;
  MemoryState mem;
  while (!prog->done()) {
    Primitive op = prog->current();
    if (op.kind == Primitive::Kind::Write) {
      mem.cells[op.cell] = op.value;
      prog->advance(std::nullopt);
    } else {
      prog->advance(mem);
    }
    ++len;
    if (len > 64) throw std::invalid_argument("enumerate_interleavings: program too long");
  }
  return len;
}

}  // namespace detail

/**
 * Every distinct total order of the two programs' primitives (C(a+b, a) logs
 * for primitive counts a and b), followed by every single-crash augmentation:
 * for each process p and each count k of primitives executed before the
 * crash, all orders of the truncated programs, with the crash event placed
 * canonically right where p stops. Counts are taken from solo runs.
 */
inline std::vector<EventLog> enumerate_interleavings(const std::vector<ProgramFactory>& factories,
                                                     int max_events) {
  if (factories.size() != 2) {
    throw std::invalid_argument("enumerate_interleavings: expects two programs");
  }
  if (max_events > 24) {
    throw std::invalid_argument("enumerate_interleavings: bound above 24 is intractable");
  }
  std::vector<int> lens{detail::solo_length(factories[0]), detail::solo_length(factories[1])};
  if (lens[0] + lens[1] > max_events) {
    throw std::invalid_argument("enumerate_interleavings: total primitive count exceeds bound");
  }
  std::vector<EventLog> out;
  std::vector<int> order;
  detail::enumerate_orders(factories, lens, std::nullopt, order, out);
  for (int p = 0; p < 2; ++p) {
    for (int k = 0; k < lens[static_cast<std::size_t>(p)]; ++k) {
      std::vector<int> limits = lens;
      limits[static_cast<std::size_t>(p)] = k;
      detail::enumerate_orders(factories, limits, CrashPoint{p, k}, order, out);
    }
  }
  return out;
}

}  // namespace memsim
}  // namespace byzgather

#endif  // BYZGATHER_MEMSIM_HPP_
