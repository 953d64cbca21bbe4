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

#ifndef BYZGATHER_SLOT_HPP_
#define BYZGATHER_SLOT_HPP_

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "byzgather/memsim.hpp"

namespace byzgather {
namespace slot {

// A write-once object shared by two processes. Each process may submit one
// value; reading yields both submissions plus a status telling whether (and
// to which submission) the slot has committed. Storage per slot: four SWMR
// cells, val_i and flag_i written only by process i, each at most once.
//
// submit_i(v) is the three-primitive fragment
//   (1) write val_i := v
//   (2) snapshot
//   (3) write flag_i := CLAIM if the snapshot shows val_{1-i} absent,
//       DEFER otherwise.
//
// The status is a pure function of a snapshot view, so reads are free.

inline constexpr const char* kClaim = "CLAIM";
inline constexpr const char* kDefer = "DEFER";

inline memsim::CellId val_cell(int slot, int process) { return 4 * slot + process; }
inline memsim::CellId flag_cell(int slot, int process) { return 4 * slot + 2 + process; }
inline int slot_of_cell(memsim::CellId c) { return c / 4; }
// Cell ownership matches memsim::default_cell_owner: (4j+k) & 1 == k & 1.

struct SlotStatus {
  std::optional<memsim::CellValue> v0, v1;
  std::optional<int> s;  // committed status index, nullopt = uncommitted

  const std::optional<memsim::CellValue>& value(int i) const { return i == 0 ? v0 : v1; }
  std::optional<memsim::CellValue> committed_value() const {
    if (!s) return std::nullopt;
    return *s == 0 ? v0 : v1;
  }
};

// Test hook: deliberately broken status rules for negative controls.
enum class StatusMutation {
  None,
  IgnoreClaim,          // treats CLAIM flags as DEFER
  CommitWithoutValues,  // rule (c) without requiring equal values
};

/**
 * Status of one slot computed from a snapshot-consistent view:
 *   (a) some flag_i = CLAIM            -> s = i   (at most one CLAIM exists)
 *   (b) both flags DEFER               -> s = 0
 *   (c) one DEFER, both values equal   -> s = 0
 *   (d) otherwise                      -> uncommitted
 */
inline SlotStatus read_status(const memsim::MemoryState& view, int slot,
                              StatusMutation mutation = StatusMutation::None) {
  SlotStatus st;
  st.v0 = view.read(val_cell(slot, 0));
  st.v1 = view.read(val_cell(slot, 1));
  auto f0 = view.read(flag_cell(slot, 0));
  auto f1 = view.read(flag_cell(slot, 1));
  if (mutation == StatusMutation::IgnoreClaim) {
    if (f0 && *f0 == kClaim) f0 = kDefer;
    if (f1 && *f1 == kClaim) f1 = kDefer;
  }
  if (f0 && *f0 == kClaim) {
    st.s = 0;
  } else if (f1 && *f1 == kClaim) {
    st.s = 1;
  } else if (f0 && f1) {
    st.s = 0;  // both DEFER
  } else if (f0 || f1) {
    bool values_agree = st.v0 && st.v1 && *st.v0 == *st.v1;
    if (values_agree || mutation == StatusMutation::CommitWithoutValues) st.s = 0;
  }
  return st;
}

/** The submit_i(v) fragment as a memsim process program. */
class SubmitProgram final : public memsim::ProcessProgram {
 public:
  SubmitProgram(int process, int slot, memsim::CellValue value)
      : process_(process), slot_(slot), value_(std::move(value)) {}

  bool done() const override { return phase_ >= 3; }

  memsim::Primitive current() const override {
    switch (phase_) {
      case 0:
        return memsim::write_op(val_cell(slot_, process_), value_);
      case 1:
        return memsim::snapshot_op();
      case 2:
        return memsim::write_op(flag_cell(slot_, process_), flag_);
      default:
        throw std::logic_error("SubmitProgram: already finished");
    }
  }

  void advance(const std::optional<memsim::MemoryState>& view) override {
    if (phase_ == 1) {
      flag_ = view->read(val_cell(slot_, 1 - process_)) ? kDefer : kClaim;
    }
    ++phase_;
  }

 private:
  int process_;
  int slot_;
  memsim::CellValue value_;
  std::string flag_;
  int phase_ = 0;
};

inline memsim::ProgramFactory submit_program(int process, int slot, memsim::CellValue value) {
  return [process, slot, value]() { return std::make_unique<SubmitProgram>(process, slot, value); };
}

struct PropertyResult {
  bool pass = true;
  std::string witness;  // violating read point / explanation

  void fail(std::string w) {
    if (pass) witness = std::move(w);
    pass = false;
  }
};

struct SlotPropertyReport {
  PropertyResult validity;
  PropertyResult contended_value_detection;
  PropertyResult persistency;
  PropertyResult commitment;
  PropertyResult no_contention_commitment;
  PropertyResult common_value_commitment;
  PropertyResult at_most_one_claim;
  PropertyResult write_once;

  bool all_pass() const {
    return validity.pass && contended_value_detection.pass && persistency.pass &&
           commitment.pass && no_contention_commitment.pass && common_value_commitment.pass &&
           at_most_one_claim.pass && write_once.pass;
  }
};

/**
 * Evaluates the slot properties over one event log, reading at every
 * inter-event point. Reads are attributed to processes per the object's
 * usage: a process reads a slot only after completing its own submission, so
 * the detection property quantifies over points past the first completed
 * submission. Persistency is the refined contract: the committed value is
 * stable always; the status index is stable whenever the two submitted
 * values differ.
 */
inline SlotPropertyReport check_slot_properties(
    const memsim::EventLog& log, int slot,
    const std::array<memsim::CellValue, 2>& configured_values,
    StatusMutation mutation = StatusMutation::None) {
  SlotPropertyReport rep;

  constexpr int kInf = INT32_MAX;
  std::array<int, 2> b{kInf, kInf}, e{kInf, kInf};
  std::array<std::optional<memsim::CellValue>, 2> written;
  for (const auto& ev : log.events) {
    if (ev.kind != memsim::Event::Kind::Write) continue;
    for (int i = 0; i < 2; ++i) {
      if (ev.cell == val_cell(slot, i)) {
        if (written[static_cast<std::size_t>(i)]) {
          rep.write_once.fail("val cell of p" + std::to_string(i) + " written twice at t=" +
                              std::to_string(ev.t));
        }
        b[static_cast<std::size_t>(i)] = std::min(b[static_cast<std::size_t>(i)], ev.t);
        written[static_cast<std::size_t>(i)] = ev.value;
      }
      if (ev.cell == flag_cell(slot, i)) {
        if (e[static_cast<std::size_t>(i)] != kInf) {
          rep.write_once.fail("flag cell of p" + std::to_string(i) + " written twice at t=" +
                              std::to_string(ev.t));
        }
        e[static_cast<std::size_t>(i)] = std::min(e[static_cast<std::size_t>(i)], ev.t);
      }
    }
  }

  std::vector<int> points{0};
  for (const auto& ev : log.events) points.push_back(ev.t);

  const bool values_equal = configured_values[0] == configured_values[1];
  const int min_e = std::min(e[0], e[1]);
  const int max_e = std::max(e[0], e[1]);

  std::optional<int> seen_status;
  std::optional<memsim::CellValue> seen_value;
  for (int t : points) {
    auto view = memsim::view_after(log, t);
    SlotStatus st = read_status(view, slot, mutation);
    const std::string at = "read after t=" + std::to_string(t);

    auto fv0 = view.read(flag_cell(slot, 0));
    auto fv1 = view.read(flag_cell(slot, 1));
    if (fv0 && fv1 && *fv0 == kClaim && *fv1 == kClaim) rep.at_most_one_claim.fail(at);

    for (int i = 0; i < 2; ++i) {
      const auto& w = st.value(i);
      if (w && (!written[static_cast<std::size_t>(i)] ||
                *w != *written[static_cast<std::size_t>(i)])) {
        rep.validity.fail(at + ": w" + std::to_string(i) + " is not the submitted value");
      }
    }

    if (t >= min_e && !st.s && (!st.v0 || !st.v1)) {
      rep.contended_value_detection.fail(at + ": uncommitted read with a missing value");
    }

    if (st.s) {
      auto cv = st.committed_value();
      if (seen_status) {
        if (!values_equal && *seen_status != *st.s) {
          rep.persistency.fail(at + ": status index changed from " +
                               std::to_string(*seen_status) + " to " + std::to_string(*st.s));
        }
        if (seen_value && cv && *seen_value != *cv) {
          rep.persistency.fail(at + ": committed value changed");
        }
      }
      seen_status = st.s;
      if (cv) seen_value = cv;
    } else if (seen_status) {
      rep.persistency.fail(at + ": status reverted to uncommitted");
    }

    if (max_e != kInf && t >= max_e && !st.s) {
      rep.commitment.fail(at + ": uncommitted after both submissions ended");
    }

    for (int i = 0; i < 2; ++i) {
      if (e[static_cast<std::size_t>(i)] != kInf &&
          e[static_cast<std::size_t>(i)] < b[static_cast<std::size_t>(1 - i)] &&
          t >= e[static_cast<std::size_t>(i)]) {
        if (!st.s || *st.s != i) {
          rep.no_contention_commitment.fail(at + ": expected committed status " +
                                            std::to_string(i));
        }
      }
    }

    if (values_equal && min_e != kInf && t >= min_e && !st.s) {
      rep.common_value_commitment.fail(at + ": uncommitted after the first submission ended");
    }
  }
  return rep;
}

struct ExhaustiveSlotReport {
  int total_logs = 0;
  int crash_free_logs = 0;
  int crash_logs = 0;
  int reads_checked = 0;
  SlotPropertyReport aggregate;  // first failure witnesses across all logs
  bool blocking_bound_ok = true;
  std::string blocking_witness;

  bool all_pass() const { return aggregate.all_pass() && blocking_bound_ok; }
};

/**
 * Enumerates every interleaving of two submissions to one slot (plus every
 * single-crash augmentation) and checks all properties on each log. Also
 * verifies the blocking bound: a slot left uncommitted forever requires a
 * process crashed inside its own submission.
 */
inline ExhaustiveSlotReport exhaustive_slot_check(
    const std::array<memsim::CellValue, 2>& values, int slot = 0,
    StatusMutation mutation = StatusMutation::None) {
  std::vector<memsim::ProgramFactory> programs{submit_program(0, slot, values[0]),
                                               submit_program(1, slot, values[1])};
  auto logs = memsim::enumerate_interleavings(programs, 6);
  ExhaustiveSlotReport rep;
  for (const auto& log : logs) {
    ++rep.total_logs;
    bool has_crash = false;
    for (const auto& ev : log.events) {
      if (ev.kind == memsim::Event::Kind::Crash) has_crash = true;
    }
    has_crash ? ++rep.crash_logs : ++rep.crash_free_logs;
    rep.reads_checked += static_cast<int>(log.events.size()) + 1;

    auto r = check_slot_properties(log, slot, values, mutation);
    auto merge = [](PropertyResult& into, const PropertyResult& from) {
      if (!from.pass) into.fail(from.witness);
    };
    merge(rep.aggregate.validity, r.validity);
    merge(rep.aggregate.contended_value_detection, r.contended_value_detection);
    merge(rep.aggregate.persistency, r.persistency);
    merge(rep.aggregate.commitment, r.commitment);
    merge(rep.aggregate.no_contention_commitment, r.no_contention_commitment);
    merge(rep.aggregate.common_value_commitment, r.common_value_commitment);
    merge(rep.aggregate.at_most_one_claim, r.at_most_one_claim);
    merge(rep.aggregate.write_once, r.write_once);

    // Blocking bound: forever-uncommitted implies a crash inside a submit.
    int last_t = log.events.empty() ? 0 : log.events.back().t;
    auto final_status = read_status(memsim::view_after(log, last_t), slot, mutation);
    if (!final_status.s) {
      bool crash_inside = false;
      for (const auto& ev : log.events) {
        if (ev.kind != memsim::Event::Kind::Crash) continue;
        int p = ev.process;
        bool val_written = false, flag_written = false;
        for (const auto& w : log.events) {
          if (w.kind != memsim::Event::Kind::Write) continue;
          if (w.cell == val_cell(slot, p)) val_written = true;
          if (w.cell == flag_cell(slot, p)) flag_written = true;
        }
        if (val_written && !flag_written) crash_inside = true;
      }
      if (!crash_inside && rep.blocking_bound_ok) {
        rep.blocking_bound_ok = false;
        rep.blocking_witness = "slot uncommitted without a mid-submission crash";
      }
    }
  }
  return rep;
}

}  // namespace slot
}  // namespace byzgather

#endif  // BYZGATHER_SLOT_HPP_
