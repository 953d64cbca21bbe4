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

#ifndef BYZGATHER_REDUCTION_HPP_
#define BYZGATHER_REDUCTION_HPP_

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "byzgather/atom.hpp"
#include "byzgather/formations.hpp"
#include "byzgather/memsim.hpp"
#include "byzgather/robot.hpp"
#include "byzgather/slot.hpp"

namespace byzgather {
namespace reduction {

// Two simulator processes run an (n+1)-robot execution of a plugged robot
// algorithm on top of the shared-memory simulator: an unbounded array of
// write-once slots carries the behavior of the correct robots in round-robin
// order (slot j belongs to robot j mod n), the Byzantine robot absorbs the
// uncertainty of not-yet-committed slots, and a decision is decoded from the
// reached stable pattern.

inline int robot_of_slot(int slot, int n) { return slot % n; }

inline memsim::CellValue encode_local_state(const LocalState& s) {
  return rational_to_string(s.loc.x) + "," + rational_to_string(s.loc.y) + ";" + s.state;
}

inline LocalState decode_local_state(const memsim::CellValue& v) {
  auto comma = v.find(',');
  auto semi = v.find(';');
  if (comma == std::string::npos || semi == std::string::npos || semi < comma) {
    throw std::invalid_argument("malformed local-state cell value: \"" + v + "\"");
  }
  LocalState s;
  s.loc.x = rational_from_string(v.substr(0, comma));
  s.loc.y = rational_from_string(v.substr(comma + 1, semi - comma - 1));
  s.state = v.substr(semi + 1);
  return s;
}

/**
 * Variant-specific pieces of the reduction: where a proposal places the
 * robots initially, when a configuration counts as stable, and where the
 * helping Byzantine position is when every window slot is committed.
 */
struct Semantics {
  int n = 0;
  std::string variant = "gathering";
  std::optional<formations::FormationSpec> formation_spec;
  Point formation_witness{};  // translation encoding proposal one (formations)

  static Semantics gathering(int n) {
    Semantics s;
    s.n = n;
    return s;
  }
  static Semantics formation(const formations::FormationSpec& f, const Point& witness) {
    Semantics s;
    s.n = f.n();
    s.variant = f.name;
    s.formation_spec = f;
    s.formation_witness = witness;
    return s;
  }

  Point initial_location(int proposal, int slot) const {
    if (!formation_spec) return Point{Rational(proposal), Rational(0)};
    Point base{Rational(slot), Rational(0)};
    return proposal == 0 ? base : base + formation_witness;
  }

  Point helper(const LocationMultiset& correct) const {
    if (!formation_spec) return max_multiplicity(correct).first;
    auto fit = formations::best_fit(*formation_spec, correct);
    if (!fit.helper) {
      // Completion exhausted (cannot happen with n < arity points); fall back
      // to the most crowded location.
      return max_multiplicity(correct).first;
    }
    return *fit.helper;
  }

  bool legitimate(const Configuration& c) const {
    if (!formation_spec) return is_legitimate_now(c);
    return formations::correct_legitimate(*formation_spec, c.correct_locations());
  }

  // Canonical support of a stable pattern, for the formation decode.
  std::string support(const LocationMultiset& correct) const {
    if (!formation_spec) return "";
    const auto d = LocationMultiset(correct.points()).distinct();
    if (formation_spec->family == formations::Family::Line) {
      if (d.size() >= 2) {
        Line l = line_through(d[0], d[1]);
        return "line:" + rational_to_string(l.a) + "," + rational_to_string(l.b) + "," +
               rational_to_string(l.c);
      }
    } else if (formation_spec->family == formations::Family::Circle) {
      if (d.size() >= 3) {
        auto c = circle_through(d[0], d[1], d[2]);
        if (c) {
          return "circle:" + rational_to_string(c->center.x) + "," +
                 rational_to_string(c->center.y) + "," + rational_to_string(c->r2);
        }
      }
    }
    return "degenerate";
  }
};

struct GetView {
  bool all_committed = false;  // q
  Configuration config;
  std::optional<int> uncommitted_slot;
};

/**
 * Builds the observation of the simulated configuration at main-loop slot u
 * from a snapshot of the slot array: committed window slots contribute their
 * committed value at the owning robot's index; the single uncommitted slot
 * (if any) contributes the reader's own submission, with the peer's
 * submission placed at the Byzantine entry. With a fully committed window
 * the Byzantine entry is the helping position instead.
 */
inline GetView getview(int process, int u, const memsim::MemoryState& view,
                       const Semantics& sem) {
  const int n = sem.n;
  if (u < n) throw std::invalid_argument("getview: u must be at least n");
  std::vector<LocalState> robots(static_cast<std::size_t>(n) + 1);
  GetView out;
  out.all_committed = true;
  for (int l = 0; l < n; ++l) {
    const int j = u - n + l;
    auto st = slot::read_status(view, j);
    if (st.s) {
      robots[static_cast<std::size_t>(robot_of_slot(j, n))] =
          decode_local_state(*st.committed_value());
      continue;
    }
    if (out.uncommitted_slot) {
      throw std::runtime_error("getview: two uncommitted slots in one window (slots " +
                               std::to_string(*out.uncommitted_slot) + " and " +
                               std::to_string(j) + ")");
    }
    if (!st.value(process)) {
      throw std::runtime_error("getview: reader's own submission missing from slot " +
                               std::to_string(j) + " (corrupted trace)");
    }
    if (!st.value(1 - process)) {
      throw std::runtime_error("getview: uncommitted slot " + std::to_string(j) +
                               " lacks the peer submission (corrupted trace)");
    }
    out.all_committed = false;
    out.uncommitted_slot = j;
    robots[static_cast<std::size_t>(robot_of_slot(j, n))] =
        decode_local_state(*st.value(process));
    robots[static_cast<std::size_t>(n)] = decode_local_state(*st.value(1 - process));
  }
  if (out.all_committed) {
    std::vector<Point> correct;
    correct.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) correct.push_back(robots[static_cast<std::size_t>(i)].loc);
    robots[static_cast<std::size_t>(n)] =
        LocalState{{}, sem.helper(LocationMultiset(std::move(correct)))};
  }
  out.config = Configuration(std::move(robots));
  return out;
}

/** decode: zero iff the gathering point equals the reference run's point. */
inline int decode(const Point& point, const Point& reference_point) {
  return point == reference_point ? 0 : 1;
}

struct ReferenceRun {
  bool reached = false;
  Point point{};        // common location of the correct robots
  std::string support;  // canonical support (formations)
  int rounds = 0;
  Configuration final_config;
};

/**
 * The benign deterministic execution: all slots committed, the Byzantine
 * robot pinned to the helping position, correct robots activated round-robin
 * starting from robot 0. Uniquely determined by the initial configuration,
 * so it fixes the decode reference.
 */
inline ReferenceRun reference_run(const AlgorithmSet& algorithms, int proposal,
                                  const Semantics& sem, int max_rounds) {
  const int n = sem.n;
  if (static_cast<int>(algorithms.size()) != n) {
    throw std::invalid_argument("reference_run: need one program per correct robot");
  }
  std::vector<LocalState> robots;
  for (int l = 0; l < n; ++l) {
    robots.push_back(LocalState{algorithms[static_cast<std::size_t>(l)]->initial_state(l),
                                sem.initial_location(proposal, l)});
  }
  robots.push_back(LocalState{});  // Byzantine entry, repositioned each round
  Configuration c(std::move(robots));
  ReferenceRun out;
  for (int r = 0; r <= max_rounds; ++r) {
    c[n].loc = sem.helper(c.correct_locations());
    if (sem.legitimate(c)) {
      out.reached = true;
      out.point = c[0].loc;
      out.support = sem.support(c.correct_locations());
      out.rounds = r;
      out.final_config = c;
      return out;
    }
    if (r == max_rounds) break;
    c = step(c, round_of({r % n}), algorithms);
  }
  out.rounds = max_rounds;
  out.final_config = c;
  return out;
}

struct Submission {
  LocalState value;
  int b = 0;                // timestamp of the value write
  std::optional<int> e;     // timestamp of the flag write; absent if crashed inside
};

struct SlotRecord {
  int j = 0;
  std::array<std::optional<Submission>, 2> subs;
  std::optional<int> committed;      // final status index
  std::optional<LocalState> value;   // final committed value
};

struct Decision {
  int slot = 0;
  int t = 0;  // timestamp of the deciding snapshot
  int value = 0;
  Point point{};        // gathering point observed at the decision
  std::string support;  // formation support observed at the decision
};

enum class Outcome { Decided, Crashed, BoundExhausted };

inline std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Decided:
      return "decided";
    case Outcome::Crashed:
      return "crashed";
    case Outcome::BoundExhausted:
      return "bound-exhausted";
  }
  return "?";
}

struct ReductionTrace {
  int n = 0;
  std::array<int, 2> proposals{0, 0};
  std::string algorithm;
  std::string variant = "gathering";
  std::optional<Point> formation_witness;
  int max_slots = 0;
  memsim::Adversary adversary;
  memsim::EventLog log;
  std::vector<SlotRecord> slots;
  std::array<std::map<int, int>, 2> entry_ts;  // main-loop slot -> snapshot timestamp
  std::array<std::optional<Decision>, 2> decisions;
  std::array<Outcome, 2> outcomes{Outcome::BoundExhausted, Outcome::BoundExhausted};
  Point reference_point{};
  std::string reference_support;

  Semantics semantics() const {
    if (variant == "gathering") return Semantics::gathering(n);
    return Semantics::formation(formations::formation_by_name(variant, n + 1),
                                formation_witness.value_or(Point{}));
  }
};

namespace detail {

struct Note {
  enum class Kind { InitVal, InitSnap, InitFlag, GetView, SubmitVal, SubmitSnap, SubmitFlag };
  Kind kind;
  int slot;
};

struct ProcessRecorder {
  std::vector<Note> notes;  // one per executed primitive, in execution order
  std::map<int, LocalState> submissions;
  std::optional<Decision> decision;
  bool bound_exhausted = false;

  void reset() {
    notes.clear();
    submissions.clear();
    decision.reset();
    bound_exhausted = false;
  }
};

/** The simulator process of Algorithm ConsensusToGathering as a memsim program. */
class SimulatorProcess final : public memsim::ProcessProgram {
 public:
  SimulatorProcess(int id, int proposal, AlgorithmSet algorithms, Semantics sem, int max_slots,
                   Point reference_point, std::string reference_support,
                   std::shared_ptr<ProcessRecorder> rec)
      : id_(id),
        proposal_(proposal),
        algorithms_(std::move(algorithms)),
        sem_(std::move(sem)),
        max_slots_(max_slots),
        reference_point_(reference_point),
        reference_support_(std::move(reference_support)),
        rec_(std::move(rec)) {
    pending_value_ = LocalState{
        algorithms_[static_cast<std::size_t>(robot_of_slot(0, sem_.n))]->initial_state(0),
        sem_.initial_location(proposal_, 0)};
  }

  bool done() const override { return phase_ == Phase::Done; }

  memsim::Primitive current() const override {
    switch (phase_) {
      case Phase::InitVal:
      case Phase::SubmitVal:
        return memsim::write_op(slot::val_cell(u_, id_), encode_local_state(pending_value_));
      case Phase::InitSnap:
      case Phase::SubmitSnap:
        return memsim::snapshot_op();
      case Phase::InitFlag:
      case Phase::SubmitFlag:
        return memsim::write_op(slot::flag_cell(u_, id_), pending_flag_);
      case Phase::GetView:
        return memsim::snapshot_op();
      case Phase::Done:
        break;
    }
    throw std::logic_error("SimulatorProcess: no pending primitive");
  }

  void advance(const std::optional<memsim::MemoryState>& view) override {
    switch (phase_) {
      case Phase::InitVal:
        note(Note::Kind::InitVal);
        phase_ = Phase::InitSnap;
        return;
      case Phase::InitSnap:
        note(Note::Kind::InitSnap);
        pending_flag_ = view->read(slot::val_cell(u_, 1 - id_)) ? slot::kDefer : slot::kClaim;
        phase_ = Phase::InitFlag;
        return;
      case Phase::InitFlag:
        note(Note::Kind::InitFlag);
        ++u_;
        if (u_ < sem_.n) {
          pending_value_ = LocalState{
              algorithms_[static_cast<std::size_t>(robot_of_slot(u_, sem_.n))]->initial_state(u_),
              sem_.initial_location(proposal_, u_)};
          phase_ = Phase::InitVal;
        } else {
          phase_ = u_ < max_slots_ ? Phase::GetView : Phase::Done;
          if (phase_ == Phase::Done) rec_->bound_exhausted = true;
        }
        return;
      case Phase::GetView: {
        note(Note::Kind::GetView);
        GetView gv = getview(id_, u_, *view, sem_);
        if (gv.all_committed && sem_.legitimate(gv.config)) {
          Decision d;
          d.slot = u_;
          d.point = max_multiplicity(gv.config.locations()).first;
          d.support = sem_.support(gv.config.correct_locations());
          d.value = sem_.formation_spec ? (d.support == reference_support_ ? 0 : 1)
                                   : decode(d.point, reference_point_);
          rec_->decision = d;
          phase_ = Phase::Done;
          return;
        }
        const int actor = robot_of_slot(u_, sem_.n);
        Action a = algorithms_[static_cast<std::size_t>(actor)]->compute(
            observe(gv.config, actor), gv.config[actor].state);
        pending_value_ = LocalState{a.next_state, gv.config[actor].loc + a.dest};
        phase_ = Phase::SubmitVal;
        return;
      }
      case Phase::SubmitVal:
        note(Note::Kind::SubmitVal);
        phase_ = Phase::SubmitSnap;
        return;
      case Phase::SubmitSnap:
        note(Note::Kind::SubmitSnap);
        pending_flag_ = view->read(slot::val_cell(u_, 1 - id_)) ? slot::kDefer : slot::kClaim;
        phase_ = Phase::SubmitFlag;
        return;
      case Phase::SubmitFlag:
        note(Note::Kind::SubmitFlag);
        ++u_;
        if (u_ < max_slots_) {
          phase_ = Phase::GetView;
        } else {
          phase_ = Phase::Done;
          rec_->bound_exhausted = true;
        }
        return;
      case Phase::Done:
        break;
    }
    throw std::logic_error("SimulatorProcess: advance past completion");
  }

 private:
  enum class Phase { InitVal, InitSnap, InitFlag, GetView, SubmitVal, SubmitSnap, SubmitFlag, Done };

  void note(Note::Kind kind) {
    rec_->notes.push_back(Note{kind, u_});
    if (kind == Note::Kind::InitVal || kind == Note::Kind::SubmitVal) {
      rec_->submissions.emplace(u_, pending_value_);
    }
  }

  int id_;
  int proposal_;
  AlgorithmSet algorithms_;
  Semantics sem_;
  int max_slots_;
  Point reference_point_;
  std::string reference_support_;
  std::shared_ptr<ProcessRecorder> rec_;
  Phase phase_ = Phase::InitVal;
  int u_ = 0;
  LocalState pending_value_;
  std::string pending_flag_;
};

}  // namespace detail

inline int default_max_slots(int n) { return 64 * n; }

/**
 * Runs the two-process reduction to completion under the adversary. The
 * decode reference is fixed by the benign proposal-zero reference run first.
 * Hitting max_slots is reported in the outcome, never as a decision.
 */
inline ReductionTrace run_consensus(const std::array<int, 2>& proposals,
                                    const AlgorithmSet& algorithms,
                                    const memsim::Adversary& adversary, const Semantics& sem,
                                    int max_slots = 0, const std::string& algorithm_name = "") {
  const int n = sem.n;
  if (n <= 2) throw std::invalid_argument("run_consensus: n > 2 required");
  if (proposals[0] != 0 && proposals[0] != 1) throw std::invalid_argument("binary proposals only");
  if (proposals[1] != 0 && proposals[1] != 1) throw std::invalid_argument("binary proposals only");
  if (max_slots == 0) max_slots = default_max_slots(n);
  if (max_slots <= n) throw std::invalid_argument("max_slots must exceed n");

  auto ref = reference_run(algorithms, 0, sem, 4 * max_slots);
  if (!ref.reached) {
    throw std::runtime_error(
        "reference run did not stabilize: the plugged algorithm does not solve the task in the "
        "benign schedule");
  }

  auto rec0 = std::make_shared<detail::ProcessRecorder>();
  auto rec1 = std::make_shared<detail::ProcessRecorder>();
  auto factory = [&](int id, std::shared_ptr<detail::ProcessRecorder> rec) {
    return memsim::ProgramFactory([=, &algorithms]() {
      rec->reset();
      return std::make_unique<detail::SimulatorProcess>(
          id, proposals[static_cast<std::size_t>(id)], algorithms, sem, max_slots, ref.point,
          ref.support, rec);
    });
  };
  auto log = memsim::execute({factory(0, rec0), factory(1, rec1)}, adversary);

  ReductionTrace trace;
  trace.n = n;
  trace.proposals = proposals;
  trace.algorithm = algorithm_name.empty()
                        ? (algorithms.empty() ? "" : algorithms[0]->name())
                        : algorithm_name;
  trace.variant = sem.variant;
  if (sem.formation_spec) trace.formation_witness = sem.formation_witness;
  trace.max_slots = max_slots;
  trace.adversary = adversary;
  trace.log = std::move(log);
  trace.reference_point = ref.point;
  trace.reference_support = ref.support;

  std::array<std::shared_ptr<detail::ProcessRecorder>, 2> recs{rec0, rec1};
  std::array<std::size_t, 2> ordinal{0, 0};
  std::map<int, SlotRecord> slots;
  std::array<bool, 2> crashed{false, false};
  for (const auto& ev : trace.log.events) {
    const auto p = static_cast<std::size_t>(ev.process);
    if (ev.kind == memsim::Event::Kind::Crash) {
      crashed[p] = true;
      continue;
    }
    const auto& notes = recs[p]->notes;
    if (ordinal[p] >= notes.size()) {
      throw std::logic_error("trace bookkeeping out of sync with the event log");
    }
    const auto& note = notes[ordinal[p]++];
    auto& slot_rec = slots[note.slot];
    slot_rec.j = note.slot;
    switch (note.kind) {
      case detail::Note::Kind::InitVal:
      case detail::Note::Kind::SubmitVal:
        slot_rec.subs[p] = Submission{recs[p]->submissions.at(note.slot), ev.t, std::nullopt};
        break;
      case detail::Note::Kind::InitFlag:
      case detail::Note::Kind::SubmitFlag:
        slot_rec.subs[p]->e = ev.t;
        break;
      case detail::Note::Kind::GetView:
        trace.entry_ts[p][note.slot] = ev.t;
        if (recs[p]->decision && recs[p]->decision->slot == note.slot) {
          recs[p]->decision->t = ev.t;
        }
        break;
      default:
        break;
    }
  }

  memsim::MemoryState final_mem;
  for (const auto& ev : trace.log.events) {
    if (ev.kind == memsim::Event::Kind::Write) final_mem.cells[ev.cell] = ev.value;
  }
  for (auto& [j, slot_rec] : slots) {
    auto st = slot::read_status(final_mem, j);
    if (st.s) {
      slot_rec.committed = st.s;
      slot_rec.value = decode_local_state(*st.committed_value());
    }
    trace.slots.push_back(slot_rec);
  }

  for (int p = 0; p < 2; ++p) {
    const auto ps = static_cast<std::size_t>(p);
    trace.decisions[ps] = recs[ps]->decision;
    if (recs[ps]->decision) {
      trace.outcomes[ps] = Outcome::Decided;
    } else if (crashed[ps]) {
      trace.outcomes[ps] = Outcome::Crashed;
    } else {
      trace.outcomes[ps] = Outcome::BoundExhausted;
    }
  }
  return trace;
}

/**
 * The generalized reduction for bivalent formation problems. The witness
 * translation is validated up front against the reference pattern: families
 * whose extension collapses into one class (2-gathering) are rejected with
 * the connecting chain as evidence.
 */
inline ReductionTrace run_formation_consensus(const std::array<int, 2>& proposals,
                                              const AlgorithmSet& algorithms,
                                              const formations::FormationSpec& f, const Point& x,
                                              const memsim::Adversary& adversary,
                                              int max_slots = 0,
                                              const std::string& algorithm_name = "") {
  Semantics sem = Semantics::formation(f, x);
  auto ref = reference_run(algorithms, 0, sem, 4 * (max_slots ? max_slots : default_max_slots(sem.n)));
  if (!ref.reached) {
    throw std::runtime_error(
        "reference run did not reach a stable pattern; cannot validate the witness");
  }
  auto pattern = formations::best_fit(f, ref.final_config.correct_locations()).pattern;
  auto cert = formations::check_bivalency_witness(f, pattern, x, 500);
  if (cert.connecting_chain) {
    throw std::invalid_argument("formation \"" + f.name +
                                "\" is not bivalent: the patterns are chain-connected");
  }
  if (!cert.certified) {
    throw std::invalid_argument("formation witness rejected: " + cert.reason);
  }
  return run_consensus(proposals, algorithms, adversary, sem, max_slots, algorithm_name);
}

}  // namespace reduction
}  // namespace byzgather

#endif  // BYZGATHER_REDUCTION_HPP_
