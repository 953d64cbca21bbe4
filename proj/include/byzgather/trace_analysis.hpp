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

#ifndef BYZGATHER_TRACE_ANALYSIS_HPP_
#define BYZGATHER_TRACE_ANALYSIS_HPP_

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "byzgather/reduction.hpp"

namespace byzgather {
namespace trace_analysis {

// Post-hoc derivation of the simulated robot execution out of a finished
// reduction trace: who committed each slot, which slots are critical, whose
// observations validate each step, and whether the induced configuration
// sequence is an admissible Byzantine-robot execution.

enum class Criticality { No, Yes, Provisional };

struct SlotMeta {
  int j = 0;
  std::array<std::optional<reduction::Submission>, 2> subs;
  std::array<std::optional<int>, 2> entry_t;  // main-loop snapshot timestamps
  std::optional<int> committed;               // final status index from the log
  std::optional<LocalState> committed_value;
  std::optional<int> c_star;  // committer, extended to survivor-continued slots
  Criticality criticality = Criticality::Provisional;
  std::optional<int> validator;
};

struct StepIssue {
  int j = 0;
  std::string what;
};

struct AdmissibilityReport {
  int first_arrow = 0;
  int last_arrow = -1;  // arrows j in [first_arrow, last_arrow] were checked
  bool steps_ok = true;
  bool validator_submission_ok = true;
  bool entry_order_ok = true;
  bool byz_helper_ok = true;
  std::vector<StepIssue> violations;
  ExecutionTrace derived;
  bool centralized = true;
  int measured_k = 1;
  std::vector<int> critical_slots;
  std::vector<int> validator_reassignments;  // slots with val(j) != c*(j)

  bool ok() const {
    return steps_ok && validator_submission_ok && entry_order_ok && byz_helper_ok;
  }
};

struct ConsensusReport {
  bool agreement_applicable = false;
  bool agreement_ok = true;
  bool validity_applicable = false;
  bool validity_ok = true;
  bool both_decided = false;
  bool any_crash = false;
  std::array<std::string, 2> outcomes;
  std::string summary;

  bool ok() const { return agreement_ok && validity_ok; }
};

class TraceAnalyzer {
 public:
  TraceAnalyzer(const reduction::ReductionTrace& trace, AlgorithmSet algorithms)
      : trace_(trace), algorithms_(std::move(algorithms)), sem_(trace.semantics()) {
    parse_log();
    compute_committers();
    compute_horizon();
    compute_criticality_and_validators();
  }

  int n() const { return trace_.n; }
  int horizon() const { return horizon_; }
  // Last slot with a derivable simulated configuration; one past the horizon
  // when the deciders' entry snapshots make the final configuration visible.
  int last_config_slot() const { return last_config_slot_; }
  const std::map<int, SlotMeta>& slots() const { return meta_; }

  const SlotMeta& slot(int j) const {
    auto it = meta_.find(j);
    if (it == meta_.end()) throw std::out_of_range("no such slot: " + std::to_string(j));
    return it->second;
  }

  Criticality criticality(int j) const { return slot(j).criticality; }
  std::optional<int> validator(int j) const { return slot(j).validator; }

  /**
   * The simulated configuration of main-loop slot j: the validator's
   * reconstructed observation, swapped so that an uncommitted window slot k
   * carries its own validator's submission at the owning robot's entry.
   */
  Configuration simulated_configuration(int j) const {
    if (j < trace_.n || j > last_config_slot_) {
      throw std::out_of_range("simulated_configuration: slot outside [n, horizon]");
    }
    const SlotMeta& m = slot(j);
    if (!m.validator || !m.entry_t[static_cast<std::size_t>(*m.validator)]) {
      throw std::runtime_error("simulated_configuration: validator unknown for slot " +
                               std::to_string(j));
    }
    const int w = *m.validator;
    const int t = *m.entry_t[static_cast<std::size_t>(w)];
    auto gv = reduction::getview(w, j, view_at(t), sem_);
    if (!gv.uncommitted_slot) return gv.config;
    const int k = *gv.uncommitted_slot;
    const SlotMeta& mk = slot(k);
    if (!mk.validator || !mk.subs[static_cast<std::size_t>(*mk.validator)]) {
      throw std::runtime_error("simulated_configuration: no validator value for open slot " +
                               std::to_string(k));
    }
    const LocalState& vk = mk.subs[static_cast<std::size_t>(*mk.validator)]->value;
    const int idx = reduction::robot_of_slot(k, trace_.n);
    if (gv.config[idx] == vk) return gv.config;  // identity swap
    Configuration swapped = swap_entry(gv.config, idx);
    if (swapped[idx] == vk) return swapped;
    throw std::runtime_error("simulated_configuration: slot " + std::to_string(k) +
                             " carries neither submission at entry " + std::to_string(idx) +
                             " (corrupted trace)");
  }

  /** The validator's submission fixing step j of the simulated execution. */
  std::optional<LocalState> validator_value(int j) const {
    const SlotMeta& m = slot(j);
    if (!m.validator) return std::nullopt;
    const auto& sub = m.subs[static_cast<std::size_t>(*m.validator)];
    if (!sub) return std::nullopt;
    return sub->value;
  }

  AdmissibilityReport check_lemma_admissible() const {
    AdmissibilityReport rep;
    const int n = trace_.n;
    const int last = last_config_slot_;
    rep.first_arrow = n;
    rep.last_arrow = last - 1;
    if (rep.last_arrow < rep.first_arrow) return rep;

    std::vector<Configuration> configs;
    for (int j = n; j <= last; ++j) configs.push_back(simulated_configuration(j));

    for (int j = n; j < last; ++j) {
      const auto& cj = configs[static_cast<std::size_t>(j - n)];
      const auto& cj1 = configs[static_cast<std::size_t>(j + 1 - n)];
      const int actor = reduction::robot_of_slot(j, n);

      auto sc = check_step(cj, cj1, actor, algorithms_);
      if (!sc.ok) {
        rep.steps_ok = false;
        rep.violations.push_back({j, "step: " + sc.diagnostic});
      }
      auto vj = validator_value(j);
      if (!vj || !(cj1[actor] == *vj)) {
        rep.validator_submission_ok = false;
        rep.violations.push_back({j, "next configuration does not carry the validator value"});
      }
      const auto tj = slot(j).entry_t[static_cast<std::size_t>(*slot(j).validator)];
      const auto tj1 = slot(j + 1).entry_t[static_cast<std::size_t>(*slot(j + 1).validator)];
      if (!tj || !tj1 || !(*tj < *tj1)) {
        rep.entry_order_ok = false;
        rep.violations.push_back({j, "validator snapshots are not strictly ordered"});
      }
    }

    // Byzantine helper placement: with a fully committed window the entry
    // must be the helping position (with an open window it carries one of
    // the open slot's submissions instead).
    for (int j = n; j <= last; ++j) {
      const auto& cj = configs[static_cast<std::size_t>(j - n)];
      if (window_open_slot(j)) continue;
      Point want = sem_.helper(cj.correct_locations());
      if (!(cj[n].loc == want)) {
        rep.byz_helper_ok = false;
        rep.violations.push_back({j, "Byzantine entry is not the helping position"});
      }
    }

    // Derived centralized execution: robot alpha(j) acts on C_j, then the
    // Byzantine robot relocates to C_{j+1}'s entry when it changes.
    auto strip_byz_state = [&](Configuration c) {
      c[n].state = {};
      return c;
    };
    if (!configs.empty()) {
      Schedule schedule;
      for (int j = n; j < last; ++j) {
        const auto& cj1 = configs[static_cast<std::size_t>(j + 1 - n)];
        const auto& cj = configs[static_cast<std::size_t>(j - n)];
        schedule.rounds.push_back(round_of({reduction::robot_of_slot(j, n)}));
        if (!(cj1[n].loc == cj[n].loc)) {
          schedule.rounds.push_back(round_of({n}, cj1[n].loc));
        }
      }
      rep.derived = run(algorithms_, strip_byz_state(configs.front()), schedule);
      // The replayed execution must march through the simulated configurations.
      std::size_t at = 0;
      for (int j = n; j <= last; ++j) {
        Configuration want = strip_byz_state(configs[static_cast<std::size_t>(j - n)]);
        bool found = false;
        while (at < rep.derived.configs.size()) {
          if (rep.derived.configs[at] == want) {
            found = true;
            break;
          }
          ++at;
        }
        if (!found) {
          rep.steps_ok = false;
          rep.violations.push_back({j, "derived execution does not pass through C_j"});
          break;
        }
      }
      rep.centralized = schedule.centralized();
      rep.measured_k = check_k_bounded(schedule, n + 1);
    }

    for (const auto& [j, m] : meta_) {
      if (m.criticality == Criticality::Yes) rep.critical_slots.push_back(j);
      if (m.validator && m.c_star && *m.validator != *m.c_star) {
        rep.validator_reassignments.push_back(j);
      }
    }
    return rep;
  }

  ConsensusReport check_consensus_properties() const {
    ConsensusReport rep;
    const auto& d = trace_.decisions;
    rep.both_decided = d[0].has_value() && d[1].has_value();
    for (int p = 0; p < 2; ++p) {
      rep.outcomes[static_cast<std::size_t>(p)] =
          reduction::outcome_name(trace_.outcomes[static_cast<std::size_t>(p)]);
      if (trace_.outcomes[static_cast<std::size_t>(p)] == reduction::Outcome::Crashed) {
        rep.any_crash = true;
      }
    }
    if (rep.both_decided) {
      rep.agreement_applicable = true;
      rep.agreement_ok = d[0]->value == d[1]->value;
    }
    if (trace_.proposals[0] == trace_.proposals[1]) {
      for (int p = 0; p < 2; ++p) {
        if (d[static_cast<std::size_t>(p)]) {
          rep.validity_applicable = true;
          if (d[static_cast<std::size_t>(p)]->value != trace_.proposals[0]) {
            rep.validity_ok = false;
          }
        }
      }
    }
    rep.summary = "outcomes: p0 " + rep.outcomes[0] + ", p1 " + rep.outcomes[1];
    if (rep.both_decided) {
      rep.summary += "; decisions " + std::to_string(d[0]->value) + "/" +
                     std::to_string(d[1]->value);
    }
    return rep;
  }

  /** Snapshot view stored in the log at timestamp t (must be a snapshot). */
  memsim::MemoryState view_at(int t) const {
    for (const auto& e : trace_.log.events) {
      if (e.t == t && e.kind == memsim::Event::Kind::Snapshot) return e.view;
    }
    throw std::invalid_argument("no snapshot at t=" + std::to_string(t));
  }

 private:
  // The open (uncommitted) window slot of C_j as seen by its validator.
  std::optional<int> window_open_slot(int j) const {
    const SlotMeta& m = slot(j);
    const int w = *m.validator;
    const int t = *m.entry_t[static_cast<std::size_t>(w)];
    auto gv = reduction::getview(w, j, view_at(t), sem_);
    return gv.uncommitted_slot;
  }

  void parse_log() {
    const int n = trace_.n;
    // Replay each process's event stream against the simulator grammar:
    // n init submissions, then per main-loop slot a snapshot entry followed
    // by an optional submission. Any deviation is trace corruption.
    std::array<std::vector<const memsim::Event*>, 2> per;
    for (const auto& e : trace_.log.events) {
      if (e.kind == memsim::Event::Kind::Crash) continue;
      per[static_cast<std::size_t>(e.process)].push_back(&e);
    }
    for (int p = 0; p < 2; ++p) {
      const auto& evs = per[static_cast<std::size_t>(p)];
      std::size_t i = 0;
      int u = 0;
      auto expect_submit = [&](int slot_index) -> bool {
        // value write
        if (i >= evs.size()) return false;
        const auto* w = evs[i];
        if (w->kind != memsim::Event::Kind::Write ||
            w->cell != slot::val_cell(slot_index, p)) {
          throw std::runtime_error("process " + std::to_string(p) +
                                   ": expected value write for slot " +
                                   std::to_string(slot_index) + " at t=" + std::to_string(w->t));
        }
        auto& m = meta_[slot_index];
        m.j = slot_index;
        m.subs[static_cast<std::size_t>(p)] =
            reduction::Submission{reduction::decode_local_state(w->value), w->t, std::nullopt};
        ++i;
        if (i >= evs.size()) return false;  // crashed before its snapshot
        if (evs[i]->kind != memsim::Event::Kind::Snapshot) {
          throw std::runtime_error("process " + std::to_string(p) +
                                   ": submission snapshot missing for slot " +
                                   std::to_string(slot_index));
        }
        ++i;
        if (i >= evs.size()) return false;  // crashed before its flag
        const auto* fl = evs[i];
        if (fl->kind != memsim::Event::Kind::Write ||
            fl->cell != slot::flag_cell(slot_index, p)) {
          throw std::runtime_error("process " + std::to_string(p) +
                                   ": expected flag write for slot " + std::to_string(slot_index));
        }
        m.subs[static_cast<std::size_t>(p)]->e = fl->t;
        ++i;
        return true;
      };

      for (u = 0; u < n; ++u) {
        if (i >= evs.size()) break;
        if (!expect_submit(u)) break;
      }
      if (u < n) continue;  // crashed during the init phase
      for (;; ++u) {
        if (i >= evs.size()) break;
        const auto* snap = evs[i];
        if (snap->kind != memsim::Event::Kind::Snapshot) {
          throw std::runtime_error("process " + std::to_string(p) +
                                   ": expected a main-loop snapshot at t=" +
                                   std::to_string(snap->t));
        }
        auto& m = meta_[u];
        m.j = u;
        m.entry_t[static_cast<std::size_t>(p)] = snap->t;
        ++i;
        if (i >= evs.size()) break;  // decided or crashed right after entering
        if (!expect_submit(u)) break;
      }
    }
  }

  void compute_committers() {
    memsim::MemoryState final_mem;
    for (const auto& e : trace_.log.events) {
      if (e.kind == memsim::Event::Kind::Write) final_mem.cells[e.cell] = e.value;
    }
    int max_slot = -1;
    for (const auto& [j, m] : meta_) max_slot = std::max(max_slot, j);
    for (auto& [j, m] : meta_) {
      auto st = slot::read_status(final_mem, j);
      if (st.s) {
        m.committed = st.s;
        m.committed_value = reduction::decode_local_state(*st.committed_value());
        m.c_star = st.s;
        continue;
      }
      // Forever-uncommitted: the committer role falls to the survivor that
      // submitted the slot and moved on past it.
      std::optional<int> survivor;
      for (int p = 0; p < 2; ++p) {
        if (!m.subs[static_cast<std::size_t>(p)]) continue;
        bool continued = false;
        for (const auto& [k, mk] : meta_) {
          if (k <= j) continue;
          if (mk.subs[static_cast<std::size_t>(p)] ||
              mk.entry_t[static_cast<std::size_t>(p)]) {
            continued = true;
            break;
          }
        }
        if (continued) {
          if (survivor) {
            survivor.reset();  // both continued: genuinely ambiguous, leave unset
            break;
          }
          survivor = p;
        }
      }
      if (survivor) m.c_star = survivor;
    }
  }

  void compute_horizon() {
    const int n = trace_.n;
    horizon_ = n - 1;
    for (int j = n;; ++j) {
      auto it = meta_.find(j);
      if (it == meta_.end() || !it->second.c_star) break;
      // The validator's entry snapshot must exist for C_j to be derivable.
      horizon_ = j;
    }
  }

  void compute_criticality_and_validators() {
    const int n = trace_.n;
    // Criticality first: slot j is critical when the process that ends up
    // committing slot j+n entered it while j was still uncommitted, and the
    // two slots have different committers.
    for (auto& [j, m] : meta_) {
      auto itn = meta_.find(j + n);
      if (itn == meta_.end() || !itn->second.c_star || j + n > horizon_) {
        m.criticality = Criticality::Provisional;
        continue;
      }
      const SlotMeta& mn = itn->second;
      const int cn = *mn.c_star;
      const auto entry = mn.entry_t[static_cast<std::size_t>(cn)];
      if (!m.c_star || !entry) {
        m.criticality = Criticality::Provisional;
        continue;
      }
      auto view = memsim::snapshot_view(trace_.log, *entry);
      bool uncommitted_then = !slot::read_status(view, j).s.has_value();
      m.criticality = (uncommitted_then && *m.c_star != cn) ? Criticality::Yes : Criticality::No;
    }
    // Validators by backward recursion.
    std::vector<int> order;
    for (const auto& [j, m] : meta_) order.push_back(j);
    std::sort(order.rbegin(), order.rend());
    for (int j : order) {
      SlotMeta& m = meta_[j];
      auto itn = meta_.find(j + n);
      if (m.criticality == Criticality::Yes && itn != meta_.end() && itn->second.validator) {
        m.validator = itn->second.validator;
      } else {
        m.validator = m.c_star;
      }
    }
    // One slot past the horizon is still reconstructible when some process
    // entered it (deciders take the snapshot and exit without submitting):
    // its earliest observer validates the final configuration.
    last_config_slot_ = horizon_;
    auto it = meta_.find(horizon_ + 1);
    if (it != meta_.end() && !it->second.validator) {
      std::optional<int> best_p;
      for (int p = 0; p < 2; ++p) {
        const auto& t = it->second.entry_t[static_cast<std::size_t>(p)];
        if (t && (!best_p ||
                  *t < *it->second.entry_t[static_cast<std::size_t>(*best_p)])) {
          best_p = p;
        }
      }
      if (best_p) {
        it->second.validator = best_p;
        last_config_slot_ = horizon_ + 1;
      }
    }
  }

  const reduction::ReductionTrace& trace_;
  AlgorithmSet algorithms_;
  reduction::Semantics sem_;
  std::map<int, SlotMeta> meta_;
  int horizon_ = 0;
  int last_config_slot_ = 0;
};

/**
 * Cross-checks the trace's embedded bookkeeping (slot records, entry
 * timestamps, decisions) against the analyzer's log-derived state. Any
 * mismatch names the slot, so hand-edited traces fail loudly.
 */
inline std::vector<std::string> cross_check_records(const reduction::ReductionTrace& trace,
                                                    const TraceAnalyzer& an) {
  std::vector<std::string> issues;
  auto complain = [&](int j, const std::string& what) {
    issues.push_back("slot " + std::to_string(j) + ": " + what);
  };
  for (const auto& [j, m] : an.slots()) {
    if (!m.subs[0] && !m.subs[1]) continue;
    bool recorded = false;
    for (const auto& rec : trace.slots) {
      if (rec.j == j) recorded = true;
    }
    if (!recorded) complain(j, "present in the event log but missing from the records");
  }
  for (const auto& rec : trace.slots) {
    const auto it = an.slots().find(rec.j);
    if (it == an.slots().end()) {
      complain(rec.j, "recorded but absent from the event log");
      continue;
    }
    const SlotMeta& m = it->second;
    for (int p = 0; p < 2; ++p) {
      const auto& want = m.subs[static_cast<std::size_t>(p)];
      const auto& got = rec.subs[static_cast<std::size_t>(p)];
      if (want.has_value() != got.has_value()) {
        complain(rec.j, "submission presence mismatch for p" + std::to_string(p));
        continue;
      }
      if (want && (!(want->value == got->value) || want->b != got->b || want->e != got->e)) {
        complain(rec.j, "submission record of p" + std::to_string(p) +
                            " disagrees with the event log");
      }
    }
    if (m.committed != rec.committed) {
      complain(rec.j, "committed index disagrees with the final memory state");
    } else if (m.committed_value.has_value() != rec.value.has_value() ||
               (m.committed_value && !(*m.committed_value == *rec.value))) {
      complain(rec.j, "committed value disagrees with the final memory state");
    }
  }
  for (int p = 0; p < 2; ++p) {
    for (const auto& [j, t] : trace.entry_ts[static_cast<std::size_t>(p)]) {
      auto it = an.slots().find(j);
      if (it == an.slots().end() ||
          it->second.entry_t[static_cast<std::size_t>(p)] != std::optional<int>(t)) {
        complain(j, "entry timestamp of p" + std::to_string(p) + " disagrees with the log");
      }
    }
    for (const auto& [j, m] : an.slots()) {
      if (m.entry_t[static_cast<std::size_t>(p)] &&
          !trace.entry_ts[static_cast<std::size_t>(p)].count(j)) {
        complain(j, "entry of p" + std::to_string(p) + " missing from the records");
      }
    }
  }
  return issues;
}

/**
 * Re-derives each recorded decision from the decider's final snapshot: the
 * window must be fully committed and stable, and the decoded value, point
 * and support must match what the trace claims. Forged decision records
 * cannot survive this.
 */
inline std::vector<std::string> verify_decisions(const reduction::ReductionTrace& trace,
                                                 const TraceAnalyzer& an,
                                                 const Point& reference_point,
                                                 const std::string& reference_support) {
  std::vector<std::string> issues;
  auto sem = trace.semantics();
  for (int p = 0; p < 2; ++p) {
    const auto& d = trace.decisions[static_cast<std::size_t>(p)];
    const bool decided_outcome =
        trace.outcomes[static_cast<std::size_t>(p)] == reduction::Outcome::Decided;
    if (d.has_value() != decided_outcome) {
      issues.push_back("p" + std::to_string(p) + ": decision and outcome disagree");
      continue;
    }
    if (!d) continue;
    try {
      auto it = an.slots().find(d->slot);
      if (it == an.slots().end() ||
          it->second.entry_t[static_cast<std::size_t>(p)] != std::optional<int>(d->t)) {
        issues.push_back("p" + std::to_string(p) + ": deciding snapshot not found at t=" +
                         std::to_string(d->t));
        continue;
      }
      auto gv = reduction::getview(p, d->slot, an.view_at(d->t), sem);
      if (!gv.all_committed || !sem.legitimate(gv.config)) {
        issues.push_back("p" + std::to_string(p) +
                         ": deciding view was not committed and stable");
        continue;
      }
      Point point = max_multiplicity(gv.config.locations()).first;
      std::string support = sem.support(gv.config.correct_locations());
      int value = sem.formation_spec ? (support == reference_support ? 0 : 1)
                                     : reduction::decode(point, reference_point);
      if (!(point == d->point) || support != d->support || value != d->value) {
        issues.push_back("p" + std::to_string(p) + ": recorded decision does not decode from "
                         "the deciding snapshot");
      }
      // Decisions terminate the process: no later events by it.
      for (const auto& e : trace.log.events) {
        if (e.process == p && e.t > d->t) {
          issues.push_back("p" + std::to_string(p) + ": event after its decision");
          break;
        }
      }
    } catch (const std::exception& e) {
      issues.push_back("p" + std::to_string(p) + ": decision replay failed: " + e.what());
    }
  }
  return issues;
}

}  // namespace trace_analysis
}  // namespace byzgather

#endif  // BYZGATHER_TRACE_ANALYSIS_HPP_
