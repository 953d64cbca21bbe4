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

#ifndef BYZGATHER_ATOM_HPP_
#define BYZGATHER_ATOM_HPP_

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "byzgather/robot.hpp"

namespace byzgather {

/**
 * One scheduler round: the set of robots activated together, plus the
 * destination of the Byzantine robot when it is among them.
 */
struct ActivationRound {
  std::vector<int> active;  // sorted, unique robot indices
  std::optional<Point> byz_pos;

  bool activates(int robot) const {
    return std::binary_search(active.begin(), active.end(), robot);
  }
};

struct Schedule {
  std::vector<ActivationRound> rounds;

  bool centralized() const {
    for (const auto& r : rounds) {
      if (r.active.size() != 1) return false;
    }
    return true;
  }
};

inline ActivationRound round_of(std::vector<int> active, std::optional<Point> byz = std::nullopt) {
  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());
  return ActivationRound{std::move(active), std::move(byz)};
}

/**
 * One ATOM round: every activated correct robot performs its full cycle on
 * the same pre-round configuration, then all moves land simultaneously. If
 * the Byzantine robot (index n) is activated, it is placed at byz_pos.
 */
inline Configuration step(const Configuration& c, const ActivationRound& round,
                          const AlgorithmSet& algorithms) {
  const int n = c.n();
  if (static_cast<int>(algorithms.size()) != n) {
    throw std::invalid_argument("step: need one program per correct robot");
  }
  std::vector<LocalState> next = c.robots();
  for (int i : round.active) {
    if (i < 0 || i > n) throw std::out_of_range("step: robot index out of range");
    if (i == n) {
      if (!round.byz_pos) {
        throw std::invalid_argument("step: Byzantine robot activated without a position");
      }
      next[static_cast<std::size_t>(n)].loc = *round.byz_pos;
      continue;
    }
    Action a = algorithms[static_cast<std::size_t>(i)]->compute(observe(c, i), c[i].state);
    next[static_cast<std::size_t>(i)] =
        LocalState{a.next_state, c[i].loc + a.dest};
  }
  return Configuration(std::move(next));
}

struct ExecutionTrace {
  Schedule schedule;
  std::vector<Configuration> configs;  // configs.size() == rounds + 1
};

inline ExecutionTrace run(const AlgorithmSet& algorithms, const Configuration& c0,
                          const Schedule& schedule) {
  ExecutionTrace trace;
  trace.schedule = schedule;
  trace.configs.push_back(c0);
  for (const auto& r : schedule.rounds) {
    trace.configs.push_back(step(trace.configs.back(), r, algorithms));
  }
  return trace;
}

/**
 * Result of checking one transition of the form "Byzantine repositions, then
 * robot x performs a cycle". On failure, diagnostic names the first
 * mismatching entry.
 */
struct StepCheck {
  bool ok = false;
  std::string diagnostic;
  std::optional<Point> byz_witness;  // the Byzantine position robot x observed
};

/**
 * Decides whether C can reach C_next by a Byzantine move followed by the
 * activation of correct robot x (the Byzantine robot may relocate again
 * afterwards, so C_next[n] is not constrained by the witness). The candidate
 * witnesses are read off the configurations themselves: C_next[n] covers
 * transitions built by an explicit Byzantine round, C[n] covers transitions
 * whose Byzantine entry was already in place when x observed.
 */
inline StepCheck check_step(const Configuration& c, const Configuration& c_next, int x,
                            const AlgorithmSet& algorithms) {
  const int n = c.n();
  if (x < 0 || x >= n) throw std::out_of_range("check_step: x must be a correct robot");
  if (c_next.size() != c.size()) {
    return {false, "configuration sizes differ", std::nullopt};
  }
  for (int i = 0; i < n; ++i) {
    if (i == x) continue;
    if (!(c[i] == c_next[i])) {
      return {false, "entry " + std::to_string(i) + " changed without being activated",
              std::nullopt};
    }
  }
  std::vector<Point> candidates{c_next[n].loc, c[n].loc};
  std::string last_diag;
  for (const auto& b : candidates) {
    std::vector<LocalState> mid = c.robots();
    mid[static_cast<std::size_t>(n)].loc = b;
    Configuration cb(std::move(mid));
    Action a = algorithms[static_cast<std::size_t>(x)]->compute(observe(cb, x), c[x].state);
    LocalState landed{a.next_state, c[x].loc + a.dest};
    if (landed == c_next[x]) return {true, "", b};
    last_diag = "entry " + std::to_string(x) + ": expected " + c_next[x].loc.str() +
                ", robot lands at " + landed.loc.str() + " (Byzantine witness " + b.str() + ")";
  }
  return {false, last_diag, std::nullopt};
}

/**
 * Minimal k such that the schedule is k-bounded: between two consecutive
 * activations of any robot (exclusive of the endpoints), every robot is
 * activated at most k times. Byzantine activations are position changes.
 * Schedules with fewer than two activations of every robot report 1.
 */
inline int check_k_bounded(const Schedule& s, int n_robots) {
  // Activation rounds per robot id; the Byzantine robot is id n_robots - 1.
  const int byz = n_robots - 1;
  std::vector<std::vector<int>> act(static_cast<std::size_t>(n_robots));
  std::optional<Point> last_byz;
  for (std::size_t r = 0; r < s.rounds.size(); ++r) {
    const auto& round = s.rounds[r];
    for (int i : round.active) {
      if (i < 0 || i >= n_robots) throw std::out_of_range("check_k_bounded: robot index");
      if (i == byz && round.byz_pos) {
        if (!last_byz || !(*last_byz == *round.byz_pos)) {
          act[static_cast<std::size_t>(byz)].push_back(static_cast<int>(r));
          last_byz = round.byz_pos;
        }
      } else {
        act[static_cast<std::size_t>(i)].push_back(static_cast<int>(r));
      }
    }
  }
  int k = 1;
  for (const auto& rounds_of_y : act) {
    for (std::size_t a = 0; a + 1 < rounds_of_y.size(); ++a) {
      int r1 = rounds_of_y[a], r2 = rounds_of_y[a + 1];
      for (const auto& rounds_of_z : act) {
        auto lo = std::upper_bound(rounds_of_z.begin(), rounds_of_z.end(), r1);
        auto hi = std::lower_bound(rounds_of_z.begin(), rounds_of_z.end(), r2);
        k = std::max(k, static_cast<int>(hi - lo));
      }
    }
  }
  return k;
}

}  // namespace byzgather

#endif  // BYZGATHER_ATOM_HPP_
