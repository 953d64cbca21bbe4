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

#ifndef BYZGATHER_ALGORITHMS_HPP_
#define BYZGATHER_ALGORITHMS_HPP_

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "byzgather/robot.hpp"

namespace byzgather {

// Sample robot algorithms. They are demonstration plugins driven through the
// simulator and the reduction; none of them claims Byzantine tolerance.

/** Never moves; counts its own activations in the internal state. */
class StayPut final : public RobotProgram {
 public:
  std::string name() const override { return "stay-put"; }
  RobotState initial_state(int) const override { return "0"; }
  Action compute(const LocationMultiset&, const RobotState& state) const override {
    long n = 0;
    try {
      n = std::stol(state);
    } catch (const std::exception&) {
      n = 0;
    }
    return {Point{Rational(0), Rational(0)}, std::to_string(n + 1)};
  }
};

/**
 * Moves onto the most crowded observed point (lexicographic tie-break in the
 * local frame, so behavior commutes with translation). Oblivious.
 */
class MoveToMax final : public RobotProgram {
 public:
  std::string name() const override { return "move-to-max"; }
  Action compute(const LocationMultiset& obs, const RobotState&) const override {
    return {max_multiplicity(obs).first, {}};
  }
};

/** Jumps to the exact center of gravity of the observed multiset. */
class CenterOfGravity final : public RobotProgram {
 public:
  std::string name() const override { return "center-of-gravity"; }
  Action compute(const LocationMultiset& obs, const RobotState&) const override {
    Rational sx = 0, sy = 0;
    for (const auto& p : obs.points()) {
      sx += p.x;
      sy += p.y;
    }
    Rational k(static_cast<long>(obs.size()));
    return {Point{sx / k, sy / k}, {}};
  }
};

/**
 * Projects itself onto the observed line with maximum coverage (deterministic
 * choice among ties). Stays put when the observed distinct points are already
 * collinear. A demonstration line former for benign executions.
 */
class LineFormer final : public RobotProgram {
 public:
  std::string name() const override { return "line-former"; }
  Action compute(const LocationMultiset& obs, const RobotState&) const override {
    auto distinct = obs.distinct();
    if (distinct.size() < 2) return {Point{Rational(0), Rational(0)}, {}};
    bool all_collinear = true;
    for (std::size_t i = 2; i < distinct.size(); ++i) {
      if (!collinear(distinct[0], distinct[1], distinct[i])) {
        all_collinear = false;
        break;
      }
    }
    if (all_collinear) return {Point{Rational(0), Rational(0)}, {}};
    // Best-covered line over all point pairs, ties by canonical coefficients.
    bool have = false;
    Line best{};
    std::size_t best_count = 0;
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      for (std::size_t j = i + 1; j < distinct.size(); ++j) {
        Line l = line_through(distinct[i], distinct[j]);
        std::size_t cnt = 0;
        for (const auto& p : distinct) {
          if (l.contains(p)) ++cnt;
        }
        if (!have || cnt > best_count || (cnt == best_count && l < best)) {
          have = true;
          best = l;
          best_count = cnt;
        }
      }
    }
    return {project_onto_line(best, Point{Rational(0), Rational(0)}), {}};
  }
};

inline RobotProgramPtr make_algorithm(const std::string& name) {
  if (name == "stay-put") return std::make_shared<StayPut>();
  if (name == "move-to-max") return std::make_shared<MoveToMax>();
  if (name == "center-of-gravity") return std::make_shared<CenterOfGravity>();
  if (name == "line-former") return std::make_shared<LineFormer>();
  throw std::invalid_argument("unknown algorithm: \"" + name + "\"");
}

inline std::vector<std::string> algorithm_names() {
  return {"stay-put", "move-to-max", "center-of-gravity", "line-former"};
}

}  // namespace byzgather

#endif  // BYZGATHER_ALGORITHMS_HPP_
