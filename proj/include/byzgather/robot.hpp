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

#ifndef BYZGATHER_ROBOT_HPP_
#define BYZGATHER_ROBOT_HPP_

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "byzgather/geometry.hpp"

namespace byzgather {

// Opaque, deterministically serialized internal state of a robot. Algorithms
// own the encoding; the engine only compares and copies it.
using RobotState = std::string;

struct LocalState {
  RobotState state;
  Point loc;

  friend bool operator==(const LocalState&, const LocalState&) = default;
};

/**
 * A system configuration: local states of robots 0..n, where index n is the
 * robot playing the Byzantine role. Fixed size n+1 with n > 2.
 */
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<LocalState> robots) : robots_(std::move(robots)) {
    if (robots_.size() < 4) {
      throw std::invalid_argument("Configuration: needs n+1 >= 4 robots (n > 2)");
    }
  }

  int n() const { return static_cast<int>(robots_.size()) - 1; }
  std::size_t size() const { return robots_.size(); }

  const LocalState& operator[](int i) const { return robots_.at(static_cast<std::size_t>(i)); }
  LocalState& operator[](int i) { return robots_.at(static_cast<std::size_t>(i)); }

  const std::vector<LocalState>& robots() const { return robots_; }

  LocationMultiset locations() const {
    std::vector<Point> pts;
    pts.reserve(robots_.size());
    for (const auto& r : robots_) pts.push_back(r.loc);
    return LocationMultiset(std::move(pts));
  }

  // Locations of the correct robots 0..n-1 only.
  LocationMultiset correct_locations() const {
    std::vector<Point> pts;
    pts.reserve(robots_.size() - 1);
    for (std::size_t i = 0; i + 1 < robots_.size(); ++i) pts.push_back(robots_[i].loc);
    return LocationMultiset(std::move(pts));
  }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<LocalState> robots_;
};

inline Configuration translate(const Configuration& c, const Point& t) {
  std::vector<LocalState> rs = c.robots();
  for (auto& r : rs) r.loc = r.loc + t;
  return Configuration(std::move(rs));
}

/**
 * What robot i sees: the multiset of all robot locations expressed in its
 * local frame (origin at the observer, axes shared by everyone). The observer
 * itself contributes (0,0). Multiplicities are exact.
 */
inline LocationMultiset observe(const Configuration& c, int i) {
  if (i < 0 || i > c.n()) throw std::out_of_range("observe: robot index");
  std::vector<Point> pts;
  pts.reserve(c.size());
  const Point origin = c[i].loc;
  for (const auto& r : c.robots()) pts.push_back(r.loc - origin);
  return LocationMultiset(std::move(pts));
}

// The swap operator: exchanges entries k and n, reinterpreting which local
// state is the Byzantine one. swap_entry(c, n) == c; it is an involution.
inline Configuration swap_entry(const Configuration& c, int k) {
  if (k < 0 || k > c.n()) throw std::out_of_range("swap_entry: index");
  std::vector<LocalState> rs = c.robots();
  std::swap(rs[static_cast<std::size_t>(k)], rs.back());
  return Configuration(std::move(rs));
}

// All correct robots co-located right now; the Byzantine entry is free.
inline bool is_legitimate_now(const Configuration& c) {
  for (int i = 1; i < c.n(); ++i) {
    if (!(c[i].loc == c[0].loc)) return false;
  }
  return true;
}

// At least n of the n+1 entries are co-located, i.e. some swap of a correct
// entry with the Byzantine one yields a legitimate configuration.
inline bool is_semi_legitimate(const Configuration& c) {
  for (int g = 0; g <= c.n(); ++g) {
    if (is_legitimate_now(swap_entry(c, g))) return true;
  }
  return false;
}

/** Destination (in the local frame) and post-state computed by one cycle. */
struct Action {
  Point dest;
  RobotState next_state;
};

/**
 * A deployed robot algorithm: a deterministic map from (local observation,
 * internal state) to (destination in the local frame, next state), plus the
 * initial state of each robot. Robots can be non-uniform: the engine takes
 * one program per correct robot.
 */
class RobotProgram {
 public:
  virtual ~RobotProgram() = default;
  virtual std::string name() const = 0;
  virtual RobotState initial_state(int robot_index) const {
    (void)robot_index;
    return {};
  }
  virtual Action compute(const LocationMultiset& observation, const RobotState& state) const = 0;
};

using RobotProgramPtr = std::shared_ptr<const RobotProgram>;

// Programs for the correct robots 0..n-1 (the Byzantine robot runs no code).
using AlgorithmSet = std::vector<RobotProgramPtr>;

inline AlgorithmSet uniform_algorithms(RobotProgramPtr prog, int n) {
  return AlgorithmSet(static_cast<std::size_t>(n), std::move(prog));
}

}  // namespace byzgather

#endif  // BYZGATHER_ROBOT_HPP_
