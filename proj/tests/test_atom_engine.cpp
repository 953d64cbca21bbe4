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

#include "byzgather/algorithms.hpp"
#include "byzgather/atom.hpp"
#include "test_util.hpp"

using namespace byzgather;

namespace {

Configuration config_at(const std::vector<Point>& pts) {
  std::vector<LocalState> rs;
  for (const auto& p : pts) rs.push_back({"", p});
  return Configuration(std::move(rs));
}

// O(len^2) window scan over all consecutive-activation pairs: the bound
// oracle. Counts every robot's activations strictly between the rounds.
int brute_force_k(const Schedule& s, int n_robots) {
  std::vector<std::vector<int>> act(static_cast<std::size_t>(n_robots));
  std::optional<Point> last_byz;
  for (std::size_t r = 0; r < s.rounds.size(); ++r) {
    for (int i : s.rounds[r].active) {
      if (i == n_robots - 1 && s.rounds[r].byz_pos) {
        if (!last_byz || !(*last_byz == *s.rounds[r].byz_pos)) {
          act[static_cast<std::size_t>(i)].push_back(static_cast<int>(r));
          last_byz = s.rounds[r].byz_pos;
        }
      } else {
        act[static_cast<std::size_t>(i)].push_back(static_cast<int>(r));
      }
    }
  }
  int k = 1;
  for (int y = 0; y < n_robots; ++y) {
    const auto& ay = act[static_cast<std::size_t>(y)];
    for (std::size_t a = 0; a + 1 < ay.size(); ++a) {
      for (int z = 0; z < n_robots; ++z) {
        int count = 0;
        for (int r : act[static_cast<std::size_t>(z)]) {
          if (r > ay[a] && r < ay[a + 1]) ++count;
        }
        k = std::max(k, count);
      }
    }
  }
  return k;
}

}  // namespace

TEST_CASE("step with no activations leaves the configuration unchanged", "[atom-engine]") {
  auto algs = uniform_algorithms(make_algorithm("move-to-max"), 4);
  auto c = config_at({point_of_int(0, 0), point_of_int(1, 1), point_of_int(2, 2),
                      point_of_int(3, 3), point_of_int(4, 4)});
  CHECK(step(c, round_of({}), algs) == c);
}

TEST_CASE("stay-put advances state without moving", "[atom-engine]") {
  int n = 3;
  auto algs = uniform_algorithms(make_algorithm("stay-put"), n);
  std::vector<LocalState> rs;
  for (int i = 0; i <= n; ++i) rs.push_back({algs[0]->initial_state(i), point_of_int(i, 0)});
  Configuration c(std::move(rs));
  auto next = step(c, round_of({0, 1, 2}), algs);
  for (int i = 0; i < n; ++i) {
    CHECK(next[i].loc == c[i].loc);
    CHECK(next[i].state == "1");
  }
  CHECK(next[n] == c[n]);
}

TEST_CASE("move-to-max straggler joins the crowd", "[atom-engine]") {
  int n = 4;
  auto algs = uniform_algorithms(make_algorithm("move-to-max"), n);
  auto c = config_at({point_of_int(0, 0), point_of_int(0, 0), point_of_int(0, 0),
                      point_of_int(5, 5), point_of_int(0, 0)});
  auto next = step(c, round_of({3}), algs);
  CHECK(next[3].loc == point_of_int(0, 0));
  for (int i = 0; i < 3; ++i) CHECK(next[i] == c[i]);
}

TEST_CASE("Byzantine activation requires a position", "[atom-engine]") {
  auto algs = uniform_algorithms(make_algorithm("stay-put"), 3);
  auto c = config_at({point_of_int(0, 0), point_of_int(1, 0), point_of_int(2, 0),
                      point_of_int(3, 0)});
  CHECK_THROWS_AS(step(c, round_of({3}), algs), std::invalid_argument);
  auto next = step(c, round_of({3}, point_of_int(9, 9)), algs);
  CHECK(next[3].loc == point_of_int(9, 9));
}

TEST_CASE("run over the empty schedule yields just C0", "[atom-engine]") {
  auto algs = uniform_algorithms(make_algorithm("move-to-max"), 3);
  auto c = config_at({point_of_int(0, 0), point_of_int(1, 0), point_of_int(2, 0),
                      point_of_int(3, 0)});
  auto trace = run(algs, c, Schedule{});
  REQUIRE(trace.configs.size() == 1);
  CHECK(trace.configs[0] == c);
}

TEST_CASE("executions are translation-equivariant", "[atom-engine]") {
  std::mt19937_64 rng(23);
  auto algs = uniform_algorithms(make_algorithm("move-to-max"), 3);
  for (int iter = 0; iter < 50; ++iter) {
    auto c0 = testutil::random_configuration(rng, 3);
    Point t = testutil::random_point(rng);
    Schedule s, st;
    for (int r = 0; r < 6; ++r) {
      int robot = static_cast<int>(rng() % 4);
      if (robot == 3) {
        Point b = testutil::random_point(rng);
        s.rounds.push_back(round_of({3}, b));
        st.rounds.push_back(round_of({3}, b + t));
      } else {
        s.rounds.push_back(round_of({robot}));
        st.rounds.push_back(round_of({robot}));
      }
    }
    auto plain = run(algs, c0, s);
    auto shifted = run(algs, translate(c0, t), st);
    REQUIRE(plain.configs.size() == shifted.configs.size());
    for (std::size_t i = 0; i < plain.configs.size(); ++i) {
      REQUIRE(translate(plain.configs[i], t) == shifted.configs[i]);
    }
  }
}

TEST_CASE("check_step accepts constructed transitions", "[atom-engine]") {
  std::mt19937_64 rng(31);
  auto algs = uniform_algorithms(make_algorithm("move-to-max"), 4);
  for (int iter = 0; iter < 500; ++iter) {
    auto c = testutil::random_configuration(rng, 4);
    int x = static_cast<int>(rng() % 4);
    Point b = testutil::random_point(rng);
    auto mid = step(c, round_of({4}, b), algs);
    auto c_next = step(mid, round_of({x}), algs);
    auto res = check_step(c, c_next, x, algs);
    REQUIRE(res.ok);

    // Oracle: re-simulate the two sub-steps explicitly from the witness.
    REQUIRE(res.byz_witness.has_value());
    auto mid2 = step(c, round_of({4}, *res.byz_witness), algs);
    auto again = step(mid2, round_of({x}), algs);
    REQUIRE(again[x] == c_next[x]);

    // Negative control: perturb an unrelated correct robot.
    int other = (x + 1) % 4;
    auto bad = c_next;
    bad[other].loc = bad[other].loc + point_of_int(1, 0);
    auto res_bad = check_step(c, bad, x, algs);
    REQUIRE_FALSE(res_bad.ok);
    REQUIRE(res_bad.diagnostic.find(std::to_string(other)) != std::string::npos);
  }
}

TEST_CASE("check_k_bounded basics", "[atom-engine]") {
  // Strict round-robin over 4 robots is 1-bounded.
  Schedule rr;
  for (int rep = 0; rep < 3; ++rep) {
    for (int i = 0; i < 4; ++i) {
      rr.rounds.push_back(i == 3 ? round_of({3}, point_of_int(rep, 0)) : round_of({i}));
    }
  }
  CHECK(check_k_bounded(rr, 4) == 1);

  // [0,1,1,0]: robot 1 runs twice between robot 0's activations.
  Schedule s;
  s.rounds = {round_of({0}), round_of({1}), round_of({1}), round_of({0})};
  CHECK(check_k_bounded(s, 2) == 2);

  CHECK(check_k_bounded(Schedule{}, 3) == 1);
  Schedule one;
  one.rounds = {round_of({0})};
  CHECK(check_k_bounded(one, 3) == 1);

  // A duplicated activation inside a round-robin raises the bound to 2.
  Schedule dup = rr;
  dup.rounds.insert(dup.rounds.begin() + 2, round_of({1}));
  CHECK(check_k_bounded(dup, 4) == 2);
}

TEST_CASE("check_k_bounded agrees with the brute-force window scan", "[atom-engine]") {
  std::mt19937_64 rng(37);
  for (int iter = 0; iter < 500; ++iter) {
    int n_robots = 2 + static_cast<int>(rng() % 3);
    Schedule s;
    int len = static_cast<int>(rng() % 16);
    for (int r = 0; r < len; ++r) {
      int robot = static_cast<int>(rng() % n_robots);
      if (robot == n_robots - 1) {
        s.rounds.push_back(round_of({robot}, point_of_int(static_cast<long>(rng() % 3), 0)));
      } else {
        s.rounds.push_back(round_of({robot}));
      }
    }
    REQUIRE(check_k_bounded(s, n_robots) == brute_force_k(s, n_robots));
  }
}

TEST_CASE("serialized executions replay bit-exactly", "[atom-engine]") {
  // Determinism at the engine level: identical inputs, identical traces.
  auto algs = uniform_algorithms(make_algorithm("center-of-gravity"), 3);
  auto c0 = config_at({point_of_int(0, 0), point_of_int(4, 0), point_of_int(0, 4),
                       point_of_int(8, 8)});
  Schedule s;
  s.rounds = {round_of({0}), round_of({3}, point_of_int(1, 1)), round_of({1, 2}),
              round_of({0, 1})};
  auto t1 = run(algs, c0, s);
  auto t2 = run(algs, c0, s);
  REQUIRE(t1.configs == t2.configs);
}
