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
#include "byzgather/json_io.hpp"
#include "test_util.hpp"

using namespace byzgather;

TEST_CASE("points and configurations survive the JSON round trip", "[json]") {
  std::mt19937_64 rng(31337);
  for (int iter = 0; iter < 200; ++iter) {
    auto p = testutil::random_point(rng);
    REQUIRE(jsonio::point_from_json(jsonio::point_to_json(p)) == p);
    auto c = testutil::random_configuration(rng, 3 + static_cast<int>(rng() % 3));
    REQUIRE(jsonio::config_from_json(jsonio::config_to_json(c)) == c);
    auto m = testutil::random_multiset(rng, 1 + rng() % 6);
    REQUIRE(jsonio::multiset_from_json(jsonio::multiset_to_json(m)) == m);
  }
}

TEST_CASE("execution traces replay bit-exactly after serialization", "[json]") {
  auto algs = uniform_algorithms(make_algorithm("move-to-max"), 3);
  std::vector<LocalState> rs;
  for (int l = 0; l < 3; ++l) rs.push_back({"", point_of_int(l, l)});
  rs.push_back({"", point_of_int(5, 5)});
  Configuration c0(std::move(rs));
  Schedule s;
  s.rounds = {round_of({0}), round_of({3}, point_of_int(1, 1)), round_of({1}), round_of({2})};
  auto trace = run(algs, c0, s);

  auto text = jsonio::canonical_dump(jsonio::execution_to_json(trace, 3));
  auto parsed = jsonio::execution_from_json(jsonio::json::parse(text));
  auto replayed = run(algs, parsed.configs.front(), parsed.schedule);
  REQUIRE(replayed.configs == trace.configs);
  REQUIRE(jsonio::canonical_dump(jsonio::execution_to_json(replayed, 3)) == text);
}

TEST_CASE("reduction traces round trip and re-serialize identically", "[json]") {
  const int n = 4;
  auto algs = uniform_algorithms(make_algorithm("move-to-max"), n);
  auto t = reduction::run_consensus({0, 1}, algs,
                                    memsim::Adversary::seeded(7, memsim::CrashPoint{1, 9}),
                                    reduction::Semantics::gathering(n));
  auto text = jsonio::canonical_dump(jsonio::trace_to_json(t));
  auto back = jsonio::trace_from_json(jsonio::json::parse(text));
  auto text2 = jsonio::canonical_dump(jsonio::trace_to_json(back));
  REQUIRE(text == text2);
  CHECK(back.n == t.n);
  CHECK(back.log == t.log);
  CHECK(back.reference_point == t.reference_point);
  REQUIRE(back.decisions[0].has_value() == t.decisions[0].has_value());
}

TEST_CASE("identical seeded runs serialize byte-identically", "[json]") {
  const int n = 3;
  auto algs = uniform_algorithms(make_algorithm("move-to-max"), n);
  auto a = reduction::run_consensus({1, 0}, algs, memsim::Adversary::seeded(99),
                                    reduction::Semantics::gathering(n));
  auto b = reduction::run_consensus({1, 0}, algs, memsim::Adversary::seeded(99),
                                    reduction::Semantics::gathering(n));
  REQUIRE(jsonio::canonical_dump(jsonio::trace_to_json(a)) ==
          jsonio::canonical_dump(jsonio::trace_to_json(b)));
}

TEST_CASE("malformed documents are rejected", "[json]") {
  CHECK_THROWS(jsonio::point_from_json(jsonio::json::parse("[\"1/2\"]")));
  CHECK_THROWS(jsonio::point_from_json(jsonio::json::parse("[\"x\", \"y\"]")));
  CHECK_THROWS(jsonio::trace_from_json(jsonio::json::parse("{}")));
  CHECK_THROWS(jsonio::adversary_from_json(jsonio::json::parse("{\"strategy\":\"nope\"}")));
}
