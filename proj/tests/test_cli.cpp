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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "byzgather/cli.hpp"

using namespace byzgather;

namespace {

int run_cli(std::vector<std::string> args) {
  std::vector<const char*> argv{"byzgather"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::cli_main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) { return cli::detail::read_file(path); }

struct TempDir {
  std::filesystem::path dir;
  TempDir() {
    dir = std::filesystem::temp_directory_path() /
          ("byzgather-test-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
  }
  ~TempDir() { std::filesystem::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("reduce writes a trace that verify-trace accepts", "[cli]") {
  TempDir tmp;
  auto trace = tmp.path("t.json");
  REQUIRE(run_cli({"reduce", "--n", "4", "--proposals", "0,0", "--algorithm", "move-to-max",
                   "--seed", "7", "--out", trace}) == 0);
  REQUIRE(std::filesystem::exists(trace));
  REQUIRE(run_cli({"verify-trace", trace}) == 0);
  REQUIRE(std::filesystem::exists(trace + ".report.json"));
  auto report = jsonio::json::parse(slurp(trace + ".report.json"));
  CHECK(report.at("pass").get<bool>());
  CHECK(report.at("admissibility").at("centralized").get<bool>());
}

TEST_CASE("reduce with a crash notes the survivor decision", "[cli]") {
  TempDir tmp;
  auto trace = tmp.path("crash.json");
  REQUIRE(run_cli({"reduce", "--n", "4", "--proposals", "0,1", "--seed", "3", "--crash", "1@3",
                   "--out", trace}) == 0);
  auto doc = jsonio::json::parse(slurp(trace));
  CHECK(doc.at("outcomes")[1].get<std::string>() == "crashed");
  CHECK_FALSE(doc.at("decisions")[0].is_null());
  REQUIRE(run_cli({"verify-trace", trace}) == 0);
}

TEST_CASE("invalid configurations exit with code 2", "[cli]") {
  TempDir tmp;
  CHECK(run_cli({"reduce", "--n", "2", "--out", tmp.path("x.json")}) == 2);
  CHECK(run_cli({"reduce", "--n", "4", "--proposals", "0,7", "--out", tmp.path("x.json")}) == 2);
  CHECK(run_cli({"reduce", "--n", "4", "--algorithm", "nope", "--out", tmp.path("x.json")}) == 2);
  CHECK(run_cli({"no-such-command"}) == 2);
}

TEST_CASE("max-slot exhaustion exits with code 3", "[cli]") {
  TempDir tmp;
  auto trace = tmp.path("stuck.json");
  // Split proposals under this seed commit a mixed layout, and the exact
  // averaging of center-of-gravity never re-reaches co-location.
  CHECK(run_cli({"reduce", "--n", "3", "--proposals", "0,1", "--algorithm", "center-of-gravity",
                 "--seed", "2", "--max-slots", "24", "--out", trace}) == 3);
}

TEST_CASE("hand-corrupted traces are rejected with exit 1", "[cli]") {
  TempDir tmp;
  auto trace = tmp.path("t.json");
  REQUIRE(run_cli({"reduce", "--n", "4", "--proposals", "0,1", "--seed", "11", "--out", trace}) ==
          0);
  auto doc = jsonio::json::parse(slurp(trace));
  // Replace one committed value in the slot records.
  for (auto& rec : doc.at("slots")) {
    if (!rec.at("value").is_null()) {
      rec["value"]["loc"][0] = "99/1";
      break;
    }
  }
  auto corrupted = tmp.path("corrupted.json");
  cli::detail::write_file(corrupted, jsonio::canonical_dump(doc));
  CHECK(run_cli({"verify-trace", corrupted}) == 1);
}

TEST_CASE("consistently forged decisions are still rejected", "[cli]") {
  TempDir tmp;
  auto trace = tmp.path("t.json");
  REQUIRE(run_cli({"reduce", "--n", "4", "--proposals", "0,1", "--seed", "2014", "--out",
                   trace}) == 0);
  auto doc = jsonio::json::parse(slurp(trace));
  REQUIRE_FALSE(doc.at("decisions")[0].is_null());
  // Flip both decision values the same way, so agreement alone cannot tell.
  for (auto& d : doc.at("decisions")) {
    d["value"] = 1 - d.at("value").get<int>();
  }
  auto forged = tmp.path("forged.json");
  cli::detail::write_file(forged, jsonio::canonical_dump(doc));
  CHECK(run_cli({"verify-trace", forged}) == 1);
}

TEST_CASE("random structural tampering never verifies cleanly", "[cli]") {
  TempDir tmp;
  auto trace = tmp.path("t.json");
  REQUIRE(run_cli({"reduce", "--n", "4", "--proposals", "1,0", "--seed", "2014", "--out",
                   trace}) == 0);
  auto original = jsonio::json::parse(slurp(trace));
  std::mt19937_64 rng(515);
  int rejected = 0, checked = 0;
  for (int iter = 0; iter < 60; ++iter) {
    auto doc = original;
    auto& events = doc.at("events");
    std::size_t pick = rng() % events.size();
    auto& e = events.at(pick);
    switch (rng() % 4) {
      case 0:
        e["t"] = e.at("t").get<int>() + 1 + static_cast<int>(rng() % 3);
        break;
      case 1:
        e["p"] = 1 - e.at("p").get<int>();
        break;
      case 2:
        if (e.contains("cell")) {
          e["cell"] = e.at("cell").get<int>() + 1;
        } else {
          events.erase(pick);
        }
        break;
      default:
        events.erase(pick);
        break;
    }
    auto path = tmp.path("tampered.json");
    cli::detail::write_file(path, jsonio::canonical_dump(doc));
    int code = run_cli({"verify-trace", path, "--report", tmp.path("tampered.report")});
    ++checked;
    if (code == 1 || code == 2) ++rejected;
  }
  // Every structural mutation of the log must be caught, never accepted.
  CHECK(rejected == checked);
}

TEST_CASE("truncated trace files exit with code 2", "[cli]") {
  TempDir tmp;
  auto trace = tmp.path("t.json");
  REQUIRE(run_cli({"reduce", "--n", "4", "--out", trace}) == 0);
  auto text = slurp(trace);
  cli::detail::write_file(trace, text.substr(0, text.size() / 2));
  CHECK(run_cli({"verify-trace", trace}) == 2);
  CHECK(run_cli({"verify-trace", tmp.path("missing.json")}) == 2);
}

TEST_CASE("check-slot passes on defaults and catches mutations", "[cli]") {
  TempDir tmp;
  auto report = tmp.path("slot-report.json");
  CHECK(run_cli({"check-slot", "--out", report}) == 0);
  auto doc = jsonio::json::parse(slurp(report));
  REQUIRE(doc.is_array());
  CHECK(doc.size() == 2);
  CHECK(doc[0].at("crash_free").get<int>() == 20);
  CHECK(doc[0].at("properties").at("validity").at("pass").get<bool>());
  CHECK(run_cli({"check-slot", "--mutate", "ignore-claim"}) == 1);
  CHECK(run_cli({"check-slot", "--max-events", "30"}) == 2);
  CHECK(run_cli({"check-slot", "--values", "garbage"}) == 2);
}

TEST_CASE("reduce accepts an adversary config file", "[cli]") {
  TempDir tmp;
  auto adv = tmp.path("adv.json");
  cli::detail::write_file(adv,
                          "{\"strategy\":\"seeded-random\",\"seed\":2014,"
                          "\"crash\":{\"process\":1,\"after_steps\":9}}\n");
  auto trace = tmp.path("t.json");
  REQUIRE(run_cli({"reduce", "--n", "4", "--proposals", "0,1", "--adversary-file", adv,
                   "--out", trace}) == 0);
  auto doc = jsonio::json::parse(slurp(trace));
  CHECK(doc.at("adversary").at("seed").get<std::uint64_t>() == 2014);
  CHECK(doc.at("adversary").at("crash").at("process").get<int>() == 1);
  CHECK(run_cli({"verify-trace", trace}) == 0);
  CHECK(run_cli({"reduce", "--adversary-file", tmp.path("nope.json"),
                 "--out", tmp.path("x.json")}) == 2);
}

TEST_CASE("seeded commands are byte-reproducible", "[cli]") {
  TempDir tmp;
  auto t1 = tmp.path("a.json");
  auto t2 = tmp.path("b.json");
  for (const auto& out : {t1, t2}) {
    REQUIRE(run_cli({"reduce", "--n", "5", "--proposals", "1,0", "--seed", "42", "--crash",
                     "0@17", "--out", out}) == 0);
  }
  REQUIRE(slurp(t1) == slurp(t2));
  REQUIRE(run_cli({"verify-trace", t1, "--report", tmp.path("r1.json")}) == 0);
  REQUIRE(run_cli({"verify-trace", t2, "--report", tmp.path("r2.json")}) == 0);
  REQUIRE(slurp(tmp.path("r1.json")) == slurp(tmp.path("r2.json")));
}

TEST_CASE("simulate runs the benign schedule and reports the bound", "[cli]") {
  TempDir tmp;
  auto out = tmp.path("sim.json");
  REQUIRE(run_cli({"simulate", "--n", "4", "--rounds", "12", "--out", out}) == 0);
  auto doc = jsonio::json::parse(slurp(out));
  CHECK(doc.at("n").get<int>() == 4);
  CHECK(doc.at("configs").size() == doc.at("schedule").size() + 1);
  CHECK(run_cli({"simulate", "--n", "1"}) == 2);
}

TEST_CASE("formation subcommands answer membership, chains and certificates", "[cli]") {
  TempDir tmp;
  auto line_pattern = tmp.path("line.json");
  cli::detail::write_file(line_pattern,
                          "[[\"0/1\",\"0/1\"],[\"1/1\",\"0/1\"],[\"2/1\",\"0/1\"],"
                          "[\"3/1\",\"0/1\"],[\"4/1\",\"0/1\"]]\n");
  CHECK(run_cli({"formations", "member", "--family", "line", line_pattern}) == 0);
  CHECK(run_cli({"formations", "certify", "--family", "line", "--translate", "0,1", "--fuzz",
                 "200", line_pattern}) == 0);
  CHECK(run_cli({"formations", "certify", "--family", "line", "--translate", "1,0", "--fuzz",
                 "50", line_pattern}) == 1);

  auto gat_a = tmp.path("gat_a.json");
  auto gat_b = tmp.path("gat_b.json");
  cli::detail::write_file(gat_a,
                          "[[\"0/1\",\"0/1\"],[\"0/1\",\"0/1\"],[\"0/1\",\"0/1\"],"
                          "[\"5/1\",\"5/1\"],[\"5/1\",\"5/1\"]]\n");
  cli::detail::write_file(gat_b,
                          "[[\"2/1\",\"2/1\"],[\"2/1\",\"2/1\"],[\"7/1\",\"1/1\"],"
                          "[\"7/1\",\"1/1\"],[\"7/1\",\"1/1\"]]\n");
  CHECK(run_cli({"formations", "chain", "--family", "2-gathering", gat_a, gat_b, "--out",
                 tmp.path("chain.json")}) == 0);
  CHECK(run_cli({"formations", "grid", "--family", "line", "--arity", "5"}) == 0);
}

TEST_CASE("formation reduce validates the witness up front", "[cli]") {
  TempDir tmp;
  auto trace = tmp.path("line-trace.json");
  REQUIRE(run_cli({"reduce", "--n", "4", "--proposals", "1,1", "--algorithm", "line-former",
                   "--formation", "line", "--seed", "2", "--out", trace}) == 0);
  auto doc = jsonio::json::parse(slurp(trace));
  CHECK(doc.at("decisions")[0].at("value").get<int>() == 1);
  REQUIRE(run_cli({"verify-trace", trace}) == 0);
  CHECK(run_cli({"reduce", "--n", "4", "--formation", "2-gathering",
                 "--out", tmp.path("rejected.json")}) == 2);
}
