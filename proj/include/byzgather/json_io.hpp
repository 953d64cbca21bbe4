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

#ifndef BYZGATHER_JSON_IO_HPP_
#define BYZGATHER_JSON_IO_HPP_

#include <optional>
#include <string>

#include <json.hpp>

#include "byzgather/atom.hpp"
#include "byzgather/reduction.hpp"

namespace byzgather {
namespace jsonio {

// Canonical JSON forms. nlohmann::json objects keep keys sorted, and every
// rational is the reduced "num/den" string, so serialization is
// byte-reproducible across runs and platforms.

using json = nlohmann::json;

inline json point_to_json(const Point& p) {
  return json::array({rational_to_string(p.x), rational_to_string(p.y)});
}

inline Point point_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("point: expected [x, y]");
  return Point{rational_from_string(j[0].get<std::string>()),
               rational_from_string(j[1].get<std::string>())};
}

inline json multiset_to_json(const LocationMultiset& m) {
  json a = json::array();
  for (const auto& p : m.points()) a.push_back(point_to_json(p));
  return a;
}

inline LocationMultiset multiset_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("multiset: expected an array of points");
  std::vector<Point> pts;
  for (const auto& e : j) pts.push_back(point_from_json(e));
  return LocationMultiset(std::move(pts));
}

inline json local_state_to_json(const LocalState& s) {
  return json{{"loc", point_to_json(s.loc)}, {"state", s.state}};
}

inline LocalState local_state_from_json(const json& j) {
  return LocalState{j.at("state").get<std::string>(), point_from_json(j.at("loc"))};
}

inline json config_to_json(const Configuration& c) {
  json robots = json::array();
  for (const auto& r : c.robots()) robots.push_back(local_state_to_json(r));
  return json{{"robots", robots}};
}

inline Configuration config_from_json(const json& j) {
  std::vector<LocalState> rs;
  for (const auto& e : j.at("robots")) rs.push_back(local_state_from_json(e));
  return Configuration(std::move(rs));
}

inline json schedule_to_json(const Schedule& s) {
  json rounds = json::array();
  for (const auto& r : s.rounds) {
    json round{{"active", r.active}};
    round["byz"] = r.byz_pos ? point_to_json(*r.byz_pos) : json(nullptr);
    rounds.push_back(round);
  }
  return rounds;
}

inline Schedule schedule_from_json(const json& j) {
  Schedule s;
  for (const auto& e : j) {
    ActivationRound r;
    r.active = e.at("active").get<std::vector<int>>();
    if (!e.at("byz").is_null()) r.byz_pos = point_from_json(e.at("byz"));
    s.rounds.push_back(std::move(r));
  }
  return s;
}

inline json execution_to_json(const ExecutionTrace& t, int n) {
  json configs = json::array();
  for (const auto& c : t.configs) configs.push_back(config_to_json(c));
  return json{{"n", n}, {"configs", configs}, {"schedule", schedule_to_json(t.schedule)}};
}

inline ExecutionTrace execution_from_json(const json& j) {
  ExecutionTrace t;
  t.schedule = schedule_from_json(j.at("schedule"));
  for (const auto& e : j.at("configs")) t.configs.push_back(config_from_json(e));
  return t;
}

inline json memory_to_json(const memsim::MemoryState& m) {
  json cells = json::object();
  for (const auto& [c, v] : m.cells) cells[std::to_string(c)] = v;
  return cells;
}

inline memsim::MemoryState memory_from_json(const json& j) {
  memsim::MemoryState m;
  for (auto it = j.begin(); it != j.end(); ++it) {
    m.cells[std::stoi(it.key())] = it.value().get<std::string>();
  }
  return m;
}

inline json event_to_json(const memsim::Event& e) {
  json out{{"t", e.t}, {"p", e.process}};
  switch (e.kind) {
    case memsim::Event::Kind::Write:
      out["kind"] = "write";
      out["cell"] = e.cell;
      out["value"] = e.value;
      break;
    case memsim::Event::Kind::Snapshot:
      out["kind"] = "snapshot";
      out["view"] = memory_to_json(e.view);
      break;
    case memsim::Event::Kind::Crash:
      out["kind"] = "crash";
      break;
  }
  return out;
}

inline memsim::Event event_from_json(const json& j) {
  memsim::Event e;
  e.t = j.at("t").get<int>();
  e.process = j.at("p").get<int>();
  if (e.process < 0 || e.process > 1) {
    throw std::invalid_argument("event process must be 0 or 1");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "write") {
    e.kind = memsim::Event::Kind::Write;
    e.cell = j.at("cell").get<int>();
    if (e.cell < 0) throw std::invalid_argument("negative cell id");
    e.value = j.at("value").get<std::string>();
  } else if (kind == "snapshot") {
    e.kind = memsim::Event::Kind::Snapshot;
    e.view = memory_from_json(j.at("view"));
  } else if (kind == "crash") {
    e.kind = memsim::Event::Kind::Crash;
  } else {
    throw std::invalid_argument("unknown event kind: \"" + kind + "\"");
  }
  return e;
}

inline json log_to_json(const memsim::EventLog& log) {
  json events = json::array();
  for (const auto& e : log.events) events.push_back(event_to_json(e));
  return events;
}

inline memsim::EventLog log_from_json(const json& j) {
  memsim::EventLog log;
  for (const auto& e : j) log.events.push_back(event_from_json(e));
  return log;
}

inline json adversary_to_json(const memsim::Adversary& a) {
  json out;
  switch (a.strategy) {
    case memsim::Adversary::Strategy::SeededRandom:
      out["strategy"] = "seeded-random";
      out["seed"] = a.seed;
      break;
    case memsim::Adversary::Strategy::Explicit:
      out["strategy"] = "explicit";
      out["sequence"] = a.sequence;
      out["tail_round_robin"] = a.tail_round_robin;
      break;
    case memsim::Adversary::Strategy::Exhaustive:
      out["strategy"] = "exhaustive";
      out["bound"] = a.exhaustive_bound;
      break;
  }
  out["crash"] = a.crash ? json{{"process", a.crash->process}, {"after_steps", a.crash->after_steps}}
                         : json(nullptr);
  return out;
}

inline memsim::Adversary adversary_from_json(const json& j) {
  memsim::Adversary a;
  const std::string strategy = j.at("strategy").get<std::string>();
  if (strategy == "seeded-random") {
    a.strategy = memsim::Adversary::Strategy::SeededRandom;
    a.seed = j.at("seed").get<std::uint64_t>();
  } else if (strategy == "explicit") {
    a.strategy = memsim::Adversary::Strategy::Explicit;
    a.sequence = j.at("sequence").get<std::vector<int>>();
    a.tail_round_robin = j.value("tail_round_robin", false);
  } else if (strategy == "exhaustive") {
    a.strategy = memsim::Adversary::Strategy::Exhaustive;
    a.exhaustive_bound = j.value("bound", 0);
  } else {
    throw std::invalid_argument("unknown adversary strategy: \"" + strategy + "\"");
  }
  if (j.contains("crash") && !j.at("crash").is_null()) {
    a.crash = memsim::CrashPoint{j.at("crash").at("process").get<int>(),
                                 j.at("crash").at("after_steps").get<int>()};
  }
  return a;
}

inline json decision_to_json(const reduction::Decision& d) {
  return json{{"slot", d.slot}, {"t", d.t},        {"value", d.value},
              {"point", point_to_json(d.point)},   {"support", d.support}};
}

inline reduction::Decision decision_from_json(const json& j) {
  reduction::Decision d;
  d.slot = j.at("slot").get<int>();
  d.t = j.at("t").get<int>();
  d.value = j.at("value").get<int>();
  d.point = point_from_json(j.at("point"));
  d.support = j.value("support", "");
  return d;
}

inline json trace_to_json(const reduction::ReductionTrace& t) {
  json slots = json::array();
  for (const auto& s : t.slots) {
    json rec{{"j", s.j}};
    for (int p = 0; p < 2; ++p) {
      const auto& sub = s.subs[static_cast<std::size_t>(p)];
      json js(nullptr);
      if (sub) {
        js = json{{"value", local_state_to_json(sub->value)}, {"b", sub->b}};
        js["e"] = sub->e ? json(*sub->e) : json(nullptr);
      }
      rec[p == 0 ? "sub0" : "sub1"] = js;
    }
    rec["committed"] = s.committed ? json(*s.committed) : json(nullptr);
    rec["value"] = s.value ? local_state_to_json(*s.value) : json(nullptr);
    slots.push_back(rec);
  }
  json entries = json::array();
  for (int p = 0; p < 2; ++p) {
    json per = json::array();
    for (const auto& [slot, ts] : t.entry_ts[static_cast<std::size_t>(p)]) {
      per.push_back(json::array({slot, ts}));
    }
    entries.push_back(per);
  }
  json decisions = json::array();
  for (int p = 0; p < 2; ++p) {
    const auto& d = t.decisions[static_cast<std::size_t>(p)];
    decisions.push_back(d ? decision_to_json(*d) : json(nullptr));
  }
  json out{{"n", t.n},
           {"proposals", t.proposals},
           {"algorithm", t.algorithm},
           {"variant", t.variant},
           {"max_slots", t.max_slots},
           {"adversary", adversary_to_json(t.adversary)},
           {"events", log_to_json(t.log)},
           {"slots", slots},
           {"entries", entries},
           {"decisions", decisions},
           {"outcomes", json::array({reduction::outcome_name(t.outcomes[0]),
                                     reduction::outcome_name(t.outcomes[1])})},
           {"reference_point", point_to_json(t.reference_point)},
           {"reference_support", t.reference_support}};
  if (t.formation_witness) out["formation_witness"] = point_to_json(*t.formation_witness);
  return out;
}

inline reduction::ReductionTrace trace_from_json(const json& j) {
  reduction::ReductionTrace t;
  t.n = j.at("n").get<int>();
  if (t.n <= 2) throw std::invalid_argument("trace requires n > 2");
  auto props = j.at("proposals").get<std::vector<int>>();
  if (props.size() != 2) throw std::invalid_argument("proposals: expected a pair");
  t.proposals = {props[0], props[1]};
  t.algorithm = j.at("algorithm").get<std::string>();
  t.variant = j.value("variant", "gathering");
  t.max_slots = j.at("max_slots").get<int>();
  t.adversary = adversary_from_json(j.at("adversary"));
  t.log = log_from_json(j.at("events"));
  if (j.contains("formation_witness")) {
    t.formation_witness = point_from_json(j.at("formation_witness"));
  }
  for (const auto& rec : j.at("slots")) {
    reduction::SlotRecord s;
    s.j = rec.at("j").get<int>();
    for (int p = 0; p < 2; ++p) {
      const auto& js = rec.at(p == 0 ? "sub0" : "sub1");
      if (!js.is_null()) {
        reduction::Submission sub;
        sub.value = local_state_from_json(js.at("value"));
        sub.b = js.at("b").get<int>();
        if (!js.at("e").is_null()) sub.e = js.at("e").get<int>();
        s.subs[static_cast<std::size_t>(p)] = sub;
      }
    }
    if (!rec.at("committed").is_null()) s.committed = rec.at("committed").get<int>();
    if (!rec.at("value").is_null()) s.value = local_state_from_json(rec.at("value"));
    t.slots.push_back(std::move(s));
  }
  const auto& entries = j.at("entries");
  for (int p = 0; p < 2; ++p) {
    for (const auto& e : entries.at(static_cast<std::size_t>(p))) {
      t.entry_ts[static_cast<std::size_t>(p)][e.at(0).get<int>()] = e.at(1).get<int>();
    }
  }
  const auto& decisions = j.at("decisions");
  for (int p = 0; p < 2; ++p) {
    if (!decisions.at(static_cast<std::size_t>(p)).is_null()) {
      t.decisions[static_cast<std::size_t>(p)] =
          decision_from_json(decisions.at(static_cast<std::size_t>(p)));
    }
  }
  auto outcomes = j.at("outcomes").get<std::vector<std::string>>();
  for (int p = 0; p < 2; ++p) {
    const auto& o = outcomes.at(static_cast<std::size_t>(p));
    if (o == "decided") {
      t.outcomes[static_cast<std::size_t>(p)] = reduction::Outcome::Decided;
    } else if (o == "crashed") {
      t.outcomes[static_cast<std::size_t>(p)] = reduction::Outcome::Crashed;
    } else if (o == "bound-exhausted") {
      t.outcomes[static_cast<std::size_t>(p)] = reduction::Outcome::BoundExhausted;
    } else {
      throw std::invalid_argument("unknown outcome: \"" + o + "\"");
    }
  }
  t.reference_point = point_from_json(j.at("reference_point"));
  t.reference_support = j.value("reference_support", "");
  return t;
}

inline std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace jsonio
}  // namespace byzgather

#endif  // BYZGATHER_JSON_IO_HPP_
