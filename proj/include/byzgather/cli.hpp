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

#ifndef BYZGATHER_CLI_HPP_
#define BYZGATHER_CLI_HPP_

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "byzgather/algorithms.hpp"
#include "byzgather/json_io.hpp"
#include "byzgather/trace_analysis.hpp"

namespace byzgather {
namespace cli {

// Exit codes: 0 pass, 1 property violation, 2 usage/parse error, 3 slot
// bound exhausted.

namespace detail {

inline Point parse_point(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) {
    throw std::invalid_argument("expected \"x,y\", got \"" + s + "\"");
  }
  return Point{rational_from_string(s.substr(0, comma)),
               rational_from_string(s.substr(comma + 1))};
}

inline std::array<int, 2> parse_proposals(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) {
    throw std::invalid_argument("expected \"p0,p1\", got \"" + s + "\"");
  }
  std::array<int, 2> props{std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
  for (int p : props) {
    if (p != 0 && p != 1) throw std::invalid_argument("proposals must be 0 or 1");
  }
  return props;
}

inline std::optional<memsim::CrashPoint> parse_crash(const std::string& s) {
  if (s.empty() || s == "none") return std::nullopt;
  auto at = s.find('@');
  if (at == std::string::npos) {
    throw std::invalid_argument("expected \"process@step\" or \"none\", got \"" + s + "\"");
  }
  memsim::CrashPoint c{std::stoi(s.substr(0, at)), std::stoi(s.substr(at + 1))};
  if (c.process != 0 && c.process != 1) throw std::invalid_argument("crash process must be 0 or 1");
  return c;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Point default_witness(const std::string& family) {
  if (family == "line") return point_of_int(0, 1);
  return point_of_int(1, 1);
}

}  // namespace detail

/** reduce: run the two-process simulation and persist the trace. */
inline int cmd_reduce(int n, const std::string& proposals_s, const std::string& algorithm,
                      std::uint64_t seed, const std::string& crash_s,
                      const std::string& formation_name, int max_slots,
                      const std::string& adversary_path, const std::string& out_path) {
  std::array<int, 2> proposals{};
  std::optional<memsim::CrashPoint> crash;
  AlgorithmSet algs;
  memsim::Adversary adversary;
  try {
    if (n <= 2) throw std::invalid_argument("n must be greater than 2 correct robots");
    proposals = detail::parse_proposals(proposals_s);
    crash = detail::parse_crash(crash_s);
    algs = uniform_algorithms(make_algorithm(algorithm), n);
    if (adversary_path.empty()) {
      adversary = memsim::Adversary::seeded(seed, crash);
    } else {
      adversary = jsonio::adversary_from_json(
          jsonio::json::parse(detail::read_file(adversary_path)));
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  reduction::ReductionTrace trace;
  try {
    if (formation_name.empty()) {
      trace = reduction::run_consensus(proposals, algs, adversary,
                                       reduction::Semantics::gathering(n), max_slots, algorithm);
    } else {
      auto f = formations::formation_by_name(formation_name, n + 1);
      trace = reduction::run_formation_consensus(proposals, algs, f,
                                                 detail::default_witness(formation_name),
                                                 adversary, max_slots, algorithm);
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  detail::write_file(out_path, jsonio::canonical_dump(jsonio::trace_to_json(trace)));

  int committed = 0, uncommitted = 0;
  for (const auto& s : trace.slots) {
    s.committed ? ++committed : ++uncommitted;
  }
  std::cout << "trace: " << out_path << "\n";
  std::cout << "slots: " << trace.slots.size() << " (" << committed << " committed, "
            << uncommitted << " uncommitted)\n";
  bool bound_hit = false;
  for (int p = 0; p < 2; ++p) {
    const auto& d = trace.decisions[static_cast<std::size_t>(p)];
    std::cout << "p" << p << ": "
              << reduction::outcome_name(trace.outcomes[static_cast<std::size_t>(p)]);
    if (d) std::cout << ", decided " << d->value << " at slot " << d->slot;
    std::cout << "\n";
    if (trace.outcomes[static_cast<std::size_t>(p)] == reduction::Outcome::BoundExhausted) {
      bound_hit = true;
    }
  }
  return bound_hit ? 3 : 0;
}

/** verify-trace: re-derive and check everything a trace claims. */
inline int cmd_verify_trace(const std::string& path, std::string report_path) {
  reduction::ReductionTrace trace;
  try {
    trace = jsonio::trace_from_json(jsonio::json::parse(detail::read_file(path)));
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  }
  AlgorithmSet algs;
  try {
    algs = uniform_algorithms(make_algorithm(trace.algorithm), trace.n);
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  }
  if (report_path.empty()) report_path = path + ".report.json";

  jsonio::json report;
  bool pass = true;
  auto fail = [&](const std::string& where, const std::string& what) {
    pass = false;
    std::cout << "FAIL " << where << ": " << what << "\n";
  };

  auto lv = memsim::validate_log(trace.log);
  report["log"] = {{"ok", lv.ok}, {"violations", lv.violations}};
  if (!lv.ok) fail("event-log", lv.violations.front());

  try {
    trace_analysis::TraceAnalyzer an(trace, algs);

    auto issues = trace_analysis::cross_check_records(trace, an);
    report["records"] = {{"ok", issues.empty()}, {"issues", issues}};
    if (!issues.empty()) fail("records", issues.front());

    // Slot contract over the real log, slot by slot.
    int slots_checked = 0;
    std::string slot_issue;
    for (const auto& [j, m] : an.slots()) {
      if (!m.subs[0] && !m.subs[1]) continue;
      std::array<memsim::CellValue, 2> vals;
      for (int p = 0; p < 2; ++p) {
        vals[static_cast<std::size_t>(p)] =
            m.subs[static_cast<std::size_t>(p)]
                ? reduction::encode_local_state(m.subs[static_cast<std::size_t>(p)]->value)
                : memsim::CellValue("\x01missing-") + std::to_string(p);
      }
      auto rep = slot::check_slot_properties(trace.log, j, vals);
      ++slots_checked;
      if (!rep.all_pass() && slot_issue.empty()) {
        slot_issue = "slot " + std::to_string(j) + " violates its contract";
      }
    }
    report["slots"] = {{"checked", slots_checked}, {"ok", slot_issue.empty()}};
    if (!slot_issue.empty()) fail("slot-contract", slot_issue);

    auto adm = an.check_lemma_admissible();
    jsonio::json violations = jsonio::json::array();
    for (const auto& v : adm.violations) {
      violations.push_back({{"j", v.j}, {"what", v.what}});
    }
    report["admissibility"] = {{"ok", adm.ok()},
                               {"first_arrow", adm.first_arrow},
                               {"last_arrow", adm.last_arrow},
                               {"violations", violations},
                               {"centralized", adm.centralized},
                               {"measured_k", adm.measured_k},
                               {"k_le_n", adm.measured_k <= trace.n},
                               {"k_le_n_minus_1", adm.measured_k <= trace.n - 1},
                               {"critical_slots", adm.critical_slots},
                               {"validator_reassignments", adm.validator_reassignments}};
    report["derived_execution"] = jsonio::execution_to_json(adm.derived, trace.n);
    if (!adm.ok()) fail("admissibility", adm.violations.front().what);
    if (!adm.centralized) fail("scheduler", "derived schedule is not centralized");
    if (adm.measured_k > trace.n) {
      fail("scheduler", "derived schedule exceeds the n-bounded envelope");
    }

    auto con = an.check_consensus_properties();
    report["consensus"] = {{"agreement_applicable", con.agreement_applicable},
                           {"agreement_ok", con.agreement_ok},
                           {"validity_applicable", con.validity_applicable},
                           {"validity_ok", con.validity_ok},
                           {"outcomes", con.outcomes},
                           {"summary", con.summary}};
    if (!con.ok()) fail("consensus", con.summary);

    // The decode reference must be reproducible from the algorithm registry.
    auto ref = reduction::reference_run(algs, 0, trace.semantics(), 4 * trace.max_slots);
    bool ref_ok = ref.reached && ref.point == trace.reference_point &&
                  ref.support == trace.reference_support;
    report["reference"] = {{"ok", ref_ok},
                           {"point", jsonio::point_to_json(ref.point)},
                           {"support", ref.support}};
    if (!ref_ok) fail("reference", "recorded decode reference is not reproducible");

    auto decision_issues =
        trace_analysis::verify_decisions(trace, an, ref.point, ref.support);
    report["decisions"] = {{"ok", decision_issues.empty()}, {"issues", decision_issues}};
    if (!decision_issues.empty()) fail("decisions", decision_issues.front());
  } catch (const std::exception& e) {
    report["analysis_error"] = e.what();
    fail("analysis", e.what());
  }

  report["pass"] = pass;
  detail::write_file(report_path, jsonio::canonical_dump(report));
  std::cout << (pass ? "PASS" : "FAIL") << " " << path << " (report: " << report_path << ")\n";
  return pass ? 0 : 1;
}

/** check-slot: exhaustive interleaving check of the slot contract. */
inline int cmd_check_slot(int max_events, const std::string& values_s,
                          const std::string& mutation_s, const std::string& out_path) {
  if (max_events > 24) {
    std::cerr << "config error: max-events above 24 is intractable\n";
    return 2;
  }
  slot::StatusMutation mutation = slot::StatusMutation::None;
  if (mutation_s == "ignore-claim") {
    mutation = slot::StatusMutation::IgnoreClaim;
  } else if (mutation_s == "commit-without-values") {
    mutation = slot::StatusMutation::CommitWithoutValues;
  } else if (!mutation_s.empty() && mutation_s != "none") {
    std::cerr << "config error: unknown mutation \"" << mutation_s << "\"\n";
    return 2;
  }

  std::vector<std::array<memsim::CellValue, 2>> pairs;
  std::stringstream ss(values_s);
  std::string pair;
  try {
    while (std::getline(ss, pair, ';')) {
      auto comma = pair.find(',');
      if (comma == std::string::npos) throw std::invalid_argument("expected \"v0,v1\" pairs");
      pairs.push_back({pair.substr(0, comma), pair.substr(comma + 1)});
    }
    if (pairs.empty()) throw std::invalid_argument("no value pairs given");
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  bool all_pass = true;
  jsonio::json out_doc = jsonio::json::array();
  for (const auto& values : pairs) {
    slot::ExhaustiveSlotReport rep;
    try {
      rep = slot::exhaustive_slot_check(values, 0, mutation);
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    }
    std::cout << "values (" << values[0] << ", " << values[1] << "): " << rep.total_logs
              << " schedules (" << rep.crash_free_logs << " crash-free, " << rep.crash_logs
              << " crashed), " << rep.reads_checked << " read points\n";
    jsonio::json props = jsonio::json::object();
    auto line = [&](const char* name, const slot::PropertyResult& r) {
      std::cout << "  " << (r.pass ? "pass" : "FAIL") << "  " << name;
      if (!r.pass) std::cout << "  [" << r.witness << "]";
      std::cout << "\n";
      if (!r.pass) all_pass = false;
      props[name] = jsonio::json{{"pass", r.pass}, {"witness", r.witness}};
    };
    line("validity", rep.aggregate.validity);
    line("contended value detection", rep.aggregate.contended_value_detection);
    line("persistency", rep.aggregate.persistency);
    line("commitment", rep.aggregate.commitment);
    line("no contention commitment", rep.aggregate.no_contention_commitment);
    line("common value commitment", rep.aggregate.common_value_commitment);
    line("at most one claim", rep.aggregate.at_most_one_claim);
    line("write once", rep.aggregate.write_once);
    if (!rep.blocking_bound_ok) {
      all_pass = false;
      std::cout << "  FAIL  blocking bound  [" << rep.blocking_witness << "]\n";
    }
    out_doc.push_back(jsonio::json{{"values", {values[0], values[1]}},
                                   {"schedules", rep.total_logs},
                                   {"crash_free", rep.crash_free_logs},
                                   {"crashed", rep.crash_logs},
                                   {"read_points", rep.reads_checked},
                                   {"properties", props},
                                   {"blocking_bound_ok", rep.blocking_bound_ok}});
  }
  if (!out_path.empty()) {
    detail::write_file(out_path, jsonio::canonical_dump(out_doc));
  }
  return all_pass ? 0 : 1;
}

/** simulate: a raw engine run under the benign pinned-Byzantine schedule. */
inline int cmd_simulate(int n, const std::string& algorithm, int rounds,
                        const std::string& init_path, const std::string& out_path) {
  AlgorithmSet algs;
  Configuration c0;
  try {
    if (n <= 2) throw std::invalid_argument("n must be greater than 2 correct robots");
    algs = uniform_algorithms(make_algorithm(algorithm), n);
    if (init_path.empty()) {
      std::vector<LocalState> rs;
      for (int l = 0; l < n; ++l) {
        rs.push_back({algs[static_cast<std::size_t>(l)]->initial_state(l), point_of_int(l, 0)});
      }
      rs.push_back({{}, point_of_int(0, 0)});
      c0 = Configuration(std::move(rs));
    } else {
      c0 = jsonio::config_from_json(jsonio::json::parse(detail::read_file(init_path)));
      if (c0.n() != n) throw std::invalid_argument("initial configuration size mismatch");
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  Schedule schedule;
  ExecutionTrace trace;
  trace.configs.push_back(c0);
  Configuration c = c0;
  for (int r = 0; r < rounds; ++r) {
    Point helper = max_multiplicity(c.correct_locations()).first;
    if (!(c[n].loc == helper)) {
      auto byz_round = round_of({n}, helper);
      schedule.rounds.push_back(byz_round);
      c = step(c, byz_round, algs);
      trace.configs.push_back(c);
    }
    auto correct_round = round_of({r % n});
    schedule.rounds.push_back(correct_round);
    c = step(c, correct_round, algs);
    trace.configs.push_back(c);
  }
  trace.schedule = schedule;
  if (!out_path.empty()) {
    detail::write_file(out_path, jsonio::canonical_dump(jsonio::execution_to_json(trace, n)));
    std::cout << "trace: " << out_path << "\n";
  }
  std::cout << "rounds: " << trace.schedule.rounds.size() << "\n";
  std::cout << "k-bound: " << check_k_bounded(trace.schedule, n + 1) << "\n";
  std::cout << "legitimate: " << (is_legitimate_now(c) ? "yes" : "no") << "\n";
  for (int i = 0; i <= n; ++i) {
    std::cout << "  r" << i << " at " << c[i].loc.str() << "\n";
  }
  return 0;
}

/** formations member/chain/certify/grid. */
inline int cmd_formations_member(const std::string& family, const std::string& pattern_path) {
  try {
    auto pattern = jsonio::multiset_from_json(
        jsonio::json::parse(detail::read_file(pattern_path)));
    auto f = formations::formation_by_name(family, static_cast<int>(pattern.size()));
    jsonio::json out{{"family", family},
                     {"member", formations::member(f, pattern)},
                     {"extension_member", formations::f1_member(f, pattern)}};
    auto inv = formations::invariant(f, pattern);
    out["invariant"] = inv ? jsonio::json(*inv) : jsonio::json(nullptr);
    std::cout << jsonio::canonical_dump(out);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

inline int cmd_formations_chain(const std::string& family, const std::string& from_path,
                                const std::string& to_path, const std::string& out_path) {
  try {
    auto from = jsonio::multiset_from_json(jsonio::json::parse(detail::read_file(from_path)));
    auto to = jsonio::multiset_from_json(jsonio::json::parse(detail::read_file(to_path)));
    auto f = formations::formation_by_name(family, static_cast<int>(from.size()));
    auto chain = formations::same_class_chain(f, from, to);
    if (!chain) {
      std::cout << "no chain found within bounds\n";
      return 1;
    }
    auto check = formations::verify_chain(f, *chain, from, to);
    jsonio::json patterns = jsonio::json::array();
    for (const auto& p : chain->patterns) patterns.push_back(jsonio::multiset_to_json(p));
    jsonio::json out{{"family", family},
                     {"length", chain->patterns.size()},
                     {"verified", check.ok},
                     {"patterns", patterns}};
    if (!out_path.empty()) detail::write_file(out_path, jsonio::canonical_dump(out));
    std::cout << "chain of " << chain->patterns.size() << " patterns, verified: "
              << (check.ok ? "yes" : "no") << "\n";
    return check.ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

inline int cmd_formations_certify(const std::string& family, const std::string& pattern_path,
                                  const std::string& translate_s, int fuzz,
                                  const std::string& out_path) {
  try {
    auto pattern = jsonio::multiset_from_json(
        jsonio::json::parse(detail::read_file(pattern_path)));
    auto f = formations::formation_by_name(family, static_cast<int>(pattern.size()));
    Point x = detail::parse_point(translate_s);
    auto cert = formations::check_bivalency_witness(f, pattern, x, fuzz);
    jsonio::json out{{"family", family},
                     {"certified", cert.certified},
                     {"reason", cert.reason},
                     {"invariant_p", cert.invariant_p},
                     {"invariant_px", cert.invariant_px},
                     {"invariants_differ", cert.invariants_differ},
                     {"analytic_step_invariance", cert.analytic_step_invariance},
                     {"fuzz_pairs", cert.fuzz_pairs},
                     {"fuzz_violations", cert.fuzz_violations}};
    if (cert.connecting_chain) {
      out["connecting_chain_length"] = cert.connecting_chain->patterns.size();
    }
    if (cert.counterexample) {
      out["counterexample"] = {{"q", jsonio::multiset_to_json(cert.counterexample->q)},
                               {"q_next", jsonio::multiset_to_json(cert.counterexample->q_next)},
                               {"inv_q", cert.counterexample->inv_q},
                               {"inv_q_next", cert.counterexample->inv_q_next}};
    }
    if (!out_path.empty()) detail::write_file(out_path, jsonio::canonical_dump(out));
    std::cout << (cert.certified ? "certified" : "not certified") << ": " << cert.reason << "\n";
    return cert.certified ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

inline int cmd_formations_grid(const std::string& family, int arity, int width, int height) {
  try {
    auto kernel = formations::grid_kernel_facts(width, height);
    std::cout << "kernel facts: " << (kernel.ok ? "pass" : "FAIL") << " (" << kernel.circle_pairs
              << " circle pairs, " << kernel.line_pairs << " line pairs)\n";
    if (!kernel.ok) std::cout << "  " << kernel.witness << "\n";
    bool ok = kernel.ok;
    if (family != "2-gathering") {
      auto f = formations::formation_by_name(family, arity);
      auto rep = formations::grid_step_invariance(f, width, height);
      std::cout << "step invariance (" << family << ", arity " << arity << "): " << rep.patterns
                << " patterns, " << rep.edges << " edges, " << rep.violations << " violations\n";
      if (rep.first) {
        std::cout << "  first violation:\n";
        std::cout << "    " << rep.first->inv_q << " vs " << rep.first->inv_q_next << "\n";
      }
      ok = ok && rep.violations == 0;
    }
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

inline int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Deterministic simulator and trace verifier for two-process "
               "shared-memory simulations of Byzantine-robot executions"};
  app.require_subcommand(1);

  // reduce
  auto* reduce = app.add_subcommand("reduce", "run the consensus-to-gathering simulation");
  int n = 4;
  std::string proposals = "0,1";
  std::string algorithm = "move-to-max";
  std::uint64_t seed = 1;
  std::string crash = "none";
  std::string formation_name;
  int max_slots = 0;
  std::string adversary_path;
  std::string out_path = "trace.json";
  reduce->add_option("--n", n, "number of correct robots (n > 2)");
  reduce->add_option("--proposals", proposals, "binary proposals, e.g. 0,1");
  reduce->add_option("--algorithm", algorithm, "robot algorithm name");
  reduce->add_option("--seed", seed, "adversary seed");
  reduce->add_option("--crash", crash, "crash injection process@step, or none");
  reduce->add_option("--formation", formation_name, "formation family (line, circle)");
  reduce->add_option("--max-slots", max_slots, "slot bound (default 64n)");
  reduce->add_option("--adversary-file", adversary_path,
                     "adversary config JSON (overrides --seed/--crash)");
  reduce->add_option("--out", out_path, "trace output path");

  // verify-trace
  auto* verify = app.add_subcommand("verify-trace", "check every lemma on a persisted trace");
  std::string trace_path;
  std::string report_path;
  verify->add_option("trace", trace_path, "trace JSON file")->required();
  verify->add_option("--report", report_path, "report output path");

  // check-slot
  auto* check_slot = app.add_subcommand("check-slot", "exhaustive slot-contract check");
  int max_events = 6;
  std::string values = "5,7;9,9";
  std::string mutation = "none";
  std::string slot_out;
  check_slot->add_option("--max-events", max_events, "total primitive bound (max 24)");
  check_slot->add_option("--values", values, "semicolon-separated value pairs, e.g. 5,7;9,9");
  check_slot->add_option("--mutate", mutation, "status-rule mutation (negative control)")
      ->group("");
  check_slot->add_option("--out", slot_out, "property report output path (JSON)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "raw engine run, Byzantine pinned to m(C)");
  int sim_n = 4;
  std::string sim_algorithm = "move-to-max";
  int rounds = 16;
  std::string init_path;
  std::string sim_out;
  simulate->add_option("--n", sim_n, "number of correct robots (n > 2)");
  simulate->add_option("--algorithm", sim_algorithm, "robot algorithm name");
  simulate->add_option("--rounds", rounds, "correct-robot activations to run");
  simulate->add_option("--init", init_path, "initial configuration JSON (default: a line)");
  simulate->add_option("--out", sim_out, "execution trace output path");

  // formations
  auto* form = app.add_subcommand("formations", "formation algebra queries and certificates");
  form->require_subcommand(1);
  std::string fam = "line";
  std::string pattern_path, from_path, to_path, translate = "0,1", form_out;
  int fuzz = 10000, grid_w = 5, grid_h = 5, grid_arity = 5;
  auto* member = form->add_subcommand("member", "pattern membership and invariant");
  member->add_option("--family", fam, "circle | line | 2-gathering");
  member->add_option("pattern", pattern_path, "pattern JSON (array of points)")->required();
  auto* chain = form->add_subcommand("chain", "connect two patterns inside the extension");
  chain->add_option("--family", fam, "circle | line | 2-gathering");
  chain->add_option("from", from_path, "pattern JSON")->required();
  chain->add_option("to", to_path, "pattern JSON")->required();
  chain->add_option("--out", form_out, "chain output path");
  auto* certify = form->add_subcommand("certify", "bivalency witness certificate");
  certify->add_option("--family", fam, "circle | line | 2-gathering");
  certify->add_option("pattern", pattern_path, "pattern JSON")->required();
  certify->add_option("--translate", translate, "witness translation x, e.g. 0,1");
  certify->add_option("--fuzz", fuzz, "neighbor pairs to fuzz");
  certify->add_option("--out", form_out, "certificate output path");
  auto* grid = form->add_subcommand("grid", "exhaustive grid checks (kernel + invariance)");
  grid->add_option("--family", fam, "circle | line");
  grid->add_option("--arity", grid_arity, "pattern size n+1");
  grid->add_option("--width", grid_w, "grid width");
  grid->add_option("--height", grid_h, "grid height");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (reduce->parsed()) {
    return cmd_reduce(n, proposals, algorithm, seed, crash, formation_name, max_slots,
                      adversary_path, out_path);
  }
  if (verify->parsed()) return cmd_verify_trace(trace_path, report_path);
  if (check_slot->parsed()) return cmd_check_slot(max_events, values, mutation, slot_out);
  if (simulate->parsed()) return cmd_simulate(sim_n, sim_algorithm, rounds, init_path, sim_out);
  if (form->parsed()) {
    if (member->parsed()) return cmd_formations_member(fam, pattern_path);
    if (chain->parsed()) return cmd_formations_chain(fam, from_path, to_path, form_out);
    if (certify->parsed()) return cmd_formations_certify(fam, pattern_path, translate, fuzz, form_out);
    if (grid->parsed()) return cmd_formations_grid(fam, grid_arity, grid_w, grid_h);
  }
  return 2;
}

}  // namespace cli
}  // namespace byzgather

#endif  // BYZGATHER_CLI_HPP_
