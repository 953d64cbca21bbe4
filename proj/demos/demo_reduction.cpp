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

// Walkthrough: two simulator processes with different proposals drive four
// simulated robots (plus one Byzantine) through the slot array, then the
// analyzer replays the trace into an admissible centralized execution.

#include <iostream>

#include "byzgather/algorithms.hpp"
#include "byzgather/trace_analysis.hpp"

using namespace byzgather;

int main() {
  const int n = 4;
  auto algorithms = uniform_algorithms(make_algorithm("move-to-max"), n);

  auto trace = reduction::run_consensus({0, 1}, algorithms, memsim::Adversary::seeded(2014),
                                        reduction::Semantics::gathering(n));

  std::cout << "events: " << trace.log.events.size() << ", slots touched: "
            << trace.slots.size() << "\n";
  for (int p = 0; p < 2; ++p) {
    const auto& d = trace.decisions[static_cast<std::size_t>(p)];
    std::cout << "p" << p << " proposed " << trace.proposals[static_cast<std::size_t>(p)]
              << ": " << reduction::outcome_name(trace.outcomes[static_cast<std::size_t>(p)]);
    if (d) {
      std::cout << ", decided " << d->value << " at slot " << d->slot << " (gather point "
                << d->point.str() << ")";
    }
    std::cout << "\n";
  }

  trace_analysis::TraceAnalyzer analyzer(trace, algorithms);
  auto adm = analyzer.check_lemma_admissible();
  std::cout << "derived execution: arrows " << adm.first_arrow << ".." << adm.last_arrow
            << ", centralized " << (adm.centralized ? "yes" : "no") << ", measured k "
            << adm.measured_k << " (n = " << n << ")\n";
  std::cout << "lemma checks: " << (adm.ok() ? "all pass" : "violated") << "\n";
  if (!adm.critical_slots.empty()) {
    std::cout << "critical slots:";
    for (int j : adm.critical_slots) std::cout << " " << j;
    std::cout << "\n";
  }
  for (int j = adm.first_arrow; j <= adm.last_arrow + 1 && j <= analyzer.last_config_slot(); ++j) {
    auto c = analyzer.simulated_configuration(j);
    std::cout << "  C_" << j << ":";
    for (int i = 0; i <= n; ++i) std::cout << " " << c[i].loc.str();
    std::cout << "\n";
  }
  return adm.ok() ? 0 : 1;
}
