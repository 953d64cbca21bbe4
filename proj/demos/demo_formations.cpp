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

// Walkthrough of the formation algebra: chains inside the 2-gathering
// extension, a line separation certificate, and the five-robot circle edge
// where the supporting circle genuinely changes.

#include <iostream>

#include "byzgather/formations.hpp"

using namespace byzgather;
using namespace byzgather::formations;

int main() {
  // 2-gathering patterns are all chain-connected.
  auto gat = two_gathering_formation(5);
  LocationMultiset p({point_of_int(0, 0), point_of_int(0, 0), point_of_int(0, 0),
                      point_of_int(2, 1), point_of_int(2, 1)});
  LocationMultiset q({point_of_int(5, 5), point_of_int(5, 5), point_of_int(-1, 3),
                      point_of_int(-1, 3), point_of_int(-1, 3)});
  auto chain = same_class_chain(gat, p, q);
  std::cout << "2-gathering chain length: " << (chain ? chain->patterns.size() : 0) << ", verified "
            << (chain && verify_chain(gat, *chain, p, q).ok ? "yes" : "no") << "\n";

  // Lines separate under a perpendicular translation.
  auto line5 = line_formation(5);
  LocationMultiset lp({point_of_int(0, 0), point_of_int(1, 0), point_of_int(2, 0),
                       point_of_int(3, 0), point_of_int(4, 0)});
  auto cert = check_bivalency_witness(line5, lp, point_of_int(0, 1), 2000);
  std::cout << "line@5 witness (0,1): " << (cert.certified ? "certified" : "refused") << " -- "
            << cert.reason << "\n";

  // Circles at five robots do not: the checker exhibits an edge between two
  // supporting circles on the integer grid.
  auto circle5 = circle_formation(5);
  auto grid = grid_step_invariance(circle5, 5, 5);
  std::cout << "circle@5 on the 5x5 grid: " << grid.patterns << " extension patterns, "
            << grid.edges << " edges, " << grid.violations << " support changes\n";
  if (grid.first) {
    std::cout << "  example: " << grid.first->inv_q << " -> " << grid.first->inv_q_next << "\n";
  }
  auto circle6 = circle_formation(6);
  auto grid6 = grid_step_invariance(circle6, 5, 5);
  std::cout << "circle@6 on the 5x5 grid: " << grid6.patterns << " extension patterns, "
            << grid6.edges << " edges, " << grid6.violations << " support changes\n";
  return 0;
}
