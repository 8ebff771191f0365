// Greedy descent on the 16-qubit two-minima instance under a random
// Hamming-distance penalty, started from the true ground state and from the
// flexible false minimum.

#include <iostream>

#include "fgs/penalty.hpp"

using namespace fgs;

int main() {
  const auto t = flexibility_tradeoff_16(linear_grid(0.0, 20.0, 11), 2000, 7);
  std::cout << "true ground energy " << t.true_ground_energy << "\n"
            << "lambda  from_ground  from_flexible  P(flexible better)\n";
  for (const auto& p : t.points)
    std::cout << p.lambda << "  " << p.ground_mean << "  " << p.flexible_mean << "  "
              << p.confidence_flexible_better << '\n';
}
