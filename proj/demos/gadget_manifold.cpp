// Enumerates the ground manifold of a free and a locked gadget for each
// pair of external spins.

#include <iostream>

#include "fgs/gadget.hpp"

using namespace fgs;

int main() {
  const ChimeraGraph g(2, 2, 4);
  for (auto variant : {GadgetVariant::free, GadgetVariant::locked}) {
    Rng rng(1);
    const auto spec = *build_gadget(g, 0, 0, variant, rng);
    std::cout << (variant == GadgetVariant::free ? "free" : "locked") << " gadget\n";
    for (Spin zl : {1, -1})
      for (Spin zr : {1, -1}) {
        const auto m = gadget_ground_manifold(spec, zl, zr);
        std::cout << "  externals " << +zl << ' ' << +zr << ": energy " << m.energy << ", " << m.states.size()
                  << " ground states\n";
        for (const auto& s : m.states) {
          std::cout << "    ";
          for (Spin z : s) std::cout << (z > 0 ? '+' : '-');
          std::cout << '\n';
        }
      }
  }
}
