// Prints the soft potential of a domain-wall chain and checks that the
// synthesized fields reproduce it on every encoded value.

#include <iomanip>
#include <iostream>

#include "fgs/domain_wall.hpp"

using namespace fgs;

int main() {
  const auto potential = soft_potential(3, 0.5);
  const auto fields = synthesize_fields(potential);
  std::cout << "value  potential  from fields\n";
  for (std::size_t x = 0; x < kChainValues; ++x) {
    const auto z = encode_value(x);
    const double e = chain_field_energy(fields.h, z) + fields.offset;
    std::cout << std::setw(5) << x << std::setw(11) << potential[x] << std::setw(13) << e << '\n';
  }
}
