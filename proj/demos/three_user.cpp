// Exact alignment for a random reciprocal 3-user channel.
#include <cstdlib>
#include <iostream>

#include "iia/channels.hpp"
#include "iia/schemes/solvers.hpp"

int main(int argc, char** argv) {
  using namespace iia;
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  const auto ch = channels::sample_exact(3, 1, channels::Mode::out_of_band, true, seed);
  const auto res = schemes::solve_3user_linear(ch, seed);
  std::cout << "nullspace dimension " << res.diagnostics.nullspace_dim << "\n";
  for (int k = 0; k < 3; ++k) {
    std::cout << "D" << k + 1 << " =";
    for (std::size_t i = 0; i < 3; ++i) {
      std::cout << " " << res.solution.coding[k](i, i).to_string();
    }
    std::cout << "\n";
  }
  const auto rep = schemes::verify_alignment(ch, res.solution);
  std::cout << "verified " << rep.ok << " (" << rep.failures() << " failed checks)\n";
  return rep.ok ? 0 : 1;
}
