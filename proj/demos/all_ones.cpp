// Closed-form neutralization on the all-ones channel for a few K.
#include <iostream>

#include "iia/channels.hpp"
#include "iia/schemes/solvers.hpp"

int main() {
  using namespace iia;
  for (int K = 3; K <= 6; ++K) {
    const auto ch = channels::build_all_ones(K);
    const auto cf = schemes::solve_rank1_closed_form(channels::all_ones_family(K));
    const auto sol =
        schemes::complete_solution(ch, schemes::SchemeSpec::three_phase(), cf.coding);
    std::cout << "K=" << K << "  alpha=" << cf.alpha.to_string()
              << "  B_ii=" << sol.B(0, 0).to_string()
              << "  phase-3 coefficient=" << cf.coding[1](0, 0).to_string()
              << "  verified=" << schemes::verify_alignment(ch, sol).ok << "\n";
  }
}
