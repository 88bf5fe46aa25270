// Short sum-rate sweep against time sharing, K=3.
#include <iostream>

#include "iia/ratesim.hpp"

int main() {
  using namespace iia::ratesim;
  CurveOptions opt;
  opt.K = 3;
  opt.snr_db = parse_snr_grid("0:10:40");
  opt.trials = 5;
  opt.seed = 1;
  opt.restarts = 4;
  opt.iterations = 200;
  const auto curves = monte_carlo_curves(opt);
  std::cout << to_csv(curves.rows);
  std::cout << "slope 30-40 dB: IA " << dof_slope(curves.rows, 30, 40, true) << ", TS "
            << dof_slope(curves.rows, 30, 40, false) << "\n";
}
