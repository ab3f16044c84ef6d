// Walks one trap through the library: spectrum, a coherent state and its
// photon statistics. Build target: coherent_state_tour.

#include <cstdio>

#include "mpt/mpt.hpp"

int main() {
  const auto trap = mpt::new_trap(10.0);
  std::printf("N = %g, s = %.6f, bound states = %zu\n", trap.depth_parameter(), trap.s(), trap.num_bound());
  for (std::size_t n = 0; n < trap.num_bound(); ++n) {
    std::printf("  E_%zu = %.12f  f^2 = %.12f\n", n, mpt::energy_deformed_form(trap, n), mpt::f_squared(trap, n));
  }

  const auto state = mpt::coherent_state(trap, {2.0, 1.0});
  const auto moments = mpt::number_moments(state);
  std::printf("alpha = 2+1i: <n> = %.6f, Q = %.6f, S = %.6f\n", moments.mean_n, mpt::mandel_q(state),
              mpt::squeezing_s(state));

  const auto best = mpt::quadrature_variance(state, mpt::min_variance_phase(state));
  std::printf("narrowest quadrature at phi = %.6f: var_q = %.6f, var_p = %.6f\n", best.phi, best.var_q,
              best.var_p);
  return 0;
}
