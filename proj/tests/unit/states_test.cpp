#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "frozen_oracles.hpp"
#include "generators.hpp"
#include "mpt/states.hpp"

namespace {

double norm_sq(const mpt::DeformedState& state) {
  double total = 0.0;
  for (const auto& c : state.coeffs()) total += std::norm(c);
  return total;
}

}  // namespace

TEST(CoherentState, MatchesFrozenAmplitudes) {
  const auto state = mpt::coherent_state(mpt::new_trap(10.0), {2.0, 0.0});
  ASSERT_EQ(state.support(), frozen::kCoeffMag_N10_a2.size());
  for (std::size_t n = 0; n < state.support(); ++n) {
    EXPECT_NEAR(std::abs(state.coeffs()[n]), frozen::kCoeffMag_N10_a2[n], 1e-14) << n;
    EXPECT_EQ(state.coeffs()[n].imag(), 0.0);
  }
  EXPECT_NEAR(state.norm_const(), frozen::kNormConst_N10_a2, 1e-14);
  EXPECT_NEAR(mpt::norm_const(mpt::new_trap(10.0), 2.0), frozen::kNormConst_N10_a2, 1e-14);
}

TEST(CoherentState, PhaseWindsWithLevel) {
  const std::complex<double> alpha = std::polar(1.3, 0.7);
  const auto state = mpt::coherent_state(mpt::new_trap(20.0), alpha);
  for (std::size_t n = 1; n < state.support(); ++n) {
    const double winding = std::arg(state.coeffs()[n] / state.coeffs()[n - 1]);
    EXPECT_NEAR(winding, 0.7, 1e-12) << n;
  }
}

TEST(CoherentState, PropertyNormalized) {
  gen::Source source(51);
  for (int trial = 0; trial < 300; ++trial) {
    const auto trap = mpt::new_trap(source.log_uniform(0.1, 3e3));
    const auto state = mpt::coherent_state(trap, source.alpha(12.0));
    EXPECT_NEAR(norm_sq(state), 1.0, 1e-12) << "N=" << trap.depth_parameter() << " alpha=" << state.alpha();
    EXPECT_TRUE(state.full_support());
  }
}

TEST(CoherentState, FactorialConventionCancelsOnNormalization) {
  gen::Source source(52);
  for (int trial = 0; trial < 50; ++trial) {
    const auto trap = mpt::new_trap(source.log_uniform(0.5, 200.0));
    const auto alpha = source.alpha(5.0);
    const auto with = mpt::coherent_state(trap, alpha, mpt::FactorialConvention::IncludeZero);
    const auto without = mpt::coherent_state(trap, alpha, mpt::FactorialConvention::ExcludeZero);
    for (std::size_t n = 0; n < with.support(); ++n) {
      EXPECT_NEAR(std::abs(with.coeffs()[n] - without.coeffs()[n]), 0.0, 1e-14);
    }
    EXPECT_NEAR(with.log_norm_const() - without.log_norm_const(), 0.5 * std::log(trap.eta()), 1e-12);
  }
}

TEST(CoherentState, VacuumLabelGivesGroundState) {
  const auto state = mpt::coherent_state(mpt::new_trap(50.0), {0.0, 0.0});
  EXPECT_NEAR(std::abs(state.coeffs()[0]), 1.0, 1e-15);
  for (std::size_t n = 1; n < state.support(); ++n) EXPECT_EQ(state.coeffs()[n], 0.0);
}

TEST(CoherentState, LargeModulusStaysFinite) {
  const auto state = mpt::coherent_state(mpt::new_trap(300.0), {1e30, 0.0});
  EXPECT_NEAR(norm_sq(state), 1.0, 1e-12);
  EXPECT_EQ(state.norm_const(), 0.0);
  EXPECT_TRUE(std::isfinite(state.log_norm_const()));
}

TEST(CoherentState, RejectsBadLabels) {
  const auto trap = mpt::new_trap(10.0);
  EXPECT_THROW(mpt::coherent_state(trap, {std::nan(""), 0.0}), std::domain_error);
  EXPECT_THROW(mpt::coherent_state(trap, {0.0, std::numeric_limits<double>::infinity()}), std::domain_error);
  EXPECT_THROW(mpt::coherent_state(trap, {1e101, 0.0}), std::overflow_error);
}

TEST(CoherentState, DeepTrapTruncatesNegligibleTail) {
  const auto trap = mpt::new_trap(1e6);
  const auto state = mpt::coherent_state(trap, {2.0, 0.0});
  EXPECT_FALSE(state.full_support());
  EXPECT_LT(state.support(), 100u);
  EXPECT_NEAR(norm_sq(state), 1.0, 1e-14);
  EXPECT_THROW(mpt::annihilation_residual(state), std::invalid_argument);
}

TEST(Moments, MatchFrozenValues) {
  struct Case {
    double N;
    std::complex<double> alpha;
    double mean_n, mean_n2;
    std::complex<double> a, a2;
  };
  const Case cases[] = {
      {10.0, {1.0, 1.0}, frozen::kMeanN_N10_a1p1i, frozen::kMeanN2_N10_a1p1i,
       {frozen::kReA_N10_a1p1i, frozen::kImA_N10_a1p1i}, {frozen::kReA2_N10_a1p1i, frozen::kImA2_N10_a1p1i}},
      {100.0, {3.0, 0.0}, frozen::kMeanN_N100_a3, frozen::kMeanN2_N100_a3,
       {frozen::kReA_N100_a3, frozen::kImA_N100_a3}, {frozen::kReA2_N100_a3, frozen::kImA2_N100_a3}},
      {3.0, {0.5, 0.0}, frozen::kMeanN_N3_a0p5, frozen::kMeanN2_N3_a0p5,
       {frozen::kReA_N3_a0p5, frozen::kImA_N3_a0p5}, {frozen::kReA2_N3_a0p5, frozen::kImA2_N3_a0p5}},
  };
  for (const auto& c : cases) {
    const auto state = mpt::coherent_state(mpt::new_trap(c.N), c.alpha);
    const auto nm = mpt::number_moments(state);
    const auto lm = mpt::ladder_moments(state);
    EXPECT_NEAR(nm.mean_n, c.mean_n, 1e-13 * std::max(1.0, c.mean_n)) << c.N;
    EXPECT_NEAR(nm.mean_n2, c.mean_n2, 1e-13 * std::max(1.0, c.mean_n2)) << c.N;
    EXPECT_NEAR(std::abs(lm.mean_a - c.a), 0.0, 1e-13) << c.N;
    EXPECT_NEAR(std::abs(lm.mean_a2 - c.a2), 0.0, 1e-12) << c.N;
    EXPECT_DOUBLE_EQ(lm.mean_adag_a, nm.mean_n);
  }
}

TEST(Oracle, PropertySeriesMatchDenseContraction) {
  gen::Source source(53);
  for (int trial = 0; trial < 60; ++trial) {
    const auto trap = mpt::new_trap(source.log_uniform(1.0, 300.0));
    const auto state = mpt::coherent_state(trap, source.alpha(8.0));
    const auto boson = mpt::build_boson_ops(trap.num_bound());
    const auto nm = mpt::number_moments(state);
    const auto lm = mpt::ladder_moments(state);
    EXPECT_NEAR(std::abs(mpt::oracle_expectation(state, boson.n_hat) - nm.mean_n), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(mpt::oracle_expectation(state, boson.n_hat * boson.n_hat) - nm.mean_n2), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(mpt::oracle_expectation(state, boson.a) - lm.mean_a), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(mpt::oracle_expectation(state, boson.a * boson.a) - lm.mean_a2), 0.0, 1e-10);
  }
}

TEST(Oracle, RejectsMismatchedOperator) {
  const auto state = mpt::coherent_state(mpt::new_trap(10.0), {1.0, 0.0});
  EXPECT_THROW(mpt::oracle_expectation(state, mpt::OperatorMatrix::identity(4)), std::invalid_argument);
}

TEST(Annihilation, DefectLivesOnTopLevel) {
  gen::Source source(54);
  for (int trial = 0; trial < 100; ++trial) {
    const auto trap = mpt::new_trap(source.log_uniform(0.5, 400.0));
    const auto state = mpt::coherent_state(trap, source.alpha(6.0));
    const auto r = mpt::annihilation_residual(state);
    EXPECT_LT(r.closed_form_mismatch, 1e-12) << "N=" << trap.depth_parameter() << " alpha=" << state.alpha();
    EXPECT_NEAR(r.norm, std::abs(r.closed_form_top_amplitude), 1e-12);
  }
}

TEST(Annihilation, TopAmplitudeFormula) {
  const auto trap = mpt::new_trap(10.0);
  const auto state = mpt::coherent_state(trap, {2.0, 0.0});
  const auto r = mpt::annihilation_residual(state);
  // -alpha c_top for a state that stops at the top level.
  EXPECT_NEAR(r.closed_form_top_amplitude.real(), -2.0 * frozen::kCoeffMag_N10_a2[4], 1e-14);
  EXPECT_NEAR(r.closed_form_top_amplitude.imag(), 0.0, 1e-15);
}

TEST(CoherentState, SingleLevelTrap) {
  const auto trap = mpt::new_trap(1.0);
  const auto state = mpt::coherent_state(trap, {1.0, 0.0});
  ASSERT_EQ(state.support(), 1u);
  EXPECT_NEAR(std::abs(state.coeffs()[0]), 1.0, 1e-15);
  const auto r = mpt::annihilation_residual(state);
  // Only the ground state: A|0> = 0, so the defect is -alpha c_0 = -C_f alpha / f(0).
  const double expected = -state.norm_const() * 1.0 / std::sqrt(mpt::f_squared(trap, 0));
  EXPECT_NEAR(r.closed_form_top_amplitude.real(), expected, 1e-15);
  EXPECT_LT(r.closed_form_mismatch, 1e-15);
  const auto nm = mpt::number_moments(state);
  const auto lm = mpt::ladder_moments(state);
  EXPECT_EQ(nm.mean_n, 0.0);
  EXPECT_EQ(nm.mean_n2, 0.0);
  EXPECT_EQ(lm.mean_a, 0.0);
  EXPECT_EQ(lm.mean_a2, 0.0);
}

TEST(CoherentState, VacuumHasNoDefectOrMoments) {
  const auto state = mpt::coherent_state(mpt::new_trap(10.0), {0.0, 0.0});
  EXPECT_EQ(mpt::annihilation_residual(state).norm, 0.0);
  EXPECT_EQ(mpt::number_moments(state).mean_n, 0.0);
  EXPECT_EQ(mpt::ladder_moments(state).mean_a2, 0.0);
  const auto boson = mpt::build_boson_ops(5);
  EXPECT_EQ(mpt::oracle_expectation(state, boson.n_hat), 0.0);
}

TEST(Oracle, IdentityAndHamiltonian) {
  const auto trap = mpt::new_trap(10.0);
  const auto state = mpt::coherent_state(trap, {2.0, 0.0});
  EXPECT_NEAR(std::abs(mpt::oracle_expectation(state, mpt::OperatorMatrix::identity(5)) - 1.0), 0.0, 1e-15);
  const auto h = mpt::hamiltonian(trap, {mpt::Representation::Ghost, std::nullopt});
  double weighted = 0.0;
  for (std::size_t n = 0; n < 5; ++n) weighted += mpt::energy_deformed_form(trap, n) * std::norm(state.coeffs()[n]);
  EXPECT_NEAR(mpt::oracle_expectation(state, h).real(), weighted, 1e-14);
}

TEST(Moments, PropertyPhaseCovariance) {
  gen::Source source(55);
  for (int trial = 0; trial < 100; ++trial) {
    const auto trap = mpt::new_trap(source.log_uniform(0.5, 1e3));
    const double r = source.uniform(0.0, 7.0);
    const double theta = source.uniform(-std::numbers::pi, std::numbers::pi);
    const auto base = mpt::ladder_moments(mpt::coherent_state(trap, {r, 0.0}));
    const auto turned = mpt::ladder_moments(mpt::coherent_state(trap, std::polar(r, theta)));
    EXPECT_NEAR(std::abs(turned.mean_a - std::polar(1.0, theta) * base.mean_a), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(turned.mean_a2 - std::polar(1.0, 2.0 * theta) * base.mean_a2), 0.0, 1e-12);
  }
}

TEST(CoherentState, GlauberLimitInDeepTrap) {
  const auto state = mpt::coherent_state(mpt::new_trap(1e6), {2.0, 0.0});
  double norm = 0.0;
  std::vector<double> glauber;
  for (std::size_t n = 0; n < state.support(); ++n) {
    glauber.push_back(std::exp(-2.0 + n * std::log(2.0) - 0.5 * std::lgamma(n + 1.0)));
    norm += glauber.back() * glauber.back();
  }
  for (std::size_t n = 0; n < state.support(); ++n) {
    EXPECT_NEAR(state.coeffs()[n].real(), glauber[n] / std::sqrt(norm), 1e-4) << n;
  }
}
