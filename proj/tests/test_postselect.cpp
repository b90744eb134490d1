#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "linopt/circuits.hpp"

using namespace linopt;

namespace {

FockState pair_input(cplx c00, cplx c01, cplx c10, cplx c11) {
  FockState s(std::set<std::string>{"A_in", "B_in"});
  auto add = [&](int p, int pp, cplx c) {
    if (std::abs(c) == 0.0) return;
    Occupation occ;
    occ[ModeSlot{"A_in", p}] = 1;
    occ[ModeSlot{"B_in", pp}] = 1;
    s.add_term(occ, c);
  };
  add(kPolPsi, kPolPsi, c00);
  add(kPolPsi, kPolPerp, c01);
  add(kPolPerp, kPolPsi, c10);
  add(kPolPerp, kPolPerp, c11);
  return s.normalized();
}

// symmetric/antisymmetric weights of a two-photon polarization input
std::pair<double, double> projector_weights(cplx c00, cplx c01, cplx c10, cplx c11) {
  double n2 = std::norm(c00) + std::norm(c01) + std::norm(c10) + std::norm(c11);
  double anti = std::norm((c01 - c10) / std::numbers::sqrt2) / n2;
  return {1.0 - anti, anti};
}

}  // namespace

TEST_CASE("Fig. 1 heralding probabilities") {
  const double eta_opt = std::sqrt(2.0 / 3.0);

  SUBCASE("|psi>|psi_perp> at the optimal attenuation gives 5/48") {
    auto result = run_partial_symmetrizer(pair_input(0, 1, 0, 0), eta_opt);
    CHECK(result.probability == doctest::Approx(5.0 / 48.0).epsilon(1e-13));
  }

  SUBCASE("singlet input gives eta^2/8 for any eta") {
    FockState singlet = pair_input(0, 1.0 / std::numbers::sqrt2,
                                   -1.0 / std::numbers::sqrt2, 0);
    for (double eta : {0.0, 0.25, eta_opt, 1.0}) {
      auto result = run(build_partial_symmetrizer(eta), singlet);
      CHECK(result.probability == doctest::Approx(eta * eta / 8.0).epsilon(1e-12));
    }
  }

  SUBCASE("pattern demanding more photons than present gives probability 0") {
    auto result = postselect(pair_input(0, 1, 0, 0), {{"A_in", 3}});
    CHECK(result.probability == 0.0);
    CHECK(result.empty);
    CHECK(result.conditional.empty());
  }

  SUBCASE("constraint on an unknown mode is rejected") {
    CHECK_THROWS_AS((void)postselect(pair_input(0, 1, 0, 0), {{"nowhere", 1}}),
                    std::invalid_argument);
  }
}

TEST_CASE("success_probability_formula") {
  CHECK(success_probability_formula(0.5, 0.5, std::sqrt(2.0 / 3.0)) ==
        doctest::Approx(5.0 / 48.0).epsilon(1e-14));
  CHECK(success_probability_formula(1.0, 0.0, 0.42) ==
        doctest::Approx(1.0 / 8.0).epsilon(1e-14));
  CHECK(success_probability_formula(0.0, 1.0, 0.0) == doctest::Approx(0.0));

  CHECK_THROWS_AS((void)success_probability_formula(0.7, 0.7, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)success_probability_formula(1.2, -0.2, 0.5),
                  std::invalid_argument);
}

TEST_CASE("postselect is idempotent") {
  auto first = run(build_partial_symmetrizer(0.4), pair_input(0.3, 0.6, -0.2, 0.1));
  REQUIRE_FALSE(first.empty);
  PostSelectionPattern pattern = {{"A_out", 1}, {"B_out", 1}};
  auto again = postselect(first.conditional, pattern);
  CHECK(again.probability == doctest::Approx(1.0).epsilon(1e-13));
  FockState d = again.conditional;
  d.scale(-1.0);
  d += first.conditional;
  CHECK(d.squared_norm() < 1e-24);
}

TEST_CASE("complete pattern set: probabilities sum to 1 iff evolution is unitary") {
  FockState in = pair_input(0.2, 0.7, -0.5, 0.4);
  auto total_over_patterns = [&](const FockState& evolved) {
    double total = 0.0;
    // all ways to distribute 2 photons over the two output modes
    for (int nA = 0; nA <= 2; ++nA)
      total += postselect(evolved, {{"A", nA}, {"B", 2 - nA}}).probability;
    return total;
  };

  FockState unitary_evolved = apply_map(in, compose(
      balanced_beam_splitter("A_in", "B_in", "A", "B"), phase_shifter("B", 0.3)));
  CHECK(total_over_patterns(unitary_evolved) == doctest::Approx(1.0).epsilon(1e-13));

  FockState lossy_evolved = apply_map(
      in, compose(balanced_beam_splitter("A_in", "B_in", "A", "B"),
                  attenuator("B", 0.6)));
  CHECK(total_over_patterns(lossy_evolved) < 1.0 - 1e-6);
}

TEST_CASE("circuit probability equals the closed form for every input and eta") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    cplx c00{coeff(rng), coeff(rng)}, c01{coeff(rng), coeff(rng)};
    cplx c10{coeff(rng), coeff(rng)}, c11{coeff(rng), coeff(rng)};
    auto [w_plus, w_minus] = projector_weights(c00, c01, c10, c11);
    FockState in = pair_input(c00, c01, c10, c11);
    for (double eta : {0.0, 0.3, std::sqrt(2.0 / 3.0), 1.0}) {
      auto result = run(build_partial_symmetrizer(eta), in);
      CHECK(result.probability ==
            doctest::Approx(success_probability_formula(w_plus, w_minus, eta))
                .epsilon(1e-12));
    }
  }
}
