#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "linopt/transform.hpp"

using namespace linopt;

namespace {

FockState diff(FockState a, const FockState& b) {
  a.scale(-1.0);
  a += b;
  return a;
}

// Independent expansion oracle: a state is a list of (coefficient, photon
// list); substitution branches photon by photon, with no canonical monomial
// bookkeeping. Amplitudes are recovered at the end by counting multiplicities.
struct BruteTerm {
  cplx coeff;
  std::vector<ModeSlot> photons;  // unsorted list, one entry per photon
};

std::vector<BruteTerm> brute_substitute(const std::vector<BruteTerm>& terms,
                                        const LinearModeMap& map) {
  std::vector<BruteTerm> out;
  for (const auto& term : terms) {
    std::vector<BruteTerm> partial{{term.coeff, {}}};
    for (const auto& photon : term.photons) {
      std::vector<BruteTerm> next;
      for (const auto& p : partial) {
        for (const auto& [outLabel, c] : map.column(photon.spatial)) {
          BruteTerm t = p;
          t.coeff *= c;
          t.photons.push_back(ModeSlot{outLabel, photon.pol});
          next.push_back(std::move(t));
        }
      }
      partial = std::move(next);
    }
    out.insert(out.end(), partial.begin(), partial.end());
  }
  return out;
}

FockState brute_to_state(const std::vector<BruteTerm>& terms,
                         std::set<std::string> space) {
  FockState s(std::move(space));
  for (const auto& term : terms) {
    Occupation occ;
    for (const auto& photon : term.photons) occ[photon] += 1;
    s.add_term(occ, term.coeff * occupation_norm_factor(occ));
  }
  s.prune();
  return s;
}

FockState singlet(const std::string& a = "A", const std::string& b = "B") {
  OperatorPolynomial p;
  p.add_term({{ModeSlot{a, kPolPsi}, 1}, {ModeSlot{b, kPolPerp}, 1}},
             1.0 / std::numbers::sqrt2);
  p.add_term({{ModeSlot{a, kPolPerp}, 1}, {ModeSlot{b, kPolPsi}, 1}},
             -1.0 / std::numbers::sqrt2);
  return monomial_to_state(p, {a, b});
}

std::mt19937_64 rng(77);

PolarizationRotation random_rotation() {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  double th = angle(rng) / 2.0, ph = angle(rng), ch = angle(rng);
  return PolarizationRotation{
      {{std::exp(cplx{0.0, ch}) * std::cos(th), -std::exp(cplx{0.0, -ph}) * std::sin(th)},
       {std::exp(cplx{0.0, ph}) * std::sin(th),
        std::exp(cplx{0.0, -ch}) * std::cos(th)}}};
}

}  // namespace

TEST_CASE("Hong-Ou-Mandel bunching on a balanced beam splitter") {
  LinearModeMap bs = balanced_beam_splitter("A", "B", "A", "B");
  FockState in = tensor(single_photon("A", kPolPsi), single_photon("B", kPolPsi));
  FockState out = apply_map(in, bs);

  // (|2,0> - |0,2>)/sqrt(2)
  CHECK(out.amplitude({{ModeSlot{"A", kPolPsi}, 2}}).real() ==
        doctest::Approx(1.0 / std::numbers::sqrt2));
  CHECK(out.amplitude({{ModeSlot{"B", kPolPsi}, 2}}).real() ==
        doctest::Approx(-1.0 / std::numbers::sqrt2));
  // coincidence amplitude vanishes
  CHECK(std::abs(out.amplitude(
            {{ModeSlot{"A", kPolPsi}, 1}, {ModeSlot{"B", kPolPsi}, 1}})) < 1e-14);
}

TEST_CASE("singlet keeps its polarization state in the coincidence part") {
  LinearModeMap bs = balanced_beam_splitter("A", "B", "A", "B");
  FockState out = apply_map(singlet(), bs);
  // project on one photon per spatial mode by hand
  FockState coincidence(out.mode_space());
  for (const auto& [occ, amp] : out.amplitudes()) {
    if (photons_in_spatial_mode(occ, "A") == 1 &&
        photons_in_spatial_mode(occ, "B") == 1)
      coincidence.add_term(occ, amp);
  }
  double overlap = std::abs(inner_product(singlet(), coincidence));
  CHECK(overlap == doctest::Approx(std::sqrt(coincidence.squared_norm())).epsilon(1e-12));
  CHECK(coincidence.squared_norm() > 0.0);
}

TEST_CASE("vacuum maps to vacuum") {
  LinearModeMap bs = balanced_beam_splitter("A", "B", "A", "B");
  FockState vac = FockState::vacuum({"A", "B"});
  FockState out = apply_map(vac, bs);
  CHECK(out.amplitude({}).real() == doctest::Approx(1.0));
  CHECK(out.amplitudes().size() == 1);
}

TEST_CASE("attenuator") {
  SUBCASE("|n> picks up eta^n") {
    FockState in(std::set<std::string>{"m"});
    in.add_term({{ModeSlot{"m", kPolPsi}, 3}}, 1.0);
    FockState out = apply_map(in, attenuator("m", 0.5));
    CHECK(out.amplitude({{ModeSlot{"m", kPolPsi}, 3}}).real() ==
          doctest::Approx(0.125));
  }
  SUBCASE("eta = 1 is the identity") {
    FockState in = single_photon("m", kPolPerp);
    FockState out = apply_map(in, attenuator("m", 1.0));
    CHECK(diff(out, in).squared_norm() < 1e-28);
  }
  SUBCASE("eta = 0 blocks the photon") {
    FockState out = apply_map(single_photon("m", kPolPsi), attenuator("m", 0.0));
    CHECK(out.empty());
  }
  SUBCASE("transmittance outside [0,1] is rejected") {
    CHECK_THROWS_AS((void)attenuator("m", 1.5), std::invalid_argument);
    CHECK_THROWS_AS((void)attenuator("m", -0.1), std::invalid_argument);
  }
  SUBCASE("duplicate beam splitter ports are rejected") {
    CHECK_THROWS_AS((void)balanced_beam_splitter("A", "A", "B", "C"),
                    std::invalid_argument);
  }
}

TEST_CASE("phase shifter") {
  FockState in = single_photon("m", kPolPsi);
  CHECK(diff(apply_map(in, phase_shifter("m", 0.0)), in).squared_norm() < 1e-28);
  FockState flipped = apply_map(in, phase_shifter("m", std::numbers::pi));
  CHECK(std::abs(flipped.amplitude({{ModeSlot{"m", kPolPsi}, 1}}) + cplx{1.0, 0.0}) <
        1e-14);
  CHECK(phase_shifter("m", 1.234).is_unitary());
}

TEST_CASE("unitarity: flagged maps satisfy T^+T = I and preserve norm") {
  LinearModeMap bs = balanced_beam_splitter("A", "B", "C", "D");
  CHECK(bs.is_unitary());
  CHECK_FALSE(attenuator("A", 0.7).is_unitary());

  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    FockState s(std::set<std::string>{"A", "B"});
    for (int t = 0; t < 5; ++t) {
      Occupation occ;
      occ[ModeSlot{"A", t % 2}] = 1 + (t % 3);
      occ[ModeSlot{"B", kPolPsi}] = t % 2;
      s.add_term(occ, cplx{coeff(rng), coeff(rng)});
    }
    s = s.normalized();
    CHECK(apply_map(s, bs).squared_norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("apply_map matches the independent brute-force expansion oracle") {
  // Eq.-(8)-type 4-photon input through the two-beam-splitter substitution
  LinearModeMap bs1 = balanced_beam_splitter("A", "C", "A", "C");
  LinearModeMap bs2 = balanced_beam_splitter("B", "D", "B", "D");
  LinearModeMap both = compose(bs1, bs2);

  const double eta = std::sqrt(2.0 / 3.0);
  OperatorPolynomial p;  // singlet(A,B) x partially symmetrized pair(C,D)
  auto slot = [](const char* m, int pol) { return ModeSlot{m, pol}; };
  for (auto [sa, sb, s1] : {std::tuple{kPolPsi, kPolPerp, 1.0},
                            std::tuple{kPolPerp, kPolPsi, -1.0}}) {
    p.add_term({{slot("A", sa), 1}, {slot("B", sb), 1}, {slot("C", kPolPsi), 1},
                {slot("D", kPolPerp), 1}},
               s1 * (1.0 + eta) / (2.0 * std::numbers::sqrt2));
    p.add_term({{slot("A", sa), 1}, {slot("B", sb), 1}, {slot("C", kPolPerp), 1},
                {slot("D", kPolPsi), 1}},
               s1 * (1.0 - eta) / (2.0 * std::numbers::sqrt2));
  }
  FockState in = monomial_to_state(p, {"A", "B", "C", "D"});
  FockState out = apply_map(in, both);

  std::vector<BruteTerm> brute;
  for (const auto& [exponents, coeff] : p.terms) {
    BruteTerm t{coeff, {}};
    for (const auto& [s, n] : exponents)
      for (int k = 0; k < n; ++k) t.photons.push_back(s);
    brute.push_back(std::move(t));
  }
  FockState expected =
      brute_to_state(brute_substitute(brute_substitute(brute, bs1), bs2),
                     {"A", "B", "C", "D"});
  CHECK(std::sqrt(diff(out, expected).squared_norm()) < 1e-13);
}

TEST_CASE("composition") {
  SUBCASE("identity is neutral") {
    LinearModeMap bs = balanced_beam_splitter("A", "B", "C", "D");
    FockState in = tensor(single_photon("A", kPolPsi), single_photon("B", kPolPerp));
    CHECK(diff(apply_map(in, compose(LinearModeMap::identity(), bs)),
               apply_map(in, bs))
              .squared_norm() < 1e-28);
  }
  SUBCASE("attenuators multiply") {
    LinearModeMap combined = compose(attenuator("m", 0.8), attenuator("m", 0.5));
    FockState in = single_photon("m", kPolPsi);
    CHECK(diff(apply_map(in, combined), apply_map(in, attenuator("m", 0.4)))
              .squared_norm() < 1e-28);
  }
  SUBCASE("pipeline equals the composed map, and composition associates") {
    std::vector<LinearModeMap> chain = {
        balanced_beam_splitter("A_in", "B_in", "u", "l"),
        balanced_beam_splitter("u", "anc", "A_out", "t"),
        attenuator("l", 0.6),
        balanced_beam_splitter("t", "l", "y", "B_out"),
    };
    FockState s = tensor(single_photon("A_in", kPolPsi),
                         single_photon("B_in", kPolPerp));
    FockState stepwise = s;
    LinearModeMap composed = LinearModeMap::identity();
    for (const auto& m : chain) {
      stepwise = apply_map(stepwise, m);
      composed = compose(composed, m);
    }
    FockState oneshot = apply_map(s, composed);
    CHECK(std::sqrt(diff(oneshot, stepwise).squared_norm()) < 1e-13);

    LinearModeMap left = compose(compose(chain[0], chain[1]), chain[2]);
    LinearModeMap right = compose(chain[0], compose(chain[1], chain[2]));
    CHECK(std::sqrt(diff(apply_map(s, left), apply_map(s, right)).squared_norm()) <
          1e-13);
  }
}

TEST_CASE("polarization covariance: U ox ... ox U commutes with every element") {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    PolarizationRotation u = random_rotation();
    // random 3-photon state over two spatial modes
    FockState s(std::set<std::string>{"A", "B"});
    std::uniform_int_distribution<int> pol(0, 1);
    for (int t = 0; t < 6; ++t) {
      Occupation occ;
      occ[ModeSlot{"A", pol(rng)}] += 1;
      occ[ModeSlot{"A", pol(rng)}] += 1;
      occ[ModeSlot{"B", pol(rng)}] += 1;
      s.add_term(occ, cplx{coeff(rng), coeff(rng)});
    }
    s = s.normalized();
    for (const LinearModeMap& element :
         {balanced_beam_splitter("A", "B", "A", "B"), attenuator("A", 0.55),
          phase_shifter("B", 0.9)}) {
      FockState a = rotate_polarization(apply_map(s, element), u);
      FockState b = apply_map(rotate_polarization(s, u), element);
      CHECK(std::sqrt(diff(a, b).squared_norm()) < 1e-10);
    }
  }
}

TEST_CASE("attenuator equals the loss-mode beam splitter model under post-selection") {
  const double eta = 0.37;
  // beam splitter of transmittance eta into an explicit loss mode
  LinearModeMap lossy = LinearModeMap::from_columns(
      {{"m",
        {{"m", cplx{eta, 0.0}}, {"loss", cplx{std::sqrt(1.0 - eta * eta), 0.0}}}}});
  CHECK(lossy.is_unitary());

  FockState in(std::set<std::string>{"m"});
  in.add_term({{ModeSlot{"m", kPolPsi}, 2}, {ModeSlot{"m", kPolPerp}, 1}}, 0.8);
  in.add_term({{ModeSlot{"m", kPolPsi}, 1}}, 0.6);

  FockState direct = apply_map(in, attenuator("m", eta));
  FockState modeled = apply_map(in, lossy);
  // keep only vacuum in the loss mode, then forget it
  FockState kept(std::set<std::string>{"m"});
  for (const auto& [occ, amp] : modeled.amplitudes()) {
    if (photons_in_spatial_mode(occ, "loss") == 0) kept.add_term(occ, amp);
  }
  CHECK(std::sqrt(diff(direct, kept).squared_norm()) < 1e-15);
}
