#pragma once

#include <optional>

#include "linopt/postselect.hpp"
#include "linopt/transform.hpp"

namespace linopt {

/// Ordered element list over named spatial modes, an optional resource state
/// injected on ancillary modes, and the heralding pattern.
struct Circuit {
  std::vector<LinearModeMap> elements;
  std::vector<std::string> input_modes;
  std::vector<std::string> output_modes;
  std::optional<FockState> resource;
  PostSelectionPattern pattern;
};

/// Runs the element pipeline and projects on the heralding pattern, without
/// renormalizing. The result keeps the full output mode space.
inline FockState run_projected(const Circuit& circuit, const FockState& input) {
  FockState state = circuit.resource ? tensor(input, *circuit.resource) : input;
  for (const auto& element : circuit.elements) state = apply_map(state, element);
  return project(state, circuit.pattern);
}

struct RunResult {
  FockState conditional;  ///< renormalized, restricted to the output modes
  double probability{};
  bool empty{};
};

inline RunResult run(const Circuit& circuit, const FockState& input) {
  FockState projected = run_projected(circuit, input);
  double p = projected.squared_norm();
  if (p <= 0.0)
    return RunResult{FockState(std::set<std::string>(circuit.output_modes.begin(),
                                                     circuit.output_modes.end())),
                     0.0, true};
  FockState conditional =
      projected.normalized().restricted_to(std::set<std::string>(
          circuit.output_modes.begin(), circuit.output_modes.end()));
  return RunResult{std::move(conditional), p, false};
}

namespace detail {

/// Mach-Zehnder of Fig. 1: BS1 splits the inputs into the two arms, BS2 taps
/// the upper arm into A_out, BS3 taps the lower arm, the tapped beam passes
/// through `arm_element` (attenuator or phase shifter) and recombines with
/// the BS2 reflection at BS4. B_out is taken from the minus port of BS4; this
/// fixes the one free phase so that the conditional map comes out as
/// (Pi_+ + eta Pi_-)/(2 sqrt 2) with coefficient +1.
inline Circuit symmetrizer_topology(LinearModeMap arm_element) {
  Circuit c;
  c.input_modes = {"A_in", "B_in"};
  c.output_modes = {"A_out", "B_out"};
  c.elements = {
      balanced_beam_splitter("A_in", "B_in", "sym_u", "sym_l"),
      balanced_beam_splitter("sym_u", "sym_anc2", "A_out", "sym_t"),
      balanced_beam_splitter("sym_l", "sym_anc3", "sym_w", "sym_x"),
      std::move(arm_element),
      balanced_beam_splitter("sym_t", "sym_w", "sym_y", "B_out"),
  };
  c.pattern = {{"A_out", 1}, {"B_out", 1}, {"sym_x", 0}, {"sym_y", 0}};
  return c;
}

}  // namespace detail

/// Partial symmetrization device of Fig. 1: conditional action
/// (Pi_+ + eta Pi_-)/(2 sqrt 2) on the two-photon polarization state.
inline Circuit build_partial_symmetrizer(double eta) {
  return detail::symmetrizer_topology(attenuator("sym_w", eta));
}

/// Same interferometer with the attenuator replaced by a phase shifter:
/// conditional action (Pi_+ + e^{i phi} Pi_-)/(2 sqrt 2), success
/// probability 1/8 for every input.
inline Circuit build_partial_swap(double phi) {
  return detail::symmetrizer_topology(phase_shifter("sym_w", phi));
}

/// Runs the Fig. 1 device on a two-photon input (one photon in each of A_in
/// and B_in).
inline RunResult run_partial_symmetrizer(const FockState& input, double eta) {
  for (const auto& [occ, amp] : input.amplitudes()) {
    if (photons_in_spatial_mode(occ, "A_in") != 1 ||
        photons_in_spatial_mode(occ, "B_in") != 1)
      throw std::invalid_argument(
          "partial symmetrizer expects one photon in each input mode");
  }
  return run(build_partial_symmetrizer(eta), input);
}

/// X = a^+_psi b^+_perp - a^+_perp b^+_psi on the two given spatial modes.
inline OperatorPolynomial pair_creation_operator(const std::string& mode_a,
                                                 const std::string& mode_b) {
  OperatorPolynomial x;
  x.add_term({{ModeSlot{mode_a, kPolPsi}, 1}, {ModeSlot{mode_b, kPolPerp}, 1}},
             cplx{1.0, 0.0});
  x.add_term({{ModeSlot{mode_a, kPolPerp}, 1}, {ModeSlot{mode_b, kPolPsi}, 1}},
             cplx{-1.0, 0.0});
  return x;
}

/// Normalized X^pairs |0>: pair_count 1 is the polarization singlet; in
/// general 2*pairs photons split evenly between the two spatial modes.
inline FockState epr_resource(int pair_count, const std::string& mode_a = "A",
                              const std::string& mode_b = "B") {
  if (pair_count < 1) throw std::invalid_argument("pair_count must be >= 1");
  FockState s = monomial_to_state(poly_pow(pair_creation_operator(mode_a, mode_b),
                                           pair_count),
                                  {mode_a, mode_b});
  return s.normalized();
}

/// The Hong-Ou-Mandel stage of Fig. 2b/2c: the (pre-symmetrized) pair on
/// modes C and D interferes with the 2(M-1)-photon resource on A and B;
/// success is M photons in each of A_out and B_out and none in C_out, D_out.
inline Circuit build_epr_stage(int M) {
  if (M < 2) throw std::invalid_argument("M must be >= 2");
  Circuit c;
  c.input_modes = {"C", "D"};
  c.output_modes = {"A_out", "B_out"};
  c.resource = epr_resource(M - 1);
  c.elements = {
      balanced_beam_splitter("A", "C", "A_out", "C_out"),
      balanced_beam_splitter("B", "D", "B_out", "D_out"),
  };
  c.pattern = {{"A_out", M}, {"B_out", M}, {"C_out", 0}, {"D_out", 0}};
  return c;
}

/// Full Fig. 2c chain as a conditional pipeline: the symmetrizer stage is
/// post-selected independently, then its conditional output feeds the
/// Hong-Ou-Mandel stage; probabilities multiply.
struct ClonerResult {
  FockState joint;          ///< conditional state on A_out (clones) and B_out (anticlones)
  double p_sym{};           ///< symmetrizer stage success probability
  double p_epr{};           ///< Hong-Ou-Mandel stage success probability
  double probability{};     ///< p_sym * p_epr
  double clone_fidelity{};  ///< single-clone fidelity in A_out vs |psi>
  double anticlone_fidelity{};  ///< single-anticlone fidelity in B_out vs |psi_perp>
  double q{};               ///< (1-eta)/(1+eta)
};

inline constexpr int kDefaultCloneCap = 6;

/// The assembled Fig. 2c circuit (Hong-Ou-Mandel stage; the symmetrizer is a
/// separate conditional stage, see run_cloner).
inline Circuit build_cloner(int M, double eta, int m_cap = kDefaultCloneCap) {
  if (M < 2 || M > m_cap) throw std::invalid_argument("M out of range");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must be in [0,1]");
  return build_epr_stage(M);
}

/// Clones the orthogonal pair: the input |psi>|psi_perp> (optionally prepared
/// in a rotated polarization basis) is partially symmetrized with the given
/// eta and fed to the Hong-Ou-Mandel stage with the (M-1)-pair resource.
/// Fidelities are evaluated against the same basis the input was prepared in.
inline ClonerResult run_cloner(int M, double eta,
                               const std::optional<PolarizationRotation>& basis = {},
                               int m_cap = kDefaultCloneCap) {
  Circuit stage2 = build_cloner(M, eta, m_cap);

  FockState pair = tensor(polarization_qubit("A_in", 1.0, 0.0),
                          polarization_qubit("B_in", 0.0, 1.0));
  if (basis) pair = rotate_polarization(pair, *basis);

  RunResult sym = run_partial_symmetrizer(pair, eta);
  if (sym.empty) throw std::domain_error("symmetrizer post-selection is empty");
  FockState symmetrized =
      relabel_spatial(sym.conditional, {{"A_out", "C"}, {"B_out", "D"}});

  RunResult out = run(stage2, symmetrized);
  if (out.empty) throw std::domain_error("cloner post-selection is empty");

  FockState joint = out.conditional;
  if (basis) {
    // rotate back so fidelities are read in the preparation basis
    PolarizationRotation adj{{{std::conj((*basis)[0][0]), std::conj((*basis)[1][0])},
                              {std::conj((*basis)[0][1]), std::conj((*basis)[1][1])}}};
    joint = rotate_polarization(joint, adj);
  }

  ClonerResult r;
  r.joint = joint;
  r.p_sym = sym.probability;
  r.p_epr = out.probability;
  r.probability = sym.probability * out.probability;
  r.clone_fidelity = single_photon_fidelity(joint, "A_out", kPolPsi);
  r.anticlone_fidelity = single_photon_fidelity(joint, "B_out", kPolPerp);
  r.q = (1.0 - eta) / (1.0 + eta);
  return r;
}

/// Fig. 2a sanity experiment: one photon of the singlet interferes with the
/// input photon; bunching into A_out heralds two clones, the remaining
/// singlet photon in B is the anticlone.
struct SinglePhotonClonerResult {
  FockState joint;  ///< conditional state on A_out (2 clones) and B (anticlone)
  double probability{};
  double clone_fidelity{};
  double anticlone_fidelity{};
};

inline SinglePhotonClonerResult single_photon_cloner(cplx c0, cplx c1) {
  Circuit c;
  c.input_modes = {"C"};
  c.output_modes = {"A_out", "B"};
  c.resource = epr_resource(1);
  c.elements = {balanced_beam_splitter("A", "C", "A_out", "C_out")};
  c.pattern = {{"A_out", 2}, {"C_out", 0}};

  FockState input = polarization_qubit("C", c0, c1).normalized();
  RunResult out = run(c, input);
  if (out.empty) throw std::domain_error("cloner post-selection is empty");

  // fidelity targets in the input photon's own basis
  FockState joint = out.conditional;
  if (std::abs(c1) > 0.0) {
    double n = std::sqrt(std::norm(c0) + std::norm(c1));
    cplx a = c0 / n, b = c1 / n;
    PolarizationRotation to_input_basis{{{std::conj(a), std::conj(b)},
                                         {-b, a}}};
    joint = rotate_polarization(joint, to_input_basis);
  }

  SinglePhotonClonerResult r;
  r.joint = joint;
  r.probability = out.probability;
  r.clone_fidelity = single_photon_fidelity(joint, "A_out", kPolPsi);
  r.anticlone_fidelity = single_photon_fidelity(joint, "B", kPolPerp);
  return r;
}

}  // namespace linopt
