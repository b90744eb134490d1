#pragma once

#include <functional>

#include "linopt/circuits.hpp"

namespace linopt {

// ---------------------------------------------------------------------------
// Closed-form cloning formulas
// ---------------------------------------------------------------------------

/// Coefficient of the covariant M-clone output state:
/// alpha_{j,M} = (-1)^j / sqrt(2(M+1)) * [1 + sqrt(3)(M-2j)/sqrt(M(M+2))].
inline double alpha(int j, int M) {
  if (M < 1) throw std::invalid_argument("M must be >= 1");
  if (j < 0 || j > M) throw std::invalid_argument("j out of range");
  double sign = (j % 2 == 0) ? 1.0 : -1.0;
  double m = static_cast<double>(M);
  return sign / std::sqrt(2.0 * (m + 1.0)) *
         (1.0 + std::sqrt(3.0) * (m - 2.0 * j) / std::sqrt(m * (m + 2.0)));
}

/// Single-clone fidelity of the two-clone machine as a function of
/// q = (1-eta)/(1+eta): (q^2 - 2q + 9) / (2(5q^2 - 2q + 5)).
inline double fidelity_F2(double q) {
  return (q * q - 2.0 * q + 9.0) / (2.0 * (5.0 * q * q - 2.0 * q + 5.0));
}

/// Optimal symmetrization parameter:
/// q_opt(M) = (sqrt(3M) - sqrt(M+2)) / (sqrt(3M) + sqrt(M+2)).
inline double optimal_q(int M) {
  if (M < 2) throw std::invalid_argument("M must be >= 2");
  double m = static_cast<double>(M);
  double a = std::sqrt(3.0 * m), b = std::sqrt(m + 2.0);
  return (a - b) / (a + b);
}

/// Fidelity of the optimal M-clone transformation:
/// F(M) = (1 + sqrt((M+2)/(3M))) / 2.
inline double fidelity_Fperp(int M) {
  if (M < 1) throw std::invalid_argument("M must be >= 1");
  double m = static_cast<double>(M);
  return 0.5 * (1.0 + std::sqrt((m + 2.0) / (3.0 * m)));
}

/// Golden-section search for the maximum of f on [a, b] (f unimodal).
inline double golden_section_maximize(const std::function<double(double)>& f,
                                      double a, double b, double tol = 1e-12) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Numerical argmax of q -> fidelity over [0, 1]; cross-check for the
/// closed-form optimum. Golden section locates the maximum down to the
/// flatness noise floor; a parabolic fit through three points at a wider
/// spacing then refines the argmax below 1e-9.
inline double optimal_q_numeric(const std::function<double(double)>& fidelity_of_q,
                                double fit_spacing = 1e-4) {
  double x = golden_section_maximize(fidelity_of_q, 0.0, 1.0, 1e-6);
  auto refine = [&](double h) {
    double f_minus = fidelity_of_q(x - h);
    double f_0 = fidelity_of_q(x);
    double f_plus = fidelity_of_q(x + h);
    double denom = f_minus - 2.0 * f_0 + f_plus;
    if (std::abs(denom) < 1e-300) return x;
    return x + 0.5 * h * (f_minus - f_plus) / denom;
  };
  // Richardson extrapolation cancels the O(h^2) bias of the parabolic fit
  double x1 = refine(fit_spacing);
  double x2 = refine(2.0 * fit_spacing);
  return (4.0 * x1 - x2) / 3.0;
}

// ---------------------------------------------------------------------------
// Covariant target state
// ---------------------------------------------------------------------------

struct CloningTarget {
  int M{};
  std::vector<double> alphas;  ///< alpha_{0..M}
  FockState target;            ///< normalized covariant output on two spatial modes
};

/// sum_j alpha_{j,M} |(M-j)psi, j psi_perp>_A |j psi, (M-j)psi_perp>_B.
inline CloningTarget target_state(int M, const std::string& mode_a = "A_out",
                                  const std::string& mode_b = "B_out",
                                  int m_cap = 12) {
  if (M < 1) throw std::invalid_argument("M must be >= 1");
  if (M > m_cap) throw std::invalid_argument("M exceeds the configured cap");
  CloningTarget t;
  t.M = M;
  FockState state(std::set<std::string>{mode_a, mode_b});
  for (int j = 0; j <= M; ++j) {
    double a = alpha(j, M);
    t.alphas.push_back(a);
    Occupation occ;
    if (M - j > 0) occ[ModeSlot{mode_a, kPolPsi}] = M - j;
    if (j > 0) occ[ModeSlot{mode_a, kPolPerp}] = j;
    if (j > 0) occ[ModeSlot{mode_b, kPolPsi}] = j;
    if (M - j > 0) occ[ModeSlot{mode_b, kPolPerp}] = M - j;
    state.add_term(occ, cplx{a, 0.0});
  }
  t.target = state.normalized();
  return t;
}

// ---------------------------------------------------------------------------
// Two-qubit polarization-space reference matrices
// ---------------------------------------------------------------------------

/// 4x4 matrices on the two-photon polarization space, basis order
/// |psi psi>, |psi perp>, |perp psi>, |perp perp>.
using Mat4 = std::array<std::array<cplx, 4>, 4>;

/// Pi_- = |Psi^-><Psi^-|, Pi_+ = I - Pi_-.
inline std::pair<Mat4, Mat4> two_qubit_projectors() {
  Mat4 pi_minus{}, pi_plus{};
  // |Psi^-> = (|01> - |10>)/sqrt(2) over basis indices 1 and 2
  pi_minus[1][1] = 0.5;
  pi_minus[2][2] = 0.5;
  pi_minus[1][2] = -0.5;
  pi_minus[2][1] = -0.5;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j)
      pi_plus[i][j] = (i == j ? cplx{1.0, 0.0} : cplx{}) - pi_minus[i][j];
  }
  return {pi_plus, pi_minus};
}

/// (Pi_+ + eta Pi_-) / (2 sqrt 2) — the expected Fig. 1 conditional map.
inline Mat4 expected_symmetrizer_map(cplx eta) {
  auto [pi_plus, pi_minus] = two_qubit_projectors();
  Mat4 m{};
  const double s = 1.0 / (2.0 * std::numbers::sqrt2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = s * (pi_plus[i][j] + eta * pi_minus[i][j]);
  return m;
}

/// Reconstructs the conditional two-qubit map of a Fig. 1-type circuit from
/// the four polarization basis inputs, keeping the unnormalized projected
/// amplitudes (so the overall 1/(2 sqrt 2) scale is visible).
inline Mat4 reconstruct_conditional_map(const Circuit& circuit) {
  Mat4 m{};
  for (int col = 0; col < 4; ++col) {
    int p = col >> 1, pp = col & 1;
    FockState input = tensor(single_photon("A_in", p), single_photon("B_in", pp));
    FockState projected = run_projected(circuit, input);
    for (int row = 0; row < 4; ++row) {
      int r = row >> 1, rr = row & 1;
      Occupation occ;
      occ[ModeSlot{"A_out", r}] += 1;
      occ[ModeSlot{"B_out", rr}] += 1;
      m[row][col] = projected.amplitude(occ);
    }
  }
  return m;
}

inline double max_abs_difference(const Mat4& a, const Mat4& b) {
  double d = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) d = std::max(d, std::abs(a[i][j] - b[i][j]));
  return d;
}

// ---------------------------------------------------------------------------
// Parametric-amplifier model (factorized unitary)
// ---------------------------------------------------------------------------

/// Type-II down-conversion amplifier with gain g, lambda = tanh(g), acting on
/// the four modes (A,psi), (A,perp), (B,psi), (B,perp) truncated at a total
/// photon number.
struct AmplifierModel {
  double gain{};
  double lambda{};
  int truncation{12};

  static AmplifierModel from_gain(double g, int truncation = 12) {
    if (g < 0.0) throw std::invalid_argument("gain must be >= 0");
    return AmplifierModel{g, std::tanh(g), truncation};
  }
  static AmplifierModel from_lambda(double lambda, int truncation = 12) {
    if (lambda < 0.0 || lambda >= 1.0)
      throw std::invalid_argument("lambda must be in [0,1)");
    return AmplifierModel{std::atanh(lambda), lambda, truncation};
  }
};

/// e^{-iH}|psi>_A|psi_perp>_B via the factorized form
/// e^{lambda X} (1-lambda^2)^{n_tot/2+1} e^{-lambda X^+}.
/// e^{-lambda X^+} terminates after finitely many terms; e^{lambda X} is cut
/// at the photon-number truncation. Amplitudes below the cap are exact: X
/// only raises the photon number, so dropped terms never feed back.
inline FockState amplifier_evolve(const AmplifierModel& model,
                                  const std::string& mode_a = "A",
                                  const std::string& mode_b = "B") {
  if (model.truncation < 2) throw std::invalid_argument("truncation too small");
  const OperatorPolynomial x = pair_creation_operator(mode_a, mode_b);
  FockState state = tensor(polarization_qubit(mode_a, 1.0, 0.0),
                           polarization_qubit(mode_b, 0.0, 1.0));

  // e^{-lambda X^+}
  FockState acc = state;
  FockState term = state;
  for (int k = 1; !term.empty(); ++k) {
    term = apply_annihilation(x, term);
    term.scale(cplx{-model.lambda / k, 0.0});
    acc += term;
  }

  // (1 - lambda^2)^{n_tot/2 + 1}
  double base = 1.0 - model.lambda * model.lambda;
  FockState weighted(acc.mode_space());
  for (const auto& [occ, amp] : acc.amplitudes())
    weighted.add_term(occ, amp * std::pow(base, total_photons(occ) / 2.0 + 1.0));

  // e^{lambda X}, truncated at the photon cap
  FockState out = weighted;
  term = weighted;
  for (int k = 1; !term.empty(); ++k) {
    term = apply_creation(x, term);
    term.scale(cplx{model.lambda / k, 0.0});
    FockState capped(term.mode_space());
    for (const auto& [occ, amp] : term.amplitudes())
      if (total_photons(occ) <= model.truncation) capped.add_term(occ, amp);
    term = capped;
    out += term;
  }
  return out;
}

/// Least-squares fit of a post-selected amplifier state against the
/// X^{M-1}(a^+_psi b^+_perp + q a^+_perp b^+_psi)|0> form.
struct QFit {
  double q{};
  double residual{};  ///< relative: ||state - fit|| / ||state||
};

inline QFit fit_q(const FockState& state, int M, const std::string& mode_a = "A",
                  const std::string& mode_b = "B") {
  if (state.squared_norm() <= 0.0) throw std::domain_error("empty post-selection");
  OperatorPolynomial xm = poly_pow(pair_creation_operator(mode_a, mode_b), M - 1);
  OperatorPolynomial t0, t1;
  t0.add_term({{ModeSlot{mode_a, kPolPsi}, 1}, {ModeSlot{mode_b, kPolPerp}, 1}},
              cplx{1.0, 0.0});
  t1.add_term({{ModeSlot{mode_a, kPolPerp}, 1}, {ModeSlot{mode_b, kPolPsi}, 1}},
              cplx{1.0, 0.0});
  FockState b0 = monomial_to_state(poly_mul(xm, t0), state.mode_space());
  FockState b1 = monomial_to_state(poly_mul(xm, t1), state.mode_space());

  // 2x2 complex normal equations over the basis {b0, b1}
  cplx g00 = inner_product(b0, b0), g01 = inner_product(b0, b1);
  cplx g10 = std::conj(g01), g11 = inner_product(b1, b1);
  cplx r0 = inner_product(b0, state), r1 = inner_product(b1, state);
  cplx det = g00 * g11 - g01 * g10;
  cplx beta0 = (g11 * r0 - g01 * r1) / det;
  cplx beta1 = (g00 * r1 - g10 * r0) / det;

  FockState fit = beta0 * b0 + beta1 * b1;
  fit.scale(cplx{-1.0, 0.0});
  fit += state;
  QFit result;
  result.residual = std::sqrt(fit.squared_norm() / state.squared_norm());
  result.q = (beta1 / beta0).real();
  return result;
}

struct AmplifierOutput {
  FockState state;  ///< conditional state with M photons in each spatial mode
  double q_fit{};
  double residual{};
  double probability{};
};

/// Evolves the amplifier, post-selects M photons in each of the signal and
/// idler modes, and fits q against the covariant M-clone form.
inline AmplifierOutput amplifier_output(const AmplifierModel& model, int M,
                                        const std::string& mode_a = "A",
                                        const std::string& mode_b = "B") {
  if (M < 1) throw std::invalid_argument("M must be >= 1");
  if (model.truncation < 2 * M) throw std::invalid_argument("truncation too small");
  FockState evolved = amplifier_evolve(model, mode_a, mode_b);
  PostSelectionResult sel = postselect(evolved, {{mode_a, M}, {mode_b, M}});
  if (sel.empty) throw std::domain_error("empty post-selection");
  QFit fit = fit_q(sel.conditional, M, mode_a, mode_b);
  return AmplifierOutput{sel.conditional, fit.q, fit.residual, sel.probability};
}

/// Finds the lambda at which the post-selected amplifier output realizes a
/// prescribed q (bisection; q grows monotonically with the gain).
inline double lambda_for_q(double q_target, int M, int truncation = 12,
                           double tol = 1e-12) {
  auto q_of = [&](double lambda) {
    return amplifier_output(AmplifierModel::from_lambda(lambda, truncation), M).q_fit;
  };
  double lo = 1e-9, hi = 0.95;
  if (q_of(lo) > q_target) return lo;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    (q_of(mid) < q_target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace linopt
