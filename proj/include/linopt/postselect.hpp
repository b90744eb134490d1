#pragma once

#include "linopt/fock.hpp"

namespace linopt {

/// Exact total photon count per spatial mode, summed over both polarizations
/// (heralding detections are polarization-blind). Unconstrained modes may
/// carry any count.
using PostSelectionPattern = std::map<std::string, int>;

struct PostSelectionResult {
  FockState conditional;  ///< renormalized; empty when nothing matches
  double probability{};   ///< squared norm of the projected component
  bool empty{};           ///< true when the projection vanished
};

/// Projection onto the pattern, without renormalization.
inline FockState project(const FockState& state, const PostSelectionPattern& pattern) {
  for (const auto& [mode, count] : pattern) {
    if (count < 0) throw std::invalid_argument("negative photon constraint");
    if (!state.mode_space().count(mode))
      throw std::invalid_argument("post-selection constrains unknown mode: " + mode);
  }
  FockState out(state.mode_space());
  for (const auto& [occ, amp] : state.amplitudes()) {
    bool match = true;
    for (const auto& [mode, count] : pattern) {
      if (photons_in_spatial_mode(occ, mode) != count) {
        match = false;
        break;
      }
    }
    if (match) out.add_term(occ, amp);
  }
  return out;
}

/// Conditional state and success probability of the photon-number pattern.
/// The probability is reported relative to unit input norm; for an
/// unnormalized input it is the projected squared norm.
inline PostSelectionResult postselect(const FockState& state,
                                      const PostSelectionPattern& pattern) {
  FockState projected = project(state, pattern);
  double p = projected.squared_norm();
  if (p <= 0.0) return PostSelectionResult{FockState(state.mode_space()), 0.0, true};
  return PostSelectionResult{projected.normalized(), p, false};
}

/// Closed-form success probability of the symmetrizer:
/// (w_+ + eta^2 w_-)/8 with w_+- the symmetric/antisymmetric weights of the
/// input.
inline double success_probability_formula(double sym_weight, double antisym_weight,
                                          double eta) {
  auto in_range = [](double w) { return w >= -1e-10 && w <= 1.0 + 1e-10; };
  if (!in_range(sym_weight) || !in_range(antisym_weight) ||
      std::abs(sym_weight + antisym_weight - 1.0) > 1e-10)
    throw std::invalid_argument("projector weights must lie in [0,1] and sum to 1");
  return (sym_weight + eta * eta * antisym_weight) / 8.0;
}

}  // namespace linopt
