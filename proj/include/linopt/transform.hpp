#pragma once

#include <cmath>
#include <numbers>

#include "linopt/fock.hpp"

namespace linopt {

/// Linear (possibly non-unitary) map on creation operators:
/// a^+_in -> sum_j T[j,in] a^+_j. All elements in the schemes preserve
/// polarization, so the map is stored per spatial label and acts identically
/// on both polarization slots (block structure T (x) I_2). Spatial labels
/// without a stored column map to themselves; composition pads with the
/// identity the same way.
class LinearModeMap {
 public:
  using Column = std::vector<std::pair<std::string, cplx>>;

  LinearModeMap() = default;

  static LinearModeMap identity() { return LinearModeMap{}; }

  static LinearModeMap from_columns(std::map<std::string, Column> columns) {
    LinearModeMap m;
    m.cols_ = std::move(columns);
    return m;
  }

  const std::map<std::string, Column>& columns() const { return cols_; }

  /// Column for an input label, identity-padded for untouched labels.
  Column column(const std::string& input) const {
    auto it = cols_.find(input);
    if (it != cols_.end()) return it->second;
    return Column{{input, cplx{1.0, 0.0}}};
  }

  /// All spatial labels the map mentions (inputs and outputs).
  std::set<std::string> touched_labels() const {
    std::set<std::string> labels;
    for (const auto& [in, col] : cols_) {
      labels.insert(in);
      for (const auto& [out, coeff] : col) labels.insert(out);
    }
    return labels;
  }

  /// Checks T^+ T = I over the declared input columns (an isometry on the
  /// modes the element addresses; untouched labels pass through unchanged).
  bool is_unitary(double tol = 1e-12) const {
    for (auto it1 = cols_.begin(); it1 != cols_.end(); ++it1) {
      for (auto it2 = it1; it2 != cols_.end(); ++it2) {
        std::map<std::string, cplx> lhs;
        for (const auto& [out, coeff] : it1->second) lhs[out] += coeff;
        cplx dot{};
        for (const auto& [out, coeff] : it2->second) {
          if (auto f = lhs.find(out); f != lhs.end()) dot += std::conj(f->second) * coeff;
        }
        if (std::abs(dot - (it1 == it2 ? cplx{1.0, 0.0} : cplx{})) > tol) return false;
      }
    }
    return true;
  }

 private:
  std::map<std::string, Column> cols_;
};

/// Real Hadamard convention: a^+_in1 -> (a^+_out1 + a^+_out2)/sqrt(2),
/// a^+_in2 -> (a^+_out1 - a^+_out2)/sqrt(2), on both polarizations.
inline LinearModeMap balanced_beam_splitter(const std::string& in1,
                                            const std::string& in2,
                                            const std::string& out1,
                                            const std::string& out2) {
  if (in1 == in2 || out1 == out2)
    throw std::invalid_argument("beam splitter ports must be distinct");
  const double s = 1.0 / std::numbers::sqrt2;
  return LinearModeMap::from_columns({
      {in1, {{out1, cplx{s, 0.0}}, {out2, cplx{s, 0.0}}}},
      {in2, {{out1, cplx{s, 0.0}}, {out2, cplx{-s, 0.0}}}},
  });
}

/// a^+ -> eta a^+ on both polarizations; non-unitary for eta < 1. Equivalent,
/// under photon-number post-selection, to a beam splitter of transmittance
/// eta coupling to a loss mode post-selected on vacuum.
inline LinearModeMap attenuator(const std::string& mode, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("attenuator transmittance must be in [0,1]");
  return LinearModeMap::from_columns({{mode, {{mode, cplx{eta, 0.0}}}}});
}

/// a^+ -> e^{i phi} a^+ on both polarizations; unitary.
inline LinearModeMap phase_shifter(const std::string& mode, double phi) {
  return LinearModeMap::from_columns(
      {{mode, {{mode, std::exp(cplx{0.0, phi})}}}});
}

/// Matrix product (second after first) with identity padding on labels not
/// addressed by either element.
inline LinearModeMap compose(const LinearModeMap& first,
                             const LinearModeMap& second) {
  std::set<std::string> inputs;
  for (const auto& [in, col] : first.columns()) inputs.insert(in);
  for (const auto& [in, col] : second.columns()) inputs.insert(in);
  std::map<std::string, LinearModeMap::Column> cols;
  for (const auto& in : inputs) {
    std::map<std::string, cplx> accum;
    for (const auto& [mid, c1] : first.column(in)) {
      for (const auto& [out, c2] : second.column(mid)) accum[out] += c1 * c2;
    }
    LinearModeMap::Column col;
    for (const auto& [out, coeff] : accum)
      if (std::abs(coeff) >= kPruneThreshold) col.emplace_back(out, coeff);
    cols[in] = std::move(col);
  }
  return LinearModeMap::from_columns(std::move(cols));
}

/// Rewrites each occupation monomial by the substitution rule and expands
/// multinomially. Exact for finite photon number; the output is unnormalized
/// when the map is non-unitary.
inline FockState apply_map(const FockState& state, const LinearModeMap& map) {
  std::set<std::string> out_space;
  for (const auto& m : state.mode_space())
    for (const auto& [out, coeff] : map.column(m)) out_space.insert(out);
  FockState out(out_space);
  for (const auto& [occ, amp] : state.amplitudes()) {
    OperatorPolynomial expanded;
    expanded.add_term(Occupation{}, amp / occupation_norm_factor(occ));
    for (const auto& [slot, count] : occ) {
      OperatorPolynomial form;
      for (const auto& [outLabel, coeff] : map.column(slot.spatial))
        form.add_term(Occupation{{ModeSlot{outLabel, slot.pol}, 1}}, coeff);
      for (int k = 0; k < count; ++k) expanded = poly_mul(expanded, form);
    }
    for (const auto& [e, c] : expanded.terms)
      out.add_term(e, c * occupation_norm_factor(e));
  }
  out.prune();
  return out;
}

}  // namespace linopt
