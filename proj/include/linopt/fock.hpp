#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace linopt {

using cplx = std::complex<double>;

/// Amplitudes below this magnitude are dropped after every linear operation.
inline constexpr double kPruneThreshold = 1e-14;

/// Abstract polarization basis: pol 0 carries the unknown state, pol 1 its
/// orthogonal complement. No concrete Bloch vector is ever needed.
inline constexpr int kPolPsi = 0;
inline constexpr int kPolPerp = 1;

/// One polarization-resolved bosonic mode: a spatial label plus a binary
/// polarization index.
struct ModeSlot {
  std::string spatial;
  int pol{kPolPsi};

  auto operator<=>(const ModeSlot&) const = default;
};

/// Photon counts per slot. Slots with count zero are never stored, so equal
/// occupations compare equal and iteration order is canonical.
using Occupation = std::map<ModeSlot, int>;

inline int total_photons(const Occupation& occ) {
  int n = 0;
  for (const auto& [slot, count] : occ) n += count;
  return n;
}

inline int count_at(const Occupation& occ, const std::string& spatial, int pol) {
  auto it = occ.find(ModeSlot{spatial, pol});
  return it == occ.end() ? 0 : it->second;
}

inline int photons_in_spatial_mode(const Occupation& occ, const std::string& spatial) {
  return count_at(occ, spatial, kPolPsi) + count_at(occ, spatial, kPolPerp);
}

/// sqrt(prod_i n_i!) — the bosonic normalization of |{n_i}> relative to the
/// creation-operator monomial acting on vacuum.
inline double occupation_norm_factor(const Occupation& occ) {
  double f = 1.0;
  for (const auto& [slot, count] : occ) {
    for (int k = 2; k <= count; ++k) f *= static_cast<double>(k);
  }
  return std::sqrt(f);
}

inline Occupation shifted(Occupation occ, const ModeSlot& slot, int delta) {
  int n = 0;
  if (auto it = occ.find(slot); it != occ.end()) n = it->second;
  n += delta;
  if (n < 0) throw std::logic_error("negative occupation");
  if (n == 0)
    occ.erase(slot);
  else
    occ[slot] = n;
  return occ;
}

/// Sparse multimode Fock state. May be unnormalized: post-selected states
/// carry their success amplitude as an overall scale. The state remembers the
/// spatial modes it lives on so that mismatched operands are rejected rather
/// than silently treated as orthogonal.
class FockState {
 public:
  FockState() = default;

  explicit FockState(std::set<std::string> mode_space)
      : space_(std::move(mode_space)) {}

  static FockState vacuum(std::set<std::string> mode_space) {
    FockState s(std::move(mode_space));
    s.amps_[Occupation{}] = cplx{1.0, 0.0};
    return s;
  }

  const std::map<Occupation, cplx>& amplitudes() const { return amps_; }
  const std::set<std::string>& mode_space() const { return space_; }

  bool empty() const { return amps_.empty(); }

  /// Accumulates c onto the given occupation; extends the mode space as
  /// needed.
  void add_term(const Occupation& occ, cplx c) {
    for (const auto& [slot, count] : occ) {
      if (count < 0) throw std::invalid_argument("negative photon count");
      space_.insert(slot.spatial);
    }
    Occupation canon;
    for (const auto& [slot, count] : occ)
      if (count > 0) canon[slot] = count;
    auto [it, inserted] = amps_.try_emplace(canon, c);
    if (!inserted) it->second += c;
  }

  cplx amplitude(const Occupation& occ) const {
    auto it = amps_.find(occ);
    return it == amps_.end() ? cplx{} : it->second;
  }

  double squared_norm() const {
    double n = 0.0;
    for (const auto& [occ, amp] : amps_) n += std::norm(amp);
    return n;
  }

  FockState& scale(cplx factor) {
    for (auto& [occ, amp] : amps_) amp *= factor;
    return prune();
  }

  FockState& prune(double threshold = kPruneThreshold) {
    for (auto it = amps_.begin(); it != amps_.end();) {
      if (std::abs(it->second) < threshold)
        it = amps_.erase(it);
      else
        ++it;
    }
    return *this;
  }

  FockState normalized() const {
    double n2 = squared_norm();
    if (n2 <= 0.0) throw std::domain_error("cannot normalize a zero state");
    FockState out = *this;
    out.scale(cplx{1.0 / std::sqrt(n2), 0.0});
    return out;
  }

  FockState& operator+=(const FockState& other) {
    checkSameSpace(other);
    for (const auto& [occ, amp] : other.amps_) add_term(occ, amp);
    prune();
    return *this;
  }

  friend FockState operator+(FockState lhs, const FockState& rhs) {
    lhs += rhs;
    return lhs;
  }

  friend FockState operator*(cplx factor, FockState s) {
    s.scale(factor);
    return s;
  }

  /// Drops spatial modes from the mode space. Every remaining amplitude must
  /// have zero photons in the dropped modes.
  FockState restricted_to(const std::set<std::string>& keep) const {
    FockState out(keep);
    for (const auto& [occ, amp] : amps_) {
      for (const auto& [slot, count] : occ) {
        if (!keep.count(slot.spatial))
          throw std::invalid_argument("restriction drops an occupied mode: " +
                                      slot.spatial);
      }
      out.amps_[occ] = amp;
    }
    return out;
  }

  void checkSameSpace(const FockState& other) const {
    if (space_ != other.space_)
      throw std::invalid_argument("mismatched mode spaces");
  }

 private:
  std::map<Occupation, cplx> amps_;
  std::set<std::string> space_;
};

/// Polynomial in commuting creation operators: sparse map from canonical
/// exponent vector to complex coefficient.
struct OperatorPolynomial {
  std::map<Occupation, cplx> terms;

  void add_term(const Occupation& exponents, cplx coeff) {
    Occupation canon;
    for (const auto& [slot, e] : exponents) {
      if (e < 0) throw std::invalid_argument("negative exponent");
      if (e > 0) canon[slot] = e;
    }
    auto [it, inserted] = terms.try_emplace(canon, coeff);
    if (!inserted) it->second += coeff;
  }

  OperatorPolynomial& prune(double threshold = kPruneThreshold) {
    for (auto it = terms.begin(); it != terms.end();) {
      if (std::abs(it->second) < threshold)
        it = terms.erase(it);
      else
        ++it;
    }
    return *this;
  }
};

inline OperatorPolynomial poly_mul(const OperatorPolynomial& a,
                                   const OperatorPolynomial& b) {
  OperatorPolynomial out;
  for (const auto& [ea, ca] : a.terms) {
    for (const auto& [eb, cb] : b.terms) {
      Occupation e = ea;
      for (const auto& [slot, n] : eb) e[slot] += n;
      out.add_term(e, ca * cb);
    }
  }
  return out.prune();
}

inline OperatorPolynomial poly_pow(const OperatorPolynomial& a, int n) {
  OperatorPolynomial out;
  out.add_term(Occupation{}, cplx{1.0, 0.0});
  for (int k = 0; k < n; ++k) out = poly_mul(out, a);
  return out;
}

/// Applies the polynomial to vacuum: a monomial with exponents {n_i} and
/// coefficient c contributes amplitude c*sqrt(prod n_i!) on the matching
/// occupation. The result is generally unnormalized.
inline FockState monomial_to_state(const OperatorPolynomial& poly,
                                   std::set<std::string> mode_space = {}) {
  FockState out(std::move(mode_space));
  for (const auto& [exponents, coeff] : poly.terms)
    out.add_term(exponents, coeff * occupation_norm_factor(exponents));
  out.prune();
  return out;
}

/// Inverse of monomial_to_state on the stored amplitudes.
inline OperatorPolynomial state_to_polynomial(const FockState& state) {
  OperatorPolynomial poly;
  for (const auto& [occ, amp] : state.amplitudes())
    poly.add_term(occ, amp / occupation_norm_factor(occ));
  return poly;
}

/// Hermitian inner product over the occupation basis, conjugate-linear in lhs.
inline cplx inner_product(const FockState& lhs, const FockState& rhs) {
  lhs.checkSameSpace(rhs);
  const auto& a = lhs.amplitudes();
  const auto& b = rhs.amplitudes();
  cplx sum{};
  // both maps share the canonical key order
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first)
      ++ia;
    else if (ib->first < ia->first)
      ++ib;
    else {
      sum += std::conj(ia->second) * ib->second;
      ++ia;
      ++ib;
    }
  }
  return sum;
}

/// Probability-weighted fraction of photons in the given spatial mode that
/// carry the target polarization: sum over basis terms of p(term) * j/(j+k).
inline double single_photon_fidelity(const FockState& state,
                                     const std::string& spatial,
                                     int target_pol) {
  double n2 = state.squared_norm();
  if (n2 <= 0.0) throw std::domain_error("zero-norm state");
  double f = 0.0;
  for (const auto& [occ, amp] : state.amplitudes()) {
    int j = count_at(occ, spatial, target_pol);
    int k = count_at(occ, spatial, 1 - target_pol);
    if (j + k == 0)
      throw std::domain_error("basis term with no photon in mode " + spatial);
    f += std::norm(amp) / n2 * static_cast<double>(j) / (j + k);
  }
  return f;
}

/// One photon of polarization `pol` in spatial mode `spatial`.
inline FockState single_photon(const std::string& spatial, int pol) {
  FockState s;
  s.add_term(Occupation{{ModeSlot{spatial, pol}, 1}}, cplx{1.0, 0.0});
  return s;
}

/// One photon in the polarization state c0|psi> + c1|psi_perp>.
inline FockState polarization_qubit(const std::string& spatial, cplx c0, cplx c1) {
  FockState s(std::set<std::string>{spatial});
  if (std::abs(c0) > 0.0) s.add_term(Occupation{{ModeSlot{spatial, kPolPsi}, 1}}, c0);
  if (std::abs(c1) > 0.0) s.add_term(Occupation{{ModeSlot{spatial, kPolPerp}, 1}}, c1);
  return s;
}

/// Tensor product of states on disjoint spatial mode sets.
inline FockState tensor(const FockState& a, const FockState& b) {
  std::set<std::string> space = a.mode_space();
  for (const auto& m : b.mode_space()) {
    if (!space.insert(m).second)
      throw std::invalid_argument("tensor factors share spatial mode: " + m);
  }
  FockState out(std::move(space));
  for (const auto& [oa, ca] : a.amplitudes()) {
    for (const auto& [ob, cb] : b.amplitudes()) {
      Occupation occ = oa;
      occ.insert(ob.begin(), ob.end());
      out.add_term(occ, ca * cb);
    }
  }
  out.prune();
  return out;
}

inline FockState relabel_spatial(const FockState& state,
                                 const std::map<std::string, std::string>& renames) {
  std::set<std::string> space;
  for (const auto& m : state.mode_space()) {
    auto it = renames.find(m);
    if (!space.insert(it == renames.end() ? m : it->second).second)
      throw std::invalid_argument("relabeling collides spatial modes");
  }
  FockState out(std::move(space));
  for (const auto& [occ, amp] : state.amplitudes()) {
    Occupation renamed;
    for (const auto& [slot, count] : occ) {
      auto it = renames.find(slot.spatial);
      renamed[ModeSlot{it == renames.end() ? slot.spatial : it->second, slot.pol}] = count;
    }
    out.add_term(renamed, amp);
  }
  return out;
}

using PolarizationRotation = std::array<std::array<cplx, 2>, 2>;

/// Applies the same 2x2 unitary to the polarization doublet of every spatial
/// mode: a^+_{s,p} -> sum_{p'} U[p'][p] a^+_{s,p'}. Used by the universality
/// property tests; no circuit element ever mixes polarizations.
inline FockState rotate_polarization(const FockState& state,
                                     const PolarizationRotation& u) {
  FockState out(state.mode_space());
  for (const auto& [occ, amp] : state.amplitudes()) {
    OperatorPolynomial expanded;
    expanded.add_term(Occupation{}, amp / occupation_norm_factor(occ));
    for (const auto& [slot, count] : occ) {
      OperatorPolynomial form;
      form.add_term(Occupation{{ModeSlot{slot.spatial, kPolPsi}, 1}}, u[0][slot.pol]);
      form.add_term(Occupation{{ModeSlot{slot.spatial, kPolPerp}, 1}}, u[1][slot.pol]);
      for (int k = 0; k < count; ++k) expanded = poly_mul(expanded, form);
    }
    for (const auto& [e, c] : expanded.terms)
      out.add_term(e, c * occupation_norm_factor(e));
  }
  out.prune();
  return out;
}

/// Creation-monomial action on a state: each exponent raises the occupation,
/// picking up sqrt((n+e)!/n!) per slot.
inline FockState apply_creation(const OperatorPolynomial& poly,
                                const FockState& state) {
  FockState out(state.mode_space());
  for (const auto& [exponents, coeff] : poly.terms) {
    for (const auto& [occ, amp] : state.amplitudes()) {
      Occupation raised = occ;
      double factor = 1.0;
      for (const auto& [slot, e] : exponents) {
        int n = raised[slot];
        for (int k = 1; k <= e; ++k) factor *= std::sqrt(static_cast<double>(n + k));
        raised[slot] = n + e;
      }
      out.add_term(raised, coeff * amp * factor);
    }
  }
  out.prune();
  return out;
}

/// Adjoint monomial action: each exponent lowers the occupation by e with
/// factor sqrt(n!/(n-e)!); terms with too few photons vanish.
inline FockState apply_annihilation(const OperatorPolynomial& poly,
                                    const FockState& state) {
  FockState out(state.mode_space());
  for (const auto& [exponents, coeff] : poly.terms) {
    for (const auto& [occ, amp] : state.amplitudes()) {
      Occupation lowered = occ;
      double factor = 1.0;
      bool vanished = false;
      for (const auto& [slot, e] : exponents) {
        auto it = lowered.find(slot);
        int n = it == lowered.end() ? 0 : it->second;
        if (n < e) {
          vanished = true;
          break;
        }
        for (int k = 0; k < e; ++k) factor *= std::sqrt(static_cast<double>(n - k));
        if (n == e)
          lowered.erase(slot);
        else
          it->second = n - e;
      }
      if (!vanished) out.add_term(lowered, coeff * amp * factor);
    }
  }
  out.prune();
  return out;
}

}  // namespace linopt
