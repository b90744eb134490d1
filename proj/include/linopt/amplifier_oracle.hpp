#pragma once

#include <Eigen/Dense>

#include "linopt/analysis.hpp"

namespace linopt {

/// Independent amplifier oracle: builds the Hamiltonian
/// H = i g (X - X^+) as a dense matrix on a truncated Fock basis and evolves
/// |psi>_A|psi_perp>_B by exact diagonalization. Shares nothing with the
/// factorized route in analysis.hpp beyond the FockState container.
namespace oracle {

/// Full four-mode basis (A psi, A perp, B psi, B perp) with total photon
/// number <= cap. 1820 states at cap 12; memory-heavy beyond.
inline std::vector<std::array<int, 4>> four_mode_basis(int cap) {
  std::vector<std::array<int, 4>> basis;
  for (int tot = 0; tot <= cap; ++tot)
    for (int n0 = 0; n0 <= tot; ++n0)
      for (int n1 = 0; n1 <= tot - n0; ++n1)
        for (int n2 = 0; n2 <= tot - n0 - n1; ++n2)
          basis.push_back({n0, n1, n2, tot - n0 - n1 - n2});
  return basis;
}

/// H conserves n(A,psi)-n(B,perp) and n(A,perp)-n(B,psi); starting from
/// |1,0;0,1> both are zero, so the reachable states are |m,k>_A|k,m>_B.
/// This block basis admits a much larger photon cap than the full space,
/// which is what pushes the truncation boundary error of the dense
/// exponential below the verification tolerances.
inline std::vector<std::array<int, 2>> block_basis(int pair_cap) {
  std::vector<std::array<int, 2>> basis;
  for (int s = 0; s <= pair_cap; ++s)
    for (int m = 0; m <= s; ++m) basis.push_back({m, s - m});
  return basis;
}

namespace detail {

template <typename Basis, typename FillX>
FockState evolve(double lambda, const Basis& basis, const FillX& fill_x,
                 size_t initial_index, const std::function<Occupation(size_t)>& occ_of) {
  const double g = std::atanh(lambda);
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  fill_x(x);
  // H = i g (X - X^T): purely imaginary, Hermitian
  Eigen::MatrixXcd h = cplx{0.0, 1.0} * g * (x - x.transpose()).cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  Eigen::VectorXcd phases =
      (cplx{0.0, -1.0} * solver.eigenvalues().cast<cplx>()).array().exp();
  Eigen::VectorXcd in = Eigen::VectorXcd::Zero(n);
  in(static_cast<Eigen::Index>(initial_index)) = 1.0;
  Eigen::VectorXcd out = solver.eigenvectors() *
                         (phases.asDiagonal() * (solver.eigenvectors().adjoint() * in));

  FockState result(std::set<std::string>{"A", "B"});
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(out(i)) >= kPruneThreshold)
      result.add_term(occ_of(static_cast<size_t>(i)), out(i));
  }
  return result;
}

inline Occupation occupation4(const std::array<int, 4>& n) {
  Occupation occ;
  if (n[0] > 0) occ[ModeSlot{"A", kPolPsi}] = n[0];
  if (n[1] > 0) occ[ModeSlot{"A", kPolPerp}] = n[1];
  if (n[2] > 0) occ[ModeSlot{"B", kPolPsi}] = n[2];
  if (n[3] > 0) occ[ModeSlot{"B", kPolPerp}] = n[3];
  return occ;
}

}  // namespace detail

/// Dense evolution on the full four-mode truncated space.
inline FockState dense_evolve_full(double lambda, int cap) {
  auto basis = four_mode_basis(cap);
  std::map<std::array<int, 4>, size_t> index;
  for (size_t i = 0; i < basis.size(); ++i) index[basis[i]] = i;

  auto fill_x = [&](Eigen::MatrixXd& x) {
    for (size_t i = 0; i < basis.size(); ++i) {
      const auto& [n0, n1, n2, n3] = basis[i];
      // a^+_psi b^+_perp
      if (auto it = index.find({n0 + 1, n1, n2, n3 + 1}); it != index.end())
        x(static_cast<Eigen::Index>(it->second), static_cast<Eigen::Index>(i)) +=
            std::sqrt(double(n0 + 1) * (n3 + 1));
      // -a^+_perp b^+_psi
      if (auto it = index.find({n0, n1 + 1, n2 + 1, n3}); it != index.end())
        x(static_cast<Eigen::Index>(it->second), static_cast<Eigen::Index>(i)) -=
            std::sqrt(double(n1 + 1) * (n2 + 1));
    }
  };
  size_t initial = index.at({1, 0, 0, 1});
  return detail::evolve(lambda, basis, fill_x, initial,
                        [&](size_t i) { return detail::occupation4(basis[i]); });
}

/// Dense evolution on the conserved block |m,k>_A|k,m>_B with m+k <= pair_cap
/// (total photons up to 2*pair_cap).
inline FockState dense_evolve_block(double lambda, int pair_cap) {
  auto basis = block_basis(pair_cap);
  std::map<std::array<int, 2>, size_t> index;
  for (size_t i = 0; i < basis.size(); ++i) index[basis[i]] = i;

  auto fill_x = [&](Eigen::MatrixXd& x) {
    for (size_t i = 0; i < basis.size(); ++i) {
      const auto& [m, k] = basis[i];
      // X |m,k> = (m+1)|m+1,k> - (k+1)|m,k+1>
      if (auto it = index.find({m + 1, k}); it != index.end())
        x(static_cast<Eigen::Index>(it->second), static_cast<Eigen::Index>(i)) += m + 1;
      if (auto it = index.find({m, k + 1}); it != index.end())
        x(static_cast<Eigen::Index>(it->second), static_cast<Eigen::Index>(i)) -= k + 1;
    }
  };
  size_t initial = index.at({1, 0});
  auto occ_of = [&](size_t i) {
    const auto& [m, k] = basis[i];
    return detail::occupation4({m, k, k, m});
  };
  return detail::evolve(lambda, basis, fill_x, initial, occ_of);
}

/// Max amplitude difference between two states on basis terms with total
/// photon number <= sector_cap.
inline double max_sector_difference(const FockState& a, const FockState& b,
                                    int sector_cap) {
  double d = 0.0;
  auto scan = [&](const FockState& lhs, const FockState& rhs) {
    for (const auto& [occ, amp] : lhs.amplitudes()) {
      if (total_photons(occ) <= sector_cap)
        d = std::max(d, std::abs(amp - rhs.amplitude(occ)));
    }
  };
  scan(a, b);
  scan(b, a);
  return d;
}

}  // namespace oracle
}  // namespace linopt
