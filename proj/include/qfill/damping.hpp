#pragma once

// Local amplitude damping acting independently on every qubit of a register.
//
// A single qubit evolves under the Kraus pair
//     K0 = diag(1, p),   K1 = q |0><1|,
// with p = exp(-t / (2 tau)) and q = sqrt(1 - p^2): the excited level decays
// toward |0> with lifetime tau. The n-qubit channel is the n-fold tensor
// composition of this map, one factor per qubit.

#include "qfill/core.hpp"

#include <cmath>
#include <utility>

namespace qfill {

struct DampingParams {
  double t = 0.0;
  double tau = 1.0;
};

struct DampingCoefficients {
  double p = 1.0;
  double q = 0.0;
};

inline DampingCoefficients ad_coefficients(const DampingParams& params) {
  if (!(params.t >= 0.0)) throw std::invalid_argument("ad_coefficients: t must be >= 0");
  if (!(params.tau > 0.0)) throw std::invalid_argument("ad_coefficients: tau must be > 0");
  const double p2 = std::exp(-params.t / params.tau);
  return {std::sqrt(p2), std::sqrt(1.0 - p2)};
}

/// Applies the local amplitude-damping channel to every qubit.
inline DensityMatrix apply_amplitude_damping(const DensityMatrix& rho,
                                             const DampingParams& params) {
  const auto [p, q] = ad_coefficients(params);
  const double q2 = q * q;
  const int n = rho.qubits();
  Matrix m = rho.matrix();
  const Eigen::Index dim = m.rows();

  // Per qubit, entries transform by the bit pattern (b_i, b_j) of that qubit:
  //   (0,0): m_ij + q^2 m_{i+d, j+d}     (1,1): p^2 m_ij     else: p m_ij.
  // Ascending i touches (0,0) entries before the (1,1) entries they read,
  // so the update is safe in place.
  for (int qubit = 0; qubit < n; ++qubit) {
    const Eigen::Index d = Eigen::Index{1} << (n - 1 - qubit);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const bool bi = (i & d) != 0;
      for (Eigen::Index j = 0; j < dim; ++j) {
        const bool bj = (j & d) != 0;
        if (!bi && !bj)
          m(i, j) += q2 * m(i + d, j + d);
        else if (bi && bj)
          m(i, j) *= p * p;
        else
          m(i, j) *= p;
      }
    }
  }
  return DensityMatrix(std::move(m));
}

/// Reference route for the same channel: couple each qubit to its own vacuum
/// ancilla through the isometry |1>|0> -> p|1>|0> + q|0>|1>, then trace the
/// ancillas out. Exercises completely different code paths (pure-state
/// arithmetic plus partial_trace), which makes it a useful cross-check.
inline DensityMatrix purified_evolution(const PureState& psi, const DampingParams& params) {
  const auto [p, q] = ad_coefficients(params);
  const int n = psi.qubits();
  const Eigen::Index full_dim = psi.dim() << n;

  // Register layout: system qubits 0..n-1 followed by one ancilla per qubit.
  Vector big = Vector::Zero(full_dim);
  for (Eigen::Index i = 0; i < psi.dim(); ++i) big[i << n] = psi[i];

  for (int k = 0; k < n; ++k) {
    const Eigen::Index sys_bit = Eigen::Index{1} << (2 * n - 1 - k);
    const Eigen::Index anc_bit = Eigen::Index{1} << (n - 1 - k);
    for (Eigen::Index i = 0; i < full_dim; ++i) {
      if ((i & sys_bit) != 0 && (i & anc_bit) == 0) {
        const complex_t a = big[i];
        if (a != complex_t{}) {
          big[i] = p * a;
          big[i - sys_bit + anc_bit] += q * a;
        }
      }
    }
  }

  std::vector<int> keep(n);
  for (int k = 0; k < n; ++k) keep[k] = k;
  return partial_trace(DensityMatrix(PureState(std::move(big))), keep);
}

}  // namespace qfill
