#pragma once

// Entanglement measures: the concurrence-fill measure for pure three-qubit
// states, the genuine multipartite concurrence of X-form states, and the
// two-qubit Wootters concurrence.
//
// For a pure three-qubit state the squared one-to-rest concurrence of qubit i
// is C_i^2 = 4 det(rho_i), where rho_i is that qubit's reduced state. The
// three values obey the triangle inequality, so they span a triangle whose
// normalized area (squared, via Heron's formula) defines the fill measure
//     F = [ (16/3) Q (Q - C_A^2)(Q - C_B^2)(Q - C_C^2) ]^{1/4},
//     Q = (C_A^2 + C_B^2 + C_C^2) / 2.
// F equals 1 on the GHZ state, 8/9 on the W state, and vanishes exactly on
// biseparable pure states.

#include "qfill/core.hpp"
#include "qfill/damping.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace qfill {

/// Squared one-to-rest concurrences of the three qubits.
struct TriangleSides {
  double c2_a = 0.0;
  double c2_b = 0.0;
  double c2_c = 0.0;
};

inline double marginal_concurrence_squared(const PureState& psi, int qubit) {
  const int n = psi.qubits();
  if (qubit < 0 || qubit >= n)
    throw std::invalid_argument("marginal_concurrence_squared: qubit index out of range");
  const Eigen::Index d = Eigen::Index{1} << (n - 1 - qubit);
  const Vector& a = psi.amplitudes();

  // Single-qubit marginal [[p0, b], [conj(b), p1]] accumulated directly.
  double p0 = 0.0, p1 = 0.0;
  complex_t b = 0.0;
  for (Eigen::Index m = 0; m < a.size(); ++m) {
    if ((m & d) == 0) {
      p0 += std::norm(a[m]);
      b += a[m] * std::conj(a[m + d]);
    } else {
      p1 += std::norm(a[m]);
    }
  }
  const double c2 = 4.0 * (p0 * p1 - std::norm(b));
  if (c2 < -1e-10 || c2 > 1.0 + 1e-10)
    throw numerical_error("marginal_concurrence_squared: value outside [0, 1]");
  return std::clamp(c2, 0.0, 1.0);
}

inline TriangleSides triangle_sides(const PureState& psi) {
  if (psi.qubits() != 3)
    throw std::invalid_argument("triangle_sides: expects a three-qubit state");
  return {marginal_concurrence_squared(psi, 0), marginal_concurrence_squared(psi, 1),
          marginal_concurrence_squared(psi, 2)};
}

inline double fill_pure(const TriangleSides& sides) {
  const double s[3] = {sides.c2_a, sides.c2_b, sides.c2_c};
  for (double v : s)
    if (v < -1e-10 || v > 1.0 + 1e-10)
      throw numerical_error("fill_pure: side outside [0, 1]");
  const double q = 0.5 * (s[0] + s[1] + s[2]);
  double factors[3];
  for (int i = 0; i < 3; ++i) {
    factors[i] = q - s[i];
    if (factors[i] < -1e-10) throw numerical_error("fill_pure: triangle inequality violated");
  }
  const double heron = q * factors[0] * factors[1] * factors[2];
  if (heron < -1e-12) throw numerical_error("fill_pure: Heron product negative beyond tolerance");
  if (heron <= 0.0) return 0.0;
  return std::pow(16.0 / 3.0 * heron, 0.25);
}

inline double fill_pure(const PureState& psi) { return fill_pure(triangle_sides(psi)); }

namespace detail {

// Unchecked fast paths over raw 8-amplitude arrays for the roof optimizer.
// Roundoff below the exact zero set is clamped instead of raised, because the
// optimizer must be free to walk through (and settle on) biseparable states.

inline void raw_sides(const complex_t* a, double s[3]) {
  for (int qubit = 0; qubit < 3; ++qubit) {
    const int d = 4 >> qubit;
    double p0 = 0.0, p1 = 0.0;
    complex_t b = 0.0;
    for (int m = 0; m < 8; ++m) {
      if ((m & d) == 0) {
        p0 += std::norm(a[m]);
        b += a[m] * std::conj(a[m + d]);
      } else {
        p1 += std::norm(a[m]);
      }
    }
    s[qubit] = 4.0 * (p0 * p1 - std::norm(b));
  }
}

inline double fill_from_sides(const double s[3]) {
  const double q = 0.5 * (s[0] + s[1] + s[2]);
  const double heron = q * (q - s[0]) * (q - s[1]) * (q - s[2]);
  if (heron <= 0.0) return 0.0;
  return std::pow(16.0 / 3.0 * heron, 0.25);
}

inline double fill_raw(const complex_t* a) {
  double s[3];
  raw_sides(a, s);
  return fill_from_sides(s);
}

inline void side_partials(const complex_t* a, const double p0q[3], const double p1q[3],
                          const complex_t bq[3], const double dh_ds[3], complex_t* grad) {
  // Accumulates sum_i w_i ds_i/d conj(psi_m) into grad, where
  // ds_i / d conj(psi_m) = 4 (p1 psi_m - b psi_{m+d}) on the 0 branch and
  //                        4 (p0 psi_m - conj(b) psi_{m-d}) on the 1 branch.
  for (int qubit = 0; qubit < 3; ++qubit) {
    const int d = 4 >> qubit;
    const double w = dh_ds[qubit];
    for (int m = 0; m < 8; ++m) {
      complex_t ds;
      if ((m & d) == 0)
        ds = 4.0 * (p1q[qubit] * a[m] - bq[qubit] * a[m + d]);
      else
        ds = 4.0 * (p0q[qubit] * a[m] - std::conj(bq[qubit]) * a[m - d]);
      grad[m] += 2.0 * w * ds;
    }
  }
}

// Heron products at or below this floor are treated as exactly zero. The
// matching fill (16/3 * floor)^{1/4} is about 5e-8, far below every tolerance
// used by the optimizer.
inline constexpr double kHeronFloor = 1e-28;

/// Fill value together with its Euclidean gradient on C^8 viewed as R^16,
/// grad_m = 2 dF/d conj(psi_m). Below the zero set the (sub)gradient is 0.
inline double fill_and_grad(const complex_t* a, complex_t* grad) {
  double s[3];
  double p0q[3], p1q[3];
  complex_t bq[3];
  for (int qubit = 0; qubit < 3; ++qubit) {
    const int d = 4 >> qubit;
    double p0 = 0.0, p1 = 0.0;
    complex_t b = 0.0;
    for (int m = 0; m < 8; ++m) {
      if ((m & d) == 0) {
        p0 += std::norm(a[m]);
        b += a[m] * std::conj(a[m + d]);
      } else {
        p1 += std::norm(a[m]);
      }
    }
    p0q[qubit] = p0;
    p1q[qubit] = p1;
    bq[qubit] = b;
    s[qubit] = 4.0 * (p0 * p1 - std::norm(b));
  }

  const double q = 0.5 * (s[0] + s[1] + s[2]);
  const double f[3] = {q - s[0], q - s[1], q - s[2]};
  const double heron = q * f[0] * f[1] * f[2];
  for (int m = 0; m < 8; ++m) grad[m] = 0.0;
  if (heron <= kHeronFloor) return heron <= 0.0 ? 0.0 : std::pow(16.0 / 3.0 * heron, 0.25);

  const double value = std::pow(16.0 / 3.0 * heron, 0.25);
  const double dv_dheron = value / (4.0 * heron);

  // dF/ds_i = dv_dheron * dheron/ds_i with dq/ds_i = 1/2 and
  // df_j/ds_i = 1/2 - delta_ij.
  double dv_ds[3];
  const double prod_f = f[0] * f[1] * f[2];
  for (int i = 0; i < 3; ++i) {
    double acc = 0.5 * prod_f;
    for (int j = 0; j < 3; ++j) {
      const double coeff = (i == j) ? -0.5 : 0.5;
      double partial = q * coeff;
      for (int k = 0; k < 3; ++k)
        if (k != j) partial *= f[k];
      acc += partial;
    }
    dv_ds[i] = dv_dheron * acc;
  }

  side_partials(a, p0q, p1q, bq, dv_ds, grad);
  return value;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Genuine multipartite concurrence of X-form states.
//
// An X-form three-qubit density matrix is supported on the diagonal and the
// anti-diagonal. Writing its anti-diagonal pairs as (j, 7-j), j = 0..3,
//     GMC = 2 max(0, max_j [ |rho_{j,7-j}| - sum_{k != j} sqrt(rho_kk rho_{7-k,7-k}) ]).

inline bool is_x_form(const DensityMatrix& rho, double tolerance = 1e-10) {
  if (rho.dim() != 8) throw std::invalid_argument("is_x_form: expects a three-qubit state");
  const Matrix& m = rho.matrix();
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j)
      if (i != j && i + j != 7 && std::abs(m(i, j)) > tolerance) return false;
  return true;
}

inline double gmc_x(const DensityMatrix& rho, double tolerance = 1e-10) {
  if (!is_x_form(rho, tolerance))
    throw std::invalid_argument(
        "gmc_x: state is not X-form; use fill_mixed for general states");
  const Matrix& m = rho.matrix();
  double best = 0.0;
  for (int j = 0; j < 4; ++j) {
    double others = 0.0;
    for (int k = 0; k < 4; ++k) {
      if (k == j) continue;
      others += std::sqrt(std::max(0.0, m(k, k).real()) * std::max(0.0, m(7 - k, 7 - k).real()));
    }
    best = std::max(best, std::abs(m(j, 7 - j)) - others);
  }
  return 2.0 * std::max(0.0, best);
}

/// Closed form of gmc_x for cos(t)|111> + sin(t)|000> under amplitude damping:
/// GMC(t) = max(0, |sin 2 theta| p^3 - 6 cos^2(theta) p^3 q^3) with p^2 = e^{-t/tau}.
inline double gmc_g_theta(double theta, double t_over_tau) {
  if (!(t_over_tau >= 0.0)) throw std::invalid_argument("gmc_g_theta: t_over_tau must be >= 0");
  const double p2 = std::exp(-t_over_tau);
  const double q2 = 1.0 - p2;
  const double p3 = std::pow(p2, 1.5);
  const double q3 = std::pow(q2, 1.5);
  const double c = std::cos(theta);
  return std::max(0.0, std::abs(std::sin(2.0 * theta)) * p3 - 6.0 * c * c * p3 * q3);
}

/// Time at which gmc_g_theta first reaches zero, from inverting
/// |tan theta| = 3 (1 - e^{-t/tau})^{3/2}. No zero exists when |tan theta| >= 3
/// (equivalently cos theta <= 1/sqrt(10)); the |111>-like limit theta = 0
/// gives onset 0, the |000>-like limit theta = pi/2 never had entanglement
/// to lose and reports no onset.
inline std::optional<double> esd_onset_g_theta(double theta) {
  const double c = std::cos(theta);
  if (c == 0.0) return std::nullopt;
  const double tan_abs = std::abs(std::sin(theta) / c);
  if (!(tan_abs < 3.0)) return std::nullopt;
  const double u = std::cbrt(tan_abs * tan_abs / 9.0);  // (|tan|/3)^{2/3}
  return -std::log1p(-u);
}

// ---------------------------------------------------------------------------
// Two-qubit Wootters concurrence.

inline double wootters_concurrence(const DensityMatrix& rho) {
  if (rho.dim() != 4)
    throw std::invalid_argument("wootters_concurrence: expects a two-qubit state");

  // Spin flip sigma_y (x) sigma_y; real and symmetric.
  Matrix flip = Matrix::Zero(4, 4);
  flip(0, 3) = -1.0;
  flip(1, 2) = 1.0;
  flip(2, 1) = 1.0;
  flip(3, 0) = -1.0;
  const Matrix tilde = flip * rho.matrix().conjugate() * flip;

  // sqrt(rho) via the eigendecomposition, then the Hermitian product
  // R = sqrt(rho) rho~ sqrt(rho) whose eigenvalues are the squared Wootters
  // lambdas. This route avoids the non-Hermitian eigenproblem for rho rho~.
  // Eigenvalues indistinguishable from zero are clamped to exactly zero at
  // both solves; taking their square roots would turn O(eps) eigensolver
  // noise on rank-deficient inputs into O(sqrt(eps)) errors.
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  Eigen::VectorXd lam = es.eigenvalues();
  const double lam_max = lam.maxCoeff();  // >= 1/4 for any two-qubit state
  const double rho_cut = 1e-13 * lam_max;
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    if (lam[i] < rho_cut) lam[i] = 0.0;
  const Matrix root =
      es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
  Matrix r = root * tilde * root;
  r = 0.5 * (r + Matrix(r.adjoint()));

  Eigen::SelfAdjointEigenSolver<Matrix> er(r, Eigen::EigenvaluesOnly);
  Eigen::VectorXd l2 = er.eigenvalues();  // ascending
  const double r_cut = 1e-13 * lam_max * lam_max;
  for (Eigen::Index i = 0; i < l2.size(); ++i)
    if (l2[i] < r_cut) l2[i] = 0.0;
  const Eigen::VectorXd l = l2.cwiseSqrt();
  return std::max(0.0, l[3] - l[2] - l[1] - l[0]);
}

}  // namespace qfill
