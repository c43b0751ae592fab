#pragma once

// Dense complex linear algebra for small multi-qubit registers.
//
// Conventions used throughout the library:
//   * Qubit 0 is the most significant bit of a computational-basis index,
//     so for three qubits |abc> sits at index 4a + 2b + c.
//   * |1> is the excited level; amplitude damping relaxes it toward |0>.
//   * Validation tolerances live in qfill::tol. Constructors of the typed
//     wrappers (PureState, DensityMatrix, HermitianOperator) enforce their
//     class invariants and throw std::invalid_argument on violation.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qfill {

using complex_t = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

/// Signals a violated numerical invariant: an internal consistency failure,
/// as opposed to a malformed argument.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace tol {
inline constexpr double hermitian = 1e-12;     // entrywise |M - M^dag|
inline constexpr double trace_one = 1e-12;     // |tr(rho) - 1|
inline constexpr double eigen_floor = -1e-10;  // smallest admissible eigenvalue
inline constexpr double unit_norm = 1e-12;     // | <psi|psi> - 1 |
inline constexpr double unitary = 1e-10;       // entrywise |U^dag U - 1|
}  // namespace tol

inline int qubit_count_for_dim(Eigen::Index dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0)
    throw std::invalid_argument("dimension is not a power of two >= 2");
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  return n;
}

// ---------------------------------------------------------------------------
// Deterministic randomness.
//
// All stochastic routines draw from std::mt19937_64 generators seeded through
// std::seed_seq, and uniform/Gaussian variates are produced from raw 64-bit
// draws below. Both steps are fully specified by the standard, so identical
// seeds give identical streams on every platform.

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t salt1 = 0,
                                std::uint64_t salt2 = 0) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(seed),  static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(salt1), static_cast<std::uint32_t>(salt1 >> 32),
      static_cast<std::uint32_t>(salt2), static_cast<std::uint32_t>(salt2 >> 32)};
  return std::mt19937_64(seq);
}

/// splitmix64 finalizer; derives an independent child seed from (seed, salt).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace detail {

inline double uniform_unit(std::mt19937_64& rng) {
  // 53 uniform bits mapped into (0, 1]; never returns 0, so log() is safe.
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

inline std::pair<double, double> gaussian_pair(std::mt19937_64& rng) {
  const double radius = std::sqrt(-2.0 * std::log(uniform_unit(rng)));
  const double angle = 2.0 * std::numbers::pi_v<double> * uniform_unit(rng);
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Typed wrappers.

/// Normalized pure state on n qubits (2^n complex amplitudes).
class PureState {
 public:
  explicit PureState(Vector amplitudes) : amps_(std::move(amplitudes)) {
    qubits_ = qubit_count_for_dim(amps_.size());
    if (std::abs(amps_.squaredNorm() - 1.0) > tol::unit_norm)
      throw std::invalid_argument("PureState: amplitudes are not normalized");
  }

  /// Builds a state from an unnormalized vector by rescaling it.
  static PureState normalized(const Vector& v) {
    const double norm = v.norm();
    if (!(norm > 1e-150))
      throw std::invalid_argument("PureState::normalized: vector is numerically zero");
    return PureState(v / norm);
  }

  int qubits() const { return qubits_; }
  Eigen::Index dim() const { return amps_.size(); }
  const Vector& amplitudes() const { return amps_; }
  complex_t operator[](Eigen::Index i) const { return amps_[i]; }

  /// Rank-one projector |psi><psi|.
  Matrix outer() const { return amps_ * amps_.adjoint(); }

 private:
  Vector amps_;
  int qubits_;
};

/// Density matrix on n qubits: Hermitian, unit trace, positive semidefinite
/// (eigenvalues above tol::eigen_floor).
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix rho) : m_(std::move(rho)) {
    if (m_.rows() != m_.cols())
      throw std::invalid_argument("DensityMatrix: matrix is not square");
    qubits_ = qubit_count_for_dim(m_.rows());
    if (detail::max_abs(m_ - m_.adjoint()) > tol::hermitian)
      throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
    const complex_t tr = m_.trace();
    if (std::abs(tr.real() - 1.0) > tol::trace_one || std::abs(tr.imag()) > tol::trace_one)
      throw std::invalid_argument("DensityMatrix: trace is not 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < tol::eigen_floor)
      throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
  }

  explicit DensityMatrix(const PureState& psi) : DensityMatrix(psi.outer()) {}

  int qubits() const { return qubits_; }
  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
  int qubits_;
};

/// Hermitian operator (witness candidates, observables).
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols())
      throw std::invalid_argument("HermitianOperator: matrix is not square");
    if (detail::max_abs(m_ - m_.adjoint()) > tol::hermitian)
      throw std::invalid_argument("HermitianOperator: matrix is not Hermitian");
  }

  static HermitianOperator zero(Eigen::Index dim) {
    return HermitianOperator(Matrix::Zero(dim, dim));
  }

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

// ---------------------------------------------------------------------------
// Tensor products. Mixing a state with a matrix operand is a compile error;
// use the overload matching both operands.

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

inline PureState tensor_product(const PureState& a, const PureState& b) {
  return PureState(kron(a.amplitudes(), b.amplitudes()));
}

inline DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.matrix(), b.matrix()));
}

inline Matrix tensor_product(const Matrix& a, const Matrix& b) { return kron(a, b); }

// ---------------------------------------------------------------------------
// Partial trace.

/// Reduced density matrix on the qubits listed in `keep`; output qubit j is
/// input qubit keep[j]. Indices must be distinct and in range.
inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  const int n = rho.qubits();
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  std::vector<bool> seen(n, false);
  for (int q : keep) {
    if (q < 0 || q >= n) throw std::invalid_argument("partial_trace: qubit index out of range");
    if (seen[q]) throw std::invalid_argument("partial_trace: duplicate qubit index");
    seen[q] = true;
  }

  const int m = static_cast<int>(keep.size());
  std::vector<int> traced;
  for (int q = 0; q < n; ++q)
    if (!seen[q]) traced.push_back(q);

  // Scatter each reduced / traced sub-index into its full-register bit slots.
  const auto scatter = [n](Eigen::Index sub, const std::vector<int>& qubits) {
    Eigen::Index full = 0;
    const int w = static_cast<int>(qubits.size());
    for (int j = 0; j < w; ++j)
      if ((sub >> (w - 1 - j)) & 1) full |= Eigen::Index{1} << (n - 1 - qubits[j]);
    return full;
  };

  const Eigen::Index rdim = Eigen::Index{1} << m;
  const Eigen::Index tdim = Eigen::Index{1} << (n - m);
  std::vector<Eigen::Index> rbase(rdim), tbase(tdim);
  for (Eigen::Index i = 0; i < rdim; ++i) rbase[i] = scatter(i, keep);
  for (Eigen::Index t = 0; t < tdim; ++t) tbase[t] = scatter(t, traced);

  const Matrix& full = rho.matrix();
  Matrix out = Matrix::Zero(rdim, rdim);
  for (Eigen::Index i = 0; i < rdim; ++i)
    for (Eigen::Index j = 0; j < rdim; ++j) {
      complex_t acc = 0.0;
      for (Eigen::Index t = 0; t < tdim; ++t) acc += full(rbase[i] + tbase[t], rbase[j] + tbase[t]);
      out(i, j) = acc;
    }
  return DensityMatrix(std::move(out));
}

// ---------------------------------------------------------------------------
// Eigensolves.

/// Ascending real eigenvalues of a Hermitian operator.
inline Eigen::VectorXd hermitian_eigenvalues(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Convenience overload; rejects non-Hermitian input like the typed one.
inline Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
  return hermitian_eigenvalues(HermitianOperator(m));
}

// ---------------------------------------------------------------------------
// Haar-random pure states.

inline PureState random_pure_state(int qubits, std::mt19937_64& rng) {
  if (qubits < 1) throw std::invalid_argument("random_pure_state: qubit count must be >= 1");
  const Eigen::Index dim = Eigen::Index{1} << qubits;
  Vector v(dim);
  double norm2 = 0.0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const auto [re, im] = detail::gaussian_pair(rng);
      v[i] = complex_t(re, im);
    }
    norm2 = v.squaredNorm();
  } while (!(norm2 > 1e-280));
  return PureState(v / std::sqrt(norm2));
}

}  // namespace qfill
