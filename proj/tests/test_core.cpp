#include "qfill/core.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <complex>
#include <vector>

using namespace qfill;

namespace {

Vector basis_vec(Eigen::Index dim, Eigen::Index k) {
  Vector v = Vector::Zero(dim);
  v[k] = 1.0;
  return v;
}

DensityMatrix random_density(int qubits, int terms, std::mt19937_64& rng) {
  const Eigen::Index dim = Eigen::Index{1} << qubits;
  std::vector<double> w(terms);
  double total = 0.0;
  for (auto& x : w) {
    x = detail::uniform_unit(rng);
    total += x;
  }
  Matrix acc = Matrix::Zero(dim, dim);
  for (int i = 0; i < terms; ++i) acc += (w[i] / total) * random_pure_state(qubits, rng).outer();
  return DensityMatrix(std::move(acc));
}

// Reference partial trace that matches traced bits of row and column indices
// directly, independent of the production implementation's index scattering.
Matrix partial_trace_reference(const Matrix& rho, int n, const std::vector<int>& keep) {
  const int m = static_cast<int>(keep.size());
  const auto reduced_index = [&](Eigen::Index full) {
    Eigen::Index r = 0;
    for (int j = 0; j < m; ++j)
      r |= ((full >> (n - 1 - keep[j])) & 1) << (m - 1 - j);
    return r;
  };
  const auto traced_bits = [&](Eigen::Index full) {
    Eigen::Index t = 0;
    for (int q = 0; q < n; ++q) {
      if (std::find(keep.begin(), keep.end(), q) != keep.end()) continue;
      t = (t << 1) | ((full >> (n - 1 - q)) & 1);
    }
    return t;
  };
  const Eigen::Index dim = rho.rows();
  Matrix out = Matrix::Zero(Eigen::Index{1} << m, Eigen::Index{1} << m);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      if (traced_bits(i) == traced_bits(j)) out(reduced_index(i), reduced_index(j)) += rho(i, j);
  return out;
}

}  // namespace

TEST_CASE("basis ordering puts qubit 0 in the most significant bit") {
  const PureState one(basis_vec(2, 1));
  const PureState zero(basis_vec(2, 0));
  // |1>|0>|0> = |100> must land at index 4.
  const PureState psi = tensor_product(tensor_product(one, zero), zero);
  REQUIRE(psi.dim() == 8);
  REQUIRE(std::abs(psi[4] - 1.0) < 1e-15);
  for (Eigen::Index i = 0; i < 8; ++i)
    if (i != 4) REQUIRE(std::abs(psi[i]) == 0.0);

  const PureState psi2 = tensor_product(tensor_product(zero, one), one);  // |011>
  REQUIRE(std::abs(psi2[3] - 1.0) < 1e-15);
}

TEST_CASE("matrix tensor product") {
  const Matrix i2 = Matrix::Identity(2, 2);
  const Matrix i4 = Matrix::Identity(4, 4);
  REQUIRE(detail::max_abs(tensor_product(i2, i4) - Matrix::Identity(8, 8)) == 0.0);

  Matrix a(2, 2), b(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  b << complex_t(0, 1), 0.0, 0.0, complex_t(0, -1);
  const Matrix k = kron(a, b);
  REQUIRE(k.rows() == 4);
  REQUIRE(k(0, 0) == complex_t(0, 1));
  REQUIRE(k(1, 1) == complex_t(0, -1));
  REQUIRE(k(0, 2) == complex_t(0, 2));
  REQUIRE(k(3, 3) == complex_t(0, -4));

  // Associativity on random matrices.
  auto rng = make_rng(11);
  const Matrix x = random_pure_state(1, rng).outer();
  const Matrix y = random_pure_state(1, rng).outer();
  const Matrix z = random_pure_state(1, rng).outer();
  REQUIRE(detail::max_abs(kron(kron(x, y), z) - kron(x, kron(y, z))) < 1e-15);
}

TEST_CASE("density matrix tensor product stays a valid state") {
  auto rng = make_rng(12);
  const DensityMatrix a = random_density(1, 2, rng);
  const DensityMatrix b = random_density(2, 3, rng);
  const DensityMatrix ab = tensor_product(a, b);
  REQUIRE(ab.qubits() == 3);
  // Tracing out the second factor recovers the first.
  const DensityMatrix back = partial_trace(ab, {0});
  REQUIRE(detail::max_abs(back.matrix() - a.matrix()) < 1e-14);
}

TEST_CASE("typed wrapper validation") {
  REQUIRE_THROWS_AS(PureState(basis_vec(3, 0)), std::invalid_argument);  // not a power of two
  REQUIRE_THROWS_AS(PureState(2.0 * basis_vec(2, 0)), std::invalid_argument);
  REQUIRE_NOTHROW(PureState::normalized(2.0 * basis_vec(2, 0)));

  Matrix nh = Matrix::Zero(2, 2);
  nh(0, 1) = 1.0;
  nh(0, 0) = 1.0;
  REQUIRE_THROWS_AS(DensityMatrix(nh), std::invalid_argument);

  Matrix bad_trace = 0.75 * Matrix::Identity(2, 2);
  REQUIRE_THROWS_AS(DensityMatrix(bad_trace), std::invalid_argument);

  Matrix indefinite = Matrix::Zero(2, 2);
  indefinite(0, 0) = 1.5;
  indefinite(1, 1) = -0.5;
  REQUIRE_THROWS_AS(DensityMatrix(indefinite), std::invalid_argument);

  Matrix rect = Matrix::Zero(2, 4);
  REQUIRE_THROWS_AS(HermitianOperator(rect), std::invalid_argument);
  REQUIRE_NOTHROW(HermitianOperator::zero(8));
}

TEST_CASE("partial trace on product and entangled states") {
  auto rng = make_rng(21);
  const PureState left = random_pure_state(1, rng);
  const PureState right = random_pure_state(2, rng);
  const DensityMatrix product{tensor_product(left, right)};

  const DensityMatrix red0 = partial_trace(product, {0});
  REQUIRE(detail::max_abs(red0.matrix() - left.outer()) < 1e-14);
  const DensityMatrix red12 = partial_trace(product, {1, 2});
  REQUIRE(detail::max_abs(red12.matrix() - right.outer()) < 1e-14);

  // GHZ marginals are maximally mixed.
  Vector ghz = Vector::Zero(8);
  ghz[0] = ghz[7] = 1.0 / std::sqrt(2.0);
  const DensityMatrix ghz_rho{PureState(ghz)};
  for (int q = 0; q < 3; ++q) {
    const Matrix marg = partial_trace(ghz_rho, {q}).matrix();
    REQUIRE(detail::max_abs(marg - 0.5 * Matrix::Identity(2, 2)) < 1e-15);
  }

  // W state: each qubit is excited with probability 1/3.
  Vector w = Vector::Zero(8);
  w[1] = w[2] = w[4] = 1.0 / std::sqrt(3.0);
  const DensityMatrix w_rho{PureState(w)};
  for (int q = 0; q < 3; ++q) {
    const Matrix marg = partial_trace(w_rho, {q}).matrix();
    REQUIRE(std::abs(marg(0, 0).real() - 2.0 / 3.0) < 1e-14);
    REQUIRE(std::abs(marg(1, 1).real() - 1.0 / 3.0) < 1e-14);
    REQUIRE(std::abs(marg(0, 1)) < 1e-15);
  }
}

TEST_CASE("partial trace agrees with the reference contraction") {
  auto rng = make_rng(22);
  const std::vector<std::vector<int>> keeps = {{0}, {1}, {2}, {0, 1}, {0, 2},
                                               {1, 2}, {2, 0}, {1, 0}, {0, 1, 2}};
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix rho = random_density(3, 3, rng);
    for (const auto& keep : keeps) {
      const Matrix got = partial_trace(rho, keep).matrix();
      const Matrix want = partial_trace_reference(rho.matrix(), 3, keep);
      REQUIRE(detail::max_abs(got - want) < 1e-14);
    }
  }
}

TEST_CASE("partial trace keep order permutes the result") {
  auto rng = make_rng(23);
  const DensityMatrix rho = random_density(3, 4, rng);
  const Matrix ab = partial_trace(rho, {0, 2}).matrix();
  const Matrix ba = partial_trace(rho, {2, 0}).matrix();
  // Swapping the two kept qubits exchanges basis indices 1 and 2.
  const Eigen::Index swap[4] = {0, 2, 1, 3};
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j)
      REQUIRE(std::abs(ab(i, j) - ba(swap[i], swap[j])) < 1e-15);
}

TEST_CASE("partial trace input validation") {
  auto rng = make_rng(24);
  const DensityMatrix rho = random_density(3, 2, rng);
  REQUIRE_THROWS_AS(partial_trace(rho, {}), std::invalid_argument);
  REQUIRE_THROWS_AS(partial_trace(rho, {3}), std::invalid_argument);
  REQUIRE_THROWS_AS(partial_trace(rho, {-1}), std::invalid_argument);
  REQUIRE_THROWS_AS(partial_trace(rho, {1, 1}), std::invalid_argument);
}

TEST_CASE("hermitian eigenvalues") {
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  d(2, 2) = 2.0;
  const Eigen::VectorXd lam = hermitian_eigenvalues(HermitianOperator(d));
  REQUIRE(lam.size() == 3);
  REQUIRE(lam[0] == Catch::Approx(1.0));
  REQUIRE(lam[1] == Catch::Approx(2.0));
  REQUIRE(lam[2] == Catch::Approx(3.0));

  Matrix sx = Matrix::Zero(2, 2);
  sx(0, 1) = sx(1, 0) = 1.0;
  const Eigen::VectorXd pm = hermitian_eigenvalues(sx);
  REQUIRE(pm[0] == Catch::Approx(-1.0));
  REQUIRE(pm[1] == Catch::Approx(1.0));

  Matrix nh = Matrix::Zero(2, 2);
  nh(0, 1) = 1.0;
  REQUIRE_THROWS_AS(hermitian_eigenvalues(nh), std::invalid_argument);

  // Spectral sums match matrix invariants on random Hermitian input.
  auto rng = make_rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix m(8, 8);
    for (Eigen::Index i = 0; i < 8; ++i)
      for (Eigen::Index j = 0; j < 8; ++j) {
        const auto [re, im] = detail::gaussian_pair(rng);
        m(i, j) = complex_t(re, im);
      }
    Matrix h = 0.5 * (m + Matrix(m.adjoint()));
    const Eigen::VectorXd lam8 = hermitian_eigenvalues(h);
    REQUIRE(std::abs(lam8.sum() - h.trace().real()) < 1e-10);
    REQUIRE(std::abs(lam8.squaredNorm() - (h * h).trace().real()) < 1e-9);
    REQUIRE(std::is_sorted(lam8.data(), lam8.data() + lam8.size()));
  }
}

TEST_CASE("random pure states are deterministic and Haar distributed") {
  auto rng1 = make_rng(77, 3);
  auto rng2 = make_rng(77, 3);
  const PureState a = random_pure_state(3, rng1);
  const PureState b = random_pure_state(3, rng2);
  REQUIRE(a.amplitudes() == b.amplitudes());  // bitwise

  auto rng3 = make_rng(77, 4);
  const PureState c = random_pure_state(3, rng3);
  REQUIRE(detail::max_abs(Matrix(a.amplitudes().asDiagonal()) -
                          Matrix(c.amplitudes().asDiagonal())) > 1e-3);

  REQUIRE(std::abs(a.amplitudes().squaredNorm() - 1.0) < 1e-14);

  // For one qubit, E |<0|psi>|^2 = 1/2 under the Haar measure.
  auto rng = make_rng(1234);
  double acc = 0.0;
  const int samples = 10000;
  for (int i = 0; i < samples; ++i) acc += std::norm(random_pure_state(1, rng)[0]);
  REQUIRE(std::abs(acc / samples - 0.5) < 0.02);
}

TEST_CASE("seed derivation separates streams") {
  REQUIRE(mix_seed(1, 0) != mix_seed(1, 1));
  REQUIRE(mix_seed(1, 0) != mix_seed(2, 0));
  auto r1 = make_rng(5, 1, 2);
  auto r2 = make_rng(5, 1, 2);
  REQUIRE(r1() == r2());
}
