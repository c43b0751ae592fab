#include "qfill/convex_roof.hpp"
#include "qfill/damping.hpp"
#include "qfill/states.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace qfill;

namespace {

RoofOptions quick_options() {
  RoofOptions opts;
  opts.inner_restarts = 12;
  opts.inner_max_iters = 200;
  opts.outer_iters = 60;
  return opts;
}

std::vector<Matrix> exchange_phase_generators() {
  return {permutation_unitary({1, 0, 2}), permutation_unitary({1, 2, 0}),
          excitation_phase_unitary(3, 3)};
}

}  // namespace

TEST_CASE("inner objective identities") {
  const PureState w = make_state(Family::W);
  const DensityMatrix rho{make_state(Family::GHZ)};

  const auto zero = HermitianOperator::zero(8);
  REQUIRE(inner_objective(zero, w, rho) == Catch::Approx(fill_pure(w)).margin(1e-14));

  // X = c I contributes c - c regardless of psi and rho.
  const HermitianOperator shifted{Matrix(-3.0 * Matrix::Identity(8, 8))};
  REQUIRE(inner_objective(shifted, w, rho) == Catch::Approx(fill_pure(w)).margin(1e-12));
}

TEST_CASE("inner minimization drives the objective to its infimum") {
  const DensityMatrix rho{make_state(Family::GHZ)};

  // With X = 0 the infimum of the fill over pure states is 0.
  const InnerResult at_zero = inner_minimize(HermitianOperator::zero(8), rho, quick_options());
  REQUIRE(at_zero.value >= 0.0);
  REQUIRE(at_zero.value < 1e-7);
  REQUIRE(std::abs(at_zero.minimizer.amplitudes().norm() - 1.0) < 1e-12);
  REQUIRE(std::abs(inner_objective(HermitianOperator::zero(8), at_zero.minimizer, rho) -
                   at_zero.value) < 1e-12);

  // Trace terms of a scalar witness cancel exactly.
  const HermitianOperator scalar{Matrix(-2.0 * Matrix::Identity(8, 8))};
  const InnerResult shifted = inner_minimize(scalar, rho, quick_options());
  REQUIRE(std::abs(shifted.value) < 1e-7);

  REQUIRE_THROWS_AS(inner_minimize(HermitianOperator::zero(4), rho, quick_options()),
                    std::invalid_argument);
}

TEST_CASE("inner minimization is deterministic") {
  const DensityMatrix rho = mix({{0.5, make_state(Family::GHZ)}, {0.5, make_state(Family::W)}});
  Matrix x = Matrix::Zero(8, 8);
  x(0, 0) = 0.4;
  x(7, 7) = -0.2;
  x(0, 7) = x(7, 0) = 0.1;
  const HermitianOperator witness{x};

  const InnerResult a = inner_minimize(witness, rho, quick_options(), 5);
  const InnerResult b = inner_minimize(witness, rho, quick_options(), 5);
  REQUIRE(a.value == b.value);
  REQUIRE(a.converged_fraction == b.converged_fraction);
  REQUIRE(a.minimizer.amplitudes() == b.minimizer.amplitudes());
}

TEST_CASE("group closure and twirl") {
  // The two qubit transpositions generate all 6 permutations.
  const auto s3 = detail::group_closure(
      {permutation_unitary({1, 0, 2}), permutation_unitary({0, 2, 1})});
  REQUIRE(s3.size() == 6);

  // Adding the excitation phase of order 3 gives the direct product, 18 elements.
  const auto full = detail::group_closure(exchange_phase_generators());
  REQUIRE(full.size() == 18);

  auto rng = make_rng(61);
  Matrix raw(8, 8);
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j) {
      const auto [re, im] = detail::gaussian_pair(rng);
      raw(i, j) = complex_t(re, im);
    }
  const HermitianOperator x{Matrix(0.5 * (raw + Matrix(raw.adjoint())))};

  const HermitianOperator averaged = twirl(x, exchange_phase_generators());
  // Projection: twirling twice changes nothing.
  const HermitianOperator twice = twirl(averaged, exchange_phase_generators());
  REQUIRE(detail::max_abs(averaged.matrix() - twice.matrix()) < 1e-12);
  // The result commutes with every generator.
  for (const Matrix& g : exchange_phase_generators())
    REQUIRE(detail::max_abs(g * averaged.matrix() - averaged.matrix() * g) < 1e-12);

  // Explicit two-element average for a single involution.
  const Matrix swap = permutation_unitary({1, 0, 2});
  const HermitianOperator pair_avg = twirl(x, {swap});
  const Matrix direct = 0.5 * (x.matrix() + swap * x.matrix() * swap.adjoint());
  REQUIRE(detail::max_abs(pair_avg.matrix() - direct) < 1e-13);

  // A generator of infinite order must be rejected.
  Matrix irrational = Matrix::Identity(8, 8);
  irrational(7, 7) = std::polar(1.0, 1.0);
  REQUIRE_THROWS_AS(twirl(x, {irrational}), std::invalid_argument);

  // Non-unitary generators are rejected.
  Matrix shrink = 0.5 * Matrix::Identity(8, 8);
  REQUIRE_THROWS_AS(twirl(x, {shrink}), std::invalid_argument);
}

TEST_CASE("roof of a pure state is the pure fill") {
  const MeasureResult ghz = fill_mixed(DensityMatrix(make_state(Family::GHZ)));
  REQUIRE(ghz.bound_kind == BoundKind::ExactAnalytic);
  REQUIRE(std::abs(ghz.value - 1.0) < 1e-12);
  REQUIRE(ghz.converged_fraction == 1.0);
  REQUIRE(ghz.diagnostics.support_rank == 1);

  const MeasureResult w = fill_mixed(DensityMatrix(make_state(Family::W)));
  REQUIRE(std::abs(w.value - 8.0 / 9.0) < 1e-12);

  auto rng = make_rng(62);
  for (int trial = 0; trial < 20; ++trial) {
    const PureState psi = random_pure_state(3, rng);
    const MeasureResult res = fill_mixed(DensityMatrix(psi));
    REQUIRE(std::abs(res.value - fill_pure(psi)) < 5e-3);
    REQUIRE(std::abs(res.value - fill_pure(psi)) < 1e-10);  // exact in practice
  }
}

TEST_CASE("roof of a classical mixture of products is zero") {
  Vector e0 = Vector::Zero(8), e7 = Vector::Zero(8);
  e0[0] = 1.0;
  e7[7] = 1.0;
  const DensityMatrix rho = mix({{0.5, PureState(e0)}, {0.5, PureState(e7)}});
  const MeasureResult res = fill_mixed(rho, quick_options());
  REQUIRE(res.value >= 0.0);
  REQUIRE(res.value < 1e-6);
}

TEST_CASE("roof lower bound on the half GHZ half W mixture") {
  const DensityMatrix rho = mix({{0.5, make_state(Family::GHZ)}, {0.5, make_state(Family::W)}});
  const MeasureResult res = fill_mixed(rho);  // default options
  const double exact = (5.0 * 0.25 - 2.0 + 8.0) / 9.0;  // 0.80556
  REQUIRE(res.diagnostics.support_rank == 2);
  REQUIRE(res.value - exact <= 5e-3);
  REQUIRE(res.value - exact >= -2e-2);
  REQUIRE(res.bound_kind != BoundKind::ExactAnalytic);

  // A witness from this run keeps the inner bound below the roof value.
  const InnerResult inner = inner_minimize(res.best_witness, rho, quick_options());
  REQUIRE(inner.value <= exact + 1e-6);
}

TEST_CASE("reported value is the running maximum of the ascent") {
  const DensityMatrix rho = mix({{0.3, make_state(Family::GHZ)}, {0.7, make_state(Family::W)}});
  const MeasureResult res = fill_mixed(rho, quick_options());
  REQUIRE(res.diagnostics.objective.size() == 60);
  REQUIRE(res.diagnostics.converged_fraction.size() == 60);
  double running = -1e300;
  for (double v : res.diagnostics.objective) running = std::max(running, v);
  REQUIRE(res.value == std::max(0.0, running));
  const int step = res.diagnostics.reporting_step;
  REQUIRE(res.diagnostics.objective[step] == running);
  REQUIRE(res.converged_fraction == res.diagnostics.converged_fraction[step]);

  const bool certified = res.converged_fraction >= 0.5;
  REQUIRE(res.bound_kind ==
          (certified ? BoundKind::CertifiedLowerBound : BoundKind::Heuristic));
}

TEST_CASE("roof runs are deterministic") {
  const DensityMatrix rho = mix({{0.4, make_state(Family::GHZ)}, {0.6, make_state(Family::W)}});
  RoofOptions opts = quick_options();
  opts.seed = 99;
  const MeasureResult a = fill_mixed(rho, opts);
  const MeasureResult b = fill_mixed(rho, opts);
  REQUIRE(a.value == b.value);
  REQUIRE(a.diagnostics.objective == b.diagnostics.objective);
  REQUIRE(a.diagnostics.converged_fraction == b.diagnostics.converged_fraction);
  REQUIRE(a.best_witness.matrix() == b.best_witness.matrix());
  REQUIRE(a.inner_minimizer.amplitudes() == b.inner_minimizer.amplitudes());

  opts.seed = 100;
  const MeasureResult c = fill_mixed(rho, opts);
  // Different seeds may land on different restarts; values stay consistent.
  REQUIRE(std::abs(a.value - c.value) < 5e-3);
}

TEST_CASE("twirling reproduces the untwirled bound on symmetric states") {
  const DensityMatrix rho = mix({{0.5, make_state(Family::GHZ)}, {0.5, make_state(Family::W)}});
  RoofOptions plain;
  plain.seed = 7;
  RoofOptions twirled = plain;
  twirled.symmetry_generators = exchange_phase_generators();
  const MeasureResult a = fill_mixed(rho, plain);
  const MeasureResult b = fill_mixed(rho, twirled);
  REQUIRE(std::abs(a.value - b.value) < 2e-3);
}

TEST_CASE("witness invariants of the roof result") {
  const DensityMatrix rho = mix({{0.6, make_state(Family::GHZ)}, {0.4, make_state(Family::W)}});
  const MeasureResult res = fill_mixed(rho, quick_options());
  REQUIRE(res.value >= 0.0);
  REQUIRE(detail::max_abs(res.best_witness.matrix() -
                          Matrix(res.best_witness.matrix().adjoint())) < 1e-12);
  REQUIRE(std::abs(res.inner_minimizer.amplitudes().norm() - 1.0) < 1e-12);
}

TEST_CASE("symmetry generators must commute with the state") {
  // w-theta with an asymmetric first qubit: swapping qubits 0 and 1 is not
  // a symmetry unless theta hits the fully symmetric point.
  const DensityMatrix rho{make_state(Family::WTheta, 0.3)};
  RoofOptions opts = quick_options();
  opts.symmetry_generators = {permutation_unitary({1, 0, 2})};
  REQUIRE_THROWS_AS(fill_mixed(rho, opts), std::invalid_argument);
}

TEST_CASE("support rank is detected from the damped states") {
  // q^2 |000><000| + p^2 |W(theta)><W(theta)| has rank 2.
  const DensityMatrix rho{make_state(Family::WTheta, 0.7)};
  const DensityMatrix damped = apply_amplitude_damping(rho, {0.5, 1.0});
  const MeasureResult res = fill_mixed(damped, quick_options());
  REQUIRE(res.diagnostics.support_rank == 2);

  const DensityMatrix g_damped =
      apply_amplitude_damping(DensityMatrix(make_state(Family::GTheta, 0.8)), {0.5, 1.0});
  const MeasureResult res_g = fill_mixed(g_damped, quick_options());
  REQUIRE(res_g.diagnostics.support_rank == 8);
}

TEST_CASE("option validation") {
  const DensityMatrix rho{make_state(Family::GHZ)};
  RoofOptions opts;
  opts.inner_restarts = 0;
  REQUIRE_THROWS_AS(fill_mixed(rho, opts), std::invalid_argument);
  opts = RoofOptions{};
  opts.step0 = 0.0;
  REQUIRE_THROWS_AS(fill_mixed(rho, opts), std::invalid_argument);
  opts = RoofOptions{};
  opts.support_tol = 1.5;
  REQUIRE_THROWS_AS(fill_mixed(rho, opts), std::invalid_argument);

  Vector small = Vector::Zero(4);
  small[0] = 1.0;
  REQUIRE_THROWS_AS(fill_mixed(DensityMatrix(PureState(small))), std::invalid_argument);
}

TEST_CASE("decomposition averages upper-bound the roof") {
  const PureState ghz = make_state(Family::GHZ);
  const PureState w = make_state(Family::W);

  REQUIRE(std::abs(decomposition_upper_bound(DensityMatrix(ghz), {{1.0, ghz}}) - 1.0) < 1e-12);

  const DensityMatrix half = mix({{0.5, ghz}, {0.5, w}});
  const double naive = decomposition_upper_bound(half, {{0.5, ghz}, {0.5, w}});
  REQUIRE(std::abs(naive - 17.0 / 18.0) < 1e-12);

  // The optimized roof value must not exceed any decomposition average.
  const MeasureResult res = fill_mixed(half, quick_options());
  REQUIRE(res.value <= naive + 1e-9);
  REQUIRE(res.value <= decomposition_upper_bound(half, eigen_ensemble(half)) + 1e-9);

  REQUIRE_THROWS_AS(decomposition_upper_bound(half, {{1.0, ghz}}), std::invalid_argument);
  REQUIRE_THROWS_AS(decomposition_upper_bound(half, {}), std::invalid_argument);
}

TEST_CASE("eigen ensemble reconstructs the state") {
  const DensityMatrix rho = mix({{0.3, make_state(Family::GHZ)}, {0.7, make_state(Family::W)}});
  const auto ensemble = eigen_ensemble(rho);
  Matrix acc = Matrix::Zero(8, 8);
  for (const auto& [wgt, psi] : ensemble) acc += wgt * psi.outer();
  REQUIRE(detail::max_abs(acc - rho.matrix()) < 1e-12);
}
