#pragma once

// Cutting-plane construction of warm-start witnesses for the roof ascent.
//
// fill_mixed climbs the dual objective by subgradient steps, which is robust
// but slow to localize the optimum when the state is strongly damped and the
// dual value lives many orders of magnitude below the starting scale. This
// header builds a near-optimal witness directly: on the support face of rho,
// the dual
//     sup_X [ tr(X rho) + inf_psi ( fill_pure(psi) - <psi|X|psi> ) ]
// is a concave maximization whose inner infimum supplies cutting planes
//     h <= fill_pure(psi_j) - <psi_j|X|psi_j>,
// so alternating a small linear program over the accumulated cuts with fresh
// inner minimizations converges to the face optimum. The witness space is the
// commutant of the caller's symmetry group restricted to the face, keeping
// the programs tiny, and a pool of previously found minimizers warm-starts
// every inner call. The pool persists across plan() calls, so planning a
// slowly varying curve point by point reuses each point's minimizers as
// warm starts for the next.
//
// The returned value is re-evaluated at the final witness and carries the
// same lower-bound semantics as inner_minimize; the witness itself is meant
// to seed fill_mixed through RoofOptions::initial_witness.

#include "qfill/convex_roof.hpp"
#include "qfill/core.hpp"
#include "qfill/measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace qfill {

struct PlanOptions {
  int rounds = 80;              // cutting-plane iterations per plan() call
  double radius = 8.0;          // box on each commutant coordinate of the witness
  int pool_cap = 40;            // retained warm-start minimizers
  double model_gap_tol = 1e-6;  // stop once model minus certified is below this
};

struct PlanOutcome {
  HermitianOperator witness;        // face-supported warm-start candidate
  double certified = 0.0;           // dual value re-evaluated at the witness
  double converged_fraction = 0.0;  // restart agreement of that re-evaluation
  double model = 0.0;               // final linear-program optimum (upper model)
  int rounds_used = 0;
};

namespace detail {

inline void validate(const PlanOptions& opts) {
  if (opts.rounds < 1) throw std::invalid_argument("PlanOptions: rounds < 1");
  if (!(opts.radius > 0.0)) throw std::invalid_argument("PlanOptions: radius <= 0");
  if (opts.pool_cap < 0) throw std::invalid_argument("PlanOptions: pool_cap < 0");
  if (!(opts.model_gap_tol >= 0.0)) throw std::invalid_argument("PlanOptions: model_gap_tol < 0");
}

/// Maximizes c.x subject to a x <= b, x >= 0 with every b >= 0, by the primal
/// simplex method on a dense tableau with Bland's rule. Writes the optimizer
/// into `solution` and returns the optimum.
inline double simplex_max(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& c, Eigen::VectorXd& solution) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  Eigen::MatrixXd t(m + 1, n + m + 1);
  t.setZero();
  t.block(0, 0, m, n) = a;
  t.block(0, n, m, m).setIdentity();
  t.col(n + m).head(m) = b;
  t.row(m).head(n) = -c.transpose();
  std::vector<int> basis(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  const double eps = 1e-9;
  for (int iter = 0; iter < 20000; ++iter) {
    int enter = -1;
    for (int j = 0; j < n + m; ++j)
      if (t(m, j) < -eps) {
        enter = j;
        break;
      }
    if (enter < 0) break;
    int leave = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      if (t(i, enter) > eps) {
        const double ratio = t(i, n + m) / t(i, enter);
        if (leave < 0 || ratio < best_ratio - eps ||
            (ratio < best_ratio + eps &&
             basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) break;  // unbounded direction; the box rows preclude this
    t.row(leave) /= t(leave, enter);
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = t(i, enter);
      if (f != 0.0) t.row(i) -= f * t.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }
  solution = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i)
    if (basis[static_cast<std::size_t>(i)] < n)
      solution(basis[static_cast<std::size_t>(i)]) = t(i, n + m);
  return t(m, n + m);
}

/// Orthonormal Hermitian basis of the commutant of `face_group` in r x r
/// matrices (the full Hermitian space when the group is empty).
inline std::vector<Matrix> face_commutant_basis(const std::vector<Matrix>& face_group,
                                                Eigen::Index r) {
  std::vector<Matrix> basis;
  const auto add = [&](Matrix cand) {
    if (!face_group.empty()) cand = average_conjugation(cand, face_group);
    for (const Matrix& b : basis) {
      const complex_t overlap = (b.adjoint() * cand).trace();
      cand -= overlap.real() * b;
    }
    const double norm = cand.norm();
    if (norm > 1e-8) basis.push_back(cand / norm);
  };
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = i; j < r; ++j) {
      Matrix e = Matrix::Zero(r, r);
      if (i == j) {
        e(i, i) = 1.0;
        add(e);
      } else {
        e(i, j) = e(j, i) = 0.5;
        add(e);
        e(i, j) = complex_t(0.0, 0.5);
        e(j, i) = complex_t(0.0, -0.5);
        add(e);
      }
    }
  }
  return basis;
}

}  // namespace detail

/// Stateful planner; see the header comment. Options are fixed at
/// construction: `roof` supplies the inner-minimization budget, seed,
/// support_tol and symmetry generators, `plan` the cutting-plane controls.
class WitnessPlanner {
 public:
  explicit WitnessPlanner(RoofOptions roof, PlanOptions plan = {})
      : roof_(std::move(roof)), plan_(plan) {
    detail::validate(roof_);
    detail::validate(plan_);
  }

  /// Adds a known near-minimizer (for example fill_mixed's inner_minimizer)
  /// to the warm-start pool.
  void remember(const PureState& psi) { push_pool(psi.amplitudes()); }

  PlanOutcome plan(const DensityMatrix& rho) {
    if (rho.qubits() != 3)
      throw std::invalid_argument("WitnessPlanner: expects a three-qubit state");
    for (const Matrix& g : roof_.symmetry_generators) {
      if (g.rows() != rho.dim() || g.cols() != rho.dim())
        throw std::invalid_argument("WitnessPlanner: generator dimension does not match state");
      if (detail::max_abs(g * rho.matrix() - rho.matrix() * g) > 1e-10)
        throw std::invalid_argument(
            "WitnessPlanner: symmetry generator does not commute with rho");
    }

    face_ = detail::support_face(rho.matrix(), roof_.support_tol);
    const Eigen::Index r = face_.basis.cols();

    face_group_.clear();
    if (!roof_.symmetry_generators.empty()) {
      for (const Matrix& u : detail::group_closure(roof_.symmetry_generators)) {
        Matrix ur = face_.basis.adjoint() * u * face_.basis;
        if (detail::max_abs(Matrix(ur.adjoint() * ur) - Matrix::Identity(r, r)) > 1e-8)
          throw numerical_error("WitnessPlanner: symmetry generator does not preserve the support");
        face_group_.push_back(std::move(ur));
      }
    }

    basis_ = detail::face_commutant_basis(face_group_, r);
    const int nb = static_cast<int>(basis_.size());
    cap_ = plan_.radius * (nb + 1);

    Eigen::VectorXd objective(nb + 1);
    for (int b = 0; b < nb; ++b)
      objective(b) = (basis_[static_cast<std::size_t>(b)] * face_.rho_r).trace().real();
    objective(nb) = 1.0;

    // Seed cuts: the face axes, then the carried pool re-projected onto the
    // current face (members that left the face are dropped).
    cut_rows_.clear();
    cut_rhs_.clear();
    for (Eigen::Index k = 0; k < r; ++k) {
      Vector e = Vector::Zero(r);
      e[k] = 1.0;
      add_cut(e);
    }
    std::vector<Vector> carried;
    carried.swap(pool_);
    for (const Vector& psi : carried) {
      Vector phi = face_.basis.adjoint() * psi;
      const double norm = phi.norm();
      if (norm < 0.3) continue;
      phi /= norm;
      pool_.push_back(face_.basis * phi);
      add_cut(phi);
    }

    Matrix best_xr = Matrix::Zero(r, r);
    double best_value = -std::numeric_limits<double>::infinity();
    double last_model = 0.0;
    int rounds_used = 0;
    for (int round = 0; round < plan_.rounds; ++round) {
      const int cuts = static_cast<int>(cut_rows_.size());
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(cuts + nb + 1, nb + 1);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(cuts + nb + 1);
      for (int i = 0; i < cuts; ++i) {
        a.row(i) = cut_rows_[static_cast<std::size_t>(i)].transpose();
        b(i) = cut_rhs_[static_cast<std::size_t>(i)];
      }
      for (int j = 0; j <= nb; ++j) {
        a(cuts + j, j) = 1.0;
        b(cuts + j) = j < nb ? 2.0 * plan_.radius : 2.0 * cap_;
      }
      Eigen::VectorXd sol;
      detail::simplex_max(a, b, objective, sol);

      Matrix xr = Matrix::Zero(r, r);
      for (int bi = 0; bi < nb; ++bi)
        xr += (sol(bi) - plan_.radius) * basis_[static_cast<std::size_t>(bi)];
      const double model = (xr * face_.rho_r).trace().real() + (sol(nb) - cap_);

      Vector phi_min;
      const double value = evaluate(xr, round, false, phi_min);
      if (value > best_value) {
        best_value = value;
        best_xr = xr;
      }
      last_model = model;
      rounds_used = round + 1;
      add_cut(phi_min);
      push_pool(face_.basis * phi_min);
      if (model - best_value < plan_.model_gap_tol) break;
    }

    Vector phi_min;
    const double certified = evaluate(best_xr, -1, true, phi_min);
    push_pool(face_.basis * phi_min);
    Matrix witness = face_.basis * best_xr * face_.basis.adjoint();
    witness = 0.5 * (witness + Matrix(witness.adjoint()));
    return {HermitianOperator(std::move(witness)), certified, last_converged_fraction_,
            last_model, rounds_used};
  }

 private:
  void push_pool(Vector psi) {
    pool_.push_back(std::move(psi));
    if (static_cast<int>(pool_.size()) > plan_.pool_cap)
      pool_.erase(pool_.begin(),
                  pool_.begin() + (static_cast<long>(pool_.size()) - plan_.pool_cap));
  }

  void add_cut(const Vector& phi) {
    const int nb = static_cast<int>(basis_.size());
    Eigen::VectorXd row(nb + 1);
    double shift = 0.0;
    for (int b = 0; b < nb; ++b) {
      const double s = (phi.adjoint() * basis_[static_cast<std::size_t>(b)] * phi).real()(0, 0);
      row(b) = s;
      shift += s;
    }
    row(nb) = 1.0;
    cut_rows_.push_back(std::move(row));
    // Shifted variables u = x + radius, v = h + cap keep every right-hand
    // side nonnegative, so the slack basis starts feasible.
    cut_rhs_.push_back(fill_pure(PureState::normalized(face_.basis * phi)) +
                       plan_.radius * shift + cap_);
  }

  /// Armijo projected descent of fill(V phi) - <phi|xr|phi> from a warm start.
  double descend(const Matrix& xr, Vector& phi, int iters) const {
    Vector psi(face_.basis.rows());
    std::array<complex_t, 8> grad8;
    const auto value_at = [&](const Vector& p) {
      psi.noalias() = face_.basis * p;
      return detail::fill_raw(psi.data()) - std::real(p.dot(xr * p));
    };
    double f = value_at(phi);
    double eta = 0.25;
    Vector grad, tangent, candidate;
    for (int iter = 0; iter < iters; ++iter) {
      psi.noalias() = face_.basis * phi;
      detail::fill_and_grad(psi.data(), grad8.data());
      grad.noalias() =
          face_.basis.adjoint() * Eigen::Map<const Vector>(grad8.data(), face_.basis.rows());
      grad.noalias() -= 2.0 * (xr * phi);
      tangent = grad - phi.dot(grad) * phi;
      const double slope = tangent.squaredNorm();
      if (std::sqrt(slope) <= roof_.inner_tol * std::max(1.0, std::abs(f))) break;
      eta = std::min(1.0, 2.0 * eta);
      bool moved = false;
      while (eta >= 1e-18) {
        candidate = (phi - eta * tangent).normalized();
        const double fc = value_at(candidate);
        if (fc <= f - 1e-4 * eta * slope) {
          phi.swap(candidate);
          f = fc;
          moved = true;
          break;
        }
        eta *= 0.5;
      }
      if (!moved) break;
    }
    return f;
  }

  /// Inner oracle: the library's face minimization plus local descent from
  /// every pool member; returns the dual value at xr and the best minimizer.
  double evaluate(const Matrix& xr, int round, bool heavy, Vector& phi_out) {
    RoofOptions opts = roof_;
    if (heavy) opts.inner_restarts = 3 * roof_.inner_restarts;
    const std::uint64_t salt =
        heavy ? 999983u : static_cast<std::uint64_t>(1000 + round);
    const auto inner = detail::minimize_on_face(xr, face_.basis, opts, opts.seed, salt);
    last_converged_fraction_ = inner.converged_fraction;
    double best = inner.objective;
    phi_out = inner.phi;
    for (const Vector& psi : pool_) {
      Vector phi = face_.basis.adjoint() * psi;
      const double norm = phi.norm();
      if (norm < 0.3) continue;
      phi /= norm;
      const double f = descend(xr, phi, heavy ? 300 : 120);
      if (f < best) {
        best = f;
        phi_out = phi;
      }
    }
    return (xr * face_.rho_r).trace().real() + best;
  }

  RoofOptions roof_;
  PlanOptions plan_;

  detail::SupportFace face_;
  std::vector<Matrix> face_group_;
  std::vector<Matrix> basis_;
  double cap_ = 0.0;
  std::vector<Eigen::VectorXd> cut_rows_;
  std::vector<double> cut_rhs_;
  std::vector<Vector> pool_;
  double last_converged_fraction_ = 0.0;
};

/// One-shot convenience wrapper around WitnessPlanner::plan.
inline PlanOutcome plan_witness(const DensityMatrix& rho, const RoofOptions& roof = {},
                                const PlanOptions& plan = {}) {
  WitnessPlanner planner(roof, plan);
  return planner.plan(rho);
}

}  // namespace qfill
