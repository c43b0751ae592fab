#pragma once

// Certified lower bounds on the convex-roof extension of the fill measure,
//     F(rho) = inf { sum_i w_i fill_pure(psi_i) : sum_i w_i |psi_i><psi_i| = rho },
// via its dual representation
//     F(rho) = sup_X [ tr(X rho) + inf_psi ( fill_pure(psi) - <psi|X|psi> ) ]
// over Hermitian witnesses X. For any fixed X the bracket, evaluated with the
// inner infimum taken globally over normalized pure states, is a lower bound
// on F(rho); subgradient ascent in X tightens it.
//
// The ascent runs on the support face of rho: eigenvectors with eigenvalue
// above a small cutoff span an isometry V, and the dual problem is solved for
// V^dag X V acting on range(rho). Every decomposition of rho lives inside
// that range, so the restriction changes nothing mathematically, but it
// removes the off-support directions along which the unrestricted supremum
// is approached only as |X| grows without bound when rho is rank-deficient.
// Restricted to the face, the supremum is attained at finite X and plain
// subgradient ascent reaches it at modest iteration counts.

#include "qfill/core.hpp"
#include "qfill/measures.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qfill {

struct RoofOptions {
  int inner_restarts = 50;    // Haar-random starts per inner minimization
  int inner_max_iters = 500;  // projected-gradient iterations per restart
  double inner_tol = 1e-9;    // gradient-norm stopping threshold
  int outer_iters = 400;      // subgradient ascent steps on the witness
  double step0 = 0.5;         // ascent step k uses step0 / sqrt(k)
  std::uint64_t seed = 42;
  double support_tol = 1e-12;  // eigenvalue cutoff for the support face
  std::vector<Matrix> symmetry_generators;  // optional commutant projection
  Matrix initial_witness;  // optional warm start for the ascent, else zero
};

enum class BoundKind { ExactAnalytic, CertifiedLowerBound, Heuristic };

inline const char* bound_kind_name(BoundKind kind) {
  switch (kind) {
    case BoundKind::ExactAnalytic: return "exact-analytic";
    case BoundKind::CertifiedLowerBound: return "certified-lower-bound";
    case BoundKind::Heuristic: return "heuristic";
  }
  return "unknown";
}

inline BoundKind bound_kind_from_name(std::string_view name) {
  if (name == "exact-analytic") return BoundKind::ExactAnalytic;
  if (name == "certified-lower-bound") return BoundKind::CertifiedLowerBound;
  if (name == "heuristic") return BoundKind::Heuristic;
  throw std::invalid_argument("unknown bound kind: " + std::string(name));
}

struct RoofDiagnostics {
  std::vector<double> objective;           // dual value at each outer step
  std::vector<double> converged_fraction;  // restart agreement at each step
  int reporting_step = 0;                  // step whose value is reported
  int support_rank = 0;
  double support_mass_dropped = 0.0;  // eigenvalue mass below support_tol
};

struct MeasureResult {
  double value = 0.0;
  BoundKind bound_kind = BoundKind::Heuristic;
  double converged_fraction = 0.0;
  HermitianOperator best_witness;
  PureState inner_minimizer;
  RoofDiagnostics diagnostics;
};

struct InnerResult {
  PureState minimizer;
  double value = 0.0;
  double converged_fraction = 0.0;
};

/// Dual objective tr(X rho) - <psi|X|psi> + fill_pure(psi) at a given psi.
inline double inner_objective(const HermitianOperator& X, const PureState& psi,
                              const DensityMatrix& rho) {
  if (X.dim() != rho.dim() || psi.dim() != rho.dim())
    throw std::invalid_argument("inner_objective: dimension mismatch");
  const double trace_term = std::real((X.matrix() * rho.matrix()).trace());
  const double expectation = std::real(psi.amplitudes().dot(X.matrix() * psi.amplitudes()));
  return trace_term - expectation + fill_pure(psi);
}

namespace detail {

inline constexpr double kRestartAgreement = 1e-6;  // counts a restart as converged
inline constexpr int kMaxGroupSize = 1000;

inline void validate(const RoofOptions& opts) {
  if (opts.inner_restarts < 1) throw std::invalid_argument("RoofOptions: inner_restarts < 1");
  if (opts.inner_max_iters < 1) throw std::invalid_argument("RoofOptions: inner_max_iters < 1");
  if (!(opts.inner_tol > 0.0)) throw std::invalid_argument("RoofOptions: inner_tol <= 0");
  if (opts.outer_iters < 1) throw std::invalid_argument("RoofOptions: outer_iters < 1");
  if (!(opts.step0 > 0.0)) throw std::invalid_argument("RoofOptions: step0 <= 0");
  if (!(opts.support_tol >= 0.0 && opts.support_tol < 1.0))
    throw std::invalid_argument("RoofOptions: support_tol outside [0, 1)");
}

struct SupportFace {
  Matrix basis;  // dim x r isometry onto the numerical range of rho
  Matrix rho_r;  // basis^dag rho basis
  double dropped_mass = 0.0;
};

inline SupportFace support_face(const Matrix& rho, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  const Eigen::VectorXd lam = es.eigenvalues();  // ascending
  Eigen::Index first = 0;
  double dropped = 0.0;
  while (first < lam.size() - 1 && lam[first] <= cutoff) {
    dropped += std::max(0.0, lam[first]);
    ++first;
  }
  SupportFace face;
  face.basis = es.eigenvectors().rightCols(lam.size() - first);
  face.rho_r = face.basis.adjoint() * rho * face.basis;
  face.dropped_mass = dropped;
  return face;
}

struct FaceInnerResult {
  Vector phi;                       // face-coordinate minimizer, unit norm
  Matrix mean_projector;            // |phi><phi| averaged over agreeing restarts
  double objective = 0.0;           // inf of fill(V phi) - <phi|Xr|phi>
  double converged_fraction = 0.0;  // restarts within kRestartAgreement of best
};

inline constexpr int kSheetIters = 30;  // alternating eigenvector budget per sheet

/// Globally minimizes fill_pure(basis * phi) - <phi|Xr|phi> over unit phi.
///
/// Each restart runs projected gradient descent with a backtracking line
/// search. The fill has a square-root cusp on its biseparable zero set, where
/// plain descent crawls and stalls above zero. On that set the objective
/// reduces to maximizing <psi|X|psi> over states product across one of the
/// three cuts, a bilinear problem solved by alternating top-eigenvector
/// iterations; every restart proposes that sheet optimum for each cut, keeps
/// it when it lowers the objective, and resumes descent from the landing
/// point. Restart r draws its Haar start from make_rng(seed, salt, r).
inline FaceInnerResult minimize_on_face(const Matrix& Xr, const Matrix& basis,
                                        const RoofOptions& opts, std::uint64_t seed,
                                        std::uint64_t salt) {
  const Eigen::Index r = Xr.rows();
  const int n_qubits = qubit_count_for_dim(basis.rows());

  Vector psi(basis.rows());
  std::array<complex_t, 8> grad8;
  const auto fill_part = [&](const Vector& phi) {
    psi.noalias() = basis * phi;
    return fill_raw(psi.data());
  };
  const auto value_at = [&](const Vector& phi) {
    return fill_part(phi) - std::real(phi.dot(Xr * phi));
  };

  Vector grad(r), tangent(r), candidate(r);

  // Armijo descent of the full objective; phi and f are updated in place.
  const auto descend_objective = [&](Vector& phi, double& f, int max_iters) {
    double eta = 0.25;
    for (int iter = 0; iter < max_iters; ++iter) {
      psi.noalias() = basis * phi;
      fill_and_grad(psi.data(), grad8.data());
      grad.noalias() = basis.adjoint() * Eigen::Map<const Vector>(grad8.data(), basis.rows());
      grad.noalias() -= 2.0 * (Xr * phi);
      tangent = grad - phi.dot(grad) * phi;
      const double slope = tangent.squaredNorm();
      if (std::sqrt(slope) <= opts.inner_tol * std::max(1.0, std::abs(f))) break;

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
  };

  // The fill vanishes exactly on states that are product across some cut, so
  // there the objective is -<psi|X|psi> and minimizing it means maximizing
  // the quadratic form over chi (x) v. Leaving the face is discouraged by a
  // spectral penalty; the candidate is projected back and scored exactly.
  const bool full_face = r == basis.rows();
  Matrix sheet_op = basis * Xr * basis.adjoint();
  if (!full_face) {
    const double penalty = 2.0 * Xr.norm() + 1.0;
    sheet_op -= penalty * Matrix(Matrix::Identity(basis.rows(), basis.rows()) -
                                 basis * basis.adjoint());
  }

  // Amplitude index of (cut bit b, remaining-qubits index c) for a given cut.
  const auto cut_index = [](int cut, int b, int c) {
    const int d = 4 >> cut;
    return (c / d) * 2 * d + b * d + c % d;
  };

  // Maximizes <psi|sheet_op|psi> over psi = chi (x) v across `cut`, warm
  // started from the current iterate, and writes the product state into psi.
  const auto maximize_on_sheet = [&](const Vector& phi, int cut) {
    psi.noalias() = basis * phi;
    Eigen::Matrix2cd chi_form;
    Eigen::Matrix4cd v_form;
    Eigen::Vector2cd chi;
    Eigen::Vector4cd v;

    chi_form.setZero();
    for (int b = 0; b < 2; ++b)
      for (int b2 = 0; b2 < 2; ++b2)
        for (int c = 0; c < 4; ++c)
          chi_form(b, b2) += psi[cut_index(cut, b, c)] * std::conj(psi[cut_index(cut, b2, c)]);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> chi_init(chi_form);
    chi = chi_init.eigenvectors().col(1);

    double previous = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < kSheetIters; ++iter) {
      v_form.setZero();
      for (int c = 0; c < 4; ++c)
        for (int c2 = 0; c2 < 4; ++c2)
          for (int b = 0; b < 2; ++b)
            for (int b2 = 0; b2 < 2; ++b2)
              v_form(c, c2) += std::conj(chi[b]) *
                               sheet_op(cut_index(cut, b, c), cut_index(cut, b2, c2)) * chi[b2];
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> v_solve(v_form);
      v = v_solve.eigenvectors().col(3);

      chi_form.setZero();
      for (int b = 0; b < 2; ++b)
        for (int b2 = 0; b2 < 2; ++b2)
          for (int c = 0; c < 4; ++c)
            for (int c2 = 0; c2 < 4; ++c2)
              chi_form(b, b2) += std::conj(v[c]) *
                                 sheet_op(cut_index(cut, b, c), cut_index(cut, b2, c2)) * v[c2];
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> chi_solve(chi_form);
      chi = chi_solve.eigenvectors().col(1);

      const double gain = chi_solve.eigenvalues()[1];
      if (gain - previous <= 1e-14 * std::max(1.0, std::abs(gain))) break;
      previous = gain;
    }

    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 4; ++c)
        psi[cut_index(cut, b, c)] = chi[b] * v[c];
  };

  // Best sheet candidate across the three cuts, reprojected into the face and
  // scored with the exact objective; returns false when no cut applies.
  const auto snap_to_zero_set = [&](Vector& phi, double& f_out) {
    bool found = false;
    Vector incumbent = phi;
    for (int cut = 0; cut < 3; ++cut) {
      maximize_on_sheet(incumbent, cut);
      candidate.noalias() = basis.adjoint() * psi;
      const double norm = candidate.norm();
      if (norm < 1e-6) continue;
      candidate /= norm;
      const double fc = value_at(candidate);
      if (!found || fc < f_out) {
        found = true;
        f_out = fc;
        phi = candidate;
      }
    }
    return found;
  };

  FaceInnerResult result;
  double best = std::numeric_limits<double>::infinity();
  int best_index = 0;
  std::vector<double> finals(opts.inner_restarts);
  std::vector<Vector> endpoints(opts.inner_restarts);

  for (int restart = 0; restart < opts.inner_restarts; ++restart) {
    auto rng = make_rng(seed, salt, static_cast<std::uint64_t>(restart));
    Vector phi = random_pure_state(n_qubits, rng).amplitudes();
    if (r < basis.rows()) phi = Vector(phi.head(r)).normalized();

    double f = value_at(phi);
    descend_objective(phi, f, opts.inner_max_iters);
    for (int round = 0; round < 3; ++round) {
      if (fill_part(phi) <= 0.0) break;
      Vector snapped = phi;
      double f_snapped = 0.0;
      if (!snap_to_zero_set(snapped, f_snapped)) break;
      if (!(f_snapped < f)) break;
      phi = std::move(snapped);
      f = f_snapped;
      descend_objective(phi, f, opts.inner_max_iters / 2 + 1);
    }

    finals[restart] = f;
    endpoints[restart] = std::move(phi);
    if (f < best) {
      best = f;
      best_index = restart;
    }
  }

  int agreed = 0;
  result.mean_projector = Matrix::Zero(r, r);
  for (int restart = 0; restart < opts.inner_restarts; ++restart) {
    if (finals[restart] - best <= kRestartAgreement) {
      ++agreed;
      result.mean_projector += endpoints[restart] * endpoints[restart].adjoint();
    }
  }
  result.mean_projector /= static_cast<double>(agreed);
  result.phi = endpoints[best_index];
  result.objective = best;
  result.converged_fraction = static_cast<double>(agreed) / opts.inner_restarts;
  return result;
}

/// Canonical global phase: the first large entry in column-major order is
/// made real positive, so unitaries equal up to phase compare equal.
inline Matrix canonical_phase(const Matrix& u) {
  const double big = max_abs(u);
  for (Eigen::Index j = 0; j < u.cols(); ++j)
    for (Eigen::Index i = 0; i < u.rows(); ++i)
      if (std::abs(u(i, j)) > 0.5 * big) return u * (std::abs(u(i, j)) / u(i, j));
  return u;
}

/// Closure of the generated unitary group, up to global phases. Throws once
/// the closure exceeds kMaxGroupSize elements (non-finite generator set).
inline std::vector<Matrix> group_closure(const std::vector<Matrix>& generators) {
  if (generators.empty()) return {};
  const Eigen::Index dim = generators.front().rows();
  std::vector<Matrix> gens;
  for (const Matrix& g : generators) {
    if (g.rows() != dim || g.cols() != dim)
      throw std::invalid_argument("group_closure: mismatched generator dimensions");
    if (max_abs(Matrix(g.adjoint() * g) - Matrix::Identity(dim, dim)) > tol::unitary)
      throw std::invalid_argument("group_closure: generator is not unitary");
    gens.push_back(canonical_phase(g));
  }

  std::vector<Matrix> group{canonical_phase(Matrix::Identity(dim, dim))};
  const auto known = [&](const Matrix& u) {
    for (const Matrix& g : group)
      if (max_abs(g - u) < 1e-9) return true;
    return false;
  };

  for (const Matrix& g : gens)
    if (!known(g)) group.push_back(g);
  for (std::size_t head = 0; head < group.size(); ++head) {
    for (const Matrix& g : gens) {
      Matrix prod = canonical_phase(group[head] * g);
      if (!known(prod)) {
        if (group.size() >= kMaxGroupSize)
          throw std::invalid_argument("group_closure: generated group exceeds 1000 elements");
        group.push_back(std::move(prod));
      }
    }
  }
  return group;
}

inline Matrix average_conjugation(const Matrix& x, const std::vector<Matrix>& group) {
  Matrix acc = Matrix::Zero(x.rows(), x.cols());
  for (const Matrix& u : group) acc += u * x * u.adjoint();
  acc /= static_cast<double>(group.size());
  Matrix sym = 0.5 * (acc + Matrix(acc.adjoint()));
  return sym;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Symmetry helpers.

/// Unitary that relabels qubits: the state of qubit k moves to qubit perm[k].
inline Matrix permutation_unitary(const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  std::vector<bool> seen(n, false);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[p])
      throw std::invalid_argument("permutation_unitary: not a permutation");
    seen[p] = true;
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix u = Matrix::Zero(dim, dim);
  for (Eigen::Index m = 0; m < dim; ++m) {
    Eigen::Index target = 0;
    for (int k = 0; k < n; ++k)
      if ((m >> (n - 1 - k)) & 1) target |= Eigen::Index{1} << (n - 1 - perm[k]);
    u(target, m) = 1.0;
  }
  return u;
}

/// Diagonal phase exp(2 pi i w(m) / order) where w(m) counts excited qubits.
inline Matrix excitation_phase_unitary(int qubits, int order) {
  if (qubits < 1) throw std::invalid_argument("excitation_phase_unitary: qubits must be >= 1");
  if (order < 1) throw std::invalid_argument("excitation_phase_unitary: order must be >= 1");
  const Eigen::Index dim = Eigen::Index{1} << qubits;
  Matrix u = Matrix::Zero(dim, dim);
  for (Eigen::Index m = 0; m < dim; ++m) {
    const double angle =
        2.0 * std::numbers::pi_v<double> * std::popcount(static_cast<std::uint64_t>(m)) / order;
    u(m, m) = std::polar(1.0, angle);
  }
  return u;
}

/// Projects X onto the commutant of the group generated by `generators`
/// (average of all conjugations U X U^dag over the closure).
inline HermitianOperator twirl(const HermitianOperator& x,
                               const std::vector<Matrix>& generators) {
  if (generators.empty()) return x;
  for (const Matrix& g : generators)
    if (g.rows() != x.dim())
      throw std::invalid_argument("twirl: generator dimension does not match operator");
  const auto group = detail::group_closure(generators);
  return HermitianOperator(detail::average_conjugation(x.matrix(), group));
}

// ---------------------------------------------------------------------------
// Inner minimization over the full pure-state manifold.

inline InnerResult inner_minimize(const HermitianOperator& x, const DensityMatrix& rho,
                                  const RoofOptions& opts = {}, std::uint64_t stream = 0) {
  detail::validate(opts);
  if (x.dim() != rho.dim())
    throw std::invalid_argument("inner_minimize: witness dimension does not match state");
  if (rho.qubits() != 3)
    throw std::invalid_argument("inner_minimize: expects a three-qubit state");
  const Matrix identity = Matrix::Identity(rho.dim(), rho.dim());
  const auto inner = detail::minimize_on_face(x.matrix(), identity, opts, opts.seed, stream);
  const double trace_term = std::real((x.matrix() * rho.matrix()).trace());
  return {PureState(inner.phi), trace_term + inner.objective, inner.converged_fraction};
}

// ---------------------------------------------------------------------------
// The roof lower bound.

inline MeasureResult fill_mixed(const DensityMatrix& rho, const RoofOptions& opts = {}) {
  detail::validate(opts);
  if (rho.qubits() != 3) throw std::invalid_argument("fill_mixed: expects a three-qubit state");
  for (const Matrix& g : opts.symmetry_generators) {
    if (g.rows() != rho.dim() || g.cols() != rho.dim())
      throw std::invalid_argument("fill_mixed: generator dimension does not match state");
    if (detail::max_abs(g * rho.matrix() - rho.matrix() * g) > 1e-10)
      throw std::invalid_argument("fill_mixed: symmetry generator does not commute with rho");
  }

  const auto face = detail::support_face(rho.matrix(), opts.support_tol);
  const Eigen::Index rank = face.basis.cols();

  RoofDiagnostics diag;
  diag.support_rank = static_cast<int>(rank);
  diag.support_mass_dropped = face.dropped_mass;

  if (rank == 1) {
    // Pure state up to truncated mass: the roof is the pure-state value.
    PureState psi(face.basis.col(0));
    const double value = fill_pure(psi);
    diag.objective = {value};
    diag.converged_fraction = {1.0};
    diag.reporting_step = 0;
    return {value,    BoundKind::ExactAnalytic,         1.0,
            HermitianOperator::zero(rho.dim()), std::move(psi), std::move(diag)};
  }

  // Group closure restricted to the face. Generators commute with rho, hence
  // preserve its range, so the restriction stays unitary.
  std::vector<Matrix> face_group;
  if (!opts.symmetry_generators.empty()) {
    for (const Matrix& u : detail::group_closure(opts.symmetry_generators)) {
      Matrix ur = face.basis.adjoint() * u * face.basis;
      if (detail::max_abs(Matrix(ur.adjoint() * ur) - Matrix::Identity(rank, rank)) > 1e-8)
        throw numerical_error("fill_mixed: symmetry generator does not preserve the support");
      face_group.push_back(std::move(ur));
    }
  }

  Matrix xr = Matrix::Zero(rank, rank);
  if (opts.initial_witness.size() != 0) {
    if (opts.initial_witness.rows() != rho.dim() || opts.initial_witness.cols() != rho.dim())
      throw std::invalid_argument("fill_mixed: initial witness dimension does not match state");
    xr = face.basis.adjoint() * opts.initial_witness * face.basis;
    xr = 0.5 * (xr + Matrix(xr.adjoint()));
    if (!face_group.empty()) xr = detail::average_conjugation(xr, face_group);
  }
  diag.objective.reserve(opts.outer_iters);
  diag.converged_fraction.reserve(opts.outer_iters);

  double best = -std::numeric_limits<double>::infinity();
  double best_cf = 0.0;
  Matrix best_xr = xr;
  Vector best_phi;

  for (int k = 1; k <= opts.outer_iters; ++k) {
    const auto inner =
        detail::minimize_on_face(xr, face.basis, opts, opts.seed, static_cast<std::uint64_t>(k));
    const double value = std::real((face.rho_r * xr).trace()) + inner.objective;
    diag.objective.push_back(value);
    diag.converged_fraction.push_back(inner.converged_fraction);
    if (value > best) {
      best = value;
      best_cf = inner.converged_fraction;
      best_xr = xr;
      best_phi = inner.phi;
      diag.reporting_step = k - 1;
    }

    const double gamma = opts.step0 / std::sqrt(static_cast<double>(k));
    Matrix step = xr + gamma * (face.rho_r - inner.mean_projector);
    xr = 0.5 * (step + Matrix(step.adjoint()));
    if (!face_group.empty()) xr = detail::average_conjugation(xr, face_group);
  }

  Matrix witness = face.basis * best_xr * face.basis.adjoint();
  witness = 0.5 * (witness + Matrix(witness.adjoint()));
  PureState minimizer = PureState::normalized(face.basis * best_phi);
  const double value = std::max(0.0, best);
  const BoundKind kind =
      best_cf >= 0.5 ? BoundKind::CertifiedLowerBound : BoundKind::Heuristic;
  return {value,    kind,
          best_cf,  HermitianOperator(std::move(witness)),
          std::move(minimizer), std::move(diag)};
}

// ---------------------------------------------------------------------------
// Upper bounds from explicit decompositions.

/// Average pure-state fill of an explicit decomposition of rho; any such
/// average upper-bounds the roof.
inline double decomposition_upper_bound(
    const DensityMatrix& rho, const std::vector<std::pair<double, PureState>>& ensemble) {
  if (ensemble.empty()) throw std::invalid_argument("decomposition_upper_bound: empty ensemble");
  Matrix acc = Matrix::Zero(rho.dim(), rho.dim());
  double value = 0.0;
  for (const auto& [w, psi] : ensemble) {
    if (!(w >= 0.0)) throw std::invalid_argument("decomposition_upper_bound: negative weight");
    if (psi.dim() != rho.dim())
      throw std::invalid_argument("decomposition_upper_bound: dimension mismatch");
    acc += w * psi.outer();
    value += w * fill_pure(psi);
  }
  if (detail::max_abs(acc - rho.matrix()) > 1e-10)
    throw std::invalid_argument("decomposition_upper_bound: ensemble does not average to rho");
  return value;
}

/// Spectral decomposition of rho as a weighted pure-state ensemble.
inline std::vector<std::pair<double, PureState>> eigen_ensemble(const DensityMatrix& rho,
                                                                double cutoff = 1e-14) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  std::vector<std::pair<double, PureState>> out;
  double total = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double w = es.eigenvalues()[i];
    if (w > cutoff) {
      out.emplace_back(w, PureState(es.eigenvectors().col(i)));
      total += w;
    }
  }
  for (auto& [w, psi] : out) w /= total;
  return out;
}

}  // namespace qfill
