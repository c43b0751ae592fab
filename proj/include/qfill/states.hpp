#pragma once

// Canonical three-qubit state families and convex mixing.
//
// Basis indices follow the register convention of core.hpp: |abc> = 4a+2b+c.

#include "qfill/core.hpp"

#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qfill {

enum class Family { GTheta, WTheta, WBarTheta, SigmaTheta, GHZ, W };

struct StateFamily {
  Family kind = Family::GHZ;
  double theta = 0.0;  // ignored by GHZ and W
};

inline const char* family_name(Family kind) {
  switch (kind) {
    case Family::GTheta: return "g-theta";
    case Family::WTheta: return "w-theta";
    case Family::WBarTheta: return "wbar-theta";
    case Family::SigmaTheta: return "sigma-theta";
    case Family::GHZ: return "ghz";
    case Family::W: return "w";
  }
  return "unknown";
}

inline Family family_from_name(std::string_view name) {
  if (name == "g-theta") return Family::GTheta;
  if (name == "w-theta") return Family::WTheta;
  if (name == "wbar-theta") return Family::WBarTheta;
  if (name == "sigma-theta") return Family::SigmaTheta;
  if (name == "ghz") return Family::GHZ;
  if (name == "w") return Family::W;
  throw std::invalid_argument("unknown state family: " + std::string(name));
}

inline PureState make_state(const StateFamily& family) {
  Vector v = Vector::Zero(8);
  const double c = std::cos(family.theta);
  const double s = std::sin(family.theta);
  switch (family.kind) {
    case Family::GHZ:  // (|000> + |111>) / sqrt(2)
      v[0] = v[7] = 1.0 / std::sqrt(2.0);
      break;
    case Family::W:  // (|100> + |010> + |001>) / sqrt(3)
      v[4] = v[2] = v[1] = 1.0 / std::sqrt(3.0);
      break;
    case Family::GTheta:  // cos(t)|111> + sin(t)|000>
      v[7] = c;
      v[0] = s;
      break;
    case Family::WTheta:  // cos(t)|100> + sin(t)(|010> + |001>)/sqrt(2)
      v[4] = c;
      v[2] = v[1] = s / std::sqrt(2.0);
      break;
    case Family::WBarTheta:  // cos(t)|011> + sin(t)(|101> + |110>)/sqrt(2)
      v[3] = c;
      v[5] = v[6] = s / std::sqrt(2.0);
      break;
    case Family::SigmaTheta:  // cos(t)|111> + sin(t)(|100> + |010> + |001>)/sqrt(3)
      v[7] = c;
      v[4] = v[2] = v[1] = s / std::sqrt(3.0);
      break;
  }
  return PureState(std::move(v));
}

inline PureState make_state(Family kind, double theta = 0.0) {
  return make_state(StateFamily{kind, theta});
}

/// Convex mixture of pure states. Weights must be nonnegative and sum to 1
/// within tol::trace_one; all states must share one register size.
inline DensityMatrix mix(const std::vector<std::pair<double, PureState>>& ensemble) {
  if (ensemble.empty()) throw std::invalid_argument("mix: ensemble is empty");
  const Eigen::Index dim = ensemble.front().second.dim();
  double total = 0.0;
  for (const auto& [w, psi] : ensemble) {
    if (psi.dim() != dim) throw std::invalid_argument("mix: mismatched state dimensions");
    if (!(w >= 0.0)) throw std::invalid_argument("mix: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > tol::trace_one)
    throw std::invalid_argument("mix: weights do not sum to 1");
  Matrix acc = Matrix::Zero(dim, dim);
  for (const auto& [w, psi] : ensemble) acc += w * psi.outer();
  return DensityMatrix(std::move(acc));
}

}  // namespace qfill
