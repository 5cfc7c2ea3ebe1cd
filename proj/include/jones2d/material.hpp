#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "jones2d/common.hpp"
#include "jones2d/mesh.hpp"

namespace jones {

/// Density field: a positive constant or one positive value per
/// element (piecewise-constant L-infinity representative).
class DensityField {
 public:
  DensityField() : constant_(1.0) {}
  explicit DensityField(double value) : constant_(value) {}
  explicit DensityField(std::vector<double> per_element)
      : constant_(0.0), per_element_(std::move(per_element)) {}

  bool is_constant() const { return per_element_.empty(); }
  double constant_value() const { return constant_; }
  const std::vector<double>& values() const { return per_element_; }

  double at(int element) const {
    return is_constant() ? constant_ : per_element_.at(element);
  }

  double max_value() const {
    if (is_constant()) return constant_;
    return *std::max_element(per_element_.begin(), per_element_.end());
  }

  double min_value() const {
    if (is_constant()) return constant_;
    return *std::min_element(per_element_.begin(), per_element_.end());
  }

 private:
  double constant_;
  std::vector<double> per_element_;
};

/// Isotropic elastic parameters: shear modulus mu > 0, first Lame
/// parameter lambda (may be negative) subject to lambda + mu > 0 in
/// 2D, and a positive density field.
struct MaterialParams {
  double mu = 1.0;
  double lambda = 0.0;
  DensityField rho;
};

/// Checks all material invariants against a mesh, returning the
/// parameters unchanged when they hold.
inline const MaterialParams& validate(const MaterialParams& p, const Mesh2D& m) {
  require(p.mu > 0.0, "shear modulus mu = " + std::to_string(p.mu) +
                          " must be positive");
  const double bound = p.lambda + p.mu;  // lambda + (2/n) mu with n = 2
  require(bound > 0.0, "Lame condition violated: lambda + mu = " +
                           std::to_string(bound) + " is not > 0");
  if (p.rho.is_constant()) {
    require(p.rho.constant_value() > 0.0,
            "density rho = " + std::to_string(p.rho.constant_value()) +
                " must be positive");
  } else {
    require(static_cast<int>(p.rho.values().size()) == m.triangle_count(),
            "per-element density has " + std::to_string(p.rho.values().size()) +
                " entries for " + std::to_string(m.triangle_count()) +
                " elements");
    for (int e = 0; e < m.triangle_count(); ++e)
      require(p.rho.at(e) > 0.0, "density is not positive on element " +
                                     std::to_string(e));
  }
  return p;
}

/// min{2 mu, n (lambda + 2 mu / n)} with n = 2; strictly positive for
/// every validated parameter set.
inline double coercivity_coefficient(const MaterialParams& p) {
  return std::min(2.0 * p.mu, 2.0 * (p.lambda + p.mu));
}

}  // namespace jones
