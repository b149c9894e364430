#pragma once

#include <stdexcept>
#include <string>

#include "mixedfem/tensors.hpp"

namespace mixedfem {

enum class MaterialModel { ARAP, Corot, NeoHookean };

MaterialModel material_from_name(const std::string& name);
std::string material_name(MaterialModel model);

struct MaterialParams {
  MaterialModel model = MaterialModel::NeoHookean;
  double rho = 1e3;      // kg/m^3
  double youngs = 1e5;   // Pa
  double poisson = 0.45;

  double mu() const { return youngs / (2.0 * (1.0 + poisson)); }
  double lambda() const {
    return youngs * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
  }

  void validate() const {
    if (!(youngs > 0)) throw std::invalid_argument("Young's modulus must be positive");
    if (!(poisson >= 0 && poisson < 0.5))
      throw std::invalid_argument("Poisson ratio must lie in [0, 0.5)");
    if (!(rho > 0)) throw std::invalid_argument("density must be positive");
  }
};

// Raised when neo-Hookean is evaluated outside its det(S) > 0 domain;
// the line search backtracks on it.
struct NonPhysicalStretch : std::domain_error {
  using std::domain_error::domain_error;
};

// Strain energy density and derivatives with respect to the stretch
// 6-vector s. Derivatives follow the symmetric-encoding convention, so
// shear entries carry the usual factor of two.
double energy(const Vec6& s, const MaterialParams& p);
Vec6 gradient(const Vec6& s, const MaterialParams& p);
Mat6 hessian(const Vec6& s, const MaterialParams& p, bool project = true);

// min eigenvalue enforced by SPD projection
inline double spd_floor(const MaterialParams& p) { return 1e-8 * p.mu(); }

}  // namespace mixedfem
