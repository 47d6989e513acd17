#include "swarmsim/vehicle.hpp"

#include <cmath>
#include <numbers>

namespace swarmsim {

std::vector<RotorDef> quad_x_layout(double arm, const RotorCoeffs& coeffs, double omega_max) {
  const double a = arm / std::numbers::sqrt2;
  // front-left, front-right, rear-right, rear-left (FLU body axes)
  const Vec3 offsets[4] = {{a, a, 0.0}, {a, -a, 0.0}, {-a, -a, 0.0}, {-a, a, 0.0}};
  const int spin[4] = {1, -1, 1, -1};
  std::vector<RotorDef> rotors;
  for (int i = 0; i < 4; ++i) {
    rotors.push_back({offsets[i], spin[i], coeffs, omega_max});
  }
  return rotors;
}

VehicleParams default_quad() {
  VehicleParams v;
  const CoeffDerivation derived = derive_coeffs(BladeGeometry{});
  v.rotors = quad_x_layout(0.25, derived.coeffs, 1000.0);
  return v;
}

double hover_omega(const VehicleParams& vehicle) {
  double ct_sum = 0.0;
  for (const RotorDef& r : vehicle.rotors) {
    ct_sum += r.coeffs.C_T;
  }
  return std::sqrt(vehicle.mass_props.mass() * vehicle.gravity / ct_sum);
}

}  // namespace swarmsim
