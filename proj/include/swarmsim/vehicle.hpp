#pragma once

#include <vector>

#include "swarmsim/rigid_body.hpp"
#include "swarmsim/rotor_aero.hpp"

namespace swarmsim {

/// Airframe description shared by dynamics, control and mixing.
struct VehicleParams {
  MassProperties mass_props{1.5, Mat3(Eigen::Vector3d(0.029, 0.029, 0.055).asDiagonal())};
  std::vector<RotorDef> rotors;
  DragModel drag;
  double motor_tau = 0.02;  ///< first-order motor time constant (s)
  double gravity = kDefaultGravity;
};

/// Quad in X configuration: front-left and rear-right spin CCW, front-right
/// and rear-left spin CW. `arm` is the CoG-to-rotor distance.
std::vector<RotorDef> quad_x_layout(double arm, const RotorCoeffs& coeffs, double omega_max);

/// 1.5 kg quad with 0.254 m rotors on 0.25 m arms, coefficients derived
/// from the default BladeGeometry.
VehicleParams default_quad();

/// Equal rotor speed that balances gravity, assuming identical C_T.
double hover_omega(const VehicleParams& vehicle);

}  // namespace swarmsim
