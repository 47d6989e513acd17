#pragma once

#include <span>
#include <string>
#include <vector>

#include "swarmsim/geometry.hpp"

namespace swarmsim {

/// Blade geometry constants from which the rotor coefficients are derived.
struct BladeGeometry {
  double rho = 1.225;     ///< air density (kg/m^3)
  double Ct0 = 0.1;       ///< static thrust coefficient
  double Cd0 = 0.02;      ///< static drag coefficient
  double Cm0 = 0.01;      ///< static moment coefficient
  double theta0 = 0.3;    ///< blade-root pitch (rad)
  double theta1 = -0.1;   ///< blade twist (rad)
  double k_lift = 5.7;    ///< lift-curve slope (1/rad)
  double d = 0.254;       ///< rotor diameter (m)
  int n_blades = 2;
  double c_chord = 0.02;  ///< mean chord (m)
};

struct RotorCoeffs {
  double C_T = 0.0;  ///< thrust, N s^2
  double C_D = 0.0;  ///< H-force, N s
  double C_R = 0.0;  ///< rolling moment, N m s
  double C_M = 0.0;  ///< drag moment arm, m
};

enum class CoeffName { C_T, C_D, C_R, C_M };

struct CoeffWarning {
  CoeffName coeff;
  double raw_value;  ///< value before clamping
};

struct CoeffDerivation {
  RotorCoeffs coeffs;
  std::vector<CoeffWarning> degenerate;  ///< coefficients clamped to epsilon
};

/// Derives C_T, C_D, C_R, C_M from blade geometry. Non-positive results
/// (e.g. C_R of an untwisted flat blade) are reported and clamped to
/// `epsilon`. Throws InvalidGeometry when the geometry itself is invalid.
CoeffDerivation derive_coeffs(const BladeGeometry& g, double epsilon = 1e-12);

struct RotorDef {
  Vec3 r = Vec3::Zero();  ///< offset from CoG, body frame (m)
  int zeta = 1;           ///< +1 CCW, -1 CW
  RotorCoeffs coeffs;
  double omega_max = 1000.0;  ///< rad/s
};

struct RotorWrench {
  Vec3 T = Vec3::Zero();    ///< thrust
  Vec3 H = Vec3::Zero();    ///< H-force
  Vec3 M_R = Vec3::Zero();  ///< rolling moment
  Vec3 M_D = Vec3::Zero();  ///< drag moment
};

/// Single-rotor wrench in the body frame. `v_body` is the vehicle velocity
/// in body axes; only its rotor-plane projection enters H and M_R.
/// Throws NegativeSpeed for omega < 0.
RotorWrench rotor_wrench(double omega, const RotorDef& rotor, const Vec3& v_body);

struct BodyWrench {
  Vec3 force = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
};

/// Sum over rotors of T + H and M_R + M_D + r x (T + H).
/// Throws LengthMismatch when the lists differ in length or are empty.
BodyWrench total_rotor_wrench(std::span<const double> omegas, std::span<const RotorDef> rotors,
                              const Vec3& v_body);

/// First-order motor lag, discretized exactly for a command held over dt.
double motor_lag_step(double omega, double omega_cmd, double tau, double dt);

}  // namespace swarmsim
