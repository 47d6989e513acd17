#include "swarmsim/rotor_aero.hpp"

#include <cmath>
#include <numbers>

#include "swarmsim/error.hpp"

namespace swarmsim {

CoeffDerivation derive_coeffs(const BladeGeometry& g, double epsilon) {
  if (!(g.rho > 0.0) || !(g.d > 0.0) || !(g.c_chord > 0.0) || g.n_blades < 2 || !(g.Ct0 > 0.0)) {
    throw Error(ErrorKind::InvalidGeometry,
                "require rho > 0, d > 0, c_chord > 0, n_blades >= 2, Ct0 > 0");
  }
  const double n = g.n_blades;
  const double d2 = g.d * g.d;
  const double two_pi = 2.0 * std::numbers::pi;

  RotorCoeffs raw;
  raw.C_T = g.Ct0 * g.rho * d2 * d2 / (two_pi * two_pi);
  raw.C_D = g.rho * n * g.c_chord * g.Cd0 * d2 / 16.0;
  raw.C_R = (g.theta0 / 48.0 + g.theta1 / 64.0) * g.rho * n * g.k_lift * g.c_chord * d2 * g.d;
  raw.C_M = g.Cm0 / g.Ct0 * g.d;

  CoeffDerivation out;
  out.coeffs = raw;
  auto clamp = [&](double& value, CoeffName name) {
    if (!(value > 0.0)) {
      out.degenerate.push_back({name, value});
      value = epsilon;
    }
  };
  clamp(out.coeffs.C_T, CoeffName::C_T);
  clamp(out.coeffs.C_D, CoeffName::C_D);
  clamp(out.coeffs.C_R, CoeffName::C_R);
  clamp(out.coeffs.C_M, CoeffName::C_M);
  return out;
}

RotorWrench rotor_wrench(double omega, const RotorDef& rotor, const Vec3& v_body) {
  if (omega < 0.0) {
    throw Error(ErrorKind::NegativeSpeed, "rotor speed must be non-negative");
  }
  const Vec3 v_perp(v_body.x(), v_body.y(), 0.0);
  const double zeta = rotor.zeta;
  RotorWrench w;
  w.T = Vec3(0.0, 0.0, omega * omega * rotor.coeffs.C_T);
  w.H = -omega * rotor.coeffs.C_D * v_perp;
  w.M_R = -zeta * omega * rotor.coeffs.C_R * v_perp;
  w.M_D = -zeta * rotor.coeffs.C_M * w.T;
  return w;
}

BodyWrench total_rotor_wrench(std::span<const double> omegas, std::span<const RotorDef> rotors,
                              const Vec3& v_body) {
  if (omegas.size() != rotors.size() || rotors.empty()) {
    throw Error(ErrorKind::LengthMismatch, "need one speed per rotor and at least one rotor");
  }
  BodyWrench total;
  for (std::size_t i = 0; i < rotors.size(); ++i) {
    const RotorWrench w = rotor_wrench(omegas[i], rotors[i], v_body);
    const Vec3 f = w.T + w.H;
    total.force += f;
    total.moment += w.M_R + w.M_D + rotors[i].r.cross(f);
  }
  return total;
}

double motor_lag_step(double omega, double omega_cmd, double tau, double dt) {
  if (!(tau > 0.0)) {
    return omega_cmd;
  }
  return omega_cmd + (omega - omega_cmd) * std::exp(-dt / tau);
}

}  // namespace swarmsim
