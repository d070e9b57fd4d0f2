#pragma once

#include "squeezekit/config.hpp"
#include "squeezekit/two_photon.hpp"

namespace sqk {

// Propagation over a round-trip phase phi multiplies the field by e^{-i phi}.
inline cplx prop(double phi) { return std::polar(1.0, -phi); }

// Single optical cavity. T_out is the far-mirror power transmission; it is
// lumped with the round-trip loss into one vacuum port.
struct CavitySpec {
  double length = 1000.0;
  double T_in = 0.0;
  double T_out = 0.0;
  double detuning = 0.0;
  double loss = 0.0;

  double half_bandwidth() const { return phys::c * T_in / (4.0 * length); }
};

CavitySpec cavity_from_bandwidth(double gamma, double detuning, double length,
                                 double loss = 0.0);

double round_trip_phase(const CavitySpec& c, double omega);
// Exact reflection; 1 on resonance for a lossless cavity.
cplx cavity_reflection(const CavitySpec& c, double omega);
// Amplitude from the internal loss port to the reflected beam.
cplx cavity_loss_transmission(const CavitySpec& c, double omega);

enum class Beam { signal, idler };
enum class Port { input, src, arm };

// Sideband transfer functions of the signal-recycled arm at one sideband
// offset from the carrier. a' is the dark-port input, A the output, e3 the
// arm loss port at the end mirror, e4 the SRC loss port at the input test
// mass. e2 is the field arriving at the end mirror. Loss ports are per unit
// injected amplitude.
struct SrcArmTransfers {
  cplx aA, ae2, e3A, e3e2, e4A, e4e2;
  // Reflectivity of the SRC seen from inside the arm.
  cplx rho_src;
};

SrcArmTransfers src_arm_transfers_at(const IfoConfig& c, double nu);
SrcArmTransfers src_arm_sideband_transfers(const IfoConfig& c, double omega, Beam beam);

// Arm seen from the SRC side, offset nu from the carrier.
cplx arm_reflectivity(const IfoConfig& c, double nu);
cplx arm_transmissivity(const IfoConfig& c, double nu);

// Radiation-pressure gain: force quadrature per unit field quadrature,
// scaled so that response = sqrt(g/(4 hbar)) per metre.
double ponderomotive_gain(const IfoConfig& c);
// Closed-loop differential susceptibility including the optical spring.
cplx effective_susceptibility(const IfoConfig& c, double omega);

// Quadrature transfers of one beam through the interferometer, from the
// dark-port input and from the vacuum entering at each loss point (the
// sqrt(eps) coupling included). The response is per unit strain and is
// zero for the idler.
struct IfoQuad {
  Mat2 input;
  Mat2 src;
  Mat2 arm;
  Vec2 response;
};

IfoQuad interferometer_quad(const IfoConfig& c, double omega, Beam beam);
Mat2 interferometer_quad_transfer(const IfoConfig& c, double omega, Beam beam);
Mat2 ponderomotive_block(const IfoConfig& c, double omega, Port source);
// Response per metre of differential displacement.
Vec2 response_vector(const IfoConfig& c, double omega);

// Long-wavelength single-mode limit of the signal transfer (lossless).
struct SingleMode {
  Mat2 T;
  Vec2 response;
};
SingleMode single_mode_transfer(const IfoConfig& c, double omega);

}  // namespace sqk
