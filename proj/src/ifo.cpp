#include "squeezekit/ifo.hpp"

#include <cmath>

namespace sqk {

CavitySpec cavity_from_bandwidth(double gamma, double detuning, double length,
                                 double loss) {
  CavitySpec c;
  c.length = length;
  c.T_in = 4.0 * gamma * length / phys::c;
  c.detuning = detuning;
  c.loss = loss;
  return c;
}

double round_trip_phase(const CavitySpec& c, double omega) {
  return 2.0 * (c.detuning + omega) * c.length / phys::c;
}

namespace {

// Small quantities of a round trip, kept separate so that reflectivities
// near one do not lose precision: a = 1 - r_in, k = 1 - r_in t_far,
// u = 1 - e^{-i phi}.
struct RoundTrip {
  double a, b, k, t;
  cplx u;
};

RoundTrip round_trip(const CavitySpec& c, double phi) {
  double rin = std::sqrt(1.0 - c.T_in);
  double t2 = (1.0 - c.T_out) * (1.0 - c.loss);
  double t = std::sqrt(t2);
  double a = c.T_in / (1.0 + rin);
  double b = (c.T_out + c.loss - c.T_out * c.loss) / (1.0 + t);
  double s = std::sin(0.5 * phi);
  return {a, b, a + b - a * b, t, cplx(2.0 * s * s, std::sin(phi))};
}

cplx round_trip_denominator(const RoundTrip& r) { return r.k + r.u - r.k * r.u; }

}  // namespace

cplx cavity_reflection(const CavitySpec& c, double omega) {
  RoundTrip r = round_trip(c, round_trip_phase(c, omega));
  return (r.a - r.b - r.u + r.b * r.u) / round_trip_denominator(r);
}

cplx cavity_loss_transmission(const CavitySpec& c, double omega) {
  double phi = round_trip_phase(c, omega);
  RoundTrip r = round_trip(c, phi);
  return std::sqrt((1.0 - r.t * r.t) * c.T_in) * prop(0.5 * phi) / round_trip_denominator(r);
}

namespace {

struct Mirrors {
  double rS, tS, rI, tI, ss, as;
};

Mirrors mirrors(const IfoConfig& c) {
  return {std::sqrt(1.0 - c.T_SRM), std::sqrt(c.T_SRM), std::sqrt(1.0 - c.T_ITM),
          std::sqrt(c.T_ITM), std::sqrt(1.0 - c.eps_SRC), std::sqrt(1.0 - c.eps_arm)};
}

double src_phase(const IfoConfig& c, double nu) {
  return c.phi_SRC + 2.0 * nu * c.L_SRC / phys::c;
}
double arm_phase(const IfoConfig& c, double nu) { return 2.0 * nu * c.L_arm / phys::c; }

}  // namespace

cplx arm_reflectivity(const IfoConfig& c, double nu) {
  Mirrors m = mirrors(c);
  cplx ea = m.as * prop(arm_phase(c, nu));
  return -m.rI + c.T_ITM * ea / (1.0 - m.rI * ea);
}

cplx arm_transmissivity(const IfoConfig& c, double nu) {
  Mirrors m = mirrors(c);
  double pa = arm_phase(c, nu);
  return m.tI * prop(0.5 * pa) / (1.0 - m.rI * m.as * prop(pa));
}

// SRM: +rS seen from outside, -rS from inside. ITM: -rI from the SRC side,
// +rI from the arm side. SRC loss acts on the ITM-to-SRM pass, arm loss on
// the end-mirror reflection.
SrcArmTransfers src_arm_transfers_at(const IfoConfig& c, double nu) {
  Mirrors m = mirrors(c);
  double ps = src_phase(c, nu);
  cplx es = prop(ps), es_half = prop(0.5 * ps);
  cplx ea = prop(arm_phase(c, nu));
  cplx Rarm = arm_reflectivity(c, nu);
  cplx Tarm = arm_transmissivity(c, nu);
  cplx den = 1.0 + m.rS * m.ss * es * Rarm;

  SrcArmTransfers t;
  t.aA = m.rS + c.T_SRM * m.ss * es * Rarm / den;
  t.ae2 = m.tS * es_half * Tarm / den;
  t.e3A = m.tS * m.ss * es_half * Tarm / den;
  t.e4A = m.tS * es_half / den;
  t.e4e2 = -m.rS * es * Tarm / den;
  t.rho_src = (m.rI - m.rS * m.ss * es) / (1.0 - m.rI * m.rS * m.ss * es);
  t.e3e2 = t.rho_src * ea / (1.0 - m.as * t.rho_src * ea);
  return t;
}

SrcArmTransfers src_arm_sideband_transfers(const IfoConfig& c, double omega, Beam beam) {
  return src_arm_transfers_at(c, beam == Beam::signal ? omega : c.Delta + omega);
}

double ponderomotive_gain(const IfoConfig& c) {
  return 32.0 * c.omega0() * c.I0 / (phys::c * phys::c * c.T_ITM);
}

namespace {

struct Lifted {
  Mat2 aA, ae2, e3A, e3e2, e4A, e4e2;
};

Lifted lifted(const IfoConfig& c, double omega, Beam beam) {
  SrcArmTransfers p = src_arm_sideband_transfers(c, omega, beam);
  SrcArmTransfers n = src_arm_sideband_transfers(c, -omega, beam);
  auto L = [](cplx a, cplx b) { return lift_scalar_transfer(a, std::conj(b)); };
  return {L(p.aA, n.aA),   L(p.ae2, n.ae2),   L(p.e3A, n.e3A),
          L(p.e3e2, n.e3e2), L(p.e4A, n.e4A), L(p.e4e2, n.e4e2)};
}

cplx chi_free(const IfoConfig& c, double omega) { return -1.0 / (c.M * omega * omega); }

// Mirror motion enters the arm like the end-mirror port, before the arm loss.
Vec2 motion_to_output(const IfoConfig& c, const Lifted& l) {
  return std::sqrt(1.0 - c.eps_arm) * l.e3A.col(1);
}

cplx closed_loop_chi(const IfoConfig& c, double omega, const Lifted& l) {
  double g = ponderomotive_gain(c);
  cplx chi = chi_free(c, omega);
  cplx loop = std::sqrt(1.0 - c.eps_arm) * l.e3e2(0, 1);
  return chi / (1.0 - chi * g * loop);
}

}  // namespace

cplx effective_susceptibility(const IfoConfig& c, double omega) {
  return closed_loop_chi(c, omega, lifted(c, omega, Beam::signal));
}

Mat2 ponderomotive_block(const IfoConfig& c, double omega, Port source) {
  Lifted l = lifted(c, omega, Beam::signal);
  double g = ponderomotive_gain(c);
  cplx chi = closed_loop_chi(c, omega, l);
  Vec2 R = motion_to_output(c, l);
  Row2 F;
  switch (source) {
    case Port::input: F = l.ae2.row(0); break;
    case Port::src: F = std::sqrt(c.eps_SRC) * l.e4e2.row(0); break;
    case Port::arm: F = std::sqrt(c.eps_arm) * l.e3e2.row(0); break;
  }
  return g * chi * R * F;
}

// Free-mass displacement carried through the optical spring.
Vec2 response_vector(const IfoConfig& c, double omega) {
  Lifted l = lifted(c, omega, Beam::signal);
  cplx loop = closed_loop_chi(c, omega, l) / chi_free(c, omega);
  return std::sqrt(ponderomotive_gain(c) / (4.0 * phys::hbar)) * loop * motion_to_output(c, l);
}

IfoQuad interferometer_quad(const IfoConfig& c, double omega, Beam beam) {
  Lifted l = lifted(c, omega, beam);
  double ks = std::sqrt(c.eps_SRC), ka = std::sqrt(c.eps_arm);
  IfoQuad q;
  q.input = l.aA;
  q.src = ks * l.e4A;
  q.arm = ka * l.e3A;
  q.response = Vec2::Zero();
  if (beam == Beam::idler) return q;

  double g = ponderomotive_gain(c);
  cplx chi = closed_loop_chi(c, omega, l);
  Vec2 R = motion_to_output(c, l);
  q.input += g * chi * R * l.ae2.row(0);
  q.src += g * chi * R * (ks * l.e4e2.row(0));
  q.arm += g * chi * R * (ka * l.e3e2.row(0));
  q.response = std::sqrt(g / (4.0 * phys::hbar)) * c.L_arm * (chi / chi_free(c, omega)) * R;
  return q;
}

Mat2 interferometer_quad_transfer(const IfoConfig& c, double omega, Beam beam) {
  return interferometer_quad(c, omega, beam).input;
}

SingleMode single_mode_transfer(const IfoConfig& c, double omega) {
  double rho = -std::sqrt(1.0 - c.T_SRM);
  double tau2 = c.T_SRM;
  double phi = -0.5 * c.phi_SRC;
  double L = c.L_arm;
  double gamma = c.T_ITM * phys::c / (4.0 * L);
  double K = 8.0 * c.I0 * c.omega0() /
             (c.M * L * L * omega * omega * (gamma * gamma + omega * omega));
  double beta = std::atan(omega / gamma);
  double h_sql = std::sqrt(8.0 * phys::hbar / (c.M * omega * omega * L * L));
  double s2 = std::sin(2 * phi), c2 = std::cos(2 * phi);
  double sp = std::sin(phi), cp = std::cos(phi);
  cplx e2b = std::polar(1.0, 2 * beta);

  double diag = (1 + rho * rho) * (c2 + 0.5 * K * s2) - 2 * rho * std::cos(2 * beta);
  Mat2 C;
  C << diag, -tau2 * (s2 + K * sp * sp), tau2 * (s2 - K * cp * cp), diag;
  cplx MB = 1.0 + rho * rho * e2b * e2b - 2.0 * rho * e2b * (c2 + 0.5 * K * s2);

  SingleMode s;
  s.T = e2b * C / MB;
  Vec2 D(-(1.0 + rho * e2b) * sp, -(1.0 - rho * e2b) * cp);
  s.response = std::sqrt(2.0 * K * tau2) * std::polar(1.0, beta) * D / (MB * h_sql);
  return s;
}

}  // namespace sqk
