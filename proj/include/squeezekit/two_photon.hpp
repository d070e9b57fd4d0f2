#pragma once

#include <vector>

#include "squeezekit/common.hpp"

namespace sqk {

// Sideband amplitudes at +Omega and the conjugate of the one at -Omega.
struct SidebandPair {
  cplx upper;
  cplx lower_conj;
  double omega = 0.0;
};

struct SqueezerState {
  double r = 0.0;
  double theta = 0.0;
};

struct Homodyne {
  double zeta = pi / 2;
};

using QuadTransfer = Mat2;

// (1/sqrt2) [[1, 1], [-i, i]]
const Mat2& quad_basis();
const Mat2& quad_basis_inv();

Vec2 quad_from_sideband(const SidebandPair& p);
SidebandPair sideband_from_quad(const Vec2& q, double omega);

// M diag(f(+W), conj f(-W)) M^-1
Mat2 lift_scalar_transfer(cplx f_plus, cplx f_minus_conj);

// [[cos, sin], [-sin, cos]]
Eigen::Matrix2d rotation(double theta);
Row2 homodyne_vector(double zeta);

// Quadrature covariance of a single-mode squeezed vacuum (vacuum = identity).
Mat2 squeezed_covariance(const SqueezerState& sq);

// h V h^dagger
double homodyne_power(const Row2& h, const Mat2& v);

double quantum_noise_psd(const Mat2& T, const Vec2& R, const SqueezerState& sq,
                         const Homodyne& h);

// Squeeze angle that minimizes quantum_noise_psd for any r > 0.
double optimal_rotation_angle(const Mat2& T, const Homodyne& h);

// Removes jumps of +-pi so the sequence is continuous; the first entry is kept.
std::vector<double> unwrap_pi(std::vector<double> theta);

// Quadrature rotation produced by a lossless sideband-diagonal element.
double rotation_angle_of(cplx f_plus, cplx f_minus);

}  // namespace sqk
