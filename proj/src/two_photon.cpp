#include "squeezekit/two_photon.hpp"

#include <cmath>

namespace sqk {

namespace {
const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
const cplx I1{0.0, 1.0};
}  // namespace

const Mat2& quad_basis() {
  static const Mat2 m = [] {
    Mat2 a;
    a << inv_sqrt2, inv_sqrt2, -I1 * inv_sqrt2, I1 * inv_sqrt2;
    return a;
  }();
  return m;
}

const Mat2& quad_basis_inv() {
  // The basis matrix is unitary, so the inverse is the adjoint.
  static const Mat2 m = quad_basis().adjoint();
  return m;
}

Vec2 quad_from_sideband(const SidebandPair& p) {
  return quad_basis() * Vec2(p.upper, p.lower_conj);
}

SidebandPair sideband_from_quad(const Vec2& q, double omega) {
  Vec2 s = quad_basis_inv() * q;
  return {s(0), s(1), omega};
}

Mat2 lift_scalar_transfer(cplx f_plus, cplx f_minus_conj) {
  // Closed form of M diag(a, b) M^-1.
  cplx s = 0.5 * (f_plus + f_minus_conj);
  cplx d = 0.5 * (f_plus - f_minus_conj);
  Mat2 m;
  m << s, I1 * d, -I1 * d, s;
  return m;
}

Eigen::Matrix2d rotation(double theta) {
  double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix2d p;
  p << c, s, -s, c;
  return p;
}

Row2 homodyne_vector(double zeta) {
  return Row2(std::cos(zeta), std::sin(zeta));
}

Mat2 squeezed_covariance(const SqueezerState& sq) {
  Mat2 p = rotation(sq.theta).cast<cplx>();
  Mat2 d = Mat2::Zero();
  d(0, 0) = std::exp(2.0 * sq.r);
  d(1, 1) = std::exp(-2.0 * sq.r);
  return p * d * p.adjoint();
}

double homodyne_power(const Row2& h, const Mat2& v) {
  return (h * v * h.adjoint())(0, 0).real();
}

double quantum_noise_psd(const Mat2& T, const Vec2& R, const SqueezerState& sq,
                         const Homodyne& h) {
  Row2 hv = homodyne_vector(h.zeta);
  double sig = std::norm((hv * R)(0, 0));
  if (!(sig > 1e-24 * R.squaredNorm())) throw NumericalError("homodyne is blind to the signal");
  return homodyne_power(hv, T * squeezed_covariance(sq) * T.adjoint()) / sig;
}

double optimal_rotation_angle(const Mat2& T, const Homodyne& h) {
  Row2 u = homodyne_vector(h.zeta) * T;
  double x = std::norm(u(1)) - std::norm(u(0));
  double y = 2.0 * (u(0) * std::conj(u(1))).real();
  return 0.5 * std::atan2(y, x);
}

std::vector<double> unwrap_pi(std::vector<double> theta) {
  for (std::size_t k = 1; k < theta.size(); ++k) {
    double d = theta[k] - theta[k - 1];
    theta[k] -= pi * std::round(d / pi);
  }
  return theta;
}

double rotation_angle_of(cplx f_plus, cplx f_minus) {
  return 0.5 * (std::arg(f_plus) + std::arg(f_minus));
}

}  // namespace sqk
