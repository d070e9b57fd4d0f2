#pragma once

#include <vector>

#include "squeezekit/config.hpp"
#include "squeezekit/ifo.hpp"

namespace sqk {

// Log-spaced frequencies in Hz, endpoints included.
std::vector<double> log_grid(double fmin, double fmax, int points);

enum class RotationModel { single_mode, sideband };

// Optimal squeeze angle along a grid in Hz (unwrapped, anchored at the
// first point).
std::vector<double> required_rotation(const IfoConfig& c, const std::vector<double>& f_hz,
                                      RotationModel model = RotationModel::single_mode);

// tan(theta) = B(x)/A(x), x = (Omega/omega_ref)^2.
struct RotationPolynomial {
  Eigen::VectorXd A, B;
  double omega_ref = two_pi * 10.0;
  // Largest angle error of the fit over the grid [rad].
  double residual = 0.0;
  int degree() const { return static_cast<int>(A.size()) - 1; }
};

RotationPolynomial fit_rotation_angles(const std::vector<double>& omega,
                                       const std::vector<double>& theta, int n,
                                       double tolerance = 1e-6);
RotationPolynomial fit_rotation_polynomial(const IfoConfig& c, const std::vector<double>& f_hz,
                                           int n,
                                           RotationModel model = RotationModel::single_mode,
                                           double tolerance = 1e-6);

// Roots of sum_k coeffs[k] z^k via companion-matrix eigenvalues.
std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs);

struct FilterCavity {
  double gamma = 0.0;
  double detuning = 0.0;
  double length = 1000.0;
  double T() const { return 4.0 * gamma * length / phys::c; }
  CavitySpec spec(double loss = 0.0, double detuning_error = 0.0) const {
    return cavity_from_bandwidth(gamma, detuning + detuning_error, length, loss);
  }
};

// Ordered by decreasing bandwidth.
struct FilterSolution {
  std::vector<FilterCavity> cavities;
};

FilterSolution extract_filter_params(const RotationPolynomial& p, double length = 1000.0);

// Quadrature rotation produced by the cascade, measured like the squeeze
// angle (so that a matched cascade tracks the required angle).
double cascade_rotation(const FilterSolution& s, double omega);

// Largest deviation between the cascade rotation and the required angle,
// modulo pi, after removing the best constant offset (the input squeeze
// angle is free).
double verify_rotation(const FilterSolution& s, const IfoConfig& c,
                       const std::vector<double>& f_hz,
                       RotationModel model = RotationModel::single_mode);
double max_rotation_error(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace sqk
