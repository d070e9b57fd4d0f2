#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sqk {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;
using Row2 = Eigen::RowVector2cd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

namespace phys {
inline constexpr double c = 299792458.0;
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double G = 6.67430e-11;
inline constexpr double msun = 1.98847e30;
inline constexpr double mpc = 3.0856775814913673e22;
}  // namespace phys

// Exit codes of the command-line tool map onto these.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoSolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double hz(double omega) { return omega / two_pi; }
inline double rad_s(double f) { return f * two_pi; }

// Wrap to (-pi, pi].
inline double wrap_phase(double x) {
  double y = std::remainder(x, two_pi);
  return y <= -pi ? y + two_pi : y;
}

}  // namespace sqk
