#include "squeezekit/filter_synthesis.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace sqk {

std::vector<double> log_grid(double fmin, double fmax, int points) {
  if (!(fmin > 0.0 && fmax > fmin) || points < 2)
    throw ConfigError("frequency grid needs 0 < fmin < fmax and at least 2 points");
  std::vector<double> f(points);
  double a = std::log(fmin), b = std::log(fmax);
  for (int k = 0; k < points; ++k) f[k] = std::exp(a + (b - a) * k / (points - 1));
  f.front() = fmin;
  f.back() = fmax;
  return f;
}

std::vector<double> required_rotation(const IfoConfig& c, const std::vector<double>& f_hz,
                                      RotationModel model) {
  Homodyne h{c.zeta_s};
  std::vector<double> th;
  th.reserve(f_hz.size());
  for (double f : f_hz) {
    double w = rad_s(f);
    Mat2 T = model == RotationModel::single_mode
                 ? single_mode_transfer(c, w).T
                 : interferometer_quad_transfer(lossless(c), w, Beam::signal);
    th.push_back(optimal_rotation_angle(T, h));
  }
  return unwrap_pi(std::move(th));
}

RotationPolynomial fit_rotation_angles(const std::vector<double>& omega,
                                       const std::vector<double>& theta, int n,
                                       double tolerance) {
  if (n < 1) throw ConfigError("polynomial degree must be at least 1");
  const std::size_t N = omega.size();
  if (N < static_cast<std::size_t>(4 * n + 4))
    throw ConfigError(fmt::format("degree {} needs at least {} grid points", n, 4 * n + 4));

  RotationPolynomial p;
  // A(x) sin(theta) - B(x) cos(theta) = 0 is homogeneous in (A, B): take the
  // smallest right singular vector.
  Eigen::MatrixXd D(N, 2 * (n + 1));
  for (std::size_t i = 0; i < N; ++i) {
    double x = std::pow(omega[i] / p.omega_ref, 2);
    double xk = 1.0;
    for (int k = 0; k <= n; ++k, xk *= x) {
      D(i, k) = std::sin(theta[i]) * xk;
      D(i, n + 1 + k) = -std::cos(theta[i]) * xk;
    }
  }
  // Column scaling keeps high powers of x from dominating the SVD.
  Eigen::VectorXd scale = D.colwise().norm().cwiseMax(1e-300);
  Eigen::MatrixXd Ds = D * scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ds, Eigen::ComputeFullV);
  Eigen::VectorXd v = svd.matrixV().col(2 * n + 1).cwiseQuotient(scale);
  v /= v.norm();
  p.A = v.head(n + 1);
  p.B = v.tail(n + 1);

  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    double x = std::pow(omega[i] / p.omega_ref, 2);
    double a = 0.0, b = 0.0, xk = 1.0;
    for (int k = 0; k <= n; ++k, xk *= x) {
      a += p.A(k) * xk;
      b += p.B(k) * xk;
    }
    double d = std::remainder(theta[i] - std::atan2(b, a), pi);
    worst = std::max(worst, std::abs(d));
  }
  p.residual = worst;
  if (!(worst < tolerance))
    throw NumericalError(fmt::format(
        "rotation angle is not rational of degree {} (fit residual {:.3g} rad)", n, worst));
  return p;
}

RotationPolynomial fit_rotation_polynomial(const IfoConfig& c, const std::vector<double>& f_hz,
                                           int n, RotationModel model, double tolerance) {
  std::vector<double> w(f_hz.size());
  std::transform(f_hz.begin(), f_hz.end(), w.begin(), rad_s);
  return fit_rotation_angles(w, required_rotation(c, f_hz, model), n, tolerance);
}

std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs) {
  std::size_t deg = coeffs.size();
  while (deg > 0 && coeffs[deg - 1] == cplx(0.0)) --deg;
  if (deg < 2) return {};
  const int n = static_cast<int>(deg) - 1;
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) C(0, k) = -coeffs[n - 1 - k] / coeffs[n];
  for (int k = 1; k < n; ++k) C(k, k - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  if (es.info() != Eigen::Success) throw NumericalError("companion eigenvalue solve failed");
  std::vector<cplx> r(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return r;
}

FilterSolution extract_filter_params(const RotationPolynomial& p, double length) {
  const int n = p.degree();
  // sum_k (A_k + i B_k) (-s^2)^k with s = Omega/omega_ref.
  std::vector<cplx> coeffs(2 * n + 1, 0.0);
  for (int k = 0; k <= n; ++k)
    coeffs[2 * k] = cplx(p.A(k), p.B(k)) * (k % 2 ? -1.0 : 1.0);
  FilterSolution s;
  for (cplx z : polynomial_roots(coeffs)) {
    if (z.real() <= 0.0) continue;
    s.cavities.push_back({z.real() * p.omega_ref, z.imag() * p.omega_ref, length});
  }
  if (static_cast<int>(s.cavities.size()) != n)
    throw NumericalError(fmt::format("expected {} stable roots, found {}", n,
                                     s.cavities.size()));
  std::sort(s.cavities.begin(), s.cavities.end(),
            [](const FilterCavity& a, const FilterCavity& b) {
              double tol = 1e-9 * std::max(a.gamma, b.gamma);
              if (std::abs(a.gamma - b.gamma) > tol) return a.gamma > b.gamma;
              return std::abs(a.detuning) < std::abs(b.detuning);
            });
  return s;
}

double cascade_rotation(const FilterSolution& s, double omega) {
  double psi = 0.0;
  for (const auto& cav : s.cavities) {
    CavitySpec spec = cav.spec();
    psi += rotation_angle_of(cavity_reflection(spec, omega), cavity_reflection(spec, -omega));
  }
  // lift(e^{ia}, e^{-ib}) rotates by -(a+b)/2 in the squeeze-angle sense.
  return -psi;
}

double max_rotation_error(const std::vector<double>& a, const std::vector<double>& b) {
  cplx mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += std::polar(1.0, 2.0 * (a[i] - b[i]));
  double offset = a.empty() || std::abs(mean) == 0.0 ? 0.0 : 0.5 * std::arg(mean);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(std::remainder(a[i] - b[i] - offset, pi)));
  return worst;
}

double verify_rotation(const FilterSolution& s, const IfoConfig& c,
                       const std::vector<double>& f_hz, RotationModel model) {
  std::vector<double> req = required_rotation(c, f_hz, model);
  std::vector<double> got;
  for (double f : f_hz) got.push_back(cascade_rotation(s, rad_s(f)));
  return max_rotation_error(req, got);
}

}  // namespace sqk
