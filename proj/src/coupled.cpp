#include "squeezekit/coupled.hpp"

#include <cmath>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

namespace sqk {

CoupledCavitySpec coupled_from_params(double gamma1, double d1, double d2, double omega_s,
                                      double L1, double L2) {
  CoupledCavitySpec s;
  s.L1 = L1;
  s.L2 = L2;
  s.T1 = 4.0 * gamma1 * L1 / phys::c;
  s.T2 = 4.0 * omega_s * omega_s * L1 * L2 / (phys::c * phys::c);
  s.d1 = d1;
  s.d2 = d2;
  return s;
}

cplx two_cavity_transfer_exact(const CavitySpec& c1, const CavitySpec& c2, double omega) {
  return cavity_reflection(c1, omega) * cavity_reflection(c2, omega);
}

cplx coupled_cavity_transfer_exact(const CoupledCavitySpec& s, double omega) {
  // Each lossless reflection (x - r)/(1 - r x) is written as n/(x conj(n))
  // with n = x - r, which keeps the modulus at one when r is close to one.
  auto small = [](double phi) {
    double h = std::sin(0.5 * phi);
    return cplx(2.0 * h * h, std::sin(phi));  // 1 - e^{-i phi}
  };
  double p1 = 2.0 * (s.d1 + omega) * s.L1 / phys::c;
  double p2 = 2.0 * (s.d2 + omega) * s.L2 / phys::c;
  double a1 = s.T1 / (1.0 + std::sqrt(1.0 - s.T1));
  double a2 = s.T2 / (1.0 + std::sqrt(1.0 - s.T2));
  cplx n2 = small(p2) - a2;  // sqrt(R2) - e2
  cplx rho2 = -n2 / (prop(p2) * std::conj(n2));
  cplx x = rho2 * prop(p1);
  cplx n1 = a1 - (1.0 - x);  // x - sqrt(R1)
  return n1 / (x * std::conj(n1));
}

namespace {
// With the e^{-i phi} propagation convention the expansion reads conj(n)/n.
cplx ratio(cplx n) { return std::conj(n) / n; }
}  // namespace

cplx two_cavity_transfer_approx(const CavitySpec& c1, const CavitySpec& c2, double omega) {
  double p1 = round_trip_phase(c1, omega), p2 = round_trip_phase(c2, omega);
  double T1 = c1.T_in, T2 = c2.T_in;
  return ratio(cplx(0.25 * T1 * T2 - p1 * p2, 0.5 * (T2 * p1 + T1 * p2)));
}

cplx coupled_cavity_transfer_approx(const CoupledCavitySpec& s, double omega) {
  double p1 = 2.0 * (s.d1 + omega) * s.L1 / phys::c;
  double p2 = 2.0 * (s.d2 + omega) * s.L2 / phys::c;
  return -ratio(cplx(s.T2 - p1 * p2, 0.5 * s.T1 * p2));
}

bool approx_regime_ok(double T, double phase) { return T <= 0.1 && std::abs(phase) <= 0.3; }

CoupledCavitySpec two_to_coupled_params(double gamma1, double d1, double L1, double gamma2,
                                        double d2, double L2, std::optional<double> L1p) {
  if (!(gamma1 > 0.0 && gamma2 > 0.0)) throw ConfigError("bandwidths must be positive");
  double g = gamma1 + gamma2;
  double a = L1p.value_or(L1);
  double b = L1 * L2 / a;
  double D1 = (gamma1 * d1 + gamma2 * d2) / g;
  double D2 = (gamma2 * d1 + gamma1 * d2) / g;
  double q = (d1 - d2) / g;
  double ws = std::sqrt((1.0 + q * q) * gamma1 * gamma2);
  return coupled_from_params(g, D1, D2, ws, a, b);
}

TwoCavityParams coupled_to_two_params(const CoupledCavitySpec& s) {
  // Both expansions share the form (W - z1)(W - z2) with z_j = -d_j + i gamma_j.
  const cplx I1{0.0, 1.0};
  double g = s.gamma1(), ws = s.omega_s();
  cplx b = s.d1 + s.d2 - I1 * g;
  cplx c = s.d1 * s.d2 - ws * ws - I1 * g * s.d2;
  cplx disc = std::sqrt(b * b - 4.0 * c);
  cplx z1 = 0.5 * (-b + disc), z2 = 0.5 * (-b - disc);
  if (z2.imag() > z1.imag()) std::swap(z1, z2);
  return {z1.imag(), -z1.real(), z2.imag(), -z2.real()};
}

namespace {

// Parameters in Hz: (d1, d2, gamma1, omega_s).
struct FitFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const std::vector<double>* omega;
  const std::vector<cplx>* fp;
  const std::vector<cplx>* fm;
  CoupledCavitySpec base;
  CoupledModel model;

  int inputs() const { return 4; }
  int values() const { return static_cast<int>(4 * omega->size()); }

  CoupledCavitySpec spec(const Eigen::VectorXd& x) const {
    return coupled_from_params(rad_s(x(2)), rad_s(x(0)), rad_s(x(1)), rad_s(x(3)), base.L1,
                               base.L2);
  }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    CoupledCavitySpec s = spec(x);
    for (std::size_t i = 0; i < omega->size(); ++i) {
      double w = (*omega)[i];
      cplx a = model == CoupledModel::approx ? coupled_cavity_transfer_approx(s, w)
                                             : coupled_cavity_transfer_exact(s, w);
      cplx b = model == CoupledModel::approx ? coupled_cavity_transfer_approx(s, -w)
                                             : coupled_cavity_transfer_exact(s, -w);
      a -= (*fp)[i];
      b -= (*fm)[i];
      r(4 * i) = a.real();
      r(4 * i + 1) = a.imag();
      r(4 * i + 2) = b.real();
      r(4 * i + 3) = b.imag();
    }
    return 0;
  }
};

}  // namespace

CoupledFit fit_coupled_params(const std::vector<double>& omega, const std::vector<cplx>& f_plus,
                              const std::vector<cplx>& f_minus, const CoupledCavitySpec& init,
                              CoupledModel model) {
  FitFunctor fun{&omega, &f_plus, &f_minus, init, model};
  Eigen::NumericalDiff<FitFunctor, Eigen::Central> nd(fun);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<FitFunctor, Eigen::Central>> lm(nd);
  lm.parameters.maxfev = 500 * 9;
  lm.parameters.ftol = 1e-15;
  lm.parameters.xtol = 1e-15;
  lm.parameters.gtol = 0.0;

  Eigen::VectorXd x(4);
  x << hz(init.d1), hz(init.d2), hz(init.gamma1()), hz(init.omega_s());
  Eigen::VectorXd r(fun.values());
  fun(x, r);

  CoupledFit out;
  const int max_iter = 500;
  lm.minimizeInit(x);
  double grad = 0.0;
  for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
    Eigen::MatrixXd J(fun.values(), 4);
    nd.df(x, J);
    fun(x, r);
    grad = (J.transpose() * r).norm();
    if (grad < 1e-10) break;
    auto status = lm.minimizeOneStep(x);
    if (status != Eigen::LevenbergMarquardtSpace::Running) {
      ++out.iterations;
      nd.df(x, J);
      fun(x, r);
      grad = (J.transpose() * r).norm();
      break;
    }
  }
  fun(x, r);
  out.spec = fun.spec(x);
  out.cost = r.squaredNorm();
  if (!(grad < 1e-10) && out.iterations >= max_iter)
    throw FitError("coupled-cavity fit did not converge", out);
  if (!std::isfinite(out.cost)) throw FitError("coupled-cavity fit diverged", out);
  return out;
}

double transfer_rotation(cplx f_plus, cplx f_minus) {
  return -rotation_angle_of(f_plus, f_minus);
}

namespace {

std::vector<double> two_cavity_rotation(const FilterSolution& t, const std::vector<double>& f_hz) {
  std::vector<double> th;
  CavitySpec c1 = t.cavities.at(0).spec(), c2 = t.cavities.at(1).spec();
  for (double f : f_hz) {
    double w = rad_s(f);
    th.push_back(transfer_rotation(two_cavity_transfer_exact(c1, c2, w),
                                   two_cavity_transfer_exact(c1, c2, -w)));
  }
  return th;
}

std::vector<double> coupled_rotation(const CoupledCavitySpec& s, const std::vector<double>& f_hz) {
  std::vector<double> th;
  for (double f : f_hz) {
    double w = rad_s(f);
    th.push_back(transfer_rotation(coupled_cavity_transfer_exact(s, w),
                                   coupled_cavity_transfer_exact(s, -w)));
  }
  return th;
}

CoupledCavitySpec analytic_map(const FilterSolution& t) {
  if (t.cavities.size() != 2) throw ConfigError("the equivalence needs exactly two cavities");
  const auto& a = t.cavities[0];
  const auto& b = t.cavities[1];
  return two_to_coupled_params(a.gamma, a.detuning, a.length, b.gamma, b.detuning, b.length);
}

}  // namespace

EquivalenceReport coupled_equivalence(const FilterSolution& target, const std::vector<double>& f_hz,
                                      CoupledModel fit_model) {
  EquivalenceReport rep;
  rep.analytic = analytic_map(target);
  std::vector<double> ref = two_cavity_rotation(target, f_hz);
  rep.max_discrepancy = max_rotation_error(ref, coupled_rotation(rep.analytic, f_hz));

  std::vector<double> w;
  std::vector<cplx> fp, fm;
  CavitySpec c1 = target.cavities[0].spec(), c2 = target.cavities[1].spec();
  for (double f : f_hz) {
    double x = rad_s(f);
    w.push_back(x);
    auto tf = fit_model == CoupledModel::approx ? two_cavity_transfer_approx
                                                : two_cavity_transfer_exact;
    // The three-mirror cavity differs from the cascade by an overall sign,
    // which leaves every quadrature transfer unchanged.
    fp.push_back(-tf(c1, c2, x));
    fm.push_back(-tf(c1, c2, -x));
  }
  CoupledFit fit = fit_coupled_params(w, fp, fm, rep.analytic, fit_model);
  rep.fitted = fit.spec;
  rep.fitted_discrepancy = max_rotation_error(ref, coupled_rotation(fit.spec, f_hz));
  rep.required_T = rep.actual_T = rep.analytic.T2;
  rep.feasible = rep.required_T >= rep.floor;
  return rep;
}

EquivalenceReport src_arm_feasibility(const IfoConfig& c, const FilterSolution& target,
                                      const std::vector<double>& f_hz, double floor) {
  EquivalenceReport rep;
  CoupledCavitySpec m = analytic_map(target);
  // SRC takes the input sub-cavity, the arm the far one; only L1' L2' is fixed.
  double L_src = m.L1 * m.L2 / c.L_arm;
  CoupledCavitySpec s = coupled_from_params(m.gamma1(), m.d1, m.d2, m.omega_s(), L_src, c.L_arm);
  rep.analytic = s;
  rep.required_T = s.T2;
  rep.actual_T = c.T_ITM;
  rep.floor = floor;
  rep.feasible = rep.required_T >= floor && std::abs(rep.actual_T - rep.required_T) <=
                                                0.05 * rep.required_T;

  CoupledCavitySpec actual = s;
  actual.T2 = c.T_ITM;
  rep.max_discrepancy =
      max_rotation_error(two_cavity_rotation(target, f_hz), coupled_rotation(actual, f_hz));
  return rep;
}

}  // namespace sqk
