#include "squeezekit/horizon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

namespace sqk {

namespace {
const double c_km_s = phys::c / 1000.0;
}

double comoving_distance_mpc(double z, const HorizonOptions& o) {
  if (z <= 0.0) return 0.0;
  auto inv_e = [&](double x) {
    double a = 1.0 + x;
    return 1.0 / std::sqrt(o.omega_m * a * a * a + 1.0 - o.omega_m);
  };
  double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(inv_e, 0.0, z, 10,
                                                                            1e-12);
  return c_km_s / o.H0 * v;
}

double luminosity_distance_mpc(double z, const HorizonOptions& o) {
  return (1.0 + z) * comoving_distance_mpc(z, o);
}

double isco_frequency(double m_total_source, double z) {
  double m = m_total_source * phys::msun * (1.0 + z);
  return std::pow(phys::c, 3) / (std::pow(6.0, 1.5) * pi * phys::G * m);
}

StrainNoise::StrainNoise(const NoiseCurve& c) : f_(c.freq_hz) {
  if (f_.size() < 2) throw ConfigError("noise curve needs at least two points");
  for (std::size_t i = 0; i < f_.size(); ++i) {
    if (!(c.total[i] > 0.0) || (i > 0 && !(f_[i] > f_[i - 1])))
      throw ConfigError("noise curve must be positive on an increasing grid");
    log_f_.push_back(std::log(f_[i]));
    log_a_.push_back(std::log(c.total[i]));
  }
}

double StrainNoise::asd(double f) const {
  if (f < f_.front() || f > f_.back()) return std::numeric_limits<double>::infinity();
  double x = std::log(f);
  auto it = std::upper_bound(log_f_.begin(), log_f_.end(), x);
  std::size_t k = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - log_f_.begin(), 1),
                                        log_f_.size() - 1);
  double t = (x - log_f_[k - 1]) / (log_f_[k] - log_f_[k - 1]);
  return std::exp(log_a_[k - 1] + t * (log_a_[k] - log_a_[k - 1]));
}

double inspiral_snr(const StrainNoise& n, double m_total_source, double z,
                    const HorizonOptions& o) {
  double f_hi = std::min(isco_frequency(m_total_source, z), n.f_max());
  double f_lo = n.f_min();
  if (!(f_hi > f_lo)) return 0.0;
  double dl = luminosity_distance_mpc(z, o) * phys::mpc;
  if (!(dl > 0.0)) return std::numeric_limits<double>::infinity();
  // Equal masses: chirp mass = M eta^{3/5} with eta = 1/4.
  double mc = m_total_source * (1.0 + z) * phys::msun * std::pow(0.25, 0.6);
  double tc = phys::G * mc / std::pow(phys::c, 3);
  double amp2 = 5.0 / 24.0 * std::pow(pi, -4.0 / 3.0) * std::pow(tc, 5.0 / 3.0) *
                phys::c * phys::c / (dl * dl);
  auto integrand = [&](double lf) {
    double f = std::exp(lf);
    double a = n.asd(f);
    return f * std::pow(f, -7.0 / 3.0) / (a * a);
  };
  // Integrate per grid segment in log f so the kinks of the interpolant sit
  // on the panel boundaries.
  double lo = std::log(f_lo), hi = std::log(f_hi), sum = 0.0;
  double a = lo;
  const auto& nodes = n.log_nodes();
  while (a < hi) {
    double b = hi;
    auto nx = std::upper_bound(nodes.begin(), nodes.end(), a);
    if (nx != nodes.end() && *nx < hi) b = *nx;
    sum += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, a, b, 5,
                                                                          1e-12);
    a = b;
  }
  return std::sqrt(4.0 * amp2 * sum);
}

double network_snr(const StrainNoise& n, double m_total_source, double z,
                   const HorizonOptions& o) {
  return std::sqrt(static_cast<double>(o.detectors)) * std::sin(o.opening_angle) *
         inspiral_snr(n, m_total_source, z, o);
}

HorizonCurve horizon_reach(const NoiseCurve& c, const std::vector<double>& masses,
                           const HorizonOptions& o) {
  StrainNoise n(c);
  if (n.f_min() > 1.0 * (1.0 + 1e-9) || n.f_max() < 100.0 * (1.0 - 1e-9))
    throw ConfigError("the noise curve must cover 1-100 Hz");
  HorizonCurve out;
  out.label = c.label;
  for (double m : masses) {
    if (!(m > 0.0)) throw ConfigError("masses must be positive");
    auto f = [&](double lz) { return network_snr(n, m, std::exp(lz), o) - o.snr_threshold; };
    double z = 0.0;
    double lo = std::log(1e-8);
    if (f(lo) > 0.0) {
      double hi = lo;
      while (f(hi) > 0.0 && hi < std::log(1e4)) hi += 1.0;
      if (f(hi) > 0.0) throw NumericalError("horizon beyond z = 1e4");
      boost::uintmax_t it = 200;
      auto tol = boost::math::tools::eps_tolerance<double>(40);
      auto [a, b] = boost::math::tools::toms748_solve(f, hi - 1.0, hi, tol, it);
      z = std::exp(0.5 * (a + b));
    }
    out.mass.push_back(m);
    out.redshift.push_back(z);
    out.distance_mpc.push_back(luminosity_distance_mpc(z, o));
  }
  return out;
}

}  // namespace sqk
