#include "squeezekit/epr.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

namespace sqk {

namespace {

double filter_spacing(double L1) { return pi * phys::c / (2.0 * L1); }

// Idler interferometer bandwidth as a function of L_SRC.
double gamma2_of(const IfoConfig& c, double Delta, double L_src, EprConvention conv) {
  double rI = std::sqrt(1.0 - c.T_ITM), rS = std::sqrt(1.0 - c.T_SRM);
  double phi = 2.0 * Delta * L_src / phys::c + c.phi_SRC;
  if (conv == EprConvention::doubled_phase) {
    double t2 = c.T_ITM * c.T_SRM / std::norm(1.0 - rI * rS * std::polar(1.0, 2.0 * phi));
    return phys::c * t2 / (4.0 * c.L_arm);
  }
  cplx e = prop(phi);
  cplx rho = (rI - rS * e) / (1.0 - rI * rS * e);
  return phys::c * (1.0 - std::norm(rho)) / (4.0 * c.L_arm);
}

// Phase entering the arm resonance condition and the wavenumber factor.
struct ArmCondition {
  double k;
  double phase;
};

ArmCondition arm_condition(const IfoConfig& c, double Delta, double L_src, double d2,
                           EprConvention conv) {
  double rI = std::sqrt(1.0 - c.T_ITM), rS = std::sqrt(1.0 - c.T_SRM);
  double phi = 2.0 * Delta * L_src / phys::c + c.phi_SRC;
  if (conv == EprConvention::doubled_phase) {
    cplx e = std::polar(1.0, phi);
    cplx R = (rI - rS * e) / (1.0 - rI * rS * e);
    // 2 (d2 + Delta) L/c + Arg R = 2 n pi
    return {2.0 * (d2 + Delta) / phys::c, std::arg(R)};
  }
  cplx e = prop(phi);
  cplx rho = (rI - rS * e) / (1.0 - rI * rS * e);
  // 2 (Delta - d2) L/c - arg rho = 2 n pi puts the idler resonance where the
  // target cavity is resonant.
  return {2.0 * (Delta - d2) / phys::c, -std::arg(rho)};
}

std::vector<double> length_roots(const IfoConfig& c, double Delta, double target,
                                 EprConvention conv, const EprSearch& s) {
  auto f = [&](double L) { return gamma2_of(c, Delta, L, conv) - target; };
  std::vector<double> roots;
  int steps = static_cast<int>(std::floor((s.L_SRC_max - s.L_SRC_min) / s.step));
  double a = s.L_SRC_min, fa = f(a);
  for (int k = 1; k <= steps; ++k) {
    double b = s.L_SRC_min + k * s.step, fb = f(b);
    if (fa == 0.0) {
      roots.push_back(a);
    } else if (fa * fb < 0.0) {
      boost::uintmax_t it = 200;
      auto tol = boost::math::tools::eps_tolerance<double>(50);
      auto [lo, hi] = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, it);
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

}  // namespace

std::vector<EprParams> solve_epr_params(const IfoConfig& c, const FilterSolution& target,
                                        EprConvention conv, const EprSearch& search) {
  if (target.cavities.size() != 2) throw ConfigError("the EPR scheme needs two target cavities");
  const FilterCavity& f1 = target.cavities[0];
  const FilterCavity& f2 = target.cavities[1];
  IfoConfig design = lossless(c);

  std::vector<EprParams> out;
  int m_max = 2 * search.max_n1 + 1;
  for (int m = 1; m <= m_max; ++m) {
    if (conv == EprConvention::round_trip && m % 2 == 0) continue;
    double Delta = f1.detuning + m * filter_spacing(f1.length);
    for (double L : length_roots(design, Delta, f2.gamma, conv, search)) {
      EprParams p;
      p.convention = conv;
      p.Delta = Delta;
      p.m = m;
      p.L_SRC = L;
      p.filter = f1;
      p.ifo_target = f2;
      p.gamma2 = gamma2_of(design, Delta, L, conv);
      p.filter_residual = m % 2 ? 0.0 : pi;

      ArmCondition ac = arm_condition(design, Delta, L, f2.detuning, conv);
      p.n2 = std::lround((ac.k * c.L_arm + ac.phase) / two_pi);
      p.L_arm = (two_pi * p.n2 - ac.phase) / ac.k;
      p.arm_residual = std::remainder(ac.k * p.L_arm + ac.phase, two_pi);
      out.push_back(p);
    }
  }
  if (out.empty()) throw NoSolutionError("no SRC length realizes the idler bandwidth");
  std::sort(out.begin(), out.end(), [](const EprParams& a, const EprParams& b) {
    return a.L_SRC < b.L_SRC;
  });
  return out;
}

EprParams select_epr_params(const IfoConfig& c, const FilterSolution& target) {
  auto sols = solve_epr_params(c, target, EprConvention::round_trip);
  auto best = std::min_element(sols.begin(), sols.end(), [&](const EprParams& a, const EprParams& b) {
    double da = std::abs(a.Delta - c.Delta), db = std::abs(b.Delta - c.Delta);
    if (std::abs(da - db) > 1.0) return da < db;
    return std::abs(a.L_SRC - c.L_SRC) < std::abs(b.L_SRC - c.L_SRC);
  });
  return *best;
}

IfoConfig apply_params(IfoConfig c, const EprParams& p) {
  c.Delta = p.Delta;
  c.L_SRC = p.L_SRC;
  c.L_arm = p.L_arm;
  return c;
}

const char* channel_name(Channel ch) {
  switch (ch) {
    case Channel::input: return "input_loss";
    case Channel::readout: return "readout_loss";
    case Channel::src: return "src_loss";
    case Channel::arm: return "arm_loss";
    case Channel::filter: return "filter_loss";
  }
  return "";
}

double vacuum_power(const Row2& h, const std::vector<Mat2>& ports) {
  double s = 0.0;
  for (const Mat2& m : ports) s += (h * m).squaredNorm();
  return s;
}

namespace {

Mat2 lift_pair(cplx plus, cplx minus) { return lift_scalar_transfer(plus, std::conj(minus)); }

// Squeezer -> input loss -> filter block -> interferometer -> readout loss.
BeamChannels chain(const IfoConfig& c, const IfoQuad& q, const Mat2& filter,
                   const std::vector<Mat2>& filter_ports) {
  double kr = std::sqrt(1.0 - c.eps_r);
  BeamChannels b;
  Mat2 into = kr * q.input * filter;
  b.squeezed = std::sqrt(1.0 - c.eps_i) * into;
  b[Channel::input] = {std::sqrt(c.eps_i) * into};
  for (const Mat2& m : filter_ports) b[Channel::filter].push_back(kr * q.input * m);
  b[Channel::src] = {kr * q.src};
  b[Channel::arm] = {kr * q.arm};
  b[Channel::readout] = {std::sqrt(c.eps_r) * Mat2::Identity()};
  b.response = kr * q.response;
  return b;
}

}  // namespace

EprFields assemble_output_fields(const IfoConfig& c, const EprParams& p, double omega,
                                 double detuning_error) {
  // In the filter frame the idler sits at offset Delta; a sideband at offset
  // nu sees round-trip phase 2 (delta_1 + nu - Delta) L1/c.
  CavitySpec fs = p.filter.spec(c.eps_f, detuning_error);
  fs.detuning -= c.Delta;

  EprFields out;
  {
    Mat2 F = lift_pair(cavity_reflection(fs, omega), cavity_reflection(fs, -omega));
    Mat2 L = lift_pair(cavity_loss_transmission(fs, omega), cavity_loss_transmission(fs, -omega));
    out.signal = chain(c, interferometer_quad(c, omega, Beam::signal), F, {L});
  }
  {
    double up = c.Delta + omega, lo = c.Delta - omega;
    Mat2 F = lift_pair(cavity_reflection(fs, up), cavity_reflection(fs, lo));
    Mat2 L = lift_pair(cavity_loss_transmission(fs, up), cavity_loss_transmission(fs, lo));
    out.idler = chain(c, interferometer_quad(c, omega, Beam::idler), F, {L});
  }
  return out;
}

BeamChannels filtered_signal_channels(const IfoConfig& c, const FilterSolution& filters,
                                      double omega, double detuning_error) {
  Mat2 total = Mat2::Identity();
  std::vector<Mat2> ports;
  for (const auto& cav : filters.cavities) {
    CavitySpec s = cav.spec(c.eps_f, detuning_error);
    Mat2 F = lift_pair(cavity_reflection(s, omega), cavity_reflection(s, -omega));
    Mat2 L = lift_pair(cavity_loss_transmission(s, omega), cavity_loss_transmission(s, -omega));
    for (Mat2& m : ports) m = F * m;
    ports.push_back(L);
    total = F * total;
  }
  return chain(c, interferometer_quad(c, omega, Beam::signal), total, ports);
}

Eigen::Matrix4cd two_mode_covariance(double r, double chi) {
  Eigen::Matrix2d Z;
  Z << 1.0, 0.0, 0.0, -1.0;
  Eigen::Matrix2d X = std::sinh(2.0 * r) * Z * rotation(chi);
  Eigen::Matrix4d V = Eigen::Matrix4d::Zero();
  V.topLeftCorner<2, 2>() = std::cosh(2.0 * r) * Eigen::Matrix2d::Identity();
  V.bottomRightCorner<2, 2>() = std::cosh(2.0 * r) * Eigen::Matrix2d::Identity();
  V.topRightCorner<2, 2>() = X;
  V.bottomLeftCorner<2, 2>() = X.transpose();
  return V.cast<cplx>();
}

CombinedReadout wiener_combine(double S_AA, double S_BB, cplx S_AB) {
  if (!(S_BB > 0.0)) throw NumericalError("idler PSD must be positive");
  cplx g = -S_AB / S_BB;
  double S = S_AA + std::norm(g) * S_BB + 2.0 * (std::conj(g) * S_AB).real();
  return {g, S};
}

}  // namespace sqk
