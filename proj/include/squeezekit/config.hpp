#pragma once

#include <string>

#include "squeezekit/common.hpp"

namespace sqk {

// Interferometer, squeezer and loss parameters. SI units, angles in rad,
// frequency offsets in rad/s.
struct IfoConfig {
  double M = 211.0;
  double I0 = 63.0;
  double L_SRC = 152.0;
  double L_arm = 10000.0;
  double T_SRM = 0.2;
  double T_ITM = 0.007;
  double phi_SRC = 0.75;
  double Delta = two_pi * 1.27e6;
  double zeta_s = pi / 2;
  double zeta_i = pi / 2 + 0.1;
  double r = 1.15;
  double eps_i = 0.04;
  double eps_r = 0.03;
  double eps_SRC = 1000e-6;
  double eps_arm = 45e-6;
  double eps_f = 20e-6;
  double dL_f = 1e-12;
  double lambda = 1550e-9;
  double L_f = 1000.0;

  double omega0() const { return two_pi * phys::c / lambda; }
  // Filter detuning error produced by a static length deviation.
  double filter_detuning_error() const { return omega0() * dL_f / L_f; }
};

// Low-frequency detector baseline.
IfoConfig et_lf_config();

// Same geometry with every loss channel and the length error set to zero.
IfoConfig lossless(IfoConfig c);

// Flat key=value text. '#' starts a comment. Delta is read in Hz; all
// other keys use the units of IfoConfig. Unknown keys, repeated keys and
// malformed values throw ConfigError.
IfoConfig parse_config(const std::string& text, IfoConfig base = et_lf_config());
IfoConfig load_config(const std::string& path);
std::string format_config(const IfoConfig& c);

double squeezing_db_to_r(double db);

}  // namespace sqk
