#pragma once

#include <vector>

#include "squeezekit/curves.hpp"

namespace sqk {

struct HorizonOptions {
  double snr_threshold = 8.0;
  int detectors = 3;
  double opening_angle = pi / 3;
  // Flat Lambda-CDM.
  double H0 = 67.9;  // km/s/Mpc
  double omega_m = 0.3065;
};

double comoving_distance_mpc(double z, const HorizonOptions& o = {});
double luminosity_distance_mpc(double z, const HorizonOptions& o = {});

// Redshifted innermost-stable-circular-orbit frequency [Hz].
double isco_frequency(double m_total_source, double z);

// Strain ASD interpolated linearly in log-log; outside the grid the noise is
// infinite (no signal power is counted there).
class StrainNoise {
 public:
  explicit StrainNoise(const NoiseCurve& c);
  double asd(double f) const;
  double f_min() const { return f_.front(); }
  double f_max() const { return f_.back(); }
  const std::vector<double>& log_nodes() const { return log_f_; }

 private:
  std::vector<double> f_, log_f_, log_a_;
};

// Optimally oriented equal-mass inspiral, single detector, restricted
// amplitude up to the redshifted ISCO.
double inspiral_snr(const StrainNoise& n, double m_total_source, double z,
                    const HorizonOptions& o = {});
// Root-sum-square over identical detectors scaled by sin(opening angle).
double network_snr(const StrainNoise& n, double m_total_source, double z,
                   const HorizonOptions& o = {});

struct HorizonCurve {
  std::string label;
  std::vector<double> mass;
  std::vector<double> redshift;
  std::vector<double> distance_mpc;
};

// The curve must cover 1-100 Hz.
HorizonCurve horizon_reach(const NoiseCurve& c, const std::vector<double>& masses,
                           const HorizonOptions& o = {});

}  // namespace sqk
