#pragma once

#include <array>
#include <vector>

#include "squeezekit/filter_synthesis.hpp"

namespace sqk {

// doubled_phase: the idler SRC transmissivity carries twice the one-way
// phase and the arm condition uses e^{+i phi}; this reproduces the
// reference operating points. round_trip: the same round-trip phase as the
// sideband noise model, used whenever noise is computed.
enum class EprConvention { doubled_phase, round_trip };

struct EprParams {
  EprConvention convention = EprConvention::round_trip;
  double Delta = 0.0;
  // Delta = delta_1 + m pi c/(2 L1); m odd means m = 2 n1 + 1.
  int m = 1;
  double L_SRC = 0.0;
  double L_arm = 0.0;
  long n2 = 0;
  // Distance of m pi from the anti-resonance condition, 0 or pi [rad].
  double filter_residual = 0.0;
  // Arm resonance condition residual [rad].
  double arm_residual = 0.0;
  double gamma2 = 0.0;
  FilterCavity filter;
  FilterCavity ifo_target;

  bool odd() const { return m % 2 != 0; }
  int n1() const { return (m - 1) / 2; }
};

struct EprSearch {
  double L_SRC_max = 200.0;
  double L_SRC_min = 1.0;
  double step = 0.01;
  int max_n1 = 64;
};

// All (Delta, L_SRC) pairs realizing the interferometer bandwidth of the
// second target cavity, with the arm fine tuning nearest config.L_arm.
// Sorted by L_SRC. Throws NoSolutionError when none exist.
std::vector<EprParams> solve_epr_params(const IfoConfig& c, const FilterSolution& target,
                                        EprConvention conv = EprConvention::round_trip,
                                        const EprSearch& search = {});

// Round-trip solution nearest to config Delta and then config L_SRC.
EprParams select_epr_params(const IfoConfig& c, const FilterSolution& target);

// Configuration with the solved idler offset, SRC length and arm length.
IfoConfig apply_params(IfoConfig c, const EprParams& p);

enum class Channel { input, readout, src, arm, filter };
inline constexpr int channel_count = 5;
const char* channel_name(Channel ch);

// Quadrature transfers of one beam to its output, per vacuum port.
// "squeezed" acts on the squeezer output mode; each loss channel may hold
// several independent ports.
struct BeamChannels {
  Mat2 squeezed;
  std::array<std::vector<Mat2>, channel_count> loss;
  Vec2 response;

  std::vector<Mat2>& operator[](Channel ch) { return loss[static_cast<int>(ch)]; }
  const std::vector<Mat2>& operator[](Channel ch) const { return loss[static_cast<int>(ch)]; }
};

// Sum of homodyne powers of independent vacuum ports.
double vacuum_power(const Row2& h, const std::vector<Mat2>& ports);

struct EprFields {
  BeamChannels signal;
  BeamChannels idler;
};

// The external filter is tuned so the idler sees detuning delta_1 (plus
// detuning_error). c must already carry the solved parameters.
EprFields assemble_output_fields(const IfoConfig& c, const EprParams& p, double omega,
                                 double detuning_error = 0.0);

// Signal beam through a cascade of filter cavities (two-filter scheme) or
// none (unsqueezed reference).
BeamChannels filtered_signal_channels(const IfoConfig& c, const FilterSolution& filters,
                                      double omega, double detuning_error = 0.0);

// Two-mode squeezed vacuum with pump phase chi on the idler.
Eigen::Matrix4cd two_mode_covariance(double r, double chi);

struct CombinedReadout {
  cplx g;
  double S_gg;
};

// Combination A + g B with g = -S_AB/S_BB, S_AB = <A B*>.
CombinedReadout wiener_combine(double S_AA, double S_BB, cplx S_AB);

}  // namespace sqk
