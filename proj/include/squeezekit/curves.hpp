#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "squeezekit/epr.hpp"

namespace sqk {

enum class Scheme { unsqueezed, two_filter, epr };
const char* scheme_name(Scheme s);
Scheme parse_scheme(const std::string& s);

// Strain amplitude spectral densities [1/sqrt(Hz)]. The squares of the
// squeezed term and the loss terms add up to the square of the total.
struct NoiseCurve {
  std::string label;
  std::vector<double> freq_hz;
  std::vector<double> total;
  std::vector<double> squeezed;
  std::array<std::vector<double>, channel_count> loss;

  std::size_t size() const { return freq_hz.size(); }
  std::vector<double>& operator[](Channel ch) { return loss[static_cast<int>(ch)]; }
  const std::vector<double>& operator[](Channel ch) const { return loss[static_cast<int>(ch)]; }
};

// Everything fixed before a curve is evaluated: filters, EPR parameters,
// the effective configuration and the squeeze (or pump) phase.
struct SchemeSetup {
  Scheme scheme = Scheme::unsqueezed;
  IfoConfig config;
  FilterSolution filters;
  EprParams epr;
  double phase = 0.0;
};

// Filters used by the noise model: fitted on the exact sideband transfer of
// the lossless interferometer over 1-100 Hz.
FilterSolution noise_model_filters(const IfoConfig& c);

// Synthesizes filters, solves the EPR parameters and picks the phase that
// maximizes the grid-mean detected squeezing (in log).
SchemeSetup prepare_scheme(const IfoConfig& c, Scheme s, const std::vector<double>& f_hz);
SchemeSetup prepare_scheme(const IfoConfig& c, Scheme s, const std::vector<double>& f_hz,
                           const FilterSolution& filters);

// Length errors of the filters are applied with both signs; each frequency
// reports the worse one.
NoiseCurve evaluate_scheme(const SchemeSetup& setup, const std::vector<double>& f_hz);
NoiseCurve sensitivity_curve(const IfoConfig& c, Scheme s, const std::vector<double>& f_hz);

// 10 log10(PSD_unsqueezed / PSD_scheme) with the same configuration.
std::vector<double> detected_squeezing(const SchemeSetup& setup, const std::vector<double>& f_hz);

// CSV with freq_hz, asd_total and the five loss channels.
void write_sensitivity_csv(std::ostream& os, const NoiseCurve& c);
// Same plus asd_squeezed; the full budget.
void write_budget_csv(std::ostream& os, const NoiseCurve& c);
NoiseCurve read_budget_csv(std::istream& is);
std::string format_double(double x);

struct DominanceBand {
  std::string label;
  double f_lo, f_hi;
};

struct Comparison {
  std::vector<DominanceBand> bands;
};

// A scheme dominates where its total is the strict minimum (by more than
// one part in 1e9).
Comparison compare_schemes(const std::vector<NoiseCurve>& curves);
void write_comparison_csv(std::ostream& os, const std::vector<NoiseCurve>& curves);

}  // namespace sqk
