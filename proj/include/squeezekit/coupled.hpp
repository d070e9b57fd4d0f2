#pragma once

#include <optional>
#include <vector>

#include "squeezekit/filter_synthesis.hpp"

namespace sqk {

// Three-mirror cavity: input mirror T1, middle mirror T2, perfect end mirror.
// d1 is the detuning of the input sub-cavity, d2 of the far one.
struct CoupledCavitySpec {
  double L1 = 1000.0, L2 = 1000.0;
  double T1 = 0.0, T2 = 0.0;
  double d1 = 0.0, d2 = 0.0;

  double gamma1() const { return phys::c * T1 / (4.0 * L1); }
  double omega_s() const { return phys::c * std::sqrt(T2) / (2.0 * std::sqrt(L1 * L2)); }
};

// Builds a spec from bandwidth-style parameters and the two lengths.
CoupledCavitySpec coupled_from_params(double gamma1, double d1, double d2, double omega_s,
                                      double L1, double L2);

cplx two_cavity_transfer_exact(const CavitySpec& c1, const CavitySpec& c2, double omega);
// The middle mirror reflects +sqrt(R2) towards the input cavity, so each
// sub-cavity is resonant at zero round-trip phase.
cplx coupled_cavity_transfer_exact(const CoupledCavitySpec& s, double omega);

// Second-order expansions in T and round-trip phase. Far from resonance the
// cascade tends to +1 and the three-mirror cavity to -1.
cplx two_cavity_transfer_approx(const CavitySpec& c1, const CavitySpec& c2, double omega);
cplx coupled_cavity_transfer_approx(const CoupledCavitySpec& s, double omega);
// True when T and the round-trip phases are small enough for the expansions.
bool approx_regime_ok(double T, double phase);

struct TwoCavityParams {
  double gamma1, d1, gamma2, d2;
};

// Coefficient matching between the two expansions. L1' = L1 and L2' = L2
// unless L1p is given (L1' L2' = L1 L2 is kept).
CoupledCavitySpec two_to_coupled_params(double gamma1, double d1, double L1, double gamma2,
                                        double d2, double L2,
                                        std::optional<double> L1p = std::nullopt);
// Inverse map: the pair with the larger bandwidth comes first.
TwoCavityParams coupled_to_two_params(const CoupledCavitySpec& s);

enum class CoupledModel { approx, exact };

struct CoupledFit {
  CoupledCavitySpec spec;
  int iterations = 0;
  double cost = 0.0;
};

struct FitError : NumericalError {
  CoupledFit best;
  FitError(const std::string& msg, CoupledFit b) : NumericalError(msg), best(b) {}
};

// Least squares on the complex transfer at +Omega and -Omega of every grid
// point, over (d1, d2, gamma1, omega_s); lengths are kept from init.
CoupledFit fit_coupled_params(const std::vector<double>& omega, const std::vector<cplx>& f_plus,
                              const std::vector<cplx>& f_minus, const CoupledCavitySpec& init,
                              CoupledModel model = CoupledModel::approx);

// Squeeze-angle rotation of a sideband transfer function.
double transfer_rotation(cplx f_plus, cplx f_minus);

struct EquivalenceReport {
  CoupledCavitySpec analytic;
  std::optional<CoupledCavitySpec> fitted;
  double max_discrepancy = 0.0;
  std::optional<double> fitted_discrepancy;
  // Feasibility part (SRC-arm only).
  double required_T = 0.0;
  double actual_T = 0.0;
  double floor = 1e-5;
  bool feasible = true;
};

// Two filter cavities versus the equivalent coupled cavity.
EquivalenceReport coupled_equivalence(const FilterSolution& target, const std::vector<double>& f_hz,
                                      CoupledModel fit_model = CoupledModel::approx);

// SRC and arm as the coupled cavity seen by the idler.
EquivalenceReport src_arm_feasibility(const IfoConfig& c, const FilterSolution& target,
                                      const std::vector<double>& f_hz, double floor = 1e-5);

}  // namespace sqk
