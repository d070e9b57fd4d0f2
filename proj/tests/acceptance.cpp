// Prints one PASS/FAIL line per acceptance criterion. Exit status is the
// number of failing criteria.

#include <chrono>
#include <cstdio>
#include <functional>

#include <fmt/format.h>

#include "oracle.hpp"
#include "squeezekit/coupled.hpp"
#include "squeezekit/horizon.hpp"

using namespace sqk;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  fmt::print("criterion {}: {} | {}\n", id, ok ? "PASS" : "FAIL", detail);
  std::fflush(stdout);
}

bool near(double x, double target, double tol) { return std::abs(x - target) <= tol; }

const std::vector<double> band = log_grid(1.0, 100.0, 200);

FilterSolution reference_filters() {
  return {{{rad_s(4.26), rad_s(19.51), 1000.0}, {rad_s(1.65), rad_s(-7.65), 1000.0}}};
}

void criterion1() {
  auto t0 = Clock::now();
  IfoConfig c = et_lf_config();
  auto s = extract_filter_params(fit_rotation_polynomial(c, band, 2));
  double dt = seconds_since(t0);
  double g1 = hz(s.cavities[0].gamma), d1 = hz(s.cavities[0].detuning);
  double g2 = hz(s.cavities[1].gamma), d2 = hz(s.cavities[1].detuning);
  bool ok = near(g1, 4.26, 0.05) && near(d1, 19.51, 0.05) && near(g2, 1.65, 0.05) &&
            near(d2, -7.65, 0.05) && dt < 1.0;
  report(1, ok,
         fmt::format("gamma1 {:.4f} delta1 {:.4f} gamma2 {:.4f} delta2 {:.4f} Hz (tol 0.05), "
                     "{:.3f} s",
                     g1, d1, g2, d2, dt));
}

void criterion2() {
  auto t0 = Clock::now();
  auto rep = coupled_equivalence(reference_filters(), band);
  double dt = seconds_since(t0);
  const auto& a = rep.analytic;
  const auto& f = *rep.fitted;
  bool ok = near(hz(a.d1), 11.94, 0.02) && near(hz(a.d2), -0.08, 0.02) &&
            near(hz(a.gamma1()), 5.90, 0.02) && near(hz(a.omega_s()), 12.46, 0.02) &&
            near(a.T2, 2.7e-7, 0.05 * 2.7e-7) && near(hz(f.d1), 11.93, 0.02) &&
            near(hz(f.d2), -0.07, 0.02) && near(hz(f.gamma1()), 5.91, 0.02) &&
            near(hz(f.omega_s()), 12.47, 0.02) && dt < 5.0;
  report(2, ok,
         fmt::format("analytic ({:.4f}, {:.4f}, {:.4f}, {:.4f}) Hz T2' {:.4g}; fitted ({:.4f}, "
                     "{:.4f}, {:.4f}, {:.4f}) Hz (tol 0.02), {:.3f} s",
                     hz(a.d1), hz(a.d2), hz(a.gamma1()), hz(a.omega_s()), a.T2, hz(f.d1),
                     hz(f.d2), hz(f.gamma1()), hz(f.omega_s()), dt));
}

void criterion3() {
  auto eq = coupled_equivalence(reference_filters(), band);
  auto fe = src_arm_feasibility(et_lf_config(), reference_filters(), band);
  bool ok = eq.max_discrepancy < 0.02 && fe.max_discrepancy > 0.3 && !fe.feasible &&
            near(fe.required_T, 2.7e-7, 0.05 * 2.7e-7);
  report(3, ok,
         fmt::format("coupled vs two-cavity {:.3g} rad (< 0.02); SRC-arm at T_ITM {} deviates "
                     "{:.3g} rad (> 0.3); feasible {}; required T_ITM {:.4g}",
                     eq.max_discrepancy, fe.actual_T, fe.max_discrepancy, fe.feasible,
                     fe.required_T));
}

void criterion4() {
  IfoConfig c = et_lf_config();
  auto filters = extract_filter_params(fit_rotation_polynomial(c, band, 2));
  auto all = solve_epr_params(c, filters, EprConvention::doubled_phase);
  auto pick = [&](double L, double mhz) -> const EprParams* {
    const EprParams* best = nullptr;
    for (const auto& p : all)
      if (near(p.L_SRC, L, 1.0) && std::abs(hz(p.Delta) / 1e6 / mhz - 1.0) <= 0.02 &&
          (!best || std::abs(p.L_SRC - L) < std::abs(best->L_SRC - L)))
        best = &p;
    return best;
  };
  const EprParams* a = pick(152.0, 1.27);
  const EprParams* b = pick(86.0, 2.25);
  if (!a || !b) {
    report(4, false, fmt::format("{} solutions, reference points missing", all.size()));
    return;
  }
  bool ok = near(a->L_arm, 10000.3, 1.0) && near(b->L_arm, 10000.2, 1.0);
  report(4, ok,
         fmt::format("({:.3f} m, {:.5f} MHz, arm {:.3f} m, filter residual {:.3g}, arm residual "
                     "{:.2g}) and ({:.3f} m, {:.5f} MHz, arm {:.3f} m, filter residual {:.3g}, "
                     "arm residual {:.2g}); {} solutions",
                     a->L_SRC, hz(a->Delta) / 1e6, a->L_arm, a->filter_residual, a->arm_residual,
                     b->L_SRC, hz(b->Delta) / 1e6, b->L_arm, b->filter_residual, b->arm_residual,
                     all.size()));
}

void criterion5() {
  IfoConfig c = lossless(et_lf_config());
  c.r = squeezing_db_to_r(10.0);
  auto setup = prepare_scheme(c, Scheme::epr, band);
  auto db = detected_squeezing(setup, log_grid(1.0, 100.0, 20));
  double lo = *std::min_element(db.begin(), db.end());
  double hi = *std::max_element(db.begin(), db.end());
  report(5, lo >= 6.7 && hi <= 7.3,
         fmt::format("lossless EPR at 10 dB input: {:.3f} to {:.3f} dB over 1-100 Hz (7 +- 0.3)",
                     lo, hi));
}

void criterion6() {
  IfoConfig base = et_lf_config();
  FilterSolution f = noise_model_filters(base);
  std::vector<double> around = {7.0, 8.0, 9.0};
  auto at = [&](Scheme s, double db) {
    IfoConfig c = base;
    c.r = squeezing_db_to_r(db);
    return detected_squeezing(prepare_scheme(c, s, band, f), around);
  };
  auto t10 = at(Scheme::two_filter, 10), t15 = at(Scheme::two_filter, 15);
  auto e10 = at(Scheme::epr, 10), e15 = at(Scheme::epr, 15);
  bool ok = true;
  for (std::size_t i = 0; i < around.size(); ++i) ok = ok && t15[i] < t10[i] && e15[i] >= e10[i];
  report(6, ok,
         fmt::format("at 8 Hz two-filter 10 dB {:.2f}, 15 dB {:.2f}; EPR 10 dB {:.2f}, 15 dB "
                     "{:.2f} (detected dB, 7-9 Hz checked)",
                     t10[1], t15[1], e10[1], e15[1]));
}

void criterion7() {
  IfoConfig base = et_lf_config();
  FilterSolution f = noise_model_filters(base);
  IfoConfig c10 = base, c15 = base;
  c10.r = squeezing_db_to_r(10.0);
  c15.r = squeezing_db_to_r(15.0);
  auto fine = log_grid(1.0, 100.0, 400);
  NoiseCurve two = evaluate_scheme(prepare_scheme(c10, Scheme::two_filter, band, f), fine);
  NoiseCurve epr = evaluate_scheme(prepare_scheme(c15, Scheme::epr, band, f), fine);
  std::vector<double> masses;
  for (int k = 0; k <= 30; ++k) masses.push_back(15.0 * std::pow(4.0, k / 30.0));
  auto ha = horizon_reach(two, masses), hb = horizon_reach(epr, masses);
  double peak = -1e300, at = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    double g = 100.0 * (hb.distance_mpc[i] / ha.distance_mpc[i] - 1.0);
    if (g > peak) {
      peak = g;
      at = masses[i];
    }
  }

  StrainNoise n(epr);
  double worst = 0.0;
  for (double m : {15.0, 30.0, 60.0}) {
    for (double z : {1.0, 10.0}) {
      double f_hi = std::min(isco_frequency(m, z), n.f_max());
      double dl = luminosity_distance_mpc(z) * phys::mpc;
      double ref =
          oracle::trapezoid_snr([&](double x) { return n.asd(x); }, n.f_min(), f_hi, m, z, dl);
      worst = std::max(worst, std::abs(inspiral_snr(n, m, z) / ref - 1.0));
    }
  }
  bool ok = near(peak, 10.0, 5.0) && worst < 1e-3;
  report(7, ok,
         fmt::format("peak horizon gain {:.2f}% at {:.1f} M_sun over 15-60 M_sun (10 +- 5); SNR "
                     "vs trapezoid oracle {:.2g} (< 1e-3)",
                     peak, at, worst));
}

Mat2 J() {
  Mat2 j;
  j << 0.0, cplx(0.0, 1.0), cplx(0.0, -1.0), 0.0;
  return j;
}

// Largest violation of energy conservation or commutator preservation.
double invariant_suite() {
  double worst = 0.0;
  auto upd = [&](double v) { worst = std::max(worst, v); };
  IfoConfig c = et_lf_config();
  for (double f : log_grid(1.0, 100.0, 25)) {
    double w = rad_s(f);
    upd(std::abs(std::norm(lift_scalar_transfer(std::polar(1.0, f), std::polar(1.0, -2 * f))
                               .determinant()) - 1.0));
    CavitySpec cav = cavity_from_bandwidth(rad_s(1.65), rad_s(-7.65), 1000.0, 20e-6);
    upd(std::abs(std::norm(cavity_reflection(cav, w)) +
                 std::norm(cavity_loss_transmission(cav, w)) - 1.0));
    auto cc = coupled_from_params(rad_s(5.9), rad_s(11.94), rad_s(-0.08), rad_s(12.46), 1000, 1000);
    upd(std::abs(std::abs(coupled_cavity_transfer_exact(cc, w)) - 1.0));
    IfoQuad q = interferometer_quad(c, w, Beam::signal);
    Mat2 s = q.input * J() * q.input.adjoint() + q.src * J() * q.src.adjoint() +
             q.arm * J() * q.arm.adjoint();
    upd((s - J()).norm());
    IfoQuad qi = interferometer_quad(c, w, Beam::idler);
    Mat2 p = qi.input * qi.input.adjoint() + qi.src * qi.src.adjoint() + qi.arm * qi.arm.adjoint();
    upd((p - Mat2::Identity()).norm());
  }
  IfoConfig quiet = c;
  quiet.I0 = 0.0;
  FilterSolution f = noise_model_filters(c);
  EprParams e = select_epr_params(c, f);
  IfoConfig d = apply_params(quiet, e);
  for (double hz_ : log_grid(1.0, 100.0, 10)) {
    EprFields fields = assemble_output_fields(d, e, rad_s(hz_), d.filter_detuning_error());
    for (const BeamChannels* b : {&fields.signal, &fields.idler}) {
      Mat2 s = b->squeezed * b->squeezed.adjoint();
      for (const auto& ch : b->loss)
        for (const Mat2& m : ch) s += m * m.adjoint();
      upd((s - Mat2::Identity()).norm());
    }
  }
  return worst;
}

void criterion8(Clock::time_point start) {
  IfoConfig c = et_lf_config();
  SchemeSetup s = prepare_scheme(c, Scheme::epr, band);
  auto f10 = log_grid(1.0, 100.0, 10);
  NoiseCurve n = evaluate_scheme(s, f10);
  double err = s.config.filter_detuning_error(), worst = 0.0;
  for (std::size_t i = 0; i < f10.size(); ++i) {
    double w = rad_s(f10[i]);
    double o = std::max(oracle::epr_psd(s.config, s.epr, w, err, s.phase),
                        oracle::epr_psd(s.config, s.epr, w, -err, s.phase));
    worst = std::max(worst, std::abs(n.total[i] * n.total[i] / o - 1.0));
  }
  double inv = invariant_suite();
  double dt = seconds_since(start);
  bool ok = worst < 1e-8 && inv < 1e-12 && dt < 120.0;
  report(8, ok,
         fmt::format("EPR PSD vs oracle {:.2g} (< 1e-8); invariant suite {:.2g} (< 1e-12); "
                     "acceptance run {:.2f} s (< 120)",
                     worst, inv, dt));
}

void guarded(int id, const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main() {
  auto start = Clock::now();
  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);
  guarded(5, criterion5);
  guarded(6, criterion6);
  guarded(7, criterion7);
  guarded(8, [&] { criterion8(start); });
  return failures;
}
