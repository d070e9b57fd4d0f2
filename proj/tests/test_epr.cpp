#include "doctest.h"
#include "oracle.hpp"

#include <random>

#include "squeezekit/curves.hpp"

using namespace sqk;

namespace {

FilterSolution single_mode_filters(const IfoConfig& c) {
  return extract_filter_params(fit_rotation_polynomial(c, log_grid(1.0, 100.0, 200), 2));
}

const EprParams* find(const std::vector<EprParams>& all, double L, double delta_mhz) {
  const EprParams* best = nullptr;
  for (const auto& p : all)
    if (std::abs(p.L_SRC - L) < 1.0 && std::abs(hz(p.Delta) / 1e6 / delta_mhz - 1.0) < 0.02)
      if (!best || std::abs(p.L_SRC - L) < std::abs(best->L_SRC - L)) best = &p;
  return best;
}

Mat2 sum_ports(const BeamChannels& b) {
  Mat2 s = b.squeezed * b.squeezed.adjoint();
  for (const auto& ch : b.loss)
    for (const Mat2& m : ch) s += m * m.adjoint();
  return s;
}

}  // namespace

TEST_CASE("doubled-phase solve contains the reference operating points") {
  IfoConfig c = et_lf_config();
  auto all = solve_epr_params(c, single_mode_filters(c), EprConvention::doubled_phase);
  const EprParams* a = find(all, 152.0, 1.27);
  const EprParams* b = find(all, 86.0, 2.25);
  REQUIRE(a != nullptr);
  REQUIRE(b != nullptr);
  CHECK(std::abs(a->L_arm - 10000.3) < 0.5);
  CHECK(std::abs(b->L_arm - 10000.2) < 0.5);
  CHECK(std::abs(a->arm_residual) < 1e-9);
  CHECK(std::abs(b->arm_residual) < 1e-9);
  CHECK(a->odd());
  CHECK(a->filter_residual == 0.0);
  CHECK_FALSE(b->odd());
  CHECK(b->filter_residual == doctest::Approx(pi));
}

TEST_CASE("round-trip solutions realize the target idler bandwidth") {
  IfoConfig c = et_lf_config();
  FilterSolution f = noise_model_filters(c);
  auto all = solve_epr_params(c, f, EprConvention::round_trip);
  REQUIRE_FALSE(all.empty());
  for (const auto& p : all) {
    CHECK(p.odd());
    CHECK(p.gamma2 == doctest::Approx(f.cavities[1].gamma).epsilon(1e-9));
    CHECK(std::abs(p.arm_residual) < 1e-9);
    CHECK(p.L_SRC <= 200.0);
  }
  for (std::size_t k = 1; k < all.size(); ++k) CHECK(all[k - 1].L_SRC <= all[k].L_SRC);
  EprParams s = select_epr_params(c, f);
  IfoConfig d = apply_params(c, s);
  CHECK(d.L_SRC == s.L_SRC);
  CHECK(d.Delta == s.Delta);
}

TEST_CASE("no solution for an unreachable idler bandwidth") {
  IfoConfig c = et_lf_config();
  FilterSolution f = single_mode_filters(c);
  // Wider than the interferometer can reach at any SRC length.
  f.cavities[1].gamma = rad_s(1e4);
  CHECK_THROWS_AS(solve_epr_params(c, f, EprConvention::round_trip), NoSolutionError);
  CHECK_THROWS_AS(solve_epr_params(c, f, EprConvention::doubled_phase), NoSolutionError);
}

TEST_CASE("two-mode squeezed vacuum is pure and symplectic") {
  Eigen::Matrix4cd V = two_mode_covariance(1.15, 0.7);
  CHECK((V - V.adjoint()).norm() < 1e-12);
  CHECK(std::abs(V.determinant() - 1.0) < 1e-9);
  Eigen::Matrix4cd Om = Eigen::Matrix4cd::Zero();
  Om(0, 1) = Om(2, 3) = 1.0;
  Om(1, 0) = Om(3, 2) = -1.0;
  // V Om V = Om for a pure Gaussian state with vacuum normalized to 1.
  CHECK((V * Om * V - Om).norm() < 1e-9);
}

TEST_CASE("Wiener coefficient minimizes the combined noise") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double Saa = 5.0, Sbb = 4.0;
  cplx Sab(1.2, -0.8);
  CombinedReadout best = wiener_combine(Saa, Sbb, Sab);
  CHECK(best.S_gg == doctest::Approx(Saa - std::norm(Sab) / Sbb));
  for (int k = 0; k < 200; ++k) {
    cplx g(u(rng), u(rng));
    double s = Saa + std::norm(g) * Sbb + 2.0 * (std::conj(g) * Sab).real();
    CHECK(s >= best.S_gg - 1e-12);
  }
  CHECK_THROWS_AS(wiener_combine(1.0, 0.0, 0.0), NumericalError);
}

TEST_CASE("every vacuum port is accounted for") {
  IfoConfig c = et_lf_config();
  c.I0 = 0.0;
  FilterSolution f = noise_model_filters(et_lf_config());
  EprParams p = select_epr_params(et_lf_config(), f);
  IfoConfig d = apply_params(c, p);
  for (double hz_ : {1.0, 8.0, 50.0}) {
    double w = rad_s(hz_);
    EprFields e = assemble_output_fields(d, p, w, d.filter_detuning_error());
    CHECK((sum_ports(e.signal) - Mat2::Identity()).norm() < 1e-12);
    CHECK((sum_ports(e.idler) - Mat2::Identity()).norm() < 1e-12);
    BeamChannels two = filtered_signal_channels(c, f, w, -c.filter_detuning_error());
    CHECK((sum_ports(two) - Mat2::Identity()).norm() < 1e-12);
  }
}

TEST_CASE("lossy EPR noise matches the covariance-propagation oracle") {
  IfoConfig c = et_lf_config();
  auto grid = log_grid(1.0, 100.0, 200);
  SchemeSetup s = prepare_scheme(c, Scheme::epr, grid);
  auto f10 = log_grid(1.0, 100.0, 10);
  NoiseCurve n = evaluate_scheme(s, f10);
  double err = s.config.filter_detuning_error();
  for (std::size_t i = 0; i < f10.size(); ++i) {
    double w = rad_s(f10[i]);
    double o = std::max(oracle::epr_psd(s.config, s.epr, w, err, s.phase),
                        oracle::epr_psd(s.config, s.epr, w, -err, s.phase));
    CHECK(n.total[i] * n.total[i] / o == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("lossless EPR pays about 3 dB against its input squeezing") {
  IfoConfig c = lossless(et_lf_config());
  auto grid = log_grid(1.0, 100.0, 200);
  FilterSolution f = noise_model_filters(c);
  auto fs = log_grid(1.0, 100.0, 12);
  auto epr = detected_squeezing(prepare_scheme(c, Scheme::epr, grid, f), fs);
  auto two = detected_squeezing(prepare_scheme(c, Scheme::two_filter, grid, f), fs);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    CHECK(std::abs(epr[i] - 7.0) < 0.3);
    CHECK(std::abs(two[i] - 10.0) < 0.05);
  }
}

TEST_CASE("filter loss dephases the two-filter scheme but not EPR") {
  IfoConfig base = et_lf_config();
  auto grid = log_grid(1.0, 100.0, 200);
  FilterSolution f = noise_model_filters(base);
  std::vector<double> band = {7.0, 8.0, 9.0};
  auto at = [&](Scheme sc, double db) {
    IfoConfig c = base;
    c.r = squeezing_db_to_r(db);
    return detected_squeezing(prepare_scheme(c, sc, grid, f), band);
  };
  auto t10 = at(Scheme::two_filter, 10), t15 = at(Scheme::two_filter, 15);
  auto e10 = at(Scheme::epr, 10), e15 = at(Scheme::epr, 15);
  for (std::size_t i = 0; i < band.size(); ++i) {
    CHECK(t15[i] < t10[i]);
    CHECK(e15[i] >= e10[i]);
  }
}
