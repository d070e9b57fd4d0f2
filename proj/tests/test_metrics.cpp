#include "doctest.h"
#include "oracle.hpp"

#include <sstream>

#include "squeezekit/horizon.hpp"

using namespace sqk;

namespace {

NoiseCurve power_law(double scale) {
  NoiseCurve c;
  c.label = "synthetic";
  for (double f : log_grid(1.0, 100.0, 120)) {
    c.freq_hz.push_back(f);
    c.total.push_back(scale * 1e-24 * (std::pow(f / 8.0, -4.0) + 1.0 + f / 40.0));
    c.squeezed.push_back(c.total.back());
    for (auto& ch : c.loss) ch.push_back(0.0);
  }
  return c;
}

const std::vector<double> masses = {10.0, 20.0, 40.0, 80.0};

}  // namespace

TEST_CASE("scheme names round-trip") {
  for (Scheme s : {Scheme::unsqueezed, Scheme::two_filter, Scheme::epr})
    CHECK(parse_scheme(scheme_name(s)) == s);
  CHECK_THROWS_AS(parse_scheme("qt"), ConfigError);
}

TEST_CASE("noise budget closes in quadrature") {
  IfoConfig c = et_lf_config();
  auto grid = log_grid(1.0, 100.0, 40);
  for (Scheme s : {Scheme::unsqueezed, Scheme::two_filter, Scheme::epr}) {
    NoiseCurve n = sensitivity_curve(c, s, grid);
    for (std::size_t i = 0; i < n.size(); ++i) {
      double sum = n.squeezed[i] * n.squeezed[i];
      for (const auto& ch : n.loss) sum += ch[i] * ch[i];
      CHECK(sum / (n.total[i] * n.total[i]) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("budget CSV round-trips exactly") {
  IfoConfig c = et_lf_config();
  NoiseCurve n = sensitivity_curve(c, Scheme::two_filter, log_grid(1.0, 100.0, 25));
  std::stringstream ss;
  write_budget_csv(ss, n);
  NoiseCurve m = read_budget_csv(ss);
  CHECK(m.freq_hz == n.freq_hz);
  CHECK(m.total == n.total);
  CHECK(m.squeezed == n.squeezed);
  for (int k = 0; k < channel_count; ++k) CHECK(m.loss[k] == n.loss[k]);

  std::stringstream bad("freq_hz,asd\n1,2\n");
  CHECK_THROWS_AS(read_budget_csv(bad), ConfigError);
}

TEST_CASE("sensitivity CSV carries the fixed columns") {
  NoiseCurve n = power_law(1.0);
  std::stringstream ss;
  write_sensitivity_csv(ss, n);
  std::string header;
  std::getline(ss, header);
  CHECK(header ==
        "freq_hz,asd_total,asd_input_loss,asd_readout_loss,asd_src_loss,asd_arm_loss,"
        "asd_filter_loss");
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("comparison reports strict dominance bands") {
  NoiseCurve a = power_law(1.0), b = power_law(1.0);
  a.label = "a";
  b.label = "b";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.freq_hz[i] < 10.0) b.total[i] *= 2.0;
    else if (a.freq_hz[i] > 20.0) a.total[i] *= 2.0;
  }
  Comparison cmp = compare_schemes({a, b});
  REQUIRE(cmp.bands.size() == 2);
  CHECK(cmp.bands[0].label == "a");
  CHECK(cmp.bands[0].f_hi < 10.0);
  CHECK(cmp.bands[1].label == "b");
  CHECK(cmp.bands[1].f_lo > 20.0);
  CHECK_THROWS_AS(compare_schemes({a}), ConfigError);
}

TEST_CASE("identical schemes have no dominance bands") {
  NoiseCurve a = power_law(1.0), b = power_law(1.0);
  CHECK(compare_schemes({a, b}).bands.empty());
}

TEST_CASE("lossless squeezing dominates the unsqueezed detector everywhere") {
  IfoConfig c = lossless(et_lf_config());
  auto f = log_grid(1.0, 100.0, 40);
  Comparison r = compare_schemes(
      {sensitivity_curve(c, Scheme::unsqueezed, f), sensitivity_curve(c, Scheme::two_filter, f)});
  REQUIRE(r.bands.size() == 1);
  CHECK(r.bands[0].label == "two-filter");
  CHECK(r.bands[0].f_lo == f.front());
  CHECK(r.bands[0].f_hi == f.back());
}

TEST_CASE("dominance boundaries are stable under grid refinement") {
  IfoConfig c = et_lf_config();
  auto bands = [&](int n) {
    auto f = log_grid(1.0, 100.0, n);
    FilterSolution filt = noise_model_filters(c);
    std::vector<NoiseCurve> cs;
    for (Scheme s : {Scheme::unsqueezed, Scheme::two_filter, Scheme::epr})
      cs.push_back(evaluate_scheme(prepare_scheme(c, s, log_grid(1.0, 100.0, 200), filt), f));
    return compare_schemes(cs).bands;
  };
  auto coarse = bands(101), fine = bands(201);
  REQUIRE(coarse.size() == fine.size());
  double step = std::pow(100.0, 1.0 / 100.0);
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    CHECK(coarse[k].label == fine[k].label);
    CHECK(fine[k].f_lo / coarse[k].f_lo < step * 1.0001);
    CHECK(coarse[k].f_lo / fine[k].f_lo < step * 1.0001);
    CHECK(fine[k].f_hi / coarse[k].f_hi < step * 1.0001);
    CHECK(coarse[k].f_hi / fine[k].f_hi < step * 1.0001);
  }
}

TEST_CASE("horizon rejects a curve that misses the band") {
  NoiseCurve c = power_law(1.0);
  c.freq_hz.pop_back();
  c.total.pop_back();
  CHECK_THROWS_AS(horizon_reach(c, {10.0}), ConfigError);
}

TEST_CASE("cosmology reduces to the Hubble law at small redshift") {
  double z = 1e-4;
  double d = luminosity_distance_mpc(z);
  CHECK(d == doctest::Approx(phys::c / 1000.0 * z / 67.9).epsilon(1e-3));
  CHECK(luminosity_distance_mpc(1.0) == doctest::Approx(6780.0).epsilon(0.02));
}

TEST_CASE("inspiral SNR matches a trapezoid quadrature") {
  NoiseCurve c = power_law(1.0);
  StrainNoise n(c);
  for (double m : {10.0, 30.0, 60.0}) {
    for (double z : {0.5, 5.0}) {
      double f_hi = std::min(isco_frequency(m, z), n.f_max());
      double dl = luminosity_distance_mpc(z) * phys::mpc;
      double ref = oracle::trapezoid_snr([&](double f) { return n.asd(f); }, n.f_min(), f_hi,
                                         m, z, dl);
      CHECK(inspiral_snr(n, m, z) == doctest::Approx(ref).epsilon(1e-3));
    }
  }
}

TEST_CASE("four times the noise power halves the nearby horizon") {
  HorizonOptions o;
  o.snr_threshold = 1e6;  // keeps the horizon at small redshift
  auto a = horizon_reach(power_law(1.0), masses, o);
  auto b = horizon_reach(power_law(2.0), masses, o);
  for (std::size_t i = 0; i < masses.size(); ++i) {
    CHECK(a.redshift[i] < 0.01);
    CHECK(b.distance_mpc[i] / a.distance_mpc[i] == doctest::Approx(0.5).epsilon(0.01));
  }
}

TEST_CASE("horizon never grows when the noise grows") {
  auto a = horizon_reach(power_law(1.0), masses);
  for (double s : {1.1, 1.5, 3.0}) {
    auto b = horizon_reach(power_law(s), masses);
    for (std::size_t i = 0; i < masses.size(); ++i) {
      CHECK(b.distance_mpc[i] <= a.distance_mpc[i]);
      CHECK(b.distance_mpc[i] > 0.0);
    }
  }
}

TEST_CASE("strain noise interpolation is exact on the nodes") {
  NoiseCurve c = power_law(1.0);
  StrainNoise n(c);
  for (std::size_t i = 0; i < c.size(); i += 17) CHECK(n.asd(c.freq_hz[i]) == doctest::Approx(c.total[i]));
  CHECK(std::isinf(n.asd(0.5)));
  CHECK_THROWS_AS(horizon_reach(c, {-1.0}), ConfigError);
}
