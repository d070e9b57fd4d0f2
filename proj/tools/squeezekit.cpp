#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "squeezekit/coupled.hpp"
#include "squeezekit/horizon.hpp"

using namespace sqk;

namespace {

enum Exit { ok = 0, config_error = 2, no_solution = 3, numerical_failure = 4 };

struct Globals {
  std::string config;
  std::string out;
  double fmin = 1.0;
  double fmax = 100.0;
  int points = 200;
};

IfoConfig load(const Globals& g) { return g.config.empty() ? et_lf_config() : load_config(g.config); }

std::vector<double> grid(const Globals& g) { return log_grid(g.fmin, g.fmax, g.points); }

// Writes to --out when given, else stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot write " + path);
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }
  bool to_file() const { return file_ != nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

RotationModel parse_model(const std::string& s) {
  if (s == "single-mode") return RotationModel::single_mode;
  if (s == "sideband") return RotationModel::sideband;
  throw ConfigError("unknown model '" + s + "'");
}

FilterSolution synthesize(const IfoConfig& c, const std::vector<double>& f, int degree,
                          RotationModel model, double* residual = nullptr) {
  double tol = model == RotationModel::sideband ? 1e-2 : 1e-6;
  IfoConfig design = model == RotationModel::sideband ? lossless(c) : c;
  auto p = fit_rotation_polynomial(design, f, degree, model, tol);
  if (residual) *residual = p.residual;
  return extract_filter_params(p, c.L_f);
}

// "name" or "name:dB".
struct SchemeSpec {
  Scheme scheme;
  std::optional<double> db;
  std::string label;
};

SchemeSpec parse_scheme_spec(const std::string& s) {
  SchemeSpec out;
  auto colon = s.find(':');
  out.scheme = parse_scheme(s.substr(0, colon));
  out.label = scheme_name(out.scheme);
  if (colon != std::string::npos) {
    std::string v = s.substr(colon + 1);
    try {
      std::size_t pos = 0;
      out.db = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
    } catch (const std::exception&) {
      throw ConfigError("bad squeezing level in '" + s + "'");
    }
    out.label += fmt::format("_{}dB", *out.db);
  }
  return out;
}

IfoConfig with_db(IfoConfig c, std::optional<double> db) {
  if (db) {
    if (!(*db >= 0.0)) throw ConfigError("squeezing level must be non-negative");
    c.r = squeezing_db_to_r(*db);
  }
  return c;
}

NoiseCurve curve_for(const IfoConfig& base, const SchemeSpec& s, const std::vector<double>& f) {
  IfoConfig c = with_db(base, s.db);
  // Filters follow the configured losses-free design, independent of r.
  SchemeSetup setup = prepare_scheme(c, s.scheme, f);
  NoiseCurve n = evaluate_scheme(setup, f);
  n.label = s.label;
  return n;
}

void print_cavity(const CoupledCavitySpec& s, std::ostream& os, const char* tag) {
  fmt::print(os,
             "# {}: delta1_hz={} delta2_hz={} gamma1_hz={} omega_s_hz={} T1={} T2={} L1_m={} "
             "L2_m={}\n",
             tag, format_double(hz(s.d1)), format_double(hz(s.d2)),
             format_double(hz(s.gamma1())), format_double(hz(s.omega_s())), format_double(s.T1),
             format_double(s.T2), format_double(s.L1), format_double(s.L2));
}

std::vector<double> rotation_of(const std::function<cplx(double)>& f, const std::vector<double>& hz_) {
  std::vector<double> th;
  for (double x : hz_) th.push_back(transfer_rotation(f(rad_s(x)), f(-rad_s(x))));
  return unwrap_pi(th);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum noise, filter cavities and EPR squeezing for a detuned interferometer"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Configuration file (key = value)");
  app.add_option("--out", g.out, "Output file (default: stdout)");
  app.add_option("--fmin", g.fmin, "Lowest frequency [Hz]");
  app.add_option("--fmax", g.fmax, "Highest frequency [Hz]");
  app.add_option("--points", g.points, "Log-spaced frequency points");

  std::function<void()> run;

  auto* syn = app.add_subcommand("synthesize-filters", "Fit the rotation and extract filter cavities");
  int degree = 2;
  std::string model = "single-mode";
  syn->add_option("--degree", degree, "Number of filter cavities");
  syn->add_option("--model", model, "single-mode or sideband");
  syn->callback([&] {
    run = [&] {
      IfoConfig c = load(g);
      auto f = grid(g);
      double res = 0.0;
      RotationModel m = parse_model(model);
      FilterSolution s = synthesize(c, f, degree, m, &res);
      double err = verify_rotation(s, c, f, m);
      Output out(g.out);
      fmt::print(out.os(), "# fit_residual_rad={} verify_rad={}\n", format_double(res),
                 format_double(err));
      fmt::print(out.os(), "cavity,gamma_hz,detuning_hz,length_m,T_in\n");
      for (std::size_t k = 0; k < s.cavities.size(); ++k) {
        const auto& cav = s.cavities[k];
        fmt::print(out.os(), "{},{},{},{},{}\n", k + 1, format_double(hz(cav.gamma)),
                   format_double(hz(cav.detuning)), format_double(cav.length),
                   format_double(cav.T()));
      }
    };
  });

  auto* eqv = app.add_subcommand("equivalence", "Two filter cavities versus one coupled cavity");
  eqv->add_option("--model", model, "single-mode or sideband");
  eqv->callback([&] {
    run = [&] {
      IfoConfig c = load(g);
      auto f = grid(g);
      FilterSolution s = synthesize(c, f, 2, parse_model(model));
      EquivalenceReport rep = coupled_equivalence(s, f);
      CavitySpec c1 = s.cavities[0].spec(), c2 = s.cavities[1].spec();
      auto two = rotation_of([&](double w) { return two_cavity_transfer_exact(c1, c2, w); }, f);
      auto cpl = rotation_of([&](double w) { return coupled_cavity_transfer_exact(*rep.fitted, w); }, f);
      // Same branch for both columns.
      for (std::size_t i = 0; i < f.size(); ++i) cpl[i] -= pi * std::round((cpl[i] - two[i]) / pi);
      Output out(g.out);
      print_cavity(rep.analytic, out.os(), "analytic");
      print_cavity(*rep.fitted, out.os(), "fitted");
      fmt::print(out.os(), "# max_discrepancy_rad analytic={} fitted={}\n",
                 format_double(rep.max_discrepancy), format_double(*rep.fitted_discrepancy));
      fmt::print(out.os(), "freq_hz,theta_two_cavity_rad,theta_coupled_rad\n");
      for (std::size_t i = 0; i < f.size(); ++i)
        fmt::print(out.os(), "{},{},{}\n", format_double(f[i]), format_double(two[i]),
                   format_double(cpl[i]));
    };
  });

  auto* feas = app.add_subcommand("src-arm-feasibility",
                                  "Can the SRC and arm act as the idler's coupled cavity");
  double floor = 1e-5;
  feas->add_option("--model", model, "single-mode or sideband");
  feas->add_option("--floor", floor, "Smallest manufacturable ITM transmissivity");
  feas->callback([&] {
    run = [&] {
      IfoConfig c = load(g);
      auto f = grid(g);
      FilterSolution s = synthesize(c, f, 2, parse_model(model));
      EquivalenceReport rep = src_arm_feasibility(c, s, f, floor);
      Output out(g.out);
      print_cavity(rep.analytic, out.os(), "required");
      fmt::print(out.os(), "required_T_ITM={}\nactual_T_ITM={}\nfloor_T_ITM={}\n",
                 format_double(rep.required_T), format_double(rep.actual_T),
                 format_double(rep.floor));
      fmt::print(out.os(), "max_rotation_discrepancy_rad={}\nfeasible={}\n",
                 format_double(rep.max_discrepancy), rep.feasible ? "yes" : "no");
    };
  });

  auto* epr = app.add_subcommand("epr-solve", "Detuning and SRC length for the EPR scheme");
  double max_lsrc = 200.0;
  std::string convention = "doubled-phase";
  epr->add_option("--max-lsrc", max_lsrc, "Longest SRC considered [m]");
  epr->add_option("--convention", convention, "doubled-phase or round-trip");
  epr->callback([&] {
    run = [&] {
      IfoConfig c = load(g);
      EprSearch search;
      search.L_SRC_max = max_lsrc;
      if (!(max_lsrc > search.L_SRC_min)) throw ConfigError("--max-lsrc must exceed 1 m");
      std::vector<EprParams> all;
      if (convention == "doubled-phase") {
        all = solve_epr_params(c, synthesize(c, grid(g), 2, RotationModel::single_mode),
                               EprConvention::doubled_phase, search);
      } else if (convention == "round-trip") {
        all = solve_epr_params(c, noise_model_filters(c), EprConvention::round_trip, search);
      } else {
        throw ConfigError("unknown convention '" + convention + "'");
      }
      Output out(g.out);
      fmt::print(out.os(),
                 "delta_hz,m,L_SRC_m,L_arm_m,gamma2_hz,filter_residual_rad,arm_residual_rad\n");
      for (const auto& p : all)
        fmt::print(out.os(), "{},{},{},{},{},{},{}\n", format_double(hz(p.Delta)), p.m,
                   format_double(p.L_SRC), format_double(p.L_arm), format_double(hz(p.gamma2)),
                   format_double(p.filter_residual), format_double(p.arm_residual));
    };
  });

  std::string scheme_arg = "epr";
  std::optional<double> db;
  auto* sens = app.add_subcommand("sensitivity", "Strain noise with per-channel loss terms");
  sens->add_option("--scheme", scheme_arg, "two-filter, epr or unsqueezed")->required();
  sens->add_option("--db", db, "Injected squeezing [dB], overrides r");
  sens->callback([&] {
    run = [&] {
      SchemeSpec s = parse_scheme_spec(scheme_arg);
      if (db) s.db = db;
      NoiseCurve n = curve_for(load(g), s, grid(g));
      Output out(g.out);
      write_sensitivity_csv(out.os(), n);
    };
  });

  auto* bud = app.add_subcommand("budget", "Full noise budget including the squeezed term");
  bud->add_option("--scheme", scheme_arg, "two-filter, epr or unsqueezed");
  bud->add_option("--db", db, "Injected squeezing [dB], overrides r");
  bud->callback([&] {
    run = [&] {
      SchemeSpec s = parse_scheme_spec(scheme_arg);
      if (db) s.db = db;
      NoiseCurve n = curve_for(load(g), s, grid(g));
      Output out(g.out);
      write_budget_csv(out.os(), n);
    };
  });

  std::vector<std::string> schemes;
  double mmin = 1.0, mmax = 1000.0;
  int masses = 61;
  auto* hor = app.add_subcommand("horizon", "Inspiral horizon versus total source-frame mass");
  hor->add_option("--scheme", schemes, "name[:dB], repeatable (default two-filter:10 epr:15)");
  hor->add_option("--mmin", mmin, "Smallest total mass [M_sun]");
  hor->add_option("--mmax", mmax, "Largest total mass [M_sun]");
  hor->add_option("--masses", masses, "Log-spaced mass points");
  hor->callback([&] {
    run = [&] {
      IfoConfig c = load(g);
      auto f = grid(g);
      if (schemes.empty()) schemes = {"two-filter:10", "epr:15"};
      if (!(mmin > 0.0 && mmax >= mmin && masses >= 1)) throw ConfigError("bad mass grid");
      std::vector<double> m;
      for (int k = 0; k < masses; ++k)
        m.push_back(masses == 1 ? mmin : mmin * std::pow(mmax / mmin, double(k) / (masses - 1)));
      std::vector<HorizonCurve> hs;
      for (const auto& s : schemes) hs.push_back(horizon_reach(curve_for(c, parse_scheme_spec(s), f), m));
      HorizonOptions o;
      Output out(g.out);
      fmt::print(out.os(),
                 "# network of {} detectors, opening angle 60 deg, SNR threshold {}, optimal "
                 "orientation, inspiral to redshifted ISCO\n"
                 "# flat LCDM H0={} km/s/Mpc Omega_m={}\n",
                 o.detectors, o.snr_threshold, o.H0, o.omega_m);
      out.os() << "mass_msun";
      for (const auto& h : hs) out.os() << ",z_" << h.label << ",dl_mpc_" << h.label;
      out.os() << '\n';
      for (std::size_t i = 0; i < m.size(); ++i) {
        out.os() << format_double(m[i]);
        for (const auto& h : hs)
          out.os() << ',' << format_double(h.redshift[i]) << ',' << format_double(h.distance_mpc[i]);
        out.os() << '\n';
      }
    };
  });

  auto* cmp = app.add_subcommand("compare", "Total noise of several schemes and dominance bands");
  cmp->add_option("--scheme", schemes, "name[:dB], repeatable (default unsqueezed two-filter epr)");
  cmp->callback([&] {
    run = [&] {
      IfoConfig c = load(g);
      auto f = grid(g);
      if (schemes.empty()) schemes = {"unsqueezed", "two-filter", "epr"};
      std::vector<NoiseCurve> curves;
      for (const auto& s : schemes) curves.push_back(curve_for(c, parse_scheme_spec(s), f));
      Comparison r = compare_schemes(curves);
      Output out(g.out);
      write_comparison_csv(out.os(), curves);
      std::ostream& summary = out.to_file() ? std::cout : std::cerr;
      for (const auto& b : r.bands)
        fmt::print(summary, "{} dominates {} - {} Hz\n", b.label, format_double(b.f_lo),
                   format_double(b.f_hi));
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    run();
    return ok;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const NoSolutionError& e) {
    std::cerr << "no solution: " << e.what() << '\n';
    return no_solution;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return numerical_failure;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return numerical_failure;
  }
}
