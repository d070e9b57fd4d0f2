#include "squeezekit/curves.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

namespace sqk {

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::unsqueezed: return "unsqueezed";
    case Scheme::two_filter: return "two-filter";
    case Scheme::epr: return "epr";
  }
  return "";
}

Scheme parse_scheme(const std::string& s) {
  if (s == "unsqueezed") return Scheme::unsqueezed;
  if (s == "two-filter") return Scheme::two_filter;
  if (s == "epr") return Scheme::epr;
  throw ConfigError("unknown scheme '" + s + "'");
}

FilterSolution noise_model_filters(const IfoConfig& c) {
  auto poly = fit_rotation_polynomial(lossless(c), log_grid(1.0, 100.0, 200), 2,
                                      RotationModel::sideband, 1e-2);
  return extract_filter_params(poly, c.L_f);
}

namespace {

struct PointBudget {
  double total = 0.0;
  double squeezed = 0.0;
  std::array<double, channel_count> loss{};
};

// Channels of one frequency point for one sign of the filter length error.
struct PointChannels {
  BeamChannels a;
  BeamChannels b;
};

PointChannels channels_at(const SchemeSetup& s, double omega, double err) {
  PointChannels p;
  if (s.scheme == Scheme::epr) {
    EprFields f = assemble_output_fields(s.config, s.epr, omega, err);
    p.a = std::move(f.signal);
    p.b = std::move(f.idler);
  } else {
    FilterSolution none;
    const FilterSolution& fl = s.scheme == Scheme::two_filter ? s.filters : none;
    p.a = filtered_signal_channels(s.config, fl, omega, err);
  }
  return p;
}

PointBudget budget_at(const SchemeSetup& s, const PointChannels& p, double phase) {
  const IfoConfig& c = s.config;
  Row2 hs = homodyne_vector(c.zeta_s);
  double sig = std::norm((hs * p.a.response)(0, 0));
  if (!(sig > 0.0)) throw NumericalError("homodyne is blind to the signal");

  PointBudget out;
  Row2 a = hs * p.a.squeezed;
  if (s.scheme != Scheme::epr) {
    double r = s.scheme == Scheme::unsqueezed ? 0.0 : c.r;
    out.squeezed = homodyne_power(a, squeezed_covariance({r, phase}));
    for (int k = 0; k < channel_count; ++k) out.loss[k] = vacuum_power(hs, p.a.loss[k]);
  } else {
    Row2 hi = homodyne_vector(c.zeta_i);
    Row2 b = hi * p.b.squeezed;
    Eigen::Matrix4cd V = two_mode_covariance(c.r, phase);
    double Saa_sq = homodyne_power(a, V.topLeftCorner<2, 2>());
    double Sbb_sq = homodyne_power(b, V.bottomRightCorner<2, 2>());
    cplx Sab = (a * V.topRightCorner<2, 2>() * b.adjoint())(0, 0);
    std::array<double, channel_count> la{}, lb{};
    double Saa = Saa_sq, Sbb = Sbb_sq;
    for (int k = 0; k < channel_count; ++k) {
      la[k] = vacuum_power(hs, p.a.loss[k]);
      lb[k] = vacuum_power(hi, p.b.loss[k]);
      Saa += la[k];
      Sbb += lb[k];
    }
    cplx g = wiener_combine(Saa, Sbb, Sab).g;
    double g2 = std::norm(g);
    out.squeezed = Saa_sq + g2 * Sbb_sq + 2.0 * (std::conj(g) * Sab).real();
    for (int k = 0; k < channel_count; ++k) out.loss[k] = la[k] + g2 * lb[k];
  }
  out.total = out.squeezed;
  for (double x : out.loss) out.total += x;
  out.total /= sig;
  out.squeezed /= sig;
  for (double& x : out.loss) x /= sig;
  return out;
}

double choose_phase(const SchemeSetup& s, const std::vector<double>& f_hz) {
  if (s.scheme == Scheme::unsqueezed) return 0.0;
  std::vector<PointChannels> pts;
  for (double f : f_hz) pts.push_back(channels_at(s, rad_s(f), 0.0));
  auto cost = [&](double phase) {
    double sum = 0.0;
    for (const auto& p : pts) sum += std::log(budget_at(s, p, phase).total);
    return sum / pts.size();
  };
  const int n = 360;
  int best = 0;
  double best_cost = cost(0.0);
  for (int k = 1; k < n; ++k) {
    double v = cost(pi * k / n);
    if (v < best_cost) {
      best_cost = v;
      best = k;
    }
  }
  double step = pi / n;
  auto [x, fx] = boost::math::tools::brent_find_minima(cost, pi * best / n - step,
                                                       pi * best / n + step, 40);
  return fx < best_cost ? x : pi * best / n;
}

}  // namespace

SchemeSetup prepare_scheme(const IfoConfig& c, Scheme s, const std::vector<double>& f_hz,
                           const FilterSolution& filters) {
  SchemeSetup setup;
  setup.scheme = s;
  setup.config = c;
  setup.filters = filters;
  if (s == Scheme::epr) {
    setup.epr = select_epr_params(c, filters);
    setup.config = apply_params(c, setup.epr);
  }
  setup.phase = choose_phase(setup, f_hz);
  return setup;
}

SchemeSetup prepare_scheme(const IfoConfig& c, Scheme s, const std::vector<double>& f_hz) {
  FilterSolution filters;
  if (s != Scheme::unsqueezed) filters = noise_model_filters(c);
  return prepare_scheme(c, s, f_hz, filters);
}

NoiseCurve evaluate_scheme(const SchemeSetup& setup, const std::vector<double>& f_hz) {
  NoiseCurve out;
  out.label = scheme_name(setup.scheme);
  double err = setup.scheme == Scheme::unsqueezed ? 0.0 : setup.config.filter_detuning_error();
  for (double f : f_hz) {
    double w = rad_s(f);
    PointBudget b = budget_at(setup, channels_at(setup, w, err), setup.phase);
    if (err != 0.0) {
      PointBudget m = budget_at(setup, channels_at(setup, w, -err), setup.phase);
      if (m.total > b.total) b = m;
    }
    out.freq_hz.push_back(f);
    out.total.push_back(std::sqrt(b.total));
    out.squeezed.push_back(std::sqrt(std::max(0.0, b.squeezed)));
    for (int k = 0; k < channel_count; ++k) out.loss[k].push_back(std::sqrt(b.loss[k]));
  }
  return out;
}

NoiseCurve sensitivity_curve(const IfoConfig& c, Scheme s, const std::vector<double>& f_hz) {
  return evaluate_scheme(prepare_scheme(c, s, f_hz), f_hz);
}

std::vector<double> detected_squeezing(const SchemeSetup& setup, const std::vector<double>& f_hz) {
  SchemeSetup ref = setup;
  ref.scheme = Scheme::unsqueezed;
  ref.phase = 0.0;
  NoiseCurve a = evaluate_scheme(ref, f_hz);
  NoiseCurve b = evaluate_scheme(setup, f_hz);
  std::vector<double> db;
  for (std::size_t i = 0; i < f_hz.size(); ++i)
    db.push_back(20.0 * std::log10(a.total[i] / b.total[i]));
  return db;
}

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

namespace {

const Channel csv_channels[] = {Channel::input, Channel::readout, Channel::src, Channel::arm,
                                Channel::filter};

void write_rows(std::ostream& os, const NoiseCurve& c, bool with_squeezed) {
  os << "freq_hz,asd_total";
  if (with_squeezed) os << ",asd_squeezed";
  for (Channel ch : csv_channels) os << ",asd_" << channel_name(ch);
  os << '\n';
  for (std::size_t i = 0; i < c.size(); ++i) {
    os << format_double(c.freq_hz[i]) << ',' << format_double(c.total[i]);
    if (with_squeezed) os << ',' << format_double(c.squeezed[i]);
    for (Channel ch : csv_channels) os << ',' << format_double(c[ch][i]);
    os << '\n';
  }
}

}  // namespace

void write_sensitivity_csv(std::ostream& os, const NoiseCurve& c) { write_rows(os, c, false); }
void write_budget_csv(std::ostream& os, const NoiseCurve& c) { write_rows(os, c, true); }

NoiseCurve read_budget_csv(std::istream& is) {
  NoiseCurve c;
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty budget file");
  std::ostringstream expect;
  write_rows(expect, NoiseCurve{}, true);
  if (line + "\n" != expect.str()) throw ConfigError("unexpected budget header: " + line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t pos = 0;
      double x = std::stod(cell, &pos);
      if (pos != cell.size()) throw ConfigError("bad number in budget file: " + cell);
      v.push_back(x);
    }
    if (v.size() != 3 + channel_count) throw ConfigError("wrong column count in budget file");
    c.freq_hz.push_back(v[0]);
    c.total.push_back(v[1]);
    c.squeezed.push_back(v[2]);
    for (int k = 0; k < channel_count; ++k) c[csv_channels[k]].push_back(v[3 + k]);
  }
  return c;
}

Comparison compare_schemes(const std::vector<NoiseCurve>& curves) {
  if (curves.size() < 2) throw ConfigError("comparison needs at least two schemes");
  Comparison out;
  const auto& f = curves.front().freq_hz;
  for (const auto& c : curves)
    if (c.freq_hz != f) throw ConfigError("curves must share the frequency grid");

  int current = -1;
  for (std::size_t i = 0; i < f.size(); ++i) {
    int best = 0;
    for (std::size_t k = 1; k < curves.size(); ++k)
      if (curves[k].total[i] < curves[best].total[i]) best = static_cast<int>(k);
    double lo = curves[best].total[i];
    double second = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < curves.size(); ++k)
      if (static_cast<int>(k) != best) second = std::min(second, curves[k].total[i]);
    if (!(second - lo > 1e-9 * lo)) best = -1;
    if (best >= 0 && best == current) {
      out.bands.back().f_hi = f[i];
    } else if (best >= 0) {
      out.bands.push_back({curves[best].label, f[i], f[i]});
    }
    current = best;
  }
  return out;
}

void write_comparison_csv(std::ostream& os, const std::vector<NoiseCurve>& curves) {
  os << "freq_hz";
  for (const auto& c : curves) os << ",asd_" << c.label;
  os << '\n';
  for (std::size_t i = 0; i < curves.front().size(); ++i) {
    os << format_double(curves.front().freq_hz[i]);
    for (const auto& c : curves) os << ',' << format_double(c.total[i]);
    os << '\n';
  }
}

}  // namespace sqk
