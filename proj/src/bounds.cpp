#include "swcons/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "swcons/error.hpp"

namespace swcons {

namespace {

void require_pair(const Spectrum& s) {
  if (s.size() < 2) fail_input("sampling-period bounds need at least two agents");
}

void require_undirected_connected(const Spectrum& s) {
  require_pair(s);
  if (!s.real) fail_input("spectrum is not from a symmetric Laplacian; use directed_bound");
  if (s.zero_count != 1 || s.lambda2() <= s.zero_tolerance) {
    std::ostringstream os;
    os << "not connected: lambda2 = " << s.lambda2() << " (" << s.zero_count << " zero eigenvalues)";
    fail_hypothesis(os.str());
  }
}

double lambda2_factor(double lambda2, double h) { return 1.0 - 2.0 * h * lambda2 + h * h * lambda2 * lambda2; }

double rate_from(double ct_rate, double contraction) {
  if (contraction <= 0.0) return ct_rate;
  return std::min(ct_rate, std::log(1.0 / contraction) / 2.0);
}

}  // namespace

const char* to_string(Regime r) {
  switch (r) {
    case Regime::UndirectedFixed: return "undirected-fixed";
    case Regime::DirectedFixed: return "directed-fixed";
    case Regime::UndirectedSwitching: return "undirected-switching";
    case Regime::NonlinearSwitching: return "nonlinear-switching";
  }
  return "unknown";
}

const char* to_string(ConsensusRule r) { return r == ConsensusRule::Average ? "average" : "w-weighted"; }

double undirected_bound(const Spectrum& s) {
  require_undirected_connected(s);
  return 2.0 / s.lambda_max();
}

double gershgorin_bound(const Graph& g) {
  const double dmax = g.degrees().maxCoeff();
  if (dmax <= 0.0) fail_hypothesis("all agent degrees are zero; the graph has no edges");
  return 1.0 / dmax;
}

double directed_bound(const Spectrum& s) {
  require_pair(s);
  if (s.zero_count != 1) {
    std::ostringstream os;
    os << "zero eigenvalue has multiplicity " << s.zero_count << "; the graph has no directed spanning tree";
    fail_hypothesis(os.str());
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.is_zero(i)) continue;
    const auto z = s.eigenvalues[i];
    if (z.real() <= 0.0) {
      std::ostringstream os;
      os << "nonzero eigenvalue " << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag())
         << "i has nonpositive real part";
      fail_numerical(os.str());
    }
    best = std::min(best, 2.0 * z.real() / std::norm(z));
  }
  return best;
}

double switching_bound(std::span<const Spectrum> spectra) {
  if (spectra.empty()) fail_input("switching_bound needs at least one topology");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : spectra) best = std::min(best, undirected_bound(s));
  return best;
}

double nonlinear_bound(std::span<const Spectrum> spectra, SectorBounds sector) {
  if (!(sector.gamma1 > 0.0) || !(sector.gamma2 > sector.gamma1) || !std::isfinite(sector.gamma2)) {
    std::ostringstream os;
    os << "sector constants must satisfy 0 < gamma1 < gamma2 (got gamma1=" << sector.gamma1
       << ", gamma2=" << sector.gamma2 << ")";
    fail_input(os.str());
  }
  return sector.gamma1 / (sector.gamma2 * sector.gamma2) * switching_bound(spectra);
}

double dt_step_factor(const Spectrum& s, double h) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.is_zero(i)) continue;
    const double r = std::abs(1.0 - h * s.eigenvalues[i]);
    worst = std::max(worst, r * r);
  }
  return worst;
}

CertificateReport decay_certificate(std::span<const Spectrum> spectra, double h, Regime regime,
                                    std::optional<SectorBounds> sector) {
  if (spectra.empty()) fail_input("certificate needs at least one spectrum");
  if (!(h > 0.0) || !std::isfinite(h)) fail_input("sampling period h must be a positive finite number");
  if ((regime == Regime::UndirectedFixed || regime == Regime::DirectedFixed) && spectra.size() != 1)
    fail_input(std::string(to_string(regime)) + " certificate takes exactly one topology");

  CertificateReport r;
  r.regime = regime;
  r.h = h;
  switch (regime) {
    case Regime::UndirectedFixed: r.h_max = undirected_bound(spectra[0]); break;
    case Regime::DirectedFixed: r.h_max = directed_bound(spectra[0]); break;
    case Regime::UndirectedSwitching: r.h_max = switching_bound(spectra); break;
    case Regime::NonlinearSwitching:
      if (!sector) fail_input("nonlinear certificate requires sector constants");
      r.h_max = nonlinear_bound(spectra, *sector);
      r.sector = sector;
      break;
  }
  if (h >= r.h_max) {
    std::ostringstream os;
    os.precision(6);
    os << "sampling period h = " << h << " violates the " << to_string(regime) << " bound h < " << r.h_max;
    throw BoundViolation(os.str(), r.h_max);
  }

  if (regime == Regime::DirectedFixed) {
    r.consensus_rule = ConsensusRule::WWeighted;
    r.horizon_rate = directed_asymptotic_rate(spectra[0], h);
    return r;
  }
  r.consensus_rule = ConsensusRule::Average;
  if (regime == Regime::NonlinearSwitching) {
    // Along CT segments V decays at least at gamma1 * min lambda2; for DT the
    // effective edge gains lie in [gamma1 h, gamma2 h], so take the slower of
    // the two linear extremes.
    double k1 = std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (const auto& s : spectra) {
      k1 = std::min(k1, s.lambda2());
      worst = std::max({worst, dt_step_factor(s, sector->gamma1 * h), dt_step_factor(s, sector->gamma2 * h)});
    }
    r.horizon_rate = rate_from(sector->gamma1 * k1, worst);
    return r;
  }

  double k1 = std::numeric_limits<double>::infinity();
  double contraction = 0.0;
  double factor_min = std::numeric_limits<double>::infinity();
  double factor_max = -std::numeric_limits<double>::infinity();
  for (const auto& s : spectra) {
    const double l2 = s.lambda2();
    k1 = std::min(k1, l2);
    contraction = std::max(contraction, dt_step_factor(s, h));
    factor_min = std::min(factor_min, lambda2_factor(l2, h));
    factor_max = std::max(factor_max, lambda2_factor(l2, h));
  }
  r.ct_rate = k1;
  r.dt_contraction = contraction;
  r.decay_rate = rate_from(k1, contraction);
  r.horizon_rate = r.decay_rate;
  r.lambda2_step_factor = factor_min;
  if (regime == Regime::UndirectedSwitching) r.lambda2_step_factor_worst = factor_max;
  return r;
}

Regime detect_regime(const TopologySet& topologies, bool nonlinear) {
  if (topologies.empty()) fail_input("no topologies registered");
  if (nonlinear) return Regime::NonlinearSwitching;
  bool all_undirected = true;
  for (const auto& [id, g] : topologies) all_undirected = all_undirected && g.undirected();
  if (topologies.size() == 1) return all_undirected ? Regime::UndirectedFixed : Regime::DirectedFixed;
  if (!all_undirected)
    fail_hypothesis("switching topologies with directed members are not covered by any certificate");
  return Regime::UndirectedSwitching;
}

void check_hypotheses(const TopologySet& topologies, Regime regime) {
  if (topologies.empty()) fail_input("no topologies registered");
  const auto n = topologies.begin()->second.size();
  for (const auto& [id, g] : topologies) {
    if (g.size() != n) fail_input("topology '" + id + "' has a different agent count");
    if (regime == Regime::DirectedFixed) {
      if (!has_directed_spanning_tree(g)) {
        fail_hypothesis("topology '" + id + "': no directed spanning tree (source components " +
                        describe_sources(condense(g.weights())) + ")");
      }
    } else {
      if (!g.undirected()) fail_hypothesis("topology '" + id + "' is directed; " + to_string(regime) + " needs undirected graphs");
      if (!is_connected(g)) fail_hypothesis("topology '" + id + "': not connected");
    }
  }
  if ((regime == Regime::UndirectedFixed || regime == Regime::DirectedFixed) && topologies.size() != 1)
    fail_input(std::string(to_string(regime)) + " takes exactly one topology");
}

CertificateReport certify(const TopologySet& topologies, Regime regime, std::optional<double> h,
                          std::optional<SectorBounds> sector) {
  check_hypotheses(topologies, regime);
  std::vector<Spectrum> spectra;
  spectra.reserve(topologies.size());
  for (const auto& [id, g] : topologies) spectra.push_back(spectrum(build_laplacian(g)));

  double bound = 0.0;
  switch (regime) {
    case Regime::UndirectedFixed: bound = undirected_bound(spectra[0]); break;
    case Regime::DirectedFixed: bound = directed_bound(spectra[0]); break;
    case Regime::UndirectedSwitching: bound = switching_bound(spectra); break;
    case Regime::NonlinearSwitching:
      if (!sector) fail_input("nonlinear certificate requires sector constants");
      bound = nonlinear_bound(spectra, *sector);
      break;
  }
  auto report = decay_certificate(spectra, h.value_or(0.9 * bound), regime, sector);
  if (regime != Regime::DirectedFixed) {
    double g = std::numeric_limits<double>::infinity();
    for (const auto& [id, graph] : topologies) g = std::min(g, gershgorin_bound(graph));
    if (regime == Regime::NonlinearSwitching && sector)
      g *= sector->gamma1 / (sector->gamma2 * sector->gamma2);
    report.gershgorin_h = g;
  }
  return report;
}

double directed_asymptotic_rate(const Spectrum& s, double h) {
  double ct = std::numeric_limits<double>::infinity();
  double dt = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.is_zero(i)) continue;
    ct = std::min(ct, s.eigenvalues[i].real());
    dt = std::max(dt, std::abs(1.0 - h * s.eigenvalues[i]));
  }
  if (dt <= 0.0) return ct;
  return std::min(ct, -std::log(dt));
}

}  // namespace swcons
