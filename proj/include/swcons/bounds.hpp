#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swcons/graph.hpp"

namespace swcons {

enum class Regime { UndirectedFixed, DirectedFixed, UndirectedSwitching, NonlinearSwitching };
enum class ConsensusRule { Average, WWeighted };

const char* to_string(Regime r);
const char* to_string(ConsensusRule r);

/// Sector constants of a nonlinear coupling: gamma1*x <= f(x) <= gamma2*x for x > 0.
struct SectorBounds {
  double gamma1 = 1.0;
  double gamma2 = 2.0;
};

/// Admissible-h and decay certificate for one regime.
///
/// All bounds are exclusive suprema. `dt_contraction` is the exact per-step
/// Lyapunov factor max over nonzero eigenvalues of (1 - h*lambda)^2 (worst
/// case over topologies when switching). `lambda2_step_factor` is the factor
/// obtained from the algebraic connectivity alone, 1 - 2h*l2 + h^2*l2^2
/// (minimum over topologies when switching), kept for comparison; it is not
/// a valid per-step bound in general.
struct CertificateReport {
  Regime regime = Regime::UndirectedFixed;
  double h_max = 0.0;
  std::optional<double> gershgorin_h;
  /// Sampling period the decay fields were evaluated at.
  std::optional<double> h;
  std::optional<double> decay_rate;
  std::optional<double> dt_contraction;
  /// CT Lyapunov rate: lambda2, or its minimum over the topology set.
  std::optional<double> ct_rate;
  std::optional<double> lambda2_step_factor;
  /// Same factor with the maximum over topologies (least contraction).
  std::optional<double> lambda2_step_factor_worst;
  std::optional<SectorBounds> sector;
  /// Exponential rate used to size simulation horizons. Equals decay_rate
  /// when one is certified; otherwise an uncertified asymptotic estimate.
  std::optional<double> horizon_rate;
  ConsensusRule consensus_rule = ConsensusRule::Average;
};

/// 2 / lambda_n for the spectrum of an undirected connected graph.
double undirected_bound(const Spectrum& s);

/// 1 / max_i d_ii; never exceeds undirected_bound since lambda_n <= 2 max d_ii.
double gershgorin_bound(const Graph& g);

/// min over nonzero eigenvalues of 2 Re(l) / |l|^2.
double directed_bound(const Spectrum& s);

/// min over the set of 2 / lambda_n(L_s).
double switching_bound(std::span<const Spectrum> spectra);

/// (gamma1 / gamma2^2) * switching_bound; requires 0 < gamma1 < gamma2.
double nonlinear_bound(std::span<const Spectrum> spectra, SectorBounds sector);

/// max over nonzero eigenvalues of (1 - h*lambda)^2 for one real spectrum.
double dt_step_factor(const Spectrum& s, double h);

/// Certificate for `regime` at sampling period h. Throws BoundViolation when
/// h is not strictly inside (0, h_max).
CertificateReport decay_certificate(std::span<const Spectrum> spectra, double h, Regime regime,
                                    std::optional<SectorBounds> sector = std::nullopt);

/// Regime implied by a topology set and protocol kind:
/// nonlinear -> NonlinearSwitching; one undirected graph -> UndirectedFixed;
/// one directed graph -> DirectedFixed; several undirected -> UndirectedSwitching.
/// Several topologies with any directed member -> Hypothesis error.
Regime detect_regime(const TopologySet& topologies, bool nonlinear);

/// Checks the structural hypotheses of `regime` on every topology and throws
/// Hypothesis with a human-readable reason ("not connected", ...) on failure.
void check_hypotheses(const TopologySet& topologies, Regime regime);

/// Full certificate for a topology set: structural checks, spectra, bound,
/// Gershgorin estimate (undirected regimes) and decay fields. When `h` is
/// absent, 0.9 * h_max is used.
CertificateReport certify(const TopologySet& topologies, Regime regime, std::optional<double> h = std::nullopt,
                          std::optional<SectorBounds> sector = std::nullopt);

/// Asymptotic (uncertified) exponential rate for fixed directed topologies:
/// min of the slowest CT mode Re(lambda) and -ln max |1 - h*lambda|.
double directed_asymptotic_rate(const Spectrum& s, double h);

}  // namespace swcons
