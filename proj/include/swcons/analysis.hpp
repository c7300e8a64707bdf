#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "swcons/dynamics.hpp"
#include "swcons/graph.hpp"

namespace swcons {

struct DisagreementEntry {
  double t = 0.0;
  double centroid = 0.0;
  Eigen::VectorXd delta;  // x - centroid * 1
  double V = 0.0;         // delta^T delta
};

using DisagreementSeries = std::vector<DisagreementEntry>;

DisagreementSeries disagreement(const Trajectory& traj);

/// Centroid, disagreement and Lyapunov value of a single state.
DisagreementEntry disagreement_at(double t, const Eigen::VectorXd& x);

/// Consensus value x* implied by the topologies the schedule visits:
/// mean(x0) when every visited topology is undirected and connected, w^T x0
/// for a single directed topology with a spanning tree. Directed switching is
/// unsupported (Hypothesis error).
double predict_consensus_value(const TopologySet& topologies, const Schedule& schedule, const Eigen::VectorXd& x0);

struct ConsensusVerdict {
  bool reached = false;
  double final_spread = 0.0;
  std::optional<double> predicted_value;
  std::optional<double> achieved_value;
  std::optional<double> estimated_rate;
  bool rate_infinite = false;  // disagreement hit exactly zero
};

/// max_{i,j} |x_i - x_j|.
double spread(const Eigen::VectorXd& x);

ConsensusVerdict check_consensus(const Trajectory& traj, double tol = 1e-6,
                                 std::optional<double> predicted = std::nullopt);

struct RateEstimate {
  double rate = 0.0;
  bool infinite = false;
};

struct RateFitOptions {
  /// Entries with V at or below this are excluded from the fit.
  double floor = 1e-300;
  /// Leading fraction of entries skipped as transient.
  double skip_fraction = 0.1;
};

/// Least-squares slope of ln V against t, divided by -2.
RateEstimate estimate_decay_rate(const DisagreementSeries& series, RateFitOptions options = {});

/// Time after which V0 * exp(-2 rate t) drops below tol^2 / 2, which bounds
/// the spread max|x_i - x_j| <= sqrt(2V) below tol.
double sufficient_horizon(double V0, double tol, double rate);

}  // namespace swcons
