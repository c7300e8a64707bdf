#include "swcons/analysis.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "swcons/error.hpp"

namespace swcons {

DisagreementEntry disagreement_at(double t, const Eigen::VectorXd& x) {
  DisagreementEntry e;
  e.t = t;
  e.centroid = x.mean();
  e.delta = x.array() - e.centroid;
  e.V = e.delta.squaredNorm();
  return e;
}

DisagreementSeries disagreement(const Trajectory& traj) {
  DisagreementSeries out;
  out.reserve(traj.samples.size());
  for (const auto& s : traj.samples) out.push_back(disagreement_at(s.t, s.x));
  return out;
}

double predict_consensus_value(const TopologySet& topologies, const Schedule& schedule, const Eigen::VectorXd& x0) {
  std::set<std::string> visited;
  for (const auto& seg : schedule.segments) visited.insert(seg.topology);
  if (visited.empty())
    for (const auto& [id, g] : topologies) visited.insert(id);
  if (visited.empty()) fail_input("no topology to predict a consensus value for");

  bool any_directed = false;
  for (const auto& id : visited) {
    auto it = topologies.find(id);
    if (it == topologies.end()) fail_input("unknown topology id '" + id + "'");
    if (static_cast<std::size_t>(x0.size()) != it->second.size()) fail_input("x0 dimension does not match topology '" + id + "'");
    any_directed = any_directed || !it->second.undirected();
  }

  if (!any_directed) {
    for (const auto& id : visited)
      if (!is_connected(topologies.at(id))) fail_hypothesis("topology '" + id + "': not connected");
    return x0.mean();
  }
  if (visited.size() > 1)
    fail_hypothesis("no consensus-value formula for switching among directed topologies");
  const auto w = left_eigenvector(build_laplacian(topologies.at(*visited.begin())));
  return w.w.dot(x0);
}

double spread(const Eigen::VectorXd& x) { return x.size() == 0 ? 0.0 : x.maxCoeff() - x.minCoeff(); }

ConsensusVerdict check_consensus(const Trajectory& traj, double tol, std::optional<double> predicted) {
  if (traj.samples.empty()) fail_input("empty trajectory");
  if (!(tol > 0.0)) fail_input("consensus tolerance must be positive");
  ConsensusVerdict v;
  const auto& last = traj.samples.back().x;
  v.final_spread = spread(last);
  v.reached = v.final_spread < tol;
  v.predicted_value = predicted;
  if (v.reached) v.achieved_value = last.mean();

  const auto series = disagreement(traj);
  // Floor the fit above accumulated rounding noise of the state magnitude.
  double scale = 0.0;
  for (const auto& s : traj.samples) scale = std::max(scale, s.x.cwiseAbs().maxCoeff());
  RateFitOptions opts;
  const double noise = 1e-13 * std::max(scale, 1e-300);
  opts.floor = std::max(opts.floor, static_cast<double>(last.size()) * noise * noise);
  try {
    const auto est = estimate_decay_rate(series, opts);
    v.estimated_rate = est.rate;
    v.rate_infinite = est.infinite;
  } catch (const Error&) {
    // too few informative samples; the rate stays absent
  }
  return v;
}

RateEstimate estimate_decay_rate(const DisagreementSeries& series, RateFitOptions options) {
  if (series.empty()) fail_input("rate fit on an empty series");
  const auto skip = static_cast<std::size_t>(std::floor(options.skip_fraction * static_cast<double>(series.size())));
  double sum_t = 0, sum_y = 0, sum_tt = 0, sum_ty = 0;
  std::size_t used = 0;
  bool hit_zero = false;
  for (const auto& e : series) hit_zero = hit_zero || e.V == 0.0;
  for (std::size_t k = skip; k < series.size(); ++k) {
    const auto& e = series[k];
    if (e.V <= options.floor) continue;
    const double y = std::log(e.V);
    sum_t += e.t;
    sum_y += y;
    sum_tt += e.t * e.t;
    sum_ty += e.t * y;
    ++used;
  }
  // A run whose disagreement vanishes exactly (deadbeat step) has no finite rate.
  if (hit_zero && series.front().V > 0.0) return {std::numeric_limits<double>::infinity(), true};
  if (used < 10) fail_input("rate fit needs at least 10 entries with positive V after the transient");
  const double nn = static_cast<double>(used);
  const double denom = nn * sum_tt - sum_t * sum_t;
  if (denom <= 0.0) fail_input("rate fit needs distinct sample times");
  const double slope = (nn * sum_ty - sum_t * sum_y) / denom;
  return {-slope / 2.0, false};
}

double sufficient_horizon(double V0, double tol, double rate) {
  if (!(rate > 0.0) || !(tol > 0.0)) fail_input("horizon needs positive rate and tolerance");
  const double target = tol * tol / 2.0;
  if (V0 <= target) return 0.0;
  return std::log(V0 / target) / (2.0 * rate);
}

}  // namespace swcons
