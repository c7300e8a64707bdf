#include "swcons/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "swcons/error.hpp"
#include "swcons/io.hpp"
#include "swcons/linalg.hpp"

namespace swcons {

namespace {

void require_dims(const Eigen::VectorXd& x, std::size_t n) {
  if (static_cast<std::size_t>(x.size()) != n) {
    std::ostringstream os;
    os << "state has " << x.size() << " entries but the topology has " << n << " agents";
    fail_input(os.str());
  }
}

void require_finite_state(const Eigen::VectorXd& x, double t) {
  if (!x.allFinite()) {
    std::ostringstream os;
    os.precision(12);
    os << "state became non-finite at t = " << t;
    fail_numerical(os.str());
  }
}

}  // namespace

const char* to_string(Mode m) { return m == Mode::Continuous ? "ct" : "dt"; }

Segment Segment::ct(double duration, std::string topology) {
  Segment s;
  s.mode = Mode::Continuous;
  s.duration = duration;
  s.topology = std::move(topology);
  return s;
}

Segment Segment::dt(std::uint64_t steps, std::string topology) {
  Segment s;
  s.mode = Mode::Discrete;
  s.steps = steps;
  s.topology = std::move(topology);
  return s;
}

double Schedule::total_ct() const {
  double t = 0.0;
  for (const auto& s : segments)
    if (s.mode == Mode::Continuous) t += s.duration;
  return t;
}

std::uint64_t Schedule::total_dt() const {
  std::uint64_t t = 0;
  for (const auto& s : segments)
    if (s.mode == Mode::Discrete) t += s.steps;
  return t;
}

void Schedule::validate(const TopologySet& topologies) const {
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& s = segments[k];
    if (!topologies.contains(s.topology))
      fail_input("segment " + std::to_string(k) + ": unknown topology id '" + s.topology + "'");
    if (s.mode == Mode::Continuous && !(s.duration > 0.0 && std::isfinite(s.duration)))
      fail_input("segment " + std::to_string(k) + ": CT duration must be positive and finite");
    if (s.mode == Mode::Discrete && s.steps == 0)
      fail_input("segment " + std::to_string(k) + ": DT segment needs at least one step");
  }
}

Coupling sector_coupling(double a, double b) {
  return [a, b](double x) { return a * x + b * x / (1.0 + std::abs(x)); };
}

ProtocolSpec ProtocolSpec::linear(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) fail_input("sampling period h must be a positive finite number");
  ProtocolSpec p;
  p.kind = ProtocolKind::Linear;
  p.h = h;
  return p;
}

ProtocolSpec ProtocolSpec::nonlinear(double h, Coupling f, SectorBounds sector) {
  if (!(h > 0.0) || !std::isfinite(h)) fail_input("sampling period h must be a positive finite number");
  if (!f) fail_input("nonlinear protocol needs a coupling function");
  if (!(sector.gamma1 > 0.0) || !(sector.gamma2 > sector.gamma1))
    fail_input("sector constants must satisfy 0 < gamma1 < gamma2");
  const auto check = validate_coupling(f, sector);
  if (!check.passed) fail_hypothesis("coupling function rejected: " + check.reason);
  ProtocolSpec p;
  p.kind = ProtocolKind::Nonlinear;
  p.h = h;
  p.coupling = std::move(f);
  p.sector = sector;
  return p;
}

CouplingCheck validate_coupling(const Coupling& f, SectorBounds sector, ProbeOptions probes) {
  if (probes.count < 100) fail_input("coupling validation needs at least 100 probes");
  if (!(probes.lo > 0.0) || !(probes.hi > probes.lo)) fail_input("probe range must satisfy 0 < lo < hi");

  CouplingCheck out;
  auto reject = [&](double x, const std::string& why) {
    out.passed = false;
    out.witness = x;
    std::ostringstream os;
    os.precision(6);
    os << why << " at x = " << x;
    out.reason = os.str();
  };

  if (f(0.0) != 0.0) {
    reject(0.0, "f(0) != 0");
    return out;
  }
  const double ratio = std::log(probes.hi / probes.lo) / (probes.count - 1);
  for (int k = 0; k < probes.count; ++k) {
    const double x = probes.lo * std::exp(ratio * k);
    const double fx = f(x);
    const double fm = f(-x);
    if (!std::isfinite(fx) || !std::isfinite(fm)) {
      reject(x, "f is not finite");
      return out;
    }
    if (std::abs(fx + fm) >= 1e-9) {
      reject(x, "f is not odd");
      return out;
    }
    const double slack = 1e-12 * x;
    if (fx < sector.gamma1 * x - slack) {
      reject(x, "f(x) < gamma1*x");
      return out;
    }
    if (fx > sector.gamma2 * x + slack) {
      reject(x, "f(x) > gamma2*x");
      return out;
    }
  }
  out.reason = "sampled probes consistent with the sector condition (evidence, not proof)";
  return out;
}

Eigen::VectorXd dt_step(const Eigen::VectorXd& x, const Laplacian& l, double h) {
  require_dims(x, l.size());
  return x - h * (l.matrix * x);
}

namespace {

// exp(-Lt) fixes the ones vector, so propagate only the offset from x(0)
// and consensus states stay exactly fixed.
Eigen::VectorXd propagate(const Eigen::MatrixXd& flow, const Eigen::VectorXd& x) {
  const double anchor = x(0);
  return (flow * (x.array() - anchor).matrix()).array() + anchor;
}

}  // namespace

Eigen::VectorXd ct_flow(const Eigen::VectorXd& x, const Laplacian& l, double duration) {
  require_dims(x, l.size());
  if (!x.allFinite() || !std::isfinite(duration)) fail_numerical("ct_flow: non-finite input");
  if (duration < 0.0) fail_input("ct_flow: negative duration");
  if (duration == 0.0) return x;
  return propagate(expm(-duration * l.matrix), x);
}

Eigen::VectorXd nonlinear_input(const Eigen::VectorXd& x, const Graph& g, const Coupling& f, double h, Mode mode) {
  require_dims(x, g.size());
  const auto n = x.size();
  const auto& a = g.weights();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (a(i, j) > 0.0) u(i) += a(i, j) * f(x(j) - x(i));
  if (mode == Mode::Discrete) u *= h;
  return u;
}

Eigen::VectorXd nonlinear_ct_flow(const Eigen::VectorXd& x, const Graph& g, const Coupling& f, double duration,
                                  double dt_internal) {
  require_dims(x, g.size());
  if (!(dt_internal > 0.0)) fail_input("RK4 step must be positive");
  if (duration < 0.0) fail_input("nonlinear_ct_flow: negative duration");
  auto rhs = [&](const Eigen::VectorXd& y) { return nonlinear_input(y, g, f, 0.0, Mode::Continuous); };

  Eigen::VectorXd y = x;
  double t = 0.0;
  while (t < duration) {
    const double step = std::min(dt_internal, duration - t);
    const Eigen::VectorXd k1 = rhs(y);
    const Eigen::VectorXd k2 = rhs(y + 0.5 * step * k1);
    const Eigen::VectorXd k3 = rhs(y + 0.5 * step * k2);
    const Eigen::VectorXd k4 = rhs(y + step * k3);
    y += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    // Land exactly on the end even when duration/dt_internal is not integral.
    t = (duration - t - step <= 1e-15 * duration) ? duration : t + step;
    require_finite_state(y, t);
  }
  return y;
}

const std::string& Trajectory::topology_of(const Sample& s) const {
  static const std::string kNone;
  if (s.segment >= schedule.segments.size()) return kNone;
  return schedule.segments[s.segment].topology;
}

std::string schedule_digest(const Schedule& s) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : format_schedule(s)) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

Trajectory simulate(const Eigen::VectorXd& x0, const Schedule& schedule, const TopologySet& topologies,
                    const ProtocolSpec& protocol, SimulationOptions options) {
  if (!(options.output_resolution > 0.0)) fail_input("output resolution must be positive");
  if (!(protocol.h > 0.0)) fail_input("sampling period h must be positive");
  if (protocol.kind == ProtocolKind::Nonlinear && !protocol.coupling)
    fail_input("nonlinear protocol without a coupling function");
  schedule.validate(topologies);
  for (const auto& [id, g] : topologies) {
    if (static_cast<std::size_t>(x0.size()) != g.size())
      fail_input("x0 has " + std::to_string(x0.size()) + " entries but topology '" + id + "' has " +
                 std::to_string(g.size()) + " agents");
  }
  if (!x0.allFinite()) fail_input("x0 contains non-finite entries");

  std::map<std::string, Laplacian> laplacians;
  for (const auto& [id, g] : topologies) laplacians.emplace(id, build_laplacian(g));

  Trajectory traj;
  traj.schedule = schedule;
  traj.h = protocol.h;
  traj.schedule_digest = schedule_digest(schedule);
  traj.x0 = x0;
  const Mode first_mode = schedule.segments.empty() ? Mode::Continuous : schedule.segments.front().mode;
  traj.samples.push_back({0.0, x0, first_mode, 0});

  const bool linear = protocol.kind == ProtocolKind::Linear;
  const double res = options.output_resolution;
  Eigen::VectorXd x = x0;
  double t0 = 0.0;

  for (std::size_t k = 0; k < schedule.segments.size(); ++k) {
    const auto& seg = schedule.segments[k];
    const auto& g = topologies.at(seg.topology);
    const auto& l = laplacians.at(seg.topology);
    try {
      if (seg.mode == Mode::Continuous) {
        auto advance = [&](double tau) -> Eigen::VectorXd {
          return linear ? ct_flow(x, l, tau) : nonlinear_ct_flow(x, g, protocol.coupling, tau, options.rk4_step);
        };
        std::optional<Eigen::MatrixXd> propagator;
        if (linear) propagator = expm(-res * l.matrix);
        std::uint64_t m = 1;
        for (; static_cast<double>(m) * res < seg.duration - 1e-9 * res; ++m) {
          x = linear ? propagate(*propagator, x) : advance(res);
          require_finite_state(x, t0 + static_cast<double>(m) * res);
          traj.samples.push_back({t0 + static_cast<double>(m) * res, x, Mode::Continuous, k});
        }
        x = advance(seg.duration - static_cast<double>(m - 1) * res);
        t0 += seg.duration;
        require_finite_state(x, t0);
        traj.samples.push_back({t0, x, Mode::Continuous, k});
      } else {
        for (std::uint64_t step = 0; step < seg.steps; ++step) {
          x = linear ? dt_step(x, l, protocol.h)
                     : Eigen::VectorXd(x + nonlinear_input(x, g, protocol.coupling, protocol.h, Mode::Discrete));
          t0 += 1.0;
          require_finite_state(x, t0);
          traj.samples.push_back({t0, x, Mode::Discrete, k});
        }
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "segment " + std::to_string(k) + " (" + to_string(seg.mode) + ", topology '" +
                                seg.topology + "'): " + e.what());
    }
  }
  return traj;
}

}  // namespace swcons
