#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swcons/bounds.hpp"
#include "swcons/graph.hpp"

namespace swcons {

enum class Mode { Continuous, Discrete };

const char* to_string(Mode m);

/// One interval of the switching signal. CT segments last `duration` time
/// units; DT segments run `steps` updates, each advancing time by exactly 1.
struct Segment {
  Mode mode = Mode::Continuous;
  double duration = 0.0;
  std::uint64_t steps = 0;
  std::string topology;

  static Segment ct(double duration, std::string topology);
  static Segment dt(std::uint64_t steps, std::string topology);

  double length() const { return mode == Mode::Continuous ? duration : static_cast<double>(steps); }
  bool operator==(const Segment&) const = default;
};

struct Schedule {
  std::vector<Segment> segments;

  double total_ct() const;
  std::uint64_t total_dt() const;
  double total_time() const { return total_ct() + static_cast<double>(total_dt()); }

  /// Throws Input naming the first segment whose topology id is unknown or
  /// whose length is not positive.
  void validate(const TopologySet& topologies) const;
  bool operator==(const Schedule&) const = default;
};

using Coupling = std::function<double(double)>;

/// f(x) = a*x + b*x/(1+|x|): odd, zero only at 0, and a*x <= f(x) <= (a+b)*x for x > 0.
Coupling sector_coupling(double a, double b);

enum class ProtocolKind { Linear, Nonlinear };

struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::Linear;
  double h = 0.0;
  Coupling coupling;  // nonlinear only
  SectorBounds sector;

  static ProtocolSpec linear(double h);
  /// Runs validate_coupling and throws Hypothesis when the probe fails.
  static ProtocolSpec nonlinear(double h, Coupling f, SectorBounds sector);
};

struct ProbeOptions {
  double lo = 1e-6;
  double hi = 1e3;
  int count = 200;
};

/// Sampled evidence (not proof) that f is odd, vanishes only at 0, and lies
/// in the sector [gamma1, gamma2].
struct CouplingCheck {
  bool passed = true;
  std::optional<double> witness;
  std::string reason;
};

CouplingCheck validate_coupling(const Coupling& f, SectorBounds sector, ProbeOptions probes = {});

/// (I - hL) x.
Eigen::VectorXd dt_step(const Eigen::VectorXd& x, const Laplacian& l, double h);

/// exp(-L * duration) x.
Eigen::VectorXd ct_flow(const Eigen::VectorXd& x, const Laplacian& l, double duration);

/// u_i = sum_j a_ij f(x_j - x_i), scaled by h in Discrete mode.
Eigen::VectorXd nonlinear_input(const Eigen::VectorXd& x, const Graph& g, const Coupling& f, double h, Mode mode);

/// Classical RK4 on xdot = u(x) with fixed step `dt_internal` and a final
/// partial step landing on `duration`.
Eigen::VectorXd nonlinear_ct_flow(const Eigen::VectorXd& x, const Graph& g, const Coupling& f, double duration,
                                  double dt_internal = 1e-3);

struct Sample {
  double t = 0.0;
  Eigen::VectorXd x;
  Mode mode = Mode::Continuous;
  std::size_t segment = 0;  // index into the schedule; 0 for the initial sample
};

struct Trajectory {
  std::vector<Sample> samples;
  Schedule schedule;
  double h = 0.0;
  std::string schedule_digest;
  Eigen::VectorXd x0;

  const std::string& topology_of(const Sample& s) const;
};

struct SimulationOptions {
  double output_resolution = 0.01;
  double rk4_step = 1e-3;
};

/// Executes the schedule segment by segment. Errors are rethrown with the
/// failing segment index prepended, keeping their kind.
Trajectory simulate(const Eigen::VectorXd& x0, const Schedule& schedule, const TopologySet& topologies,
                    const ProtocolSpec& protocol, SimulationOptions options = {});

/// FNV-1a 64-bit digest of the schedule's text form, as 16 hex digits.
std::string schedule_digest(const Schedule& s);

}  // namespace swcons
