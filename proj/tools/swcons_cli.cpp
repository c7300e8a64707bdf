// swcons command-line front end.
//
//   swcons certify         --topology id=path ... [--protocol linear|nonlinear] [--h auto|<real>]
//   swcons simulate        --topology id=path ... [--schedule path | random-schedule flags] --x0 ...
//   swcons random-schedule --seed <u64> --segments <k> [--ids a,b,...] [--out path]
//
// Exit codes: 0 success, 1 input error, 2 hypothesis violation, 3 numerical failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swcons/swcons.h"

namespace {

namespace fs = std::filesystem;

struct Failure {
  int code;
  std::string message;
};

void check(swc_status st, const std::string& context = {}) {
  if (st != SWC_OK) throw Failure{static_cast<int>(st), (context.empty() ? "" : context + ": ") + swc_last_error()};
}

[[noreturn]] void input_error(const std::string& msg) { throw Failure{1, msg}; }

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using GraphPtr = std::unique_ptr<swc_graph, Deleter<swc_graph, swc_graph_free>>;
using SetPtr = std::unique_ptr<swc_topology_set, Deleter<swc_topology_set, swc_topology_set_free>>;
using SchedulePtr = std::unique_ptr<swc_schedule, Deleter<swc_schedule, swc_schedule_free>>;
using TrajectoryPtr = std::unique_ptr<swc_trajectory, Deleter<swc_trajectory, swc_trajectory_free>>;

template <class Fn, class... Args>
std::string text_of(Fn fn, Args... args) {
  std::size_t len = 0;
  check(fn(args..., nullptr, 0, &len));
  std::string out(len + 1, '\0');
  check(fn(args..., out.data(), out.size(), &len));
  out.resize(len);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);)
    if (!item.empty()) parts.push_back(item);
  return parts;
}

double to_real(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    input_error("invalid " + what + " '" + s + "'");
  }
}

std::uint64_t to_u64(const std::string& s, const std::string& what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) input_error("invalid " + what + " '" + s + "'");
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    input_error(what + " out of range '" + s + "'");
  }
}

struct Common {
  std::vector<std::string> topologies;
  std::string protocol = "linear";
  std::string h = "auto";
  std::optional<double> gamma1;
  std::optional<double> gamma2;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--topology", c.topologies, "Topology as <id>=<graph file> (repeatable)")->required();
  cmd->add_option("--protocol", c.protocol, "linear or nonlinear")->check(CLI::IsMember({"linear", "nonlinear"}));
  cmd->add_option("--h", c.h, "Sampling period, or 'auto' for 0.9 x certified bound");
  cmd->add_option("--gamma1", c.gamma1, "Lower sector constant of the nonlinear coupling");
  cmd->add_option("--gamma2", c.gamma2, "Upper sector constant of the nonlinear coupling");
}

SetPtr load_topologies(const std::vector<std::string>& specs) {
  swc_topology_set* raw = nullptr;
  check(swc_topology_set_create(&raw));
  SetPtr set(raw);
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
      input_error("--topology expects <id>=<path>, got '" + spec + "'");
    const auto id = spec.substr(0, eq);
    const auto path = spec.substr(eq + 1);
    swc_graph* g = nullptr;
    check(swc_graph_load(path.c_str(), &g));
    GraphPtr graph(g);
    check(swc_topology_set_add(set.get(), id.c_str(), graph.get()));
  }
  return set;
}

swc_protocol protocol_of(const Common& c) {
  swc_protocol p{};
  p.kind = c.protocol == "nonlinear" ? SWC_PROTOCOL_NONLINEAR : SWC_PROTOCOL_LINEAR;
  p.h = c.h == "auto" ? 0.0 : to_real(c.h, "--h");
  if (c.h != "auto" && !(p.h > 0.0)) input_error("--h must be positive or 'auto'");
  p.gamma1 = c.gamma1.value_or(1.0);
  p.gamma2 = c.gamma2.value_or(2.0);
  return p;
}

std::vector<std::string> topology_ids(const swc_topology_set* set) {
  std::vector<std::string> ids;
  for (std::size_t k = 0; k < swc_topology_set_size(set); ++k) ids.emplace_back(swc_topology_set_id(set, k));
  return ids;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) input_error("cannot create output directory '" + dir + "': " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) input_error("cannot write '" + path.string() + "'");
  os << text;
}

// ---- certify ------------------------------------------------------------

struct CertifyArgs {
  Common common;
  std::string out;
  bool json = false;
};

int run_certify(const CertifyArgs& a) {
  auto set = load_topologies(a.common.topologies);
  auto protocol = protocol_of(a.common);

  std::string text, json;
  auto append = [&](const swc_certificate& cert) {
    text += text_of(swc_certificate_format, &cert, 0);
    text += "\n";
    json += text_of(swc_certificate_format, &cert, 1);
  };

  swc_certificate cert{};
  check(swc_certify(set.get(), SWC_REGIME_AUTO, &protocol, &cert));
  append(cert);

  // Explicit sector constants on a linear run also request the nonlinear
  // report; it is skipped when the topologies do not qualify.
  if (protocol.kind == SWC_PROTOCOL_LINEAR && (a.common.gamma1 || a.common.gamma2)) {
    swc_protocol nl = protocol;
    nl.kind = SWC_PROTOCOL_NONLINEAR;
    nl.h = 0.0;
    swc_certificate extra{};
    const auto st = swc_certify(set.get(), SWC_REGIME_NONLINEAR_SWITCHING, &nl, &extra);
    if (st == SWC_OK)
      append(extra);
    else if (st == SWC_ERR_HYPOTHESIS)
      std::cerr << "note: no nonlinear-switching report: " << swc_last_error() << '\n';
    else
      check(st);
  }
  std::cout << (a.json ? json : text);
  if (!a.out.empty()) {
    ensure_dir(a.out);
    write_text(fs::path(a.out) / "certificate.txt", text);
    write_text(fs::path(a.out) / "certificate.json", json);
  }
  return 0;
}

// ---- random schedule ------------------------------------------------------

struct ScheduleArgs {
  std::uint64_t seed = 0;
  std::size_t segments = 10;
  std::optional<double> ct_min, ct_max;
  std::optional<std::uint64_t> dt_min, dt_max;
};

void add_schedule_flags(CLI::App* cmd, ScheduleArgs& s) {
  cmd->add_option("--seed", s.seed, "Seed of the schedule generator (mt19937_64)");
  cmd->add_option("--segments", s.segments, "Number of segments")->check(CLI::PositiveNumber);
  cmd->add_option("--ct-min", s.ct_min, "Shortest CT segment duration");
  cmd->add_option("--ct-max", s.ct_max, "Longest CT segment duration");
  cmd->add_option("--dt-min", s.dt_min, "Fewest DT steps per segment");
  cmd->add_option("--dt-max", s.dt_max, "Most DT steps per segment");
}

swc_random_schedule_params params_of(const ScheduleArgs& s) {
  swc_random_schedule_params p;
  swc_random_schedule_defaults(&p);
  p.segments = s.segments;
  if (s.ct_min) p.ct_min = *s.ct_min;
  if (s.ct_max) p.ct_max = *s.ct_max;
  if (s.dt_min) p.dt_min = *s.dt_min;
  if (s.dt_max) p.dt_max = *s.dt_max;
  if (s.ct_min && !s.ct_max && p.ct_max < p.ct_min) p.ct_max = p.ct_min;
  if (s.dt_min && !s.dt_max && p.dt_max < p.dt_min) p.dt_max = p.dt_min;
  return p;
}

SchedulePtr make_random_schedule(std::uint64_t seed, const swc_random_schedule_params& p,
                                 const std::vector<std::string>& ids) {
  std::vector<const char*> raw_ids;
  for (const auto& id : ids) raw_ids.push_back(id.c_str());
  swc_schedule* s = nullptr;
  check(swc_schedule_random(seed, &p, raw_ids.data(), raw_ids.size(), &s));
  return SchedulePtr(s);
}

struct RandomScheduleArgs {
  ScheduleArgs schedule;
  std::string ids = "g";
  std::string out;
};

int run_random_schedule(const RandomScheduleArgs& a) {
  auto schedule = make_random_schedule(a.schedule.seed, params_of(a.schedule), split(a.ids, ','));
  if (a.out.empty()) {
    std::cout << text_of(swc_schedule_format, static_cast<const swc_schedule*>(schedule.get()));
  } else {
    check(swc_schedule_save(schedule.get(), a.out.c_str()));
  }
  return 0;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  Common common;
  ScheduleArgs schedule;
  std::string schedule_path;
  std::string x0 = "seed:0";
  std::string x0_range = "-5,5";
  std::string horizon = "auto";
  double tol = 1e-6;
  double resolution = 0.01;
  std::string out = ".";
};

std::vector<double> initial_state(const SimulateArgs& a, std::size_t n) {
  std::vector<double> x(n);
  if (a.x0.rfind("seed:", 0) == 0) {
    const auto range = split(a.x0_range, ',');
    if (range.size() != 2) input_error("--x0-range expects lo,hi");
    check(swc_random_state(to_u64(a.x0.substr(5), "x0 seed"), n, to_real(range[0], "x0 range"),
                           to_real(range[1], "x0 range"), x.data()));
    return x;
  }
  const auto parts = split(a.x0, ',');
  if (parts.size() != n)
    input_error("--x0 has " + std::to_string(parts.size()) + " values but the topologies have " + std::to_string(n) +
                " agents");
  for (std::size_t i = 0; i < n; ++i) x[i] = to_real(parts[i], "x0 entry");
  return x;
}

int run_simulate(const SimulateArgs& a) {
  auto set = load_topologies(a.common.topologies);
  auto protocol = protocol_of(a.common);
  const auto n = swc_topology_set_order(set.get());
  const auto x0 = initial_state(a, n);

  // Certificate at the requested h. With h = auto a failure is fatal; with an
  // explicit h the run proceeds uncertified (useful for counterexamples).
  std::optional<swc_certificate> cert;
  {
    swc_certificate c{};
    const auto st = swc_certify(set.get(), SWC_REGIME_AUTO, &protocol, &c);
    if (st == SWC_OK) {
      cert = c;
      protocol.h = c.h;
    } else if (protocol.h <= 0.0) {
      check(st, "cannot choose h automatically");
    } else {
      std::cerr << "warning: running uncertified: " << swc_last_error() << '\n';
    }
  }

  SchedulePtr schedule;
  if (!a.schedule_path.empty()) {
    swc_schedule* s = nullptr;
    check(swc_schedule_load(a.schedule_path.c_str(), &s));
    schedule.reset(s);
  } else {
    auto params = params_of(a.schedule);
    const bool explicit_ranges = a.schedule.ct_min || a.schedule.ct_max || a.schedule.dt_min || a.schedule.dt_max;
    std::optional<double> horizon;
    if (a.horizon == "auto") {
      if (!explicit_ranges && cert && cert->has_horizon_rate) {
        double h = 0.0;
        check(swc_sufficient_horizon(x0.data(), n, a.tol, cert->horizon_rate, &h));
        // Uncertified rates get extra margin for transients.
        horizon = h * (cert->has_decay_rate ? 1.25 : 2.0);
      }
    } else if (a.horizon != "none") {
      horizon = to_real(a.horizon, "--horizon");
    }
    if (horizon && *horizon > 0.0) {
      const double per_segment = *horizon / static_cast<double>(params.segments);
      params.ct_min = per_segment;
      params.ct_max = 2.0 * per_segment;
      params.dt_min = static_cast<std::uint64_t>(std::max(1.0, std::ceil(per_segment)));
      params.dt_max = 2 * params.dt_min;
    }
    schedule = make_random_schedule(a.schedule.seed, params, topology_ids(set.get()));
  }

  swc_trajectory* t = nullptr;
  check(swc_simulate(x0.data(), n, schedule.get(), set.get(), &protocol, a.resolution, &t));
  TrajectoryPtr traj(t);

  double predicted = 0.0;
  const bool has_prediction = swc_predict_consensus(set.get(), schedule.get(), x0.data(), n, &predicted) == SWC_OK;
  swc_verdict verdict{};
  check(swc_check_consensus(traj.get(), a.tol, has_prediction ? &predicted : nullptr, &verdict));

  ensure_dir(a.out);
  const fs::path out(a.out);
  check(swc_schedule_save(schedule.get(), (out / "schedule.txt").string().c_str()));
  check(swc_trajectory_write_csv(traj.get(), (out / "trajectory.csv").string().c_str()));
  check(swc_trajectory_write_series_csv(traj.get(), (out / "disagreement.csv").string().c_str()));
  std::ostringstream header;
  header.precision(12);
  header << "h = " << swc_trajectory_h(traj.get()) << '\n';
  const auto verdict_text = header.str() + text_of(swc_verdict_format, static_cast<const swc_verdict*>(&verdict));
  write_text(out / "verdict.txt", verdict_text);
  std::cout << verdict_text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus of switched continuous/discrete-time multi-agent systems"};
  app.require_subcommand(1);
  // --h is the sampling period, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", swc_version());

  CertifyArgs certify;
  auto* cert_cmd = app.add_subcommand("certify", "Certified sampling-period bounds and decay rates");
  add_common(cert_cmd, certify.common);
  cert_cmd->add_option("--out", certify.out, "Directory for certificate.txt and certificate.json");
  cert_cmd->add_flag("--json", certify.json, "Print JSON records instead of key = value text");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the switched system and report consensus");
  add_common(sim_cmd, sim.common);
  add_schedule_flags(sim_cmd, sim.schedule);
  sim_cmd->add_option("--schedule", sim.schedule_path, "Schedule file (otherwise a random schedule is drawn)");
  sim_cmd->add_option("--x0", sim.x0, "Initial state as a comma list, or seed:<u64> for uniform draws");
  sim_cmd->add_option("--x0-range", sim.x0_range, "lo,hi for seeded initial states");
  sim_cmd->add_option("--horizon", sim.horizon, "Random-schedule horizon: auto, none, or a time");
  sim_cmd->add_option("--tol", sim.tol, "Consensus tolerance on the final spread")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--resolution", sim.resolution, "Output spacing inside CT segments")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--out", sim.out, "Output directory");

  RandomScheduleArgs rs;
  auto* rs_cmd = app.add_subcommand("random-schedule", "Write a reproducible random switching schedule");
  add_schedule_flags(rs_cmd, rs.schedule);
  rs_cmd->add_option("--ids", rs.ids, "Comma-separated topology ids to draw from");
  rs_cmd->add_option("--out", rs.out, "Output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*cert_cmd) return run_certify(certify);
    if (*sim_cmd) return run_simulate(sim);
    if (*rs_cmd) return run_random_schedule(rs);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  }
  return 1;
}
