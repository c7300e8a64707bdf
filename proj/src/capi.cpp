#include "swcons/swcons.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <string>
#include <vector>

#include "swcons/analysis.hpp"
#include "swcons/bounds.hpp"
#include "swcons/dynamics.hpp"
#include "swcons/error.hpp"
#include "swcons/io.hpp"
#include "swcons/random.hpp"

struct swc_graph {
  swcons::Graph graph;
};

struct swc_topology_set {
  swcons::TopologySet topologies;
  std::vector<std::string> ids;  // insertion order
};

struct swc_schedule {
  swcons::Schedule schedule;
};

struct swc_trajectory {
  swcons::Trajectory trajectory;
};

namespace {

thread_local std::string g_last_error;

swc_status record(swc_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <class F>
swc_status guarded(F&& body) {
  try {
    body();
    return SWC_OK;
  } catch (const swcons::Error& e) {
    return record(static_cast<swc_status>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return record(SWC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(SWC_ERR_INTERNAL, e.what());
  } catch (...) {
    return record(SWC_ERR_INTERNAL, "unknown exception");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) swcons::fail_input(std::string("null argument: ") + what);
}

swc_status copy_out(const std::string& text, char* buf, std::size_t cap, std::size_t* len) {
  if (len) *len = text.size();
  if (buf && cap > 0) {
    const auto n = std::min(cap - 1, text.size());
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
    if (n < text.size()) return record(SWC_ERR_INPUT, "output buffer too small");
  }
  return SWC_OK;
}

Eigen::VectorXd to_vector(const double* x, std::size_t n) {
  require(x, "state");
  return Eigen::Map<const Eigen::VectorXd>(x, static_cast<Eigen::Index>(n));
}

swcons::SectorBounds sector_of(const swc_protocol& p) { return {p.gamma1, p.gamma2}; }

swcons::ProtocolSpec protocol_of(const swc_protocol& p, double h) {
  if (p.kind == SWC_PROTOCOL_LINEAR) return swcons::ProtocolSpec::linear(h);
  if (p.kind != SWC_PROTOCOL_NONLINEAR) swcons::fail_input("unknown protocol kind");
  swcons::Coupling f;
  if (p.coupling) {
    auto fn = p.coupling;
    void* user = p.coupling_user;
    f = [fn, user](double x) { return fn(x, user); };
  } else {
    f = swcons::sector_coupling(p.gamma1, p.gamma2 - p.gamma1);
  }
  return swcons::ProtocolSpec::nonlinear(h, std::move(f), sector_of(p));
}

swcons::Regime resolve_regime(const swcons::TopologySet& set, swc_regime regime, const swc_protocol& p) {
  if (regime == SWC_REGIME_AUTO) return swcons::detect_regime(set, p.kind == SWC_PROTOCOL_NONLINEAR);
  if (regime < SWC_REGIME_UNDIRECTED_FIXED || regime > SWC_REGIME_NONLINEAR_SWITCHING)
    swcons::fail_input("unknown regime");
  return static_cast<swcons::Regime>(regime);
}

swcons::CertificateReport report_of(const swc_certificate& c) {
  swcons::CertificateReport r;
  r.regime = static_cast<swcons::Regime>(c.regime);
  r.h_max = c.h_max;
  r.h = c.h;
  if (c.has_gershgorin_h) r.gershgorin_h = c.gershgorin_h;
  if (c.has_ct_rate) r.ct_rate = c.ct_rate;
  if (c.has_dt_contraction) r.dt_contraction = c.dt_contraction;
  if (c.has_lambda2_step_factor) r.lambda2_step_factor = c.lambda2_step_factor;
  if (c.has_lambda2_step_factor_worst) r.lambda2_step_factor_worst = c.lambda2_step_factor_worst;
  if (c.has_decay_rate) r.decay_rate = c.decay_rate;
  if (c.has_horizon_rate) r.horizon_rate = c.horizon_rate;
  if (c.regime == SWC_REGIME_NONLINEAR_SWITCHING) r.sector = swcons::SectorBounds{c.gamma1, c.gamma2};
  r.consensus_rule = c.w_weighted ? swcons::ConsensusRule::WWeighted : swcons::ConsensusRule::Average;
  return r;
}

void fill(swc_certificate& c, const swcons::CertificateReport& r) {
  c = swc_certificate{};
  c.regime = static_cast<swc_regime>(r.regime);
  c.h_max = r.h_max;
  c.h = r.h.value_or(0.0);
  auto put = [](int& has, double& dst, const std::optional<double>& v) {
    has = v.has_value();
    dst = v.value_or(0.0);
  };
  put(c.has_gershgorin_h, c.gershgorin_h, r.gershgorin_h);
  put(c.has_ct_rate, c.ct_rate, r.ct_rate);
  put(c.has_dt_contraction, c.dt_contraction, r.dt_contraction);
  put(c.has_lambda2_step_factor, c.lambda2_step_factor, r.lambda2_step_factor);
  put(c.has_lambda2_step_factor_worst, c.lambda2_step_factor_worst, r.lambda2_step_factor_worst);
  put(c.has_decay_rate, c.decay_rate, r.decay_rate);
  put(c.has_horizon_rate, c.horizon_rate, r.horizon_rate);
  if (r.sector) {
    c.gamma1 = r.sector->gamma1;
    c.gamma2 = r.sector->gamma2;
  }
  c.w_weighted = r.consensus_rule == swcons::ConsensusRule::WWeighted;
}

}  // namespace

extern "C" {

const char* swc_version(void) { return "0.3.0"; }

const char* swc_last_error(void) { return g_last_error.c_str(); }

void swc_random_schedule_defaults(swc_random_schedule_params* params) {
  if (!params) return;
  const swcons::RandomScheduleParams d;
  params->segments = d.segments;
  params->ct_min = d.ct_min;
  params->ct_max = d.ct_max;
  params->dt_min = d.dt_min;
  params->dt_max = d.dt_max;
}

swc_status swc_graph_create(size_t n, const double* weights, int undirected, swc_graph** out) {
  return guarded([&] {
    require(out, "out");
    require(weights, "weights");
    const auto m = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd w = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        weights, m, m);
    *out = new swc_graph{swcons::Graph(std::move(w), undirected ? swcons::Orientation::Undirected
                                                                 : swcons::Orientation::Directed)};
  });
}

swc_status swc_graph_parse(const char* text, swc_graph** out) {
  return guarded([&] {
    require(out, "out");
    require(text, "text");
    *out = new swc_graph{swcons::parse_graph(text)};
  });
}

swc_status swc_graph_load(const char* path, swc_graph** out) {
  return guarded([&] {
    require(out, "out");
    require(path, "path");
    *out = new swc_graph{swcons::load_graph(path)};
  });
}

void swc_graph_free(swc_graph* g) { delete g; }

size_t swc_graph_order(const swc_graph* g) { return g ? g->graph.size() : 0; }

int swc_graph_is_undirected(const swc_graph* g) { return g && g->graph.undirected(); }

swc_status swc_graph_is_connected(const swc_graph* g, int* out) {
  return guarded([&] {
    require(g, "graph");
    require(out, "out");
    *out = swcons::is_connected(g->graph);
  });
}

swc_status swc_graph_has_spanning_tree(const swc_graph* g, int* out) {
  return guarded([&] {
    require(g, "graph");
    require(out, "out");
    *out = swcons::has_directed_spanning_tree(g->graph);
  });
}

swc_status swc_graph_laplacian(const swc_graph* g, double* out) {
  return guarded([&] {
    require(g, "graph");
    require(out, "out");
    const auto l = swcons::build_laplacian(g->graph);
    const auto n = static_cast<Eigen::Index>(l.size());
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(out, n, n) = l.matrix;
  });
}

swc_status swc_graph_spectrum(const swc_graph* g, double* re, double* im) {
  return guarded([&] {
    require(g, "graph");
    require(re, "re");
    const auto s = swcons::spectrum(swcons::build_laplacian(g->graph));
    for (std::size_t i = 0; i < s.size(); ++i) {
      re[i] = s.eigenvalues[i].real();
      if (im) im[i] = s.eigenvalues[i].imag();
    }
  });
}

swc_status swc_graph_left_eigenvector(const swc_graph* g, double* w) {
  return guarded([&] {
    require(g, "graph");
    require(w, "w");
    const auto v = swcons::left_eigenvector(swcons::build_laplacian(g->graph));
    Eigen::Map<Eigen::VectorXd>(w, v.w.size()) = v.w;
  });
}

swc_status swc_topology_set_create(swc_topology_set** out) {
  return guarded([&] {
    require(out, "out");
    *out = new swc_topology_set{};
  });
}

void swc_topology_set_free(swc_topology_set* set) { delete set; }

swc_status swc_topology_set_add(swc_topology_set* set, const char* id, const swc_graph* g) {
  return guarded([&] {
    require(set, "set");
    require(id, "id");
    require(g, "graph");
    const std::string key(id);
    if (key.empty() || key.find_first_of(" \t\r\n#") != std::string::npos)
      swcons::fail_input("topology id '" + key + "' must be a non-empty token without whitespace or '#'");
    if (!set->topologies.empty() && set->topologies.begin()->second.size() != g->graph.size())
      swcons::fail_input("topology '" + key + "' has " + std::to_string(g->graph.size()) +
                         " agents; the set has " + std::to_string(set->topologies.begin()->second.size()));
    if (!set->topologies.emplace(key, g->graph).second) swcons::fail_input("duplicate topology id '" + key + "'");
    set->ids.push_back(key);
  });
}

size_t swc_topology_set_size(const swc_topology_set* set) { return set ? set->topologies.size() : 0; }

size_t swc_topology_set_order(const swc_topology_set* set) {
  return (set && !set->topologies.empty()) ? set->topologies.begin()->second.size() : 0;
}

const char* swc_topology_set_id(const swc_topology_set* set, size_t index) {
  if (!set || index >= set->ids.size()) return nullptr;
  return set->ids[index].c_str();
}

swc_status swc_schedule_create(swc_schedule** out) {
  return guarded([&] {
    require(out, "out");
    *out = new swc_schedule{};
  });
}

swc_status swc_schedule_parse(const char* text, swc_schedule** out) {
  return guarded([&] {
    require(out, "out");
    require(text, "text");
    *out = new swc_schedule{swcons::parse_schedule(text)};
  });
}

swc_status swc_schedule_load(const char* path, swc_schedule** out) {
  return guarded([&] {
    require(out, "out");
    require(path, "path");
    *out = new swc_schedule{swcons::load_schedule(path)};
  });
}

swc_status swc_schedule_random(uint64_t seed, const swc_random_schedule_params* params, const char* const* ids,
                               size_t id_count, swc_schedule** out) {
  return guarded([&] {
    require(out, "out");
    require(params, "params");
    swcons::RandomScheduleParams p;
    p.segments = params->segments;
    p.ct_min = params->ct_min;
    p.ct_max = params->ct_max;
    p.dt_min = params->dt_min;
    p.dt_max = params->dt_max;
    if (id_count > 0) require(ids, "ids");
    for (std::size_t k = 0; k < id_count; ++k) {
      require(ids[k], "id");
      p.topology_ids.emplace_back(ids[k]);
    }
    *out = new swc_schedule{swcons::random_schedule(seed, p)};
  });
}

void swc_schedule_free(swc_schedule* s) { delete s; }

swc_status swc_schedule_add_ct(swc_schedule* s, double duration, const char* id) {
  return guarded([&] {
    require(s, "schedule");
    require(id, "id");
    if (!(duration > 0.0) || !std::isfinite(duration)) swcons::fail_input("CT duration must be positive and finite");
    s->schedule.segments.push_back(swcons::Segment::ct(duration, id));
  });
}

swc_status swc_schedule_add_dt(swc_schedule* s, uint64_t steps, const char* id) {
  return guarded([&] {
    require(s, "schedule");
    require(id, "id");
    if (steps == 0) swcons::fail_input("DT segment needs at least one step");
    s->schedule.segments.push_back(swcons::Segment::dt(steps, id));
  });
}

size_t swc_schedule_segment_count(const swc_schedule* s) { return s ? s->schedule.segments.size() : 0; }

double swc_schedule_total_ct(const swc_schedule* s) { return s ? s->schedule.total_ct() : 0.0; }

uint64_t swc_schedule_total_dt(const swc_schedule* s) { return s ? s->schedule.total_dt() : 0; }

swc_status swc_schedule_format(const swc_schedule* s, char* buf, size_t cap, size_t* len) {
  std::string text;
  const auto st = guarded([&] {
    require(s, "schedule");
    text = swcons::format_schedule(s->schedule);
  });
  return st == SWC_OK ? copy_out(text, buf, cap, len) : st;
}

swc_status swc_schedule_save(const swc_schedule* s, const char* path) {
  return guarded([&] {
    require(s, "schedule");
    require(path, "path");
    swcons::write_file(path, swcons::format_schedule(s->schedule));
  });
}

swc_status swc_certify(const swc_topology_set* set, swc_regime regime, const swc_protocol* protocol,
                       swc_certificate* out) {
  return guarded([&] {
    require(set, "set");
    require(protocol, "protocol");
    require(out, "out");
    const auto r = resolve_regime(set->topologies, regime, *protocol);
    std::optional<swcons::SectorBounds> sector;
    if (r == swcons::Regime::NonlinearSwitching) sector = sector_of(*protocol);
    std::optional<double> h;
    if (protocol->h > 0.0) h = protocol->h;
    fill(*out, swcons::certify(set->topologies, r, h, sector));
  });
}

swc_status swc_certificate_format(const swc_certificate* c, int json, char* buf, size_t cap, size_t* len) {
  std::string text;
  const auto st = guarded([&] {
    require(c, "certificate");
    const auto r = report_of(*c);
    text = json ? swcons::format_report_json(r) + "\n" : swcons::format_report_text(r);
  });
  return st == SWC_OK ? copy_out(text, buf, cap, len) : st;
}

const char* swc_regime_name(swc_regime regime) {
  if (regime < SWC_REGIME_UNDIRECTED_FIXED || regime > SWC_REGIME_NONLINEAR_SWITCHING) return "auto";
  return swcons::to_string(static_cast<swcons::Regime>(regime));
}

swc_status swc_simulate(const double* x0, size_t n, const swc_schedule* s, const swc_topology_set* set,
                        const swc_protocol* protocol, double output_resolution, swc_trajectory** out) {
  return guarded([&] {
    require(s, "schedule");
    require(set, "set");
    require(protocol, "protocol");
    require(out, "out");
    double h = protocol->h;
    if (!(h > 0.0)) {
      const auto r = resolve_regime(set->topologies, SWC_REGIME_AUTO, *protocol);
      std::optional<swcons::SectorBounds> sector;
      if (r == swcons::Regime::NonlinearSwitching) sector = sector_of(*protocol);
      h = 0.9 * swcons::certify(set->topologies, r, std::nullopt, sector).h_max;
    }
    swcons::SimulationOptions opts;
    if (output_resolution > 0.0) opts.output_resolution = output_resolution;
    auto traj = swcons::simulate(to_vector(x0, n), s->schedule, set->topologies, protocol_of(*protocol, h), opts);
    *out = new swc_trajectory{std::move(traj)};
  });
}

void swc_trajectory_free(swc_trajectory* t) { delete t; }

size_t swc_trajectory_sample_count(const swc_trajectory* t) { return t ? t->trajectory.samples.size() : 0; }

size_t swc_trajectory_order(const swc_trajectory* t) {
  return t ? static_cast<std::size_t>(t->trajectory.x0.size()) : 0;
}

double swc_trajectory_h(const swc_trajectory* t) { return t ? t->trajectory.h : 0.0; }

swc_status swc_trajectory_sample(const swc_trajectory* t, size_t index, double* time, double* x, swc_mode* mode) {
  return guarded([&] {
    require(t, "trajectory");
    if (index >= t->trajectory.samples.size()) swcons::fail_input("sample index out of range");
    const auto& s = t->trajectory.samples[index];
    if (time) *time = s.t;
    if (x) Eigen::Map<Eigen::VectorXd>(x, s.x.size()) = s.x;
    if (mode) *mode = s.mode == swcons::Mode::Continuous ? SWC_MODE_CT : SWC_MODE_DT;
  });
}

swc_status swc_trajectory_write_csv(const swc_trajectory* t, const char* path) {
  return guarded([&] {
    require(t, "trajectory");
    require(path, "path");
    std::ofstream os(path, std::ios::trunc);
    if (!os) swcons::fail_input(std::string("cannot write '") + path + "'");
    swcons::write_trajectory_csv(os, t->trajectory);
    if (!os) swcons::fail_input(std::string("write failed for '") + path + "'");
  });
}

swc_status swc_trajectory_write_series_csv(const swc_trajectory* t, const char* path) {
  return guarded([&] {
    require(t, "trajectory");
    require(path, "path");
    std::ofstream os(path, std::ios::trunc);
    if (!os) swcons::fail_input(std::string("cannot write '") + path + "'");
    swcons::write_series_csv(os, swcons::disagreement(t->trajectory));
    if (!os) swcons::fail_input(std::string("write failed for '") + path + "'");
  });
}

swc_status swc_predict_consensus(const swc_topology_set* set, const swc_schedule* s, const double* x0, size_t n,
                                 double* out) {
  return guarded([&] {
    require(set, "set");
    require(out, "out");
    const swcons::Schedule empty;
    *out = swcons::predict_consensus_value(set->topologies, s ? s->schedule : empty, to_vector(x0, n));
  });
}

swc_status swc_check_consensus(const swc_trajectory* t, double tol, const double* predicted, swc_verdict* out) {
  return guarded([&] {
    require(t, "trajectory");
    require(out, "out");
    std::optional<double> p;
    if (predicted) p = *predicted;
    const auto v = swcons::check_consensus(t->trajectory, tol, p);
    *out = swc_verdict{};
    out->reached = v.reached;
    out->final_spread = v.final_spread;
    out->has_predicted_value = v.predicted_value.has_value();
    out->predicted_value = v.predicted_value.value_or(0.0);
    out->has_achieved_value = v.achieved_value.has_value();
    out->achieved_value = v.achieved_value.value_or(0.0);
    out->has_estimated_rate = v.estimated_rate.has_value();
    out->estimated_rate = v.estimated_rate.value_or(0.0);
    out->rate_infinite = v.rate_infinite;
  });
}

swc_status swc_verdict_format(const swc_verdict* v, char* buf, size_t cap, size_t* len) {
  std::string text;
  const auto st = guarded([&] {
    require(v, "verdict");
    swcons::ConsensusVerdict c;
    c.reached = v->reached;
    c.final_spread = v->final_spread;
    if (v->has_predicted_value) c.predicted_value = v->predicted_value;
    if (v->has_achieved_value) c.achieved_value = v->achieved_value;
    if (v->has_estimated_rate) c.estimated_rate = v->estimated_rate;
    c.rate_infinite = v->rate_infinite;
    text = swcons::format_verdict(c);
  });
  return st == SWC_OK ? copy_out(text, buf, cap, len) : st;
}

swc_status swc_sufficient_horizon(const double* x0, size_t n, double tol, double rate, double* out) {
  return guarded([&] {
    require(out, "out");
    const auto e = swcons::disagreement_at(0.0, to_vector(x0, n));
    *out = swcons::sufficient_horizon(e.V, tol, rate);
  });
}

swc_status swc_random_state(uint64_t seed, size_t n, double lo, double hi, double* out) {
  return guarded([&] {
    require(out, "out");
    const auto x = swcons::random_state(seed, n, lo, hi);
    Eigen::Map<Eigen::VectorXd>(out, x.size()) = x;
  });
}

}  // extern "C"
