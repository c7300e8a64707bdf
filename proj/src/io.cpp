#include "swcons/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "swcons/error.hpp"

namespace swcons {

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string raw(text.substr(pos, end - pos));
    ++number;
    pos = end + 1;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream is(raw);
    Line line{number, {}};
    for (std::string tok; is >> tok;) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    if (end == text.size()) break;
  }
  return lines;
}

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& msg) {
  fail_input(source + ":" + std::to_string(line) + ": " + msg);
}

double parse_real(const std::string& tok, const std::string& source, std::size_t line, const char* what) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
    parse_error(source, line, std::string("invalid ") + what + " '" + tok + "'");
  return v;
}

std::uint64_t parse_unsigned(const std::string& tok, const std::string& source, std::size_t line, const char* what) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    parse_error(source, line, std::string("invalid ") + what + " '" + tok + "'");
  errno = 0;
  char* end = nullptr;
  const auto v = std::strtoull(tok.c_str(), &end, 10);
  if (errno == ERANGE || *end != '\0') parse_error(source, line, std::string(what) + " out of range '" + tok + "'");
  return v;
}

std::string fmt(double v, int digits) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_input("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail_input("cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) fail_input("write failed for '" + path.string() + "'");
}

Graph parse_graph(std::string_view text, const std::string& source) {
  const auto lines = tokenize(text);
  if (lines.empty()) fail_input(source + ": empty graph file (expected 'n <count> <directed|undirected>')");

  const auto& head = lines.front();
  if (head.tokens[0] != "n" || head.tokens.size() != 3)
    parse_error(source, head.number, "expected header 'n <count> <directed|undirected>'");
  const auto n = parse_unsigned(head.tokens[1], source, head.number, "agent count");
  if (n == 0) parse_error(source, head.number, "agent count must be positive");
  if (n > 100000) parse_error(source, head.number, "agent count too large");
  Orientation orientation;
  if (head.tokens[2] == "directed") {
    orientation = Orientation::Directed;
  } else if (head.tokens[2] == "undirected") {
    orientation = Orientation::Undirected;
  } else {
    parse_error(source, head.number, "orientation must be 'directed' or 'undirected', got '" + head.tokens[2] + "'");
  }

  std::vector<Graph::Edge> edges;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& l = lines[k];
    if (l.tokens[0] == "n") parse_error(source, l.number, "duplicate header");
    if (l.tokens[0] != "edge") parse_error(source, l.number, "unknown record '" + l.tokens[0] + "'");
    if (l.tokens.size() != 4) parse_error(source, l.number, "expected 'edge <i> <j> <w>'");
    const auto i = parse_unsigned(l.tokens[1], source, l.number, "agent index");
    const auto j = parse_unsigned(l.tokens[2], source, l.number, "agent index");
    const double w = parse_real(l.tokens[3], source, l.number, "weight");
    if (i < 1 || i > n || j < 1 || j > n)
      parse_error(source, l.number, "agent index out of range 1.." + std::to_string(n));
    if (i == j) parse_error(source, l.number, "self-loops are not allowed");
    if (w < 0.0) parse_error(source, l.number, "negative weight");
    auto key = std::make_pair(i, j);
    if (orientation == Orientation::Undirected && key.first > key.second) std::swap(key.first, key.second);
    if (!seen.insert(key).second) parse_error(source, l.number, "duplicate edge");
    edges.push_back({static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), w});
  }
  return Graph::from_edges(static_cast<std::size_t>(n), orientation, edges);
}

Graph load_graph(const std::filesystem::path& path) { return parse_graph(read_file(path), path.string()); }

std::string format_graph(const Graph& g) {
  std::ostringstream os;
  os << "n " << g.size() << ' ' << (g.undirected() ? "undirected" : "directed") << '\n';
  const auto& a = g.weights();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) <= 0.0 || (g.undirected() && j < i)) continue;
      os << "edge " << i + 1 << ' ' << j + 1 << ' ' << fmt(a(i, j), 17) << '\n';
    }
  return os.str();
}

Schedule parse_schedule(std::string_view text, const std::string& source) {
  Schedule s;
  for (const auto& l : tokenize(text)) {
    if (l.tokens.size() != 3) parse_error(source, l.number, "expected 'ct <duration> <id>' or 'dt <steps> <id>'");
    if (l.tokens[0] == "ct") {
      const double d = parse_real(l.tokens[1], source, l.number, "duration");
      if (!(d > 0.0)) parse_error(source, l.number, "CT duration must be positive");
      s.segments.push_back(Segment::ct(d, l.tokens[2]));
    } else if (l.tokens[0] == "dt") {
      const auto steps = parse_unsigned(l.tokens[1], source, l.number, "step count");
      if (steps == 0) parse_error(source, l.number, "DT step count must be positive");
      s.segments.push_back(Segment::dt(steps, l.tokens[2]));
    } else {
      parse_error(source, l.number, "unknown segment kind '" + l.tokens[0] + "'");
    }
  }
  return s;
}

Schedule load_schedule(const std::filesystem::path& path) { return parse_schedule(read_file(path), path.string()); }

std::string format_schedule(const Schedule& s) {
  std::ostringstream os;
  for (const auto& seg : s.segments) {
    if (seg.mode == Mode::Continuous)
      os << "ct " << fmt(seg.duration, 17) << ' ' << seg.topology << '\n';
    else
      os << "dt " << seg.steps << ' ' << seg.topology << '\n';
  }
  return os.str();
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const auto n = traj.x0.size();
  os << "t,mode,topology";
  for (Eigen::Index i = 0; i < n; ++i) os << ",x" << i + 1;
  os << '\n';
  os << std::setprecision(12);
  for (const auto& s : traj.samples) {
    os << s.t << ',' << to_string(s.mode) << ',' << traj.topology_of(s);
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << s.x(i);
    os << '\n';
  }
}

void write_series_csv(std::ostream& os, const DisagreementSeries& series) {
  os << "t,c,V\n" << std::setprecision(12);
  for (const auto& e : series) os << e.t << ',' << e.centroid << ',' << e.V << '\n';
}

std::string format_verdict(const ConsensusVerdict& v) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "reached = " << (v.reached ? "true" : "false") << '\n';
  os << "final_spread = " << v.final_spread << '\n';
  if (v.predicted_value) os << "predicted_value = " << *v.predicted_value << '\n';
  if (v.achieved_value) os << "achieved_value = " << *v.achieved_value << '\n';
  if (v.rate_infinite)
    os << "estimated_rate = inf\n";
  else if (v.estimated_rate)
    os << "estimated_rate = " << *v.estimated_rate << '\n';
  return os.str();
}

std::string format_report_text(const CertificateReport& r) {
  std::ostringstream os;
  os << "regime = " << to_string(r.regime) << '\n';
  os << "h_max = " << fmt(r.h_max, 6) << "  # exclusive bound: choose h strictly below\n";
  if (r.gershgorin_h) os << "gershgorin_h = " << fmt(*r.gershgorin_h, 6) << '\n';
  if (r.sector) os << "gamma1 = " << fmt(r.sector->gamma1, 6) << "\ngamma2 = " << fmt(r.sector->gamma2, 6) << '\n';
  if (r.h) os << "h = " << fmt(*r.h, 6) << '\n';
  if (r.ct_rate) os << "ct_rate = " << fmt(*r.ct_rate, 6) << '\n';
  if (r.dt_contraction) os << "dt_contraction = " << fmt(*r.dt_contraction, 6) << '\n';
  if (r.lambda2_step_factor) os << "lambda2_step_factor = " << fmt(*r.lambda2_step_factor, 6) << '\n';
  if (r.lambda2_step_factor_worst)
    os << "lambda2_step_factor_worst = " << fmt(*r.lambda2_step_factor_worst, 6) << '\n';
  if (r.decay_rate) os << "decay_rate = " << fmt(*r.decay_rate, 6) << '\n';
  if (r.horizon_rate && !r.decay_rate) os << "asymptotic_rate = " << fmt(*r.horizon_rate, 6) << "  # uncertified\n";
  os << "consensus_value_rule = " << to_string(r.consensus_rule) << '\n';
  return os.str();
}

std::string format_report_json(const CertificateReport& r) {
  nlohmann::ordered_json j;
  j["regime"] = to_string(r.regime);
  j["h_max"] = r.h_max;
  auto opt = [&j](const char* key, const std::optional<double>& v) { j[key] = v ? nlohmann::ordered_json(*v) : nullptr; };
  opt("gershgorin_h", r.gershgorin_h);
  opt("h", r.h);
  opt("ct_rate", r.ct_rate);
  opt("dt_contraction", r.dt_contraction);
  opt("lambda2_step_factor", r.lambda2_step_factor);
  opt("lambda2_step_factor_worst", r.lambda2_step_factor_worst);
  opt("decay_rate", r.decay_rate);
  opt("horizon_rate", r.horizon_rate);
  if (r.sector) {
    j["gamma1"] = r.sector->gamma1;
    j["gamma2"] = r.sector->gamma2;
  }
  j["consensus_value_rule"] = to_string(r.consensus_rule);
  return j.dump();
}

}  // namespace swcons
