#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "swcons/analysis.hpp"
#include "swcons/bounds.hpp"
#include "swcons/dynamics.hpp"
#include "swcons/graph.hpp"

namespace swcons {

// Graph files:
//   # comment
//   n <count> <directed|undirected>
//   edge <i> <j> <w>        a_ij = w, 1-based; undirected edges listed once
//
// Schedule files:
//   ct <duration> <topology_id>
//   dt <steps> <topology_id>
//
// Parse errors are Input errors of the form "<source>:<line>: <message>".

Graph parse_graph(std::string_view text, const std::string& source = "<graph>");
Graph load_graph(const std::filesystem::path& path);
std::string format_graph(const Graph& g);

Schedule parse_schedule(std::string_view text, const std::string& source = "<schedule>");
Schedule load_schedule(const std::filesystem::path& path);
/// Round-trips exactly through parse_schedule (durations use 17 significant digits).
std::string format_schedule(const Schedule& s);

/// CSV `t,mode,topology,x1,...,xn`, 12 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
/// CSV `t,c,V`.
void write_series_csv(std::ostream& os, const DisagreementSeries& series);

std::string format_verdict(const ConsensusVerdict& v);
/// Flat `key = value` block; bounds printed with 6 significant digits.
std::string format_report_text(const CertificateReport& r);
/// One JSON object on a single line.
std::string format_report_json(const CertificateReport& r);

/// Reads a whole file, throwing Input when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace swcons
