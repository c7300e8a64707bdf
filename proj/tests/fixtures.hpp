#pragma once

// Standard graphs and seeded generators shared by the test suites.

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "swcons/graph.hpp"
#include "swcons/random.hpp"

namespace fixtures {

using swcons::Graph;
using swcons::Orientation;

inline Graph complete(std::size_t n, double w = 1.0) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), w);
  a.diagonal().setZero();
  return Graph(a, Orientation::Undirected);
}

inline Graph path(std::size_t n) {
  std::vector<Graph::Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, 1.0});
  return Graph::from_edges(n, Orientation::Undirected, e);
}

/// Hub 0 joined to n-1 leaves.
inline Graph star(std::size_t n) {
  std::vector<Graph::Edge> e;
  for (std::size_t i = 1; i < n; ++i) e.push_back({0, i, 1.0});
  return Graph::from_edges(n, Orientation::Undirected, e);
}

inline Graph edgeless(std::size_t n, Orientation o = Orientation::Undirected) {
  return Graph(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)), o);
}

/// a_12 = a_23 = a_31 = 1.
inline Graph directed_cycle3() {
  return Graph::from_edges(3, Orientation::Directed, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}});
}

/// Agent 2 hears agent 1 (a_21 = 1) and nothing else.
inline Graph leader_follower() { return Graph::from_edges(2, Orientation::Directed, {{1, 0, 1.0}}); }

/// Random connected undirected graph: a random spanning tree plus each other
/// pair with probability `extra`, weights uniform in (0, 2].
inline Graph random_connected(swcons::Rng& rng, std::size_t n, double extra = 0.3) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  auto weight = [&rng] { return 2.0 * (1.0 - rng.uniform()); };
  for (std::size_t i = 1; i < n; ++i) {
    const auto j = static_cast<Eigen::Index>(rng.uniform_int(0, i - 1));
    const auto ii = static_cast<Eigen::Index>(i);
    a(ii, j) = a(j, ii) = weight();
  }
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = i + 1; j < a.cols(); ++j)
      if (a(i, j) == 0.0 && rng.uniform() < extra) a(i, j) = a(j, i) = weight();
  return Graph(a, Orientation::Undirected);
}

/// Random undirected graph that may be disconnected.
inline Graph random_undirected(swcons::Rng& rng, std::size_t n, double p) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = i + 1; j < a.cols(); ++j)
      if (rng.uniform() < p) a(i, j) = a(j, i) = 2.0 * (1.0 - rng.uniform());
  return Graph(a, Orientation::Undirected);
}

/// Random digraph with arc probability p and weights in (0, 2].
inline Graph random_directed(swcons::Rng& rng, std::size_t n, double p) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j && rng.uniform() < p) a(i, j) = 2.0 * (1.0 - rng.uniform());
  return Graph(a, Orientation::Directed);
}

/// Random digraph guaranteed to have a spanning tree rooted at agent 0.
inline Graph random_rooted(swcons::Rng& rng, std::size_t n, double p) {
  Eigen::MatrixXd a = random_directed(rng, n, p).weights();
  for (std::size_t i = 1; i < n; ++i) {
    const auto parent = static_cast<Eigen::Index>(rng.uniform_int(0, i - 1));
    a(static_cast<Eigen::Index>(i), parent) = 2.0 * (1.0 - rng.uniform());
  }
  return Graph(a, Orientation::Directed);
}

inline Eigen::VectorXd ones(std::size_t n) { return Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)); }

}  // namespace fixtures
