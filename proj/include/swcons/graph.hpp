#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace swcons {

enum class Orientation { Directed, Undirected };

/// Weighted interaction network over n agents.
///
/// weights()(i, j) > 0 means agent i receives the state of agent j, i.e. j is
/// an in-neighbour of i and information flows along the arc j -> i.
class Graph {
 public:
  /// Validates: square, n >= 1, finite nonnegative weights, zero diagonal,
  /// and exact symmetry when `orientation` is Undirected.
  Graph(Eigen::MatrixXd weights, Orientation orientation);

  struct Edge {
    std::size_t to;    // receiving agent i (0-based)
    std::size_t from;  // in-neighbour j (0-based)
    double weight;
  };

  /// Builds a graph from an edge list; undirected edges are mirrored.
  static Graph from_edges(std::size_t n, Orientation orientation, const std::vector<Edge>& edges);

  std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
  const Eigen::MatrixXd& weights() const noexcept { return weights_; }
  Orientation orientation() const noexcept { return orientation_; }
  bool undirected() const noexcept { return orientation_ == Orientation::Undirected; }

  /// Row sums of the adjacency matrix.
  Eigen::VectorXd degrees() const { return weights_.rowwise().sum(); }

 private:
  Eigen::MatrixXd weights_;
  Orientation orientation_;
};

/// Registered topologies keyed by schedule topology id.
using TopologySet = std::map<std::string, Graph>;

/// L = D - A for a Graph; rows sum to zero.
struct Laplacian {
  Eigen::MatrixXd matrix;
  Orientation orientation = Orientation::Directed;

  std::size_t size() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
  /// Recovers the generating adjacency matrix (off-diagonal negation).
  Eigen::MatrixXd adjacency() const;
  /// max_i sum_j |l_ij|, used to scale zero tolerances.
  double inf_norm() const { return matrix.cwiseAbs().rowwise().sum().maxCoeff(); }
};

struct Spectrum {
  /// Sorted by real part, then imaginary part. Values recognised as zero are
  /// stored as exactly 0.
  std::vector<std::complex<double>> eigenvalues;
  /// True when computed from a symmetric Laplacian; imaginary parts are 0.
  bool real = false;
  /// Number of eigenvalues recognised as zero.
  std::size_t zero_count = 0;
  /// Tolerance used to recognise zero eigenvalues.
  double zero_tolerance = 0.0;

  std::size_t size() const noexcept { return eigenvalues.size(); }
  /// Real part of the second eigenvalue (0 when n == 1).
  double lambda2() const;
  /// Largest real part.
  double lambda_max() const;
  bool is_zero(std::size_t i) const { return std::abs(eigenvalues[i]) < zero_tolerance; }
};

/// Normalised left null vector w of L: w^T L = 0, w^T 1 = 1.
struct LeftEigenvector {
  Eigen::VectorXd w;
};

/// Strongly connected components over arcs j -> i (a_ij > 0).
struct Condensation {
  std::vector<std::size_t> component_of;       // agent -> component index
  std::vector<std::vector<std::size_t>> members;  // component -> agents
  std::vector<std::size_t> sources;            // components without incoming arcs
};

Laplacian build_laplacian(const Graph& g);

/// Breadth-first reachability from agent 0. Throws Input on directed graphs.
bool is_connected(const Graph& g);

Condensation condense(const Eigen::MatrixXd& adjacency);

/// True iff exactly one source component exists in the condensation, i.e.
/// some root reaches every agent along arcs j -> i.
bool has_directed_spanning_tree(const Graph& g);

/// Dense eigenvalues of L. The matrix is first split into the diagonal blocks
/// of its strongly connected components (L is block triangular in that
/// ordering), so isolated and cascaded structure is resolved exactly.
Spectrum spectrum(const Laplacian& l);

/// Requires a directed spanning tree; throws Hypothesis naming the source
/// components otherwise.
LeftEigenvector left_eigenvector(const Laplacian& l);

/// Human-readable description of the source components, e.g. "{1,2} {4}".
std::string describe_sources(const Condensation& c);

}  // namespace swcons
