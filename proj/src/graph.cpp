#include "swcons/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "swcons/error.hpp"

namespace swcons {

namespace {

constexpr double kZeroRelTol = 1e-9;
constexpr double kClusterRelTol = 1e-5;

// Eigenvalues of a defective block come back spread around the true value by
// roughly eps^(1/k); the mean of each such cluster is accurate to O(eps).
void merge_clusters(std::vector<std::complex<double>>& vals, double tol) {
  const std::size_t m = vals.size();
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  const auto find = [&parent](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (std::abs(vals[i] - vals[j]) <= tol) parent[find(i)] = find(j);
  std::vector<std::complex<double>> sum(m);
  std::vector<std::size_t> count(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    sum[find(i)] += vals[i];
    ++count[find(i)];
  }
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t r = find(i);
    if (count[r] > 1) vals[i] = sum[r] / static_cast<double>(count[r]);
  }
}

bool exactly_symmetric(const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != m(j, i)) return false;
  return true;
}

}  // namespace

Graph::Graph(Eigen::MatrixXd weights, Orientation orientation)
    : weights_(std::move(weights)), orientation_(orientation) {
  if (weights_.rows() == 0 || weights_.rows() != weights_.cols())
    fail_input("graph weight matrix must be square with at least one agent");
  const auto n = weights_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = weights_(i, j);
      if (!std::isfinite(w) || w < 0.0) {
        std::ostringstream os;
        os << "weight a(" << i + 1 << "," << j + 1 << ") = " << w << " is not a finite nonnegative number";
        fail_input(os.str());
      }
    }
    if (weights_(i, i) != 0.0) {
      std::ostringstream os;
      os << "self-loop at agent " << i + 1 << " (nonzero diagonal weight)";
      fail_input(os.str());
    }
  }
  if (orientation_ == Orientation::Undirected && !exactly_symmetric(weights_))
    fail_input("graph declared undirected but its weight matrix is not symmetric");
}

Graph Graph::from_edges(std::size_t n, Orientation orientation, const std::vector<Edge>& edges) {
  if (n == 0) fail_input("graph must have at least one agent");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& e : edges) {
    if (e.to >= n || e.from >= n) fail_input("edge endpoint out of range");
    w(static_cast<Eigen::Index>(e.to), static_cast<Eigen::Index>(e.from)) = e.weight;
    if (orientation == Orientation::Undirected)
      w(static_cast<Eigen::Index>(e.from), static_cast<Eigen::Index>(e.to)) = e.weight;
  }
  return Graph(std::move(w), orientation);
}

Eigen::MatrixXd Laplacian::adjacency() const {
  Eigen::MatrixXd a = -matrix;
  a.diagonal().setZero();
  return a;
}

double Spectrum::lambda2() const {
  if (eigenvalues.size() < 2) return 0.0;
  return eigenvalues[1].real();
}

double Spectrum::lambda_max() const {
  double best = 0.0;
  for (const auto& z : eigenvalues) best = std::max(best, z.real());
  return best;
}

Laplacian build_laplacian(const Graph& g) {
  Laplacian l;
  l.orientation = g.orientation();
  l.matrix = -g.weights();
  l.matrix.diagonal() = g.degrees();
  return l;
}

bool is_connected(const Graph& g) {
  if (!g.undirected()) fail_input("is_connected requires an undirected graph; use has_directed_spanning_tree");
  const auto n = g.size();
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const auto u = frontier.front();
    frontier.pop();
    for (std::size_t v = 0; v < n; ++v) {
      if (!seen[v] && g.weights()(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) > 0.0) {
        seen[v] = true;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n;
}

Condensation condense(const Eigen::MatrixXd& adjacency) {
  // Iterative Tarjan over arcs j -> i whenever adjacency(i, j) > 0.
  const auto n = static_cast<std::size_t>(adjacency.rows());
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::vector<std::size_t>> out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && adjacency(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0)
        out[j].push_back(i);

  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t counter = 0;

  Condensation c;
  c.component_of.assign(n, kUnvisited);

  struct Frame {
    std::size_t node;
    std::size_t next_edge;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& f = call.back();
      if (f.next_edge < out[f.node].size()) {
        const auto v = out[f.node][f.next_edge++];
        if (index[v] == kUnvisited) {
          index[v] = low[v] = counter++;
          stack.push_back(v);
          on_stack[v] = true;
          call.push_back({v, 0});
        } else if (on_stack[v]) {
          low[f.node] = std::min(low[f.node], index[v]);
        }
        continue;
      }
      const auto u = f.node;
      if (low[u] == index[u]) {
        std::vector<std::size_t> comp;
        std::size_t v;
        do {
          v = stack.back();
          stack.pop_back();
          on_stack[v] = false;
          c.component_of[v] = c.members.size();
          comp.push_back(v);
        } while (v != u);
        std::sort(comp.begin(), comp.end());
        c.members.push_back(std::move(comp));
      }
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[u]);
    }
  }

  std::vector<bool> has_incoming(c.members.size(), false);
  for (std::size_t j = 0; j < n; ++j)
    for (auto i : out[j])
      if (c.component_of[i] != c.component_of[j]) has_incoming[c.component_of[i]] = true;
  for (std::size_t k = 0; k < c.members.size(); ++k)
    if (!has_incoming[k]) c.sources.push_back(k);
  return c;
}

bool has_directed_spanning_tree(const Graph& g) { return condense(g.weights()).sources.size() == 1; }

std::string describe_sources(const Condensation& c) {
  std::ostringstream os;
  bool first = true;
  for (auto k : c.sources) {
    if (!first) os << ' ';
    first = false;
    os << '{';
    for (std::size_t m = 0; m < c.members[k].size(); ++m) os << (m ? "," : "") << c.members[k][m] + 1;
    os << '}';
  }
  return os.str();
}

Spectrum spectrum(const Laplacian& l) {
  const auto n = l.size();
  if (n == 0) fail_input("empty Laplacian");
  if (!l.matrix.allFinite()) fail_numerical("Laplacian contains non-finite entries");

  Spectrum s;
  s.real = exactly_symmetric(l.matrix);
  s.zero_tolerance = kZeroRelTol * std::max(1.0, l.inf_norm());
  s.eigenvalues.reserve(n);

  const auto cond = condense(l.adjacency());
  for (const auto& comp : cond.members) {
    const auto m = static_cast<Eigen::Index>(comp.size());
    Eigen::MatrixXd block(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b)
        block(a, b) = l.matrix(static_cast<Eigen::Index>(comp[a]), static_cast<Eigen::Index>(comp[b]));
    if (m == 1) {
      s.eigenvalues.emplace_back(block(0, 0), 0.0);
    } else if (s.real) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block, Eigen::EigenvaluesOnly);
      if (solver.info() != Eigen::Success) fail_numerical("symmetric eigen-solver failed to converge");
      for (Eigen::Index k = 0; k < m; ++k) s.eigenvalues.emplace_back(solver.eigenvalues()(k), 0.0);
    } else {
      Eigen::EigenSolver<Eigen::MatrixXd> solver(block, false);
      if (solver.info() != Eigen::Success) fail_numerical("Hessenberg-QR eigen-solver failed to converge");
      std::vector<std::complex<double>> vals(solver.eigenvalues().begin(), solver.eigenvalues().end());
      merge_clusters(vals, kClusterRelTol * std::max(1.0, block.cwiseAbs().rowwise().sum().maxCoeff()));
      s.eigenvalues.insert(s.eigenvalues.end(), vals.begin(), vals.end());
    }
  }

  for (auto& z : s.eigenvalues) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail_numerical("eigen-solver produced non-finite eigenvalues");
    if (std::abs(z) < s.zero_tolerance) {
      z = {0.0, 0.0};
      ++s.zero_count;
    }
  }
  if (s.zero_count == 0)
    fail_numerical("no zero eigenvalue found although L*1 = 0; eigen-solver result is inconsistent");

  // Sort by real part, then by imaginary part among near-equal real parts so
  // that conjugate pairs come out in a stable order.
  auto& ev = s.eigenvalues;
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return a.real() < b.real(); });
  const double group_tol = s.zero_tolerance;
  for (std::size_t first = 0; first < ev.size();) {
    std::size_t last = first + 1;
    while (last < ev.size() && ev[last].real() - ev[last - 1].real() <= group_tol) ++last;
    std::sort(ev.begin() + static_cast<std::ptrdiff_t>(first), ev.begin() + static_cast<std::ptrdiff_t>(last),
              [](auto a, auto b) { return a.imag() < b.imag(); });
    first = last;
  }
  return s;
}

LeftEigenvector left_eigenvector(const Laplacian& l) {
  const auto n = static_cast<Eigen::Index>(l.size());
  const auto cond = condense(l.adjacency());
  if (cond.sources.size() != 1) {
    std::ostringstream os;
    os << "no directed spanning tree: " << cond.sources.size()
       << " source components " << describe_sources(cond) << " cannot be reached from one another";
    fail_hypothesis(os.str());
  }
  const auto s = spectrum(l);
  if (s.zero_count != 1) {
    std::ostringstream os;
    os << "inconsistent spectrum: graph has a directed spanning tree but " << s.zero_count
       << " eigenvalues were recognised as zero";
    fail_numerical(os.str());
  }

  // Rows of L^T are dependent only through the all-ones combination, so
  // replacing one of them by the normalisation row gives a regular system.
  Eigen::MatrixXd m = l.matrix.transpose();
  m.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::VectorXd w = m.fullPivLu().solve(rhs);

  // Entries outside the root component are structurally zero.
  const auto& root = cond.members[cond.sources.front()];
  std::vector<bool> in_root(static_cast<std::size_t>(n), false);
  for (auto v : root) in_root[v] = true;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!in_root[static_cast<std::size_t>(i)]) w(i) = 0.0;
  w /= w.sum();

  const double scale = std::max(1.0, l.inf_norm());
  const double residual = (w.transpose() * l.matrix).cwiseAbs().maxCoeff();
  if (!w.allFinite() || residual > 1e-9 * scale || w.minCoeff() < -1e-12)
    fail_numerical("left null vector solve lost accuracy (residual " + std::to_string(residual) + ")");
  w = w.cwiseMax(0.0);
  w /= w.sum();
  return {std::move(w)};
}

}  // namespace swcons
