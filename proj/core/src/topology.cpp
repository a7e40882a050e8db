#include "mgsync/topology.hpp"

#include "mgsync/errors.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace mgsync {
namespace {

bool connected(int n, const std::vector<std::vector<int>>& adj) {
  if (n <= 1) return true;
  std::vector<bool> seen(n, false);
  std::queue<int> open;
  open.push(0);
  seen[0] = true;
  int count = 1;
  while (!open.empty()) {
    const int u = open.front();
    open.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        open.push(v);
      }
    }
  }
  return count == n;
}

void check_node(int n, int i, const char* what) {
  if (i < 0 || i >= n) {
    fail(ErrorCategory::kConfig, std::string(what) + ": node index " + std::to_string(i + 1) +
                                     " outside 1.." + std::to_string(n));
  }
}

std::string edge_name(std::pair<int, int> e) {
  const std::string j = e.second == kLeader ? "0" : std::to_string(e.second + 1);
  return "(" + std::to_string(e.first + 1) + "," + j + ")";
}

}  // namespace

ElectricalGraph::ElectricalGraph(int n_dg, std::vector<Line> lines)
    : n_(n_dg), lines_(std::move(lines)), g_(Matrix::Zero(n_dg, n_dg)), b_(Matrix::Zero(n_dg, n_dg)), adj_(n_dg) {
  if (n_dg < 1) fail(ErrorCategory::kConfig, "electrical graph needs at least one DG");
  for (const Line& l : lines_) {
    check_node(n_, l.from, "line");
    check_node(n_, l.to, "line");
    if (l.from == l.to) fail(ErrorCategory::kConfig, "line self-loop at DG " + std::to_string(l.from + 1));
    if (g_(l.from, l.to) != 0.0 || b_(l.from, l.to) != 0.0) {
      fail(ErrorCategory::kConfig, "duplicate line " + edge_name({l.from, l.to}));
    }
    g_(l.from, l.to) = g_(l.to, l.from) = l.conductance;
    b_(l.from, l.to) = b_(l.to, l.from) = l.susceptance;
    if (l.susceptance != 0.0) {
      adj_[l.from].push_back(l.to);
      adj_[l.to].push_back(l.from);
    }
  }
  for (auto& a : adj_) std::sort(a.begin(), a.end());
  if (!connected(n_, adj_)) fail(ErrorCategory::kConfig, "electrical graph is not connected over B != 0 lines");
}

CommTopology::CommTopology(int n_dg, std::vector<std::pair<int, int>> follower_edges, std::set<int> leader_pins)
    : n_(n_dg), pins_(std::move(leader_pins)), adj_(n_dg) {
  if (n_dg < 1) fail(ErrorCategory::kConfig, "communication graph needs at least one DG");
  for (auto [i, j] : follower_edges) {
    check_node(n_, i, "comm edge");
    check_node(n_, j, "comm edge");
    if (i == j) fail(ErrorCategory::kConfig, "comm self-loop at DG " + std::to_string(i + 1));
    edges_.emplace_back(std::min(i, j), std::max(i, j));
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (auto [i, j] : edges_) {
    adj_[i].push_back(j);
    adj_[j].push_back(i);
  }
  for (auto& a : adj_) std::sort(a.begin(), a.end());
  for (int p : pins_) check_node(n_, p, "leader pin");
  if (pins_.empty()) fail(ErrorCategory::kConfig, "no DG is pinned to the leader");
  if (!connected(n_, adj_)) fail(ErrorCategory::kConfig, "communication graph is not connected");
}

bool CommTopology::has_follower_edge(int i, int j) const {
  return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(std::min(i, j), std::max(i, j)));
}

std::vector<std::pair<int, int>> CommTopology::follower_directed_edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(2 * edges_.size());
  for (auto [i, j] : edges_) {
    out.emplace_back(i, j);
    out.emplace_back(j, i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<int, int>> CommTopology::augmented_directed_edges() const {
  auto out = follower_directed_edges();
  for (int p : pins_) out.emplace_back(p, kLeader);
  std::sort(out.begin(), out.end());
  return out;
}

void validate_gains(const CommTopology& topology, const GainSet& gains) {
  auto check = [](const EdgeGains& present, const std::vector<std::pair<int, int>>& required, const char* name) {
    for (const auto& [edge, value] : present) {
      if (!std::binary_search(required.begin(), required.end(), edge)) {
        fail(ErrorCategory::kConfig, std::string(name) + " gain on non-edge " + edge_name(edge));
      }
      if (!(value > 0.0)) {
        fail(ErrorCategory::kConfig, std::string(name) + " gain on edge " + edge_name(edge) + " must be > 0");
      }
    }
    for (const auto& edge : required) {
      if (present.count(edge) == 0) {
        fail(ErrorCategory::kConfig, std::string(name) + " gain missing on edge " + edge_name(edge));
      }
    }
  };
  check(gains.k, topology.augmented_directed_edges(), "k");
  check(gains.k_bar, topology.follower_directed_edges(), "k_bar");
  if (!gains.m.empty()) {
    if (static_cast<int>(gains.m.size()) != topology.size()) {
      fail(ErrorCategory::kConfig, "m must have one entry per DG");
    }
    for (double m : gains.m) {
      if (!(m > 0.0)) fail(ErrorCategory::kConfig, "ISM gain m_i must be > 0");
    }
  }
}

Matrix pinned_matrix(const CommTopology& topology, const GainSet& gains) {
  validate_gains(topology, gains);
  const int n = topology.size();
  Matrix k = Matrix::Zero(n, n);
  for (const auto& [edge, value] : gains.k) {
    const auto [i, j] = edge;
    k(i, i) += value;
    if (j != kLeader) k(i, j) = -value;
  }
  return k;
}

Matrix follower_matrix(const CommTopology& topology, const GainSet& gains) {
  validate_gains(topology, gains);
  const int n = topology.size();
  Matrix k = Matrix::Zero(n, n);
  for (const auto& [edge, value] : gains.k_bar) {
    const auto [i, j] = edge;
    k(i, i) += value;
    k(i, j) = -value;
  }
  return k;
}

Matrix disagreement_matrix(int n) {
  if (n < 1) fail(ErrorCategory::kDimension, "disagreement matrix needs n >= 1");
  return Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
}

Matrix error_dynamics_matrix(const Matrix& pinned, const Matrix& follower, const Matrix& omega) {
  const auto n = pinned.rows();
  if (pinned.cols() != n || follower.rows() != n || follower.cols() != n || omega.rows() != n ||
      omega.cols() != n) {
    fail(ErrorCategory::kDimension, "error_dynamics_matrix: K, Kbar and Omega must all be N x N");
  }
  Matrix a(2 * n, 2 * n);
  a.topLeftCorner(n, n) = -pinned;
  a.topRightCorner(n, n) = -follower;
  a.bottomLeftCorner(n, n) = -(omega * pinned);
  a.bottomRightCorner(n, n) = -(omega * follower);
  return a;
}

}  // namespace mgsync
