#pragma once

// Electrical and communication graphs of the microgrid, the per-edge
// consensus gains, and the structural matrices of the consensus error
// dynamics (pinned Laplacian K^c, follower Laplacian Kbar^c, disagreement
// projector Omega, and the block matrix A).
//
// DG indices are 0-based in code; the scenario files use 1-based indices.

#include <Eigen/Dense>

#include <map>
#include <set>
#include <utility>
#include <vector>

namespace mgsync {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Index of the virtual leader node (node 0 of the augmented graph).
inline constexpr int kLeader = -1;

struct Line {
  int from = 0;
  int to = 0;
  double conductance = 0.0;  // G_ij [1/Ohm]
  double susceptance = 0.0;  // B_ij [1/Ohm]
};

/// Undirected power-line graph. Symmetric by construction: a line (i, j)
/// carries the same G and B seen from either end.
class ElectricalGraph {
 public:
  /// Throws Error{kConfig} on self-loops, out-of-range indices, duplicate
  /// lines, or when the susceptance-nonzero edges do not connect all DGs.
  ElectricalGraph(int n_dg, std::vector<Line> lines);

  [[nodiscard]] int size() const noexcept { return n_; }
  [[nodiscard]] const std::vector<Line>& lines() const noexcept { return lines_; }
  [[nodiscard]] const Matrix& conductance() const noexcept { return g_; }
  [[nodiscard]] const Matrix& susceptance() const noexcept { return b_; }
  /// Electrical neighbours of DG i (B_ij != 0).
  [[nodiscard]] const std::vector<int>& neighbors(int i) const { return adj_.at(i); }

 private:
  int n_;
  std::vector<Line> lines_;
  Matrix g_;
  Matrix b_;
  std::vector<std::vector<int>> adj_;
};

/// Undirected follower graph plus the set of DGs pinned to the leader.
class CommTopology {
 public:
  /// Throws Error{kConfig} if the follower graph is not connected, has
  /// self-loops or out-of-range nodes, or no DG is pinned.
  CommTopology(int n_dg, std::vector<std::pair<int, int>> follower_edges, std::set<int> leader_pins);

  [[nodiscard]] int size() const noexcept { return n_; }
  /// Normalised (i < j), sorted, unique.
  [[nodiscard]] const std::vector<std::pair<int, int>>& follower_edges() const noexcept { return edges_; }
  [[nodiscard]] const std::set<int>& leader_pins() const noexcept { return pins_; }
  [[nodiscard]] bool has_follower_edge(int i, int j) const;
  [[nodiscard]] bool is_pinned(int i) const { return pins_.count(i) != 0; }
  /// Follower neighbours of i (the set N_i^c).
  [[nodiscard]] const std::vector<int>& neighbors(int i) const { return adj_.at(i); }

  /// Directed edge set of the augmented graph: (i, j) and (j, i) for every
  /// follower edge, and (i, kLeader) for every pinned DG.
  [[nodiscard]] std::vector<std::pair<int, int>> augmented_directed_edges() const;
  /// Directed follower edges (i, j) and (j, i).
  [[nodiscard]] std::vector<std::pair<int, int>> follower_directed_edges() const;

 private:
  int n_;
  std::vector<std::pair<int, int>> edges_;
  std::set<int> pins_;
  std::vector<std::vector<int>> adj_;
};

using EdgeGains = std::map<std::pair<int, int>, double>;

/// Consensus gains k_ij (augmented graph, (i, kLeader) for pins), kbar_ij
/// (follower graph) and the ISM gains m_i. Directed: k_ij and k_ji are
/// independent values.
struct GainSet {
  EdgeGains k;
  EdgeGains k_bar;
  std::vector<double> m;
};

/// Throws Error{kConfig} when a gain sits on a non-edge, an edge lacks a
/// gain, or an edge gain is not strictly positive. m is checked only when
/// non-empty (synthesized gain sets carry no m).
void validate_gains(const CommTopology& topology, const GainSet& gains);

/// K^c: diag = sum of k_ij over the augmented neighbourhood (leader pin
/// included), off-diagonal = -k_ij on follower edges.
Matrix pinned_matrix(const CommTopology& topology, const GainSet& gains);

/// Kbar^c: weighted follower Laplacian (zero row sums).
Matrix follower_matrix(const CommTopology& topology, const GainSet& gains);

/// Omega = I - 1 1^T / n.
Matrix disagreement_matrix(int n);

/// A = -[[K, Kbar], [Omega K, Omega Kbar]] (negative-feedback sign).
Matrix error_dynamics_matrix(const Matrix& pinned, const Matrix& follower, const Matrix& omega);

}  // namespace mgsync
