#pragma once

// Small dense primal-dual interior-point solver for block-diagonal
// semidefinite programs in the dual form
//
//     maximize    b^T y
//     subject to  S = C - sum_i y_i A_i  is positive semidefinite,
//
// where S is block diagonal with dense symmetric blocks and diagonal (LP)
// blocks. The paired primal is min <C, X> s.t. <A_i, X> = b_i, X >= 0.
//
// Search direction: HKM (X ΔS S^-1 form) with Mehrotra predictor-corrector
// and an infeasible starting point. Sized for problems with a few hundred
// variables and blocks up to ~100 x 100.

#include <Eigen/Dense>

#include <vector>

namespace mgsync::sdp {

struct BlockSpec {
  int size = 0;
  bool diagonal = false;  // LP block: only diagonal entries allowed
};

/// One symmetric entry: (row, col) and (col, row) both carry `value`.
struct Entry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

class Problem {
 public:
  explicit Problem(std::vector<BlockSpec> blocks);

  /// Adds a dual variable y_i with objective coefficient b_i; returns i.
  int add_variable(double objective);
  /// Adds `value` to the (row, col) and (col, row) entries of A_var.
  void add_coefficient(int var, int block, int row, int col, double value);
  /// Adds `value` to the (row, col) and (col, row) entries of C.
  void add_constant(int block, int row, int col, double value);

  [[nodiscard]] int num_variables() const noexcept { return static_cast<int>(b_.size()); }
  [[nodiscard]] const std::vector<BlockSpec>& blocks() const noexcept { return blocks_; }
  [[nodiscard]] const std::vector<Entry>& coefficients(int var) const { return a_.at(var); }
  [[nodiscard]] const std::vector<Entry>& constants() const noexcept { return c_; }
  [[nodiscard]] double objective(int var) const { return b_.at(var); }

 private:
  void check_entry(int block, int row, int col) const;

  std::vector<BlockSpec> blocks_;
  std::vector<double> b_;
  std::vector<std::vector<Entry>> a_;
  std::vector<Entry> c_;
};

struct Options {
  int max_iterations = 80;
  double gap_tolerance = 1e-9;
  double feasibility_tolerance = 1e-9;
  double step_fraction = 0.95;
};

enum class Status { kOptimal, kMaxIterations, kNumericalFailure };

struct Result {
  Status status = Status::kNumericalFailure;
  Eigen::VectorXd y;
  double dual_objective = 0.0;    // b^T y
  double primal_objective = 0.0;  // <C, X>
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
};

Result solve(const Problem& problem, const Options& options = {});

/// Block-diagonal slack C - sum_i y_i A_i evaluated exactly from y.
std::vector<Eigen::MatrixXd> dual_slack(const Problem& problem, const Eigen::VectorXd& y);

}  // namespace mgsync::sdp
