#include "mgsync/linalg.hpp"

#include "mgsync/errors.hpp"

#include <Eigen/Eigenvalues>

namespace mgsync {

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) fail(ErrorCategory::kDimension, "eigenvalues of a non-square matrix");
  if (m.size() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(ErrorCategory::kNumerical, "symmetric eigensolver did not converge");
  return solver.eigenvalues();
}

double lambda_max(const Eigen::MatrixXd& m) { return symmetric_eigenvalues(m).maxCoeff(); }

double lambda_min(const Eigen::MatrixXd& m) { return symmetric_eigenvalues(m).minCoeff(); }

bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

}  // namespace mgsync
