#pragma once

#include <Eigen/Dense>

namespace mgsync {

/// Full spectrum of a symmetric matrix, ascending. Uses only the lower
/// triangle; callers check symmetry when it matters.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m);

double lambda_max(const Eigen::MatrixXd& m);
double lambda_min(const Eigen::MatrixXd& m);

/// max |m - m^T| <= tol * max(1, max |m|).
bool is_symmetric(const Eigen::MatrixXd& m, double tol = 1e-10);

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace mgsync
