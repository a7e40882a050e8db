#include "mgsync/sdp.hpp"

#include "mgsync/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mgsync::sdp {

Problem::Problem(std::vector<BlockSpec> blocks) : blocks_(std::move(blocks)) {
  for (const auto& b : blocks_) {
    if (b.size < 1) fail(ErrorCategory::kDimension, "sdp: empty block");
  }
}

int Problem::add_variable(double objective) {
  b_.push_back(objective);
  a_.emplace_back();
  return static_cast<int>(b_.size()) - 1;
}

void Problem::check_entry(int block, int row, int col) const {
  if (block < 0 || block >= static_cast<int>(blocks_.size())) fail(ErrorCategory::kDimension, "sdp: bad block");
  const auto& spec = blocks_[block];
  if (row < 0 || col < 0 || row >= spec.size || col >= spec.size) {
    fail(ErrorCategory::kDimension, "sdp: entry outside block");
  }
  if (spec.diagonal && row != col) fail(ErrorCategory::kDimension, "sdp: off-diagonal entry in LP block");
}

void Problem::add_coefficient(int var, int block, int row, int col, double value) {
  check_entry(block, row, col);
  if (value != 0.0) a_.at(var).push_back({block, std::min(row, col), std::max(row, col), value});
}

void Problem::add_constant(int block, int row, int col, double value) {
  check_entry(block, row, col);
  if (value != 0.0) c_.push_back({block, std::min(row, col), std::max(row, col), value});
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Dense blocks hold size x size matrices, diagonal blocks size x 1 columns.
using Blocks = std::vector<MatrixXd>;

Blocks zeros_like(const std::vector<BlockSpec>& specs) {
  Blocks out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(s.diagonal ? MatrixXd::Zero(s.size, 1) : MatrixXd::Zero(s.size, s.size));
  return out;
}

Blocks identity_like(const std::vector<BlockSpec>& specs, double scale) {
  Blocks out;
  out.reserve(specs.size());
  for (const auto& s : specs) {
    out.push_back(s.diagonal ? MatrixXd::Constant(s.size, 1, scale) : MatrixXd(scale * MatrixXd::Identity(s.size, s.size)));
  }
  return out;
}

void scatter(const std::vector<BlockSpec>& specs, const std::vector<Entry>& entries, double scale, Blocks& out) {
  for (const auto& e : entries) {
    if (specs[e.block].diagonal) {
      out[e.block](e.row, 0) += scale * e.value;
    } else {
      out[e.block](e.row, e.col) += scale * e.value;
      if (e.row != e.col) out[e.block](e.col, e.row) += scale * e.value;
    }
  }
}

// tr(A_i Y) for every i; Y need not be symmetric.
VectorXd apply_a(const Problem& p, const Blocks& y) {
  VectorXd out = VectorXd::Zero(p.num_variables());
  const auto& specs = p.blocks();
  for (int i = 0; i < p.num_variables(); ++i) {
    double s = 0.0;
    for (const auto& e : p.coefficients(i)) {
      if (specs[e.block].diagonal) {
        s += e.value * y[e.block](e.row, 0);
      } else if (e.row == e.col) {
        s += e.value * y[e.block](e.row, e.row);
      } else {
        s += e.value * (y[e.block](e.row, e.col) + y[e.block](e.col, e.row));
      }
    }
    out(i) = s;
  }
  return out;
}

Blocks apply_at(const Problem& p, const VectorXd& y) {
  Blocks out = zeros_like(p.blocks());
  for (int i = 0; i < p.num_variables(); ++i) scatter(p.blocks(), p.coefficients(i), y(i), out);
  return out;
}

double inner(const std::vector<BlockSpec>& specs, const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < specs.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

double frobenius(const Blocks& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return std::sqrt(s);
}

// Largest alpha with x + alpha dx >= 0 (infinity when unbounded).
double max_step(const std::vector<BlockSpec>& specs, const Blocks& x, const Blocks& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < specs.size(); ++k) {
    if (specs[k].diagonal) {
      for (Eigen::Index r = 0; r < x[k].rows(); ++r) {
        if (dx[k](r, 0) < 0) alpha = std::min(alpha, -x[k](r, 0) / dx[k](r, 0));
      }
    } else {
      Eigen::LLT<MatrixXd> llt(x[k]);
      if (llt.info() != Eigen::Success) return 0.0;
      const MatrixXd l_inv_dx = llt.matrixL().solve(dx[k]);
      const MatrixXd w = llt.matrixL().solve(l_inv_dx.transpose());
      const double lmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(0.5 * (w + w.transpose()), Eigen::EigenvaluesOnly)
                              .eigenvalues()
                              .minCoeff();
      if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
    }
  }
  return alpha;
}

struct Workspace {
  Blocks s_inv;
  // Variables touching each block, with their entries in that block.
  std::vector<std::vector<std::pair<int, std::vector<Entry>>>> by_block;
};

Workspace make_workspace(const Problem& p) {
  Workspace w;
  w.by_block.resize(p.blocks().size());
  for (int i = 0; i < p.num_variables(); ++i) {
    std::vector<std::vector<Entry>> per_block(p.blocks().size());
    for (const auto& e : p.coefficients(i)) per_block[e.block].push_back(e);
    for (std::size_t b = 0; b < per_block.size(); ++b) {
      if (!per_block[b].empty()) w.by_block[b].emplace_back(i, std::move(per_block[b]));
    }
  }
  return w;
}

// M_ij = tr(A_i X A_j S^-1).
MatrixXd schur_matrix(const Problem& p, const Blocks& x, const Workspace& w) {
  const int m = p.num_variables();
  MatrixXd mat = MatrixXd::Zero(m, m);
  const auto& specs = p.blocks();
  for (std::size_t b = 0; b < specs.size(); ++b) {
    const auto& vars = w.by_block[b];
    if (specs[b].diagonal) {
      const VectorXd ratio = x[b].col(0).cwiseProduct(w.s_inv[b].col(0));
      for (const auto& [j, ej] : vars) {
        VectorXd wj = VectorXd::Zero(specs[b].size);
        for (const auto& e : ej) wj(e.row) += e.value * ratio(e.row);
        for (const auto& [i, ei] : vars) {
          if (i < j) continue;
          double s = 0.0;
          for (const auto& e : ei) s += e.value * wj(e.row);
          mat(i, j) += s;
        }
      }
      continue;
    }
    const int n = specs[b].size;
    const MatrixXd& xb = x[b];
    const MatrixXd& sb = w.s_inv[b];
    for (const auto& [j, ej] : vars) {
      MatrixXd g;
      if (static_cast<long>(ej.size()) * 2 > n) {
        MatrixXd aj = MatrixXd::Zero(n, n);
        for (const auto& e : ej) {
          aj(e.row, e.col) += e.value;
          if (e.row != e.col) aj(e.col, e.row) += e.value;
        }
        g.noalias() = xb * aj * sb;
      } else {
        g = MatrixXd::Zero(n, n);
        for (const auto& e : ej) {
          g.noalias() += e.value * xb.col(e.row) * sb.row(e.col);
          if (e.row != e.col) g.noalias() += e.value * xb.col(e.col) * sb.row(e.row);
        }
      }
      for (const auto& [i, ei] : vars) {
        if (i < j) continue;
        double s = 0.0;
        for (const auto& e : ei) {
          s += e.row == e.col ? e.value * g(e.row, e.row) : e.value * (g(e.row, e.col) + g(e.col, e.row));
        }
        mat(i, j) += s;
      }
    }
  }
  return mat.selfadjointView<Eigen::Lower>();
}

struct Direction {
  VectorXd dy;
  Blocks dx;
  Blocks ds;
};

// Solves the HKM Newton system for a given complementarity target rc
// (rc = target - X S, possibly with a second-order term).
Direction newton_direction(const Problem& p, const Eigen::LDLT<MatrixXd>& schur, const Blocks& x,
                           const Blocks& s_inv, const VectorXd& rp, const Blocks& rd, const Blocks& rc) {
  const auto& specs = p.blocks();
  Blocks rc_sinv(specs.size());
  Blocks x_rd_sinv(specs.size());
  for (std::size_t k = 0; k < specs.size(); ++k) {
    if (specs[k].diagonal) {
      rc_sinv[k] = rc[k].cwiseProduct(s_inv[k]);
      x_rd_sinv[k] = x[k].cwiseProduct(rd[k]).cwiseProduct(s_inv[k]);
    } else {
      rc_sinv[k] = rc[k] * s_inv[k];
      x_rd_sinv[k] = x[k] * rd[k] * s_inv[k];
    }
  }
  const VectorXd rhs = rp - apply_a(p, rc_sinv) + apply_a(p, x_rd_sinv);
  Direction d;
  d.dy = schur.solve(rhs);
  const Blocks aty = apply_at(p, d.dy);
  d.ds.resize(specs.size());
  d.dx.resize(specs.size());
  for (std::size_t k = 0; k < specs.size(); ++k) {
    d.ds[k] = rd[k] - aty[k];
    if (specs[k].diagonal) {
      d.dx[k] = (rc[k] - x[k].cwiseProduct(d.ds[k])).cwiseProduct(s_inv[k]);
    } else {
      const MatrixXd dx = (rc[k] - x[k] * d.ds[k]) * s_inv[k];
      d.dx[k] = 0.5 * (dx + dx.transpose());
    }
  }
  return d;
}

}  // namespace

std::vector<Eigen::MatrixXd> dual_slack(const Problem& problem, const Eigen::VectorXd& y) {
  Blocks s = zeros_like(problem.blocks());
  scatter(problem.blocks(), problem.constants(), 1.0, s);
  for (int i = 0; i < problem.num_variables(); ++i) scatter(problem.blocks(), problem.coefficients(i), -y(i), s);
  return s;
}

Result solve(const Problem& p, const Options& options) {
  const auto& specs = p.blocks();
  const int m = p.num_variables();
  if (m == 0) fail(ErrorCategory::kDimension, "sdp: no variables");

  VectorXd b(m);
  for (int i = 0; i < m; ++i) b(i) = p.objective(i);
  Blocks c = zeros_like(specs);
  scatter(specs, p.constants(), 1.0, c);

  int total_dim = 0;
  for (const auto& s : specs) total_dim += s.size;

  // Starting point scaled to the data, in the spirit of CSDP.
  double a_norm_max = 0.0;
  double alpha0 = 0.0;
  for (int i = 0; i < m; ++i) {
    double nrm = 0.0;
    for (const auto& e : p.coefficients(i)) nrm += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
    nrm = std::sqrt(nrm);
    a_norm_max = std::max(a_norm_max, nrm);
    alpha0 = std::max(alpha0, (1.0 + std::abs(b(i))) / (1.0 + nrm));
  }
  const double c_norm = frobenius(c);
  const double sqrt_n = std::sqrt(static_cast<double>(total_dim));
  const double x0 = 10.0 * std::max(1.0, sqrt_n * alpha0);
  const double s0 = 10.0 * std::max(1.0, (1.0 + std::max(a_norm_max, c_norm)) / sqrt_n);

  Blocks x = identity_like(specs, x0);
  Blocks s = identity_like(specs, s0);
  VectorXd y = VectorXd::Zero(m);

  const Workspace base = make_workspace(p);
  Workspace w = base;
  Result result;

  for (int iter = 0; iter <= options.max_iterations; ++iter) {
    const VectorXd rp = b - apply_a(p, x);
    const Blocks aty = apply_at(p, y);
    Blocks rd(specs.size());
    for (std::size_t k = 0; k < specs.size(); ++k) rd[k] = c[k] - s[k] - aty[k];

    result.y = y;
    result.dual_objective = b.dot(y);
    result.primal_objective = inner(specs, c, x);
    result.primal_infeasibility = rp.norm() / (1.0 + b.norm());
    result.dual_infeasibility = frobenius(rd) / (1.0 + c_norm);
    result.iterations = iter;
    const double gap = std::abs(result.primal_objective - result.dual_objective) /
                       (1.0 + std::abs(result.primal_objective) + std::abs(result.dual_objective));
    if (gap < options.gap_tolerance && result.primal_infeasibility < options.feasibility_tolerance &&
        result.dual_infeasibility < options.feasibility_tolerance) {
      result.status = Status::kOptimal;
      return result;
    }
    if (iter == options.max_iterations) break;

    w.s_inv.resize(specs.size());
    for (std::size_t k = 0; k < specs.size(); ++k) {
      if (specs[k].diagonal) {
        w.s_inv[k] = s[k].cwiseInverse();
      } else {
        Eigen::LLT<MatrixXd> llt(s[k]);
        if (llt.info() != Eigen::Success) {
          result.status = Status::kNumericalFailure;
          return result;
        }
        w.s_inv[k] = llt.solve(MatrixXd::Identity(specs[k].size, specs[k].size));
        w.s_inv[k] = 0.5 * (w.s_inv[k] + w.s_inv[k].transpose());
      }
    }

    const MatrixXd schur = schur_matrix(p, x, w);
    Eigen::LDLT<MatrixXd> ldlt(schur);
    if (ldlt.info() != Eigen::Success) {
      result.status = Status::kNumericalFailure;
      return result;
    }

    const double mu = inner(specs, x, s) / total_dim;

    // Predictor: target X S = 0.
    Blocks rc(specs.size());
    for (std::size_t k = 0; k < specs.size(); ++k) {
      rc[k] = specs[k].diagonal ? MatrixXd(-x[k].cwiseProduct(s[k])) : MatrixXd(-x[k] * s[k]);
    }
    const Direction pred = newton_direction(p, ldlt, x, w.s_inv, rp, rd, rc);
    const double ap = std::min(1.0, options.step_fraction * max_step(specs, x, pred.dx));
    const double ad = std::min(1.0, options.step_fraction * max_step(specs, s, pred.ds));
    Blocks xa(specs.size());
    Blocks sa(specs.size());
    for (std::size_t k = 0; k < specs.size(); ++k) {
      xa[k] = x[k] + ap * pred.dx[k];
      sa[k] = s[k] + ad * pred.ds[k];
    }
    const double mu_aff = inner(specs, xa, sa) / total_dim;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // Corrector with the second-order term.
    for (std::size_t k = 0; k < specs.size(); ++k) {
      if (specs[k].diagonal) {
        rc[k] = MatrixXd::Constant(specs[k].size, 1, sigma * mu) - x[k].cwiseProduct(s[k]) -
                pred.dx[k].cwiseProduct(pred.ds[k]);
      } else {
        rc[k] = sigma * mu * MatrixXd::Identity(specs[k].size, specs[k].size) - x[k] * s[k] - pred.dx[k] * pred.ds[k];
      }
    }
    const Direction corr = newton_direction(p, ldlt, x, w.s_inv, rp, rd, rc);
    const double cp = std::min(1.0, options.step_fraction * max_step(specs, x, corr.dx));
    const double cd = std::min(1.0, options.step_fraction * max_step(specs, s, corr.ds));
    if (!(cp > 0) || !(cd > 0)) {
      result.status = Status::kNumericalFailure;
      return result;
    }
    for (std::size_t k = 0; k < specs.size(); ++k) {
      x[k] += cp * corr.dx[k];
      s[k] += cd * corr.ds[k];
    }
    y += cd * corr.dy;
  }
  result.status = Status::kMaxIterations;
  return result;
}

}  // namespace mgsync::sdp
