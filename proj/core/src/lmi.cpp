#include "mgsync/lmi.hpp"

#include "mgsync/errors.hpp"
#include "mgsync/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mgsync {

namespace {

void require_shape(const Matrix& m, Eigen::Index n, const char* name) {
  if (m.rows() != n || m.cols() != n) {
    fail(ErrorCategory::kDimension, std::string("assemble_xi: ") + name + " must be " + std::to_string(n) + "x" +
                                        std::to_string(n));
  }
}

}  // namespace

Matrix assemble_xi(const Matrix& a, double tau_star, double tau_g, const LmiCertificate& c, LmiForm form) {
  const Eigen::Index n = a.rows();
  require_shape(a, n, "A");
  require_shape(c.q, n, "Q");
  require_shape(c.r, n, "R");
  require_shape(c.p, n, "P");
  require_shape(c.m, n, "M");
  require_shape(c.t, n, "T");
  require_shape(c.x, n, "X");

  Matrix xi = Matrix::Zero(4 * n, 4 * n);
  auto blk = [&](int i, int j) { return xi.block(i * n, j * n, n, n); };

  blk(0, 0) = a + a.transpose() + c.q + c.m.transpose() + c.m;
  blk(0, 1) = -c.m.transpose() + c.t;
  blk(0, 2) = -a - c.m.transpose() + c.r.transpose();
  blk(1, 1) = -c.q * (1.0 - tau_g) - c.t.transpose() - c.t;
  blk(1, 2) = -c.t.transpose() - c.r.transpose();
  blk(1, 3) = -a.transpose();
  blk(2, 2) = -2.0 * c.r;
  if (form == LmiForm::kJensen) {
    if (!(tau_star > 0)) fail(ErrorCategory::kConfig, "assemble_xi: Jensen form needs tau_star > 0");
    Eigen::FullPivLU<Matrix> lu(c.x);
    if (!lu.isInvertible()) fail(ErrorCategory::kNumerical, "assemble_xi: X is singular");
    const Matrix x_inv = lu.inverse();
    blk(2, 2) -= x_inv.transpose() * c.p * x_inv / tau_star;
  }
  blk(3, 3) = tau_star * c.p + c.x.transpose() + c.x;

  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < i; ++j) blk(i, j) = blk(j, i).transpose();
  }
  return symmetrized(xi);
}

CertificateCheck check_certificate(const Matrix& a, const DelayBounds& bounds, const LmiCertificate& cert,
                                   const CheckOptions& options) {
  for (const auto* m : {&cert.q, &cert.r, &cert.p}) {
    if (m->rows() != m->cols()) fail(ErrorCategory::kDimension, "check_certificate: non-square weight");
    if (!is_symmetric(*m)) fail(ErrorCategory::kConfig, "check_certificate: Q, R and P must be symmetric");
  }
  CertificateCheck out;
  out.lambda_min_q = lambda_min(cert.q);
  out.lambda_min_r = lambda_min(cert.r);
  out.lambda_min_p = lambda_min(cert.p);
  if (options.form == LmiForm::kJensen && Eigen::FullPivLU<Matrix>(cert.x).rank() < cert.x.rows()) {
    out.reason = "X is singular";
    out.lambda_max_xi = std::numeric_limits<double>::quiet_NaN();
    out.margin = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const Matrix xi = assemble_xi(a, bounds.tau_star, bounds.tau_g, cert, options.form);
  out.lambda_max_xi = lambda_max(xi);
  out.margin = -out.lambda_max_xi;
  if (!(out.lambda_min_q > 0) || !(out.lambda_min_r > 0) || !(out.lambda_min_p > 0)) {
    out.reason = "Q, R, P not positive definite";
  } else if (!(out.lambda_max_xi <= -options.eps_margin)) {
    out.reason = "lambda_max(Xi) = " + std::to_string(out.lambda_max_xi) + " above -eps_margin";
  } else {
    out.accepted = true;
  }
  return out;
}

Matrix sliding_manifold_basis(int n) {
  if (n < 1) fail(ErrorCategory::kDimension, "sliding_manifold_basis: n < 1");
  Matrix b(2 * n, n);
  b.topRows(n) = Matrix::Identity(n, n);
  b.bottomRows(n) = disagreement_matrix(n);
  // U = B (B^T B)^{-1/2}
  Eigen::SelfAdjointEigenSolver<Matrix> es(b.transpose() * b);
  const Matrix inv_sqrt =
      es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  return b * inv_sqrt;
}

Matrix reduced_dynamics(const Matrix& a, const Matrix& basis) {
  if (a.rows() != a.cols() || basis.rows() != a.rows()) fail(ErrorCategory::kDimension, "reduced_dynamics: shape");
  return basis.transpose() * a * basis;
}

namespace {

// Decision vector layout for the synthesis SDP.
struct Layout {
  int n = 0;  // certificate dimension
  std::vector<std::pair<int, int>> k_edges;
  std::vector<std::pair<int, int>> kbar_edges;
  int k0 = 0, kbar0 = 0, q0 = 0, r0 = 0, p0 = 0, m0 = 0, t0 = 0, x0 = 0, tvar = 0, total = 0;
  bool free_x = false;

  [[nodiscard]] int sym_size() const { return n * (n + 1) / 2; }
};

Matrix unpack_sym(const Eigen::VectorXd& y, int offset, int n) {
  Matrix s(n, n);
  int k = offset;
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r <= c; ++r) {
      s(r, c) = y(k);
      s(c, r) = y(k);
      ++k;
    }
  }
  return s;
}

Matrix unpack_full(const Eigen::VectorXd& y, int offset, int n) {
  return Eigen::Map<const Matrix>(y.data() + offset, n, n);
}

GainSet unpack_gains(const Layout& l, const Eigen::VectorXd& y) {
  GainSet g;
  for (std::size_t e = 0; e < l.k_edges.size(); ++e) g.k[l.k_edges[e]] = y(l.k0 + static_cast<int>(e));
  for (std::size_t e = 0; e < l.kbar_edges.size(); ++e) g.k_bar[l.kbar_edges[e]] = y(l.kbar0 + static_cast<int>(e));
  return g;
}

// A for arbitrary (possibly zero or negative) gain values.
Matrix raw_dynamics(int n_dg, const GainSet& g) {
  Matrix k = Matrix::Zero(n_dg, n_dg);
  Matrix kb = Matrix::Zero(n_dg, n_dg);
  for (const auto& [e, v] : g.k) {
    k(e.first, e.first) += v;
    if (e.second != kLeader) k(e.first, e.second) -= v;
  }
  for (const auto& [e, v] : g.k_bar) {
    kb(e.first, e.first) += v;
    kb(e.first, e.second) -= v;
  }
  return error_dynamics_matrix(k, kb, disagreement_matrix(n_dg));
}

struct Unpacked {
  Matrix a;
  LmiCertificate cert;
};

Unpacked unpack(const Layout& l, const Eigen::VectorXd& y, int n_dg, const Matrix& basis, double x_fixed) {
  Unpacked u;
  const Matrix a_full = raw_dynamics(n_dg, unpack_gains(l, y));
  u.a = basis.rows() == basis.cols() ? a_full : reduced_dynamics(a_full, basis);
  u.cert.q = unpack_sym(y, l.q0, l.n);
  u.cert.r = unpack_sym(y, l.r0, l.n);
  u.cert.p = unpack_sym(y, l.p0, l.n);
  u.cert.m = unpack_full(y, l.m0, l.n);
  u.cert.t = unpack_full(y, l.t0, l.n);
  u.cert.x = l.free_x ? unpack_full(y, l.x0, l.n) : Matrix(x_fixed * Matrix::Identity(l.n, l.n));
  return u;
}

struct Attempt {
  bool solved = false;
  double score = -std::numeric_limits<double>::infinity();
  Unpacked sol;
  Eigen::VectorXd y;
  CertificateCheck check;
};

Attempt solve_once(const CommTopology& top, const DelayBounds& bounds, const SynthesisOptions& opt, const Layout& l,
                   const Matrix& basis, double x_fixed) {
  const int n_dg = top.size();
  const int n = l.n;
  sdp::Problem prob({{4 * n, false},
                     {n, false},
                     {n, false},
                     {n, false},
                     {n, false},
                     {n, false},
                     {n, false},
                     {2 * (l.tvar - l.k0 - l.sym_size() * 3) + 1, true}});
  const bool max_gain = opt.objective == SynthesisObjective::kMaxGainSum;
  for (int i = 0; i < l.total; ++i) {
    double b = 0.0;
    if (i == l.tvar) b = max_gain ? 0.0 : -1.0;
    if (max_gain && i < l.q0) b = 1.0;
    prob.add_variable(b);
  }

  auto xi_at = [&](const Eigen::VectorXd& y) {
    const Unpacked u = unpack(l, y, n_dg, basis, x_fixed);
    return assemble_xi(u.a, bounds.tau_star, bounds.tau_g, u.cert, opt.form);
  };
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(l.total);
  const Matrix xi0 = xi_at(zero);
  const double tiny = 1e-13 * std::max(1.0, xi0.cwiseAbs().maxCoeff());

  // Block 0: t I - Xi(y) >= 0.
  for (int c = 0; c < 4 * n; ++c) {
    for (int r = 0; r <= c; ++r) {
      if (std::abs(xi0(r, c)) > tiny) prob.add_constant(0, r, c, -xi0(r, c));
    }
  }
  for (int i = 0; i < l.tvar; ++i) {
    Eigen::VectorXd e = zero;
    e(i) = 1.0;
    const Matrix d = xi_at(e) - xi0;
    for (int c = 0; c < 4 * n; ++c) {
      for (int r = 0; r <= c; ++r) {
        if (std::abs(d(r, c)) > tiny) prob.add_coefficient(i, 0, r, c, d(r, c));
      }
    }
  }
  for (int r = 0; r < 4 * n; ++r) prob.add_coefficient(l.tvar, 0, r, r, -1.0);

  // eps I <= Q, R, P <= kappa I.
  const int sym_offsets[3] = {l.q0, l.r0, l.p0};
  for (int s = 0; s < 3; ++s) {
    const int lo = 1 + 2 * s;
    const int hi = lo + 1;
    for (int r = 0; r < n; ++r) {
      prob.add_constant(lo, r, r, -opt.eps);
      prob.add_constant(hi, r, r, opt.kappa);
    }
    int k = sym_offsets[s];
    for (int c = 0; c < n; ++c) {
      for (int r = 0; r <= c; ++r) {
        prob.add_coefficient(k, lo, r, c, -1.0);
        prob.add_coefficient(k, hi, r, c, 1.0);
        ++k;
      }
    }
  }

  // LP block: gain bounds and boxes on the free matrices.
  int row = 0;
  auto bound = [&](int var, double lo, double hi) {
    prob.add_constant(7, row, row, -lo);
    prob.add_coefficient(var, 7, row, row, -1.0);
    ++row;
    prob.add_constant(7, row, row, hi);
    prob.add_coefficient(var, 7, row, row, 1.0);
    ++row;
  };
  for (int i = l.k0; i < l.q0; ++i) bound(i, opt.k_min, opt.k_max);
  for (int i = l.m0; i < l.tvar; ++i) bound(i, -opt.box, opt.box);
  // t <= -target_margin, or a loose cap that keeps the slack interior.
  prob.add_constant(7, row, row, max_gain ? -opt.target_margin : 1e3);
  prob.add_coefficient(l.tvar, 7, row, row, 1.0);

  Attempt at;
  const sdp::Result res = sdp::solve(prob, opt.solver);
  if (res.y.size() != l.total || !res.y.allFinite()) return at;
  at.y = res.y;
  at.sol = unpack(l, res.y, n_dg, basis, x_fixed);
  at.solved = res.status == sdp::Status::kOptimal;
  at.check = check_certificate(at.sol.a, bounds, at.sol.cert, {opt.eps_margin, opt.form});
  const bool definite = at.check.lambda_min_q > 0 && at.check.lambda_min_r > 0 && at.check.lambda_min_p > 0;
  if (definite && std::isfinite(at.check.margin)) {
    if (opt.objective == SynthesisObjective::kMaxGainSum) {
      at.score = at.check.accepted ? at.y.head(l.q0).sum() : -1e6 + at.check.margin;
    } else {
      at.score = at.check.margin;
    }
  }
  return at;
}

}  // namespace

SynthesisResult synthesize_gains(const CommTopology& topology, const DelayBounds& bounds,
                                 const SynthesisOptions& opt) {
  if (!(bounds.tau_star > 0)) fail(ErrorCategory::kConfig, "synthesize_gains: tau_star must be positive");
  if (!(opt.k_min > 0) || !(opt.k_max >= opt.k_min)) fail(ErrorCategory::kConfig, "synthesize_gains: bad gain bounds");
  const int n_dg = topology.size();

  Layout l;
  l.n = opt.reduced ? n_dg : 2 * n_dg;
  l.k_edges = topology.augmented_directed_edges();
  l.kbar_edges = topology.follower_directed_edges();
  l.free_x = opt.form == LmiForm::kPrinted;
  const int nn = l.n * l.n;
  l.k0 = 0;
  l.kbar0 = l.k0 + static_cast<int>(l.k_edges.size());
  l.q0 = l.kbar0 + static_cast<int>(l.kbar_edges.size());
  l.r0 = l.q0 + l.sym_size();
  l.p0 = l.r0 + l.sym_size();
  l.m0 = l.p0 + l.sym_size();
  l.t0 = l.m0 + nn;
  l.x0 = l.t0 + nn;
  l.tvar = l.x0 + (l.free_x ? nn : 0);
  l.total = l.tvar + 1;

  const Matrix basis = opt.reduced ? sliding_manifold_basis(n_dg) : Matrix(Matrix::Identity(l.n, l.n));

  SynthesisResult out;
  out.basis = basis;
  Attempt best;
  auto consider = [&](Attempt a) {
    ++out.solves;
    if (a.score > best.score) best = std::move(a);
  };

  if (l.free_x) {
    consider(solve_once(topology, bounds, opt, l, basis, 0.0));
  } else {
    // Search x < 0 on a log grid, then golden-section refinement.
    if (opt.x_grid < 2 || !(opt.x_lo > 0) || !(opt.x_hi > opt.x_lo)) {
      fail(ErrorCategory::kConfig, "synthesize_gains: bad x search range");
    }
    const double lo = std::log(opt.x_lo);
    const double hi = std::log(opt.x_hi);
    std::vector<double> grid(opt.x_grid);
    std::vector<double> score(opt.x_grid);
    for (int i = 0; i < opt.x_grid; ++i) {
      grid[i] = lo + (hi - lo) * i / (opt.x_grid - 1);
      Attempt a = solve_once(topology, bounds, opt, l, basis, -std::exp(grid[i]));
      score[i] = a.score;
      consider(std::move(a));
    }
    const auto ib = static_cast<int>(std::max_element(score.begin(), score.end()) - score.begin());
    double a = grid[std::max(ib - 1, 0)];
    double b = grid[std::min(ib + 1, opt.x_grid - 1)];
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    auto eval = [&](double s) {
      Attempt at = solve_once(topology, bounds, opt, l, basis, -std::exp(s));
      const double v = at.score;
      consider(std::move(at));
      return v;
    };
    double fc = eval(c);
    double fd = eval(d);
    for (int it = 0; it < opt.x_refine; ++it) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = eval(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = eval(d);
      }
    }
  }

  if (best.y.size() == 0) {
    out.best_margin = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.gains = unpack_gains(l, best.y);
  out.a = best.sol.a;
  out.certificate = best.sol.cert;
  out.certificate.margin = best.check.margin;
  out.best_margin = best.check.margin;
  out.feasible = best.check.accepted;
  return out;
}

LkWeights lk_weights(const LmiCertificate& cert) {
  Eigen::FullPivLU<Matrix> lu(cert.x);
  if (!lu.isInvertible()) fail(ErrorCategory::kNumerical, "lk_weights: X is singular");
  const Matrix x_inv = lu.inverse();
  return {cert.q, symmetrized(x_inv.transpose() * cert.p * x_inv)};
}

LkSeries evaluate_lk_functional(const Matrix& chi, std::span<const double> tau, const LkWeights& weights,
                                double tau_star, double h) {
  const auto rows = static_cast<std::size_t>(chi.rows());
  const Eigen::Index dim = chi.cols();
  if (!(h > 0) || tau_star < 0) fail(ErrorCategory::kConfig, "evaluate_lk_functional: bad step or tau_star");
  if (tau.size() != rows) fail(ErrorCategory::kDimension, "evaluate_lk_functional: tau length differs from chi");
  if (weights.q.rows() != dim || weights.w.rows() != dim) {
    fail(ErrorCategory::kDimension, "evaluate_lk_functional: weight size");
  }
  const auto first = static_cast<std::size_t>(std::ceil(tau_star / h - 1e-9));
  if (rows <= first) fail(ErrorCategory::kBuffer, "evaluate_lk_functional: less than tau_star of history");

  // Prefix sums: trapezoid of chi^T Q chi, and interval sums of q_j and
  // q_j * t_mid for the piecewise-constant chi_dot^T W chi_dot.
  std::vector<double> f(rows);
  for (std::size_t k = 0; k < rows; ++k) f[k] = chi.row(k).dot(weights.q * chi.row(k).transpose());
  std::vector<long double> fq(rows, 0.0L);
  for (std::size_t k = 1; k < rows; ++k) fq[k] = fq[k - 1] + 0.5L * h * (f[k - 1] + f[k]);
  std::vector<double> qd(rows > 0 ? rows - 1 : 0);
  for (std::size_t j = 0; j + 1 < rows; ++j) {
    const Eigen::RowVectorXd d = (chi.row(j + 1) - chi.row(j)) / h;
    qd[j] = d.dot(weights.w * d.transpose());
  }
  std::vector<long double> s0(rows, 0.0L);
  std::vector<long double> s1(rows, 0.0L);
  for (std::size_t j = 0; j + 1 < rows; ++j) {
    s0[j + 1] = s0[j] + qd[j];
    s1[j + 1] = s1[j] + qd[j] * (static_cast<long double>(j) + 0.5L) * h;
  }

  LkSeries out;
  out.first = first;
  out.v1.assign(rows, 0.0);
  out.v2.assign(rows, 0.0);
  out.v3.assign(rows, 0.0);
  out.v.assign(rows, 0.0);
  for (std::size_t k = first; k < rows; ++k) {
    const double t = static_cast<double>(k) * h;
    out.v1[k] = chi.row(k).squaredNorm();

    const double tq = std::clamp(tau[k], 0.0, t);
    const double s = t - tq;
    const auto j = std::min(static_cast<std::size_t>(std::floor(s / h)), k);
    const double frac = s - static_cast<double>(j) * h;
    long double below = fq[j];
    if (frac > 0 && j + 1 < rows) {
      const double a = frac / h;
      const Eigen::RowVectorXd cs = (1.0 - a) * chi.row(j) + a * chi.row(j + 1);
      const double fs = cs.dot(weights.q * cs.transpose());
      below += 0.5L * frac * (f[j] + fs);
    }
    out.v2[k] = static_cast<double>(fq[k] - below);

    // int over [t - tau*, t] of (s - t + tau*) q(s) ds, q constant per interval.
    const double lo = t - tau_star;
    const auto js = static_cast<std::size_t>(std::max(0.0, std::floor(lo / h + 1e-9)));
    long double v3 = 0.0L;
    std::size_t full_from = js;
    const double tj1 = static_cast<double>(js + 1) * h;
    if (lo > static_cast<double>(js) * h + 1e-12 * h && js < k) {
      const double w = std::min(tj1, t) - lo;
      v3 += 0.5L * w * w * qd[js];
      full_from = js + 1;
    }
    if (full_from < k) {
      const long double sum0 = s0[k] - s0[full_from];
      const long double sum1 = s1[k] - s1[full_from];
      v3 += h * (sum1 - static_cast<long double>(lo) * sum0);
    }
    out.v3[k] = static_cast<double>(v3);
    out.v[k] = out.v1[k] + out.v2[k] + out.v3[k];
  }
  return out;
}

}  // namespace mgsync
