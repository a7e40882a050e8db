#pragma once

// Delay-dependent stability LMI of the consensus error dynamics
// dchi/dt = A chi(t - tau(t)): assembly of Xi, certificate checking, joint
// gain/certificate synthesis, and the Lyapunov-Krasovskii functional.

#include "mgsync/comms.hpp"
#include "mgsync/sdp.hpp"
#include "mgsync/topology.hpp"

#include <span>
#include <string>
#include <vector>

namespace mgsync {

/// kPrinted: Xi exactly as stated, with the (3,3) block -2R.
/// kJensen: (3,3) block -2R - (1/tau*) X^-T P X^-1, i.e. the Jensen bound on
/// the integral term kept in the decrease condition.
enum class LmiForm { kPrinted, kJensen };

struct LmiCertificate {
  Matrix q;  // symmetric positive definite
  Matrix r;  // symmetric positive definite
  Matrix p;  // symmetric positive definite
  Matrix m;
  Matrix t;
  Matrix x;
  double margin = 0.0;  // -lambda_max(Xi) when produced by synthesis
};

/// Symmetric 4n x 4n matrix over (chi(t), chi(t - tau), int chi_dot, chi_dot):
///
///   [ A+A^T+Q+M^T+M   -M^T+T           -A-M^T+R^T     0           ]
///   [ *               -Q(1-tau_g)-T^T-T -T^T-R^T       -A^T        ]
///   [ *               *                 -2R (- J)      0           ]
///   [ *               *                 *              tau* P+X^T+X ]
///
/// with J = (1/tau*) X^-T P X^-1 for LmiForm::kJensen.
/// Throws Error{kDimension} when shapes do not conform.
Matrix assemble_xi(const Matrix& a, double tau_star, double tau_g, const LmiCertificate& cert,
                   LmiForm form = LmiForm::kPrinted);

struct CheckOptions {
  double eps_margin = 1e-8;
  LmiForm form = LmiForm::kPrinted;
};

struct CertificateCheck {
  bool accepted = false;
  double margin = 0.0;  // -lambda_max(Xi)
  double lambda_max_xi = 0.0;
  double lambda_min_q = 0.0;
  double lambda_min_r = 0.0;
  double lambda_min_p = 0.0;
  std::string reason;  // empty when accepted
};

/// Accepts iff Q, R, P are positive definite and lambda_max(Xi) <= -eps_margin.
/// Throws Error{kConfig} if Q, R or P is not symmetric.
CertificateCheck check_certificate(const Matrix& a, const DelayBounds& bounds, const LmiCertificate& cert,
                                   const CheckOptions& options = {});

/// Orthonormal basis U (2n x n) of range([I; Omega]), the subspace on which
/// eps = Omega e holds. It is invariant under every A of the error dynamics.
Matrix sliding_manifold_basis(int n);

/// U^T A U.
Matrix reduced_dynamics(const Matrix& a, const Matrix& basis);

enum class SynthesisObjective {
  kMinLambdaMax,  // minimize t subject to Xi <= t I
  kMaxGainSum,    // maximize the sum of gains subject to Xi <= -target_margin I
};

struct SynthesisOptions {
  SynthesisObjective objective = SynthesisObjective::kMinLambdaMax;
  double target_margin = 1e-3;  // kMaxGainSum only
  double eps = 1e-6;         // Q, R, P >= eps I
  double eps_margin = 1e-8;  // acceptance threshold on -lambda_max(Xi)
  double k_min = 0.1;
  double k_max = 100.0;
  double kappa = 10.0;   // Q, R, P <= kappa I
  double box = 100.0;    // |entries| of M, T, X
  LmiForm form = LmiForm::kJensen;
  bool reduced = true;   // certify U^T A U instead of A
  // kJensen fixes X = x I and searches x over [-x_hi, -x_lo].
  double x_lo = 1e-3;
  double x_hi = 1e2;
  int x_grid = 11;
  int x_refine = 12;
  sdp::Options solver{};
};

struct SynthesisResult {
  bool feasible = false;
  double best_margin = 0.0;  // -lambda_max(Xi) of the best certificate found
  GainSet gains;             // k and k_bar only
  LmiCertificate certificate;
  Matrix basis;              // U when reduced, identity otherwise
  Matrix a;                  // the certified dynamics matrix
  int solves = 0;
};

/// Minimizes t subject to Xi <= t I jointly over gains and certificate; the
/// result is feasible iff the independent check_certificate accepts it.
SynthesisResult synthesize_gains(const CommTopology& topology, const DelayBounds& bounds,
                                 const SynthesisOptions& options = {});

struct LkWeights {
  Matrix q;
  Matrix w;
};

/// Q from the certificate and W = X^-T P X^-1 (symmetrized).
LkWeights lk_weights(const LmiCertificate& cert);

struct LkSeries {
  std::size_t first = 0;  // first sample with tau* of history
  std::vector<double> v1;
  std::vector<double> v2;
  std::vector<double> v3;
  std::vector<double> v;
};

/// V = chi^T chi + int_{t-tau}^t chi^T Q chi ds + int_{t-tau*}^t (s - t + tau*) chi_dot^T W chi_dot ds
/// on samples chi.row(k) at t = k h, chi piecewise linear between samples.
/// Entries before `first` are left at zero. Throws Error{kBuffer} when the
/// series is shorter than tau* of history.
LkSeries evaluate_lk_functional(const Matrix& chi, std::span<const double> tau, const LkWeights& weights,
                                double tau_star, double h);

}  // namespace mgsync
