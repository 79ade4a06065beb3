#pragma once

#include "spcp/matrix_core.hpp"
#include "spcp/problem_gen.hpp"

#include <cstdint>

namespace spcp {

/// Smallest mu satisfying each incoherence condition, and their maximum.
struct IncoherenceReport {
  double mu_u = 0.0;   ///< (n1 / r) max_i |U^T e_i|^2
  double mu_v = 0.0;   ///< (n2 / r) max_i |V^T e_i|^2
  double mu_uv = 0.0;  ///< (n1 n2 / r) |U V^T|_inf^2
  double mu = 0.0;
};

IncoherenceReport incoherence_params(const SubspaceT& t);

struct OperatorNormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// |P_Omega P_T| as sqrt(lambda_max(P_T P_Omega P_T)), by power iteration
/// from a seeded random start in T. Stops when successive Rayleigh
/// quotients agree to `tol` relative.
OperatorNormEstimate pt_pomega_norm(const SubspaceT& t, const SupportOmega& om, double tol = 1e-8,
                                    std::uint64_t seed = 0, int max_iters = 10000);

struct Check {
  bool ok = false;
  double value = 0.0;
  double bound = 0.0;
};

/// The four conditions a dual certificate W must satisfy:
///   W in T-perp, |W| < 1/2,
///   |P_Omega(U V^T - lambda sgn(S0) + W)|_F <= lambda / 4,
///   |P_{Omega-perp}(U V^T + W)|_inf < lambda / 2.
struct CertificateReport {
  Check in_t_perp;      ///< value = |P_T W|_F, bound = 1e-8 |W|_F
  Check spectral;
  Check omega;
  Check omega_perp;
  bool all_ok = false;

  // Hypotheses under which the conditions certify optimality; reported only.
  double pt_pomega = 0.0;
  bool pt_pomega_ok = false;  ///< |P_Omega P_T| <= 1/2
  bool lambda_ok = false;     ///< lambda < 1
};

CertificateReport verify_certificate(const ProblemInstance& inst, const Matrix& w, double lambda);

/// Worst-case estimation error of the stable program given |Z0|_F <= delta.
/// Square: (8 sqrt5 n + sqrt2) delta. Rectangular: sqrt(C n1 n2) delta with
/// C = (8 sqrt5 + sqrt2)^2; that constant is an extension, not a proven bound.
double stability_bound(Eigen::Index n1, Eigen::Index n2, double delta);
inline constexpr bool stability_bound_is_extension(Eigen::Index n1, Eigen::Index n2) { return n1 != n2; }

struct RmsErrors {
  double rms_l = 0.0;
  double rms_s = 0.0;
  double pair_frobenius = 0.0;
};

/// rms = |X_hat - X0|_F / sqrt(n1 n2).
RmsErrors rms_errors(const ProblemInstance& inst, const Matrix& l_hat, const Matrix& s_hat);

/// Minimum over `trials` random pairs X of
///   |P_Gamma (P_T x P_Omega) X|_F^2 / |(P_T x P_Omega) X|_F^2,
/// skipping pairs that both projectors annihilate. Returns +inf if every
/// pair was skipped.
double lemma2_check(const SubspaceT& t, const SupportOmega& om, int trials, std::uint64_t seed = 0);

/// Quantities entering the rank and sparsity assumptions of exact recovery.
/// The admissible constants are unspecified, so only the raw values are given.
struct RecoveryAssumptions {
  double rank_ratio = 0.0;      ///< r mu (log n_(1))^2 / n_(2)
  double sparsity_ratio = 0.0;  ///< |Omega| / (n1 n2)
};

RecoveryAssumptions recovery_assumptions(const SubspaceT& t, const SupportOmega& om);

}  // namespace spcp
