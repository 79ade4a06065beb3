#pragma once

#include "spcp/matrix_core.hpp"
#include "spcp/problem_gen.hpp"

namespace spcp {

/// P_T P_{Omega-perp} P_T x.
Matrix normal_apply(const Matrix& x, const SubspaceT& t, const SupportOmega& om);

struct OracleOptions {
  double rel_tol = 1e-10;
  /// 0 selects 5 * max(n1, n2).
  int max_iters = 0;
};

struct OracleResult {
  Matrix l_oracle;
  Matrix s_oracle;
  int cg_iterations = 0;
  /// |normal_apply(L) - P_T P_{Omega-perp} M|_F / |P_T P_{Omega-perp} M|_F
  double residual = 0.0;
  /// False when the normal operator is (numerically) singular on T or CG
  /// did not reach rel_tol.
  bool ok = false;
};

/// Least-squares fit of M by L in T plus S supported on Omega: L solves the
/// normal equations on T by conjugate gradients, then S = P_Omega(M - L).
OracleResult oracle_solve(const Matrix& m, const SubspaceT& t, const SupportOmega& om, const OracleOptions& opts = {});

inline OracleResult oracle_solve(const ProblemInstance& inst, const OracleOptions& opts = {}) {
  return oracle_solve(inst.m, inst.t, inst.omega, opts);
}

}  // namespace spcp
