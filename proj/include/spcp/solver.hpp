#pragma once

#include "spcp/matrix_core.hpp"

#include <vector>

namespace spcp {

/// lambda = 1 / sqrt(max(n1, n2)).
double default_lambda(Eigen::Index n1, Eigen::Index n2);

/// mu = sqrt(2 n) sigma. With sigma = 0 the value is floored at
/// 1e-6 * |M|_F, which is the caller-supplied `m_frobenius`.
double default_mu(Eigen::Index n, double sigma, double m_frobenius = 0.0);

/// Which blocks of the pair (L, S) are free. The single-block modes pin
/// the other block to zero.
enum class Blocks { joint, low_rank_only, sparse_only };

struct SolverConfig {
  double lambda = 0.0;
  double mu = 0.0;
  int max_iters = 2000;
  double rel_tol = 1e-7;
  bool continuation = true;
  /// Initial mu is mu_start_factor * |M|_2 (never below mu).
  double mu_start_factor = 0.99;
  /// mu_{k+1} = max(decay * mu_k, mu).
  double decay = 0.9;
  Blocks blocks = Blocks::joint;

  void validate() const;
  /// Config with the default lambda and mu rules for an observation m.
  static SolverConfig defaults_for(const Matrix& m, double sigma);
};

struct SolveResult {
  Matrix l_hat;
  Matrix s_hat;
  int iterations = 0;
  /// |L|_* + lambda |S|_1 + |M - L - S|_F^2 / (2 mu) at the target mu, per iteration.
  std::vector<double> objective_trace;
  double feasibility_gap = 0.0;  ///< |M - L - S|_F
  double residual = 0.0;         ///< last computed fixed-point residual
  bool converged = false;
};

/// Accelerated proximal gradient for
///   min |L|_* + lambda |S|_1 + (1 / 2 mu) |M - L - S|_F^2
/// starting from L = S = 0. Stops when the proximal-gradient fixed-point
/// residual |X - G(X)|_F / (1 + |X|_F) at the target mu drops to rel_tol.
SolveResult solve(const Matrix& m, const SolverConfig& cfg);

double objective(const Matrix& m, const Matrix& l, const Matrix& s, double lambda, double mu);

/// One proximal-gradient map G(L, S) with step mu / 2 on the joint problem.
MatrixPair prox_gradient_step(const Matrix& m, const Matrix& l, const Matrix& s, double lambda, double mu);

/// |X - G(X)|_F / (1 + |X|_F) for the joint problem.
double fixed_point_residual(const Matrix& m, const Matrix& l, const Matrix& s, double lambda, double mu);

}  // namespace spcp
