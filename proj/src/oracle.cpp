#include "spcp/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace spcp {

namespace {

// Rayleigh quotients below this (relative) on the probe direction mean the
// operator annihilates part of T.
constexpr double kSingularRatio = 1e-12;

}  // namespace

Matrix normal_apply(const Matrix& x, const SubspaceT& t, const SupportOmega& om) {
  return project_t(project_omega_perp(project_t(x, t), om), t);
}

OracleResult oracle_solve(const Matrix& m, const SubspaceT& t, const SupportOmega& om, const OracleOptions& opts) {
  const Eigen::Index n1 = m.rows(), n2 = m.cols();
  OracleResult res;
  res.l_oracle = Matrix::Zero(n1, n2);

  if (t.rank() == 0) {
    res.s_oracle = project_omega(m, om);
    res.ok = true;
    return res;
  }

  const Matrix probe = t.u() * t.v().transpose();
  const double probe_gain = inner(probe, normal_apply(probe, t, om)) / probe.squaredNorm();
  if (!(probe_gain > kSingularRatio)) {
    res.s_oracle = project_omega(m, om);
    return res;
  }

  const Matrix b = project_t(project_omega_perp(m, om), t);
  const double b_norm = b.norm();
  if (b_norm == 0.0) {
    res.s_oracle = project_omega(m, om);
    res.ok = true;
    return res;
  }

  const int max_iters = opts.max_iters > 0 ? opts.max_iters : static_cast<int>(5 * std::max(n1, n2));
  Matrix x = Matrix::Zero(n1, n2);
  bool breakdown = false;
  int used = 0;

  // CG with restarts from the current iterate whenever the recurrence
  // residual has converged but the true residual has not.
  while (used < max_iters && !breakdown) {
    Matrix r = project_t(b - normal_apply(x, t, om), t);
    double rr = r.squaredNorm();
    if (std::sqrt(rr) <= opts.rel_tol * b_norm) break;
    Matrix p = r;
    while (used < max_iters) {
      const Matrix ap = normal_apply(p, t, om);
      const double pap = inner(p, ap);
      if (!(pap > kSingularRatio * p.squaredNorm())) {
        breakdown = true;
        break;
      }
      const double alpha = rr / pap;
      x += alpha * p;
      r -= alpha * ap;
      r = project_t(r, t);
      ++used;
      const double rr_next = r.squaredNorm();
      if (std::sqrt(rr_next) <= opts.rel_tol * b_norm) break;
      p = r + (rr_next / rr) * p;
      rr = rr_next;
    }
    x = project_t(x, t);
  }

  res.cg_iterations = used;
  res.l_oracle = project_t(x, t);
  res.residual = (normal_apply(res.l_oracle, t, om) - b).norm() / b_norm;
  res.s_oracle = project_omega(m - res.l_oracle, om);
  res.ok = !breakdown && res.residual <= opts.rel_tol;
  return res;
}

}  // namespace spcp
