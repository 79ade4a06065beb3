#include "spcp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spcp {

namespace {

constexpr double kMuFloorRatio = 1e-6;
// The exact residual costs an extra SVD, so it is only evaluated when the
// gradient mapping at the extrapolated point is already small, or periodically.
constexpr double kSurrogateSlack = 10.0;
constexpr int kResidualCheckPeriod = 25;

struct Step {
  Matrix l;
  Matrix s;
  double nuclear = 0.0;
};

// Proximal-gradient map at (l, s) for the given mu. In the single-block
// modes the smooth term has Lipschitz constant 1/mu instead of 2/mu.
Step prox_step(const Matrix& m, const Matrix& l, const Matrix& s, double lambda, double mu, Blocks blocks) {
  Step out;
  switch (blocks) {
    case Blocks::joint: {
      const Matrix half_grad = 0.5 * (l + s - m);
      auto low = svt_with_norm(l - half_grad, 0.5 * mu);
      out.l = std::move(low.value);
      out.nuclear = low.nuclear;
      out.s = shrink(s - half_grad, 0.5 * lambda * mu);
      break;
    }
    case Blocks::low_rank_only: {
      auto low = svt_with_norm(l - (l - m), mu);
      out.l = std::move(low.value);
      out.nuclear = low.nuclear;
      out.s = Matrix::Zero(m.rows(), m.cols());
      break;
    }
    case Blocks::sparse_only:
      out.l = Matrix::Zero(m.rows(), m.cols());
      out.s = shrink(s - (s - m), lambda * mu);
      break;
  }
  return out;
}

double pair_distance(const Matrix& l1, const Matrix& s1, const Matrix& l2, const Matrix& s2) {
  return std::sqrt((l1 - l2).squaredNorm() + (s1 - s2).squaredNorm());
}

double pair_size(const Matrix& l, const Matrix& s) { return std::sqrt(l.squaredNorm() + s.squaredNorm()); }

double residual_at(const Matrix& m, const Matrix& l, const Matrix& s, double lambda, double mu, Blocks blocks) {
  const Step g = prox_step(m, l, s, lambda, mu, blocks);
  return pair_distance(l, s, g.l, g.s) / (1.0 + pair_size(l, s));
}

}  // namespace

double default_lambda(Eigen::Index n1, Eigen::Index n2) {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("default_lambda: dimensions must be positive");
  return 1.0 / std::sqrt(static_cast<double>(std::max(n1, n2)));
}

double default_mu(Eigen::Index n, double sigma, double m_frobenius) {
  if (n < 1) throw std::invalid_argument("default_mu: n must be positive");
  if (!(sigma >= 0.0)) throw std::invalid_argument("default_mu: sigma must be >= 0");
  const double mu = std::sqrt(2.0 * static_cast<double>(n)) * sigma;
  if (sigma == 0.0) return kMuFloorRatio * m_frobenius;
  return mu;
}

void SolverConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("SolverConfig: lambda must be > 0");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("SolverConfig: mu must be > 0");
  if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("SolverConfig: rel_tol must be > 0");
  if (!(decay > 0.0 && decay < 1.0)) throw std::invalid_argument("SolverConfig: decay must be in (0, 1)");
  if (!(mu_start_factor > 0.0)) throw std::invalid_argument("SolverConfig: mu_start_factor must be > 0");
}

SolverConfig SolverConfig::defaults_for(const Matrix& m, double sigma) {
  SolverConfig cfg;
  cfg.lambda = default_lambda(m.rows(), m.cols());
  // The noise level rule is stated for square n; use the larger side.
  cfg.mu = default_mu(std::max(m.rows(), m.cols()), sigma, m.norm());
  return cfg;
}

double objective(const Matrix& m, const Matrix& l, const Matrix& s, double lambda, double mu) {
  if (l.rows() != m.rows() || l.cols() != m.cols() || s.rows() != m.rows() || s.cols() != m.cols()) {
    throw std::invalid_argument("objective: shape mismatch");
  }
  return nuclear_norm(l) + lambda * l1_norm(s) + (m - l - s).squaredNorm() / (2.0 * mu);
}

MatrixPair prox_gradient_step(const Matrix& m, const Matrix& l, const Matrix& s, double lambda, double mu) {
  Step g = prox_step(m, l, s, lambda, mu, Blocks::joint);
  return MatrixPair(std::move(g.l), std::move(g.s));
}

double fixed_point_residual(const Matrix& m, const Matrix& l, const Matrix& s, double lambda, double mu) {
  return residual_at(m, l, s, lambda, mu, Blocks::joint);
}

SolveResult solve(const Matrix& m, const SolverConfig& cfg) {
  cfg.validate();
  require_finite(m, "solve");

  const Eigen::Index n1 = m.rows();
  const Eigen::Index n2 = m.cols();
  SolveResult res;
  res.l_hat = Matrix::Zero(n1, n2);
  res.s_hat = Matrix::Zero(n1, n2);

  if (m.size() == 0 || m.isZero(0.0)) {
    res.converged = true;
    return res;
  }

  const double lambda = cfg.lambda;
  const double mu_target = cfg.mu;
  double mu_k = mu_target;
  if (cfg.continuation) mu_k = std::max(cfg.mu_start_factor * spectral_norm(m), mu_target);

  Matrix l = res.l_hat, s = res.s_hat;
  Matrix yl = l, ys = s;
  double t = 1.0;
  res.objective_trace.reserve(static_cast<std::size_t>(cfg.max_iters));

  for (int k = 1; k <= cfg.max_iters; ++k) {
    Step next = prox_step(m, yl, ys, lambda, mu_k, cfg.blocks);
    const double surrogate = pair_distance(next.l, next.s, yl, ys) / (1.0 + pair_size(next.l, next.s));

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double momentum = (t - 1.0) / t_next;
    yl = next.l + momentum * (next.l - l);
    ys = next.s + momentum * (next.s - s);
    l = std::move(next.l);
    s = std::move(next.s);
    t = t_next;
    res.iterations = k;

    res.objective_trace.push_back(next.nuclear + lambda * l1_norm(s) + (m - l - s).squaredNorm() / (2.0 * mu_target));

    if (mu_k == mu_target && (surrogate <= kSurrogateSlack * cfg.rel_tol || k % kResidualCheckPeriod == 0)) {
      res.residual = residual_at(m, l, s, lambda, mu_target, cfg.blocks);
      if (res.residual <= cfg.rel_tol) {
        res.converged = true;
        break;
      }
    }
    mu_k = std::max(cfg.decay * mu_k, mu_target);
  }

  if (!res.converged) res.residual = residual_at(m, l, s, lambda, mu_target, cfg.blocks);
  res.feasibility_gap = (m - l - s).norm();
  res.l_hat = std::move(l);
  res.s_hat = std::move(s);
  return res;
}

}  // namespace spcp
