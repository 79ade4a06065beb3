#include "spcp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spcp {

IncoherenceReport incoherence_params(const SubspaceT& t) {
  const auto r = static_cast<double>(t.rank());
  if (r < 1.0) throw std::invalid_argument("incoherence_params: rank must be >= 1");
  const auto n1 = static_cast<double>(t.rows());
  const auto n2 = static_cast<double>(t.cols());

  IncoherenceReport rep;
  rep.mu_u = n1 / r * t.u().rowwise().squaredNorm().maxCoeff();
  rep.mu_v = n2 / r * t.v().rowwise().squaredNorm().maxCoeff();
  const double uv_inf = (t.u() * t.v().transpose()).cwiseAbs().maxCoeff();
  rep.mu_uv = n1 * n2 / r * uv_inf * uv_inf;
  rep.mu = std::max({rep.mu_u, rep.mu_v, rep.mu_uv});
  return rep;
}

OperatorNormEstimate pt_pomega_norm(const SubspaceT& t, const SupportOmega& om, double tol, std::uint64_t seed,
                                    int max_iters) {
  OperatorNormEstimate est;
  if (om.size() == 0 || t.rank() == 0) {
    est.converged = true;
    return est;
  }

  Rng rng(seed);
  Matrix x = project_t(rng.normal_matrix(t.rows(), t.cols()), t);
  x /= x.norm();
  double rayleigh = 0.0;

  for (int k = 1; k <= max_iters; ++k) {
    Matrix y = project_t(project_omega(x, om), t);
    const double next = inner(x, y);
    est.iterations = k;
    const double y_norm = y.norm();
    if (y_norm == 0.0) {
      rayleigh = 0.0;
      est.converged = true;
      break;
    }
    const bool done = k > 1 && std::abs(next - rayleigh) <= tol * std::abs(next);
    rayleigh = next;
    if (done) {
      est.converged = true;
      break;
    }
    x = y / y_norm;
  }
  est.value = std::sqrt(std::max(rayleigh, 0.0));
  return est;
}

CertificateReport verify_certificate(const ProblemInstance& inst, const Matrix& w, double lambda) {
  if (w.rows() != inst.m.rows() || w.cols() != inst.m.cols()) {
    throw std::invalid_argument("verify_certificate: W shape does not match the instance");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("verify_certificate: lambda must be positive");

  CertificateReport rep;
  const Matrix uv = inst.t.u() * inst.t.v().transpose();

  rep.in_t_perp.value = project_t(w, inst.t).norm();
  rep.in_t_perp.bound = 1e-8 * w.norm();
  rep.in_t_perp.ok = rep.in_t_perp.value <= rep.in_t_perp.bound;

  rep.spectral.value = spectral_norm(w);
  rep.spectral.bound = 0.5;
  rep.spectral.ok = rep.spectral.value < rep.spectral.bound;

  const Matrix sgn = inst.s0.unaryExpr([](double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); });
  rep.omega.value = project_omega(uv - lambda * sgn + w, inst.omega).norm();
  rep.omega.bound = lambda / 4.0;
  rep.omega.ok = rep.omega.value <= rep.omega.bound;

  rep.omega_perp.value = linf_norm(project_omega_perp(uv + w, inst.omega));
  rep.omega_perp.bound = lambda / 2.0;
  rep.omega_perp.ok = rep.omega_perp.value < rep.omega_perp.bound;

  rep.all_ok = rep.in_t_perp.ok && rep.spectral.ok && rep.omega.ok && rep.omega_perp.ok;

  rep.pt_pomega = pt_pomega_norm(inst.t, inst.omega).value;
  rep.pt_pomega_ok = rep.pt_pomega <= 0.5;
  rep.lambda_ok = lambda < 1.0;
  return rep;
}

double stability_bound(Eigen::Index n1, Eigen::Index n2, double delta) {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("stability_bound: dimensions must be positive");
  if (!(delta >= 0.0)) throw std::invalid_argument("stability_bound: delta must be >= 0");
  const double a = 8.0 * std::sqrt(5.0);
  const double b = std::sqrt(2.0);
  if (n1 == n2) return (a * static_cast<double>(n1) + b) * delta;
  const double c = (a + b) * (a + b);
  return std::sqrt(c * static_cast<double>(n1) * static_cast<double>(n2)) * delta;
}

RmsErrors rms_errors(const ProblemInstance& inst, const Matrix& l_hat, const Matrix& s_hat) {
  if (l_hat.rows() != inst.l0.rows() || l_hat.cols() != inst.l0.cols() || s_hat.rows() != inst.s0.rows() ||
      s_hat.cols() != inst.s0.cols()) {
    throw std::invalid_argument("rms_errors: shape mismatch");
  }
  const double scale = std::sqrt(static_cast<double>(inst.l0.rows()) * static_cast<double>(inst.l0.cols()));
  const double el = (l_hat - inst.l0).norm();
  const double es = (s_hat - inst.s0).norm();
  return {el / scale, es / scale, std::hypot(el, es)};
}

double lemma2_check(const SubspaceT& t, const SupportOmega& om, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("lemma2_check: trials must be >= 1");
  Rng rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < trials; ++k) {
    const Matrix a = project_t(rng.normal_matrix(t.rows(), t.cols()), t);
    const Matrix b = project_omega(rng.normal_matrix(t.rows(), t.cols()), om);
    const double denom = a.squaredNorm() + b.squaredNorm();
    if (denom == 0.0) continue;
    const MatrixPair g = project_gamma(MatrixPair(a, b));
    worst = std::min(worst, (g.l.squaredNorm() + g.s.squaredNorm()) / denom);
  }
  return worst;
}

RecoveryAssumptions recovery_assumptions(const SubspaceT& t, const SupportOmega& om) {
  const auto n_big = static_cast<double>(std::max(t.rows(), t.cols()));
  const auto n_small = static_cast<double>(std::min(t.rows(), t.cols()));
  const double log_n = std::log(n_big);
  RecoveryAssumptions ra;
  ra.rank_ratio = static_cast<double>(t.rank()) * incoherence_params(t).mu * log_n * log_n / n_small;
  ra.sparsity_ratio = static_cast<double>(om.size()) / (static_cast<double>(om.rows()) * static_cast<double>(om.cols()));
  return ra;
}

}  // namespace spcp
