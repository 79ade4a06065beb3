// Acceptance run: prints one PASS/FAIL line per criterion, exit code 0 iff all pass.
#include "oracles.hpp"
#include "spcp/diagnostics.hpp"
#include "spcp/experiment.hpp"
#include "spcp/oracle.hpp"
#include "spcp/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace spcp;
using namespace spcp::testing;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SweepSpec sweep(SweepVariable var, std::vector<double> values, Eigen::Index n, Eigen::Index r, double rho, double sigma,
                std::uint64_t seed, bool oracle) {
  SweepSpec s;
  s.variable = var;
  s.values = std::move(values);
  s.fixed.n1 = s.fixed.n2 = n;
  s.fixed.rank = r;
  s.fixed.rho_s = rho;
  s.fixed.sigma = sigma;
  s.trials = 20;
  s.base_seed = seed;
  s.run_oracle = oracle;
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// stability bound tally over the solved trials
struct BoundTally {
  int checked = 0, violated = 0, violated_noise_free = 0;
  double min_slack = INFINITY;
};

void tally(BoundTally& b, const SweepOutcome& out) {
  for (const auto& row : out.trials)
    for (const auto& t : row) {
      if (!t.error.empty()) continue;
      ++b.checked;
      if (!(t.pair_error <= t.stability_bound)) {
        ++b.violated;
        if (t.delta == 0.0) ++b.violated_noise_free;
      }
      const double slack = t.pair_error > 0 ? t.stability_bound / t.pair_error : INFINITY;
      b.min_slack = std::min(b.min_slack, slack);
    }
}

bool property_suites(std::string& detail) {
  Rng rng(2024);
  int bad = 0;

  // norm chain on 200 random matrices
  for (int k = 0; k < 200; ++k) {
    const Eigen::Index n1 = 2 + k % 9, n2 = 2 + (k * 7) % 11;
    const Matrix y = rng.normal_matrix(n1, n2, 0.1 + k % 5);
    const MatrixNorms nm = norms(y);
    const double nn = std::sqrt(double(std::min(n1, n2)));
    const double tol = 1e-12 * (1.0 + nm.nuclear);
    const bool ok = nm.spectral <= nm.frobenius + tol && nm.frobenius <= nm.nuclear + tol && nm.nuclear <= nn * nm.frobenius + tol &&
                    nm.frobenius <= nn * nm.spectral + tol && nm.linf <= nm.spectral + tol && nm.frobenius <= nm.l1 + tol &&
                    nm.l1 <= std::sqrt(double(n1 * n2)) * nm.frobenius + tol;
    if (!ok) ++bad;
  }
  const int norm_bad = bad;

  // prox oracles
  int prox_bad = 0;
  for (int k = 0; k < 20; ++k) {
    const Matrix a = rng.normal_matrix(6, 5, 2.0);
    const double tau = 0.1 + 0.2 * k;
    const Matrix sh = shrink(a, tau);
    for (Eigen::Index i = 0; i < a.size(); ++i)
      if (std::abs(sh(i) - scalar_prox_grid(a(i), tau)) > 1e-4) ++prox_bad;
    const Vector sv = gram_singular_values(a);
    const Vector got = svd(svt(a, tau), 0.0).singular_values;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      const double expect = std::max(sv(i) - tau, 0.0);
      const double have = i < got.size() ? got(i) : 0.0;
      if (std::abs(have - expect) > 1e-9 * (1.0 + sv(0))) ++prox_bad;
    }
    if (std::abs(nuclear_norm(a) - sv.sum()) > 1e-9 * sv.sum()) ++prox_bad;
    if (std::abs(spectral_norm(a) - sv(0)) > 1e-9 * sv(0)) ++prox_bad;
  }

  // projector idempotence and self-adjointness
  int proj_bad = 0;
  for (int k = 0; k < 20; ++k) {
    const SubspaceT t = random_subspace(rng, 12, 9, 1 + k % 4);
    const SupportOmega om = random_support(rng, 12, 9, 0.3);
    const Matrix x = rng.normal_matrix(12, 9), y = rng.normal_matrix(12, 9);
    const Matrix px = project_t(x, t);
    if ((project_t(px, t) - px).norm() > 1e-10) ++proj_bad;
    if (std::abs(inner(px, y) - inner(x, project_t(y, t))) > 1e-10) ++proj_bad;
    const Matrix ox = project_omega(x, om);
    if ((project_omega(ox, om) - ox).norm() > 1e-10) ++proj_bad;
    if (std::abs(inner(ox, y) - inner(x, project_omega(y, om))) > 1e-10) ++proj_bad;
    const MatrixPair p(x, y), q(y, x);
    const MatrixPair g = project_gamma(p), gg = project_gamma(g);
    if ((gg.l - g.l).norm() > 1e-10 || (gg.s - g.s).norm() > 1e-10) ++proj_bad;
    const MatrixPair gq = project_gamma(q);
    if (std::abs(inner(g.l, q.l) + inner(g.s, q.s) - inner(p.l, gq.l) - inner(p.s, gq.s)) > 1e-10) ++proj_bad;
  }

  // Lemma 2 at n in {10, 20, 40}
  double lemma_min = INFINITY;
  int lemma_bad = 0;
  for (Eigen::Index n : {10, 20, 40}) {
    bool done = false;
    for (int attempt = 0; attempt < 50 && !done; ++attempt) {
      const SubspaceT t = random_subspace(rng, n, n, 1);
      const SupportOmega om = random_support(rng, n, n, 0.01);
      if (om.size() == 0 || pt_pomega_norm(t, om, 1e-10).value > 0.5) continue;
      const double ratio = lemma2_check(t, om, 1000, static_cast<std::uint64_t>(n));
      lemma_min = std::min(lemma_min, ratio);
      if (ratio < 0.25) ++lemma_bad;
      done = true;
    }
    if (!done) ++lemma_bad;
  }

  // pt_pomega_norm against the explicit 36 x 36 operator
  double opnorm_err = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SubspaceT t = random_subspace(rng, 6, 6, 1 + seed % 2);
    const SupportOmega om = random_support(rng, 6, 6, 0.25);
    const Matrix op = explicit_pomega(om) * explicit_pt(t.u(), t.v());
    const double expect = Eigen::JacobiSVD<Matrix>(op).singularValues()(0);
    opnorm_err = std::max(opnorm_err, std::abs(pt_pomega_norm(t, om, 1e-14, seed).value - expect));
  }

  // oracle exact when Z0 = 0
  double oracle_err = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    GenConfig c;
    c.n1 = c.n2 = 60;
    c.rank = 4;
    c.rho_s = 0.1;
    c.sigma = 0.0;
    c.seed = seed;
    const ProblemInstance inst = assemble(c);
    const OracleResult r = oracle_solve(inst);
    oracle_err = std::max({oracle_err, (r.l_oracle - inst.l0).norm() / inst.l0.norm(), (r.s_oracle - inst.s0).norm() / inst.s0.norm()});
  }

  detail = fmt("norm-chain violations %d/200, prox mismatches %d, projector failures %d, lemma2 min ratio %.3f, "
               "|P_Omega P_T| max err %.2e, oracle Z0=0 rel err %.2e",
               norm_bad, prox_bad, proj_bad, lemma_min, opnorm_err, oracle_err);
  return norm_bad == 0 && prox_bad == 0 && proj_bad == 0 && lemma_bad == 0 && opnorm_err <= 1e-8 && oracle_err <= 1e-8;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  BoundTally bound_all;

  // 1. noise-free exact recovery, timed single-threaded
  {
    SweepSpec s = sweep(SweepVariable::sigma, {0.0}, 100, 5, 0.05, 0.0, 1001, false);
    s.threads = 1;
    const auto t0 = std::chrono::steady_clock::now();
    const SweepOutcome out = run_sweep_detailed(s);
    const double wall = seconds_since(t0);
    int exact = 0;
    double worst = 0.0;
    for (const auto& t : out.trials[0]) {
      if (t.completed && t.rel_error_l <= 1e-4 && t.rel_error_s <= 1e-4) ++exact;
      worst = std::max({worst, t.rel_error_l, t.rel_error_s});
    }
    tally(bound_all, out);
    report(1, exact >= 18 && wall <= 60.0,
           fmt("%d/20 trials with relative errors <= 1e-4 (worst %.2e), %.1f s", exact, worst, wall));
  }

  // 2. linear growth of rms_l in sigma
  {
    const std::vector<double> sig{0.01, 0.02, 0.05, 0.1};
    const SweepOutcome out = run_sweep_detailed(sweep(SweepVariable::sigma, sig, 100, 5, 0.1, 0.0, 2002, false));
    tally(bound_all, out);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = double(sig.size());
    for (const auto& r : out.records) {
      sx += r.value;
      sy += r.spcp_rms_l;
      sxx += r.value * r.value;
      sxy += r.value * r.spcp_rms_l;
    }
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / k;
    double ss_res = 0, ss_tot = 0;
    for (const auto& r : out.records) {
      ss_res += std::pow(r.spcp_rms_l - (intercept + slope * r.value), 2);
      ss_tot += std::pow(r.spcp_rms_l - sy / k, 2);
    }
    const double r2 = 1.0 - ss_res / ss_tot;
    const double at_top = out.records.back().spcp_rms_l;
    report(2, r2 >= 0.95 && std::abs(intercept) <= 0.2 * at_top && out.all_completed(),
           fmt("R^2 = %.4f, intercept = %.3e, rms_l(0.1) = %.4f, slope = %.4f", r2, intercept, at_top, slope));
  }

  // 3. SPCP versus oracle at the paper's default setting
  double crit3_rms_l = 0.0;
  BoundTally bound_n200;
  {
    const SweepOutcome out = run_sweep_detailed(sweep(SweepVariable::sigma, {0.1}, 200, 10, 0.2, 0.1, 3003, true));
    tally(bound_all, out);
    tally(bound_n200, out);
    const SweepRecord& r = out.records[0];
    crit3_rms_l = r.spcp_rms_l;
    bool oracle_ok = true;
    for (const auto& t : out.trials[0]) oracle_ok = oracle_ok && t.oracle_ok;
    const double ratio = r.spcp_rms_l / r.oracle_rms_l;
    report(3, ratio >= 1.0 && ratio <= 4.0 && oracle_ok && out.all_completed(),
           fmt("mean rms_l SPCP %.4f, oracle %.4f, ratio %.3f", r.spcp_rms_l, r.oracle_rms_l, ratio));
  }

  // 4. stability bound on every instance of 1-3, slack at n = 200
  report(4, bound_all.violated == 0 && bound_n200.min_slack >= 10.0,
         fmt("%d/%d instances violate the bound (%d of them with |Z0|_F = 0), min slack at n=200 %.1f", bound_all.violated,
             bound_all.checked, bound_all.violated_noise_free, bound_n200.min_slack));
  if (bound_all.violated_noise_free > 0)
    std::printf("  note: with |Z0|_F = 0 the bound is 0, and the solver's mu > 0 leaves a nonzero error\n");

  // 5. larger n lowers rms_l
  {
    const SweepOutcome out = run_sweep_detailed(sweep(SweepVariable::n, {100, 400}, 100, 10, 0.2, 0.1, 5005, false));
    const double a = out.records[0].spcp_rms_l, b = out.records[1].spcp_rms_l;
    report(5, b < a && out.all_completed(), fmt("mean rms_l n=100 %.4f, n=400 %.4f", a, b));
  }

  // 6. proportional rank r = 0.1 n
  {
    SweepSpec s = sweep(SweepVariable::n_with_proportional_rank, {100, 200}, 100, 10, 0.1, 0.1, 6006, false);
    s.rank_fraction = 0.1;
    const SweepOutcome out = run_sweep_detailed(s);
    const double a = out.records[0].spcp_rms_l, b = out.records[1].spcp_rms_l;
    const double cap = 3.0 * crit3_rms_l;
    report(6, out.all_completed() && a <= cap && b <= cap,
           fmt("converged %d/20 and %d/20, mean rms_l %.4f (n=100), %.4f (n=200), cap %.4f", out.records[0].completed,
               out.records[1].completed, a, b, cap));
  }

  // 7. property suites
  {
    std::string detail;
    const bool ok = property_suites(detail);
    report(7, ok, detail);
  }

  // 8. single-block specializations
  {
    Rng rng(8008);
    int exact = 0, total = 0;
    for (int k = 0; k < 5; ++k) {
      const Matrix m = rng.normal_matrix(30 + k, 25, 1.0 + k);
      SolverConfig cfg;
      cfg.lambda = default_lambda(m.rows(), m.cols());
      cfg.mu = 0.5 + k;
      cfg.continuation = false;
      cfg.max_iters = 1;
      cfg.blocks = Blocks::low_rank_only;
      const SolveResult lr = solve(m, cfg);
      exact += (lr.l_hat == svt(m, cfg.mu) && lr.s_hat.isZero(0.0));
      cfg.blocks = Blocks::sparse_only;
      const SolveResult sp = solve(m, cfg);
      exact += (sp.s_hat == shrink(m, cfg.mu * cfg.lambda) && sp.l_hat.isZero(0.0));
      total += 2;
    }
    report(8, exact == total, fmt("%d/%d single-block solves bitwise equal to svt / shrink", exact, total));
  }

  std::printf("total %.1f s, %d criteria failed\n", seconds_since(start), failures);
  return failures == 0 ? 0 : 1;
}
