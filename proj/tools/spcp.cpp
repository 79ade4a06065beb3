// Command-line front end: generate, solve, oracle, certify, experiment.

#include "spcp/diagnostics.hpp"
#include "spcp/experiment.hpp"
#include "spcp/matrix_io.hpp"
#include "spcp/oracle.hpp"
#include "spcp/problem_gen.hpp"
#include "spcp/solver.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace spcp;

namespace {

std::string yes_no(bool b) { return b ? "yes" : "no"; }

int cmd_generate(GenConfig cfg, std::optional<Eigen::Index> n, const fs::path& out_dir) {
  if (n) cfg.n1 = cfg.n2 = *n;
  const ProblemInstance inst = assemble(cfg);
  write_instance(out_dir, inst);
  std::cout << "wrote " << inst.m.rows() << "x" << inst.m.cols() << " instance to " << out_dir.string()
            << " (|Omega| = " << inst.omega.size() << ", delta = " << inst.delta << ")\n";
  return 0;
}

struct SolveArgs {
  fs::path input;
  fs::path out_dir = "solve_out";
  std::optional<double> lambda, mu, sigma;
  int max_iters = 2000;
  double tol = 1e-7;
  bool no_continuation = false;
};

int cmd_solve(const SolveArgs& a) {
  Matrix m;
  std::optional<double> sigma = a.sigma;
  if (fs::is_directory(a.input)) {
    const ProblemInstance inst = read_instance(a.input);
    m = inst.m;
    if (!sigma) sigma = inst.config.sigma;
  } else {
    m = io::read_matrix(a.input);
  }
  if (!a.mu && !sigma) throw std::invalid_argument("solve: give --mu or --sigma for a raw matrix input");

  SolverConfig cfg = SolverConfig::defaults_for(m, sigma.value_or(0.0));
  if (a.lambda) cfg.lambda = *a.lambda;
  if (a.mu) cfg.mu = *a.mu;
  cfg.max_iters = a.max_iters;
  cfg.rel_tol = a.tol;
  cfg.continuation = !a.no_continuation;

  const auto start = std::chrono::steady_clock::now();
  const SolveResult res = solve(m, cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  fs::create_directories(a.out_dir);
  io::write_binary(a.out_dir / "l_hat.bin", res.l_hat);
  io::write_binary(a.out_dir / "s_hat.bin", res.s_hat);
  io::KeyValues kv;
  kv["lambda"] = io::format_double(cfg.lambda);
  kv["mu"] = io::format_double(cfg.mu);
  kv["iterations"] = std::to_string(res.iterations);
  kv["converged"] = res.converged ? "true" : "false";
  kv["final_objective"] = io::format_double(objective(m, res.l_hat, res.s_hat, cfg.lambda, cfg.mu));
  kv["feasibility_gap"] = io::format_double(res.feasibility_gap);
  kv["residual"] = io::format_double(res.residual);
  kv["wall_seconds"] = io::format_double(wall);
  io::write_key_values(a.out_dir / "result.txt", kv);
  for (const auto& [k, v] : kv) std::cout << k << '=' << v << '\n';
  return res.converged ? 0 : 2;
}

int cmd_oracle(const fs::path& dir, const fs::path& out_dir) {
  const ProblemInstance inst = read_instance(dir);
  const OracleResult res = oracle_solve(inst);
  const RmsErrors err = rms_errors(inst, res.l_oracle, res.s_oracle);
  fs::create_directories(out_dir);
  io::write_binary(out_dir / "l_oracle.bin", res.l_oracle);
  io::write_binary(out_dir / "s_oracle.bin", res.s_oracle);
  io::KeyValues kv;
  kv["cg_iterations"] = std::to_string(res.cg_iterations);
  kv["residual"] = io::format_double(res.residual);
  kv["ok"] = res.ok ? "true" : "false";
  kv["rms_l"] = io::format_double(err.rms_l);
  kv["rms_s"] = io::format_double(err.rms_s);
  io::write_key_values(out_dir / "oracle.txt", kv);
  for (const auto& [k, v] : kv) std::cout << k << '=' << v << '\n';
  return res.ok ? 0 : 2;
}

int cmd_certify(const fs::path& dir, const std::optional<fs::path>& w_path, std::optional<double> lambda_opt) {
  const ProblemInstance inst = read_instance(dir);
  const double lambda = lambda_opt.value_or(default_lambda(inst.m.rows(), inst.m.cols()));
  const IncoherenceReport inc = incoherence_params(inst.t);
  const OperatorNormEstimate op = pt_pomega_norm(inst.t, inst.omega);
  const RecoveryAssumptions ra = recovery_assumptions(inst.t, inst.omega);

  std::cout << "Incoherence: mu_u = " << inc.mu_u << ", mu_v = " << inc.mu_v << ", mu_uv = " << inc.mu_uv
            << ", mu = " << inc.mu << '\n';
  std::cout << "|P_Omega P_T| = " << op.value << (op.converged ? "" : " (not converged)")
            << (op.value <= 0.5 ? "  <= 1/2" : "  > 1/2") << '\n';
  std::cout << "Rank quantity r mu log^2(n) / n = " << ra.rank_ratio << ", sparsity |Omega| / n1n2 = "
            << ra.sparsity_ratio << " (no thresholds asserted)\n";
  std::cout << "Stability bound at delta = " << inst.delta << ": "
            << stability_bound(inst.m.rows(), inst.m.cols(), inst.delta)
            << (stability_bound_is_extension(inst.m.rows(), inst.m.cols()) ? " (rectangular extension)" : "") << '\n';

  io::KeyValues kv;
  kv["lambda"] = io::format_double(lambda);
  kv["mu_u"] = io::format_double(inc.mu_u);
  kv["mu_v"] = io::format_double(inc.mu_v);
  kv["mu_uv"] = io::format_double(inc.mu_uv);
  kv["mu"] = io::format_double(inc.mu);
  kv["pt_pomega_norm"] = io::format_double(op.value);
  kv["pt_pomega_converged"] = op.converged ? "true" : "false";
  kv["rank_ratio"] = io::format_double(ra.rank_ratio);
  kv["sparsity_ratio"] = io::format_double(ra.sparsity_ratio);
  kv["stability_bound"] = io::format_double(stability_bound(inst.m.rows(), inst.m.cols(), inst.delta));
  kv["stability_bound_extension"] = stability_bound_is_extension(inst.m.rows(), inst.m.cols()) ? "true" : "false";

  if (w_path) {
    const Matrix w = io::read_matrix(*w_path);
    const CertificateReport rep = verify_certificate(inst, w, lambda);
    std::cout << "Certificate:\n"
              << "  W in T-perp:            " << yes_no(rep.in_t_perp.ok) << "  (|P_T W|_F = " << rep.in_t_perp.value << ")\n"
              << "  |W| < 1/2:              " << yes_no(rep.spectral.ok) << "  (|W| = " << rep.spectral.value << ")\n"
              << "  Omega condition:        " << yes_no(rep.omega.ok) << "  (" << rep.omega.value << " vs " << rep.omega.bound << ")\n"
              << "  Omega-perp condition:   " << yes_no(rep.omega_perp.ok) << "  (" << rep.omega_perp.value << " vs "
              << rep.omega_perp.bound << ")\n"
              << "  all conditions hold:    " << yes_no(rep.all_ok) << '\n'
              << "  hypotheses: |P_Omega P_T| <= 1/2: " << yes_no(rep.pt_pomega_ok) << ", lambda < 1: " << yes_no(rep.lambda_ok)
              << '\n';
    kv["cert_in_t_perp"] = rep.in_t_perp.ok ? "true" : "false";
    kv["cert_spectral"] = rep.spectral.ok ? "true" : "false";
    kv["cert_spectral_value"] = io::format_double(rep.spectral.value);
    kv["cert_omega"] = rep.omega.ok ? "true" : "false";
    kv["cert_omega_value"] = io::format_double(rep.omega.value);
    kv["cert_omega_perp"] = rep.omega_perp.ok ? "true" : "false";
    kv["cert_omega_perp_value"] = io::format_double(rep.omega_perp.value);
    kv["cert_all_ok"] = rep.all_ok ? "true" : "false";
  }
  std::cout << "---\n";
  for (const auto& [k, v] : kv) std::cout << k << '=' << v << '\n';
  return 0;
}

int cmd_experiment(const fs::path& spec_path, std::optional<std::uint64_t> seed, const fs::path& out_dir,
                   const std::string& format, bool svg) {
  SweepSpec spec = read_sweep_spec(spec_path);
  if (seed) spec.base_seed = *seed;
  const SweepOutcome out = run_sweep_detailed(spec);

  fs::create_directories(out_dir);
  if (format == "csv") {
    emit_csv(out.records, out_dir / "sweep.csv");
  } else {
    emit_plot_data(out.records, out_dir, svg, to_string(spec.variable));
  }
  io::KeyValues meta;
  meta["sweep"] = to_string(spec.variable);
  meta["grid"] = spec.default_values ? "default (built-in grid)" : "user";
  meta["trials"] = std::to_string(spec.trials);
  meta["base_seed"] = std::to_string(spec.base_seed);
  meta["run_oracle"] = spec.run_oracle ? "true" : "false";
  io::write_key_values(out_dir / "sweep_meta.txt", meta);

  emit_csv(out.records, std::cout);
  for (std::size_t v = 0; v < out.trials.size(); ++v)
    for (const auto& t : out.trials[v])
      if (!t.error.empty()) std::cerr << "trial seed " << t.seed << " failed: " << t.error << '\n';
  return out.all_completed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stable principal component pursuit: low-rank plus sparse recovery under noise"};
  app.require_subcommand(1);

  GenConfig gen;
  std::optional<Eigen::Index> gen_n;
  fs::path gen_out = "instance";
  auto* g = app.add_subcommand("generate", "Generate a synthetic instance M = L0 + S0 + Z0");
  g->add_option("--n", gen_n, "Square dimension (sets n1 = n2)");
  g->add_option("--n1", gen.n1, "Rows")->capture_default_str();
  g->add_option("--n2", gen.n2, "Columns")->capture_default_str();
  g->add_option("--rank", gen.rank, "Rank of L0")->capture_default_str();
  g->add_option("--rho-s", gen.rho_s, "Corruption probability")->capture_default_str();
  g->add_option("--sigma", gen.sigma, "Noise standard deviation")->capture_default_str();
  g->add_option("--amplitude", gen.sparse_amplitude, "Sparse entries are uniform on [-a, a]")->capture_default_str();
  g->add_option("--factor-scale", gen.factor_scale, "Factor variance is scale * sigma / sqrt(n)")->capture_default_str();
  g->add_option("--seed", gen.seed, "Seed")->capture_default_str();
  g->add_option("--out-dir", gen_out, "Output directory")->capture_default_str();

  SolveArgs sa;
  auto* s = app.add_subcommand("solve", "Solve the stable PCP problem for an instance directory or matrix file");
  s->add_option("input", sa.input, "Instance directory, .bin or .csv matrix")->required();
  s->add_option("--lambda", sa.lambda, "Sparsity weight (default 1/sqrt(max(n1,n2)))");
  s->add_option("--mu", sa.mu, "Penalty parameter (default sqrt(2n) sigma)");
  s->add_option("--sigma", sa.sigma, "Noise level used by the default mu rule");
  s->add_option("--max-iters", sa.max_iters, "Iteration cap")->capture_default_str();
  s->add_option("--tol", sa.tol, "Fixed-point residual tolerance")->capture_default_str();
  s->add_flag("--no-continuation", sa.no_continuation, "Run at the target mu from the start");
  s->add_option("--out-dir", sa.out_dir, "Output directory")->capture_default_str();

  fs::path oracle_in, oracle_out = "oracle_out";
  auto* o = app.add_subcommand("oracle", "Least-squares fit given the true subspace and support");
  o->add_option("instance", oracle_in, "Instance directory")->required()->check(CLI::ExistingDirectory);
  o->add_option("--out-dir", oracle_out, "Output directory")->capture_default_str();

  fs::path cert_in;
  std::optional<fs::path> cert_w;
  std::optional<double> cert_lambda;
  auto* c = app.add_subcommand("certify", "Report incoherence, |P_Omega P_T| and certificate checks");
  c->add_option("instance", cert_in, "Instance directory")->required()->check(CLI::ExistingDirectory);
  c->add_option("--w", cert_w, "Candidate dual certificate matrix file");
  c->add_option("--lambda", cert_lambda, "lambda (default 1/sqrt(max(n1,n2)))");

  fs::path exp_spec, exp_out = "experiment_out";
  std::optional<std::uint64_t> exp_seed;
  std::string exp_format = "csv";
  bool exp_svg = false;
  auto* e = app.add_subcommand("experiment", "Run a seeded sweep and write averaged RMS errors");
  e->add_option("--spec", exp_spec, "Sweep description (key = value lines)")->required()->check(CLI::ExistingFile);
  e->add_option("--seed", exp_seed, "Override base_seed");
  e->add_option("--out-dir", exp_out, "Output directory")->capture_default_str();
  e->add_option("--format", exp_format, "csv or plot")->check(CLI::IsMember({"csv", "plot"}))->capture_default_str();
  e->add_flag("--svg", exp_svg, "With --format plot, also render chart.svg");

  CLI11_PARSE(app, argc, argv);

  try {
    if (g->parsed()) return cmd_generate(gen, gen_n, gen_out);
    if (s->parsed()) return cmd_solve(sa);
    if (o->parsed()) return cmd_oracle(oracle_in, oracle_out);
    if (c->parsed()) return cmd_certify(cert_in, cert_w, cert_lambda);
    if (e->parsed()) return cmd_experiment(exp_spec, exp_seed, exp_out, exp_format, exp_svg);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
