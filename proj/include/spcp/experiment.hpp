#pragma once

#include "spcp/matrix_io.hpp"
#include "spcp/problem_gen.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace spcp {

enum class SweepVariable { sigma, rho_s, n, n_with_proportional_rank };

std::string to_string(SweepVariable v);
SweepVariable parse_sweep_variable(const std::string& s);

/// Grid used when a sweep spec gives no explicit values.
std::vector<double> default_grid(SweepVariable v);

struct SweepSpec {
  SweepVariable variable = SweepVariable::sigma;
  std::vector<double> values;
  GenConfig fixed;
  /// Rank as a fraction of n for n_with_proportional_rank.
  double rank_fraction = 0.1;
  int trials = 20;
  std::uint64_t base_seed = 0;
  bool run_oracle = true;
  int max_iters = 2000;
  double rel_tol = 1e-7;
  /// 0 uses std::thread::hardware_concurrency().
  unsigned threads = 0;
  /// True when `values` came from default_grid() rather than the user.
  bool default_values = false;

  void validate() const;
  /// Generator config of trial `trial` at values[value_index].
  GenConfig config_for(std::size_t value_index, int trial) const;
};

/// Parses the key-value sweep description. Recognized keys: sweep, values,
/// n, n1, n2, rank, rank_fraction, rho_s, sigma, sparse_amplitude,
/// factor_scale, trials, base_seed (or seed), run_oracle, max_iters,
/// rel_tol, threads.
SweepSpec parse_sweep_spec(const io::KeyValues& kv);
SweepSpec read_sweep_spec(const std::filesystem::path& path);

struct TrialResult {
  std::uint64_t seed = 0;
  bool completed = false;  ///< instance built and solver converged
  std::string error;       ///< set when the trial threw
  double rms_l = 0.0;
  double rms_s = 0.0;
  double oracle_rms_l = 0.0;
  double oracle_rms_s = 0.0;
  bool oracle_ok = false;
  double pair_error = 0.0;  ///< |(L_hat, S_hat) - (L0, S0)|_F
  double delta = 0.0;
  double stability_bound = 0.0;
  double feasibility_gap = 0.0;
  double rel_error_l = 0.0;
  double rel_error_s = 0.0;
  int iterations = 0;
  double wall_seconds = 0.0;
};

struct SweepRecord {
  double value = 0.0;
  double spcp_rms_l = 0.0;
  double spcp_rms_s = 0.0;
  double oracle_rms_l = 0.0;  ///< NaN when the oracle was not run
  double oracle_rms_s = 0.0;
  double feasibility_gap = 0.0;
  double iterations = 0.0;
  double wall_seconds = 0.0;
  int completed = 0;
  int total = 0;
};

struct SweepOutcome {
  std::vector<SweepRecord> records;
  /// trials[v][t] for values[v], trial t.
  std::vector<std::vector<TrialResult>> trials;

  bool all_completed() const;
};

/// One generate / solve / (oracle) pipeline with default lambda and mu.
TrialResult run_trial(const GenConfig& cfg, bool run_oracle, int max_iters = 2000, double rel_tol = 1e-7);

SweepOutcome run_sweep_detailed(const SweepSpec& spec);
std::vector<SweepRecord> run_sweep(const SweepSpec& spec);

/// Header plus one row per record; numbers with 10 significant digits.
void emit_csv(const std::vector<SweepRecord>& records, std::ostream& os);
void emit_csv(const std::vector<SweepRecord>& records, const std::filesystem::path& path);
std::vector<SweepRecord> parse_csv_records(std::istream& is);

/// Writes one "x y" series file per curve into `dir` (spcp_L.dat,
/// spcp_S.dat and, when oracle values are present, oracle_L.dat,
/// oracle_S.dat). With render_svg a line chart is written to chart.svg.
/// Returns the series files written.
std::vector<std::filesystem::path> emit_plot_data(const std::vector<SweepRecord>& records,
                                                  const std::filesystem::path& dir, bool render_svg = false,
                                                  const std::string& x_label = "value");

}  // namespace spcp
