#include "spcp/experiment.hpp"

#include "spcp/diagnostics.hpp"
#include "spcp/oracle.hpp"
#include "spcp/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace spcp {

namespace {

constexpr const char* kCsvHeader =
    "value,spcp_rms_l,spcp_rms_s,oracle_rms_l,oracle_rms_s,feasibility_gap,iterations,wall_seconds,completed,total";

std::string fmt10(double x) {
  if (std::isnan(x)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto b = tok.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(std::stod(tok.substr(b)));
  }
  return out;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("expected a boolean, got '" + s + "'");
}

double mean_of(const std::vector<TrialResult>& trials, double TrialResult::*field) {
  double sum = 0.0;
  int count = 0;
  for (const auto& t : trials) {
    if (!t.error.empty()) continue;
    sum += t.*field;
    ++count;
  }
  return count ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

double relative_error(const Matrix& est, const Matrix& truth) {
  const double denom = truth.norm();
  const double err = (est - truth).norm();
  return denom > 0.0 ? err / denom : err;
}

void write_svg(const std::vector<SweepRecord>& records, const std::filesystem::path& path, bool with_oracle,
               const std::string& x_label) {
  struct Curve {
    const char* name;
    const char* color;
    double SweepRecord::*field;
  };
  std::vector<Curve> curves = {{"SPCP L", "#1f77b4", &SweepRecord::spcp_rms_l},
                               {"SPCP S", "#ff7f0e", &SweepRecord::spcp_rms_s}};
  if (with_oracle) {
    curves.push_back({"oracle L", "#2ca02c", &SweepRecord::oracle_rms_l});
    curves.push_back({"oracle S", "#d62728", &SweepRecord::oracle_rms_s});
  }

  double xmin = records.front().value, xmax = records.back().value, ymax = 0.0;
  for (const auto& r : records)
    for (const auto& c : curves)
      if (std::isfinite(r.*c.field)) ymax = std::max(ymax, r.*c.field);
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == 0.0) ymax = 1.0;

  constexpr double W = 640, H = 420, L = 70, R = 20, T = 20, B = 50;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - y / ymax * (H - T - B); };

  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  f << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  f << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (const auto& r : records) {
    f << "<text x=\"" << px(r.value) << "\" y=\"" << H - B + 16 << "\" font-size=\"11\" text-anchor=\"middle\">"
      << fmt10(r.value) << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double y = ymax * k / 4.0;
    f << "<text x=\"" << L - 6 << "\" y=\"" << py(y) + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << fmt10(y)
      << "</text>\n";
  }
  f << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label
    << "</text>\n";
  f << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" font-size=\"13\" transform=\"rotate(-90 16 " << (T + H - B) / 2
    << ")\" text-anchor=\"middle\">RMS error</text>\n";
  int legend = 0;
  for (const auto& c : curves) {
    f << "<polyline fill=\"none\" stroke=\"" << c.color << "\" stroke-width=\"2\" points=\"";
    for (const auto& r : records)
      if (std::isfinite(r.*c.field)) f << px(r.value) << ',' << py(r.*c.field) << ' ';
    f << "\"/>\n";
    f << "<text x=\"" << L + 10 << "\" y=\"" << T + 14 + 16 * legend++ << "\" font-size=\"12\" fill=\"" << c.color
      << "\">" << c.name << "</text>\n";
  }
  f << "</svg>\n";
}

}  // namespace

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::sigma: return "sigma";
    case SweepVariable::rho_s: return "rho_s";
    case SweepVariable::n: return "n";
    case SweepVariable::n_with_proportional_rank: return "n_with_proportional_rank";
  }
  return "?";
}

SweepVariable parse_sweep_variable(const std::string& s) {
  for (auto v : {SweepVariable::sigma, SweepVariable::rho_s, SweepVariable::n, SweepVariable::n_with_proportional_rank}) {
    if (to_string(v) == s) return v;
  }
  throw std::invalid_argument("unknown sweep variable '" + s + "'");
}

std::vector<double> default_grid(SweepVariable v) {
  switch (v) {
    case SweepVariable::sigma: return {0.02, 0.04, 0.06, 0.08, 0.1};
    case SweepVariable::rho_s: return {0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
    case SweepVariable::n: return {100, 200, 400};
    case SweepVariable::n_with_proportional_rank: return {100, 200, 300};
  }
  return {};
}

void SweepSpec::validate() const {
  if (values.empty()) throw std::invalid_argument("sweep: values must be non-empty");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) throw std::invalid_argument("sweep: values must be strictly increasing");
  }
  if (trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
  if (variable == SweepVariable::n || variable == SweepVariable::n_with_proportional_rank) {
    for (double v : values) {
      if (v < 1.0 || v != std::floor(v)) throw std::invalid_argument("sweep: n values must be positive integers");
    }
  }
  if (variable == SweepVariable::n_with_proportional_rank && !(rank_fraction > 0.0 && rank_fraction <= 1.0)) {
    throw std::invalid_argument("sweep: rank_fraction must be in (0, 1]");
  }
  for (std::size_t i = 0; i < values.size(); ++i) config_for(i, 0).validate();
}

GenConfig SweepSpec::config_for(std::size_t value_index, int trial) const {
  GenConfig cfg = fixed;
  const double v = values.at(value_index);
  switch (variable) {
    case SweepVariable::sigma: cfg.sigma = v; break;
    case SweepVariable::rho_s: cfg.rho_s = v; break;
    case SweepVariable::n:
      cfg.n1 = cfg.n2 = static_cast<Eigen::Index>(v);
      break;
    case SweepVariable::n_with_proportional_rank:
      cfg.n1 = cfg.n2 = static_cast<Eigen::Index>(v);
      cfg.rank = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::lround(rank_fraction * v)));
      break;
  }
  cfg.seed = Rng::derive(base_seed, value_index) + static_cast<std::uint64_t>(trial);
  return cfg;
}

SweepSpec parse_sweep_spec(const io::KeyValues& kv) {
  SweepSpec spec;
  auto get = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  static const char* known[] = {"sweep", "values", "n", "n1", "n2", "rank", "rank_fraction", "rho_s", "sigma",
                                "sparse_amplitude", "factor_scale", "trials", "base_seed", "seed", "run_oracle",
                                "max_iters", "rel_tol", "threads"};
  for (const auto& [k, v] : kv) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* s) { return k == s; }) == std::end(known)) {
      throw std::invalid_argument("sweep spec: unknown key '" + k + "'");
    }
  }
  try {
    if (auto s = get("sweep")) spec.variable = parse_sweep_variable(*s);
    else throw std::invalid_argument("sweep spec: missing 'sweep'");
    if (auto s = get("values")) spec.values = parse_list(*s);
    if (spec.values.empty()) {
      spec.values = default_grid(spec.variable);
      spec.default_values = true;
    }
    if (auto s = get("n")) spec.fixed.n1 = spec.fixed.n2 = std::stol(*s);
    if (auto s = get("n1")) spec.fixed.n1 = std::stol(*s);
    if (auto s = get("n2")) spec.fixed.n2 = std::stol(*s);
    if (auto s = get("rank")) spec.fixed.rank = std::stol(*s);
    if (auto s = get("rank_fraction")) spec.rank_fraction = std::stod(*s);
    if (auto s = get("rho_s")) spec.fixed.rho_s = std::stod(*s);
    if (auto s = get("sigma")) spec.fixed.sigma = std::stod(*s);
    if (auto s = get("sparse_amplitude")) spec.fixed.sparse_amplitude = std::stod(*s);
    if (auto s = get("factor_scale")) spec.fixed.factor_scale = std::stod(*s);
    if (auto s = get("trials")) spec.trials = std::stoi(*s);
    if (auto s = get("seed")) spec.base_seed = std::stoull(*s);
    if (auto s = get("base_seed")) spec.base_seed = std::stoull(*s);
    if (auto s = get("run_oracle")) spec.run_oracle = parse_bool(*s);
    if (auto s = get("max_iters")) spec.max_iters = std::stoi(*s);
    if (auto s = get("rel_tol")) spec.rel_tol = std::stod(*s);
    if (auto s = get("threads")) spec.threads = static_cast<unsigned>(std::stoul(*s));
  } catch (const std::logic_error& e) {
    throw std::invalid_argument(std::string("sweep spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

SweepSpec read_sweep_spec(const std::filesystem::path& path) {
  try {
    return parse_sweep_spec(io::read_key_values(path));
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

TrialResult run_trial(const GenConfig& cfg, bool run_oracle, int max_iters, double rel_tol) {
  TrialResult tr;
  tr.seed = cfg.seed;
  const ProblemInstance inst = assemble(cfg);

  SolverConfig scfg = SolverConfig::defaults_for(inst.m, cfg.sigma);
  scfg.max_iters = max_iters;
  scfg.rel_tol = rel_tol;

  const auto start = std::chrono::steady_clock::now();
  const SolveResult sol = solve(inst.m, scfg);
  tr.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const RmsErrors err = rms_errors(inst, sol.l_hat, sol.s_hat);
  tr.completed = sol.converged;
  tr.rms_l = err.rms_l;
  tr.rms_s = err.rms_s;
  tr.pair_error = err.pair_frobenius;
  tr.delta = inst.delta;
  tr.stability_bound = stability_bound(cfg.n1, cfg.n2, inst.delta);
  tr.feasibility_gap = sol.feasibility_gap;
  tr.rel_error_l = relative_error(sol.l_hat, inst.l0);
  tr.rel_error_s = relative_error(sol.s_hat, inst.s0);
  tr.iterations = sol.iterations;

  if (run_oracle) {
    const OracleResult orc = oracle_solve(inst);
    const RmsErrors oerr = rms_errors(inst, orc.l_oracle, orc.s_oracle);
    tr.oracle_ok = orc.ok;
    tr.oracle_rms_l = oerr.rms_l;
    tr.oracle_rms_s = oerr.rms_s;
  }
  return tr;
}

bool SweepOutcome::all_completed() const {
  return std::all_of(records.begin(), records.end(), [](const SweepRecord& r) { return r.completed == r.total; });
}

SweepOutcome run_sweep_detailed(const SweepSpec& spec) {
  spec.validate();
  const std::size_t nv = spec.values.size();
  const auto nt = static_cast<std::size_t>(spec.trials);

  SweepOutcome out;
  out.trials.assign(nv, std::vector<TrialResult>(nt));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < nv * nt; job = next++) {
      const std::size_t v = job / nt, t = job % nt;
      const GenConfig cfg = spec.config_for(v, static_cast<int>(t));
      TrialResult& slot = out.trials[v][t];
      try {
        slot = run_trial(cfg, spec.run_oracle, spec.max_iters, spec.rel_tol);
      } catch (const std::exception& e) {
        slot = TrialResult{};
        slot.seed = cfg.seed;
        slot.error = e.what();
      }
    }
  };
  unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, nv * nt));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t v = 0; v < nv; ++v) {
    const auto& trials = out.trials[v];
    SweepRecord rec;
    rec.value = spec.values[v];
    rec.spcp_rms_l = mean_of(trials, &TrialResult::rms_l);
    rec.spcp_rms_s = mean_of(trials, &TrialResult::rms_s);
    rec.oracle_rms_l = spec.run_oracle ? mean_of(trials, &TrialResult::oracle_rms_l) : nan;
    rec.oracle_rms_s = spec.run_oracle ? mean_of(trials, &TrialResult::oracle_rms_s) : nan;
    rec.feasibility_gap = mean_of(trials, &TrialResult::feasibility_gap);
    double iters = 0.0;
    int ran = 0;
    for (const auto& t : trials) {
      if (t.completed) ++rec.completed;
      if (t.error.empty()) {
        iters += t.iterations;
        ++ran;
      }
    }
    rec.iterations = ran ? iters / ran : nan;
    rec.wall_seconds = mean_of(trials, &TrialResult::wall_seconds);
    rec.total = static_cast<int>(trials.size());
    out.records.push_back(rec);
  }
  return out;
}

std::vector<SweepRecord> run_sweep(const SweepSpec& spec) { return run_sweep_detailed(spec).records; }

void emit_csv(const std::vector<SweepRecord>& records, std::ostream& os) {
  if (records.empty()) throw std::invalid_argument("emit_csv: no records");
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    os << fmt10(r.value) << ',' << fmt10(r.spcp_rms_l) << ',' << fmt10(r.spcp_rms_s) << ',' << fmt10(r.oracle_rms_l)
       << ',' << fmt10(r.oracle_rms_s) << ',' << fmt10(r.feasibility_gap) << ',' << fmt10(r.iterations) << ','
       << fmt10(r.wall_seconds) << ',' << r.completed << ',' << r.total << '\n';
  }
}

void emit_csv(const std::vector<SweepRecord>& records, const std::filesystem::path& path) {
  if (records.empty()) throw std::invalid_argument("emit_csv: no records");
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  emit_csv(records, f);
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::vector<SweepRecord> parse_csv_records(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw std::runtime_error("sweep csv: unexpected header");
  std::vector<SweepRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 10) throw std::runtime_error("sweep csv: expected 10 columns");
    auto num = [](const std::string& s) { return s == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(s); };
    SweepRecord r;
    r.value = num(f[0]);
    r.spcp_rms_l = num(f[1]);
    r.spcp_rms_s = num(f[2]);
    r.oracle_rms_l = num(f[3]);
    r.oracle_rms_s = num(f[4]);
    r.feasibility_gap = num(f[5]);
    r.iterations = num(f[6]);
    r.wall_seconds = num(f[7]);
    r.completed = std::stoi(f[8]);
    r.total = std::stoi(f[9]);
    out.push_back(r);
  }
  return out;
}

std::vector<std::filesystem::path> emit_plot_data(const std::vector<SweepRecord>& records,
                                                  const std::filesystem::path& dir, bool render_svg,
                                                  const std::string& x_label) {
  if (records.empty()) throw std::invalid_argument("emit_plot_data: no records");
  std::filesystem::create_directories(dir);
  const bool with_oracle = std::any_of(records.begin(), records.end(), [](const SweepRecord& r) {
    return !std::isnan(r.oracle_rms_l) || !std::isnan(r.oracle_rms_s);
  });

  std::vector<std::pair<std::string, double SweepRecord::*>> series = {{"spcp_L.dat", &SweepRecord::spcp_rms_l},
                                                                       {"spcp_S.dat", &SweepRecord::spcp_rms_s}};
  if (with_oracle) {
    series.emplace_back("oracle_L.dat", &SweepRecord::oracle_rms_l);
    series.emplace_back("oracle_S.dat", &SweepRecord::oracle_rms_s);
  }

  std::vector<std::filesystem::path> written;
  for (const auto& [name, field] : series) {
    const auto path = dir / name;
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    f << "# " << x_label << " rms\n";
    for (const auto& r : records) f << io::format_double(r.value) << ' ' << io::format_double(r.*field) << '\n';
    if (!f) throw std::runtime_error("write failed: " + path.string());
    written.push_back(path);
  }
  if (render_svg) write_svg(records, dir / "chart.svg", with_oracle, x_label);
  return written;
}

}  // namespace spcp
