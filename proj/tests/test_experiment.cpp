#include "spcp/experiment.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace spcp;

namespace {

SweepSpec small_spec() {
  SweepSpec spec;
  spec.variable = SweepVariable::sigma;
  spec.values = {0.05, 0.1};
  spec.fixed.n1 = spec.fixed.n2 = 30;
  spec.fixed.rank = 2;
  spec.fixed.rho_s = 0.1;
  spec.trials = 3;
  spec.base_seed = 17;
  return spec;
}

std::string csv_of(const std::vector<SweepRecord>& recs) {
  std::ostringstream os;
  emit_csv(recs, os);
  return os.str();
}

std::string csv_without_wall_time(std::vector<SweepRecord> recs) {
  for (auto& r : recs) r.wall_seconds = 0.0;
  return csv_of(recs);
}

std::filesystem::path fresh_dir(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("sweep spec parsing") {
  std::stringstream in(
      "sweep = n_with_proportional_rank\n"
      "values = 40, 60\n"
      "rank_fraction = 0.1\n"
      "rho_s = 0.1\n"
      "sigma = 0.1\n"
      "trials = 4\n"
      "base_seed = 9\n"
      "run_oracle = false\n");
  const SweepSpec spec = parse_sweep_spec(io::parse_key_values(in));
  CHECK(spec.variable == SweepVariable::n_with_proportional_rank);
  CHECK(spec.values == std::vector<double>{40, 60});
  CHECK(spec.trials == 4);
  CHECK(spec.base_seed == 9);
  CHECK_FALSE(spec.run_oracle);
  CHECK_FALSE(spec.default_values);
  const GenConfig c = spec.config_for(1, 2);
  CHECK(c.n1 == 60);
  CHECK(c.n2 == 60);
  CHECK(c.rank == 6);
  CHECK(c.rho_s == 0.1);

  std::stringstream defaults("sweep = rho_s\n");
  const SweepSpec d = parse_sweep_spec(io::parse_key_values(defaults));
  CHECK(d.default_values);
  CHECK(d.values == default_grid(SweepVariable::rho_s));
  CHECK(d.trials == 20);
}

TEST_CASE("invalid sweep specs are rejected") {
  auto parse = [](const std::string& text) {
    std::stringstream in(text);
    return parse_sweep_spec(io::parse_key_values(in));
  };
  CHECK_THROWS(parse("values = 1,2\n"));
  CHECK_THROWS(parse("sweep = temperature\n"));
  CHECK_THROWS(parse("sweep = sigma\nvalues = 0.2, 0.1\n"));
  CHECK_THROWS(parse("sweep = sigma\nvalues = 0.1, 0.1\n"));
  CHECK_THROWS(parse("sweep = sigma\ntrials = 0\n"));
  CHECK_THROWS(parse("sweep = sigma\nbogus = 1\n"));
  CHECK_THROWS(parse("sweep = n\nvalues = 10.5\n"));
  CHECK_THROWS(parse("sweep = sigma\nrun_oracle = maybe\n"));
}

TEST_CASE("sweep is deterministic and seeds are isolated per trial") {
  SweepSpec spec = small_spec();
  const SweepOutcome a = run_sweep_detailed(spec);
  const SweepOutcome b = run_sweep_detailed(spec);
  // wall time is excluded from the determinism guarantee
  CHECK(csv_without_wall_time(a.records) == csv_without_wall_time(b.records));
  for (std::size_t v = 0; v < a.records.size(); ++v) {
    CHECK(a.records[v].spcp_rms_l == b.records[v].spcp_rms_l);
    CHECK(a.records[v].oracle_rms_s == b.records[v].oracle_rms_s);
    CHECK(a.records[v].iterations == b.records[v].iterations);
  }
  CHECK(a.all_completed());
  CHECK(a.records.size() == 2);
  CHECK(a.records[0].total == 3);

  spec.trials = 5;
  const SweepOutcome more = run_sweep_detailed(spec);
  for (std::size_t v = 0; v < 2; ++v) {
    for (std::size_t t = 0; t < 3; ++t) {
      CHECK(more.trials[v][t].seed == a.trials[v][t].seed);
      CHECK(more.trials[v][t].rms_l == a.trials[v][t].rms_l);
      CHECK(more.trials[v][t].rms_s == a.trials[v][t].rms_s);
    }
  }

  spec.trials = 3;
  spec.threads = 3;
  const SweepOutcome threaded = run_sweep_detailed(spec);
  for (std::size_t v = 0; v < 2; ++v) CHECK(threaded.records[v].spcp_rms_l == a.records[v].spcp_rms_l);
}

TEST_CASE("records average the per-trial values") {
  const SweepOutcome out = run_sweep_detailed(small_spec());
  for (std::size_t v = 0; v < out.records.size(); ++v) {
    double sum = 0.0;
    for (const auto& t : out.trials[v]) sum += t.rms_l;
    CHECK(out.records[v].spcp_rms_l == doctest::Approx(sum / 3.0));
    CHECK(out.records[v].oracle_rms_l < out.records[v].spcp_rms_l);
    for (const auto& t : out.trials[v]) CHECK(t.oracle_ok);
  }
}

TEST_CASE("non-converged trials are counted, not dropped") {
  SweepSpec spec = small_spec();
  spec.max_iters = 2;
  const SweepOutcome out = run_sweep_detailed(spec);
  CHECK_FALSE(out.all_completed());
  for (const auto& r : out.records) {
    CHECK(r.total == 3);
    CHECK(r.completed == 0);
    CHECK(std::isfinite(r.spcp_rms_l));
  }
}

TEST_CASE("csv emission and parse-back") {
  SweepRecord r;
  r.value = 0.1;
  r.spcp_rms_l = 0.0123456789012;
  r.spcp_rms_s = 1.0 / 3.0;
  r.oracle_rms_l = std::nan("");
  r.oracle_rms_s = std::nan("");
  r.feasibility_gap = 12.5;
  r.iterations = 147.25;
  r.wall_seconds = 0.75;
  r.completed = 20;
  r.total = 20;

  const std::string one = csv_of({r});
  CHECK(std::count(one.begin(), one.end(), '\n') == 2);
  CHECK_THROWS_AS(csv_of({}), std::invalid_argument);

  const SweepOutcome out = run_sweep_detailed(small_spec());
  std::stringstream ss(csv_of(out.records));
  const auto back = parse_csv_records(ss);
  REQUIRE(back.size() == out.records.size());
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(close(back[i].value, out.records[i].value));
    CHECK(close(back[i].spcp_rms_l, out.records[i].spcp_rms_l));
    CHECK(close(back[i].spcp_rms_s, out.records[i].spcp_rms_s));
    CHECK(close(back[i].oracle_rms_l, out.records[i].oracle_rms_l));
    CHECK(close(back[i].feasibility_gap, out.records[i].feasibility_gap));
    CHECK(close(back[i].iterations, out.records[i].iterations));
    CHECK(back[i].completed == out.records[i].completed);
    CHECK(back[i].total == out.records[i].total);
  }

  const auto dir = fresh_dir("spcp_test_csv");
  std::filesystem::create_directories(dir);
  emit_csv(out.records, dir / "s.csv");
  std::ifstream f(dir / "s.csv");
  CHECK(parse_csv_records(f).size() == 2);
  CHECK_THROWS(emit_csv(out.records, dir / "no_such_dir" / "s.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("plot data series") {
  SweepSpec spec = small_spec();
  const auto with_oracle = run_sweep(spec);
  const auto dir = fresh_dir("spcp_test_plot");
  const auto files = emit_plot_data(with_oracle, dir, true, "sigma");
  CHECK(files.size() == 4);
  CHECK(std::filesystem::exists(dir / "chart.svg"));
  for (const auto& p : files) {
    std::ifstream f(p);
    std::string header;
    std::getline(f, header);
    std::vector<double> xs;
    double x, y;
    while (f >> x >> y) xs.push_back(x);
    CHECK(xs == spec.values);
  }

  spec.run_oracle = false;
  const auto dir2 = fresh_dir("spcp_test_plot2");
  CHECK(emit_plot_data(run_sweep(spec), dir2).size() == 2);
  CHECK_FALSE(std::filesystem::exists(dir2 / "chart.svg"));
  CHECK_THROWS_AS(emit_plot_data({}, dir2), std::invalid_argument);
  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(dir2);
}
