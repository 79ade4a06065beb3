#include "spcp/problem_gen.hpp"

#include "spcp/matrix_io.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spcp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr int kMaxLowRankAttempts = 8;

template <typename T>
T parse_number(const io::KeyValues& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw std::runtime_error("manifest: missing key '" + key + "'");
  if constexpr (std::is_same_v<T, double>) return std::stod(it->second);
  else return static_cast<T>(std::stoull(it->second));
}

}  // namespace

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

Matrix Rng::normal_matrix(Eigen::Index rows, Eigen::Index cols, double stddev) {
  Matrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = stddev * normal();
  return a;
}

void GenConfig::validate() const {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("GenConfig: dimensions must be positive");
  if (rank < 1 || rank > std::min(n1, n2)) throw std::invalid_argument("GenConfig: rank must be in [1, min(n1, n2)]");
  if (!(rho_s >= 0.0 && rho_s <= 1.0)) throw std::invalid_argument("GenConfig: rho_s must be in [0, 1]");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("GenConfig: sigma must be >= 0");
  if (!(sparse_amplitude > 0.0)) throw std::invalid_argument("GenConfig: sparse_amplitude must be > 0");
  if (!(factor_scale > 0.0)) throw std::invalid_argument("GenConfig: factor_scale must be > 0");
}

double GenConfig::factor_stddev() const {
  const double n_small = static_cast<double>(std::min(n1, n2));
  // sigma = 0 would give a zero L0; fall back to unit-scale factors.
  if (sigma == 0.0) return 1.0 / std::sqrt(n_small);
  return std::sqrt(factor_scale * sigma / std::sqrt(n_small));
}

Matrix gen_low_rank(const GenConfig& cfg, Rng& rng) {
  cfg.validate();
  const double sd = cfg.factor_stddev();
  const Matrix u = rng.normal_matrix(cfg.n1, cfg.rank, sd);
  const Matrix v = rng.normal_matrix(cfg.n2, cfg.rank, sd);
  return u * v.transpose();
}

SparsePart gen_sparse(const GenConfig& cfg, Rng& rng) {
  cfg.validate();
  SparsePart out{Matrix::Zero(cfg.n1, cfg.n2), SupportOmega(cfg.n1, cfg.n2)};
  const double amp = cfg.sparse_amplitude;
  for (Eigen::Index i = 0; i < cfg.n1; ++i) {
    for (Eigen::Index j = 0; j < cfg.n2; ++j) {
      if (rng.uniform() < cfg.rho_s) {
        out.s(i, j) = rng.uniform(-amp, amp);
        out.omega.insert(i, j);
      }
    }
  }
  return out;
}

Matrix gen_noise(const GenConfig& cfg, Rng& rng) {
  cfg.validate();
  if (cfg.sigma == 0.0) return Matrix::Zero(cfg.n1, cfg.n2);
  return rng.normal_matrix(cfg.n1, cfg.n2, cfg.sigma);
}

ProblemInstance assemble(const GenConfig& cfg) {
  cfg.validate();
  ProblemInstance inst;
  inst.config = cfg;

  SvdFactors factors;
  for (int attempt = 0;; ++attempt) {
    if (attempt == kMaxLowRankAttempts) throw std::runtime_error("assemble: could not draw a full-rank L0");
    Rng rng = stream_rng(cfg.seed, Stream::low_rank, static_cast<std::uint64_t>(attempt));
    inst.l0 = gen_low_rank(cfg, rng);
    factors = svd(inst.l0);
    if (factors.rank() == cfg.rank) break;
  }
  inst.t = SubspaceT::from_svd(factors);

  Rng sparse_rng = stream_rng(cfg.seed, Stream::sparse);
  auto sparse = gen_sparse(cfg, sparse_rng);
  inst.s0 = std::move(sparse.s);
  inst.omega = std::move(sparse.omega);

  Rng noise_rng = stream_rng(cfg.seed, Stream::noise);
  inst.z0 = gen_noise(cfg, noise_rng);
  inst.delta = inst.z0.norm();
  inst.m = inst.l0 + inst.s0 + inst.z0;
  return inst;
}

void write_instance(const std::filesystem::path& dir, const ProblemInstance& inst) {
  std::filesystem::create_directories(dir);
  io::write_binary(dir / "l0.bin", inst.l0);
  io::write_binary(dir / "s0.bin", inst.s0);
  io::write_binary(dir / "z0.bin", inst.z0);
  io::write_binary(dir / "m.bin", inst.m);
  io::write_binary(dir / "omega.bin", inst.omega.mask());
  io::write_binary(dir / "u.bin", inst.t.u());
  io::write_binary(dir / "v.bin", inst.t.v());

  const GenConfig& c = inst.config;
  io::KeyValues kv;
  kv["n1"] = std::to_string(c.n1);
  kv["n2"] = std::to_string(c.n2);
  kv["rank"] = std::to_string(c.rank);
  kv["rho_s"] = io::format_double(c.rho_s);
  kv["sigma"] = io::format_double(c.sigma);
  kv["sparse_amplitude"] = io::format_double(c.sparse_amplitude);
  kv["factor_scale"] = io::format_double(c.factor_scale);
  kv["seed"] = std::to_string(c.seed);
  kv["delta"] = io::format_double(inst.delta);
  kv["omega_size"] = std::to_string(inst.omega.size());
  kv["l0_rank"] = std::to_string(inst.t.rank());
  io::write_key_values(dir / "manifest.txt", kv);
}

ProblemInstance read_instance(const std::filesystem::path& dir) {
  const auto kv = io::read_key_values(dir / "manifest.txt");
  ProblemInstance inst;
  GenConfig& c = inst.config;
  c.n1 = parse_number<Eigen::Index>(kv, "n1");
  c.n2 = parse_number<Eigen::Index>(kv, "n2");
  c.rank = parse_number<Eigen::Index>(kv, "rank");
  c.rho_s = parse_number<double>(kv, "rho_s");
  c.sigma = parse_number<double>(kv, "sigma");
  c.sparse_amplitude = parse_number<double>(kv, "sparse_amplitude");
  c.factor_scale = parse_number<double>(kv, "factor_scale");
  c.seed = parse_number<std::uint64_t>(kv, "seed");
  c.validate();

  inst.l0 = io::read_binary(dir / "l0.bin");
  inst.s0 = io::read_binary(dir / "s0.bin");
  inst.z0 = io::read_binary(dir / "z0.bin");
  inst.m = io::read_binary(dir / "m.bin");
  const Matrix mask = io::read_binary(dir / "omega.bin");
  inst.t = SubspaceT(io::read_binary(dir / "u.bin"), io::read_binary(dir / "v.bin"));
  inst.delta = parse_number<double>(kv, "delta");

  for (const Matrix* a : std::initializer_list<const Matrix*>{&inst.l0, &inst.s0, &inst.z0, &inst.m, &mask}) {
    if (a->rows() != c.n1 || a->cols() != c.n2) throw std::runtime_error(dir.string() + ": matrix shape disagrees with manifest");
  }
  if (inst.t.rows() != c.n1 || inst.t.cols() != c.n2) throw std::runtime_error(dir.string() + ": subspace shape disagrees with manifest");
  inst.omega = SupportOmega::nonzeros_of(mask);
  return inst;
}

}  // namespace spcp
