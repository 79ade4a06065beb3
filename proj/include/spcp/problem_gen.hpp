#pragma once

#include "spcp/matrix_core.hpp"

#include <cstdint>
#include <filesystem>
#include <random>

namespace spcp {

/// Seeded random source. Streams are derived from a 64-bit seed with
/// SplitMix64 so that each component draws from an independent mt19937_64.
///
/// uniform() maps the top 53 bits of a draw to [0, 1). normal() uses the
/// Box-Muller transform on (1 - u1, u2), emitting the cosine branch first
/// and caching the sine branch for the next call.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, double stddev = 1.0);

  /// Seed of substream `stream` of `seed`.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

enum class Stream : std::uint64_t { low_rank = 1, sparse = 2, noise = 3 };

inline Rng stream_rng(std::uint64_t seed, Stream s, std::uint64_t attempt = 0) {
  return Rng(Rng::derive(seed, static_cast<std::uint64_t>(s) + 16 * attempt));
}

struct GenConfig {
  Eigen::Index n1 = 200;
  Eigen::Index n2 = 200;
  Eigen::Index rank = 10;
  double rho_s = 0.2;
  double sigma = 0.1;
  double sparse_amplitude = 5.0;
  /// Variance of the low-rank factor entries is factor_scale * sigma / sqrt(min(n1, n2)).
  double factor_scale = 10.0;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;
  /// Standard deviation of the entries of U and V in L0 = U V^T.
  double factor_stddev() const;
};

struct ProblemInstance {
  Matrix l0;
  Matrix s0;
  Matrix z0;
  Matrix m;
  SupportOmega omega;
  SubspaceT t;
  GenConfig config;
  double delta = 0.0;  ///< |Z0|_F
};

Matrix gen_low_rank(const GenConfig& cfg, Rng& rng);
struct SparsePart {
  Matrix s;
  SupportOmega omega;
};
SparsePart gen_sparse(const GenConfig& cfg, Rng& rng);
Matrix gen_noise(const GenConfig& cfg, Rng& rng);

/// Deterministic in cfg. Retries the low-rank draw on a fresh substream if
/// the sampled L0 has rank below cfg.rank.
ProblemInstance assemble(const GenConfig& cfg);

/// Instance directory: l0/s0/z0/m/omega/u/v as binary matrices plus manifest.txt.
void write_instance(const std::filesystem::path& dir, const ProblemInstance& inst);
ProblemInstance read_instance(const std::filesystem::path& dir);

}  // namespace spcp
