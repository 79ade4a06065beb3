#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

namespace spcp {

/// Dense real matrix. Column-major storage; logical order for I/O is row-major.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Throws std::invalid_argument naming `what` if any entry is NaN or Inf.
void require_finite(const Matrix& a, std::string_view what);

/// Compact SVD a = U diag(s) V^T, truncated to the numerical rank.
///
/// Column signs are fixed so that the largest-magnitude entry of every
/// column of U is nonnegative.
struct SvdFactors {
  Matrix u;
  Vector singular_values;
  Matrix v;

  Eigen::Index rank() const { return singular_values.size(); }
  Matrix reconstruct() const;
};

constexpr double kDefaultRankTol = 1e-10;

/// Singular values below rank_tol * sigma_max are dropped.
SvdFactors svd(const Matrix& a, double rank_tol = kDefaultRankTol);

struct MatrixNorms {
  double nuclear = 0.0;
  double frobenius = 0.0;
  double spectral = 0.0;
  double l1 = 0.0;
  double linf = 0.0;
};

MatrixNorms norms(const Matrix& a);

double nuclear_norm(const Matrix& a);
double spectral_norm(const Matrix& a);
double l1_norm(const Matrix& a);
double linf_norm(const Matrix& a);

/// Entrywise soft threshold sgn(x) max(|x| - tau, 0); prox of tau*||.||_1.
Matrix shrink(const Matrix& a, double tau);

/// Singular value thresholding; prox of tau*||.||_*.
Matrix svt(const Matrix& a, double tau);

/// svt() that also reports the nuclear norm of its result (sum of the
/// thresholded singular values) and the number of values kept.
struct SvtResult {
  Matrix value;
  double nuclear = 0.0;
  Eigen::Index rank = 0;
};
SvtResult svt_with_norm(const Matrix& a, double tau);

/// The tangent space T = { U Q^T + R V^T } of a rank-r matrix.
class SubspaceT {
 public:
  SubspaceT() = default;
  /// u: n1 x r and v: n2 x r with orthonormal columns (checked to 1e-8).
  SubspaceT(Matrix u, Matrix v);
  static SubspaceT from_svd(const SvdFactors& f) { return SubspaceT(f.u, f.v); }

  const Matrix& u() const { return u_; }
  const Matrix& v() const { return v_; }
  Eigen::Index rank() const { return u_.cols(); }
  Eigen::Index rows() const { return u_.rows(); }
  Eigen::Index cols() const { return v_.rows(); }

 private:
  Matrix u_;
  Matrix v_;
};

/// Index set of a sparse support, stored as a dense 0/1 mask.
class SupportOmega {
 public:
  SupportOmega() = default;
  SupportOmega(Eigen::Index rows, Eigen::Index cols);
  /// Every nonzero of `a` is in the support.
  static SupportOmega nonzeros_of(const Matrix& a);
  static SupportOmega from_indices(Eigen::Index rows, Eigen::Index cols,
                                   const std::vector<std::pair<Eigen::Index, Eigen::Index>>& idx);

  void insert(Eigen::Index i, Eigen::Index j);
  bool contains(Eigen::Index i, Eigen::Index j) const { return mask_(i, j) != 0; }
  std::size_t size() const { return count_; }
  Eigen::Index rows() const { return mask_.rows(); }
  Eigen::Index cols() const { return mask_.cols(); }

  /// 1.0 on the support, 0.0 elsewhere.
  const Matrix& mask() const { return mask_; }
  SupportOmega complement() const;

 private:
  Matrix mask_;
  std::size_t count_ = 0;
};

struct MatrixPair {
  Matrix l;
  Matrix s;

  MatrixPair() = default;
  MatrixPair(Matrix l_, Matrix s_);
};

/// P_T A = U U^T A + A V V^T - U U^T A V V^T.
Matrix project_t(const Matrix& a, const SubspaceT& t);
/// P_{T-perp} A = A - P_T A.
Matrix project_t_perp(const Matrix& a, const SubspaceT& t);
Matrix project_omega(const Matrix& a, const SupportOmega& om);
Matrix project_omega_perp(const Matrix& a, const SupportOmega& om);

/// Projection onto the diagonal pairs {(Q, Q)}: ((L+S)/2, (L+S)/2).
MatrixPair project_gamma(const MatrixPair& x);
/// Projection onto the anti-diagonal pairs {(Q, -Q)}: ((L-S)/2, (S-L)/2).
MatrixPair project_gamma_perp(const MatrixPair& x);

struct PairNorms {
  double frobenius = 0.0;
  double diamond = 0.0;
};

/// frobenius = sqrt(|L|_F^2 + |S|_F^2), diamond = |L|_* + lambda |S|_1.
PairNorms pair_norms(const MatrixPair& x, double lambda);

/// Trace inner product <A, B> = sum a_ij b_ij.
inline double inner(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

}  // namespace spcp
