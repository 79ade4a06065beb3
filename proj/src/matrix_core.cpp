#include "spcp/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spcp {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) +
                                "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                "x" + std::to_string(b.cols()) + ")");
  }
}

bool has_orthonormal_columns(const Matrix& q, double tol) {
  if (q.cols() == 0) return true;
  const Matrix gram = q.transpose() * q;
  return (gram - Matrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff() <= tol;
}

Eigen::BDCSVD<Matrix> thin_svd(const Matrix& a) {
  return Eigen::BDCSVD<Matrix>(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

}  // namespace

void require_finite(const Matrix& a, std::string_view what) {
  if (!a.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": matrix has non-finite entries");
  }
}

Matrix SvdFactors::reconstruct() const {
  if (rank() == 0) return Matrix::Zero(u.rows(), v.rows());
  return u * singular_values.asDiagonal() * v.transpose();
}

SvdFactors svd(const Matrix& a, double rank_tol) {
  SvdFactors out;
  if (a.size() == 0) {
    out.u.resize(a.rows(), 0);
    out.v.resize(a.cols(), 0);
    return out;
  }
  const auto dec = thin_svd(a);
  const Vector& s = dec.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  Eigen::Index r = 0;
  if (smax > 0.0) {
    const double cut = rank_tol * smax;
    while (r < s.size() && s(r) > cut) ++r;
  }
  out.u = dec.matrixU().leftCols(r);
  out.v = dec.matrixV().leftCols(r);
  out.singular_values = s.head(r);

  for (Eigen::Index k = 0; k < r; ++k) {
    Eigen::Index imax = 0;
    out.u.col(k).cwiseAbs().maxCoeff(&imax);
    if (out.u(imax, k) < 0.0) {
      out.u.col(k) *= -1.0;
      out.v.col(k) *= -1.0;
    }
  }
  return out;
}

double nuclear_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return thin_svd(a).singularValues().sum();
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  const auto dec = Eigen::BDCSVD<Matrix>(a);
  return dec.singularValues().size() > 0 ? dec.singularValues()(0) : 0.0;
}

double l1_norm(const Matrix& a) { return a.cwiseAbs().sum(); }

double linf_norm(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

MatrixNorms norms(const Matrix& a) {
  MatrixNorms n;
  if (a.size() == 0) return n;
  const Vector s = Eigen::BDCSVD<Matrix>(a).singularValues();
  n.nuclear = s.sum();
  n.spectral = s.size() > 0 ? s(0) : 0.0;
  n.frobenius = a.norm();
  n.l1 = l1_norm(a);
  n.linf = linf_norm(a);
  return n;
}

Matrix shrink(const Matrix& a, double tau) {
  if (tau < 0.0) throw std::invalid_argument("shrink: negative threshold");
  return a.unaryExpr([tau](double x) {
    const double m = std::abs(x) - tau;
    return m > 0.0 ? std::copysign(m, x) : 0.0;
  });
}

SvtResult svt_with_norm(const Matrix& a, double tau) {
  if (tau < 0.0) throw std::invalid_argument("svt: negative threshold");
  SvtResult out;
  if (a.size() == 0) {
    out.value = a;
    return out;
  }
  const auto dec = thin_svd(a);
  const Vector& s = dec.singularValues();
  Eigen::Index keep = 0;
  while (keep < s.size() && s(keep) > tau) ++keep;
  const Vector kept = (s.head(keep).array() - tau).matrix();
  out.value = dec.matrixU().leftCols(keep) * kept.asDiagonal() * dec.matrixV().leftCols(keep).transpose();
  out.nuclear = kept.sum();
  out.rank = keep;
  return out;
}

Matrix svt(const Matrix& a, double tau) { return svt_with_norm(a, tau).value; }

SubspaceT::SubspaceT(Matrix u, Matrix v) : u_(std::move(u)), v_(std::move(v)) {
  if (u_.cols() != v_.cols()) throw std::invalid_argument("SubspaceT: U and V rank differ");
  if (u_.cols() > std::min(u_.rows(), v_.rows())) throw std::invalid_argument("SubspaceT: rank exceeds dimensions");
  if (!has_orthonormal_columns(u_, 1e-8) || !has_orthonormal_columns(v_, 1e-8)) {
    throw std::invalid_argument("SubspaceT: factors must have orthonormal columns");
  }
}

SupportOmega::SupportOmega(Eigen::Index rows, Eigen::Index cols) : mask_(Matrix::Zero(rows, cols)) {}

SupportOmega SupportOmega::nonzeros_of(const Matrix& a) {
  SupportOmega om(a.rows(), a.cols());
  om.mask_ = (a.array() != 0.0).cast<double>().matrix();
  om.count_ = static_cast<std::size_t>(om.mask_.sum());
  return om;
}

SupportOmega SupportOmega::from_indices(Eigen::Index rows, Eigen::Index cols,
                                        const std::vector<std::pair<Eigen::Index, Eigen::Index>>& idx) {
  SupportOmega om(rows, cols);
  for (const auto& [i, j] : idx) om.insert(i, j);
  return om;
}

void SupportOmega::insert(Eigen::Index i, Eigen::Index j) {
  if (i < 0 || j < 0 || i >= rows() || j >= cols()) throw std::out_of_range("SupportOmega: index out of bounds");
  if (mask_(i, j) == 0.0) {
    mask_(i, j) = 1.0;
    ++count_;
  }
}

SupportOmega SupportOmega::complement() const {
  SupportOmega om(rows(), cols());
  om.mask_ = (1.0 - mask_.array()).matrix();
  om.count_ = static_cast<std::size_t>(rows() * cols()) - count_;
  return om;
}

MatrixPair::MatrixPair(Matrix l_, Matrix s_) : l(std::move(l_)), s(std::move(s_)) {
  require_same_shape(l, s, "MatrixPair");
}

Matrix project_t(const Matrix& a, const SubspaceT& t) {
  if (a.rows() != t.rows() || a.cols() != t.cols()) throw std::invalid_argument("project_t: shape mismatch");
  if (t.rank() == 0) return Matrix::Zero(a.rows(), a.cols());
  const Matrix& u = t.u();
  const Matrix& v = t.v();
  const Matrix uta = u.transpose() * a;   // r x n2
  const Matrix av = a * v;                // n1 x r
  const Matrix utav = uta * v;            // r x r
  return u * uta + av * v.transpose() - u * (utav * v.transpose());
}

Matrix project_t_perp(const Matrix& a, const SubspaceT& t) { return a - project_t(a, t); }

Matrix project_omega(const Matrix& a, const SupportOmega& om) {
  require_same_shape(a, om.mask(), "project_omega");
  return a.cwiseProduct(om.mask());
}

Matrix project_omega_perp(const Matrix& a, const SupportOmega& om) {
  require_same_shape(a, om.mask(), "project_omega_perp");
  return a.array() * (1.0 - om.mask().array());
}

MatrixPair project_gamma(const MatrixPair& x) {
  require_same_shape(x.l, x.s, "project_gamma");
  Matrix avg = 0.5 * (x.l + x.s);
  return MatrixPair(avg, avg);
}

MatrixPair project_gamma_perp(const MatrixPair& x) {
  require_same_shape(x.l, x.s, "project_gamma_perp");
  Matrix half = 0.5 * (x.l - x.s);
  return MatrixPair(half, -half);
}

PairNorms pair_norms(const MatrixPair& x, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("pair_norms: lambda must be positive");
  PairNorms p;
  p.frobenius = std::sqrt(x.l.squaredNorm() + x.s.squaredNorm());
  p.diamond = nuclear_norm(x.l) + lambda * l1_norm(x.s);
  return p;
}

}  // namespace spcp
