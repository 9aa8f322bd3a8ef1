#include "fusionkit/numkit.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <string>

namespace fusionkit {

namespace {

Eigen::JacobiSVD<Mat> thin_svd(const Mat& a) {
  return Eigen::JacobiSVD<Mat>(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

Eigen::Index rank_from_singular_values(const Vec& sv, double rank_tol) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cut = rank_tol * sv(0);
  return static_cast<Eigen::Index>(std::count_if(sv.begin(), sv.end(), [cut](double s) { return s > cut; }));
}

}  // namespace

void require_finite(const Mat& m, std::string_view what) {
  if (!m.allFinite()) throw Error(ErrorKind::NotFinite, std::string(what) + " has non-finite entries");
}

void require_finite(const Vec& v, std::string_view what) {
  if (!v.allFinite()) throw Error(ErrorKind::NotFinite, std::string(what) + " has non-finite entries");
}

Mat orthonormalize(const Mat& vectors, double rank_tol) {
  if (vectors.cols() == 0 || vectors.rows() == 0) throw Error(ErrorKind::AllZero, "no vectors to orthonormalize");
  if (!(rank_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "rank_tol must be positive");
  require_finite(vectors, "vectors");
  if (vectors.colwise().norm().maxCoeff() <= rank_tol) throw Error(ErrorKind::AllZero, "every column is numerically zero");

  const auto svd = thin_svd(vectors);
  const Eigen::Index r = rank_from_singular_values(svd.singularValues(), rank_tol);
  Mat u = svd.matrixU().leftCols(r);
  // Fix the sign ambiguity: largest-magnitude entry of every column positive.
  for (Eigen::Index j = 0; j < r; ++j) {
    Eigen::Index imax = 0;
    u.col(j).cwiseAbs().maxCoeff(&imax);
    if (u(imax, j) < 0.0) u.col(j) *= -1.0;
  }
  return u;
}

Eigen::Index numerical_rank(const Mat& a, double rank_tol) {
  if (a.size() == 0) return 0;
  return rank_from_singular_values(thin_svd(a).singularValues(), rank_tol);
}

bool is_symmetric(const Mat& s, double rel_tol) {
  if (s.rows() != s.cols()) return false;
  const double scale = std::max(s.norm(), 1.0);
  return (s - s.transpose()).norm() <= rel_tol * scale;
}

Spectrum sym_eig(const Mat& s) {
  require_finite(s, "matrix");
  if (!is_symmetric(s)) throw Error(ErrorKind::NotSymmetric, "matrix is not symmetric");
  const Mat sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NotSymmetric, "eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

double operator_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Mat>(a).singularValues()(0);
}

double smallest_nonzero_singular_value(const Mat& a, double rank_tol) {
  if (a.size() == 0) return 0.0;
  const Vec sv = Eigen::JacobiSVD<Mat>(a).singularValues();
  const Eigen::Index r = rank_from_singular_values(sv, rank_tol);
  return r == 0 ? 0.0 : sv(r - 1);
}

Mat pseudo_inverse(const Mat& a, double rank_tol) {
  const auto svd = thin_svd(a);
  const Eigen::Index r = rank_from_singular_values(svd.singularValues(), rank_tol);
  const Vec inv = svd.singularValues().head(r).cwiseInverse();
  return svd.matrixV().leftCols(r) * inv.asDiagonal() * svd.matrixU().leftCols(r).transpose();
}

SpdSolver::SpdSolver(const Mat& s) : s_(s) {
  const Spectrum sp = sym_eig(s);
  if (!(sp.max() > 0.0) || !(sp.min() > 1e-12 * sp.max())) {
    throw Error(ErrorKind::NotPD, "smallest eigenvalue " + std::to_string(sp.min()) + " vs largest " +
                                      std::to_string(sp.max()));
  }
  s_ = 0.5 * (s + s.transpose());
  llt_.compute(s_);
  if (llt_.info() != Eigen::Success) throw Error(ErrorKind::NotPD, "Cholesky factorization failed");
}

Vec SpdSolver::solve(const Vec& b) const {
  if (b.size() != s_.rows()) throw Error(ErrorKind::DimMismatch, "right-hand side length");
  Vec x = llt_.solve(b);
  // One step of iterative refinement.
  x += llt_.solve(b - s_ * x);
  return x;
}

Mat SpdSolver::solve(const Mat& b) const {
  if (b.rows() != s_.rows()) throw Error(ErrorKind::DimMismatch, "right-hand side rows");
  Mat x = llt_.solve(b);
  x += llt_.solve(b - s_ * x);
  return x;
}

Vec solve_spd(const Mat& s, const Vec& b) {
  return SpdSolver(s).solve(b);
}

}  // namespace fusionkit
