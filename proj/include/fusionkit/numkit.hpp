#pragma once

// Dense linear-algebra substrate. Matrices are Eigen column-major doubles;
// frames and subspace bases store their vectors as columns.

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "fusionkit/error.hpp"

namespace fusionkit {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline constexpr double kDefaultRankTol = 1e-10;

/// Eigenvalues ascending; eigenvectors are the matching orthonormal columns.
struct Spectrum {
  Vec eigenvalues;
  Mat eigenvectors;

  [[nodiscard]] double min() const { return eigenvalues(0); }
  [[nodiscard]] double max() const { return eigenvalues(eigenvalues.size() - 1); }
};

void require_finite(const Mat& m, std::string_view what);
void require_finite(const Vec& v, std::string_view what);

/// Orthonormal basis of the column space. The column count equals the
/// numerical rank: singular values above rank_tol times the largest.
Mat orthonormalize(const Mat& vectors, double rank_tol = kDefaultRankTol);

/// Number of singular values above rank_tol * sigma_max.
Eigen::Index numerical_rank(const Mat& a, double rank_tol = kDefaultRankTol);

bool is_symmetric(const Mat& s, double rel_tol = 1e-10);

Spectrum sym_eig(const Mat& s);

/// Largest singular value.
double operator_norm(const Mat& a);

/// Smallest singular value among those counted by numerical_rank; 0 for a
/// zero matrix.
double smallest_nonzero_singular_value(const Mat& a, double rank_tol = kDefaultRankTol);

/// Moore-Penrose pseudo-inverse with the numerical-rank cut.
Mat pseudo_inverse(const Mat& a, double rank_tol = kDefaultRankTol);

/// Cholesky factorization of a symmetric positive definite matrix, reused
/// across right-hand sides.
class SpdSolver {
public:
  explicit SpdSolver(const Mat& s);

  [[nodiscard]] Vec solve(const Vec& b) const;
  [[nodiscard]] Mat solve(const Mat& b) const;

  [[nodiscard]] Eigen::Index dim() const { return s_.rows(); }

private:
  Mat s_;
  Eigen::LLT<Mat> llt_;
};

Vec solve_spd(const Mat& s, const Vec& b);

}  // namespace fusionkit
