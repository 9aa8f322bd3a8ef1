#pragma once

#include <optional>
#include <string>
#include <utility>

#include "fusionkit/numkit.hpp"

namespace fusionkit {

/// A finite family of vectors in R^M, stored as the columns of an M x n
/// matrix. The family need not span R^M: a frame sequence is a frame for
/// its own span, which is how local frames of subspaces are represented.
class Frame {
public:
  explicit Frame(Mat vectors, std::optional<std::string> label = std::nullopt);

  [[nodiscard]] Eigen::Index ambient_dim() const { return vectors_.rows(); }
  [[nodiscard]] Eigen::Index size() const { return vectors_.cols(); }
  [[nodiscard]] const Mat& vectors() const { return vectors_; }
  [[nodiscard]] auto vector(Eigen::Index i) const { return vectors_.col(i); }
  [[nodiscard]] const std::optional<std::string>& label() const { return label_; }

private:
  Mat vectors_;
  std::optional<std::string> label_;
};

/// Optimal bounds over span(F): extreme nonzero eigenvalues of S_F.
struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
  Eigen::Index span_dim = 0;
};

/// {<f, f_i>}
Vec analysis(const Frame& frame, const Vec& f);
/// sum_i c_i f_i
Vec synthesis(const Frame& frame, const Vec& c);
/// S_F = F F^T
Mat frame_operator(const Frame& frame);

FrameBounds frame_bounds(const Frame& frame);

/// {S_F^+ f_i}, the inverse taken on span(F) and zero on its complement.
Frame canonical_dual(const Frame& frame);

/// Orthogonal projector onto span(F).
Mat span_projector(const Frame& frame);

bool is_parseval(const Frame& frame, double tol = 1e-8);

/// Largest relative failure of f = sum <f, f_i> g_i over f in span(F),
/// measured as an operator norm on the span.
double dual_residual(const Frame& frame, const Frame& dual);

/// Coefficient energies (canonical, supplied) for the same signal:
/// sum |<f, S^+ f_i>|^2 and sum |<f, g_i>|^2. Throws NotADual if the
/// supplied family fails reconstruction on span(F) beyond 1e-8.
std::pair<double, double> least_squares_check(const Frame& frame, const Frame& dual, const Vec& f);

}  // namespace fusionkit
