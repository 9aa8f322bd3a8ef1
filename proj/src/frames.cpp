#include "fusionkit/frames.hpp"

#include <Eigen/SVD>

namespace fusionkit {

Frame::Frame(Mat vectors, std::optional<std::string> label) : vectors_(std::move(vectors)), label_(std::move(label)) {
  if (vectors_.rows() < 1 || vectors_.cols() < 1) throw Error(ErrorKind::ShapeMismatch, "frame needs M >= 1 and n >= 1");
  require_finite(vectors_, "frame vectors");
}

Vec analysis(const Frame& frame, const Vec& f) {
  if (f.size() != frame.ambient_dim()) throw Error(ErrorKind::DimMismatch, "signal length differs from ambient dimension");
  return frame.vectors().transpose() * f;
}

Vec synthesis(const Frame& frame, const Vec& c) {
  if (c.size() != frame.size()) throw Error(ErrorKind::DimMismatch, "coefficient count differs from frame size");
  return frame.vectors() * c;
}

Mat frame_operator(const Frame& frame) {
  return frame.vectors() * frame.vectors().transpose();
}

FrameBounds frame_bounds(const Frame& frame) {
  const Vec sv = Eigen::JacobiSVD<Mat>(frame.vectors()).singularValues();
  const Eigen::Index r = numerical_rank(frame.vectors());
  if (r == 0) throw Error(ErrorKind::AllZero, "frame has no nonzero vectors");
  return {sv(r - 1) * sv(r - 1), sv(0) * sv(0), r};
}

Frame canonical_dual(const Frame& frame) {
  if (numerical_rank(frame.vectors()) == 0) throw Error(ErrorKind::AllZero, "frame has no nonzero vectors");
  // S^+ F = (F^+)^T
  return Frame(pseudo_inverse(frame.vectors()).transpose(), frame.label());
}

Mat span_projector(const Frame& frame) {
  const Mat u = orthonormalize(frame.vectors());
  return u * u.transpose();
}

bool is_parseval(const Frame& frame, double tol) {
  if (numerical_rank(frame.vectors()) == 0) return false;
  return operator_norm(frame_operator(frame) - span_projector(frame)) <= tol;
}

double dual_residual(const Frame& frame, const Frame& dual) {
  if (dual.ambient_dim() != frame.ambient_dim() || dual.size() != frame.size()) {
    throw Error(ErrorKind::ShapeMismatch, "dual must have the frame's shape");
  }
  const Mat p = span_projector(frame);
  return operator_norm(dual.vectors() * frame.vectors().transpose() * p - p);
}

std::pair<double, double> least_squares_check(const Frame& frame, const Frame& dual, const Vec& f) {
  if (f.size() != frame.ambient_dim()) throw Error(ErrorKind::DimMismatch, "signal length differs from ambient dimension");
  if (dual_residual(frame, dual) > 1e-8) throw Error(ErrorKind::NotADual, "supplied family does not reconstruct span(F)");
  const Frame canonical = canonical_dual(frame);
  return {analysis(canonical, f).squaredNorm(), analysis(dual, f).squaredNorm()};
}

}  // namespace fusionkit
