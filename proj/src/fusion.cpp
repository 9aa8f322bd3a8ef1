#include "fusionkit/fusion.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fusionkit {

// ---------------------------------------------------------------- Subspace

Subspace::Subspace(Mat basis) : basis_(std::move(basis)) {
  if (basis_.rows() < 1 || basis_.cols() < 1) throw Error(ErrorKind::AllZero, "subspace needs a nonempty basis");
  require_finite(basis_, "subspace basis");
  const Mat gram = basis_.transpose() * basis_;
  if ((gram - Mat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorKind::InvalidArgument, "subspace basis is not orthonormal");
  }
  projector_ = basis_ * basis_.transpose();
}

Subspace Subspace::from_vectors(const Mat& vectors, double rank_tol) {
  return Subspace(orthonormalize(vectors, rank_tol));
}

Subspace Subspace::whole_space(Eigen::Index ambient_dim) {
  return Subspace(Mat::Identity(ambient_dim, ambient_dim));
}

Vec Subspace::project(const Vec& f) const {
  if (f.size() != ambient_dim()) throw Error(ErrorKind::DimMismatch, "vector length differs from ambient dimension");
  return basis_ * (basis_.transpose() * f);
}

// ------------------------------------------------------------- FusionFrame

FusionFrame::FusionFrame(std::vector<FusionComponent> components) : components_(std::move(components)) {
  if (components_.empty()) throw Error(ErrorKind::InvalidArgument, "fusion frame needs at least one component");
  const Eigen::Index m = components_.front().subspace.ambient_dim();
  for (const auto& c : components_) {
    if (c.subspace.ambient_dim() != m) throw Error(ErrorKind::DimMismatch, "subspaces live in different ambient spaces");
    if (!std::isfinite(c.weight) || !(c.weight > 0.0)) throw Error(ErrorKind::InvalidArgument, "weights must be positive");
  }
}

std::vector<double> FusionFrame::weights() const {
  std::vector<double> w;
  w.reserve(components_.size());
  for (const auto& c : components_) w.push_back(c.weight);
  return w;
}

double FusionFrame::weight_energy() const {
  double s = 0.0;
  for (const auto& c : components_) s += c.weight * c.weight;
  return s;
}

// -------------------------------------------------------------- operations

FusionCoefficients fusion_analysis(const FusionFrame& ff, const Vec& f) {
  if (f.size() != ff.ambient_dim()) throw Error(ErrorKind::DimMismatch, "signal length differs from ambient dimension");
  FusionCoefficients out;
  out.entries.reserve(ff.size());
  for (const auto& c : ff.components()) out.entries.push_back(c.weight * c.subspace.project(f));
  out.weights = ff.weights();
  return out;
}

Vec fusion_synthesis(const FusionFrame& ff, const FusionCoefficients& c) {
  if (c.entries.size() != ff.size()) throw Error(ErrorKind::DimMismatch, "coefficient count differs from component count");
  Vec sum = Vec::Zero(ff.ambient_dim());
  for (std::size_t i = 0; i < ff.size(); ++i) {
    const Vec& e = c.entries[i];
    if (e.size() != ff.ambient_dim()) throw Error(ErrorKind::DimMismatch, "coefficient entry has wrong length");
    const double off = (ff[i].subspace.project(e) - e).norm();
    if (off > 1e-6 * e.norm()) {
      throw Error(ErrorKind::NotInSubspace, "entry " + std::to_string(i) + " leaves its subspace");
    }
    sum += ff[i].weight * e;
  }
  return sum;
}

Mat fusion_operator(const FusionFrame& ff) {
  const Eigen::Index m = ff.ambient_dim();
  Mat s = Mat::Zero(m, m);
  for (const auto& c : ff.components()) s += (c.weight * c.weight) * c.subspace.projector();
  return 0.5 * (s + s.transpose());
}

FusionBounds fusion_bounds(const FusionFrame& ff) {
  const Spectrum sp = sym_eig(fusion_operator(ff));
  FusionBounds b;
  b.lower = std::max(sp.min(), 0.0);
  b.upper = sp.max();
  b.is_frame = b.upper > 0.0 && sp.min() > 1e-10 * b.upper;
  b.is_tight = b.is_frame && std::abs(b.upper - b.lower) <= kTightTol * b.upper;
  b.is_parseval = b.is_tight && std::abs(b.lower - 1.0) <= kTightTol;

  bool orthogonal_sum = b.is_parseval;
  if (orthogonal_sum) {
    Eigen::Index dims = 0;
    for (const auto& c : ff.components()) dims += c.subspace.dim();
    orthogonal_sum = dims == ff.ambient_dim();
  }
  for (std::size_t i = 0; orthogonal_sum && i < ff.size(); ++i) {
    for (std::size_t j = i + 1; orthogonal_sum && j < ff.size(); ++j) {
      orthogonal_sum = operator_norm(ff[i].subspace.basis().transpose() * ff[j].subspace.basis()) <= 1e-9;
    }
  }
  b.is_orthonormal_fusion_basis = orthogonal_sum;
  return b;
}

double redundancy(const FusionFrame& ff) {
  double s = 0.0;
  for (const auto& c : ff.components()) s += c.weight * c.weight * static_cast<double>(c.subspace.dim());
  return s / static_cast<double>(ff.ambient_dim());
}

FusionFrame from_frame(const Frame& frame) {
  std::vector<FusionComponent> comps;
  comps.reserve(static_cast<std::size_t>(frame.size()));
  for (Eigen::Index i = 0; i < frame.size(); ++i) {
    const Vec f = frame.vector(i);
    const double n = f.norm();
    if (!(n > 0.0)) throw Error(ErrorKind::ZeroVector, "frame vector " + std::to_string(i) + " is zero");
    comps.push_back({Subspace(f / n), n});
  }
  return FusionFrame(std::move(comps));
}

FusionFrame transform(const FusionFrame& ff, const Mat& t) {
  if (t.rows() != ff.ambient_dim() || t.cols() != ff.ambient_dim()) {
    throw Error(ErrorKind::DimMismatch, "transform must be M x M");
  }
  require_finite(t, "transform");
  if (!is_symmetric(t)) throw Error(ErrorKind::NotSymmetric, "transform must be self-adjoint");
  const Spectrum sp = sym_eig(t);
  const double smax = sp.eigenvalues.cwiseAbs().maxCoeff();
  const double smin = sp.eigenvalues.cwiseAbs().minCoeff();
  if (!(smin > 1e-10 * smax)) throw Error(ErrorKind::Singular, "transform is not invertible");

  std::vector<FusionComponent> comps;
  comps.reserve(ff.size());
  for (const auto& c : ff.components()) comps.push_back({Subspace::from_vectors(t * c.subspace.basis()), c.weight});
  return FusionFrame(std::move(comps));
}

double transform_residual(const FusionFrame& ff, const Mat& t) {
  const Mat s = fusion_operator(ff);
  const Mat moved = fusion_operator(transform(ff, t));
  const Mat conjugated = t * s * t.partialPivLu().solve(Mat::Identity(t.rows(), t.cols()));
  return operator_norm(moved - conjugated) / operator_norm(s);
}

// ------------------------------------------------------- FusionFrameSystem

FusionFrameSystem::FusionFrameSystem(FusionFrame fusion_frame, std::vector<Frame> local_frames)
    : fusion_frame_(std::move(fusion_frame)), local_frames_(std::move(local_frames)) {
  local_duals_.reserve(local_frames_.size());
  for (const auto& f : local_frames_) local_duals_.push_back(canonical_dual(f));
  validate();
}

FusionFrameSystem::FusionFrameSystem(FusionFrame fusion_frame, std::vector<Frame> local_frames,
                                     std::vector<Frame> local_duals)
    : fusion_frame_(std::move(fusion_frame)),
      local_frames_(std::move(local_frames)),
      local_duals_(std::move(local_duals)) {
  validate();
}

void FusionFrameSystem::validate() {
  const std::size_t k = fusion_frame_.size();
  if (local_frames_.size() != k || local_duals_.size() != k) {
    throw Error(ErrorKind::ShapeMismatch, "need one local frame and one local dual per subspace");
  }
  local_lower_ = std::numeric_limits<double>::infinity();
  local_upper_ = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const Subspace& w = fusion_frame_[i].subspace;
    const Frame& f = local_frames_[i];
    const Frame& g = local_duals_[i];
    const std::string tag = "component " + std::to_string(i);
    if (f.ambient_dim() != w.ambient_dim() || g.ambient_dim() != w.ambient_dim() || g.size() != f.size()) {
      throw Error(ErrorKind::ShapeMismatch, tag + ": local frame/dual shape");
    }
    for (Eigen::Index j = 0; j < f.size(); ++j) {
      const Vec x = f.vector(j);
      if ((w.project(x) - x).norm() > 1e-9 * x.norm()) {
        throw Error(ErrorKind::NotInSubspace, tag + ": local vector " + std::to_string(j) + " leaves W_i");
      }
    }
    if (numerical_rank(f.vectors()) != w.dim() || operator_norm(span_projector(f) - w.projector()) > 1e-8) {
      throw Error(ErrorKind::SpanMismatch, tag + ": local frame does not span W_i");
    }
    if (operator_norm(g.vectors() * f.vectors().transpose() * w.projector() - w.projector()) > 1e-8) {
      throw Error(ErrorKind::NotADual, tag + ": local dual fails reconstruction on W_i");
    }
    const FrameBounds lb = frame_bounds(f);
    local_lower_ = std::min(local_lower_, lb.lower);
    local_upper_ = std::max(local_upper_, lb.upper);
  }
}

Eigen::Index FusionFrameSystem::total_local_vectors() const {
  Eigen::Index n = 0;
  for (const auto& f : local_frames_) n += f.size();
  return n;
}

Frame FusionFrameSystem::flattened() const {
  Mat all(ambient_dim(), total_local_vectors());
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    const Mat& f = local_frames_[i].vectors();
    all.middleCols(col, f.cols()) = fusion_frame_[i].weight * f;
    col += f.cols();
  }
  return Frame(std::move(all));
}

Mat fusion_operator_via_locals(const FusionFrameSystem& ffs) {
  const Eigen::Index m = ffs.ambient_dim();
  Mat s = Mat::Zero(m, m);
  for (std::size_t i = 0; i < ffs.size(); ++i) {
    const double v = ffs.fusion_frame()[i].weight;
    s += (v * v) * (ffs.local_duals()[i].vectors() * ffs.local_frames()[i].vectors().transpose());
  }
  return 0.5 * (s + s.transpose());
}

bool LocalGlobalBounds::contained(double rel_tol) const {
  return actual.lower >= predicted.lower * (1.0 - rel_tol) && actual.upper <= predicted.upper * (1.0 + rel_tol);
}

LocalGlobalBounds local_global_bounds(const FusionFrameSystem& ffs) {
  const FusionBounds fb = fusion_bounds(ffs.fusion_frame());
  const FrameBounds flat = frame_bounds(ffs.flattened());
  const double a = ffs.local_lower();
  const double b = ffs.local_upper();
  LocalGlobalBounds out;
  out.fusion = {fb.lower, fb.upper};
  out.predicted = {a * fb.lower, b * fb.upper};
  // As a frame for R^M the lower bound is 0 once the span is deficient.
  const double flat_lower = flat.span_dim == ffs.ambient_dim() ? flat.lower : 0.0;
  out.actual = {flat_lower, flat.upper};
  out.converse = {flat_lower / b, flat.upper / a};
  return out;
}

FusionFrameSystem split_frame(const Frame& frame, const std::vector<std::vector<std::size_t>>& partition,
                              const std::vector<double>& weights) {
  if (partition.size() != weights.size()) throw Error(ErrorKind::ShapeMismatch, "one weight per block required");
  if (partition.empty()) throw Error(ErrorKind::EmptyBlock, "no blocks");
  const auto n = static_cast<std::size_t>(frame.size());
  std::vector<bool> covered(n, false);
  std::vector<FusionComponent> comps;
  std::vector<Frame> locals;
  for (std::size_t b = 0; b < partition.size(); ++b) {
    const auto& block = partition[b];
    if (block.empty()) throw Error(ErrorKind::EmptyBlock, "block " + std::to_string(b) + " is empty");
    Mat cols(frame.ambient_dim(), static_cast<Eigen::Index>(block.size()));
    for (std::size_t j = 0; j < block.size(); ++j) {
      if (block[j] >= n) throw Error(ErrorKind::IndexOutOfRange, "index " + std::to_string(block[j]));
      covered[block[j]] = true;
      cols.col(static_cast<Eigen::Index>(j)) = frame.vector(static_cast<Eigen::Index>(block[j]));
    }
    comps.push_back({Subspace::from_vectors(cols), weights[b]});
    locals.emplace_back(std::move(cols));
  }
  if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
    throw Error(ErrorKind::IndexOutOfRange, "partition does not cover every frame vector");
  }
  return FusionFrameSystem(FusionFrame(std::move(comps)), std::move(locals));
}

}  // namespace fusionkit
