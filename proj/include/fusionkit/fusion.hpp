#pragma once

// Fusion frames {(W_i, v_i)} and fusion frame systems (a fusion frame plus a
// local frame and local dual for every subspace).

#include <cstddef>
#include <vector>

#include "fusionkit/frames.hpp"

namespace fusionkit {

/// Closed subspace of R^M held by an orthonormal basis; the projector
/// U U^T is formed once at construction.
class Subspace {
public:
  /// `basis` must have orthonormal columns (to 1e-10).
  explicit Subspace(Mat basis);

  static Subspace from_vectors(const Mat& vectors, double rank_tol = kDefaultRankTol);
  static Subspace whole_space(Eigen::Index ambient_dim);

  [[nodiscard]] Eigen::Index ambient_dim() const { return basis_.rows(); }
  [[nodiscard]] Eigen::Index dim() const { return basis_.cols(); }
  [[nodiscard]] const Mat& basis() const { return basis_; }
  [[nodiscard]] const Mat& projector() const { return projector_; }
  [[nodiscard]] Vec project(const Vec& f) const;

private:
  Mat basis_;
  Mat projector_;
};

inline Subspace subspace_from_vectors(const Mat& vectors, double rank_tol = kDefaultRankTol) {
  return Subspace::from_vectors(vectors, rank_tol);
}

struct FusionComponent {
  Subspace subspace;
  double weight;
};

class FusionFrame {
public:
  explicit FusionFrame(std::vector<FusionComponent> components);

  [[nodiscard]] Eigen::Index ambient_dim() const { return components_.front().subspace.ambient_dim(); }
  [[nodiscard]] std::size_t size() const { return components_.size(); }
  [[nodiscard]] const std::vector<FusionComponent>& components() const { return components_; }
  [[nodiscard]] const FusionComponent& operator[](std::size_t i) const { return components_[i]; }
  [[nodiscard]] std::vector<double> weights() const;
  /// sum_i v_i^2
  [[nodiscard]] double weight_energy() const;

private:
  std::vector<FusionComponent> components_;
};

/// T_W(f) = {v_i pi_{W_i} f}: one vector per component, entry i in W_i.
struct FusionCoefficients {
  std::vector<Vec> entries;
  std::vector<double> weights;
};

/// Spectral fusion frame bounds. The optimal lower bound is lambda_min(S_W),
/// which equals 1/||S_W^{-1}|| when S_W is invertible; the upper is ||S_W||.
struct FusionBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool is_frame = false;
  bool is_tight = false;
  bool is_parseval = false;
  bool is_orthonormal_fusion_basis = false;
};

inline constexpr double kTightTol = 1e-8;

FusionCoefficients fusion_analysis(const FusionFrame& ff, const Vec& f);
Vec fusion_synthesis(const FusionFrame& ff, const FusionCoefficients& c);

/// S_W = sum_i v_i^2 U_i U_i^T, accumulated in component order.
Mat fusion_operator(const FusionFrame& ff);

FusionBounds fusion_bounds(const FusionFrame& ff);

/// sum_i v_i^2 dim W_i / M. Equals the bound only for tight fusion frames.
double redundancy(const FusionFrame& ff);

/// One rank-1 subspace span{f_i} per vector with weight ||f_i||.
FusionFrame from_frame(const Frame& frame);

/// {(T W_i, v_i)} for symmetric invertible T: each basis T U_i is
/// re-orthonormalized, weights are kept.
FusionFrame transform(const FusionFrame& ff, const Mat& t);

/// ||S_{TW} - T S_W T^{-1}|| / ||S_W||. Zero when T commutes with every
/// projector or is orthogonal; in general the orthogonal projector onto
/// T W_i differs from T pi_{W_i} T^{-1}, so this is not small.
double transform_residual(const FusionFrame& ff, const Mat& t);

/// Fusion frame plus local frames {f_ij} spanning each W_i and local duals.
class FusionFrameSystem {
public:
  /// Local duals default to the canonical dual of each local frame inside W_i.
  FusionFrameSystem(FusionFrame fusion_frame, std::vector<Frame> local_frames);
  FusionFrameSystem(FusionFrame fusion_frame, std::vector<Frame> local_frames, std::vector<Frame> local_duals);

  [[nodiscard]] const FusionFrame& fusion_frame() const { return fusion_frame_; }
  [[nodiscard]] const std::vector<Frame>& local_frames() const { return local_frames_; }
  [[nodiscard]] const std::vector<Frame>& local_duals() const { return local_duals_; }
  [[nodiscard]] std::size_t size() const { return local_frames_.size(); }
  [[nodiscard]] Eigen::Index ambient_dim() const { return fusion_frame_.ambient_dim(); }
  /// Common local bounds A = min_i A_i, B = max_i B_i.
  [[nodiscard]] double local_lower() const { return local_lower_; }
  [[nodiscard]] double local_upper() const { return local_upper_; }
  /// Total local frame vector count sum_i |J_i|.
  [[nodiscard]] Eigen::Index total_local_vectors() const;

  /// The weighted family {v_i f_ij} as one frame for R^M.
  [[nodiscard]] Frame flattened() const;

private:
  void validate();

  FusionFrame fusion_frame_;
  std::vector<Frame> local_frames_;
  std::vector<Frame> local_duals_;
  double local_lower_ = 0.0;
  double local_upper_ = 0.0;
};

/// sum_i v_i^2 G_i F_i^T (G_i local duals), symmetrized after accumulation.
Mat fusion_operator_via_locals(const FusionFrameSystem& ffs);

struct BoundsPair {
  double lower = 0.0;
  double upper = 0.0;
};

struct LocalGlobalBounds {
  BoundsPair predicted;  // (A C, B D)
  BoundsPair actual;     // frame bounds of {v_i f_ij}
  BoundsPair converse;   // (C_F / B, D_F / A) predicted for the fusion frame from the flattened bounds
  BoundsPair fusion;     // (C, D)

  [[nodiscard]] bool contained(double rel_tol = 1e-9) const;
};

LocalGlobalBounds local_global_bounds(const FusionFrameSystem& ffs);

/// Builds W_i = span of block i with the block as local frame and canonical
/// local duals. Blocks may overlap; every index must be covered.
FusionFrameSystem split_frame(const Frame& frame, const std::vector<std::vector<std::size_t>>& partition,
                              const std::vector<double>& weights);

}  // namespace fusionkit
