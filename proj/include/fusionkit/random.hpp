#pragma once

// Seeded random generation. Every random quantity in the library and CLI is
// drawn from an Rng built from an explicit seed.

#include <cstdint>
#include <random>

#include "fusionkit/fusion.hpp"

namespace fusionkit {

using Rng = std::mt19937_64;

/// Independent stream for sub-task `index` of a run seeded with `root`.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

Mat gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale = 1.0);
Vec random_unit_vector(Eigen::Index dim, Rng& rng);
double uniform(Rng& rng, double lo, double hi);

/// Orthonormalized Gaussian M x d matrix.
Subspace random_subspace(Eigen::Index ambient_dim, Eigen::Index dim, Rng& rng);

struct RandomSystemSpec {
  Eigen::Index ambient_dim = 8;
  std::size_t subspaces = 4;
  Eigen::Index subspace_dim = 3;
  Eigen::Index local_size = 5;  // vectors per local frame, >= subspace_dim
  double min_weight = 0.5;
  double max_weight = 2.0;
  bool parseval_locals = false;  // local frames are orthonormal bases scaled to Parseval
};

/// Random subspaces with Gaussian local frames inside them; retries until the
/// fusion frame is a frame. Throws BadDims when the sizes cannot work.
FusionFrameSystem random_fusion_frame_system(const RandomSystemSpec& shape, Rng& rng);

/// Parseval frame for W made of `size` vectors: U Q where Q has orthonormal rows.
Frame random_parseval_frame(const Subspace& w, Eigen::Index size, Rng& rng);

}  // namespace fusionkit
