#include "fusionkit/random.hpp"

namespace fusionkit {

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  // splitmix64 over (root, index)
  std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Mat gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat m(rows, cols);
  // Fill column by column so the draw order is fixed.
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * n(rng);
  return m;
}

Vec random_unit_vector(Eigen::Index dim, Rng& rng) {
  Vec v = gaussian_matrix(dim, 1, rng);
  while (v.norm() == 0.0) v = gaussian_matrix(dim, 1, rng);
  return v / v.norm();
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Subspace random_subspace(Eigen::Index ambient_dim, Eigen::Index dim, Rng& rng) {
  for (;;) {
    Mat u = orthonormalize(gaussian_matrix(ambient_dim, dim, rng));
    if (u.cols() == dim) return Subspace(std::move(u));
  }
}

Frame random_parseval_frame(const Subspace& w, Eigen::Index size, Rng& rng) {
  if (size < w.dim()) throw Error(ErrorKind::BadDims, "Parseval frame needs at least dim W vectors");
  // Q: d x size with orthonormal rows, so (U Q)(U Q)^T = U U^T.
  const Mat q = orthonormalize(gaussian_matrix(size, w.dim(), rng)).transpose();
  return Frame(w.basis() * q);
}

FusionFrameSystem random_fusion_frame_system(const RandomSystemSpec& shape, Rng& rng) {
  const auto m = shape.ambient_dim;
  const auto k = static_cast<Eigen::Index>(shape.subspaces);
  if (m < 1 || k < 1 || shape.subspace_dim < 1 || shape.subspace_dim > m) throw Error(ErrorKind::BadDims, "subspace dimension");
  if (shape.local_size < shape.subspace_dim) throw Error(ErrorKind::BadDims, "local frame smaller than its subspace");
  if (k * shape.subspace_dim < m) throw Error(ErrorKind::BadDims, "subspaces cannot span the ambient space");
  if (!(shape.min_weight > 0.0) || shape.max_weight < shape.min_weight) throw Error(ErrorKind::BadDims, "weight range");

  for (;;) {
    std::vector<FusionComponent> comps;
    std::vector<Frame> locals;
    for (std::size_t i = 0; i < shape.subspaces; ++i) {
      Subspace w = random_subspace(m, shape.subspace_dim, rng);
      const double v = shape.min_weight == shape.max_weight ? shape.min_weight : uniform(rng, shape.min_weight, shape.max_weight);
      if (shape.parseval_locals) {
        locals.push_back(random_parseval_frame(w, shape.local_size, rng));
      } else {
        locals.emplace_back(w.basis() * gaussian_matrix(shape.subspace_dim, shape.local_size, rng));
      }
      comps.push_back({std::move(w), v});
    }
    FusionFrame ff(std::move(comps));
    const FusionBounds b = fusion_bounds(ff);
    // Keep the generated instances reasonably conditioned.
    if (!b.is_frame || b.lower < 1e-3 * b.upper) continue;
    bool spans = true;
    for (std::size_t i = 0; i < locals.size(); ++i) {
      spans = spans && numerical_rank(locals[i].vectors()) == shape.subspace_dim &&
              frame_bounds(locals[i]).lower > 1e-3 * frame_bounds(locals[i]).upper;
    }
    if (!spans) continue;
    return FusionFrameSystem(std::move(ff), std::move(locals));
  }
}

}  // namespace fusionkit
