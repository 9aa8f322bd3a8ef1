#include "fusionkit/catalog.hpp"

#include <cmath>
#include <numbers>

namespace fusionkit::catalog {

Frame mercedes_benz() {
  Mat v(2, 3);
  for (int k = 0; k < 3; ++k) {
    const double a = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * k / 3.0;
    v(0, k) = std::cos(a);
    v(1, k) = std::sin(a);
  }
  return Frame(v, "mercedes-benz");
}

FusionFrameSystem with_orthonormal_locals(const FusionFrame& ff) {
  std::vector<Frame> locals;
  for (const auto& c : ff.components()) locals.emplace_back(c.subspace.basis());
  return FusionFrameSystem(ff, std::move(locals));
}

FusionFrameSystem orthonormal_fusion_basis(Eigen::Index ambient_dim, Eigen::Index group) {
  if (group < 1 || ambient_dim % group != 0) throw Error(ErrorKind::BadDims, "group size must divide the dimension");
  const Mat id = Mat::Identity(ambient_dim, ambient_dim);
  std::vector<FusionComponent> comps;
  for (Eigen::Index c = 0; c < ambient_dim; c += group) comps.push_back({Subspace(id.middleCols(c, group)), 1.0});
  return with_orthonormal_locals(FusionFrame(std::move(comps)));
}

FusionFrameSystem lines_and_plane() {
  const Mat id = Mat::Identity(2, 2);
  return with_orthonormal_locals(
      FusionFrame({{Subspace(id.col(0)), 1.0}, {Subspace(id.col(1)), 1.0}, {Subspace(id), 1.0}}));
}

FusionFrameSystem skew_lines() {
  const Mat id = Mat::Identity(2, 2);
  return with_orthonormal_locals(
      FusionFrame({{Subspace(id.col(0)), 1.0}, {Subspace(Vec(Vec::Constant(2, std::sqrt(0.5)))), 1.0}}));
}

}  // namespace fusionkit::catalog
