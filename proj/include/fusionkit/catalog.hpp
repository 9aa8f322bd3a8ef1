#pragma once

// Small hand-checkable fusion frames used by the CLI generator and the tests.

#include "fusionkit/fusion.hpp"

namespace fusionkit::catalog {

/// Unit vectors at 90, 210 and 330 degrees in R^2; a 3/2-tight frame.
Frame mercedes_benz();

/// Standard basis of R^M split into consecutive groups of `group` vectors,
/// unit weights and orthonormal local bases: an orthonormal fusion basis.
FusionFrameSystem orthonormal_fusion_basis(Eigen::Index ambient_dim, Eigen::Index group);

/// {(span e1, 1), (span e2, 1), (R^2, 1)}: 2-tight.
FusionFrameSystem lines_and_plane();

/// {(span e1, 1), (span (1,1)/sqrt2, 1)}: bounds 1 -+ sqrt2/2.
FusionFrameSystem skew_lines();

/// Fusion frame system whose local frames are orthonormal bases of the given
/// subspaces (Parseval, self-dual).
FusionFrameSystem with_orthonormal_locals(const FusionFrame& ff);

}  // namespace fusionkit::catalog
