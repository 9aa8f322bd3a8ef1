#pragma once

// JSON fixture format for fusion frame systems:
//
//   { "ambient_dim": M,
//     "components": [ { "weight": v,
//                       "subspace_basis": [[...], ...],
//                       "local_frame":    [[...], ...],    (optional)
//                       "local_dual":     [[...], ...] } ] (optional)
//   }
//
// Every matrix is a list of vectors; each inner array is one column of
// length M. A missing local frame defaults to the orthonormalized subspace
// basis; a missing local dual defaults to the canonical dual inside W_i.

#include <filesystem>
#include <string>

#include "json.hpp"

#include "fusionkit/fusion.hpp"

namespace fusionkit {

FusionFrameSystem system_from_json(const nlohmann::json& j);
nlohmann::ordered_json system_to_json(const FusionFrameSystem& ffs);

FusionFrameSystem load_fixture(const std::filesystem::path& path);
void save_fixture(const FusionFrameSystem& ffs, const std::filesystem::path& path);

}  // namespace fusionkit
