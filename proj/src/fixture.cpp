#include "fusionkit/fixture.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace fusionkit {

namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorKind::SchemaError, what);
}

Mat columns_from_json(const nlohmann::json& j, Eigen::Index m, const std::string& where) {
  if (!j.is_array() || j.empty()) schema_error(where + " must be a nonempty array of vectors");
  Mat out(m, static_cast<Eigen::Index>(j.size()));
  for (std::size_t c = 0; c < j.size(); ++c) {
    const auto& col = j[c];
    if (!col.is_array() || col.size() != static_cast<std::size_t>(m)) {
      schema_error(where + "[" + std::to_string(c) + "] must have ambient_dim entries");
    }
    for (std::size_t r = 0; r < col.size(); ++r) {
      if (!col[r].is_number()) schema_error(where + " entries must be numbers");
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r].get<double>();
    }
  }
  if (!out.allFinite()) schema_error(where + " has non-finite entries");
  return out;
}

nlohmann::ordered_json columns_to_json(const Mat& m) {
  auto out = nlohmann::ordered_json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    auto col = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) col.push_back(m(r, c));
    out.push_back(std::move(col));
  }
  return out;
}

}  // namespace

FusionFrameSystem system_from_json(const nlohmann::json& j) {
  if (!j.is_object()) schema_error("fixture must be a JSON object");
  if (!j.contains("ambient_dim") || !j["ambient_dim"].is_number_integer()) schema_error("ambient_dim must be an integer");
  const auto m = j["ambient_dim"].get<Eigen::Index>();
  if (m < 1) schema_error("ambient_dim must be positive");
  if (!j.contains("components") || !j["components"].is_array() || j["components"].empty()) {
    schema_error("components must be a nonempty array");
  }

  std::vector<FusionComponent> comps;
  std::vector<Frame> locals;
  std::vector<Frame> duals;
  const auto& arr = j["components"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& c = arr[i];
    const std::string where = "components[" + std::to_string(i) + "]";
    if (!c.is_object()) schema_error(where + " must be an object");
    if (!c.contains("weight") || !c["weight"].is_number()) schema_error(where + ".weight must be a number");
    if (!c.contains("subspace_basis")) schema_error(where + ".subspace_basis is required");
    const double w = c["weight"].get<double>();
    if (!(w > 0.0) || !std::isfinite(w)) schema_error(where + ".weight must be positive");
    try {
      Subspace sub = Subspace::from_vectors(columns_from_json(c["subspace_basis"], m, where + ".subspace_basis"));
      locals.emplace_back(c.contains("local_frame") ? columns_from_json(c["local_frame"], m, where + ".local_frame")
                                                     : sub.basis());
      if (c.contains("local_dual")) {
        duals.emplace_back(columns_from_json(c["local_dual"], m, where + ".local_dual"));
      } else {
        duals.push_back(canonical_dual(locals.back()));
      }
      comps.push_back({std::move(sub), w});
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::SchemaError) throw;
      schema_error(where + ": " + e.what());
    }
  }
  try {
    return FusionFrameSystem(FusionFrame(std::move(comps)), std::move(locals), std::move(duals));
  } catch (const Error& e) {
    schema_error(std::string("invalid fusion frame system: ") + e.what());
  }
}

nlohmann::ordered_json system_to_json(const FusionFrameSystem& ffs) {
  nlohmann::ordered_json j;
  j["ambient_dim"] = ffs.ambient_dim();
  auto comps = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < ffs.size(); ++i) {
    nlohmann::ordered_json c;
    c["weight"] = ffs.fusion_frame()[i].weight;
    c["subspace_basis"] = columns_to_json(ffs.fusion_frame()[i].subspace.basis());
    c["local_frame"] = columns_to_json(ffs.local_frames()[i].vectors());
    c["local_dual"] = columns_to_json(ffs.local_duals()[i].vectors());
    comps.push_back(std::move(c));
  }
  j["components"] = std::move(comps);
  return j;
}

FusionFrameSystem load_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::SchemaError, "cannot open fixture " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("malformed JSON: ") + e.what());
  }
  return system_from_json(j);
}

void save_fixture(const FusionFrameSystem& ffs, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::SchemaError, "cannot write " + path.string());
  out << system_to_json(ffs).dump(2) << '\n';
}

}  // namespace fusionkit
