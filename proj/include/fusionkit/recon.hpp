#pragma once

// Centralized, distributed and iterative reconstruction from fusion frame
// data. S_W^{-1} is only ever applied through a Cholesky solve; every report
// counts those applications so the on-line/off-line cost split is visible.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "fusionkit/fusion.hpp"

namespace fusionkit {

/// Sensor-level scalars c_i = {<f, f_ij>}_j, one list per subspace.
struct LocalMeasurements {
  std::vector<Vec> coefficients;
};

enum class ReconMethod { LocalFusion, FusedDual, Iterative, Centralized };

std::string_view to_string(ReconMethod method) noexcept;

struct IterationStep {
  std::size_t n = 0;
  double bound = 1.0;                 // ((D-C)/(D+C))^n, relative to ||f||
  std::optional<double> actual_error;  // ||f - f_n|| / ||f|| when a reference is known
};

struct ReconReport {
  Vec estimate;
  ReconMethod method = ReconMethod::Centralized;
  std::optional<double> residual;  // ||estimate - reference|| / ||reference||
  std::vector<IterationStep> trace;
  std::size_t solves = 0;             // S_W^{-1} applications at reconstruction time
  std::size_t precompute_solves = 0;  // S_W^{-1} applications done off-line
  bool duals_precomputed = false;
};

/// Noise-free local measurements of f.
LocalMeasurements measure(const FusionFrameSystem& ffs, const Vec& f);

/// Fusion coefficients v_i * (local synthesis of c_i), i.e. v_i pi_{W_i} f
/// for exact data. Lets the centralized and iterative paths consume sensor data.
FusionCoefficients coefficients_from_measurements(const FusionFrameSystem& ffs, const LocalMeasurements& m);

/// S_W^{-1} sum_i v_i entry_i.
Vec reconstruct_exact(const FusionFrame& ff, const FusionCoefficients& coeffs);

ReconReport reconstruct_local_fusion(const FusionFrameSystem& ffs, const LocalMeasurements& m,
                                     const std::optional<Vec>& reference = std::nullopt);

/// The off-line part of the fused-dual procedure: {S_W^{-1} v_i g_ij} with
/// one factorization of S_W and one back-solve per dual vector.
struct FusedDual {
  Frame duals;
  std::size_t precompute_solves = 0;
};

FusedDual precompute_fused_dual(const FusionFrameSystem& ffs);
Frame fused_global_dual(const FusionFrameSystem& ffs);

ReconReport reconstruct_fused_dual(const FusionFrameSystem& ffs, const LocalMeasurements& m,
                                   const std::optional<Vec>& reference = std::nullopt);
ReconReport reconstruct_fused_dual(const FusionFrameSystem& ffs, const FusedDual& precomputed,
                                   const LocalMeasurements& m, const std::optional<Vec>& reference = std::nullopt);

/// Frame algorithm f_n = f_{n-1} + 2/(C+D) (S_W f - S_W f_{n-1}), f_0 = 0.
/// Stops at n_max or once the certified bound falls to tol.
ReconReport reconstruct_iterative(const FusionFrame& ff, const FusionCoefficients& coeffs, std::size_t n_max, double tol,
                                  const std::optional<Vec>& reference = std::nullopt);

enum class FailureMode { Undetected, Detected };

std::string_view to_string(FailureMode mode) noexcept;

/// Reconstruction after losing the subspaces flagged in `dropped`.
/// Undetected: their measurements are zeroed and the original S_W is used.
/// Detected: S_W is rebuilt over the survivors; returns nullopt when the
/// survivors no longer form a fusion frame.
std::optional<ReconReport> reconstruct_with_dropout(const FusionFrameSystem& ffs, const LocalMeasurements& m,
                                                    const std::vector<bool>& dropped, FailureMode mode,
                                                    const std::optional<Vec>& reference = std::nullopt);

/// max over random unit f of ||sum <f, S_W^{-1} v_i g_ij> v_i f_ij - f||.
double fused_dual_check(const FusionFrameSystem& ffs, std::size_t samples, std::uint64_t seed);

/// max over random unit f of ||sum <f, v_i g_ij> S_W^{-1} v_i f_ij - f||.
double dual_relation_check(const FusionFrameSystem& ffs, std::size_t samples = 64, std::uint64_t seed = 1);

/// Largest normalized column distance between {S_W^{-1} v_i S_{F_i}^+ f_ij}
/// and the canonical dual {S_F^{-1} v_i f_ij} of the flattened family.
double canonical_dual_gap(const FusionFrameSystem& ffs);

}  // namespace fusionkit
