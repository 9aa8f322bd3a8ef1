#pragma once

// Robustness of fusion frames under perturbation of the subspaces or of the
// local frames. Quantities that need a supremum over the unit sphere come in
// two flavours: a sampled ascent estimate, and a certified value that is a
// provable upper bound. Containment checks always use the certified value.

#include <cstdint>
#include <string_view>
#include <vector>

#include "fusionkit/fusion.hpp"
#include "fusionkit/random.hpp"

namespace fusionkit {

struct SubspaceEpsilon {
  double estimate = 0.0;   // sampled max of ||(P-Q)f|| - l1 ||Pf|| - l2 ||Qf|| on the sphere, clamped at 0
  double certified = 0.0;  // ||P - Q||, a valid epsilon for l1 = l2 = 0
};

/// Per-component (lambda1, lambda2, epsilon) perturbation data for a pair of
/// fusion frames.
struct SubspacePerturbation {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double epsilon = 0.0;
  std::vector<bool> verified;  // inequality held on every sample for component i
};

struct FramePerturbation {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

struct FrameLambda {
  double estimate = 0.0;   // sampled max of ||(F-G)a|| / (||Fa|| + ||Ga||)
  double certified = 0.0;  // ||F-G|| / (s_min(F) + s_min(G)); +inf when the kernels differ
};

struct EquivalenceReport {
  double ratio_low = 1.0;   // min ||Fa|| / ||Ga|| seen
  double ratio_high = 1.0;  // max ||Fa|| / ||Ga|| seen
  double envelope_low = 1.0;
  double envelope_high = 1.0;
  bool dim_equal = true;
  double iso_const = 1.0;  // min ||pi_W pi_Wt f|| / ||pi_Wt f|| seen
  double kappa = 1.0;

  [[nodiscard]] bool ratios_ok(double rel_tol = 1e-9) const;
  [[nodiscard]] bool iso_ok(double tol = 1e-9) const;
};

struct PredictedBounds {
  double lower = 0.0;
  double upper = 0.0;
};

struct LocalPrediction {
  double epsilon = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// (1-l1)/(1+l2) - l1 (1+l2)/(1-l1) - l2
double kappa(double lambda1, double lambda2);

SubspaceEpsilon subspace_epsilon(const Subspace& w, const Subspace& wt, double lambda1, double lambda2,
                                 std::size_t samples, std::uint64_t seed);

/// Checks the inequality with the given constants for every component on
/// `samples` random vectors (slack 1e-9).
SubspacePerturbation subspace_perturbation(const FusionFrame& ff, const FusionFrame& fft, double lambda1,
                                           double lambda2, double epsilon, std::size_t samples, std::uint64_t seed);

/// Numerical form of the fact that projections admit no proper perturbation:
/// an epsilon estimate of (numerically) zero must force ||P - Q|| ~ 0.
bool no_perturbation_of_projection_check(const Subspace& w, const Subspace& wt, double lambda1, double lambda2,
                                         std::size_t samples, std::uint64_t seed);

/// Bounds of {(Wt_i, v_i)} for a (l1, l2, eps)-perturbation of a fusion frame
/// with bounds (C, D). Throws HypothesisViolated unless (1-l1)sqrt(C) - eps sqrt(sum v^2) > 0.
PredictedBounds predicted_bounds_subspace(double c, double d, double weight_energy, double lambda1, double lambda2,
                                          double epsilon);
PredictedBounds predicted_bounds_subspace(const FusionFrame& ff, double lambda1, double lambda2, double epsilon);

FrameLambda frame_perturbation_lambda(const Frame& f, const Frame& ft, std::size_t samples, std::uint64_t seed);

EquivalenceReport equivalence_check(const Frame& f, const Frame& ft, double lambda1, double lambda2,
                                    std::size_t samples, std::uint64_t seed);

/// epsilon = sqrt(2 (1 - kappa)) and the bounds (sqrt C -+ eps sqrt(sum v^2))^2.
LocalPrediction predicted_bounds_local(double c, double d, double weight_energy, double lambda1, double lambda2);
LocalPrediction predicted_bounds_local(const FusionFrameSystem& ffs, double lambda1, double lambda2);

enum class PerturbMode { SubspaceRotate, LocalFrameJitter };

std::string_view to_string(PerturbMode mode) noexcept;
PerturbMode parse_perturb_mode(std::string_view text);

struct PerturbTrial {
  std::size_t trial = 0;
  PerturbMode mode = PerturbMode::SubspaceRotate;
  double noise_scale = 0.0;
  double measured = 0.0;  // certified epsilon (rotate) or certified lambda (jitter)
  bool discarded = false;  // jitter changed a local rank
  bool hypothesis_pass = false;
  PredictedBounds predicted;
  double actual_lower = 0.0;
  double actual_upper = 0.0;
  bool contained = false;
};

struct PerturbSummary {
  std::size_t trials = 0;
  std::size_t discarded = 0;
  std::size_t hypothesis_pass = 0;
  std::size_t contained = 0;
  /// Fraction of hypothesis-passing trials with contained bounds; 1 when none pass.
  [[nodiscard]] double containment_rate() const;
};

PerturbSummary summarize(const std::vector<PerturbTrial>& rows);

/// Rotation of W by angle theta in the plane of a random unit u in W and a
/// random unit w orthogonal to W. Returns W itself when W = R^M.
Subspace rotate_subspace(const Subspace& w, double theta, Rng& rng);

/// G = F + scale * Gauss * P_row(F): jitter that keeps the kernel of F.
Frame jitter_frame(const Frame& f, double scale, Rng& rng);

std::vector<PerturbTrial> perturbation_experiment(const FusionFrameSystem& ffs, double noise_scale, PerturbMode mode,
                                                  std::size_t trials, std::uint64_t seed);

}  // namespace fusionkit
