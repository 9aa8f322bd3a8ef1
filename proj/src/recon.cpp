#include "fusionkit/recon.hpp"

#include "fusionkit/random.hpp"

#include <algorithm>
#include <string>

namespace fusionkit {

namespace {

SpdSolver fusion_solver(const FusionFrame& ff) {
  const FusionBounds b = fusion_bounds(ff);
  if (!b.is_frame) throw Error(ErrorKind::NotAFrame, "lower fusion frame bound is numerically zero");
  return SpdSolver(fusion_operator(ff));
}

void check_shapes(const FusionFrameSystem& ffs, const LocalMeasurements& m) {
  if (m.coefficients.size() != ffs.size()) throw Error(ErrorKind::ShapeMismatch, "one measurement list per subspace");
  for (std::size_t i = 0; i < ffs.size(); ++i) {
    if (m.coefficients[i].size() != ffs.local_frames()[i].size()) {
      throw Error(ErrorKind::ShapeMismatch, "measurement list " + std::to_string(i) + " has wrong length");
    }
  }
}

std::optional<double> relative_error(const Vec& estimate, const std::optional<Vec>& reference) {
  if (!reference) return std::nullopt;
  const double n = reference->norm();
  const double e = (estimate - *reference).norm();
  return n > 0.0 ? e / n : e;
}

}  // namespace

std::string_view to_string(ReconMethod method) noexcept {
  switch (method) {
    case ReconMethod::LocalFusion: return "local-fusion";
    case ReconMethod::FusedDual: return "fused-dual";
    case ReconMethod::Iterative: return "iterative";
    case ReconMethod::Centralized: return "centralized";
  }
  return "unknown";
}

LocalMeasurements measure(const FusionFrameSystem& ffs, const Vec& f) {
  LocalMeasurements m;
  m.coefficients.reserve(ffs.size());
  for (const auto& local : ffs.local_frames()) m.coefficients.push_back(analysis(local, f));
  return m;
}

FusionCoefficients coefficients_from_measurements(const FusionFrameSystem& ffs, const LocalMeasurements& m) {
  check_shapes(ffs, m);
  FusionCoefficients c;
  c.weights = ffs.fusion_frame().weights();
  for (std::size_t i = 0; i < ffs.size(); ++i) {
    // Alternate duals may leave W_i; project so the entry is a valid member.
    const Vec local = synthesis(ffs.local_duals()[i], m.coefficients[i]);
    c.entries.push_back(c.weights[i] * ffs.fusion_frame()[i].subspace.project(local));
  }
  return c;
}

Vec reconstruct_exact(const FusionFrame& ff, const FusionCoefficients& coeffs) {
  const SpdSolver solver = fusion_solver(ff);
  return solver.solve(fusion_synthesis(ff, coeffs));
}

ReconReport reconstruct_local_fusion(const FusionFrameSystem& ffs, const LocalMeasurements& m,
                                     const std::optional<Vec>& reference) {
  check_shapes(ffs, m);
  const SpdSolver solver = fusion_solver(ffs.fusion_frame());
  ReconReport r;
  r.method = ReconMethod::LocalFusion;
  r.estimate = Vec::Zero(ffs.ambient_dim());
  for (std::size_t i = 0; i < ffs.size(); ++i) {
    const double v = ffs.fusion_frame()[i].weight;
    const Vec local = synthesis(ffs.local_duals()[i], m.coefficients[i]);
    r.estimate += (v * v) * solver.solve(local);
    ++r.solves;
  }
  r.residual = relative_error(r.estimate, reference);
  return r;
}

FusedDual precompute_fused_dual(const FusionFrameSystem& ffs) {
  const SpdSolver solver = fusion_solver(ffs.fusion_frame());
  Mat duals(ffs.ambient_dim(), ffs.total_local_vectors());
  FusedDual out{Frame(Mat::Zero(ffs.ambient_dim(), 1)), 0};
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < ffs.size(); ++i) {
    const double v = ffs.fusion_frame()[i].weight;
    const Frame& g = ffs.local_duals()[i];
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      duals.col(col++) = solver.solve(Vec(v * g.vector(j)));
      ++out.precompute_solves;
    }
  }
  out.duals = Frame(std::move(duals));
  return out;
}

Frame fused_global_dual(const FusionFrameSystem& ffs) {
  return precompute_fused_dual(ffs).duals;
}

ReconReport reconstruct_fused_dual(const FusionFrameSystem& ffs, const LocalMeasurements& m,
                                   const std::optional<Vec>& reference) {
  return reconstruct_fused_dual(ffs, precompute_fused_dual(ffs), m, reference);
}

ReconReport reconstruct_fused_dual(const FusionFrameSystem& ffs, const FusedDual& precomputed,
                                   const LocalMeasurements& m, const std::optional<Vec>& reference) {
  check_shapes(ffs, m);
  if (precomputed.duals.size() != ffs.total_local_vectors() || precomputed.duals.ambient_dim() != ffs.ambient_dim()) {
    throw Error(ErrorKind::ShapeMismatch, "precomputed duals do not match the system");
  }
  ReconReport r;
  r.method = ReconMethod::FusedDual;
  r.estimate = Vec::Zero(ffs.ambient_dim());
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < ffs.size(); ++i) {
    const double v = ffs.fusion_frame()[i].weight;
    const Eigen::Index n = m.coefficients[i].size();
    r.estimate += v * (precomputed.duals.vectors().middleCols(col, n) * m.coefficients[i]);
    col += n;
  }
  r.precompute_solves = precomputed.precompute_solves;
  r.duals_precomputed = true;
  r.residual = relative_error(r.estimate, reference);
  return r;
}

ReconReport reconstruct_iterative(const FusionFrame& ff, const FusionCoefficients& coeffs, std::size_t n_max,
                                  double tol, const std::optional<Vec>& reference) {
  const FusionBounds b = fusion_bounds(ff);
  if (!b.is_frame) throw Error(ErrorKind::NotAFrame, "iteration needs a positive lower bound");
  const double c = b.lower;
  const double d = b.upper;
  const double step = 2.0 / (c + d);
  const double rate = (d - c) / (d + c);

  // S_W f is available from the coefficients alone.
  const Vec sf = fusion_synthesis(ff, coeffs);
  ReconReport r;
  r.method = ReconMethod::Iterative;
  r.estimate = Vec::Zero(ff.ambient_dim());

  double bound = 1.0;
  auto record = [&](std::size_t n) {
    r.trace.push_back({n, bound, relative_error(r.estimate, reference)});
  };
  record(0);
  for (std::size_t n = 1; n <= n_max && bound > tol; ++n) {
    const Vec s_prev = fusion_synthesis(ff, fusion_analysis(ff, r.estimate));
    r.estimate += step * (sf - s_prev);
    bound *= rate;
    record(n);
  }
  r.residual = relative_error(r.estimate, reference);
  return r;
}

std::string_view to_string(FailureMode mode) noexcept {
  return mode == FailureMode::Undetected ? "undetected" : "detected";
}

std::optional<ReconReport> reconstruct_with_dropout(const FusionFrameSystem& ffs, const LocalMeasurements& m,
                                                    const std::vector<bool>& dropped, FailureMode mode,
                                                    const std::optional<Vec>& reference) {
  check_shapes(ffs, m);
  if (dropped.size() != ffs.size()) throw Error(ErrorKind::ShapeMismatch, "one dropout flag per subspace");
  if (mode == FailureMode::Undetected) {
    LocalMeasurements zeroed = m;
    for (std::size_t i = 0; i < ffs.size(); ++i) {
      if (dropped[i]) zeroed.coefficients[i].setZero();
    }
    return reconstruct_local_fusion(ffs, zeroed, reference);
  }

  std::vector<FusionComponent> comps;
  std::vector<Frame> locals;
  std::vector<Frame> duals;
  LocalMeasurements kept;
  for (std::size_t i = 0; i < ffs.size(); ++i) {
    if (dropped[i]) continue;
    comps.push_back(ffs.fusion_frame()[i]);
    locals.push_back(ffs.local_frames()[i]);
    duals.push_back(ffs.local_duals()[i]);
    kept.coefficients.push_back(m.coefficients[i]);
  }
  if (comps.empty()) return std::nullopt;
  FusionFrame survivors(std::move(comps));
  if (!fusion_bounds(survivors).is_frame) return std::nullopt;
  return reconstruct_local_fusion(FusionFrameSystem(std::move(survivors), std::move(locals), std::move(duals)), kept,
                                  reference);
}

double fused_dual_check(const FusionFrameSystem& ffs, std::size_t samples, std::uint64_t seed) {
  const Frame primal = ffs.flattened();
  const Frame dual = fused_global_dual(ffs);
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec f = random_unit_vector(ffs.ambient_dim(), rng);
    worst = std::max(worst, (synthesis(primal, analysis(dual, f)) - f).norm());
  }
  return worst;
}

double dual_relation_check(const FusionFrameSystem& ffs, std::size_t samples, std::uint64_t seed) {
  const SpdSolver solver = fusion_solver(ffs.fusion_frame());
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec f = random_unit_vector(ffs.ambient_dim(), rng);
    Vec sum = Vec::Zero(ffs.ambient_dim());
    for (std::size_t i = 0; i < ffs.size(); ++i) {
      const double v = ffs.fusion_frame()[i].weight;
      const Vec c = analysis(ffs.local_duals()[i], f) * v;
      sum += solver.solve(Vec(v * synthesis(ffs.local_frames()[i], c)));
    }
    worst = std::max(worst, (sum - f).norm());
  }
  return worst;
}

double canonical_dual_gap(const FusionFrameSystem& ffs) {
  const SpdSolver solver = fusion_solver(ffs.fusion_frame());
  const Frame flat = ffs.flattened();
  const Mat canonical = canonical_dual(flat).vectors();
  double gap = 0.0;
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < ffs.size(); ++i) {
    const double v = ffs.fusion_frame()[i].weight;
    const Mat local_dual = canonical_dual(ffs.local_frames()[i]).vectors();
    const Mat fused = solver.solve(Mat(v * local_dual));
    for (Eigen::Index j = 0; j < fused.cols(); ++j, ++col) {
      const double scale = std::max(canonical.col(col).norm(), 1e-300);
      gap = std::max(gap, (fused.col(j) - canonical.col(col)).norm() / scale);
    }
  }
  return gap;
}

}  // namespace fusionkit
