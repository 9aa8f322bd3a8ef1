#include "fusionkit/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fusionkit {

namespace {

constexpr std::size_t kAscentSteps = 50;
constexpr double kAscentStep = 0.1;

void require_lambdas(double lambda1, double lambda2) {
  if (!(lambda1 >= 0.0 && lambda1 < 1.0 && lambda2 >= 0.0 && lambda2 < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "lambdas must lie in [0, 1)");
  }
}

// Unit-sphere ascent: x <- normalize(x + step * tangential gradient).
template <class Value, class Gradient>
double sphere_ascent(Vec x, const Value& value, const Gradient& gradient) {
  double best = value(x);
  for (std::size_t s = 0; s < kAscentSteps; ++s) {
    Vec g = gradient(x);
    g -= g.dot(x) * x;
    if (!g.allFinite() || g.norm() == 0.0) break;
    x += kAscentStep * g;
    x.normalize();
    best = std::max(best, value(x));
  }
  return best;
}

// d/dx ||A x|| = A^T A x / ||A x||, given A^T A x and ||A x||.
Vec norm_gradient(const Vec& gram_x, double norm) {
  return norm > 0.0 ? Vec(gram_x / norm) : Vec(Vec::Zero(gram_x.size()));
}

}  // namespace

double kappa(double lambda1, double lambda2) {
  return (1.0 - lambda1) / (1.0 + lambda2) - lambda1 * (1.0 + lambda2) / (1.0 - lambda1) - lambda2;
}

// --------------------------------------------------- subspace perturbation

SubspaceEpsilon subspace_epsilon(const Subspace& w, const Subspace& wt, double lambda1, double lambda2,
                                 std::size_t samples, std::uint64_t seed) {
  if (w.ambient_dim() != wt.ambient_dim()) throw Error(ErrorKind::DimMismatch, "subspaces in different spaces");
  require_lambdas(lambda1, lambda2);
  const Mat& p = w.projector();
  const Mat& q = wt.projector();
  const Mat diff = p - q;

  auto value = [&](const Vec& f) {
    return (diff * f).norm() - lambda1 * (p * f).norm() - lambda2 * (q * f).norm();
  };
  auto gradient = [&](const Vec& f) {
    const Vec df = diff * f;
    const Vec pf = p * f;
    const Vec qf = q * f;
    return Vec(norm_gradient(diff * df, df.norm()) - lambda1 * norm_gradient(pf, pf.norm()) -
               lambda2 * norm_gradient(qf, qf.norm()));
  };

  Rng rng(seed);
  double best = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    best = std::max(best, sphere_ascent(random_unit_vector(w.ambient_dim(), rng), value, gradient));
  }
  SubspaceEpsilon out;
  out.certified = operator_norm(diff);
  out.estimate = std::min(best, out.certified);
  return out;
}

SubspacePerturbation subspace_perturbation(const FusionFrame& ff, const FusionFrame& fft, double lambda1,
                                           double lambda2, double epsilon, std::size_t samples, std::uint64_t seed) {
  if (ff.size() != fft.size() || ff.ambient_dim() != fft.ambient_dim()) {
    throw Error(ErrorKind::ShapeMismatch, "fusion frames must pair up component by component");
  }
  require_lambdas(lambda1, lambda2);
  SubspacePerturbation out{lambda1, lambda2, epsilon, std::vector<bool>(ff.size(), true)};
  Rng rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec f = random_unit_vector(ff.ambient_dim(), rng);
    for (std::size_t i = 0; i < ff.size(); ++i) {
      const Vec pf = ff[i].subspace.project(f);
      const Vec qf = fft[i].subspace.project(f);
      const double slack = lambda1 * pf.norm() + lambda2 * qf.norm() + epsilon - (pf - qf).norm();
      if (slack < -1e-9) out.verified[i] = false;
    }
  }
  return out;
}

bool no_perturbation_of_projection_check(const Subspace& w, const Subspace& wt, double lambda1, double lambda2,
                                         std::size_t samples, std::uint64_t seed) {
  const SubspaceEpsilon eps = subspace_epsilon(w, wt, lambda1, lambda2, samples, seed);
  return !(eps.estimate <= 1e-10) || eps.certified <= 1e-8;
}

PredictedBounds predicted_bounds_subspace(double c, double d, double weight_energy, double lambda1, double lambda2,
                                          double epsilon) {
  require_lambdas(lambda1, lambda2);
  if (!(epsilon >= 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be nonnegative");
  const double root_energy = std::sqrt(weight_energy);
  const double margin = (1.0 - lambda1) * std::sqrt(c) - epsilon * root_energy;
  if (!(margin > 0.0)) throw HypothesisViolated("(1 - l1) sqrt(C) - eps sqrt(sum v^2) must be positive", margin);
  const double lo = margin / (1.0 + lambda2);
  const double hi = (std::sqrt(d) * (1.0 + lambda1) + epsilon * root_energy) / (1.0 - lambda2);
  return {lo * lo, hi * hi};
}

PredictedBounds predicted_bounds_subspace(const FusionFrame& ff, double lambda1, double lambda2, double epsilon) {
  const FusionBounds b = fusion_bounds(ff);
  return predicted_bounds_subspace(b.lower, b.upper, ff.weight_energy(), lambda1, lambda2, epsilon);
}

// ------------------------------------------------- local frame perturbation

FrameLambda frame_perturbation_lambda(const Frame& f, const Frame& ft, std::size_t samples, std::uint64_t seed) {
  if (f.ambient_dim() != ft.ambient_dim() || f.size() != ft.size()) {
    throw Error(ErrorKind::ShapeMismatch, "perturbed frame must have the same shape");
  }
  const Mat& a = f.vectors();
  const Mat& b = ft.vectors();
  const Mat e = a - b;
  const Mat ga = a.transpose() * a;
  const Mat gb = b.transpose() * b;
  const Mat ge = e.transpose() * e;

  auto value = [&](const Vec& x) {
    const double den = (a * x).norm() + (b * x).norm();
    return den > 1e-14 ? (e * x).norm() / den : 0.0;
  };
  auto gradient = [&](const Vec& x) {
    const double na = (a * x).norm();
    const double nb = (b * x).norm();
    const double ne = (e * x).norm();
    const double den = na + nb;
    if (den <= 1e-14) return Vec(Vec::Zero(x.size()));
    const Vec dnum = norm_gradient(ge * x, ne);
    const Vec dden = norm_gradient(ga * x, na) + norm_gradient(gb * x, nb);
    return Vec((dnum * den - ne * dden) / (den * den));
  };

  Rng rng(seed);
  FrameLambda out;
  for (std::size_t s = 0; s < samples; ++s) {
    out.estimate = std::max(out.estimate, sphere_ascent(random_unit_vector(f.size(), rng), value, gradient));
  }

  const Eigen::Index ra = numerical_rank(a);
  const Eigen::Index rb = numerical_rank(b);
  const Mat row_a = pseudo_inverse(a) * a;
  const Mat id = Mat::Identity(f.size(), f.size());
  const bool same_kernel = ra == rb && operator_norm(b * (id - row_a)) <= 1e-10 * std::max(operator_norm(b), 1.0);
  const double smin = smallest_nonzero_singular_value(a) + smallest_nonzero_singular_value(b);
  out.certified = same_kernel && smin > 0.0 ? operator_norm(e) / smin : std::numeric_limits<double>::infinity();
  return out;
}

bool EquivalenceReport::ratios_ok(double rel_tol) const {
  return ratio_low >= envelope_low * (1.0 - rel_tol) && ratio_high <= envelope_high * (1.0 + rel_tol);
}

bool EquivalenceReport::iso_ok(double tol) const {
  return kappa <= 0.0 || iso_const >= kappa - tol;
}

EquivalenceReport equivalence_check(const Frame& f, const Frame& ft, double lambda1, double lambda2,
                                    std::size_t samples, std::uint64_t seed) {
  require_lambdas(lambda1, lambda2);
  const FrameLambda lam = frame_perturbation_lambda(f, ft, 16, derive_seed(seed, 0));
  if (lam.estimate > std::min(lambda1, lambda2) + 1e-9) {
    throw Error(ErrorKind::NotAPerturbation, "measured lambda " + std::to_string(lam.estimate) + " exceeds the given constants");
  }
  EquivalenceReport r;
  r.envelope_low = (1.0 - lambda1) / (1.0 + lambda2);
  r.envelope_high = (1.0 + lambda2) / (1.0 - lambda1);
  r.kappa = kappa(lambda1, lambda2);
  r.dim_equal = numerical_rank(f.vectors()) == numerical_rank(ft.vectors());

  Rng rng(derive_seed(seed, 1));
  r.ratio_low = std::numeric_limits<double>::infinity();
  r.ratio_high = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec a = random_unit_vector(f.size(), rng);
    const double nt = (ft.vectors() * a).norm();
    if (nt <= 1e-12) continue;
    const double ratio = (f.vectors() * a).norm() / nt;
    r.ratio_low = std::min(r.ratio_low, ratio);
    r.ratio_high = std::max(r.ratio_high, ratio);
  }
  if (r.ratio_high == 0.0) r.ratio_low = r.ratio_high = 1.0;

  const Mat pw = span_projector(f);
  const Mat pwt = span_projector(ft);
  r.iso_const = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec x = random_unit_vector(f.ambient_dim(), rng);
    const Vec y = pwt * x;
    if (y.norm() <= 1e-12) continue;
    r.iso_const = std::min(r.iso_const, (pw * y).norm() / y.norm());
  }
  if (!std::isfinite(r.iso_const)) r.iso_const = 1.0;
  return r;
}

LocalPrediction predicted_bounds_local(double c, double d, double weight_energy, double lambda1, double lambda2) {
  require_lambdas(lambda1, lambda2);
  const double k = kappa(lambda1, lambda2);
  if (k > 1.0) throw Error(ErrorKind::InvalidArgument, "kappa exceeds 1");
  LocalPrediction out;
  out.epsilon = std::sqrt(2.0 * (1.0 - k));
  const double root_energy = std::sqrt(weight_energy);
  const double margin = std::sqrt(c) - out.epsilon * root_energy;
  if (!(margin > 0.0)) throw HypothesisViolated("sqrt(C) - eps sqrt(sum v^2) must be positive", margin);
  const double hi = std::sqrt(d) + out.epsilon * root_energy;
  out.lower = margin * margin;
  out.upper = hi * hi;
  return out;
}

LocalPrediction predicted_bounds_local(const FusionFrameSystem& ffs, double lambda1, double lambda2) {
  const FusionBounds b = fusion_bounds(ffs.fusion_frame());
  return predicted_bounds_local(b.lower, b.upper, ffs.fusion_frame().weight_energy(), lambda1, lambda2);
}

// --------------------------------------------------------------- experiment

std::string_view to_string(PerturbMode mode) noexcept {
  switch (mode) {
    case PerturbMode::SubspaceRotate: return "subspace-rotate";
    case PerturbMode::LocalFrameJitter: return "local-frame-jitter";
  }
  return "unknown";
}

PerturbMode parse_perturb_mode(std::string_view text) {
  if (text == "subspace-rotate") return PerturbMode::SubspaceRotate;
  if (text == "local-frame-jitter") return PerturbMode::LocalFrameJitter;
  throw Error(ErrorKind::InvalidArgument, "unknown perturbation mode '" + std::string(text) + "'");
}

double PerturbSummary::containment_rate() const {
  return hypothesis_pass == 0 ? 1.0 : static_cast<double>(contained) / static_cast<double>(hypothesis_pass);
}

PerturbSummary summarize(const std::vector<PerturbTrial>& rows) {
  PerturbSummary s;
  for (const auto& r : rows) {
    ++s.trials;
    if (r.discarded) {
      ++s.discarded;
      continue;
    }
    if (r.hypothesis_pass) {
      ++s.hypothesis_pass;
      if (r.contained) ++s.contained;
    }
  }
  return s;
}

Subspace rotate_subspace(const Subspace& w, double theta, Rng& rng) {
  const Eigen::Index m = w.ambient_dim();
  if (w.dim() == m || theta == 0.0) return w;
  const Vec u = w.basis() * random_unit_vector(w.dim(), rng);
  Vec o = random_unit_vector(m, rng);
  o -= w.project(o);
  while (o.norm() < 1e-8) {
    o = random_unit_vector(m, rng);
    o -= w.project(o);
  }
  o.normalize();
  const Mat rot = Mat::Identity(m, m) + (std::cos(theta) - 1.0) * (u * u.transpose() + o * o.transpose()) +
                  std::sin(theta) * (o * u.transpose() - u * o.transpose());
  return Subspace::from_vectors(rot * w.basis());
}

Frame jitter_frame(const Frame& f, double scale, Rng& rng) {
  const Mat row = pseudo_inverse(f.vectors()) * f.vectors();
  return Frame(f.vectors() + gaussian_matrix(f.ambient_dim(), f.size(), rng, scale) * row, f.label());
}

std::vector<PerturbTrial> perturbation_experiment(const FusionFrameSystem& ffs, double noise_scale, PerturbMode mode,
                                                  std::size_t trials, std::uint64_t seed) {
  const FusionFrame& ff = ffs.fusion_frame();
  const FusionBounds base = fusion_bounds(ff);
  const double energy = ff.weight_energy();
  std::vector<PerturbTrial> rows;
  rows.reserve(trials);

  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    PerturbTrial row;
    row.trial = t;
    row.mode = mode;
    row.noise_scale = noise_scale;

    std::vector<FusionComponent> comps;
    comps.reserve(ff.size());
    if (mode == PerturbMode::SubspaceRotate) {
      double eps = 0.0;
      for (const auto& c : ff.components()) {
        const double theta = noise_scale > 0.0 ? uniform(rng, 0.0, noise_scale) : 0.0;
        Subspace rotated = rotate_subspace(c.subspace, theta, rng);
        eps = std::max(eps, operator_norm(c.subspace.projector() - rotated.projector()));
        comps.push_back({std::move(rotated), c.weight});
      }
      row.measured = eps;
      try {
        row.predicted = predicted_bounds_subspace(base.lower, base.upper, energy, 0.0, 0.0, eps);
        row.hypothesis_pass = true;
      } catch (const HypothesisViolated&) {
        row.hypothesis_pass = false;
      }
    } else {
      double lambda = 0.0;
      for (std::size_t i = 0; i < ff.size() && !row.discarded; ++i) {
        const Frame& local = ffs.local_frames()[i];
        Frame jittered = noise_scale > 0.0 ? jitter_frame(local, noise_scale, rng) : local;
        if (numerical_rank(jittered.vectors()) != numerical_rank(local.vectors())) {
          row.discarded = true;
          break;
        }
        lambda = std::max(lambda, frame_perturbation_lambda(local, jittered, 0, 0).certified);
        comps.push_back({Subspace::from_vectors(jittered.vectors()), ff[i].weight});
      }
      row.measured = lambda;
      if (row.discarded) {
        rows.push_back(row);
        continue;
      }
      if (lambda < 1.0) {
        try {
          const LocalPrediction p = predicted_bounds_local(base.lower, base.upper, energy, lambda, lambda);
          row.predicted = {p.lower, p.upper};
          row.hypothesis_pass = true;
        } catch (const HypothesisViolated&) {
          row.hypothesis_pass = false;
        }
      }
    }

    const FusionBounds actual = fusion_bounds(FusionFrame(std::move(comps)));
    row.actual_lower = actual.lower;
    row.actual_upper = actual.upper;
    row.contained = row.hypothesis_pass && actual.lower >= row.predicted.lower * (1.0 - 1e-9) &&
                    actual.upper <= row.predicted.upper * (1.0 + 1e-9);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fusionkit
