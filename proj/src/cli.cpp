#include "fusionkit/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>

#include "CLI11.hpp"
#include "fusionkit/catalog.hpp"
#include "fusionkit/fixture.hpp"
#include "fusionkit/perturb.hpp"
#include "fusionkit/random.hpp"
#include "fusionkit/recon.hpp"

namespace fusionkit::cli {

namespace {

class Csv {
public:
  explicit Csv(std::ostream& out) : out_(out) {}

  Csv& cell(const std::string& s) {
    sep();
    out_ << s;
    return *this;
  }
  Csv& cell(double x) { return cell(format_double(x)); }
  Csv& cell(std::size_t x) { return cell(std::to_string(x)); }
  Csv& cell(bool b) { return cell(std::string(b ? "true" : "false")); }
  Csv& cell(const std::optional<double>& x) { return x ? cell(*x) : cell(std::string()); }
  Csv& blank() { return cell(std::string()); }
  void end() {
    out_ << '\n';
    first_ = true;
  }

private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }
  std::ostream& out_;
  bool first_ = true;
};

void header(Csv& csv, std::initializer_list<const char*> names) {
  for (const char* n : names) csv.cell(std::string(n));
  csv.end();
}

std::size_t to_size(long v, const char* what) {
  if (v < 0) throw Error(ErrorKind::BadDims, std::string(what) + " must be nonnegative");
  return static_cast<std::size_t>(v);
}

Frame random_spanning_frame(Eigen::Index m, Eigen::Index n, Rng& rng) {
  for (;;) {
    Frame f(gaussian_matrix(m, n, rng));
    if (numerical_rank(f.vectors()) == m) return f;
  }
}

FusionFrameSystem generate_system(const RunConfig& cfg) {
  Rng rng(cfg.seed);
  if (cfg.kind == "random") {
    RandomSystemSpec shape;
    shape.ambient_dim = cfg.dim;
    shape.subspaces = to_size(cfg.subspaces, "subspaces");
    shape.subspace_dim = cfg.subspace_dim;
    shape.local_size = cfg.local_size;
    shape.min_weight = cfg.min_weight;
    shape.max_weight = cfg.max_weight;
    shape.parseval_locals = cfg.parseval_locals;
    return random_fusion_frame_system(shape, rng);
  }
  if (cfg.kind == "split") {
    if (cfg.dim < 1 || cfg.subspaces < 1 || cfg.frame_size < cfg.dim || cfg.overlap < 0) {
      throw Error(ErrorKind::BadDims, "split needs frame-size >= dim and at least one block");
    }
    const Frame frame = random_spanning_frame(cfg.dim, cfg.frame_size, rng);
    const auto n = static_cast<std::size_t>(cfg.frame_size);
    const auto k = static_cast<std::size_t>(cfg.subspaces);
    const std::size_t stride = (n + k - 1) / k;
    const std::size_t len = std::min(n, stride + static_cast<std::size_t>(cfg.overlap));
    std::vector<std::vector<std::size_t>> blocks(k);
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t j = 0; j < len; ++j) blocks[b].push_back((b * stride + j) % n);
    return split_frame(frame, blocks, std::vector<double>(k, 1.0));
  }
  if (cfg.kind == "onb") return catalog::orthonormal_fusion_basis(cfg.dim, cfg.subspace_dim);
  if (cfg.kind == "lines-and-plane") return catalog::lines_and_plane();
  if (cfg.kind == "skew-lines") return catalog::skew_lines();
  if (cfg.kind == "mercedes-split") return split_frame(catalog::mercedes_benz(), {{0, 1}, {1, 2}}, {1.0, 1.0});
  throw Error(ErrorKind::BadDims, "unknown fixture kind '" + cfg.kind + "'");
}

Vec signal_for(const RunConfig& cfg, Eigen::Index m) {
  if (!cfg.signal.empty()) {
    if (static_cast<Eigen::Index>(cfg.signal.size()) != m) throw Error(ErrorKind::DimMismatch, "signal length");
    return Eigen::Map<const Vec>(cfg.signal.data(), m);
  }
  Rng rng(derive_seed(cfg.seed, 0));
  return random_unit_vector(m, rng);
}

void add_noise(LocalMeasurements& m, double sigma, Rng& rng) {
  if (sigma == 0.0) return;
  for (auto& c : m.coefficients) c += gaussian_matrix(c.size(), 1, rng, sigma);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  out << system_to_json(generate_system(cfg)).dump(2) << '\n';
  return kExitOk;
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const FusionFrameSystem ffs = load_fixture(cfg.input);
  const FusionFrame& ff = ffs.fusion_frame();
  const FusionBounds b = fusion_bounds(ff);
  const LocalGlobalBounds lg = local_global_bounds(ffs);

  nlohmann::ordered_json j;
  j["C"] = b.lower;
  j["D"] = b.upper;
  j["is_frame"] = b.is_frame;
  j["is_tight"] = b.is_tight;
  j["is_parseval"] = b.is_parseval;
  j["is_orthonormal_fusion_basis"] = b.is_orthonormal_fusion_basis;
  j["redundancy"] = redundancy(ff);
  j["local_bounds"] = {{"A", ffs.local_lower()}, {"B", ffs.local_upper()}};
  j["flattened_frame"] = {{"predicted", {{"lower", lg.predicted.lower}, {"upper", lg.predicted.upper}}},
                          {"actual", {{"lower", lg.actual.lower}, {"upper", lg.actual.upper}}},
                          {"contained", lg.contained()}};
  j["operator_agreement_residual"] = operator_norm(fusion_operator(ff) - fusion_operator_via_locals(ffs));
  out << j.dump(2) << '\n';
  if (!b.is_frame) {
    std::cerr << "NotAFrame: lower fusion frame bound " << format_double(b.lower) << " is numerically zero\n";
    return kExitMath;
  }
  return kExitOk;
}

int cmd_recon(const RunConfig& cfg, std::ostream& out) {
  using Clock = std::chrono::steady_clock;
  const FusionFrameSystem ffs = load_fixture(cfg.input);
  const FusionFrame& ff = ffs.fusion_frame();
  if (!fusion_bounds(ff).is_frame) throw Error(ErrorKind::NotAFrame, "fixture is not a fusion frame");

  const Vec f = signal_for(cfg, ffs.ambient_dim());
  LocalMeasurements m = measure(ffs, f);
  Rng noise_rng(derive_seed(cfg.seed, 1));
  add_noise(m, cfg.sigma, noise_rng);
  const FusionCoefficients coeffs = coefficients_from_measurements(ffs, m);

  auto timed = [](auto&& fn, double& ms) {
    const auto t0 = Clock::now();
    auto r = fn();
    ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    return r;
  };
  double t_central = 0, t_local = 0, t_fused = 0, t_iter = 0;
  ReconReport central = timed(
      [&] {
        ReconReport r;
        r.method = ReconMethod::Centralized;
        r.estimate = reconstruct_exact(ff, coeffs);
        r.solves = 1;
        r.residual = (r.estimate - f).norm() / f.norm();
        return r;
      },
      t_central);
  const ReconReport local = timed([&] { return reconstruct_local_fusion(ffs, m, f); }, t_local);
  const FusedDual fused_dual = precompute_fused_dual(ffs);
  const ReconReport fused = timed([&] { return reconstruct_fused_dual(ffs, fused_dual, m, f); }, t_fused);
  const ReconReport iter = timed(
      [&] { return reconstruct_iterative(ff, coeffs, to_size(cfg.max_iter, "max-iter"), cfg.tol, f); }, t_iter);

  Csv csv(out);
  if (cfg.timing) {
    header(csv, {"row", "method", "n", "residual", "certified_bound", "actual_error", "solves", "precompute_solves",
                 "wall_time_ms"});
  } else {
    header(csv, {"row", "method", "n", "residual", "certified_bound", "actual_error", "solves", "precompute_solves"});
  }
  auto method_row = [&](const ReconReport& r, double ms) {
    csv.cell(std::string("method")).cell(std::string(to_string(r.method)));
    if (r.method == ReconMethod::Iterative) {
      csv.cell(r.trace.back().n);
    } else {
      csv.blank();
    }
    csv.cell(r.residual).blank().blank().cell(r.solves).cell(r.precompute_solves);
    if (cfg.timing) csv.cell(ms);
    csv.end();
  };
  method_row(central, t_central);
  method_row(local, t_local);
  method_row(fused, t_fused);
  method_row(iter, t_iter);

  csv.cell(std::string("agreement")).cell(std::string("local-fusion~fused-dual")).blank();
  csv.cell((local.estimate - fused.estimate).cwiseAbs().maxCoeff()).blank().blank().blank().blank();
  if (cfg.timing) csv.blank();
  csv.end();

  for (const auto& step : iter.trace) {
    csv.cell(std::string("trace")).cell(std::string("iterative")).cell(step.n).blank().cell(step.bound);
    csv.cell(step.actual_error).blank().blank();
    if (cfg.timing) csv.blank();
    csv.end();
  }
  return kExitOk;
}

int cmd_perturb(const RunConfig& cfg, std::ostream& out) {
  const FusionFrameSystem ffs = load_fixture(cfg.input);
  const PerturbMode mode = parse_perturb_mode(cfg.mode);
  const auto rows = perturbation_experiment(ffs, cfg.noise, mode, to_size(cfg.trials, "trials"), cfg.seed);

  Csv csv(out);
  header(csv, {"trial", "mode", "noise_scale", "measured", "discarded", "hypothesis_pass", "predicted_lower",
               "predicted_upper", "actual_lower", "actual_upper", "contained"});
  for (const auto& r : rows) {
    csv.cell(r.trial).cell(std::string(to_string(r.mode))).cell(r.noise_scale).cell(r.measured).cell(r.discarded);
    csv.cell(r.hypothesis_pass);
    if (r.hypothesis_pass) {
      csv.cell(r.predicted.lower).cell(r.predicted.upper);
    } else {
      csv.blank().blank();
    }
    csv.cell(r.actual_lower).cell(r.actual_upper).cell(r.contained).end();
  }
  const PerturbSummary s = summarize(rows);
  // Summary: counts in the flag columns, containment rate in the last one.
  csv.cell(std::string("summary")).cell(std::string(to_string(mode))).cell(cfg.noise).blank();
  csv.cell(s.discarded).cell(s.hypothesis_pass).blank().blank().blank().blank().cell(s.containment_rate()).end();
  if (s.containment_rate() < 1.0) {
    std::cerr << "containment failed in " << (s.hypothesis_pass - s.contained) << " trials\n";
    return kExitMath;
  }
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const FusionFrameSystem ffs = load_fixture(cfg.input);
  if (!fusion_bounds(ffs.fusion_frame()).is_frame) throw Error(ErrorKind::NotAFrame, "fixture is not a fusion frame");
  const std::size_t trials = to_size(cfg.trials, "trials");

  Csv csv(out);
  header(csv, {"sigma", "dropout", "failure_mode", "trials", "valid_trials", "not_a_frame", "mean_error",
               "median_error", "max_error"});
  std::uint64_t cell_index = 0;
  for (const double sigma : cfg.sigmas) {
    for (const double p : cfg.dropouts) {
      if (!(p >= 0.0 && p <= 1.0) || !(sigma >= 0.0)) throw Error(ErrorKind::BadDims, "sigma >= 0 and dropout in [0,1]");
      std::vector<double> errors[2];
      std::size_t not_a_frame[2] = {0, 0};
      for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(derive_seed(cfg.seed, cell_index), t));
        const Vec f = random_unit_vector(ffs.ambient_dim(), rng);
        LocalMeasurements m = measure(ffs, f);
        add_noise(m, sigma, rng);
        std::vector<bool> dropped(ffs.size());
        std::bernoulli_distribution drop(p);
        for (std::size_t i = 0; i < ffs.size(); ++i) dropped[i] = drop(rng);
        for (int mode = 0; mode < 2; ++mode) {
          const auto r = reconstruct_with_dropout(ffs, m, dropped, mode == 0 ? FailureMode::Undetected : FailureMode::Detected, f);
          if (r) {
            errors[mode].push_back(*r->residual);
          } else {
            ++not_a_frame[mode];
          }
        }
      }
      for (int mode = 0; mode < 2; ++mode) {
        const auto& e = errors[mode];
        const double mean = e.empty() ? 0.0 : std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size());
        const double mx = e.empty() ? 0.0 : *std::max_element(e.begin(), e.end());
        csv.cell(sigma).cell(p).cell(std::string(to_string(mode == 0 ? FailureMode::Undetected : FailureMode::Detected)));
        csv.cell(trials).cell(e.size()).cell(not_a_frame[mode]).cell(mean).cell(median(e)).cell(mx).end();
      }
      ++cell_index;
    }
  }
  return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fusionkit: fusion frame construction, reconstruction and perturbation experiments"};
  app.set_config("--config", "", "TOML/INI file supplying any flag; the command line takes precedence");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  app.add_option("--seed", cfg.seed, "Root seed for every random draw")->capture_default_str();
  app.add_option("--output", cfg.output, "Write the report here instead of standard output");

  auto* gen = app.add_subcommand("generate", "Write a fusion frame system fixture (JSON)");
  gen->add_option("--kind", cfg.kind, "random | split | onb | lines-and-plane | skew-lines | mercedes-split")
      ->capture_default_str();
  gen->add_option("--dim", cfg.dim, "Ambient dimension M")->capture_default_str();
  gen->add_option("--subspaces", cfg.subspaces, "Number of subspaces / blocks")->capture_default_str();
  gen->add_option("--subspace-dim", cfg.subspace_dim, "Subspace dimension (random) or group size (onb)")
      ->capture_default_str();
  gen->add_option("--local-size", cfg.local_size, "Vectors per local frame (random)")->capture_default_str();
  gen->add_option("--frame-size", cfg.frame_size, "Frame vectors to split (split)")->capture_default_str();
  gen->add_option("--overlap", cfg.overlap, "Extra vectors shared by consecutive blocks (split)")->capture_default_str();
  gen->add_flag("--parseval-locals", cfg.parseval_locals, "Use Parseval local frames (random)");
  gen->add_option("--min-weight", cfg.min_weight)->capture_default_str();
  gen->add_option("--max-weight", cfg.max_weight)->capture_default_str();

  auto* check = app.add_subcommand("check", "Bounds, tightness and local/global report (JSON)");
  auto* recon = app.add_subcommand("recon", "Run every reconstruction method (CSV)");
  auto* pert = app.add_subcommand("perturb", "Perturbation containment sweep (CSV)");
  auto* sim = app.add_subcommand("simulate", "Noisy sensor network with dropouts (CSV)");
  for (auto* sub : {check, recon, pert, sim}) sub->add_option("--input", cfg.input, "Fixture JSON")->required();

  recon->add_option("--signal", cfg.signal, "Comma-separated signal; random unit vector from the seed otherwise")
      ->delimiter(',');
  recon->add_option("--sigma", cfg.sigma, "Measurement noise standard deviation")->capture_default_str();
  recon->add_option("--max-iter", cfg.max_iter, "Iteration cap of the frame algorithm")->capture_default_str();
  recon->add_option("--tol", cfg.tol, "Stop once the certified bound reaches this value")->capture_default_str();
  recon->add_flag("--timing", cfg.timing, "Append wall-clock times (breaks byte-identical output)");

  pert->add_option("--mode", cfg.mode, "subspace-rotate | local-frame-jitter")->capture_default_str();
  pert->add_option("--noise", cfg.noise, "Max rotation angle or jitter scale")->capture_default_str();
  pert->add_option("--trials", cfg.trials)->capture_default_str();

  sim->add_option("--sigma", cfg.sigmas, "Comma-separated noise levels")->delimiter(',');
  sim->add_option("--dropout", cfg.dropouts, "Comma-separated dropout probabilities")->delimiter(',');
  sim->add_option("--trials", cfg.trials)->capture_default_str();

  std::vector<std::string> argv_store{"fusionkit"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }

  if (gen->parsed()) cfg.command = Command::Generate;
  if (check->parsed()) cfg.command = Command::Check;
  if (recon->parsed()) cfg.command = Command::Recon;
  if (pert->parsed()) cfg.command = Command::Perturb;
  if (sim->parsed()) cfg.command = Command::Simulate;

  std::ofstream file;
  if (!cfg.output.empty()) {
    file.open(cfg.output);
    if (!file) {
      err << "cannot open output " << cfg.output << '\n';
      return kExitUsage;
    }
  }
  std::ostream& sink = cfg.output.empty() ? out : file;

  try {
    switch (cfg.command) {
      case Command::Generate: return cmd_generate(cfg, sink);
      case Command::Check: return cmd_check(cfg, sink);
      case Command::Recon: return cmd_recon(cfg, sink);
      case Command::Perturb: return cmd_perturb(cfg, sink);
      case Command::Simulate: return cmd_simulate(cfg, sink);
    }
  } catch (const Error& e) {
    err << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::NotAFrame:
      case ErrorKind::HypothesisViolated:
      case ErrorKind::NotPD:
        return kExitMath;
      default:
        return kExitUsage;
    }
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace fusionkit::cli
