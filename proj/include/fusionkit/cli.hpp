#pragma once

// Command-line front end. `run` parses arguments (and an optional config
// file) into a RunConfig and dispatches to one of the cmd_* functions, which
// write their report to `out`. Exit codes: 0 success, 1 usage or I/O error,
// 2 mathematical failure.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fusionkit::cli {

enum class Command { Generate, Check, Recon, Perturb, Simulate };

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitMath = 2;

struct RunConfig {
  Command command = Command::Check;
  std::string input;
  std::string output;
  std::uint64_t seed = 1;

  // generate
  std::string kind = "random";
  long dim = 8;
  long subspaces = 4;
  long subspace_dim = 3;
  long local_size = 5;
  long frame_size = 20;
  long overlap = 1;
  bool parseval_locals = false;
  double min_weight = 0.5;
  double max_weight = 2.0;

  // recon / simulate
  std::vector<double> signal;
  double sigma = 0.0;  // recon measurement noise
  std::vector<double> sigmas{0.0};  // simulate grid
  std::vector<double> dropouts{0.0};
  long max_iter = 500;
  double tol = 1e-12;
  bool timing = false;

  // perturb
  std::string mode = "subspace-rotate";
  double noise = 1e-3;

  long trials = 100;
};

int cmd_generate(const RunConfig& cfg, std::ostream& out);
int cmd_check(const RunConfig& cfg, std::ostream& out);
int cmd_recon(const RunConfig& cfg, std::ostream& out);
int cmd_perturb(const RunConfig& cfg, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, std::ostream& out);

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Decimal with 17 significant digits.
std::string format_double(double x);

}  // namespace fusionkit::cli
