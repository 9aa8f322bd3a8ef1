#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fusionkit/catalog.hpp"
#include "fusionkit/cli.hpp"
#include "fusionkit/fixture.hpp"
#include "fusionkit/random.hpp"
#include "helpers.hpp"

using namespace fusionkit;
using namespace fusionkit::test;
namespace fs = std::filesystem;

namespace {

/// Scratch directory removed on scope exit.
class TempDir {
public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("fusionkit_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
  fs::path path_;
};

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("fixture round trip") {
  Rng rng(4);
  const FusionFrameSystem ffs = random_fusion_frame_system(RandomSystemSpec{}, rng);
  const FusionFrameSystem back = system_from_json(nlohmann::json::parse(system_to_json(ffs).dump()));
  REQUIRE(back.size() == ffs.size());
  for (std::size_t i = 0; i < ffs.size(); ++i) {
    CHECK(back.fusion_frame()[i].weight == ffs.fusion_frame()[i].weight);
    CHECK(max_abs(back.fusion_frame()[i].subspace.projector() - ffs.fusion_frame()[i].subspace.projector()) < 1e-14);
    CHECK(max_abs(back.local_frames()[i].vectors() - ffs.local_frames()[i].vectors()) == 0.0);
    CHECK(max_abs(back.local_duals()[i].vectors() - ffs.local_duals()[i].vectors()) == 0.0);
  }

  TempDir dir;
  save_fixture(ffs, dir.file("a.json"));
  const FusionFrameSystem loaded = load_fixture(dir.file("a.json"));
  CHECK(max_abs(fusion_operator(loaded.fusion_frame()) - fusion_operator(ffs.fusion_frame())) < 1e-14);
}

TEST_CASE("fixture defaults and schema errors") {
  const auto minimal = nlohmann::json::parse(R"({"ambient_dim": 2, "components": [
      {"weight": 1, "subspace_basis": [[1, 0]]},
      {"weight": 2, "subspace_basis": [[0, 1]], "local_frame": [[0, 2], [0, -1]]}]})");
  const FusionFrameSystem ffs = system_from_json(minimal);
  CHECK(max_abs(ffs.local_frames()[0].vectors() - cols({{1, 0}})) < 1e-15);
  CHECK(max_abs(ffs.local_duals()[1].vectors() - cols({{0, 0.4}, {0, -0.2}})) < 1e-14);

  const auto bad = [](const char* text) { return kind_of([&] { system_from_json(nlohmann::json::parse(text)); }); };
  CHECK(bad(R"({"components": []})") == ErrorKind::SchemaError);
  CHECK(bad(R"({"ambient_dim": 2})") == ErrorKind::SchemaError);
  CHECK(bad(R"({"ambient_dim": 2, "components": [{"weight": 1}]})") == ErrorKind::SchemaError);
  CHECK(bad(R"({"ambient_dim": 2, "components": [{"weight": 1, "subspace_basis": [[1, 0, 0]]}]})") ==
        ErrorKind::SchemaError);
  CHECK(bad(R"({"ambient_dim": 2, "components": [{"weight": "x", "subspace_basis": [[1, 0]]}]})") ==
        ErrorKind::SchemaError);
  CHECK(kind_of([] { load_fixture("/nonexistent/fixture.json"); }) == ErrorKind::SchemaError);
}

TEST_CASE("format_double") {
  CHECK(cli::format_double(0.1) == "0.10000000000000001");
  CHECK(cli::format_double(2.0) == "2");
  CHECK(cli::format_double(-1.5e-300) == "-1.5000000000000001e-300");
}

TEST_CASE("generate and check") {
  TempDir dir;
  SUBCASE("orthonormal fusion basis") {
    REQUIRE(run_cli({"generate", "--kind", "onb", "--dim", "2", "--subspace-dim", "1", "--output", dir.file("onb.json")})
                .code == 0);
    const RunResult r = run_cli({"check", "--input", dir.file("onb.json")});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["C"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(j["D"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(j["redundancy"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(j["is_orthonormal_fusion_basis"].get<bool>());
    CHECK(j["is_parseval"].get<bool>());
  }

  SUBCASE("lines and plane") {
    REQUIRE(run_cli({"generate", "--kind", "lines-and-plane", "--output", dir.file("lp.json")}).code == 0);
    const RunResult r = run_cli({"check", "--input", dir.file("lp.json")});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["C"].get<double>() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(j["D"].get<double>() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(j["redundancy"].get<double>() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(j["is_tight"].get<bool>());
    CHECK(j["flattened_frame"]["contained"].get<bool>());
    CHECK(j["operator_agreement_residual"].get<double>() <= 1e-9);
  }

  SUBCASE("split of a 20-vector frame in R^8") {
    REQUIRE(run_cli({"generate", "--kind", "split", "--dim", "8", "--frame-size", "20", "--subspaces", "4",
                     "--overlap", "2", "--seed", "3", "--output", dir.file("split.json")})
                .code == 0);
    const RunResult r = run_cli({"check", "--input", dir.file("split.json")});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["C"].get<double>() > 0.0);
  }

  SUBCASE("random fixtures are accepted by every command") {
    REQUIRE(run_cli({"generate", "--seed", "9", "--output", dir.file("r.json")}).code == 0);
    CHECK(run_cli({"check", "--input", dir.file("r.json")}).code == 0);
    CHECK(run_cli({"recon", "--input", dir.file("r.json")}).code == 0);
    CHECK(run_cli({"perturb", "--input", dir.file("r.json"), "--trials", "5", "--noise", "1e-4"}).code == 0);
    CHECK(run_cli({"simulate", "--input", dir.file("r.json"), "--trials", "5"}).code == 0);
  }

  SUBCASE("non-frame exits 2") {
    write(dir.file("line.json"), R"({"ambient_dim": 2, "components": [{"weight": 1, "subspace_basis": [[1, 0]]}]})");
    const RunResult r = run_cli({"check", "--input", dir.file("line.json")});
    CHECK(r.code == 2);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["C"].get<double>() < 1e-12);
    CHECK_FALSE(j["is_frame"].get<bool>());
    CHECK(run_cli({"recon", "--input", dir.file("line.json")}).code == 2);
  }

  SUBCASE("usage and I/O errors exit 1") {
    CHECK(run_cli({}).code == 1);
    CHECK(run_cli({"frobnicate"}).code == 1);
    CHECK(run_cli({"check"}).code == 1);
    CHECK(run_cli({"check", "--input", dir.file("missing.json")}).code == 1);
    CHECK(run_cli({"generate", "--kind", "nonsense"}).code == 1);
    CHECK(run_cli({"generate", "--dim", "9", "--subspaces", "2", "--subspace-dim", "3"}).code == 1);
    write(dir.file("broken.json"), "{ not json");
    CHECK(run_cli({"check", "--input", dir.file("broken.json")}).code == 1);
  }
}

TEST_CASE("recon report") {
  TempDir dir;
  REQUIRE(run_cli({"generate", "--kind", "skew-lines", "--output", dir.file("skew.json")}).code == 0);
  const RunResult r = run_cli({"recon", "--input", dir.file("skew.json"), "--signal", "1,0", "--max-iter", "40",
                               "--tol", "0"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(!rows.empty());
  CHECK(rows[0] == "row,method,n,residual,certified_bound,actual_error,solves,precompute_solves");

  int methods = 0;
  int trace = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto c = split_csv(rows[i]);
    REQUIRE(c.size() == 8);
    if (c[0] == "method") {
      ++methods;
      if (c[1] != "iterative") CHECK(std::stod(c[3]) <= 1e-8);
      if (c[1] == "local-fusion") CHECK(c[6] == "2");
      if (c[1] == "fused-dual") {
        CHECK(c[6] == "0");
        CHECK(c[7] == "2");
      }
    } else if (c[0] == "agreement") {
      CHECK(std::stod(c[3]) <= 1e-9);
    } else if (c[0] == "trace") {
      const double n = std::stod(c[2]);
      CHECK(std::stod(c[4]) == doctest::Approx(std::pow(std::sqrt(0.5), n)).epsilon(1e-12));
      CHECK(std::stod(c[5]) <= std::stod(c[4]) * (1 + 1e-6));
      ++trace;
    }
  }
  CHECK(methods == 4);
  CHECK(trace == 41);

  const RunResult timed = run_cli({"recon", "--input", dir.file("skew.json"), "--timing"});
  REQUIRE(timed.code == 0);
  CHECK(lines(timed.out)[0].ends_with(",wall_time_ms"));
}

TEST_CASE("perturb report") {
  TempDir dir;
  REQUIRE(run_cli({"generate", "--kind", "lines-and-plane", "--output", dir.file("lp.json")}).code == 0);
  const RunResult zero = run_cli({"perturb", "--input", dir.file("lp.json"), "--noise", "0", "--trials", "3"});
  REQUIRE(zero.code == 0);
  const auto rows = lines(zero.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] ==
        "trial,mode,noise_scale,measured,discarded,hypothesis_pass,predicted_lower,predicted_upper,actual_lower,"
        "actual_upper,contained");
  const auto first = split_csv(rows[1]);
  CHECK(std::stod(first[6]) == doctest::Approx(std::stod(first[8])).epsilon(1e-14));
  CHECK(std::stod(first[7]) == doctest::Approx(std::stod(first[9])).epsilon(1e-14));
  CHECK(split_csv(rows.back())[0] == "summary");

  const RunResult jitter = run_cli({"perturb", "--input", dir.file("lp.json"), "--mode", "local-frame-jitter",
                                    "--noise", "1e-4", "--trials", "20"});
  CHECK(jitter.code == 0);
  CHECK(run_cli({"perturb", "--input", dir.file("lp.json"), "--mode", "wobble"}).code == 1);
}

TEST_CASE("simulate report") {
  TempDir dir;
  REQUIRE(run_cli({"generate", "--kind", "lines-and-plane", "--output", dir.file("lp.json")}).code == 0);
  const RunResult r =
      run_cli({"simulate", "--input", dir.file("lp.json"), "--sigma", "0", "--dropout", "0", "--trials", "20"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "sigma,dropout,failure_mode,trials,valid_trials,not_a_frame,mean_error,median_error,max_error");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(split_csv(rows[i])[8]) <= 1e-8);
}

TEST_CASE("config file supplies flags, command line wins") {
  TempDir dir;
  write(dir.file("gen.toml"), "seed = 5\n[generate]\nkind = \"onb\"\ndim = 4\nsubspace-dim = 2\n");
  REQUIRE(run_cli({"generate", "--config", dir.file("gen.toml"), "--output", dir.file("a.json")}).code == 0);
  CHECK(load_fixture(dir.file("a.json")).size() == 2);
  REQUIRE(run_cli({"generate", "--config", dir.file("gen.toml"), "--subspace-dim", "1", "--output",
                   dir.file("b.json")})
              .code == 0);
  CHECK(load_fixture(dir.file("b.json")).size() == 4);
}

TEST_CASE("determinism") {
  TempDir dir;
  for (const char* name : {"a", "b"}) {
    const std::string base = dir.file(name);
    REQUIRE(run_cli({"generate", "--seed", "42", "--output", base + ".json"}).code == 0);
    REQUIRE(run_cli({"check", "--input", base + ".json", "--output", base + ".check"}).code == 0);
    REQUIRE(run_cli({"recon", "--input", base + ".json", "--seed", "42", "--sigma", "0.01", "--output",
                     base + ".csv"})
                .code == 0);
    REQUIRE(run_cli({"simulate", "--input", base + ".json", "--seed", "42", "--sigma", "0.1", "--dropout", "0.3",
                     "--trials", "10", "--output", base + ".sim"})
                .code == 0);
  }
  for (const char* ext : {".json", ".check", ".csv", ".sim"}) {
    CAPTURE(ext);
    const std::string a = slurp(dir.file("a") + ext);
    CHECK(!a.empty());
    CHECK(a == slurp(dir.file("b") + ext));
  }
  REQUIRE(run_cli({"generate", "--seed", "43", "--output", dir.file("c.json")}).code == 0);
  CHECK(slurp(dir.file("c.json")) != slurp(dir.file("a.json")));
}
