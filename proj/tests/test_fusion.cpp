#include "doctest.h"
#include "fusionkit/catalog.hpp"
#include "fusionkit/fusion.hpp"
#include "fusionkit/random.hpp"
#include "helpers.hpp"

using namespace fusionkit;
using namespace fusionkit::test;

namespace {

Subspace line(double x, double y) { return Subspace::from_vectors(cols({{x, y}})); }

FusionFrame onb2(double w1 = 1.0, double w2 = 1.0) { return FusionFrame({{line(1, 0), w1}, {line(0, 1), w2}}); }

FusionFrame skew() { return FusionFrame({{line(1, 0), 1.0}, {line(1, 1), 1.0}}); }

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

TEST_CASE("subspace_from_vectors") {
  CHECK(max_abs(subspace_from_vectors(cols({{1, 0}})).projector() - rows2(1, 0, 0, 0)) < 1e-15);
  CHECK(max_abs(subspace_from_vectors(cols({{1, 1}})).projector() - rows2(.5, .5, .5, .5)) < 1e-15);
  CHECK(max_abs(subspace_from_vectors(Mat::Identity(3, 3)).projector() - Mat::Identity(3, 3)) < 1e-15);
  CHECK(kind_of([] { subspace_from_vectors(Mat::Zero(2, 1)); }) == ErrorKind::AllZero);
  CHECK_THROWS_AS(Subspace(cols({{1, 1}})), Error);  // not orthonormal
}

TEST_CASE("fusion frame validation") {
  CHECK_THROWS_AS(FusionFrame({}), Error);
  CHECK_THROWS_AS(FusionFrame({{line(1, 0), 0.0}}), Error);
  CHECK_THROWS_AS(FusionFrame({{line(1, 0), -1.0}}), Error);
  CHECK(kind_of([] { FusionFrame({{line(1, 0), 1.0}, {Subspace::whole_space(3), 1.0}}); }) == ErrorKind::DimMismatch);
}

TEST_CASE("fusion_analysis") {
  FusionCoefficients c = fusion_analysis(onb2(), vec({3, 5}));
  CHECK(max_abs(c.entries[0] - vec({3, 0})) < 1e-15);
  CHECK(max_abs(c.entries[1] - vec({0, 5})) < 1e-15);
  c = fusion_analysis(onb2(2, 1), vec({3, 5}));
  CHECK(max_abs(c.entries[0] - vec({6, 0})) < 1e-15);
  CHECK(max_abs(c.entries[1] - vec({0, 5})) < 1e-15);
  c = fusion_analysis(skew(), vec({1, 0}));
  CHECK(max_abs(c.entries[0] - vec({1, 0})) < 1e-15);
  CHECK(max_abs(c.entries[1] - vec({0.5, 0.5})) < 1e-15);
  CHECK(kind_of([] { fusion_analysis(onb2(), vec({1})); }) == ErrorKind::DimMismatch);
}

TEST_CASE("fusion_synthesis") {
  FusionCoefficients c{{vec({3, 0}), vec({0, 5})}, {1, 1}};
  CHECK(max_abs(fusion_synthesis(onb2(), c) - vec({3, 5})) < 1e-15);
  c = {{Vec::Zero(2), Vec::Zero(2)}, {1, 1}};
  CHECK(fusion_synthesis(onb2(), c).norm() == 0.0);

  CHECK(kind_of([] { fusion_synthesis(onb2(), FusionCoefficients{{vec({1, 1}), vec({0, 1})}, {1, 1}}); }) ==
        ErrorKind::NotInSubspace);
  CHECK(kind_of([] { fusion_synthesis(onb2(), FusionCoefficients{{vec({1, 0})}, {1}}); }) == ErrorKind::DimMismatch);

  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const FusionFrameSystem ffs = random_fusion_frame_system({}, rng);
    const Vec f = gaussian_matrix(ffs.ambient_dim(), 1, rng);
    const Vec lhs = fusion_synthesis(ffs.fusion_frame(), fusion_analysis(ffs.fusion_frame(), f));
    CHECK((lhs - fusion_operator(ffs.fusion_frame()) * f).norm() <= 1e-10 * f.norm());
  }
}

TEST_CASE("fusion_operator") {
  CHECK(max_abs(fusion_operator(onb2()) - Mat::Identity(2, 2)) < 1e-15);
  const FusionFrame lp = catalog::lines_and_plane().fusion_frame();
  CHECK(max_abs(fusion_operator(lp) - 2.0 * Mat::Identity(2, 2)) < 1e-15);
  CHECK(max_abs(fusion_operator(skew()) - rows2(1.5, .5, .5, .5)) < 1e-15);
}

TEST_CASE("fusion_operator_via_locals") {
  SUBCASE("orthonormal local bases match the projector sum") {
    const FusionFrameSystem ffs = catalog::with_orthonormal_locals(skew());
    CHECK(max_abs(fusion_operator_via_locals(ffs) - fusion_operator(ffs.fusion_frame())) < 1e-15);
  }
  SUBCASE("redundant local frame on a line") {
    const FusionFrame ff({{line(1, 0), 1.0}});
    const FusionFrameSystem ffs(ff, {Frame(cols({{1, 0}, {1, 0}}))});
    CHECK(max_abs(ffs.local_duals()[0].vectors() - cols({{.5, 0}, {.5, 0}})) < 1e-15);
    CHECK(max_abs(fusion_operator_via_locals(ffs) - rows2(1, 0, 0, 0)) < 1e-15);
  }
  SUBCASE("Parseval local frames on random systems") {
    Rng rng(11);
    RandomSystemSpec shape;
    shape.parseval_locals = true;
    for (int t = 0; t < 10; ++t) {
      const FusionFrameSystem ffs = random_fusion_frame_system(shape, rng);
      CHECK(operator_norm(fusion_operator_via_locals(ffs) - fusion_operator(ffs.fusion_frame())) <= 1e-10);
    }
  }
  SUBCASE("alternate local duals give the same operator") {
    // Redundant frame for R^2 with a non-canonical dual.
    const FusionFrame ff({{Subspace::whole_space(2), 1.5}});
    const Frame f(cols({{1, 0}, {1, 0}, {0, 1}}));
    const Frame alt(cols({{1, 0}, {0, 0}, {0, 1}}));
    const FusionFrameSystem ffs(ff, {f}, {alt});
    CHECK(operator_norm(fusion_operator_via_locals(ffs) - fusion_operator(ff)) <= 1e-12);
  }
}

TEST_CASE("fusion frame system validation") {
  const FusionFrame ff({{line(1, 0), 1.0}});
  CHECK(kind_of([&] { FusionFrameSystem(ff, {Frame(cols({{1, 1}}))}); }) == ErrorKind::NotInSubspace);
  const FusionFrame plane({{Subspace::whole_space(2), 1.0}});
  CHECK(kind_of([&] { FusionFrameSystem(plane, {Frame(cols({{1, 0}}))}); }) == ErrorKind::SpanMismatch);
  CHECK(kind_of([&] { FusionFrameSystem(plane, {Frame(Mat::Identity(2, 2))}, {Frame(2 * Mat::Identity(2, 2))}); }) ==
        ErrorKind::NotADual);
  CHECK(kind_of([&] { FusionFrameSystem(plane, {}); }) == ErrorKind::ShapeMismatch);

  const FusionFrameSystem ok(FusionFrame({{line(1, 0), 1.0}, {line(0, 1), 1.0}}),
                             {Frame(cols({{2, 0}})), Frame(cols({{0, 1}, {0, 1}}))});
  CHECK(ok.local_lower() == doctest::Approx(2.0));
  CHECK(ok.local_upper() == doctest::Approx(4.0));
}

TEST_CASE("fusion_bounds") {
  FusionBounds b = fusion_bounds(onb2());
  CHECK(b.lower == doctest::Approx(1.0));
  CHECK(b.upper == doctest::Approx(1.0));
  CHECK(b.is_frame);
  CHECK(b.is_tight);
  CHECK(b.is_parseval);
  CHECK(b.is_orthonormal_fusion_basis);

  b = fusion_bounds(skew());
  CHECK(b.lower == doctest::Approx(1 - std::sqrt(2.0) / 2).epsilon(1e-13));
  CHECK(b.upper == doctest::Approx(1 + std::sqrt(2.0) / 2).epsilon(1e-13));
  CHECK(b.is_frame);
  CHECK_FALSE(b.is_tight);
  CHECK_FALSE(b.is_orthonormal_fusion_basis);

  b = fusion_bounds(FusionFrame({{line(1, 0), 1.0}}));
  CHECK(b.lower < 1e-12);
  CHECK_FALSE(b.is_frame);

  // Tight and Parseval but overlapping: not an orthonormal fusion basis.
  const FusionFrame overlap({{line(1, 0), kInvSqrt2}, {line(0, 1), kInvSqrt2}, {Subspace::whole_space(2), kInvSqrt2}});
  b = fusion_bounds(overlap);
  CHECK(b.is_parseval);
  CHECK_FALSE(b.is_orthonormal_fusion_basis);
}

TEST_CASE("redundancy") {
  const FusionFrame lp = catalog::lines_and_plane().fusion_frame();
  CHECK(redundancy(lp) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(fusion_bounds(lp).lower == doctest::Approx(redundancy(lp)).epsilon(1e-10));
  CHECK(redundancy(onb2()) == doctest::Approx(1.0));
  CHECK(redundancy(skew()) == doctest::Approx(1.0));
}

TEST_CASE("local_global_bounds") {
  SUBCASE("orthonormal fusion basis with orthonormal locals") {
    const LocalGlobalBounds lg = local_global_bounds(catalog::orthonormal_fusion_basis(4, 2));
    CHECK(lg.predicted.lower == doctest::Approx(1.0));
    CHECK(lg.predicted.upper == doctest::Approx(1.0));
    CHECK(lg.actual.lower == doctest::Approx(1.0));
    CHECK(lg.actual.upper == doctest::Approx(1.0));
    CHECK(lg.contained());
  }
  SUBCASE("Parseval locals reproduce the fusion bounds") {
    Rng rng(5);
    RandomSystemSpec shape;
    shape.parseval_locals = true;
    const LocalGlobalBounds lg = local_global_bounds(random_fusion_frame_system(shape, rng));
    CHECK(lg.actual.lower == doctest::Approx(lg.fusion.lower).epsilon(1e-9));
    CHECK(lg.actual.upper == doctest::Approx(lg.fusion.upper).epsilon(1e-9));
  }
  SUBCASE("random systems stay inside (AC, BD) and the converse holds") {
    Rng rng(6);
    for (int t = 0; t < 20; ++t) {
      const LocalGlobalBounds lg = local_global_bounds(random_fusion_frame_system({}, rng));
      CHECK(lg.contained());
      CHECK(lg.fusion.lower >= lg.converse.lower * (1 - 1e-9));
      CHECK(lg.fusion.upper <= lg.converse.upper * (1 + 1e-9));
    }
  }
}

TEST_CASE("from_frame") {
  const FusionFrame std2 = from_frame(Frame(Mat::Identity(2, 2)));
  CHECK(fusion_bounds(std2).is_orthonormal_fusion_basis);

  const Frame mb = catalog::mercedes_benz();
  const FusionFrame ff = from_frame(mb);
  CHECK(ff.size() == 3);
  for (const auto& c : ff.components()) {
    CHECK(c.weight == doctest::Approx(1.0));
    CHECK(c.subspace.dim() == 1);
  }
  CHECK(max_abs(fusion_operator(ff) - 1.5 * Mat::Identity(2, 2)) < 1e-14);

  const FusionFrame single = from_frame(Frame(cols({{2, 0}})));
  CHECK(single[0].weight == doctest::Approx(2.0));
  CHECK(max_abs(fusion_operator(single) - rows2(4, 0, 0, 0)) < 1e-14);

  CHECK(kind_of([] { from_frame(Frame(cols({{1, 0}, {0, 0}}))); }) == ErrorKind::ZeroVector);

  Rng rng(9);
  for (int t = 0; t < 10; ++t) {
    const Frame f(gaussian_matrix(5, 9, rng));
    const FusionFrame g = from_frame(f);
    CHECK(max_abs(fusion_operator(g) - frame_operator(f)) <= 1e-10 * frame_operator(f).norm());
    CHECK(fusion_bounds(g).lower == doctest::Approx(frame_bounds(f).lower).epsilon(1e-9));
    CHECK(fusion_bounds(g).upper == doctest::Approx(frame_bounds(f).upper).epsilon(1e-9));
  }
}

TEST_CASE("transform") {
  const FusionFrame ff = skew();
  const Mat s = fusion_operator(ff);
  CHECK(max_abs(fusion_operator(transform(ff, Mat::Identity(2, 2))) - s) < 1e-14);
  CHECK(transform_residual(ff, Mat::Identity(2, 2)) <= 1e-8);
  CHECK(transform_residual(ff, 3.0 * Mat::Identity(2, 2)) <= 1e-8);
  // Symmetric orthogonal T (a reflection) maps projectors to projectors.
  const Vec h = vec({0.6, 0.8});
  const Mat reflect = Mat::Identity(2, 2) - 2.0 * h * h.transpose();
  CHECK(transform_residual(ff, reflect) <= 1e-8);

  SUBCASE("T = S_W: orthogonal projectors onto S_W W_i do not sum to S_W") {
    // Lines through (3,1) and (2,1): projector sum [[1.7,.7],[.7,.3]].
    const Mat moved = fusion_operator(transform(ff, s));
    CHECK(max_abs(moved - rows2(1.7, 0.7, 0.7, 0.3)) < 1e-14);
    CHECK(transform_residual(ff, s) > 0.1);
  }

  CHECK(kind_of([&] { transform(ff, rows2(1, 2, 0, 1)); }) == ErrorKind::NotSymmetric);
  CHECK(kind_of([&] { transform(ff, rows2(1, 1, 1, 1)); }) == ErrorKind::Singular);
}

TEST_CASE("split_frame") {
  SUBCASE("standard basis of R^4 in two blocks") {
    const FusionFrameSystem ffs = split_frame(Frame(Mat::Identity(4, 4)), {{0, 1}, {2, 3}}, {1, 1});
    const FusionBounds b = fusion_bounds(ffs.fusion_frame());
    CHECK(b.is_orthonormal_fusion_basis);
    CHECK(ffs.fusion_frame()[0].subspace.dim() == 2);
  }
  SUBCASE("overlapping blocks of the Mercedes-Benz frame") {
    const FusionFrameSystem ffs = split_frame(catalog::mercedes_benz(), {{0, 1}, {1, 2}}, {1, 1});
    CHECK(ffs.fusion_frame()[0].subspace.dim() == 2);
    CHECK(ffs.fusion_frame()[1].subspace.dim() == 2);
    CHECK(max_abs(fusion_operator(ffs.fusion_frame()) - 2.0 * Mat::Identity(2, 2)) < 1e-14);
  }
  SUBCASE("singleton blocks recover from_frame with unit weights") {
    const Frame mb = catalog::mercedes_benz();
    const FusionFrameSystem ffs = split_frame(mb, {{0}, {1}, {2}}, {1, 1, 1});
    CHECK(max_abs(fusion_operator(ffs.fusion_frame()) - fusion_operator(from_frame(mb))) < 1e-14);
  }
  SUBCASE("errors") {
    const Frame mb = catalog::mercedes_benz();
    CHECK(kind_of([&] { split_frame(mb, {{0, 1}, {}}, {1, 1}); }) == ErrorKind::EmptyBlock);
    CHECK(kind_of([&] { split_frame(mb, {{0, 1}, {7}}, {1, 1}); }) == ErrorKind::IndexOutOfRange);
  }
}

TEST_CASE("fusion frame properties on random systems") {
  Rng rng(42);
  for (int t = 0; t < 20; ++t) {
    RandomSystemSpec shape;
    shape.ambient_dim = 4 + t % 5;
    shape.subspaces = 3 + static_cast<std::size_t>(t % 3);
    shape.subspace_dim = 2 + t % 2;
    shape.subspaces = std::max<std::size_t>(shape.subspaces, static_cast<std::size_t>(shape.ambient_dim / shape.subspace_dim) + 1);
    shape.local_size = shape.subspace_dim + 2;
    const FusionFrameSystem ffs = random_fusion_frame_system(shape, rng);
    const FusionFrame& ff = ffs.fusion_frame();
    const FusionBounds b = fusion_bounds(ff);
    const Mat s = fusion_operator(ff);

    for (int k = 0; k < 1000; ++k) {
      const Vec f = random_unit_vector(ff.ambient_dim(), rng);
      double energy = 0.0;
      for (const auto& c : ff.components()) energy += c.weight * c.weight * c.subspace.project(f).squaredNorm();
      CHECK(energy >= b.lower * (1 - 1e-9));
      CHECK(energy <= b.upper * (1 + 1e-9));
    }
    // Matrix form of the same inequalities.
    CHECK(sym_eig(s - b.lower * Mat::Identity(s.rows(), s.cols())).min() >= -1e-10 * b.upper);
    CHECK(sym_eig(b.upper * Mat::Identity(s.rows(), s.cols()) - s).min() >= -1e-10 * b.upper);

    double weighted_dims = 0.0;
    for (const auto& c : ff.components()) weighted_dims += c.weight * c.weight * static_cast<double>(c.subspace.dim());
    CHECK(s.trace() == doctest::Approx(weighted_dims).epsilon(1e-12));

    // {T W_i} stays a fusion frame, with bounds degraded by at most cond(T)^2.
    const Mat g = gaussian_matrix(ff.ambient_dim(), ff.ambient_dim(), rng);
    const Mat tmat = g * g.transpose() + Mat::Identity(ff.ambient_dim(), ff.ambient_dim());
    const Spectrum tsp = sym_eig(tmat);
    const double cond2 = std::pow(tsp.max() / tsp.min(), 2);
    const FusionBounds tb = fusion_bounds(transform(ff, tmat));
    CHECK(tb.is_frame);
    CHECK(tb.lower >= b.lower / cond2 * (1 - 1e-9));
    CHECK(tb.upper <= b.upper * cond2 * (1 + 1e-9));
  }
}
