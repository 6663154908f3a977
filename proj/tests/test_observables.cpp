#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rmlab/ensembles.hpp"
#include "rmlab/observables.hpp"
#include "rmlab/rng.hpp"
#include "rmlab/spectral.hpp"

using namespace rmlab;
using observables::OverlapTable;
using observables::TestFamily;

TEST_CASE("coordinate family basics and rejections") {
    const auto family = observables::coordinate_family(5, {0, 2});
    CHECK(family.size() == 2);
    CHECK(family.vectors(0, 0) == 1.0);
    CHECK(family.vectors(2, 1) == 1.0);
    observables::validate_family(family);

    const auto full = observables::coordinate_family(4, {0, 1, 2, 3});
    CHECK((full.vectors - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(observables::coordinate_family(5, {1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(observables::coordinate_family(5, {5}), std::invalid_argument);
    CHECK_THROWS_AS(observables::coordinate_family(5, {}), std::invalid_argument);
}

TEST_CASE("random family: orthonormal and deterministic") {
    const auto one = observables::random_family(20, 1, 5);
    CHECK(std::abs(one.vectors.col(0).norm() - 1.0) < 1e-12);

    const auto full = observables::random_family(15, 15, 6);
    const double gram =
        (full.vectors.transpose() * full.vectors - Eigen::MatrixXd::Identity(15, 15)).cwiseAbs().maxCoeff();
    CHECK(gram <= 1e-10);

    const auto again = observables::random_family(15, 15, 6);
    CHECK((full.vectors - again.vectors).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(observables::random_family(5, 6, 1), std::invalid_argument);
}

TEST_CASE("overlaps: completeness, hand case, brute-force oracle") {
    const auto s = spectral::decompose(ensembles::sample_goe(8, 2));
    const auto full = observables::coordinate_family(8, {0, 1, 2, 3, 4, 5, 6, 7});
    const auto table = observables::overlaps(s, full);
    CHECK(table.p.cwiseAbs().maxCoeff() < 1e-12);  // complete family: p vanishes identically

    // N = 2, identity frame, I = {0}: diagonal +-1/2, off-diagonal 0.
    spectral::SpectralData id2;
    id2.lambdas = Eigen::VectorXd::Zero(2);
    id2.vectors = Eigen::MatrixXd::Identity(2, 2);
    const auto half = observables::overlaps(id2, observables::coordinate_family(2, {0}));
    CHECK(half.p(0, 0) == doctest::Approx(0.5));
    CHECK(half.p(1, 1) == doctest::Approx(-0.5));
    CHECK(half.p(0, 1) == doctest::Approx(0.0));

    const auto s30 = spectral::decompose(ensembles::sample_goe(30, 3));
    const auto family = observables::random_family(30, 7, 4);
    const auto t30 = observables::overlaps(s30, family);
    for (int k : {0, 11, 29})
        for (int l : {0, 5, 29})
            CHECK(t30.p(k, l) == doctest::Approx(oracles::brute_force_overlap(s30, family, k, l)).epsilon(1e-12));

    CHECK((t30.p - t30.p.transpose()).cwiseAbs().maxCoeff() == 0.0);
    double trace = 0.0;
    for (int k = 0; k < 30; ++k) trace += t30.p(k, k);
    CHECK(std::abs(trace) < 1e-8);
}

TEST_CASE("overlap table is invariant under in-span rotations of the family") {
    const auto s = spectral::decompose(ensembles::sample_goe(24, 9));
    const auto family = observables::random_family(24, 5, 10);
    // Rotate the family by an orthogonal 5x5 map; the span projector is unchanged.
    const auto rot = observables::random_family(5, 5, 11);
    TestFamily rotated = family;
    rotated.vectors = family.vectors * rot.vectors;
    const auto a = observables::overlaps(s, family);
    const auto b = observables::overlaps(s, rotated);
    CHECK((a.p - b.p).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("overlaps rejects dimension mismatch") {
    const auto s = spectral::decompose(ensembles::sample_goe(6, 1));
    CHECK_THROWS_AS(observables::overlaps(s, observables::coordinate_family(7, {0})), std::invalid_argument);
}

TEST_CASE("clt statistic: direct values and beta guard") {
    OverlapTable table;
    table.dim = 100;
    table.set_size = 50;
    table.p = Eigen::MatrixXd::Zero(100, 100);
    CHECK(observables::clt_statistic(table, 3) == 0.0);
    table.p(3, 3) = 0.1;
    CHECK(observables::clt_statistic(table, 3) == doctest::Approx(1.0));  // sqrt(10000/100) * 0.1
    CHECK_THROWS_AS(observables::clt_statistic(table, 3, 2), std::invalid_argument);
    CHECK_THROWS_AS(observables::clt_statistic(table, 100), std::invalid_argument);
}

TEST_CASE("scaled overlap values") {
    OverlapTable table;
    table.dim = 100;
    table.set_size = 25;
    table.p = Eigen::MatrixXd::Zero(100, 100);
    CHECK(observables::scaled_overlap(table, 1, 2) == 0.0);
    table.p(1, 2) = 0.05;
    CHECK(observables::scaled_overlap(table, 1, 2) == doctest::Approx(1.0));  // (100/5) * 0.05
}

TEST_CASE("que error scale: frozen value, monotonicity, small-s rejection") {
    CHECK(observables::que_error_scale(0.1, 100, 10000) == doctest::Approx(0.04162277660168379).epsilon(1e-14));
    double prev = std::numeric_limits<double>::infinity();
    for (double s = 0.05; s <= 1.0; s += 0.05) {
        const double value = observables::que_error_scale(s, 30, 500);
        CHECK(value < prev);
        prev = value;
    }
    // First term is linear in |I| once the second is negligible.
    const double big_s = 0.9;
    const double base = observables::que_error_scale(big_s, 1000000, 100);
    CHECK(observables::que_error_scale(big_s, 2000000, 100) / base == doctest::Approx(2.0).epsilon(0.01));
    CHECK_THROWS_AS(observables::que_error_scale(0.0, 10, 100), std::invalid_argument);
}
