#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "rmlab/ensembles.hpp"
#include "rmlab/flowlab.hpp"
#include "rmlab/matchings.hpp"
#include "rmlab/observables.hpp"
#include "rmlab/rng.hpp"
#include "rmlab/spectral.hpp"

using namespace rmlab;
using matchings::make_configuration;
using spectral::SpectralData;

namespace {

SpectralData random_frame(int n, std::uint64_t seed) {
    SpectralData s;
    s.vectors = observables::random_family(n, n, seed).vectors;
    CounterRng rng(seed, 99);
    s.lambdas.resize(n);
    double x = -1.1;
    for (int i = 0; i < n; ++i) {
        s.lambdas(i) = x;
        x += 0.1 + 0.15 * rng.uniform();
    }
    return s;
}

}  // namespace

TEST_CASE("rotate_pair: identity, periodicity, orthonormality, locality") {
    const auto s = random_frame(8, 5);
    const auto same = flowlab::rotate_pair(s, 1, 4, 0.0);
    CHECK((same.vectors - s.vectors).cwiseAbs().maxCoeff() == 0.0);

    const auto full_turn = flowlab::rotate_pair(s, 1, 4, 2.0 * std::numbers::pi);
    CHECK((full_turn.vectors - s.vectors).cwiseAbs().maxCoeff() < 1e-12);

    const auto rotated = flowlab::rotate_pair(s, 2, 6, 0.83);
    CHECK((rotated.vectors.transpose() * rotated.vectors - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK((rotated.lambdas - s.lambdas).cwiseAbs().maxCoeff() == 0.0);
    // columns outside the pair are untouched bitwise
    for (int c : {0, 1, 3, 4, 5, 7}) CHECK((rotated.vectors.col(c) - s.vectors.col(c)).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(flowlab::rotate_pair(s, 3, 3, 0.1), std::invalid_argument);
}

TEST_CASE("generator second difference: constant, quadratic closed form, Richardson") {
    const auto s = random_frame(6, 9);
    const auto family = observables::random_family(6, 3, 10);
    const Eigen::VectorXd q = family.vectors.col(0);

    flowlab::FrameObservable constant = [](const SpectralData&) { return 3.5; };
    CHECK(std::abs(flowlab::generator_second_difference(constant, s, 0, 1, 1e-4)) < 1e-8);

    // obs = <q, u_k>^2 has X^2 obs = 2(<q,u_l>^2 - <q,u_k>^2).
    const int k = 2, l = 4;
    flowlab::FrameObservable quadratic = [&q, k](const SpectralData& frame) {
        const double v = q.dot(frame.vectors.col(k));
        return v * v;
    };
    const double vk = q.dot(s.vectors.col(k));
    const double vl = q.dot(s.vectors.col(l));
    const double closed = 2.0 * (vl * vl - vk * vk);
    const double coarse = flowlab::generator_second_difference(quadratic, s, k, l, 1e-4);
    const double fine = flowlab::generator_second_difference(quadratic, s, k, l, 5e-5);
    CHECK(coarse == doctest::Approx(closed).epsilon(1e-6));
    CHECK(fine == doctest::Approx(coarse).epsilon(1e-6));

    CHECK_THROWS_AS(flowlab::generator_second_difference(constant, s, 0, 1, 1e-2), std::invalid_argument);
    CHECK_THROWS_AS(flowlab::generator_second_difference(constant, s, 0, 1, 1e-7), std::invalid_argument);
}

TEST_CASE("configuration flow rhs: constants, hand case, independent assembly") {
    const int n = 4;
    Eigen::VectorXd lam(n);
    lam << -0.9, -0.2, 0.4, 1.3;

    const auto c = make_configuration(n, {{1, 1}});
    flowlab::ConfigValues values;
    values[c.key()] = 2.0;
    for (int l = 0; l < n; ++l)
        if (l != 1) values[matchings::move_particle(c, 1, l).key()] = 2.0;
    CHECK(flowlab::matching_flow_rhs(values, lam, c, n) == 0.0);  // constant values annihilate

    // single particle: coefficient 2 xi_k (1 + 2 xi_l) = 2
    flowlab::ConfigValues varied = values;
    varied[matchings::move_particle(c, 1, 3).key()] = 5.0;
    const double expected = 2.0 * (5.0 - 2.0) / (n * (lam(1) - lam(3)) * (lam(1) - lam(3)));
    CHECK(flowlab::matching_flow_rhs(varied, lam, c, n) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(flowlab::assignment_flow_rhs(varied, lam, c, n) == doctest::Approx(0.5 * expected).epsilon(1e-14));

    // two-particle configuration vs an independent loop assembly
    const auto c2 = make_configuration(n, {{0, 2}, {2, 1}});
    flowlab::ConfigValues v2;
    CounterRng rng(3, 3);
    v2[c2.key()] = rng.uniform();
    for (const auto& [site, mult] : c2.occupancy)
        for (int l = 0; l < n; ++l)
            if (l != site) {
                const auto key = matchings::move_particle(c2, site, l).key();
                if (!v2.count(key)) v2[key] = rng.uniform();
            }
    double independent = 0.0;
    for (int k = 0; k < n; ++k) {
        const int xk = c2.multiplicity(k);
        if (xk == 0) continue;
        for (int l = 0; l < n; ++l) {
            if (l == k) continue;
            const int xl = c2.multiplicity(l);
            const double num = v2.at(matchings::move_particle(c2, k, l).key()) - v2.at(c2.key());
            independent += 2.0 * xk * (1 + 2 * xl) * num / (n * (lam(k) - lam(l)) * (lam(k) - lam(l)));
        }
    }
    CHECK(flowlab::matching_flow_rhs(v2, lam, c2, n) == doctest::Approx(independent).epsilon(1e-13));

    flowlab::ConfigValues missing;
    missing[c2.key()] = 1.0;
    CHECK_THROWS_AS(flowlab::matching_flow_rhs(missing, lam, c2, n), std::invalid_argument);
}

TEST_CASE("four point flow rhs: constant kernel and occupation weights") {
    const int n = 3;
    Eigen::VectorXd lam(n);
    lam << -0.5, 0.1, 0.9;
    flowlab::PairValues values;
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) values[{a, b}] = 7.0;
    CHECK(flowlab::four_point_flow_rhs(values, lam, 0, 1, n) == 0.0);

    // hand assembly for (j,k) = (0,1): the l = j term in the first sum carries
    // weight (1 + 2 zeta_j) = 3 and moves to the diagonal pair (0,0).
    flowlab::PairValues v;
    v[{0, 0}] = 1.0;
    v[{0, 1}] = 2.0;
    v[{0, 2}] = -1.0;
    v[{1, 1}] = 4.0;
    v[{1, 2}] = 0.5;
    v[{2, 2}] = 3.0;
    auto gap2 = [&](int a, int b) { return (lam(a) - lam(b)) * (lam(a) - lam(b)); };
    double expected = 0.0;
    expected += 3.0 * (v[{0, 0}] - v[{0, 1}]) / (n * gap2(0, 1));  // first sum, l = j = 0
    expected += 1.0 * (v[{0, 2}] - v[{0, 1}]) / (n * gap2(2, 1));  // first sum, l = 2
    expected += 3.0 * (v[{1, 1}] - v[{0, 1}]) / (n * gap2(1, 0));  // second sum, l = k = 1
    expected += 1.0 * (v[{1, 2}] - v[{0, 1}]) / (n * gap2(2, 0));  // second sum, l = 2
    CHECK(flowlab::four_point_flow_rhs(v, lam, 0, 1, n) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("fermionic flow rhs: three-site hand case excludes both indices") {
    const int n = 3;
    Eigen::VectorXd lam(n);
    lam << -0.7, 0.2, 1.1;
    flowlab::PairValues v;
    v[{0, 1}] = 2.0;
    v[{0, 2}] = -0.5;
    v[{1, 2}] = 1.5;
    const double expected = (v[{1, 2}] - v[{0, 1}]) / (n * (lam(0) - lam(2)) * (lam(0) - lam(2))) +
                            (v[{0, 2}] - v[{0, 1}]) / (n * (lam(1) - lam(2)) * (lam(1) - lam(2)));
    CHECK(flowlab::fermionic_flow_rhs(v, lam, 0, 1, n) == doctest::Approx(expected).epsilon(1e-14));
    CHECK_THROWS_AS(flowlab::fermionic_flow_rhs(v, lam, 1, 1, n), std::invalid_argument);

    flowlab::PairValues constant;
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) constant[{a, b}] = -2.0;
    CHECK(flowlab::fermionic_flow_rhs(constant, lam, 0, 1, n) == 0.0);
}

TEST_CASE("generator identities hold pointwise for the symmetrized kinds") {
    const int n = 12;
    const auto s = random_frame(n, 21);
    const auto family = observables::random_family(n, 6, 22);

    SUBCASE("assignment kind") {
        const auto obs = flowlab::make_assignment_flow(family, make_configuration(n, {{2, 2}, {7, 1}}),
                                                       {0, 1, 2, 3, 4, 5});
        const auto residual = flowlab::generator_flow_residual(obs, s);
        CHECK(residual.relative <= 1e-5);
    }
    SUBCASE("four point kind, off-diagonal and diagonal") {
        const auto off = flowlab::make_four_point_flow(family, 0, 1, 2, 3, 3, 9);
        CHECK(flowlab::generator_flow_residual(off, s).relative <= 1e-5);
        const auto diag = flowlab::make_four_point_flow(family, 0, 1, 2, 3, 6, 6);
        CHECK(flowlab::generator_flow_residual(diag, s).relative <= 1e-5);
    }
    SUBCASE("fermionic kind") {
        const auto obs = flowlab::make_fermionic_flow(family, 1, 2, 3, 4, 0, 10);
        CHECK(flowlab::generator_flow_residual(obs, s).relative <= 1e-5);
    }
}

TEST_CASE("matching kind satisfies the half-coefficient flow pointwise") {
    const int n = 12;
    const auto s = random_frame(n, 31);
    const auto family = observables::random_family(n, 5, 32);
    const auto obs = flowlab::make_matching_flow(family, make_configuration(n, {{4, 2}, {8, 1}}));
    const auto residual = flowlab::generator_flow_residual(obs, s);
    // Against the doubled coefficient 2 xi_k (1 + 2 xi_l) the relative residual
    // sits at 1/2; the half-coefficient assembly matches to difference accuracy.
    CHECK(residual.relative == doctest::Approx(0.5).epsilon(1e-4));
    const double half = 0.5 * residual.rhs;
    CHECK(std::abs(residual.generator - half) <= 1e-5 * std::max(std::abs(residual.generator), std::abs(half)));
}
