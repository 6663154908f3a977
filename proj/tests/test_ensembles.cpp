#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <vector>

#include "oracles.hpp"
#include "rmlab/ensembles.hpp"
#include "rmlab/parallel.hpp"
#include "rmlab/semicircle.hpp"
#include "rmlab/spectral.hpp"
#include "rmlab/stats.hpp"

using namespace rmlab;
using ensembles::EntryDistribution;

TEST_CASE("variance profile: flat, balanced, and rejections") {
    const auto flat = ensembles::build_variance_profile(10, 0.0, 1);
    CHECK((flat.sigma2().array() - 0.1).abs().maxCoeff() < 1e-14);

    const auto spread = ensembles::build_variance_profile(50, 0.5, 2);
    for (int j = 0; j < 50; ++j) CHECK(std::abs(spread.sigma2().col(j).sum() - 1.0) < 1e-10);
    CHECK((spread.sigma2() - spread.sigma2().transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(spread.lower_scaled() > 0.0);
    CHECK(spread.sigma2().minCoeff() >= spread.lower_scaled() / 50 - 1e-15);
    CHECK(spread.sigma2().maxCoeff() <= spread.upper_scaled() / 50 + 1e-15);

    CHECK_THROWS_AS(ensembles::build_variance_profile(10, 1.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(ensembles::build_variance_profile(10, -0.1, 3), std::invalid_argument);
    CHECK_THROWS_AS(ensembles::build_variance_profile(1, 0.0, 3), std::invalid_argument);
}

TEST_CASE("wigner sampler: determinism and entry moments") {
    const auto profile = ensembles::build_variance_profile(400, 0.0, 5);
    const auto a = ensembles::sample_wigner(profile, EntryDistribution::rademacher, 42);
    const auto b = ensembles::sample_wigner(profile, EntryDistribution::rademacher, 42);
    CHECK((a.entries() - b.entries()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.entries() - a.entries().transpose()).cwiseAbs().maxCoeff() == 0.0);

    // Rademacher squares are exactly sigma^2; the mean estimate is the real check.
    const int n = 400;
    double sum = 0.0, sum2 = 0.0;
    int count = 0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= j; ++i) {
            sum += a.entries()(i, j);
            sum2 += a.entries()(i, j) * a.entries()(i, j);
            ++count;
        }
    CHECK(std::abs(sum2 / count - 1.0 / n) < 1e-12);
    const double se_mean = std::sqrt(1.0 / n / count);
    CHECK(std::abs(sum / count) < 4.0 * se_mean);

    // Gaussian entries: pooled variance within 3 standard errors of 1/N.
    const auto g = ensembles::sample_wigner(profile, EntryDistribution::gaussian, 43);
    double gsum2 = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= j; ++i) gsum2 += g.entries()(i, j) * g.entries()(i, j);
    const double est = gsum2 / count;
    const double se_var = (1.0 / n) * std::sqrt(2.0 / count);
    CHECK(std::abs(est - 1.0 / n) < 3.0 * se_var);

    const auto u = ensembles::sample_wigner(profile, EntryDistribution::uniform, 44);
    CHECK(u.entries().cwiseAbs().maxCoeff() <= std::sqrt(3.0 / n) + 1e-12);
}

TEST_CASE("GOE sampler: determinism, diagonal variance, spectral radius") {
    const auto a = ensembles::sample_goe(300, 7);
    const auto b = ensembles::sample_goe(300, 7);
    CHECK((a.entries() - b.entries()).cwiseAbs().maxCoeff() == 0.0);

    const int n = 300, m = 200;
    double diag2 = 0.0;
    for (int rep = 0; rep < m; ++rep) {
        const auto h = ensembles::sample_goe(n, 100 + rep);
        for (int i = 0; i < n; ++i) diag2 += h.entries()(i, i) * h.entries()(i, i);
    }
    const double est = diag2 / (static_cast<double>(m) * n);
    const double se = (2.0 / n) * std::sqrt(2.0 / (static_cast<double>(m) * n));
    CHECK(std::abs(est - 2.0 / n) < 4.0 * se);

    const auto s = spectral::decompose(ensembles::sample_goe(1000, 9));
    CHECK(std::abs(std::max(std::abs(s.lambdas(0)), std::abs(s.lambdas(999))) - 2.0) < 0.1);
}

TEST_CASE("empirical spectral distribution approaches the semicircle") {
    const auto profile = ensembles::build_variance_profile(1000, 0.0, 6);
    const auto h = ensembles::sample_wigner(profile, EntryDistribution::rademacher, 12);
    const auto s = spectral::decompose(h);
    std::vector<double> lam(s.lambdas.data(), s.lambdas.data() + 1000);
    CHECK(stats::ks_distance(lam, semicircle::cdf) <= 0.05);
}

TEST_CASE("OU interpolation: endpoints and entry variance law") {
    const auto h0 = ensembles::sample_goe(60, 21);
    const auto same = ensembles::ou_interpolate(h0, 0.0, 99);
    CHECK((same.entries() - h0.entries()).cwiseAbs().maxCoeff() == 0.0);

    const auto zero = spectral::SymmetricMatrix(Eigen::MatrixXd::Zero(60, 60));
    const double s_time = 0.7;
    const auto from_zero = ensembles::ou_interpolate(zero, s_time, 99);
    const auto fresh = ensembles::sample_goe(60, 99);
    CHECK((from_zero.entries() - std::sqrt(1.0 - std::exp(-s_time)) * fresh.entries()).cwiseAbs().maxCoeff() <
          1e-15);

    // Pooled off-diagonal variance of e^{-s/2} H_0 + sqrt(1-e^{-s}) G.
    const int n = 200, reps = 50;
    const auto prof = ensembles::build_variance_profile(n, 0.0, 31);
    double sum2 = 0.0;
    long count = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const auto start = ensembles::sample_wigner(prof, EntryDistribution::rademacher, 500 + rep);
        const auto evolved = ensembles::ou_interpolate(start, s_time, 700 + rep);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < j; ++i) {
                sum2 += evolved.entries()(i, j) * evolved.entries()(i, j);
                ++count;
            }
    }
    const double expected = std::exp(-s_time) / n + (1.0 - std::exp(-s_time)) / n;  // = 1/N off-diagonal
    const double est = sum2 / count;
    const double se = expected * std::sqrt(2.0 / count);
    CHECK(std::abs(est - expected) < 4.0 * se);
    CHECK_THROWS_AS(ensembles::ou_interpolate(h0, -0.5, 1), std::invalid_argument);
}

TEST_CASE("DBM zero-noise limit follows the drift ODE") {
    const int n = 10;
    const auto s0 = spectral::decompose(ensembles::sample_goe(n, 77));
    ensembles::DbmOptions options;
    options.noise = false;
    const double s_end = 0.05;
    const auto traj = ensembles::integrate_dbm(s0, s_end, 2e-6, 1, options);

    auto drift = [n](double, const Eigen::VectorXd& lam) {
        Eigen::VectorXd d(n);
        for (int k = 0; k < n; ++k) {
            double repulsion = 0.0;
            for (int l = 0; l < n; ++l)
                if (l != k) repulsion += 1.0 / (lam(k) - lam(l));
            d(k) = repulsion / n - 0.5 * lam(k);
        }
        return d;
    };
    const Eigen::VectorXd reference = oracles::rk4(drift, s0.lambdas, 0.0, s_end, 2000);
    CHECK((traj.states.back().lambdas - reference).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("DBM frame stays orthonormal over many steps") {
    const int n = 40;
    const auto s0 = spectral::decompose(ensembles::sample_goe(n, 3));
    const auto traj = ensembles::integrate_dbm(s0, 0.1, 1e-5, 5, {});  // 10^4 steps
    const auto& u = traj.states.back().vectors;
    CHECK((u.transpose() * u - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-8);
    for (int i = 0; i + 1 < n; ++i) CHECK(traj.states.back().lambdas(i) <= traj.states.back().lambdas(i + 1));
}

TEST_CASE("DBM aborts on an eigenvalue collision") {
    spectral::SpectralData tight;
    tight.lambdas = Eigen::VectorXd(3);
    tight.lambdas << 0.0, 5e-13, 1.0;
    tight.vectors = Eigen::MatrixXd::Identity(3, 3);
    ensembles::DbmOptions options;
    options.noise = false;  // one deterministic step, gap stays below 1e-12
    CHECK_THROWS_WITH_AS(static_cast<void>(ensembles::integrate_dbm(tight, 1e-25, 1e-25, 2, options)),
                         doctest::Contains("collision"), std::runtime_error);
}

TEST_CASE("DBM snapshots and JSON export") {
    const auto s0 = spectral::decompose(ensembles::sample_goe(12, 15));
    ensembles::DbmOptions options;
    options.snapshot_times = {0.01, 0.02};
    const auto traj = ensembles::integrate_dbm(s0, 0.03, 1e-4, 8, options);
    REQUIRE(traj.times.size() == 4);  // 0, 0.01, 0.02, 0.03
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == doctest::Approx(0.03));
    const auto again = ensembles::integrate_dbm(s0, 0.03, 1e-4, 8, options);
    CHECK((traj.states.back().lambdas - again.states.back().lambdas).cwiseAbs().maxCoeff() == 0.0);

    const auto parsed = nlohmann::json::parse(ensembles::trajectory_json(traj));
    CHECK(parsed.at("times").size() == 4);
    CHECK(parsed.at("lambdas").size() == 4);
    CHECK(parsed.at("lambdas").at(0).size() == 12);
    CHECK(parsed.at("seed").get<std::uint64_t>() == 8);
    CHECK(parsed.at("dt").get<double>() == 1e-4);
}

TEST_CASE("OU flow is stationary from a GOE start") {
    const int n = 100, reps = 80;
    std::vector<double> gaps_start, gaps_evolved;
    for (int rep = 0; rep < reps; ++rep) {
        const auto h0 = ensembles::sample_goe(n, 9000 + rep);
        const auto s0 = spectral::decompose(h0);
        const auto s1 = spectral::decompose(ensembles::ou_interpolate(h0, 0.5, 500 + rep));
        for (int i = 0; i + 1 < n; ++i) {
            gaps_start.push_back(s0.lambdas(i + 1) - s0.lambdas(i));
            gaps_evolved.push_back(s1.lambdas(i + 1) - s1.lambdas(i));
        }
    }
    const auto ks = stats::ks_two_sample(gaps_start, gaps_evolved);
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("SDE path matches the exact-in-law sampler at a fixed time") {
    const int n = 60, reps = 80;
    const double s_time = 0.3, dt = 1e-3;
    const auto prof = ensembles::build_variance_profile(n, 0.0, 55);
    const auto h0 = ensembles::sample_wigner(prof, EntryDistribution::rademacher, 55);
    const auto s0 = spectral::decompose(h0);

    std::vector<std::vector<double>> sde(reps), exact(reps);
    parallel_for(reps, [&](std::size_t rep) {
        const auto traj = ensembles::integrate_dbm(s0, s_time, dt, 2000 + rep, {});
        const auto& lam = traj.states.back().lambdas;
        sde[rep] = std::vector<double>(lam.data(), lam.data() + n);
        const auto se = spectral::decompose(ensembles::ou_interpolate(h0, s_time, 3000 + rep));
        exact[rep] = std::vector<double>(se.lambdas.data(), se.lambdas.data() + n);
    });
    std::vector<double> pooled_sde, pooled_exact;
    for (int rep = 0; rep < reps; ++rep) {
        pooled_sde.insert(pooled_sde.end(), sde[rep].begin(), sde[rep].end());
        pooled_exact.insert(pooled_exact.end(), exact[rep].begin(), exact[rep].end());
    }
    CHECK(stats::ks_two_sample(pooled_sde, pooled_exact).distance <= 0.08);
}

TEST_CASE("eigenvalue rigidity against the semicircle quantiles") {
    // Desk-scale check of the rigidity bound max_k |lambda_k - gamma_k|
    // N^{2/3} khat^{1/3} <= N^w. The bulk fluctuation carries a sqrt(log N)
    // factor (measured max ~ 6-9 at N = 500), so the slack exponent must be
    // 0.4 here; smaller exponents are not attainable at this size.
    const int n = 500, reps = 100;
    const auto gamma = semicircle::quantiles(n);
    std::vector<int> ok(reps, 0);
    parallel_for(reps, [&](std::size_t rep) {
        const auto s = spectral::decompose(ensembles::sample_goe(n, 40000 + rep));
        double worst = 0.0;
        for (int k = 0; k < n; ++k) {
            const double hat = std::min(k + 1, n - k);
            worst = std::max(worst,
                             std::abs(s.lambdas(k) - gamma.gammas(k)) * std::pow(n, 2.0 / 3.0) * std::cbrt(hat));
        }
        ok[rep] = worst <= std::pow(n, 0.4) ? 1 : 0;
    });
    int passed = 0;
    for (int rep = 0; rep < reps; ++rep) passed += ok[rep];
    CHECK(passed >= 99);
}
