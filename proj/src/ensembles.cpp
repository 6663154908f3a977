#include "rmlab/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "rmlab/rng.hpp"

namespace rmlab::ensembles {

namespace {

double uniform_at(const CounterRng& rng, std::uint64_t counter) {
    return static_cast<double>((rng.u64_at(counter) >> 11) + 1) * 0x1.0p-53;
}

double normal_at(const CounterRng& rng, std::uint64_t counter) {
    const double u1 = uniform_at(rng, 2 * counter);
    const double u2 = uniform_at(rng, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// Normalized entry with mean 0 and variance 1 for the requested distribution.
double standardized_entry(const CounterRng& rng, EntryDistribution dist, std::uint64_t counter) {
    switch (dist) {
        case EntryDistribution::gaussian:
            return normal_at(rng, counter);
        case EntryDistribution::rademacher:
            return (rng.u64_at(counter) & 1ULL) ? 1.0 : -1.0;
        case EntryDistribution::uniform:
            return std::sqrt(3.0) * (2.0 * uniform_at(rng, counter) - 1.0);
    }
    throw std::logic_error("standardized_entry: unknown distribution");
}

void sort_by_eigenvalue(Eigen::VectorXd& lam, Eigen::MatrixXd& frame) {
    const int n = static_cast<int>(lam.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return lam(a) < lam(b); });
    bool sorted = true;
    for (int i = 0; i < n; ++i)
        if (order[i] != i) sorted = false;
    if (sorted) return;
    Eigen::VectorXd lam2(n);
    Eigen::MatrixXd frame2(n, n);
    for (int i = 0; i < n; ++i) {
        lam2(i) = lam(order[i]);
        frame2.col(i) = frame.col(order[i]);
    }
    lam = std::move(lam2);
    frame = std::move(frame2);
}

void modified_gram_schmidt(Eigen::MatrixXd& frame) {
    const int n = static_cast<int>(frame.cols());
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < k; ++j) frame.col(k) -= frame.col(j).dot(frame.col(k)) * frame.col(j);
        const double norm = frame.col(k).norm();
        if (norm < 1e-300) throw std::runtime_error("integrate_dbm: frame column collapsed");
        frame.col(k) /= norm;
    }
}

}  // namespace

EntryDistribution parse_distribution(std::string_view name) {
    if (name == "gaussian") return EntryDistribution::gaussian;
    if (name == "rademacher") return EntryDistribution::rademacher;
    if (name == "uniform") return EntryDistribution::uniform;
    throw std::invalid_argument("parse_distribution: unknown distribution '" + std::string(name) + "'");
}

VarianceProfile::VarianceProfile(Eigen::MatrixXd sigma2, double lower_scaled, double upper_scaled)
    : sigma2_(std::move(sigma2)), lower_(lower_scaled), upper_(upper_scaled) {
    const int n = static_cast<int>(sigma2_.rows());
    if (n < 2 || sigma2_.cols() != n) throw std::invalid_argument("VarianceProfile: need square matrix, dim >= 2");
    if (!(lower_ > 0.0) || upper_ < lower_) throw std::invalid_argument("VarianceProfile: invalid variance bounds");
    for (int j = 0; j < n; ++j) {
        if (std::abs(sigma2_.col(j).sum() - 1.0) > 1e-10)
            throw std::invalid_argument("VarianceProfile: column sums must equal 1");
        for (int i = 0; i <= j; ++i) {
            if (sigma2_(i, j) != sigma2_(j, i)) throw std::invalid_argument("VarianceProfile: not symmetric");
            if (sigma2_(i, j) < lower_ / n - 1e-15 || sigma2_(i, j) > upper_ / n + 1e-15)
                throw std::invalid_argument("VarianceProfile: entry outside [c/N, C/N]");
        }
    }
}

VarianceProfile build_variance_profile(int N, double spread, std::uint64_t seed) {
    if (N < 2) throw std::invalid_argument("build_variance_profile: N must be >= 2");
    if (spread < 0.0 || spread >= 1.0)
        throw std::invalid_argument("build_variance_profile: spread must lie in [0, 1) to keep variances positive");

    CounterRng rng(seed, /*stream_id=*/0x70726f66ULL);
    Eigen::MatrixXd base(N, N);
    std::uint64_t counter = 0;
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i <= j; ++i) {
            const double u = 2.0 * uniform_at(rng, counter++) - 1.0;
            base(i, j) = base(j, i) = 1.0 + spread * u;
        }
    }

    // Symmetric Sinkhorn balancing: scale by diag(x) on both sides until every
    // row of x_i base_ij x_j sums to N, then divide by N.
    Eigen::VectorXd x = Eigen::VectorXd::Ones(N);
    double residual = 1.0;
    for (int iter = 0; iter < 20000 && residual > 1e-13; ++iter) {
        const Eigen::VectorXd row = base * x;
        residual = 0.0;
        for (int i = 0; i < N; ++i) {
            const double sum = x(i) * row(i);
            residual = std::max(residual, std::abs(sum - static_cast<double>(N)));
            x(i) = std::sqrt(x(i) * static_cast<double>(N) / row(i));
        }
    }
    if (residual > 1e-11) throw std::runtime_error("build_variance_profile: Sinkhorn balancing failed to converge");

    Eigen::MatrixXd sigma2(N, N);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i <= j; ++i) sigma2(i, j) = sigma2(j, i) = x(i) * base(i, j) * x(j) / N;

    const double lo = sigma2.minCoeff() * N;
    const double hi = sigma2.maxCoeff() * N;
    if (!(lo > 0.0))
        throw std::invalid_argument("build_variance_profile: spread too large, lower variance bound lost");
    return VarianceProfile(std::move(sigma2), lo, hi);
}

spectral::SymmetricMatrix sample_wigner(const VarianceProfile& profile, EntryDistribution dist, std::uint64_t seed) {
    const int n = profile.dim();
    CounterRng rng(seed, /*stream_id=*/0x77696757ULL);
    Eigen::MatrixXd h(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= j; ++i) {
            const std::uint64_t entry_index = static_cast<std::uint64_t>(j) * (j + 1) / 2 + i;
            const double v = std::sqrt(profile.sigma2()(i, j)) * standardized_entry(rng, dist, entry_index);
            h(i, j) = h(j, i) = v;
        }
    }
    return spectral::SymmetricMatrix(std::move(h));
}

spectral::SymmetricMatrix sample_goe(int N, std::uint64_t seed) {
    if (N < 1) throw std::invalid_argument("sample_goe: N must be >= 1");
    CounterRng rng(seed, /*stream_id=*/0x676f65ULL);
    const double off = 1.0 / std::sqrt(static_cast<double>(N));
    const double diag = std::sqrt(2.0 / static_cast<double>(N));
    Eigen::MatrixXd h(N, N);
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i <= j; ++i) {
            const std::uint64_t entry_index = static_cast<std::uint64_t>(j) * (j + 1) / 2 + i;
            const double v = (i == j ? diag : off) * normal_at(rng, entry_index);
            h(i, j) = h(j, i) = v;
        }
    }
    return spectral::SymmetricMatrix(std::move(h));
}

spectral::SymmetricMatrix ou_interpolate(const spectral::SymmetricMatrix& h0, double s, std::uint64_t seed) {
    if (s < 0.0) throw std::invalid_argument("ou_interpolate: s must be >= 0");
    if (s == 0.0) return h0;
    const spectral::SymmetricMatrix fresh = sample_goe(h0.dim(), seed);
    const double keep = std::exp(-0.5 * s);
    const double mix = std::sqrt(1.0 - std::exp(-s));
    return spectral::SymmetricMatrix(keep * h0.entries() + mix * fresh.entries());
}

DbmTrajectory integrate_dbm(const spectral::SpectralData& start, double s_end, double dt, std::uint64_t seed,
                            const DbmOptions& options) {
    if (dt <= 0.0) throw std::invalid_argument("integrate_dbm: dt must be positive");
    if (s_end < 0.0 || s_end > 1.0) throw std::invalid_argument("integrate_dbm: s_end must lie in [0, 1]");
    const int n = start.dim();
    const double sqn = std::sqrt(static_cast<double>(n));

    std::vector<double> events = options.snapshot_times;
    events.push_back(s_end);
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());
    for (double e : events)
        if (e < 0.0 || e > s_end) throw std::invalid_argument("integrate_dbm: snapshot time outside [0, s_end]");

    Eigen::VectorXd lam = start.lambdas;
    Eigen::MatrixXd frame = start.vectors;
    CounterRng rng(seed, /*stream_id=*/0x64626dULL);

    DbmTrajectory traj;
    traj.seed = seed;
    traj.dt = dt;
    auto record = [&](double t) {
        Eigen::MatrixXd canonical = frame;
        spectral::fix_signs(canonical);
        traj.times.push_back(t);
        traj.states.push_back({lam, std::move(canonical)});
    };
    record(0.0);

    Eigen::MatrixXd mix(n, n);
    Eigen::VectorXd drift(n);
    double t = 0.0;
    for (double target : events) {
        if (target == 0.0) continue;
        const long steps = std::max<long>(1, static_cast<long>(std::ceil((target - t) / dt - 1e-9)));
        for (long step = 0; step < steps; ++step) {
            const bool last = (step + 1 == steps);
            const double h = last ? target - t : dt;
            const double sq_h = std::sqrt(h);

            mix.setZero();
            for (int k = 0; k < n; ++k) {
                double repulsion = 0.0;
                double curvature = 0.0;
                for (int l = 0; l < n; ++l) {
                    if (l == k) continue;
                    const double gap = lam(k) - lam(l);
                    repulsion += 1.0 / gap;
                    curvature += 1.0 / (gap * gap);
                }
                drift(k) = (repulsion / n - 0.5 * lam(k)) * h;
                mix(k, k) = -0.5 * h * curvature / n;
            }
            if (options.noise) {
                for (int k = 0; k < n; ++k) {
                    for (int l = k; l < n; ++l) {
                        const double g = rng.normal();
                        if (l == k) {
                            drift(k) += std::sqrt(2.0 * h) * g / sqn;
                        } else {
                            // Shared increment for the (k,l) and (l,k) slots.
                            const double b = sq_h * g / sqn;
                            mix(l, k) = b / (lam(k) - lam(l));
                            mix(k, l) = b / (lam(l) - lam(k));
                        }
                    }
                }
            }
            frame += frame * mix;
            lam += drift;
            t = last ? target : t + dt;

            sort_by_eigenvalue(lam, frame);
            for (int k = 0; k + 1 < n; ++k) {
                if (lam(k + 1) - lam(k) < 1e-12) {
                    std::ostringstream msg;
                    msg << "integrate_dbm: eigenvalue collision at s=" << t << " between indices " << k << " and "
                        << k + 1;
                    throw std::runtime_error(msg.str());
                }
            }
            modified_gram_schmidt(frame);
        }
        record(t);
    }
    return traj;
}

std::string trajectory_json(const DbmTrajectory& traj) {
    nlohmann::json j;
    j["times"] = traj.times;
    auto& lambdas = j["lambdas"] = nlohmann::json::array();
    for (const auto& state : traj.states) {
        lambdas.push_back(std::vector<double>(state.lambdas.data(), state.lambdas.data() + state.lambdas.size()));
    }
    j["seed"] = traj.seed;
    j["dt"] = traj.dt;
    return j.dump(2);
}

void write_trajectory_json(const DbmTrajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trajectory_json: cannot open " + path);
    out << trajectory_json(traj) << '\n';
}

}  // namespace rmlab::ensembles
