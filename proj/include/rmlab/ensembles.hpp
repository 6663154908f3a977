#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rmlab/spectral.hpp"

namespace rmlab::ensembles {

enum class EntryDistribution { gaussian, rademacher, uniform };

EntryDistribution parse_distribution(std::string_view name);

/// Entry variances sigma_ij^2 of a generalized Wigner ensemble: symmetric,
/// every column sums to 1, and c/N <= sigma_ij^2 <= C/N for the stored bounds.
class VarianceProfile {
  public:
    VarianceProfile(Eigen::MatrixXd sigma2, double lower_scaled, double upper_scaled);

    int dim() const { return static_cast<int>(sigma2_.rows()); }
    const Eigen::MatrixXd& sigma2() const { return sigma2_; }
    double lower_scaled() const { return lower_; }  // c with c/N <= sigma^2
    double upper_scaled() const { return upper_; }  // C with sigma^2 <= C/N

  private:
    Eigen::MatrixXd sigma2_;
    double lower_;
    double upper_;
};

/// Profile with entries N*sigma^2 in [1-spread, 1+spread], Sinkhorn-balanced
/// so each column sums to 1. spread = 0 gives the flat profile 1/N.
VarianceProfile build_variance_profile(int N, double spread, std::uint64_t seed);

/// Independent centered entries on the upper triangle with variances from the
/// profile; mirrored exactly. Deterministic per seed.
spectral::SymmetricMatrix sample_wigner(const VarianceProfile& profile, EntryDistribution dist, std::uint64_t seed);

/// GOE sample: Gaussian entries with variance (1 + delta_ij)/N.
spectral::SymmetricMatrix sample_goe(int N, std::uint64_t seed);

/// Matrix Ornstein-Uhlenbeck evolution sampled exactly in law:
/// e^{-s/2} h0 + sqrt(1 - e^{-s}) G with a fresh GOE sample G. s = 0 returns
/// h0 unchanged.
spectral::SymmetricMatrix ou_interpolate(const spectral::SymmetricMatrix& h0, double s, std::uint64_t seed);

struct DbmOptions {
    bool noise = true;                   // false runs the deterministic drift only
    std::vector<double> snapshot_times;  // ascending; s_end is always recorded
};

/// Snapshots of a coupled eigenvalue/eigenvector Dyson Brownian motion path.
struct DbmTrajectory {
    std::vector<double> times;
    std::vector<spectral::SpectralData> states;
    std::uint64_t seed = 0;
    double dt = 0.0;
};

/// Euler-Maruyama integration of the coupled eigenvalue and eigenvector SDEs
/// with shared symmetric Brownian increments. After every step the eigenvalues
/// are re-sorted (columns permuted alongside) and the frame re-orthonormalized
/// by modified Gram-Schmidt. Throws on an eigenvalue collision (gap < 1e-12),
/// reporting the time and indices.
DbmTrajectory integrate_dbm(const spectral::SpectralData& start, double s_end, double dt, std::uint64_t seed,
                            const DbmOptions& options = {});

/// JSON export with fields {times, lambdas, seed, dt}.
std::string trajectory_json(const DbmTrajectory& traj);
void write_trajectory_json(const DbmTrajectory& traj, const std::string& path);

}  // namespace rmlab::ensembles
