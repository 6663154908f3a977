#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rmlab/spectral.hpp"

namespace rmlab::observables {

/// Orthonormal test family (q_alpha), one column per label in index_set.
struct TestFamily {
    int ambient_dim = 0;
    std::vector<int> index_set;
    Eigen::MatrixXd vectors;  // ambient_dim x |index_set|

    int size() const { return static_cast<int>(index_set.size()); }
};

/// Validates orthonormality (tolerance 1e-10) and size bounds.
void validate_family(const TestFamily& family);

/// Standard-basis family q_alpha = e_alpha for the given distinct indices.
TestFamily coordinate_family(int N, const std::vector<int>& indices);

/// m orthonormal columns from the QR factorization of a Gaussian N x m draw,
/// deterministic per seed.
TestFamily random_family(int N, int m, std::uint64_t seed);

/// All overlap observables for a fixed (frame, family) pair:
///   p(k,k) = sum_alpha <q_a,u_k>^2 - |I|/N,  p(k,l) = sum_alpha <q_a,u_k><q_a,u_l>.
struct OverlapTable {
    int dim = 0;
    int set_size = 0;
    Eigen::MatrixXd p;
};

OverlapTable overlaps(const spectral::SpectralData& s, const TestFamily& family);

/// sqrt(beta N^2 / (2|I|)) * p(k,k). Only beta = 1 (real symmetric) is in scope.
double clt_statistic(const OverlapTable& table, int k, int beta = 1);

/// Rescaled ergodicity/mixing observable (N / sqrt(|I|)) * p(k,l).
double scaled_overlap(const OverlapTable& table, int k, int l);

/// Relaxation error scale |I| / (N^{3/2} s^2) + sqrt(|I| / (N^2 s^3)), s > 0.
double que_error_scale(double s, int set_size, int n);

}  // namespace rmlab::observables
