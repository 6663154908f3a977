#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

namespace rmlab::semicircle {

/// Semicircle density sqrt((4 - E^2)_+) / (2 pi).
double rho_sc(double E);

/// Cumulative mass of rho_sc over [-2, E], clamped to [0, 1].
double cdf(double E);

/// Stieltjes transform of the semicircle law for Im z > 0, computed from the
/// closed-form root (-z + sqrt(z^2 - 4)) / 2 on the branch mapping H to H.
std::complex<double> m_sc(std::complex<double> z);

/// N-quantiles gamma_i of the semicircle law: cdf(gamma_i) = i/N, i = 1..N.
struct Quantiles {
    int n = 0;
    Eigen::VectorXd gammas;
};

Quantiles quantiles(int N);

/// sqrt(z^2 - 4) on the branch with |z + w| >= |z - w|; for Im z > 0 this is
/// the branch with positive imaginary part.
std::complex<double> sqrt_branch(std::complex<double> z);

/// Characteristic trajectory z_s = e^{s/2} zeta + e^{-s/2} / zeta with
/// zeta = (z + sqrt(z^2 - 4)) / 2. z_0 = z and Im z_s increases in s.
std::complex<double> characteristic(std::complex<double> z, double s);

using ScalarField = std::function<std::complex<double>(std::complex<double>)>;

/// Residual |d_s h_s(z) - (m_sc(z) + z/2) d_z h_s(z)| of the transported field
/// h_s(z) = h0(z_s), with both derivatives taken by central differences
/// (step 1e-5). Small for any h0 holomorphic near the trajectory.
double advection_residual(const ScalarField& h0, std::complex<double> z, double s);

}  // namespace rmlab::semicircle
