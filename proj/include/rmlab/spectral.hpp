#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>

namespace rmlab::spectral {

/// Point in the upper half plane where resolvents are evaluated.
struct SpectralPoint {
    double re;
    double im;
    SpectralPoint(double real, double imag);
    std::complex<double> value() const { return {re, im}; }
};

/// Dense real symmetric matrix. Symmetry and finiteness are enforced at
/// construction; every sampler and operator in this library produces entries
/// with entries(i,j) == entries(j,i) exactly.
class SymmetricMatrix {
  public:
    explicit SymmetricMatrix(Eigen::MatrixXd entries);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXd& entries() const { return entries_; }
    double max_abs() const { return entries_.cwiseAbs().maxCoeff(); }

  private:
    Eigen::MatrixXd entries_;
};

/// Eigendecomposition result: ascending eigenvalues and an orthonormal frame
/// whose column k is the eigenvector of lambdas(k). decompose() fixes signs so
/// that the first coordinate of magnitude above 1e-12 is positive.
struct SpectralData {
    Eigen::VectorXd lambdas;
    Eigen::MatrixXd vectors;

    int dim() const { return static_cast<int>(lambdas.size()); }
};

/// Flips eigenvector columns in place so the first coordinate with magnitude
/// above 1e-12 is positive.
void fix_signs(Eigen::MatrixXd& vectors);

/// Full symmetric eigendecomposition (LAPACK dsyevr), ascending and sign-fixed.
SpectralData decompose(const SymmetricMatrix& m);

/// Single eigenpair at position k of the ascending spectrum, sign-fixed.
/// Same contract as column k of decompose(m), at tridiagonalization cost.
std::pair<double, Eigen::VectorXd> decompose_one(const SymmetricMatrix& m, int k);

/// <q1, G(z) q2> = sum_i <q1,u_i><q2,u_i> / (lambda_i - z) for z in H.
/// Both arguments must be unit vectors (tolerance 1e-10).
std::complex<double> resolvent_quadratic(const SpectralData& s, const Eigen::VectorXd& q1, const Eigen::VectorXd& q2,
                                         SpectralPoint z);

/// Resolvent entry <e_a, G(z) e_b>.
std::complex<double> green_entry(const SpectralData& s, int a, int b, SpectralPoint z);

/// Normalized trace m_N(z) = N^{-1} sum_i (lambda_i - z)^{-1}.
std::complex<double> stieltjes(const SpectralData& s, SpectralPoint z);

/// Derivative of G_ab with respect to the mirrored entry pair (i,j), i != j:
/// -G_ai G_jb - G_aj G_ib.
std::complex<double> green_derivative(const SpectralData& s, int a, int b, int i, int j, SpectralPoint z);

}  // namespace rmlab::spectral
