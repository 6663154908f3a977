#pragma once

#include <Eigen/Dense>
#include <complex>

#include "rmlab/observables.hpp"
#include "rmlab/spectral.hpp"

namespace rmlab::greenreg {

/// Exponents of the Poisson regularization. The smoothing scale at spectral
/// position i is eta_i = N^{-epsilon2} / (N^{2/3} ihat^{1/3}) and the
/// integration window has half-width N^{-delta2} / (2 N^{2/3} ihat^{1/3}),
/// with ihat = min(i+1, N-i) for 0-based i. Requires epsilon2 > delta2.
struct RegParams {
    double delta2 = 0.05;
    double epsilon2 = 0.10;
};

void validate(const RegParams& params);

/// Micro-interval around an energy x at spectral position index (0-based).
/// The outer interval has half-width N^{-delta2} / (N^{2/3} ihat^{1/3}), the
/// inner one half of that.
struct MicroInterval {
    double center = 0.0;
    int index = 0;
    int n = 0;
    double half_width_outer = 0.0;
    double half_width_inner = 0.0;
};

MicroInterval micro_interval(double center, int index, int n, double delta2);

/// eta_i for the given spectral position.
double eta_scale(int index, int n, double epsilon2);

/// Entry replacement: scales the mirrored pair (a,b),(b,a) by w in [0,1].
spectral::SymmetricMatrix theta_scale_entry(const spectral::SymmetricMatrix& m, int a, int b, double w);

/// Number of sorted eigenvalues inside [lo, hi], by binary search.
int count_eigs(const Eigen::VectorXd& sorted_lambdas, double lo, double hi);
int count_eigs(const Eigen::VectorXd& sorted_lambdas, const MicroInterval& interval, bool inner = false);

/// Three-term resolvent form of the smoothed overlap statistic:
///   |I|^{-1} sum_{ab} Im<q_a,G(z1)q_b> Im<q_a,G(z2)q_b>
///   - 2 N^{-1} sum_a <q_a, Im G(z1) Im G(z2) q_a>
///   + N^{-2} |I| tr Im G(z1) Im G(z2).
double overlap_kernel_resolvent(const spectral::SpectralData& s, const observables::TestFamily& family,
                                std::complex<double> z1, std::complex<double> z2);

/// Spectral form of the same statistic:
///   |I|^{-1} sum_{ij} eta1 eta2 p_ij^2 / (((l_i-E1)^2+eta1^2)((l_j-E2)^2+eta2^2)),
/// equal to overlap_kernel_resolvent as an algebraic identity.
double overlap_kernel_spectral(const observables::OverlapTable& table, const Eigen::VectorXd& lambdas,
                               std::complex<double> z1, std::complex<double> z2);

/// Regularized pair observable v(k,l): the double integral of the smoothed
/// overlap statistic over the inner windows at lambda_k and lambda_l, scaled
/// by N^2/pi^2. Evaluated exactly per (i,j) term through the arctan
/// antiderivative of the Poisson kernel; always nonnegative.
double regularized_overlap(const spectral::SpectralData& s, const observables::TestFamily& family, int k, int l,
                           const RegParams& params);

/// Lower bound on regularized_overlap from its own (k,l) term: the product of
/// the two arctan window factors times scaled_overlap(k,l)^2.
double regularized_overlap_own_term(const spectral::SpectralData& s, const observables::TestFamily& family, int k,
                                    int l, const RegParams& params);

/// (2/pi) arctan(N^{epsilon2 - delta2} / 2): the Poisson mass each inner
/// window captures of its own eigenvalue.
double window_factor(int n, const RegParams& params);

/// Regularized centered eigenvector entry
///   v_l(alpha) = pi^{-1} int_{inner window at lambda_l}
///                Im(<q_a, G(E+i eta_l) q_a> - m_N(E+i eta_l)) dE,
/// via the exact arctan integration.
double regularized_entry(const spectral::SpectralData& s, const observables::TestFamily& family, int l, int alpha,
                         const RegParams& params);

/// q_ll = (N / sqrt(|I|)) sum_alpha v_l(alpha).
double regularized_mass(const spectral::SpectralData& s, const observables::TestFamily& family, int l,
                        const RegParams& params);

}  // namespace rmlab::greenreg
