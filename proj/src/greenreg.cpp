#include "rmlab/greenreg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rmlab::greenreg {

namespace {

constexpr double kPi = std::numbers::pi;

void check_index(int idx, int n, const char* what) {
    if (idx < 0 || idx >= n) throw std::invalid_argument(std::string(what) + ": index outside [0, N)");
}

double hat_index(int index, int n) { return static_cast<double>(std::min(index + 1, n - index)); }

void check_upper(std::complex<double> z, const char* what) {
    if (!(z.imag() > 0.0)) throw std::invalid_argument(std::string(what) + ": Im z must be positive");
}

// Poisson mass of [lo, hi] seen from lambda at scale eta, by the arctan
// antiderivative: pi^{-1} (arctan((hi-lambda)/eta) - arctan((lo-lambda)/eta)).
double window_mass(double lambda, double lo, double hi, double eta) {
    return (std::atan((hi - lambda) / eta) - std::atan((lo - lambda) / eta)) / kPi;
}

}  // namespace

void validate(const RegParams& params) {
    if (!(params.delta2 > 0.0) || !(params.epsilon2 > 0.0))
        throw std::invalid_argument("RegParams: exponents must be positive");
    if (!(params.epsilon2 > params.delta2))
        throw std::invalid_argument("RegParams: requires epsilon2 > delta2");
}

MicroInterval micro_interval(double center, int index, int n, double delta2) {
    check_index(index, n, "micro_interval");
    MicroInterval iv;
    iv.center = center;
    iv.index = index;
    iv.n = n;
    iv.half_width_outer = std::pow(n, -delta2) / (std::pow(n, 2.0 / 3.0) * std::cbrt(hat_index(index, n)));
    iv.half_width_inner = 0.5 * iv.half_width_outer;
    return iv;
}

double eta_scale(int index, int n, double epsilon2) {
    check_index(index, n, "eta_scale");
    return std::pow(n, -epsilon2) / (std::pow(n, 2.0 / 3.0) * std::cbrt(hat_index(index, n)));
}

spectral::SymmetricMatrix theta_scale_entry(const spectral::SymmetricMatrix& m, int a, int b, double w) {
    check_index(a, m.dim(), "theta_scale_entry");
    check_index(b, m.dim(), "theta_scale_entry");
    if (w < 0.0 || w > 1.0) throw std::invalid_argument("theta_scale_entry: w outside [0, 1]");
    Eigen::MatrixXd entries = m.entries();
    const double scaled = w * entries(a, b);
    entries(a, b) = scaled;
    entries(b, a) = scaled;
    return spectral::SymmetricMatrix(std::move(entries));
}

int count_eigs(const Eigen::VectorXd& sorted_lambdas, double lo, double hi) {
    if (hi < lo) return 0;
    const double* begin = sorted_lambdas.data();
    const double* end = begin + sorted_lambdas.size();
    return static_cast<int>(std::upper_bound(begin, end, hi) - std::lower_bound(begin, end, lo));
}

int count_eigs(const Eigen::VectorXd& sorted_lambdas, const MicroInterval& interval, bool inner) {
    const double h = inner ? interval.half_width_inner : interval.half_width_outer;
    return count_eigs(sorted_lambdas, interval.center - h, interval.center + h);
}

double overlap_kernel_resolvent(const spectral::SpectralData& s, const observables::TestFamily& family,
                                std::complex<double> z1, std::complex<double> z2) {
    check_upper(z1, "overlap_kernel_resolvent");
    check_upper(z2, "overlap_kernel_resolvent");
    if (family.ambient_dim != s.dim())
        throw std::invalid_argument("overlap_kernel_resolvent: dimensions differ");
    const int n = s.dim();
    const int m = family.size();
    const Eigen::MatrixXd coeff = family.vectors.transpose() * s.vectors;  // (alpha, i) -> <q_a, u_i>

    Eigen::VectorXd k1(n), k2(n);
    for (int i = 0; i < n; ++i) {
        const double d1 = s.lambdas(i) - z1.real();
        const double d2 = s.lambdas(i) - z2.real();
        k1(i) = z1.imag() / (d1 * d1 + z1.imag() * z1.imag());
        k2(i) = z2.imag() / (d2 * d2 + z2.imag() * z2.imag());
    }

    // Im<q_a, G(z) q_b> = sum_i coeff(a,i) coeff(b,i) k(i).
    const Eigen::MatrixXd g1 = coeff * k1.asDiagonal() * coeff.transpose();
    const Eigen::MatrixXd g2 = coeff * k2.asDiagonal() * coeff.transpose();
    const double term1 = g1.cwiseProduct(g2).sum() / m;

    double term2 = 0.0;
    double term3 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double k12 = k1(i) * k2(i);
        term2 += k12 * coeff.col(i).squaredNorm();
        term3 += k12;
    }
    term2 *= -2.0 / n;
    term3 *= static_cast<double>(m) / (static_cast<double>(n) * n);
    return term1 + term2 + term3;
}

double overlap_kernel_spectral(const observables::OverlapTable& table, const Eigen::VectorXd& lambdas,
                               std::complex<double> z1, std::complex<double> z2) {
    check_upper(z1, "overlap_kernel_spectral");
    check_upper(z2, "overlap_kernel_spectral");
    const int n = table.dim;
    if (static_cast<int>(lambdas.size()) != n)
        throw std::invalid_argument("overlap_kernel_spectral: dimensions differ");
    Eigen::VectorXd k1(n), k2(n);
    for (int i = 0; i < n; ++i) {
        const double d1 = lambdas(i) - z1.real();
        const double d2 = lambdas(i) - z2.real();
        k1(i) = z1.imag() / (d1 * d1 + z1.imag() * z1.imag());
        k2(i) = z2.imag() / (d2 * d2 + z2.imag() * z2.imag());
    }
    return k1.dot(table.p.cwiseProduct(table.p) * k2) / table.set_size;
}

namespace {

// Arctan window masses A(i) of the inner interval at lambda_anchor, one per
// eigenvalue, at the smoothing scale of position `index`.
Eigen::VectorXd window_masses(const Eigen::VectorXd& lambdas, int index, int n, const RegParams& params) {
    const double eta = eta_scale(index, n, params.epsilon2);
    const MicroInterval iv = micro_interval(lambdas(index), index, n, params.delta2);
    const double lo = iv.center - iv.half_width_inner;
    const double hi = iv.center + iv.half_width_inner;
    Eigen::VectorXd a(n);
    for (int i = 0; i < n; ++i) a(i) = window_mass(lambdas(i), lo, hi, eta);
    return a;
}

}  // namespace

double regularized_overlap(const spectral::SpectralData& s, const observables::TestFamily& family, int k, int l,
                           const RegParams& params) {
    validate(params);
    const int n = s.dim();
    check_index(k, n, "regularized_overlap");
    check_index(l, n, "regularized_overlap");
    const observables::OverlapTable table = observables::overlaps(s, family);
    const Eigen::VectorXd a = window_masses(s.lambdas, k, n, params);
    const Eigen::VectorXd b = window_masses(s.lambdas, l, n, params);
    const double scale = static_cast<double>(n) * n / table.set_size;
    return scale * a.dot(table.p.cwiseProduct(table.p) * b);
}

double window_factor(int n, const RegParams& params) {
    return 2.0 / kPi * std::atan(0.5 * std::pow(n, params.epsilon2 - params.delta2));
}

double regularized_overlap_own_term(const spectral::SpectralData& s, const observables::TestFamily& family, int k,
                                    int l, const RegParams& params) {
    validate(params);
    const observables::OverlapTable table = observables::overlaps(s, family);
    const double w = window_factor(s.dim(), params);
    const double hat = observables::scaled_overlap(table, k, l);
    return w * w * hat * hat;
}

double regularized_entry(const spectral::SpectralData& s, const observables::TestFamily& family, int l, int alpha,
                         const RegParams& params) {
    validate(params);
    const int n = s.dim();
    check_index(l, n, "regularized_entry");
    if (alpha < 0 || alpha >= family.size())
        throw std::invalid_argument("regularized_entry: family label outside [0, |I|)");
    if (family.ambient_dim != n) throw std::invalid_argument("regularized_entry: dimensions differ");
    const Eigen::VectorXd a = window_masses(s.lambdas, l, n, params);
    const Eigen::VectorXd c = s.vectors.transpose() * family.vectors.col(alpha);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += (c(i) * c(i) - 1.0 / n) * a(i);
    return sum;
}

double regularized_mass(const spectral::SpectralData& s, const observables::TestFamily& family, int l,
                        const RegParams& params) {
    validate(params);
    const int n = s.dim();
    check_index(l, n, "regularized_mass");
    if (family.ambient_dim != n) throw std::invalid_argument("regularized_mass: dimensions differ");
    double sum = 0.0;
    for (int alpha = 0; alpha < family.size(); ++alpha) sum += regularized_entry(s, family, l, alpha, params);
    return static_cast<double>(n) / std::sqrt(static_cast<double>(family.size())) * sum;
}

}  // namespace rmlab::greenreg
