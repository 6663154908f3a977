#include "rmlab/semicircle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rmlab::semicircle {

namespace {
constexpr double kPi = std::numbers::pi;

void require_upper_half(std::complex<double> z, const char* what) {
    if (!(z.imag() > 0.0)) throw std::invalid_argument(std::string(what) + ": Im z must be positive");
}
}  // namespace

double rho_sc(double E) {
    const double t = 4.0 - E * E;
    return t > 0.0 ? std::sqrt(t) / (2.0 * kPi) : 0.0;
}

double cdf(double E) {
    if (E <= -2.0) return 0.0;
    if (E >= 2.0) return 1.0;
    return E * std::sqrt(4.0 - E * E) / (4.0 * kPi) + std::asin(0.5 * E) / kPi + 0.5;
}

std::complex<double> sqrt_branch(std::complex<double> z) {
    std::complex<double> w = std::sqrt(z * z - 4.0);
    if (std::abs(z + w) < std::abs(z - w)) w = -w;
    return w;
}

std::complex<double> m_sc(std::complex<double> z) {
    require_upper_half(z, "m_sc");
    return 0.5 * (-z + sqrt_branch(z));
}

Quantiles quantiles(int N) {
    if (N < 1) throw std::invalid_argument("quantiles: N must be >= 1");
    Quantiles out;
    out.n = N;
    out.gammas.resize(N);
    for (int i = 1; i <= N; ++i) {
        const double target = static_cast<double>(i) / N;
        double lo = -2.0, hi = 2.0;
        // cdf is exact, so plain bisection reaches full double precision.
        for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
            const double mid = 0.5 * (lo + hi);
            (cdf(mid) < target ? lo : hi) = mid;
        }
        out.gammas(i - 1) = (i == N) ? 2.0 : 0.5 * (lo + hi);
    }
    return out;
}

std::complex<double> characteristic(std::complex<double> z, double s) {
    if (s < 0.0) throw std::invalid_argument("characteristic: s must be >= 0");
    require_upper_half(z, "characteristic");
    const std::complex<double> zeta = 0.5 * (z + sqrt_branch(z));
    return std::exp(0.5 * s) * zeta + std::exp(-0.5 * s) / zeta;
}

double advection_residual(const ScalarField& h0, std::complex<double> z, double s) {
    require_upper_half(z, "advection_residual");
    const double h = 1e-5;
    auto hs = [&](std::complex<double> w, double t) { return h0(characteristic(w, t)); };

    std::complex<double> ds;
    if (s >= h) {
        ds = (hs(z, s + h) - hs(z, s - h)) / (2.0 * h);
    } else {
        ds = (hs(z, s + h) - hs(z, s)) / h;
    }
    const std::complex<double> dz = (hs(z + h, s) - hs(z - h, s)) / (2.0 * h);
    return std::abs(ds - (m_sc(z) + 0.5 * z) * dz);
}

}  // namespace rmlab::semicircle
