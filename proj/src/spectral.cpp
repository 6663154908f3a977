#include "rmlab/spectral.hpp"

#include <lapacke.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rmlab::spectral {

SpectralPoint::SpectralPoint(double real, double imag) : re(real), im(imag) {
    if (!(im > 0.0)) {
        std::ostringstream msg;
        msg << "SpectralPoint: Im z must be positive, got " << imag;
        throw std::invalid_argument(msg.str());
    }
}

SymmetricMatrix::SymmetricMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() < 1 || entries_.rows() != entries_.cols())
        throw std::invalid_argument("SymmetricMatrix: need a square matrix with dim >= 1");
    const int n = static_cast<int>(entries_.rows());
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= j; ++i) {
            if (!std::isfinite(entries_(i, j))) {
                std::ostringstream msg;
                msg << "SymmetricMatrix: non-finite entry at (" << i << "," << j << ")";
                throw std::invalid_argument(msg.str());
            }
            if (entries_(i, j) != entries_(j, i)) {
                std::ostringstream msg;
                msg << "SymmetricMatrix: entries (" << i << "," << j << ") and (" << j << "," << i
                    << ") differ";
                throw std::invalid_argument(msg.str());
            }
        }
    }
}

void fix_signs(Eigen::MatrixXd& vectors) {
    const int n = static_cast<int>(vectors.rows());
    for (int k = 0; k < static_cast<int>(vectors.cols()); ++k) {
        for (int i = 0; i < n; ++i) {
            const double v = vectors(i, k);
            if (std::abs(v) > 1e-12) {
                if (v < 0.0) vectors.col(k) = -vectors.col(k);
                break;
            }
        }
    }
}

namespace {

void check_index(int idx, int n, const char* what) {
    if (idx < 0 || idx >= n) {
        std::ostringstream msg;
        msg << what << " index " << idx << " outside [0," << n << ")";
        throw std::invalid_argument(msg.str());
    }
}

SpectralData syevr_range(const SymmetricMatrix& m, char range, int il, int iu) {
    const int n = m.dim();
    std::vector<double> a(m.entries().data(), m.entries().data() + static_cast<std::size_t>(n) * n);
    const int want = (range == 'A') ? n : iu - il + 1;
    Eigen::VectorXd w(n);
    Eigen::MatrixXd z(n, want);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(std::max(1, want)));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', range, 'L', n, a.data(), n, 0.0, 0.0, il, iu,
                                           0.0, &found, w.data(), z.data(), n, isuppz.data());
    if (info != 0 || found != want) {
        std::ostringstream msg;
        msg << "decompose: dsyevr failed (info=" << info << ", found=" << found << ")";
        throw std::runtime_error(msg.str());
    }
    fix_signs(z);
    SpectralData out;
    out.lambdas = w.head(want);
    out.vectors = std::move(z);
    return out;
}

}  // namespace

SpectralData decompose(const SymmetricMatrix& m) { return syevr_range(m, 'A', 0, 0); }

std::pair<double, Eigen::VectorXd> decompose_one(const SymmetricMatrix& m, int k) {
    check_index(k, m.dim(), "decompose_one: eigenvalue");
    SpectralData s = syevr_range(m, 'I', k + 1, k + 1);
    return {s.lambdas(0), s.vectors.col(0)};
}

std::complex<double> resolvent_quadratic(const SpectralData& s, const Eigen::VectorXd& q1, const Eigen::VectorXd& q2,
                                         SpectralPoint z) {
    if (q1.size() != s.dim() || q2.size() != s.dim())
        throw std::invalid_argument("resolvent_quadratic: test vector dimension mismatch");
    if (std::abs(q1.norm() - 1.0) > 1e-10 || std::abs(q2.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("resolvent_quadratic: test vectors must be unit length");
    const Eigen::VectorXd c1 = s.vectors.transpose() * q1;
    const Eigen::VectorXd c2 = s.vectors.transpose() * q2;
    const std::complex<double> zz = z.value();
    std::complex<double> sum = 0.0;
    for (int i = 0; i < s.dim(); ++i) sum += c1(i) * c2(i) / (s.lambdas(i) - zz);
    return sum;
}

std::complex<double> green_entry(const SpectralData& s, int a, int b, SpectralPoint z) {
    check_index(a, s.dim(), "green_entry: row");
    check_index(b, s.dim(), "green_entry: column");
    const std::complex<double> zz = z.value();
    std::complex<double> sum = 0.0;
    for (int i = 0; i < s.dim(); ++i) sum += s.vectors(a, i) * s.vectors(b, i) / (s.lambdas(i) - zz);
    return sum;
}

std::complex<double> stieltjes(const SpectralData& s, SpectralPoint z) {
    const std::complex<double> zz = z.value();
    std::complex<double> sum = 0.0;
    for (int i = 0; i < s.dim(); ++i) sum += 1.0 / (s.lambdas(i) - zz);
    return sum / static_cast<double>(s.dim());
}

std::complex<double> green_derivative(const SpectralData& s, int a, int b, int i, int j, SpectralPoint z) {
    check_index(a, s.dim(), "green_derivative: a");
    check_index(b, s.dim(), "green_derivative: b");
    check_index(i, s.dim(), "green_derivative: i");
    check_index(j, s.dim(), "green_derivative: j");
    if (i == j)
        throw std::invalid_argument("green_derivative: requires i != j (mirrored off-diagonal perturbation)");
    return -green_entry(s, a, i, z) * green_entry(s, j, b, z) - green_entry(s, a, j, z) * green_entry(s, i, b, z);
}

}  // namespace rmlab::spectral
