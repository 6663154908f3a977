#include "rmlab/observables.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rmlab/rng.hpp"

namespace rmlab::observables {

void validate_family(const TestFamily& family) {
    const int m = family.size();
    if (m < 1 || m > family.ambient_dim)
        throw std::invalid_argument("TestFamily: need 1 <= |I| <= N");
    if (family.vectors.rows() != family.ambient_dim || family.vectors.cols() != m)
        throw std::invalid_argument("TestFamily: vector block has wrong shape");
    const Eigen::MatrixXd gram = family.vectors.transpose() * family.vectors;
    const double residual = (gram - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
    if (residual > 1e-10) {
        std::ostringstream msg;
        msg << "TestFamily: orthonormality residual " << residual << " exceeds 1e-10";
        throw std::invalid_argument(msg.str());
    }
}

TestFamily coordinate_family(int N, const std::vector<int>& indices) {
    if (indices.empty()) throw std::invalid_argument("coordinate_family: empty index set");
    std::set<int> seen;
    for (int idx : indices) {
        if (idx < 0 || idx >= N) throw std::invalid_argument("coordinate_family: index outside [0, N)");
        if (!seen.insert(idx).second) throw std::invalid_argument("coordinate_family: duplicate index");
    }
    TestFamily family;
    family.ambient_dim = N;
    family.index_set = indices;
    family.vectors = Eigen::MatrixXd::Zero(N, static_cast<int>(indices.size()));
    for (int a = 0; a < static_cast<int>(indices.size()); ++a) family.vectors(indices[a], a) = 1.0;
    return family;
}

TestFamily random_family(int N, int m, std::uint64_t seed) {
    if (m < 1 || m > N) throw std::invalid_argument("random_family: need 1 <= m <= N");
    CounterRng rng(seed, /*stream_id=*/0x66616dULL);
    Eigen::MatrixXd g(N, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < N; ++i) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(N, m);
    // Positive R diagonal makes the factorization (and hence the family) unique.
    const Eigen::MatrixXd r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    for (int j = 0; j < m; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);

    TestFamily family;
    family.ambient_dim = N;
    family.index_set.resize(m);
    for (int j = 0; j < m; ++j) family.index_set[j] = j;
    family.vectors = std::move(q);
    validate_family(family);
    return family;
}

OverlapTable overlaps(const spectral::SpectralData& s, const TestFamily& family) {
    if (family.ambient_dim != s.dim())
        throw std::invalid_argument("overlaps: family and spectral data dimensions differ");
    validate_family(family);
    const int n = s.dim();
    const int m = family.size();
    // coeff(a, k) = <q_a, u_k>; the table is its Gram matrix in k.
    const Eigen::MatrixXd coeff = family.vectors.transpose() * s.vectors;
    OverlapTable table;
    table.dim = n;
    table.set_size = m;
    table.p = coeff.transpose() * coeff;
    table.p.diagonal().array() -= static_cast<double>(m) / n;
    return table;
}

double clt_statistic(const OverlapTable& table, int k, int beta) {
    if (beta != 1)
        throw std::invalid_argument("clt_statistic: only beta = 1 (real symmetric) is supported");
    if (k < 0 || k >= table.dim) throw std::invalid_argument("clt_statistic: index outside [0, N)");
    const double n = table.dim;
    return std::sqrt(n * n / (2.0 * table.set_size)) * table.p(k, k);
}

double scaled_overlap(const OverlapTable& table, int k, int l) {
    if (k < 0 || k >= table.dim || l < 0 || l >= table.dim)
        throw std::invalid_argument("scaled_overlap: index outside [0, N)");
    return static_cast<double>(table.dim) / std::sqrt(static_cast<double>(table.set_size)) * table.p(k, l);
}

double que_error_scale(double s, int set_size, int n) {
    if (!(s > 0.0)) throw std::invalid_argument("que_error_scale: s must be positive");
    if (set_size < 1 || n < 1) throw std::invalid_argument("que_error_scale: set_size and n must be positive");
    const double i = set_size;
    const double nn = n;
    return i / (std::pow(nn, 1.5) * s * s) + std::sqrt(i / (nn * nn * s * s * s));
}

}  // namespace rmlab::observables
