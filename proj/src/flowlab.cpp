#include "rmlab/flowlab.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rmlab::flowlab {

namespace {

double lookup_config(const ConfigValues& values, const matchings::ParticleConfiguration& c) {
    const auto it = values.find(c.key());
    if (it == values.end()) {
        std::ostringstream msg;
        msg << "flow rhs: missing value for configuration {";
        for (const auto& [site, mult] : c.occupancy) msg << " " << site << ":" << mult;
        msg << " }";
        throw std::invalid_argument(msg.str());
    }
    return it->second;
}

double lookup_pair(const PairValues& values, int a, int b) {
    const auto it = values.find(std::minmax(a, b));
    if (it == values.end()) {
        std::ostringstream msg;
        msg << "flow rhs: missing value for index pair (" << a << "," << b << ")";
        throw std::invalid_argument(msg.str());
    }
    return it->second;
}

double configuration_flow_rhs(const ConfigValues& values, const Eigen::VectorXd& lambdas,
                              const matchings::ParticleConfiguration& c, int n, double coefficient_scale) {
    if (static_cast<int>(lambdas.size()) < c.n_sites)
        throw std::invalid_argument("flow rhs: fewer eigenvalues than sites");
    const double base = lookup_config(values, c);
    double sum = 0.0;
    for (const auto& [k, mult_k] : c.occupancy) {
        for (int l = 0; l < c.n_sites; ++l) {
            if (l == k) continue;
            const double gap = lambdas(k) - lambdas(l);
            const double coeff = coefficient_scale * mult_k * (1.0 + 2.0 * c.multiplicity(l));
            sum += coeff * (lookup_config(values, matchings::move_particle(c, k, l)) - base) / (n * gap * gap);
        }
    }
    return sum;
}

}  // namespace

const char* flow_kind_name(FlowKind kind) {
    switch (kind) {
        case FlowKind::matching: return "matching";
        case FlowKind::assignment: return "assignment";
        case FlowKind::four_point: return "four_point";
        case FlowKind::fermionic: return "fermionic";
    }
    return "unknown";
}

spectral::SpectralData rotate_pair(const spectral::SpectralData& s, int k, int l, double theta) {
    if (k == l) throw std::invalid_argument("rotate_pair: requires k != l");
    if (k < 0 || k >= s.dim() || l < 0 || l >= s.dim())
        throw std::invalid_argument("rotate_pair: index outside [0, N)");
    spectral::SpectralData out = s;
    const double c = std::cos(theta), sn = std::sin(theta);
    out.vectors.col(k) = c * s.vectors.col(k) - sn * s.vectors.col(l);
    out.vectors.col(l) = sn * s.vectors.col(k) + c * s.vectors.col(l);
    return out;
}

double generator_second_difference(const FrameObservable& obs, const spectral::SpectralData& s, int k, int l,
                                   double h) {
    if (h < 1e-6 || h > 1e-3) throw std::invalid_argument("generator_second_difference: h outside [1e-6, 1e-3]");
    const double plus = obs(rotate_pair(s, k, l, h));
    const double center = obs(s);
    const double minus = obs(rotate_pair(s, k, l, -h));
    return (plus - 2.0 * center + minus) / (h * h);
}

double matching_flow_rhs(const ConfigValues& values, const Eigen::VectorXd& lambdas,
                         const matchings::ParticleConfiguration& c, int n) {
    return configuration_flow_rhs(values, lambdas, c, n, 2.0);
}

double assignment_flow_rhs(const ConfigValues& values, const Eigen::VectorXd& lambdas,
                           const matchings::ParticleConfiguration& c, int n) {
    return configuration_flow_rhs(values, lambdas, c, n, 1.0);
}

double four_point_flow_rhs(const PairValues& values, const Eigen::VectorXd& lambdas, int j, int k, int n) {
    const int sites = static_cast<int>(lambdas.size());
    if (j < 0 || j >= sites || k < 0 || k >= sites)
        throw std::invalid_argument("four_point_flow_rhs: index outside [0, N)");
    const double base = lookup_pair(values, j, k);
    auto zeta = [&](int l) { return (l == j || l == k) ? 1.0 : 0.0; };
    double sum = 0.0;
    for (int l = 0; l < sites; ++l) {
        if (l != k) {
            const double gap = lambdas(l) - lambdas(k);
            sum += (1.0 + 2.0 * zeta(l)) * (lookup_pair(values, j, l) - base) / (n * gap * gap);
        }
        if (l != j) {
            const double gap = lambdas(l) - lambdas(j);
            sum += (1.0 + 2.0 * zeta(l)) * (lookup_pair(values, l, k) - base) / (n * gap * gap);
        }
    }
    return sum;
}

double fermionic_flow_rhs(const PairValues& values, const Eigen::VectorXd& lambdas, int j, int k, int n) {
    const int sites = static_cast<int>(lambdas.size());
    if (j < 0 || j >= sites || k < 0 || k >= sites)
        throw std::invalid_argument("fermionic_flow_rhs: index outside [0, N)");
    if (j == k) throw std::invalid_argument("fermionic_flow_rhs: flow is defined for j != k");
    const double base = lookup_pair(values, j, k);
    double sum = 0.0;
    for (int l = 0; l < sites; ++l) {
        if (l == j || l == k) continue;
        const double gap_j = lambdas(j) - lambdas(l);
        const double gap_k = lambdas(k) - lambdas(l);
        sum += (lookup_pair(values, l, k) - base) / (n * gap_j * gap_j);
        sum += (lookup_pair(values, j, l) - base) / (n * gap_k * gap_k);
    }
    return sum;
}

double FlowObservable::evaluate(const spectral::SpectralData& frame) const {
    switch (kind) {
        case FlowKind::matching:
            return matchings::matching_observable(observables::overlaps(frame, family), config);
        case FlowKind::assignment:
            return matchings::assignment_observable(frame, family, labels, config);
        case FlowKind::four_point:
            return matchings::four_point_symmetrized(frame, family, labels[0], labels[1], labels[2], labels[3], j, k);
        case FlowKind::fermionic:
            return matchings::four_point_fermionic(frame, family, labels[0], labels[1], labels[2], labels[3], j, k);
    }
    throw std::logic_error("FlowObservable: unknown kind");
}

FlowObservable make_matching_flow(observables::TestFamily family, matchings::ParticleConfiguration config) {
    FlowObservable obs;
    obs.kind = FlowKind::matching;
    obs.family = std::move(family);
    obs.config = std::move(config);
    return obs;
}

FlowObservable make_assignment_flow(observables::TestFamily family, matchings::ParticleConfiguration config,
                                    std::vector<int> labels) {
    FlowObservable obs;
    obs.kind = FlowKind::assignment;
    obs.family = std::move(family);
    obs.config = std::move(config);
    obs.labels = std::move(labels);
    return obs;
}

namespace {
FlowObservable make_four_point_kind(FlowKind kind, observables::TestFamily family, int a1, int b1, int a2, int b2,
                                    int j, int k) {
    FlowObservable obs;
    obs.kind = kind;
    obs.family = std::move(family);
    obs.labels = {a1, b1, a2, b2};
    obs.j = j;
    obs.k = k;
    return obs;
}
}  // namespace

FlowObservable make_four_point_flow(observables::TestFamily family, int a1, int b1, int a2, int b2, int j, int k) {
    return make_four_point_kind(FlowKind::four_point, std::move(family), a1, b1, a2, b2, j, k);
}

FlowObservable make_fermionic_flow(observables::TestFamily family, int a1, int b1, int a2, int b2, int j, int k) {
    return make_four_point_kind(FlowKind::fermionic, std::move(family), a1, b1, a2, b2, j, k);
}

FlowResidual generator_flow_residual(const FlowObservable& obs, const spectral::SpectralData& s, double h) {
    const int n = s.dim();

    // The observable is constant in every column outside its support, so the
    // generator sum is restricted to pairs meeting the support.
    std::set<int> support;
    if (obs.kind == FlowKind::matching || obs.kind == FlowKind::assignment) {
        for (const auto& [site, mult] : obs.config.occupancy) support.insert(site);
    } else {
        support.insert(obs.j);
        support.insert(obs.k);
    }

    FrameObservable eval = [&obs](const spectral::SpectralData& frame) { return obs.evaluate(frame); };
    double generator = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            if (!support.count(a) && !support.count(b)) continue;
            const double coarse = generator_second_difference(eval, s, a, b, h);
            const double fine = generator_second_difference(eval, s, a, b, 0.5 * h);
            const double second = (4.0 * fine - coarse) / 3.0;
            const double gap = s.lambdas(a) - s.lambdas(b);
            generator += 0.5 * second / (n * gap * gap);
        }
    }

    double rhs = 0.0;
    switch (obs.kind) {
        case FlowKind::matching:
        case FlowKind::assignment: {
            ConfigValues values;
            auto put = [&](const matchings::ParticleConfiguration& c) {
                FlowObservable moved = obs;
                moved.config = c;
                values.emplace(c.key(), moved.evaluate(s));
            };
            put(obs.config);
            for (const auto& [site, mult] : obs.config.occupancy)
                for (int l = 0; l < obs.config.n_sites; ++l)
                    if (l != site) put(matchings::move_particle(obs.config, site, l));
            rhs = (obs.kind == FlowKind::matching) ? matching_flow_rhs(values, s.lambdas, obs.config, n)
                                                   : assignment_flow_rhs(values, s.lambdas, obs.config, n);
            break;
        }
        case FlowKind::four_point:
        case FlowKind::fermionic: {
            PairValues values;
            auto put = [&](int a, int b) {
                const auto key = std::minmax(a, b);
                if (values.count(key)) return;
                FlowObservable moved = obs;
                moved.j = key.first;
                moved.k = key.second;
                values.emplace(key, moved.evaluate(s));
            };
            put(obs.j, obs.k);
            for (int l = 0; l < n; ++l) {
                put(obs.j, l);
                put(l, obs.k);
            }
            rhs = (obs.kind == FlowKind::four_point) ? four_point_flow_rhs(values, s.lambdas, obs.j, obs.k, n)
                                                     : fermionic_flow_rhs(values, s.lambdas, obs.j, obs.k, n);
            break;
        }
    }

    FlowResidual out;
    out.generator = generator;
    out.rhs = rhs;
    out.absolute = std::abs(generator - rhs);
    const double scale = std::max(std::abs(generator), std::abs(rhs));
    out.relative = scale > 0.0 ? out.absolute / scale : 0.0;
    return out;
}

}  // namespace rmlab::flowlab
