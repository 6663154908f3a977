#include "rmlab/matchings.hpp"

#include <array>
#include <sstream>
#include <stdexcept>

namespace rmlab::matchings {

namespace {

constexpr int kMatchingCap = 6;
constexpr int kAssignmentCap = 5;
constexpr int kFactorCap = 12;

void check_site(int site, int n_sites, const char* what) {
    if (site < 0 || site >= n_sites) {
        std::ostringstream msg;
        msg << what << ": site " << site << " outside [0," << n_sites << ")";
        throw std::invalid_argument(msg.str());
    }
}

void matchings_recurse(std::vector<int>& sites, std::vector<bool>& used, Matching& current,
                       std::vector<Matching>& out) {
    int first = -1;
    for (int v = 0; v < static_cast<int>(sites.size()); ++v) {
        if (!used[v]) {
            first = v;
            break;
        }
    }
    if (first < 0) {
        out.push_back(current);
        return;
    }
    used[first] = true;
    for (int v = first + 1; v < static_cast<int>(sites.size()); ++v) {
        if (used[v]) continue;
        used[v] = true;
        current.emplace_back(sites[first], sites[v]);
        matchings_recurse(sites, used, current, out);
        current.pop_back();
        used[v] = false;
    }
    used[first] = false;
}

void assignments_recurse(int particle, int n_particles, std::vector<bool>& label_used, PairAssignment& current,
                         std::vector<PairAssignment>& out) {
    if (particle == n_particles) {
        out.push_back(current);
        return;
    }
    const int n_labels = static_cast<int>(label_used.size());
    for (int a = 0; a < n_labels; ++a) {
        if (label_used[a]) continue;
        for (int b = a + 1; b < n_labels; ++b) {
            if (label_used[b]) continue;
            label_used[a] = label_used[b] = true;
            current[particle] = {a, b};
            assignments_recurse(particle + 1, n_particles, label_used, current, out);
            label_used[a] = label_used[b] = false;
        }
    }
}

// <q_label, u_site> for the four-point observables, slot order (a1, b1, a2, b2).
std::array<double, 4> slot_coefficients(const spectral::SpectralData& s, const observables::TestFamily& family,
                                        const std::array<int, 4>& labels, int eigenvector) {
    std::array<double, 4> v{};
    for (int p = 0; p < 4; ++p) v[p] = family.vectors.col(labels[p]).dot(s.vectors.col(eigenvector));
    return v;
}

void check_four_point_args(const spectral::SpectralData& s, const observables::TestFamily& family,
                           const std::array<int, 4>& labels, int j, int k) {
    for (int p = 0; p < 4; ++p) {
        if (labels[p] < 0 || labels[p] >= family.size())
            throw std::invalid_argument("four_point observable: family label outside [0, |I|)");
        for (int q = p + 1; q < 4; ++q)
            if (labels[p] == labels[q])
                throw std::invalid_argument("four_point observable: family labels must be pairwise distinct");
    }
    if (j < 0 || j >= s.dim() || k < 0 || k >= s.dim())
        throw std::invalid_argument("four_point observable: eigenvector index outside [0, N)");
    if (family.ambient_dim != s.dim())
        throw std::invalid_argument("four_point observable: family and frame dimensions differ");
}

}  // namespace

int ParticleConfiguration::total() const {
    int n = 0;
    for (const auto& [site, mult] : occupancy) n += mult;
    return n;
}

int ParticleConfiguration::multiplicity(int site) const {
    const auto it = occupancy.find(site);
    return it == occupancy.end() ? 0 : it->second;
}

std::vector<std::pair<int, int>> ParticleConfiguration::key() const {
    return {occupancy.begin(), occupancy.end()};
}

ParticleConfiguration make_configuration(int n_sites, const std::vector<std::pair<int, int>>& sites) {
    if (n_sites < 1) throw std::invalid_argument("make_configuration: n_sites must be >= 1");
    ParticleConfiguration c;
    c.n_sites = n_sites;
    for (const auto& [site, mult] : sites) {
        check_site(site, n_sites, "make_configuration");
        if (mult < 1) throw std::invalid_argument("make_configuration: multiplicities must be >= 1");
        c.occupancy[site] += mult;
    }
    if (c.occupancy.empty()) throw std::invalid_argument("make_configuration: need at least one particle");
    return c;
}

ParticleConfiguration move_particle(const ParticleConfiguration& c, int i, int j) {
    check_site(i, c.n_sites, "move_particle");
    check_site(j, c.n_sites, "move_particle");
    if (i == j || c.multiplicity(i) == 0) return c;
    ParticleConfiguration out = c;
    if (--out.occupancy[i] == 0) out.occupancy.erase(i);
    ++out.occupancy[j];
    return out;
}

std::uint64_t matching_factor(const ParticleConfiguration& c) {
    if (c.total() > kFactorCap) {
        std::ostringstream msg;
        msg << "matching_factor: " << c.total() << " particles exceeds the exact 64-bit bound of " << kFactorCap;
        throw std::invalid_argument(msg.str());
    }
    std::uint64_t product = 1;
    for (const auto& [site, mult] : c.occupancy)
        for (int f = 2 * mult - 1; f > 1; f -= 2) product *= static_cast<std::uint64_t>(f);
    return product;
}

std::vector<Matching> enumerate_perfect_matchings(const ParticleConfiguration& c) {
    const int n = c.total();
    if (n > kMatchingCap) {
        std::ostringstream msg;
        msg << "enumerate_perfect_matchings: " << n << " particles exceeds the enumeration cap of " << kMatchingCap
            << " ((2n-1)!! growth)";
        throw std::invalid_argument(msg.str());
    }
    std::vector<int> sites;
    sites.reserve(2 * n);
    for (const auto& [site, mult] : c.occupancy)
        for (int a = 0; a < 2 * mult; ++a) sites.push_back(site);
    std::vector<bool> used(sites.size(), false);
    std::vector<Matching> out;
    Matching current;
    current.reserve(n);
    matchings_recurse(sites, used, current, out);
    return out;
}

double matching_observable(const observables::OverlapTable& table, const ParticleConfiguration& c) {
    for (const auto& [site, mult] : c.occupancy) check_site(site, table.dim, "matching_observable");
    const auto matchings = enumerate_perfect_matchings(c);
    double sum = 0.0;
    for (const auto& matching : matchings) {
        double product = 1.0;
        for (const auto& [a, b] : matching) product *= table.p(a, b);
        sum += product;
    }
    return sum / static_cast<double>(matching_factor(c));
}

std::vector<PairAssignment> enumerate_pair_assignments(const ParticleConfiguration& c) {
    const int n = c.total();
    if (n > kAssignmentCap) {
        std::ostringstream msg;
        msg << "enumerate_pair_assignments: " << n << " particles exceeds the enumeration cap of " << kAssignmentCap
            << " ((2n)!/2^n growth)";
        throw std::invalid_argument(msg.str());
    }
    std::vector<bool> label_used(2 * n, false);
    PairAssignment current(n);
    std::vector<PairAssignment> out;
    assignments_recurse(0, n, label_used, current, out);
    return out;
}

double assignment_observable(const spectral::SpectralData& s, const observables::TestFamily& family,
                             const std::vector<int>& labels, const ParticleConfiguration& c) {
    const int n = c.total();
    if (static_cast<int>(labels.size()) != 2 * n)
        throw std::invalid_argument("assignment_observable: need exactly 2n family labels");
    for (int label : labels)
        if (label < 0 || label >= family.size())
            throw std::invalid_argument("assignment_observable: family label outside [0, |I|)");
    if (family.ambient_dim != s.dim())
        throw std::invalid_argument("assignment_observable: family and frame dimensions differ");
    for (const auto& [site, mult] : c.occupancy) check_site(site, s.dim(), "assignment_observable");

    // particle_sites lists one entry per particle, in key() order.
    std::vector<int> particle_sites;
    particle_sites.reserve(n);
    for (const auto& [site, mult] : c.occupancy)
        for (int a = 0; a < mult; ++a) particle_sites.push_back(site);

    // coeff[t][p] = <q_{labels[p]}, u_{site of particle t}>.
    std::vector<std::vector<double>> coeff(n, std::vector<double>(2 * n));
    for (int t = 0; t < n; ++t)
        for (int p = 0; p < 2 * n; ++p)
            coeff[t][p] = family.vectors.col(labels[p]).dot(s.vectors.col(particle_sites[t]));

    const auto assignments = enumerate_pair_assignments(c);
    double sum = 0.0;
    for (const auto& assignment : assignments) {
        double product = 1.0;
        for (int t = 0; t < n; ++t) product *= coeff[t][assignment[t].first] * coeff[t][assignment[t].second];
        sum += product;
    }
    double prefactor = std::pow(2.0, n);
    for (int f = 2 * n; f > 1; --f) prefactor /= static_cast<double>(f);
    return prefactor * sum / static_cast<double>(matching_factor(c));
}

double four_point_symmetrized(const spectral::SpectralData& s, const observables::TestFamily& family, int a1, int b1,
                              int a2, int b2, int j, int k) {
    const std::array<int, 4> labels{a1, b1, a2, b2};
    check_four_point_args(s, family, labels, j, k);
    const double n2 = static_cast<double>(s.dim()) * static_cast<double>(s.dim());
    const auto vk = slot_coefficients(s, family, labels, k);
    if (j == k) return n2 / 3.0 * vk[0] * vk[1] * vk[2] * vk[3];
    const auto vj = slot_coefficients(s, family, labels, j);
    double z = 0.0;
    z += vj[0] * vj[1] * vk[2] * vk[3];
    z += vj[0] * vk[1] * vj[2] * vk[3];
    z += vj[0] * vk[1] * vk[2] * vj[3];
    z += vk[0] * vj[1] * vj[2] * vk[3];
    z += vk[0] * vj[1] * vk[2] * vj[3];
    z += vk[0] * vk[1] * vj[2] * vj[3];
    return n2 / 6.0 * z;
}

double four_point_fermionic(const spectral::SpectralData& s, const observables::TestFamily& family, int a1, int b1,
                            int a2, int b2, int j, int k) {
    const std::array<int, 4> labels{a1, b1, a2, b2};
    check_four_point_args(s, family, labels, j, k);
    if (j == k) return 0.0;
    const auto vj = slot_coefficients(s, family, labels, j);
    const auto vk = slot_coefficients(s, family, labels, k);
    const double n2 = static_cast<double>(s.dim()) * static_cast<double>(s.dim());
    const double y = vj[0] * vj[1] * vk[2] * vk[3] + vk[0] * vk[1] * vj[2] * vj[3];
    return 0.5 * n2 * y - four_point_symmetrized(s, family, a1, b1, a2, b2, j, k);
}

}  // namespace rmlab::matchings
