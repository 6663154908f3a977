#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "rmlab/observables.hpp"
#include "rmlab/spectral.hpp"

namespace rmlab::matchings {

/// Particle configuration xi on sites [0, n_sites): a sparse site ->
/// multiplicity map with every stored multiplicity >= 1.
struct ParticleConfiguration {
    int n_sites = 0;
    std::map<int, int> occupancy;

    int total() const;
    int multiplicity(int site) const;
    /// Canonical (site, multiplicity) list, usable as a map key.
    std::vector<std::pair<int, int>> key() const;
};

ParticleConfiguration make_configuration(int n_sites, const std::vector<std::pair<int, int>>& sites);

/// Moves one particle from i to j. If xi_i = 0 or i = j the configuration is
/// returned unchanged.
ParticleConfiguration move_particle(const ParticleConfiguration& c, int i, int j);

/// M(xi) = prod_k (2 xi_k - 1)!!, exact. Configurations with more than 12
/// particles are rejected (64-bit bound).
std::uint64_t matching_factor(const ParticleConfiguration& c);

/// A perfect matching of the doubled vertex set, stored as site pairs per edge.
using Matching = std::vector<std::pair<int, int>>;

/// All perfect matchings of the complete graph on the 2n doubled vertices
/// (2 xi_i copies of site i). Requires total <= 6; count is (2n-1)!!.
std::vector<Matching> enumerate_perfect_matchings(const ParticleConfiguration& c);

/// Perfect matching observable evaluated pointwise on an overlap table:
/// M(xi)^{-1} sum over matchings of prod_e p(site_1(e), site_2(e)).
double matching_observable(const observables::OverlapTable& table, const ParticleConfiguration& c);

/// Assignment of each particle (one vertex per particle, sites in key() order)
/// to an ordered label pair; the pairs partition [0, 2n).
using PairAssignment = std::vector<std::pair<int, int>>;

/// All assignments of the n particles to disjoint ordered pairs covering
/// [0, 2n). Requires total <= 5; count is (2n)!/2^n.
std::vector<PairAssignment> enumerate_pair_assignments(const ParticleConfiguration& c);

/// Symmetrized assignment observable, pointwise on the frame:
/// 2^n / ((2n)! M(xi)) * sum over assignments of
/// prod_{particle at site k} <q_{labels[s1]}, u_k> <q_{labels[s2]}, u_k>.
double assignment_observable(const spectral::SpectralData& s, const observables::TestFamily& family,
                             const std::vector<int>& labels, const ParticleConfiguration& c);

/// Averaged four-point observable for family labels (a1, b1, a2, b2), pairwise
/// distinct. j = k gives (N^2/3) <q_a1,u_k><q_b1,u_k><q_a2,u_k><q_b2,u_k>;
/// j != k gives (N^2/6) times the six-term symmetrization.
double four_point_symmetrized(const spectral::SpectralData& s, const observables::TestFamily& family, int a1, int b1,
                              int a2, int b2, int j, int k);

/// Signed four-point observable (N^2/2) Y - four_point_symmetrized, with
/// Y the two paired products; identically 0 when j = k.
double four_point_fermionic(const spectral::SpectralData& s, const observables::TestFamily& family, int a1, int b1,
                            int a2, int b2, int j, int k);

}  // namespace rmlab::matchings
