#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "rmlab/matchings.hpp"
#include "rmlab/observables.hpp"
#include "rmlab/spectral.hpp"

namespace rmlab::flowlab {

enum class FlowKind { matching, assignment, four_point, fermionic };

const char* flow_kind_name(FlowKind kind);

/// Plane rotation of eigenvector columns k and l by angle theta:
/// u_k <- cos(t) u_k - sin(t) u_l, u_l <- sin(t) u_k + cos(t) u_l.
/// Eigenvalues untouched; no sign convention re-applied (the flow is smooth).
spectral::SpectralData rotate_pair(const spectral::SpectralData& s, int k, int l, double theta);

using FrameObservable = std::function<double(const spectral::SpectralData&)>;

/// Central second difference (F(h) - 2 F(0) + F(-h)) / h^2 of
/// F(theta) = obs(rotate_pair(s, k, l, theta)); approximates the squared
/// rotation generator applied to obs. Requires h in [1e-6, 1e-3].
double generator_second_difference(const FrameObservable& obs, const spectral::SpectralData& s, int k, int l,
                                   double h);

using ConfigKey = std::vector<std::pair<int, int>>;
using ConfigValues = std::map<ConfigKey, double>;
using PairValues = std::map<std::pair<int, int>, double>;

/// sum_{k != l} 2 xi_k (1 + 2 xi_l) (f(xi^{kl}) - f(xi)) / (N (lambda_k - lambda_l)^2).
/// values must contain xi and every single-move neighbor; a missing entry is
/// rejected with the offending configuration.
double matching_flow_rhs(const ConfigValues& values, const Eigen::VectorXd& lambdas,
                         const matchings::ParticleConfiguration& c, int n);

/// Same assembly with coefficient xi_k (1 + 2 xi_l), half the matching one.
double assignment_flow_rhs(const ConfigValues& values, const Eigen::VectorXd& lambdas,
                           const matchings::ParticleConfiguration& c, int n);

/// Two-sum flow for the symmetrized four-point observables with occupation
/// weights zeta(l) = 1 on {j, k} and 0 elsewhere.
double four_point_flow_rhs(const PairValues& values, const Eigen::VectorXd& lambdas, int j, int k, int n);

/// Exclusion flow for the signed observables: both sums skip l in {j, k}.
double fermionic_flow_rhs(const PairValues& values, const Eigen::VectorXd& lambdas, int j, int k, int n);

/// A flow observable bound to its configuration or index data, evaluated
/// pointwise on a frame (polynomial in the eigenvector entries).
struct FlowObservable {
    FlowKind kind;
    observables::TestFamily family;
    matchings::ParticleConfiguration config;  // matching / assignment kinds
    std::vector<int> labels;                  // assignment: 2n labels; four-point: 4
    int j = -1;                               // four_point / fermionic kinds
    int k = -1;

    double evaluate(const spectral::SpectralData& frame) const;
};

FlowObservable make_matching_flow(observables::TestFamily family, matchings::ParticleConfiguration config);
FlowObservable make_assignment_flow(observables::TestFamily family, matchings::ParticleConfiguration config,
                                    std::vector<int> labels);
FlowObservable make_four_point_flow(observables::TestFamily family, int a1, int b1, int a2, int b2, int j, int k);
FlowObservable make_fermionic_flow(observables::TestFamily family, int a1, int b1, int a2, int b2, int j, int k);

struct FlowResidual {
    double generator = 0.0;  // (1/2) sum_{k<l} X_{kl}^2 F / (N (lambda_k - lambda_l)^2)
    double rhs = 0.0;        // matching *_flow_rhs assembly from pointwise values
    double absolute = 0.0;
    double relative = 0.0;   // absolute / max(|generator|, |rhs|), 0 when both vanish
};

/// Compares the finite-difference generator application (step h with one
/// Richardson refinement) against the assembled flow right-hand side for the
/// observable's kind, on the given frame.
FlowResidual generator_flow_residual(const FlowObservable& obs, const spectral::SpectralData& s, double h = 1e-4);

}  // namespace rmlab::flowlab
