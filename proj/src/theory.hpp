// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bodyauth::theory {

// Finite joint distribution over (x, y, z) with binary y. All entropies
// are in nats.
struct DiscreteJoint {
    int nx = 0;
    int ny = 2;
    int nz = 0;
    std::vector<double> q;  // nx*ny*nz probabilities, row-major (x, y, z)

    double& at(int x, int y, int z) {
        return q[(static_cast<std::size_t>(x) * ny + y) * nz + z];
    }
    double at(int x, int y, int z) const {
        return q[(static_cast<std::size_t>(x) * ny + y) * nz + z];
    }
    double px(int x) const;
    // Posterior q(y | x); uniform for zero-probability x.
    std::vector<double> posterior_y(int x) const;
    std::vector<double> marginal_z() const;
    void validate() const;
};

// A table extractor is a total map X -> {0..codomain-1}; as far as the
// entropies are concerned only the induced partition of X matters.
using Extractor = std::vector<int>;

enum class Var { y, z };

// H(target | cell(x)) where cell assigns each x to a conditioning cell.
// Pass a constant vector for unconditional entropy, the identity for
// conditioning on x itself.
double conditional_entropy(const DiscreteJoint& joint, Var target,
                           const std::vector<int>& cell_of_x);

std::vector<int> identity_partition(int nx);
std::vector<int> constant_partition(int nx);

// Cells of `extractor` merged whenever their y-posteriors coincide within
// tol; this is the sigma-algebra of the map x -> q_y(.|E(x)).
std::vector<int> posterior_merged_partition(const DiscreteJoint& joint,
                                            const Extractor& extractor,
                                            double tol = 1e-9);

// Partition of X induced by x -> q_y(.|x) (the witness extractor).
std::vector<int> posterior_witness_partition(const DiscreteJoint& joint,
                                             double tol = 1e-9);

// Virtual value function of an extractor:
//   V(E) = H(y | E(x)) - lambda * H(z | E(x), q_y(.|E(x)))
// where the conditioning pair collapses to the partition of E itself.
double virtual_value(const DiscreteJoint& joint, const Extractor& extractor,
                     double lambda);

struct PredictorCheck {
    double entropy;          // H(y | E(x))
    double posterior_loss;   // cross-entropy of the posterior predictor
    double minimized_loss;   // independent numeric minimum over predictors
    double max_deviation;    // max |pairwise difference| of the three
    bool pass = false;       // max_deviation <= tol
};
// Verifies that the posterior predictor minimizes the cross-entropy loss
// and that the minimum equals H(y | E(x)).
PredictorCheck optimal_predictor_check(const DiscreteJoint& joint,
                                       const Extractor& extractor,
                                       double tol = 1e-9);

struct DiscriminatorCheck {
    double entropy;         // H(z | E(x), P(.|E(x)))
    double posterior_loss;
    double minimized_loss;
    double max_deviation;
    bool pass = false;
};
// Same for the discriminator; the conditioning variable is the pair
// (representation, predictor output), whose partition equals E's because
// the predictor output is a function of the representation.
DiscriminatorCheck optimal_discriminator_check(const DiscreteJoint& joint,
                                               const Extractor& extractor,
                                               double tol = 1e-9);

struct SearchCertificate {
    double v_min = 0.0;            // exhaustive minimum of V(E)
    double v_witness = 0.0;        // V at the posterior witness
    double lower_bound_margin = 0.0;  // min over E of V(E) - bound(E); >= -tol
    double witness_bound_gap = 0.0;   // |V(witness) - bound(witness)|
    bool witness_attains_bound = false;  // V(witness) == bound(witness)
    bool witness_is_minimum = false;     // V(witness) == v_min
    double max_eq11_deviation = 0.0;  // over all minimizers
    double max_eq12_deviation = 0.0;
    bool minimizers_satisfy_equalities = false;
    Extractor best;
    std::uint64_t extractors_enumerated = 0;
};
// Exhaustive search over all codomain^|X| extractors (refused above
// max_candidates). Certifies the lower bound
//   V(E) >= H(y|x) - lambda * H(z | q_y(.|E(x)))
// for every candidate, evaluates the posterior witness against it, and
// checks the information-preservation / conditional-independence
// equalities on every minimizer.
SearchCertificate optimal_extractor_search(const DiscreteJoint& joint,
                                           double lambda, int codomain_size,
                                           double tol = 1e-9,
                                           std::uint64_t max_candidates = 1000000);

struct OutputCheck {
    double max_predictor_deviation = 0.0;  // |P*(y|E*(x)) - q(y|x)|
    double max_discriminator_deviation = 0.0;
    bool pass = false;
};
// At the searched optimum, the model outputs collapse to the true
// posteriors: P matches q_y(.|x) and D matches q_z(.| q_y(.|x)).
OutputCheck optimal_output_check(const DiscreteJoint& joint, double lambda,
                                 int codomain_size, double tol = 1e-9);

// --- instance generators ----------------------------------------------------

// Unstructured random joint (normalized exponential draws).
DiscreteJoint random_joint(std::uint64_t seed, int nx, int nz);

// Random joint built so the posterior-witness partition is provably the
// unique optimum for every lambda > 0: x's are grouped into clusters with
// well-separated y-posteriors, and within every cluster the z-profiles
// average back to one shared z-marginal (so merging a cluster destroys
// no z-information while splitting one reveals some).
DiscreteJoint clustered_joint(std::uint64_t seed, int nx, int nz, int clusters);

}  // namespace bodyauth::theory
