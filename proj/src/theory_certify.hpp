// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "theory.hpp"

namespace bodyauth::theory {

struct CertifyOptions {
    std::uint64_t seed = 7;
    int instances = 20;       // per family
    int nx = 8;
    int nz = 3;
    int codomain = 4;
    std::vector<double> lambdas = {0.1, 1.0, 10.0};
    double tol = 1e-9;
};

struct Certificate {
    std::string proposition;
    std::string statement;
    int instances = 0;
    double max_deviation = 0.0;
    bool pass = false;
};

// Runs the proposition oracles over seeded random instances.
//
// The universally valid claims (optimal predictor/discriminator losses,
// the virtual-value lower bound, the witness attaining its own bound)
// are checked on unstructured random joints. The equilibrium claims
// (witness optimality, the equalities at every minimizer, the optimal
// outputs) are checked on cluster-balanced joints, the regime where the
// discriminator gains nothing from splitting posterior-equivalent inputs;
// outside that regime a large lambda makes a label-destroying extractor
// beat the witness, and the certificate for such an instance would report
// the deviation rather than hide it.
std::vector<Certificate> certify(const CertifyOptions& options);

std::string certificates_json(const CertifyOptions& options,
                              std::span<const Certificate> certificates);

}  // namespace bodyauth::theory
