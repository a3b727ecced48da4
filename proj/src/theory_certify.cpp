// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#include "theory_certify.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "common.hpp"
#include "rng.hpp"

namespace bodyauth::theory {

std::vector<Certificate> certify(const CertifyOptions& opt) {
    require(opt.instances >= 1, Errc::invalid_argument, "need >= 1 instance");
    require(opt.nx >= 4 && opt.nz >= 2 && opt.codomain >= 2,
            Errc::invalid_argument, "instance sizes too small");
    for (double l : opt.lambdas)
        require(l > 0.0, Errc::invalid_argument, "lambdas must be positive");

    Certificate prop1{"prop1",
                      "the posterior predictor minimizes L_P and its loss "
                      "equals H(y|E(x))",
                      0, 0.0, true};
    Certificate prop2{"prop2",
                      "the posterior discriminator minimizes L_D and its loss "
                      "equals H(z|E(x),P(.|E(x)))",
                      0, 0.0, true};
    Certificate bound{"prop3_bound",
                      "V(E) >= H(y|x) - lambda*H(z|q_y(.|E(x))) for every "
                      "enumerated extractor",
                      0, 0.0, true};
    Certificate witness_bound{"prop3_witness_bound",
                              "the extractor E*(x) = q_y(.|x) attains its "
                              "lower bound",
                              0, 0.0, true};
    Certificate witness_optimal{"prop3_witness_optimal",
                                "on cluster-balanced instances the witness "
                                "attains the exhaustive minimum of V",
                                0, 0.0, true};
    Certificate equalities{"prop3_equalities",
                           "every minimizer preserves H(y|x) and satisfies "
                           "the conditional-independence equality",
                           0, 0.0, true};
    Certificate outputs{"cor2_outputs",
                        "at the searched optimum, P matches q_y(.|x) and D "
                        "matches q_z(.|q_y(.|x)) for every lambda",
                        0, 0.0, true};

    auto fold = [](Certificate& c, double deviation, bool ok) {
        ++c.instances;
        c.max_deviation = std::max(c.max_deviation, deviation);
        c.pass = c.pass && ok;
    };

    for (int i = 0; i < opt.instances; ++i) {
        const std::uint64_t inst_seed =
            mix_seed(opt.seed, static_cast<std::uint64_t>(i));

        // Unstructured instances: the universally valid claims.
        {
            Rng pick(mix_seed(inst_seed, 0x01));
            const int nx =
                4 + static_cast<int>(pick.below(static_cast<std::uint64_t>(opt.nx - 3)));
            const int nz =
                2 + static_cast<int>(pick.below(static_cast<std::uint64_t>(opt.nz - 1)));
            const DiscreteJoint joint = random_joint(inst_seed, nx, nz);

            std::vector<Extractor> extractors;
            extractors.push_back(identity_partition(nx));
            extractors.push_back(constant_partition(nx));
            Extractor random_e(static_cast<std::size_t>(nx));
            for (auto& c : random_e)
                c = static_cast<int>(
                    pick.below(static_cast<std::uint64_t>(opt.codomain)));
            extractors.push_back(random_e);

            for (const auto& e : extractors) {
                const auto p1 = optimal_predictor_check(joint, e, opt.tol);
                fold(prop1, p1.max_deviation, p1.pass);
                const auto p2 = optimal_discriminator_check(joint, e, opt.tol);
                fold(prop2, p2.max_deviation, p2.pass);
            }
            for (double lambda : opt.lambdas) {
                const auto cert =
                    optimal_extractor_search(joint, lambda, opt.codomain, opt.tol);
                fold(bound, std::max(0.0, -cert.lower_bound_margin),
                     cert.lower_bound_margin >= -opt.tol);
                fold(witness_bound, cert.witness_bound_gap,
                     cert.witness_attains_bound);
            }
        }

        // Cluster-balanced instances: the equilibrium claims.
        {
            Rng pick(mix_seed(inst_seed, 0x02));
            const int max_clusters = std::min(opt.codomain, opt.nx / 2);
            const int clusters =
                2 + static_cast<int>(
                        pick.below(static_cast<std::uint64_t>(max_clusters - 1)));
            const int nx =
                std::max(2 * clusters,
                         4 + static_cast<int>(
                                 pick.below(static_cast<std::uint64_t>(opt.nx - 3))));
            const int nz =
                2 + static_cast<int>(pick.below(static_cast<std::uint64_t>(opt.nz - 1)));
            const DiscreteJoint joint = clustered_joint(inst_seed, nx, nz, clusters);

            for (double lambda : opt.lambdas) {
                const auto cert =
                    optimal_extractor_search(joint, lambda, opt.codomain, opt.tol);
                fold(bound, std::max(0.0, -cert.lower_bound_margin),
                     cert.lower_bound_margin >= -opt.tol);
                fold(witness_bound, cert.witness_bound_gap,
                     cert.witness_attains_bound);
                fold(witness_optimal, std::abs(cert.v_witness - cert.v_min),
                     cert.witness_is_minimum);
                fold(equalities,
                     std::max(cert.max_eq11_deviation, cert.max_eq12_deviation),
                     cert.minimizers_satisfy_equalities);
                const auto oc =
                    optimal_output_check(joint, lambda, opt.codomain, opt.tol);
                fold(outputs,
                     std::max(oc.max_predictor_deviation,
                              oc.max_discriminator_deviation),
                     oc.pass);
            }
        }
    }

    return {prop1,          prop2,      bound,  witness_bound,
            witness_optimal, equalities, outputs};
}

std::string certificates_json(const CertifyOptions& opt,
                              std::span<const Certificate> certificates) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["options"] = {{"seed", opt.seed},         {"instances", opt.instances},
                    {"nx", opt.nx},             {"nz", opt.nz},
                    {"codomain", opt.codomain}, {"lambdas", opt.lambdas},
                    {"tol", opt.tol}};
    nlohmann::ordered_json certs = nlohmann::ordered_json::array();
    bool all_pass = true;
    for (const auto& c : certificates) {
        certs.push_back({{"proposition", c.proposition},
                         {"statement", c.statement},
                         {"instances", c.instances},
                         {"max_deviation", c.max_deviation},
                         {"pass", c.pass}});
        all_pass = all_pass && c.pass;
    }
    j["certificates"] = certs;
    j["all_pass"] = all_pass;
    return j.dump(2) + "\n";
}

}  // namespace bodyauth::theory
