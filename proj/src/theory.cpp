// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#include "theory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "common.hpp"
#include "rng.hpp"

namespace bodyauth::theory {

namespace {

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

}  // namespace

double DiscreteJoint::px(int x) const {
    double s = 0.0;
    for (int y = 0; y < ny; ++y)
        for (int z = 0; z < nz; ++z) s += at(x, y, z);
    return s;
}

std::vector<double> DiscreteJoint::posterior_y(int x) const {
    std::vector<double> post(static_cast<std::size_t>(ny));
    double s = 0.0;
    for (int y = 0; y < ny; ++y) {
        for (int z = 0; z < nz; ++z) post[static_cast<std::size_t>(y)] += at(x, y, z);
        s += post[static_cast<std::size_t>(y)];
    }
    if (s <= 0.0) {
        std::fill(post.begin(), post.end(), 1.0 / ny);
    } else {
        for (auto& p : post) p /= s;
    }
    return post;
}

std::vector<double> DiscreteJoint::marginal_z() const {
    std::vector<double> m(static_cast<std::size_t>(nz), 0.0);
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z) m[static_cast<std::size_t>(z)] += at(x, y, z);
    return m;
}

void DiscreteJoint::validate() const {
    require(nx >= 1 && ny == 2 && nz >= 1, Errc::invalid_argument,
            "joint must have |Y| = 2 and non-empty X, Z");
    require(q.size() == static_cast<std::size_t>(nx) * ny * nz,
            Errc::invalid_argument, "joint table size mismatch");
    double s = 0.0;
    for (double p : q) {
        require(p >= 0.0 && std::isfinite(p), Errc::invalid_argument,
                "joint probabilities must be finite and >= 0");
        s += p;
    }
    require(std::abs(s - 1.0) < 1e-9, Errc::invalid_argument,
            "joint probabilities must sum to 1");
}

double conditional_entropy(const DiscreteJoint& joint, Var target,
                           const std::vector<int>& cell_of_x) {
    require(cell_of_x.size() == static_cast<std::size_t>(joint.nx),
            Errc::invalid_argument, "partition must cover X");
    const int n_cells =
        1 + *std::max_element(cell_of_x.begin(), cell_of_x.end());
    const int nt = target == Var::y ? joint.ny : joint.nz;

    // w[cell][t] = q(cell, t); H(T|C) = -sum w log(w / p_cell).
    std::vector<double> w(static_cast<std::size_t>(n_cells) * nt, 0.0);
    for (int x = 0; x < joint.nx; ++x) {
        const int cell = cell_of_x[static_cast<std::size_t>(x)];
        require(cell >= 0, Errc::invalid_argument, "negative cell id");
        for (int y = 0; y < joint.ny; ++y)
            for (int z = 0; z < joint.nz; ++z) {
                const int t = target == Var::y ? y : z;
                w[static_cast<std::size_t>(cell) * nt + t] += joint.at(x, y, z);
            }
    }
    double h = 0.0;
    for (int c = 0; c < n_cells; ++c) {
        double pc = 0.0;
        for (int t = 0; t < nt; ++t) pc += w[static_cast<std::size_t>(c) * nt + t];
        if (pc <= 0.0) continue;
        for (int t = 0; t < nt; ++t) {
            const double wt = w[static_cast<std::size_t>(c) * nt + t];
            h -= xlogx(wt);
        }
        h += xlogx(pc);
    }
    return h;
}

std::vector<int> identity_partition(int nx) {
    std::vector<int> p(static_cast<std::size_t>(nx));
    std::iota(p.begin(), p.end(), 0);
    return p;
}

std::vector<int> constant_partition(int nx) {
    return std::vector<int>(static_cast<std::size_t>(nx), 0);
}

namespace {

// Group rows of `vectors` (all the same length) by L-inf closeness.
std::vector<int> group_by_vector(const std::vector<std::vector<double>>& vectors,
                                 double tol) {
    std::vector<std::vector<double>> reps;
    std::vector<int> group(vectors.size(), -1);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t r = 0; r < reps.size(); ++r) {
            double d = 0.0;
            for (std::size_t k = 0; k < vectors[i].size(); ++k)
                d = std::max(d, std::abs(vectors[i][k] - reps[r][k]));
            if (d <= tol) {
                group[i] = static_cast<int>(r);
                break;
            }
        }
        if (group[i] < 0) {
            group[i] = static_cast<int>(reps.size());
            reps.push_back(vectors[i]);
        }
    }
    return group;
}

// Per-cell y-posterior of an extractor partition.
std::vector<std::vector<double>> cell_posteriors(const DiscreteJoint& joint,
                                                 const Extractor& extractor) {
    const int n_cells =
        1 + *std::max_element(extractor.begin(), extractor.end());
    std::vector<std::vector<double>> post(
        static_cast<std::size_t>(n_cells),
        std::vector<double>(static_cast<std::size_t>(joint.ny), 0.0));
    std::vector<double> mass(static_cast<std::size_t>(n_cells), 0.0);
    for (int x = 0; x < joint.nx; ++x) {
        const int c = extractor[static_cast<std::size_t>(x)];
        for (int y = 0; y < joint.ny; ++y)
            for (int z = 0; z < joint.nz; ++z) {
                post[static_cast<std::size_t>(c)][static_cast<std::size_t>(y)] +=
                    joint.at(x, y, z);
                mass[static_cast<std::size_t>(c)] += joint.at(x, y, z);
            }
    }
    for (int c = 0; c < n_cells; ++c) {
        if (mass[static_cast<std::size_t>(c)] > 0.0) {
            for (auto& p : post[static_cast<std::size_t>(c)])
                p /= mass[static_cast<std::size_t>(c)];
        } else {
            std::fill(post[static_cast<std::size_t>(c)].begin(),
                      post[static_cast<std::size_t>(c)].end(), 1.0 / joint.ny);
        }
    }
    return post;
}

}  // namespace

std::vector<int> posterior_merged_partition(const DiscreteJoint& joint,
                                            const Extractor& extractor,
                                            double tol) {
    const auto post = cell_posteriors(joint, extractor);
    const auto cell_group = group_by_vector(post, tol);
    std::vector<int> merged(static_cast<std::size_t>(joint.nx));
    for (int x = 0; x < joint.nx; ++x)
        merged[static_cast<std::size_t>(x)] =
            cell_group[static_cast<std::size_t>(
                extractor[static_cast<std::size_t>(x)])];
    return merged;
}

std::vector<int> posterior_witness_partition(const DiscreteJoint& joint,
                                             double tol) {
    std::vector<std::vector<double>> posts;
    posts.reserve(static_cast<std::size_t>(joint.nx));
    for (int x = 0; x < joint.nx; ++x) posts.push_back(joint.posterior_y(x));
    return group_by_vector(posts, tol);
}

double virtual_value(const DiscreteJoint& joint, const Extractor& extractor,
                     double lambda) {
    require(lambda >= 0.0, Errc::invalid_argument, "lambda must be >= 0");
    // The conditioning pair (E(x), q_y(.|E(x))) generates the same partition
    // as E(x) alone, since the posterior is a function of the cell.
    return conditional_entropy(joint, Var::y, extractor) -
           lambda * conditional_entropy(joint, Var::z, extractor);
}

namespace {

// Independent numeric route for "the posterior minimizes cross-entropy":
// per-cell coordinate descent with golden-section line search over the
// probability simplex. Deliberately avoids the closed-form answer.
double golden_minimize(const std::function<double(double)>& f, double lo,
                       double hi) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

// min over p in simplex of -sum_t w[t] log p[t]; returns the minimum value.
double minimize_cell_cross_entropy(const std::vector<double>& w) {
    const std::size_t k = w.size();
    const double eps = 1e-15;
    std::vector<double> p(k, 1.0 / static_cast<double>(k));
    auto objective = [&]() {
        double v = 0.0;
        for (std::size_t t = 0; t < k; ++t)
            v -= w[t] * std::log(std::max(p[t], eps));
        return v;
    };
    // Coordinate descent: redistribute mass between p[t] and the rest.
    for (int round = 0; round < 120; ++round) {
        for (std::size_t t = 0; t < k; ++t) {
            const double rest = 1.0 - p[t];
            if (rest <= eps) continue;
            // p[t] <- a, others scaled by (1-a)/rest.
            auto line = [&](double a) {
                double v = -w[t] * std::log(std::max(a, eps));
                const double scale = (1.0 - a) / rest;
                for (std::size_t u = 0; u < k; ++u) {
                    if (u == t) continue;
                    v -= w[u] * std::log(std::max(p[u] * scale, eps));
                }
                return v;
            };
            const double a = golden_minimize(line, eps, 1.0 - eps);
            const double scale = (1.0 - a) / rest;
            for (std::size_t u = 0; u < k; ++u)
                if (u != t) p[u] *= scale;
            p[t] = a;
        }
    }
    return objective();
}

// Total minimized cross-entropy over all cells of the partition.
double minimize_partition_cross_entropy(const DiscreteJoint& joint, Var target,
                                        const std::vector<int>& cell_of_x) {
    const int n_cells =
        1 + *std::max_element(cell_of_x.begin(), cell_of_x.end());
    const int nt = target == Var::y ? joint.ny : joint.nz;
    std::vector<std::vector<double>> w(
        static_cast<std::size_t>(n_cells),
        std::vector<double>(static_cast<std::size_t>(nt), 0.0));
    for (int x = 0; x < joint.nx; ++x)
        for (int y = 0; y < joint.ny; ++y)
            for (int z = 0; z < joint.nz; ++z) {
                const int t = target == Var::y ? y : z;
                w[static_cast<std::size_t>(
                    cell_of_x[static_cast<std::size_t>(x)])]
                 [static_cast<std::size_t>(t)] += joint.at(x, y, z);
            }
    double total = 0.0;
    for (const auto& cell : w) {
        const double mass = std::accumulate(cell.begin(), cell.end(), 0.0);
        if (mass <= 0.0) continue;
        total += minimize_cell_cross_entropy(cell);
    }
    return total;
}

// Expected -log posterior(target | cell): the analytic loss of the
// posterior table, written as a per-sample expectation (a second route
// to the same value as conditional_entropy).
double posterior_table_loss(const DiscreteJoint& joint, Var target,
                            const std::vector<int>& cell_of_x) {
    const int n_cells =
        1 + *std::max_element(cell_of_x.begin(), cell_of_x.end());
    const int nt = target == Var::y ? joint.ny : joint.nz;
    std::vector<std::vector<double>> w(
        static_cast<std::size_t>(n_cells),
        std::vector<double>(static_cast<std::size_t>(nt), 0.0));
    std::vector<double> mass(static_cast<std::size_t>(n_cells), 0.0);
    for (int x = 0; x < joint.nx; ++x)
        for (int y = 0; y < joint.ny; ++y)
            for (int z = 0; z < joint.nz; ++z) {
                const int c = cell_of_x[static_cast<std::size_t>(x)];
                const int t = target == Var::y ? y : z;
                w[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)] +=
                    joint.at(x, y, z);
                mass[static_cast<std::size_t>(c)] += joint.at(x, y, z);
            }
    double loss = 0.0;
    for (int x = 0; x < joint.nx; ++x)
        for (int y = 0; y < joint.ny; ++y)
            for (int z = 0; z < joint.nz; ++z) {
                const double p = joint.at(x, y, z);
                if (p <= 0.0) continue;
                const int c = cell_of_x[static_cast<std::size_t>(x)];
                const int t = target == Var::y ? y : z;
                const double posterior =
                    w[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)] /
                    mass[static_cast<std::size_t>(c)];
                loss -= p * std::log(posterior);
            }
    return loss;
}

double max_pairwise_deviation(std::initializer_list<double> values) {
    double lo = *values.begin(), hi = *values.begin();
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

}  // namespace

PredictorCheck optimal_predictor_check(const DiscreteJoint& joint,
                                       const Extractor& extractor, double tol) {
    joint.validate();
    PredictorCheck r{};
    r.entropy = conditional_entropy(joint, Var::y, extractor);
    r.posterior_loss = posterior_table_loss(joint, Var::y, extractor);
    r.minimized_loss = minimize_partition_cross_entropy(joint, Var::y, extractor);
    r.max_deviation =
        max_pairwise_deviation({r.entropy, r.posterior_loss, r.minimized_loss});
    r.pass = r.max_deviation <= tol;
    return r;
}

DiscriminatorCheck optimal_discriminator_check(const DiscreteJoint& joint,
                                               const Extractor& extractor,
                                               double tol) {
    joint.validate();
    DiscriminatorCheck r{};
    r.entropy = conditional_entropy(joint, Var::z, extractor);
    r.posterior_loss = posterior_table_loss(joint, Var::z, extractor);
    r.minimized_loss = minimize_partition_cross_entropy(joint, Var::z, extractor);
    r.max_deviation =
        max_pairwise_deviation({r.entropy, r.posterior_loss, r.minimized_loss});
    r.pass = r.max_deviation <= tol;
    return r;
}

SearchCertificate optimal_extractor_search(const DiscreteJoint& joint,
                                           double lambda, int codomain_size,
                                           double tol,
                                           std::uint64_t max_candidates) {
    joint.validate();
    require(lambda > 0.0, Errc::invalid_argument, "lambda must be > 0");
    require(codomain_size >= 1, Errc::invalid_argument,
            "codomain must be non-empty");

    double total = 1.0;
    for (int x = 0; x < joint.nx; ++x) total *= codomain_size;
    require(total <= static_cast<double>(max_candidates), Errc::unsupported,
            "extractor search space " + std::to_string(total) +
                " exceeds limit " + std::to_string(max_candidates));
    const std::uint64_t n_extractors = static_cast<std::uint64_t>(total);

    const double h_y_given_x =
        conditional_entropy(joint, Var::y, identity_partition(joint.nx));

    auto evaluate = [&](const Extractor& e, double& v, double& bound) {
        v = virtual_value(joint, e, lambda);
        const auto merged = posterior_merged_partition(joint, e, tol);
        bound = h_y_given_x - lambda * conditional_entropy(joint, Var::z, merged);
    };

    SearchCertificate cert;
    cert.extractors_enumerated = n_extractors;
    Extractor e(static_cast<std::size_t>(joint.nx), 0);
    double v_min = std::numeric_limits<double>::infinity();
    double worst_margin = std::numeric_limits<double>::infinity();

    auto advance = [&](Extractor& cur) {
        for (std::size_t i = 0; i < cur.size(); ++i) {
            if (++cur[i] < codomain_size) return true;
            cur[i] = 0;
        }
        return false;
    };

    // Pass 1: minimum and the universal lower bound.
    do {
        double v, bound;
        evaluate(e, v, bound);
        worst_margin = std::min(worst_margin, v - bound);
        if (v < v_min) {
            v_min = v;
            cert.best = e;
        }
    } while (advance(e));
    cert.v_min = v_min;
    cert.lower_bound_margin = worst_margin;

    // Pass 2: every minimizer must preserve y-information and satisfy the
    // conditional-independence equality.
    std::fill(e.begin(), e.end(), 0);
    double max11 = 0.0, max12 = 0.0;
    do {
        const double v = virtual_value(joint, e, lambda);
        if (v <= v_min + 1e-12) {
            const double hy = conditional_entropy(joint, Var::y, e);
            const double hz = conditional_entropy(joint, Var::z, e);
            const auto merged = posterior_merged_partition(joint, e, tol);
            const double hz_merged = conditional_entropy(joint, Var::z, merged);
            max11 = std::max(max11, std::abs(hy - h_y_given_x));
            max12 = std::max(max12, std::abs(hz - hz_merged));
        }
    } while (advance(e));
    cert.max_eq11_deviation = max11;
    cert.max_eq12_deviation = max12;
    cert.minimizers_satisfy_equalities = max11 <= tol && max12 <= tol;

    // Witness: E*(x) = q_y(.|x). Its value and its own lower bound.
    const auto witness = posterior_witness_partition(joint, tol);
    cert.v_witness = virtual_value(joint, witness, lambda);
    const auto witness_merged = posterior_merged_partition(joint, witness, tol);
    const double witness_bound =
        h_y_given_x -
        lambda * conditional_entropy(joint, Var::z, witness_merged);
    cert.witness_bound_gap = std::abs(cert.v_witness - witness_bound);
    cert.witness_attains_bound = cert.witness_bound_gap <= tol;
    cert.witness_is_minimum = std::abs(cert.v_witness - cert.v_min) <= tol;
    return cert;
}

OutputCheck optimal_output_check(const DiscreteJoint& joint, double lambda,
                                 int codomain_size, double tol) {
    const auto cert = optimal_extractor_search(joint, lambda, codomain_size, tol);
    const Extractor& best = cert.best;

    OutputCheck r{};
    const auto best_post = cell_posteriors(joint, best);
    const auto witness = posterior_witness_partition(joint, tol);

    // z-posteriors per witness cell (the distribution q_z(.| q_y(.|x))).
    const int n_witness_cells =
        1 + *std::max_element(witness.begin(), witness.end());
    std::vector<std::vector<double>> z_given_witness(
        static_cast<std::size_t>(n_witness_cells),
        std::vector<double>(static_cast<std::size_t>(joint.nz), 0.0));
    std::vector<double> witness_mass(static_cast<std::size_t>(n_witness_cells), 0.0);
    // z-posteriors per searched-optimum cell.
    const int n_best_cells = 1 + *std::max_element(best.begin(), best.end());
    std::vector<std::vector<double>> z_given_best(
        static_cast<std::size_t>(n_best_cells),
        std::vector<double>(static_cast<std::size_t>(joint.nz), 0.0));
    std::vector<double> best_mass(static_cast<std::size_t>(n_best_cells), 0.0);

    for (int x = 0; x < joint.nx; ++x)
        for (int y = 0; y < joint.ny; ++y)
            for (int z = 0; z < joint.nz; ++z) {
                const double p = joint.at(x, y, z);
                const int wc = witness[static_cast<std::size_t>(x)];
                const int bc = best[static_cast<std::size_t>(x)];
                z_given_witness[static_cast<std::size_t>(wc)]
                               [static_cast<std::size_t>(z)] += p;
                witness_mass[static_cast<std::size_t>(wc)] += p;
                z_given_best[static_cast<std::size_t>(bc)]
                            [static_cast<std::size_t>(z)] += p;
                best_mass[static_cast<std::size_t>(bc)] += p;
            }
    for (int c = 0; c < n_witness_cells; ++c)
        if (witness_mass[static_cast<std::size_t>(c)] > 0.0)
            for (auto& p : z_given_witness[static_cast<std::size_t>(c)])
                p /= witness_mass[static_cast<std::size_t>(c)];
    for (int c = 0; c < n_best_cells; ++c)
        if (best_mass[static_cast<std::size_t>(c)] > 0.0)
            for (auto& p : z_given_best[static_cast<std::size_t>(c)])
                p /= best_mass[static_cast<std::size_t>(c)];

    for (int x = 0; x < joint.nx; ++x) {
        if (joint.px(x) <= 0.0) continue;
        const auto true_post = joint.posterior_y(x);
        const auto& model_post =
            best_post[static_cast<std::size_t>(best[static_cast<std::size_t>(x)])];
        for (int y = 0; y < joint.ny; ++y)
            r.max_predictor_deviation = std::max(
                r.max_predictor_deviation,
                std::abs(model_post[static_cast<std::size_t>(y)] -
                         true_post[static_cast<std::size_t>(y)]));
        const auto& dz =
            z_given_best[static_cast<std::size_t>(best[static_cast<std::size_t>(x)])];
        const auto& qz = z_given_witness[static_cast<std::size_t>(
            witness[static_cast<std::size_t>(x)])];
        for (int z = 0; z < joint.nz; ++z)
            r.max_discriminator_deviation = std::max(
                r.max_discriminator_deviation,
                std::abs(dz[static_cast<std::size_t>(z)] -
                         qz[static_cast<std::size_t>(z)]));
    }
    r.pass = r.max_predictor_deviation <= tol &&
             r.max_discriminator_deviation <= tol;
    return r;
}

DiscreteJoint random_joint(std::uint64_t seed, int nx, int nz) {
    Rng rng(mix_seed(seed, 0x7E0));
    DiscreteJoint joint;
    joint.nx = nx;
    joint.nz = nz;
    joint.q.resize(static_cast<std::size_t>(nx) * joint.ny * nz);
    double total = 0.0;
    for (auto& p : joint.q) {
        p = -std::log(1.0 - rng.uniform());
        total += p;
    }
    for (auto& p : joint.q) p /= total;
    joint.validate();
    return joint;
}

DiscreteJoint clustered_joint(std::uint64_t seed, int nx, int nz, int clusters) {
    require(clusters >= 2 && nx >= 2 * clusters, Errc::invalid_argument,
            "clustered_joint needs >= 2 clusters with >= 2 members each");
    Rng rng(mix_seed(seed, 0xC1D));

    // Cluster sizes >= 2, remainder spread from the front.
    std::vector<int> size(static_cast<std::size_t>(clusters), nx / clusters);
    for (int r = 0; r < nx % clusters; ++r) ++size[static_cast<std::size_t>(r)];

    // Well-separated on-probabilities: evenly spaced with bounded jitter.
    std::vector<double> p_on(static_cast<std::size_t>(clusters));
    for (int c = 0; c < clusters; ++c)
        p_on[static_cast<std::size_t>(c)] =
            (c + 1.0) / (clusters + 1.0) +
            rng.uniform(-0.3, 0.3) / (clusters + 1.0);

    // Shared z-marginal, bounded away from zero.
    std::vector<double> z_base(static_cast<std::size_t>(nz));
    double zsum = 0.0;
    for (auto& v : z_base) {
        v = rng.uniform(0.5, 1.5);
        zsum += v;
    }
    for (auto& v : z_base) v /= zsum;
    const double z_min = *std::min_element(z_base.begin(), z_base.end());

    DiscreteJoint joint;
    joint.nx = nx;
    joint.nz = nz;
    joint.q.assign(static_cast<std::size_t>(nx) * joint.ny * nz, 0.0);

    int x0 = 0;
    for (int c = 0; c < clusters; ++c) {
        const int k = size[static_cast<std::size_t>(c)];
        // Per-member z-deviations, double-centered so that each row sums to
        // zero (valid probabilities) and each column sums to zero (the
        // cluster average recovers z_base exactly).
        std::vector<std::vector<double>> delta(
            static_cast<std::size_t>(k),
            std::vector<double>(static_cast<std::size_t>(nz)));
        for (auto& row : delta)
            for (auto& v : row) v = rng.uniform(-1.0, 1.0);
        for (int z = 0; z < nz; ++z) {
            double col = 0.0;
            for (int i = 0; i < k; ++i)
                col += delta[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)];
            col /= k;
            for (int i = 0; i < k; ++i)
                delta[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)] -= col;
        }
        for (int i = 0; i < k; ++i) {
            double row = 0.0;
            for (int z = 0; z < nz; ++z)
                row += delta[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)];
            row /= nz;
            for (int z = 0; z < nz; ++z)
                delta[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)] -= row;
        }
        double max_abs = 0.0;
        for (const auto& row : delta)
            for (double v : row) max_abs = std::max(max_abs, std::abs(v));
        const double scale = max_abs > 0.0 ? 0.35 * z_min / max_abs : 0.0;

        for (int i = 0; i < k; ++i, ++x0) {
            for (int z = 0; z < nz; ++z) {
                const double qz =
                    z_base[static_cast<std::size_t>(z)] +
                    scale *
                        delta[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)];
                const double on = p_on[static_cast<std::size_t>(c)];
                joint.at(x0, static_cast<int>(0), z) = (1.0 - on) * qz / nx;
                joint.at(x0, static_cast<int>(1), z) = on * qz / nx;
            }
        }
    }
    joint.validate();
    return joint;
}

}  // namespace bodyauth::theory
