// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#include "train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "common.hpp"
#include "rng.hpp"

namespace bodyauth::adv {

const char* to_string(TrainMode mode) {
    return mode == TrainMode::adversarial ? "adversarial" : "baseline";
}

TrainMode train_mode_from_string(const std::string& s) {
    if (s == "adversarial") return TrainMode::adversarial;
    if (s == "baseline") return TrainMode::baseline;
    fail(Errc::invalid_argument, "unknown training mode: " + s);
}

void TrainConfig::validate() const {
    require(lambda >= 0.0 && std::isfinite(lambda), Errc::invalid_argument,
            "lambda must be >= 0");
    require(lr_ep > 0.0 && lr_d > 0.0, Errc::invalid_argument,
            "learning rates must be positive");
    require(momentum >= 0.0 && momentum < 1.0, Errc::invalid_argument,
            "momentum must lie in [0, 1)");
    require(batch_size >= 1, Errc::invalid_argument, "batch_size must be >= 1");
    require(epochs >= 1, Errc::invalid_argument, "epochs must be >= 1");
    require(d_steps_per_ep_step >= 1, Errc::invalid_argument,
            "d_steps_per_ep_step must be >= 1");
    require(val_fraction > 0.0 && val_fraction < 0.5, Errc::invalid_argument,
            "val_fraction must lie in (0, 0.5)");
    require(patience >= 1, Errc::invalid_argument, "patience must be >= 1");
    arch.validate();
}

namespace {

struct Dataset {
    std::vector<double> x;  // n x dim, raw
    std::vector<int> y;     // device label (0/1)
    std::vector<int> z;     // motion index
    int n = 0;
    int dim = feat::kProfileDim;

    void append(const feat::ProfileRecord& r) {
        x.insert(x.end(), r.profile.values.begin(), r.profile.values.end());
        y.push_back(static_cast<int>(r.profile.link));
        z.push_back(static_cast<int>(r.profile.motion));
        ++n;
    }
};

Standardization fit_standardization(const Dataset& d) {
    Standardization s;
    s.mean.assign(static_cast<std::size_t>(d.dim), 0.0);
    s.std.assign(static_cast<std::size_t>(d.dim), 0.0);
    for (int i = 0; i < d.n; ++i)
        for (int f = 0; f < d.dim; ++f)
            s.mean[static_cast<std::size_t>(f)] +=
                d.x[static_cast<std::size_t>(i) * d.dim + f];
    for (auto& m : s.mean) m /= d.n;
    for (int i = 0; i < d.n; ++i)
        for (int f = 0; f < d.dim; ++f) {
            const double dv =
                d.x[static_cast<std::size_t>(i) * d.dim + f] -
                s.mean[static_cast<std::size_t>(f)];
            s.std[static_cast<std::size_t>(f)] += dv * dv;
        }
    for (auto& v : s.std) v = std::sqrt(v / d.n);
    return s;
}

// Mean predictor loss over a standardized dataset, forward passes only.
double predictor_loss(ModelParams& model, const std::vector<double>& x_std,
                      const std::vector<int>& y, int chunk = 256) {
    const int n = static_cast<int>(y.size());
    const int dim = model.arch.input_dim;
    double total = 0.0;
    for (int start = 0; start < n; start += chunk) {
        const int count = std::min(chunk, n - start);
        GraphOptions opt;
        opt.params_trainable = false;
        opt.build_discriminator = false;
        opt.y_targets = std::span<const int>(y.data() + start,
                                             static_cast<std::size_t>(count));
        ModelGraph mg = build_graph(
            model,
            std::span<const double>(x_std.data() +
                                        static_cast<std::size_t>(start) * dim,
                                    static_cast<std::size_t>(count) * dim),
            count, opt);
        total += mg.graph.scalar(mg.loss_p) * count;
    }
    return total / n;
}

}  // namespace

TrainResult train(std::span<const feat::ProfileRecord> train_set,
                  const TrainConfig& config, TrainMode mode,
                  std::span<const feat::ProfileRecord> valid_set) {
    config.validate();
    require(!train_set.empty(), Errc::invalid_argument, "empty training set");

    std::set<int> motions, links;
    for (const auto& r : train_set) {
        require(r.profile.motion != ban::MotionLabel::uncontrolled,
                Errc::invalid_argument,
                "uncontrolled motion is test-only; remove it from training data");
        motions.insert(static_cast<int>(r.profile.motion));
        links.insert(static_cast<int>(r.profile.link));
    }
    require(links.size() == 2, Errc::invalid_argument,
            "training set must contain both on- and off-body profiles");
    require(motions.size() >= 2, Errc::invalid_argument,
            "training set must contain at least two motion states; the "
            "discriminator has nothing to discriminate otherwise");

    const int n_z = ban::kControlledMotionCount;

    // Internal validation split (for the held-out predictor loss) unless an
    // explicit validation set is supplied.
    Dataset train_d, valid_d;
    if (valid_set.empty()) {
        std::vector<std::size_t> order(train_set.size());
        std::iota(order.begin(), order.end(), 0);
        Rng rng(mix_seed(config.seed, 0x5A11D));
        rng.shuffle(order);
        const std::size_t n_val = std::max<std::size_t>(
            1, static_cast<std::size_t>(
                   std::llround(config.val_fraction *
                                static_cast<double>(train_set.size()))));
        require(n_val < train_set.size(), Errc::invalid_argument,
                "training set too small for a validation split");
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (i < n_val)
                valid_d.append(train_set[order[i]]);
            else
                train_d.append(train_set[order[i]]);
        }
    } else {
        for (const auto& r : train_set) train_d.append(r);
        for (const auto& r : valid_set) valid_d.append(r);
    }

    TrainResult result;
    result.model = build_model(config.arch, n_z, config.seed);
    ModelParams& model = result.model;
    model.standardization = fit_standardization(train_d);

    std::vector<double> x_train(train_d.x.size()), x_valid(valid_d.x.size());
    standardize(model.standardization, train_d.x, x_train);
    standardize(model.standardization, valid_d.x, x_valid);

    // The adversarial term seen by the extractor; exactly zero in baseline
    // mode, so a lambda = 0 adversarial run and a baseline run execute
    // identical arithmetic.
    const double lambda_e = mode == TrainMode::adversarial ? config.lambda : 0.0;

    const int dim = config.arch.input_dim;
    const int n = train_d.n;
    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(mix_seed(config.seed, 0xBA7C4));

    auto infos = model.param_list();
    std::vector<nn::Tensor> velocity(infos.size());

    ModelParams best_model = model;
    double best_val = std::numeric_limits<double>::infinity();
    int best_epoch = 0;

    std::vector<double> bx(static_cast<std::size_t>(config.batch_size) * dim);
    std::vector<int> by(static_cast<std::size_t>(config.batch_size));
    std::vector<int> bz(static_cast<std::size_t>(config.batch_size));

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss_p = 0.0, epoch_loss_d = 0.0;

        for (int start = 0; start < n; start += config.batch_size) {
            const int count = std::min(config.batch_size, n - start);
            for (int i = 0; i < count; ++i) {
                const std::size_t src = order[static_cast<std::size_t>(start + i)];
                std::copy_n(x_train.begin() + static_cast<std::ptrdiff_t>(src) * dim,
                            dim, bx.begin() + static_cast<std::ptrdiff_t>(i) * dim);
                by[static_cast<std::size_t>(i)] = train_d.y[src];
                bz[static_cast<std::size_t>(i)] = train_d.z[src];
            }
            const std::span<const double> xb(bx.data(),
                                             static_cast<std::size_t>(count) * dim);
            const std::span<const int> yb(by.data(), static_cast<std::size_t>(count));
            const std::span<const int> zb(bz.data(), static_cast<std::size_t>(count));

            // Heavy forward: extractor and predictor, built once per batch.
            GraphOptions opt;
            opt.params_trainable = true;
            opt.build_discriminator = false;
            ModelGraph mg = build_graph(model, xb, count, opt);
            const nn::Tensor repr_v = mg.graph.value(mg.repr);
            const nn::Tensor probs_v = mg.graph.value(mg.p_probs);

            // Discriminator phase: descend loss_d w.r.t. D only, on small
            // graphs that treat the representation and P's output as data.
            for (int step = 0; step < config.d_steps_per_ep_step; ++step) {
                nn::Graph dg;
                auto repr_in = dg.input(repr_v);
                auto probs_in = dg.input(probs_v);
                auto h = dg.concat(repr_in, probs_in);
                std::vector<nn::Graph::NodeRef> d_nodes;
                for (std::size_t i = 0; i < model.d_w.size(); ++i) {
                    const auto w = dg.param(model.d_w[i]);
                    const auto b = dg.param(model.d_b[i]);
                    d_nodes.push_back(w);
                    d_nodes.push_back(b);
                    h = dg.dense(h, w, b);
                    if (i + 1 < model.d_w.size()) h = dg.relu(h);
                }
                const auto d_probs = dg.softmax(h);
                const auto loss_d = dg.cross_entropy(d_probs, zb);
                if (!std::isfinite(dg.scalar(loss_d)))
                    fail(Errc::numeric,
                         "discriminator loss is not finite at epoch " +
                             std::to_string(epoch) + ", batch offset " +
                             std::to_string(start));
                dg.backward(loss_d);
                std::size_t di = 0;
                for (std::size_t i = 0; i < model.d_w.size(); ++i) {
                    const std::size_t vi =
                        infos.size() - 2 * model.d_w.size() + 2 * i;
                    sgd_step(model.d_w[i], dg.grad(d_nodes[di++]), velocity[vi],
                             config.lr_d, config.momentum,
                             infos[vi].name.c_str());
                    sgd_step(model.d_b[i], dg.grad(d_nodes[di++]), velocity[vi + 1],
                             config.lr_d, config.momentum,
                             infos[vi + 1].name.c_str());
                }
            }

            // Extractor/predictor phase against the updated discriminator.
            // Finish the big graph: D subnetwork, both losses, the value
            // function, one reverse sweep.
            nn::Graph& g = mg.graph;
            nn::Graph::NodeRef d = g.concat(mg.repr, g.stop_gradient(mg.p_probs));
            std::vector<nn::Graph::NodeRef> d_param_nodes;
            for (std::size_t i = 0; i < model.d_w.size(); ++i) {
                const auto w = g.param(model.d_w[i]);
                const auto b = g.param(model.d_b[i]);
                d_param_nodes.push_back(w);
                d_param_nodes.push_back(b);
                d = g.dense(d, w, b);
                if (i + 1 < model.d_w.size()) d = g.relu(d);
            }
            mg.d_probs = g.softmax(d);
            mg.loss_p = g.cross_entropy(mg.p_probs, yb);
            mg.loss_d = g.cross_entropy(mg.d_probs, zb);
            mg.value = g.sub(mg.loss_p, g.scale(mg.loss_d, lambda_e));

            const double lp = g.scalar(mg.loss_p);
            const double ld = g.scalar(mg.loss_d);
            if (!std::isfinite(lp) || !std::isfinite(ld))
                fail(Errc::numeric, "training loss is not finite at epoch " +
                                        std::to_string(epoch) +
                                        ", batch offset " + std::to_string(start));
            epoch_loss_p += lp * count;
            epoch_loss_d += ld * count;

            g.backward(mg.value);
            const std::size_t ep_param_count = infos.size() - 2 * model.d_w.size();
            for (std::size_t i = 0; i < ep_param_count; ++i) {
                sgd_step(*infos[i].tensor, g.grad(mg.param_nodes[i]), velocity[i],
                         config.lr_ep, config.momentum, infos[i].name.c_str());
            }
        }

        result.history.loss_p_train.push_back(epoch_loss_p / n);
        result.history.loss_d_train.push_back(epoch_loss_d / n);
        const double val_loss = predictor_loss(model, x_valid, valid_d.y);
        result.history.loss_p_test.push_back(val_loss);

        if (val_loss < best_val) {
            best_val = val_loss;
            best_epoch = epoch;
            best_model = model;
        } else if (epoch - best_epoch >= config.patience) {
            break;
        }
    }

    result.model = best_model;
    result.history.best_epoch = best_epoch;
    return result;
}

std::string history_csv(const TrainHistory& history) {
    std::string csv = "epoch,loss_p_train,loss_d_train,loss_p_test\n";
    char buf[160];
    for (int e = 0; e < history.epochs(); ++e) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", e,
                      history.loss_p_train[static_cast<std::size_t>(e)],
                      history.loss_d_train[static_cast<std::size_t>(e)],
                      history.loss_p_test[static_cast<std::size_t>(e)]);
        csv += buf;
    }
    return csv;
}

}  // namespace bodyauth::adv
