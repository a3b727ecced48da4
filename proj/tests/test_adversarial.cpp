// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#include <doctest.h>

#include <cmath>
#include <vector>

#include "ban_synth.hpp"
#include "common.hpp"
#include "eval.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "test_util.hpp"
#include "train.hpp"

using namespace bodyauth;
using ban::DeviceLabel;
using ban::MotionLabel;

namespace {

// Small architecture for fast training tests; same structure, fewer weights.
adv::ArchConfig tiny_arch() {
    adv::ArchConfig arch;
    arch.name = "arch_tiny";
    arch.channels = {4, 4, 8, 8};
    arch.strides = {1, 2, 1, 2};
    arch.representation_dim = 16;
    arch.predictor_hidden = {12, 8};
    arch.discriminator_hidden = {12, 8};
    return arch;
}

// Labeled synthetic profiles with per-class structure that is linearly
// separable after standardization.
std::vector<feat::ProfileRecord> toy_profiles(int per_cell,
                                              std::vector<MotionLabel> motions,
                                              std::uint64_t seed) {
    ban::SynthConfig config;
    config.duration_s = 5.0;
    std::vector<feat::ProfileRecord> records;
    std::uint32_t id = 0;
    for (DeviceLabel link : {DeviceLabel::on_body, DeviceLabel::off_body}) {
        for (MotionLabel motion : motions) {
            for (int i = 0; i < per_cell; ++i) {
                const auto trace = ban::synth_trace(
                    config, link, motion, mix_seed(seed, id));
                for (const auto& segment : feat::segment_trace(trace)) {
                    feat::ProfileRecord r;
                    r.profile = feat::build_profile(segment);
                    r.trace_id = id;
                    records.push_back(r);
                }
                ++id;
            }
        }
    }
    return records;
}

struct Batch {
    std::vector<double> x_std;
    std::vector<int> y, z;
    int count = 0;
};

// Sample-statistics z-scoring, stored into the model; graph audits need
// O(1) inputs or the softmax saturates.
void fit_standardization(adv::ModelParams& model,
                         std::span<const feat::ProfileRecord> records) {
    const int dim = model.arch.input_dim;
    adv::Standardization s;
    s.mean.assign(static_cast<std::size_t>(dim), 0.0);
    s.std.assign(static_cast<std::size_t>(dim), 0.0);
    const double n = static_cast<double>(records.size());
    for (const auto& r : records)
        for (int f = 0; f < dim; ++f)
            s.mean[static_cast<std::size_t>(f)] += r.profile.values[static_cast<std::size_t>(f)] / n;
    for (const auto& r : records)
        for (int f = 0; f < dim; ++f) {
            const double d = r.profile.values[static_cast<std::size_t>(f)] -
                             s.mean[static_cast<std::size_t>(f)];
            s.std[static_cast<std::size_t>(f)] += d * d / n;
        }
    for (auto& v : s.std) v = std::sqrt(v);
    model.standardization = s;
}

Batch standardized_batch(adv::ModelParams& model,
                         std::span<const feat::ProfileRecord> records) {
    Batch b;
    b.count = static_cast<int>(records.size());
    std::vector<double> raw;
    for (const auto& r : records) {
        raw.insert(raw.end(), r.profile.values.begin(), r.profile.values.end());
        b.y.push_back(static_cast<int>(r.profile.link));
        b.z.push_back(static_cast<int>(r.profile.motion));
    }
    b.x_std.resize(raw.size());
    adv::standardize(model.standardization, raw, b.x_std);
    return b;
}

}  // namespace

TEST_CASE("build_model structure follows the architecture config") {
    const adv::ArchConfig arch;  // defaults
    auto model = adv::build_model(arch, 5, 11);
    CHECK(model.conv_w.size() == 8);
    CHECK(model.p_w.size() == 3);
    CHECK(model.d_w.size() == 3);
    CHECK(model.p_w.back().dim(0) == 2);
    CHECK(model.d_w.back().dim(0) == 5);
    // D's first layer consumes the representation plus P's two-way output.
    CHECK(model.d_w.front().dim(1) == arch.representation_dim + 2);

    auto again = adv::build_model(arch, 5, 11);
    CHECK(adv::same_params(model, again));
    auto other = adv::build_model(arch, 5, 12);
    CHECK_FALSE(adv::same_params(model, other));
}

TEST_CASE("losses of an untrained model sit at the uniform values") {
    auto model = adv::build_model(tiny_arch(), 5, 3);
    const auto records = toy_profiles(2, {MotionLabel::sitting, MotionLabel::standing,
                                          MotionLabel::arm_moving,
                                          MotionLabel::rotating,
                                          MotionLabel::walking},
                                      21);
    fit_standardization(model, records);
    const auto batch = standardized_batch(model, records);

    adv::GraphOptions opt;
    opt.y_targets = batch.y;
    opt.z_targets = batch.z;
    opt.lambda_e = 1.0;
    auto mg = adv::build_graph(model, batch.x_std, batch.count, opt);

    // Fan-in-scaled init keeps the pre-softmax logits small, so outputs are
    // close to uniform.
    CHECK(mg.graph.scalar(mg.loss_p) == doctest::Approx(std::log(2.0)).epsilon(0.15));
    CHECK(mg.graph.scalar(mg.loss_d) == doctest::Approx(std::log(5.0)).epsilon(0.15));

    SUBCASE("loss values equal an independent recomputation within 1e-12") {
        const auto& probs = mg.graph.value(mg.p_probs);
        double loss_p = 0.0;
        for (int i = 0; i < batch.count; ++i)
            loss_p -= std::log(probs.data[static_cast<std::size_t>(i * 2 + batch.y[i])]);
        loss_p /= batch.count;
        CHECK(std::abs(mg.graph.scalar(mg.loss_p) - loss_p) <= 1e-12);

        const auto& dprobs = mg.graph.value(mg.d_probs);
        double loss_d = 0.0;
        for (int i = 0; i < batch.count; ++i)
            loss_d -= std::log(dprobs.data[static_cast<std::size_t>(i * 5 + batch.z[i])]);
        loss_d /= batch.count;
        CHECK(std::abs(mg.graph.scalar(mg.loss_d) - loss_d) <= 1e-12);
    }

    SUBCASE("value function is exact arithmetic") {
        const double lp = mg.graph.scalar(mg.loss_p);
        const double ld = mg.graph.scalar(mg.loss_d);
        CHECK(mg.graph.scalar(mg.value) == lp - 1.0 * ld);
    }
}

TEST_CASE("stop-gradient and minimax coupling audits on the assembled model") {
    auto model = adv::build_model(tiny_arch(), 5, 9);
    const auto records =
        toy_profiles(1, {MotionLabel::sitting, MotionLabel::walking}, 33);
    fit_standardization(model, records);
    const auto batch = standardized_batch(model, records);
    const double lambda = 0.7;

    adv::GraphOptions opt;
    opt.y_targets = batch.y;
    opt.z_targets = batch.z;
    opt.lambda_e = lambda;
    auto mg = adv::build_graph(model, batch.x_std, batch.count, opt);
    auto infos = model.param_list();

    // Pass 1: discriminator loss only.
    mg.graph.backward(mg.loss_d);
    std::vector<std::vector<double>> grad_ld;
    for (std::size_t i = 0; i < infos.size(); ++i)
        grad_ld.push_back(mg.graph.grad(mg.param_nodes[i]).data);

    SUBCASE("L_D gradient w.r.t. every predictor parameter is exactly zero") {
        double total = 0.0;
        for (std::size_t i = 0; i < infos.size(); ++i) {
            if (infos[i].block != adv::Block::predictor) continue;
            for (double v : grad_ld[i]) total += std::abs(v);
        }
        CHECK(total == 0.0);
    }
    SUBCASE("L_D reaches the extractor through the direct path") {
        double total = 0.0;
        for (std::size_t i = 0; i < infos.size(); ++i) {
            if (infos[i].block != adv::Block::extractor) continue;
            for (double v : grad_ld[i]) total += std::abs(v);
        }
        CHECK(total > 0.0);
    }

    SUBCASE("grad of V equals grad(L_P) - lambda*grad(L_D) within 1e-12") {
        mg.graph.backward(mg.loss_p);
        std::vector<std::vector<double>> grad_lp;
        for (std::size_t i = 0; i < infos.size(); ++i)
            grad_lp.push_back(mg.graph.grad(mg.param_nodes[i]).data);

        mg.graph.backward(mg.value);
        for (std::size_t i = 0; i < infos.size(); ++i) {
            if (infos[i].block == adv::Block::discriminator) continue;
            const auto& gv = mg.graph.grad(mg.param_nodes[i]).data;
            for (std::size_t k = 0; k < gv.size(); ++k) {
                const double expected = grad_lp[i][k] - lambda * grad_ld[i][k];
                CHECK(std::abs(gv[k] - expected) <=
                      1e-12 * std::max(1.0, std::abs(expected)));
            }
        }
    }
}

TEST_CASE("baseline E and P gradients equal a model with no discriminator") {
    auto model = adv::build_model(tiny_arch(), 5, 4);
    const auto records =
        toy_profiles(1, {MotionLabel::standing, MotionLabel::rotating}, 44);
    fit_standardization(model, records);
    const auto batch = standardized_batch(model, records);

    // Trainer-style graph with the adversarial term disabled.
    adv::GraphOptions with_d;
    with_d.y_targets = batch.y;
    with_d.z_targets = batch.z;
    with_d.lambda_e = 0.0;
    auto a = adv::build_graph(model, batch.x_std, batch.count, with_d);
    a.graph.backward(a.value);

    adv::GraphOptions without_d;
    without_d.build_discriminator = false;
    without_d.y_targets = batch.y;
    auto b = adv::build_graph(model, batch.x_std, batch.count, without_d);
    b.graph.backward(b.loss_p);

    auto infos = model.param_list();
    for (std::size_t i = 0; i < infos.size(); ++i) {
        if (infos[i].block == adv::Block::discriminator) continue;
        const auto& ga = a.graph.grad(a.param_nodes[i]).data;
        const auto& gb = b.graph.grad(b.param_nodes[i]).data;
        REQUIRE(ga.size() == gb.size());
        for (std::size_t k = 0; k < ga.size(); ++k)
            CHECK(std::abs(ga[k] - gb[k]) <= 1e-12 * std::max(1.0, std::abs(gb[k])));
    }
}

TEST_CASE("lambda = 0 adversarial training is bit-identical to baseline") {
    const auto records = toy_profiles(
        3, {MotionLabel::sitting, MotionLabel::walking, MotionLabel::rotating}, 55);
    adv::TrainConfig config;
    config.arch = tiny_arch();
    config.lambda = 0.0;
    config.epochs = 4;
    config.batch_size = 16;
    config.seed = 77;

    const auto a = adv::train_adversarial(records, config);
    const auto b = adv::train_baseline(records, config);
    CHECK(adv::same_params(a.model, b.model));
    CHECK(a.history.loss_p_train == b.history.loss_p_train);
    CHECK(a.history.loss_d_train == b.history.loss_d_train);
    CHECK(a.history.loss_p_test == b.history.loss_p_test);

    SUBCASE("same seed reproduces the run bit-identically") {
        const auto c = adv::train_adversarial(records, config);
        CHECK(adv::same_params(a.model, c.model));
        CHECK(a.history.loss_p_train == c.history.loss_p_train);
    }
}

TEST_CASE("trainer rejects degenerate training sets") {
    adv::TrainConfig config;
    config.arch = tiny_arch();
    config.epochs = 1;

    SUBCASE("single motion") {
        const auto records = toy_profiles(3, {MotionLabel::sitting}, 66);
        CHECK_THROWS_AS(adv::train_adversarial(records, config), Error);
    }
    SUBCASE("uncontrolled motion in training data") {
        const auto records = toy_profiles(
            2, {MotionLabel::sitting, MotionLabel::uncontrolled}, 66);
        CHECK_THROWS_AS(adv::train_adversarial(records, config), Error);
    }
    SUBCASE("single device label") {
        auto records = toy_profiles(
            2, {MotionLabel::sitting, MotionLabel::walking}, 66);
        std::erase_if(records, [](const feat::ProfileRecord& r) {
            return r.profile.link == DeviceLabel::off_body;
        });
        CHECK_THROWS_AS(adv::train_adversarial(records, config), Error);
    }
}

TEST_CASE("toy separable set: predictor converges and generalizes") {
    // Pilot-run fixture: two motions, 200 training profiles. The trained
    // predictor ends below 0.2 train loss well inside 60 epochs and scores
    // at least 0.95 accuracy on held-out traces.
    const auto train_records = toy_profiles(
        50, {MotionLabel::standing, MotionLabel::walking}, 123);
    const auto test_records = toy_profiles(
        6, {MotionLabel::standing, MotionLabel::walking}, 999);

    adv::TrainConfig config;
    config.arch = tiny_arch();
    config.lambda = 1.0;
    config.epochs = 60;
    config.batch_size = 32;
    config.seed = 5;

    const auto result = adv::train_adversarial(train_records, config);
    CHECK(result.history.loss_p_train.back() < 0.2);

    int correct = 0;
    for (const auto& r : test_records) {
        const double p_on = adv::predict(result.model, r.profile);
        const bool on = p_on >= 0.5;
        if (on == (r.profile.link == DeviceLabel::on_body)) ++correct;
    }
    CHECK(static_cast<double>(correct) / test_records.size() >= 0.95);

    SUBCASE("probabilities sum to one and duplicates predict identically") {
        const double p_on = adv::predict(result.model, test_records[0].profile);
        CHECK(p_on >= 0.0);
        CHECK(p_on <= 1.0);
        CHECK(adv::predict(result.model, test_records[0].profile) == p_on);
    }
}

TEST_CASE("checkpoints round trip bit-exactly") {
    const auto records =
        toy_profiles(2, {MotionLabel::sitting, MotionLabel::walking}, 88);
    adv::TrainConfig config;
    config.arch = tiny_arch();
    config.epochs = 2;
    config.batch_size = 16;
    const auto result = adv::train_adversarial(records, config);

    testutil::TempDir dir;
    const auto path_a = dir.file("model_a.ckpt");
    const auto path_b = dir.file("model_b.ckpt");
    adv::save_checkpoint(result.model, path_a);
    const auto loaded = adv::load_checkpoint(path_a);
    adv::save_checkpoint(loaded, path_b);
    CHECK(testutil::slurp(path_a) == testutil::slurp(path_b));
    CHECK(adv::same_params(result.model, loaded));

    SUBCASE("predictions identical after the round trip") {
        const double before = adv::predict(result.model, records[0].profile);
        const double after = adv::predict(loaded, records[0].profile);
        CHECK(before == after);  // bitwise
    }
    SUBCASE("truncated checkpoints fail the checksum") {
        auto bytes = testutil::slurp(path_a);
        testutil::spit(path_a, bytes.substr(0, bytes.size() / 2));
        try {
            adv::load_checkpoint(path_a);
            FAIL("expected corrupt error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::corrupt);
        }
    }
    SUBCASE("flipped payload byte fails the checksum") {
        auto bytes = testutil::slurp(path_b);
        bytes[bytes.size() / 2] = static_cast<char>(bytes[bytes.size() / 2] ^ 0x5a);
        testutil::spit(path_b, bytes);
        try {
            adv::load_checkpoint(path_b);
            FAIL("expected corrupt error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::corrupt);
        }
    }
}
