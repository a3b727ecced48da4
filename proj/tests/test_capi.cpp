// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers
//
// Exercises the shared-library surface the way an external consumer would:
// through bodyauth.h only.

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include <bodyauth.h>
#include <json.hpp>

#include "test_util.hpp"

namespace {

struct Free {
    template <typename T>
    struct Of;
};

#define BA_GUARD(type, freer)                                        \
    struct type##_guard {                                            \
        type* p = nullptr;                                           \
        ~type##_guard() { freer(p); }                                \
        type** out() { return &p; }                                  \
        operator type*() const { return p; }                        \
    }

BA_GUARD(ba_synth_config, ba_synth_config_free);
BA_GUARD(ba_trace, ba_trace_free);
BA_GUARD(ba_trace_list, ba_trace_list_free);
BA_GUARD(ba_profile_set, ba_profile_set_free);
BA_GUARD(ba_train_config, ba_train_config_free);
BA_GUARD(ba_model, ba_model_free);
BA_GUARD(ba_history, ba_history_free);

#undef BA_GUARD

}  // namespace

TEST_CASE("null arguments are rejected with a message") {
    CHECK(ba_synth_config_create_default(nullptr) == BA_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(ba_last_error()) > 0);
    CHECK(ba_trace_synth(nullptr, 0, 0, 1, nullptr) == BA_ERR_INVALID_ARGUMENT);
    CHECK(ba_model_load(nullptr, nullptr) == BA_ERR_INVALID_ARGUMENT);
}

TEST_CASE("missing files surface as IO errors") {
    ba_profile_set_guard set;
    CHECK(ba_profile_set_load("/nonexistent/features.bin", set.out()) == BA_ERR_IO);
    ba_model_guard model;
    CHECK(ba_model_load("/nonexistent/checkpoint.bin", model.out()) == BA_ERR_IO);
}

TEST_CASE("trace synthesis, CSV round trip and labels") {
    ba_synth_config_guard config;
    REQUIRE(ba_synth_config_create_default(config.out()) == BA_OK);
    REQUIRE(ba_synth_config_set_duration(config, 5.0) == BA_OK);
    CHECK(ba_synth_config_set_duration(config, 1.0) == BA_ERR_INVALID_ARGUMENT);

    ba_trace_guard trace;
    REQUIRE(ba_trace_synth(config, 1, 4, 42, trace.out()) == BA_OK);
    const double* samples = nullptr;
    size_t count = 0;
    REQUIRE(ba_trace_samples(trace, &samples, &count) == BA_OK);
    CHECK(count == 2500);
    for (size_t i = 0; i < count; ++i) REQUIRE(std::isfinite(samples[i]));
    int device = -1, motion = -1;
    REQUIRE(ba_trace_labels(trace, &device, &motion) == BA_OK);
    CHECK(device == 1);
    CHECK(motion == 4);
    uint64_t seed = 0;
    REQUIRE(ba_trace_seed(trace, &seed) == BA_OK);
    CHECK(seed == 42);

    testutil::TempDir dir;
    const auto csv = dir.file("trace.csv");
    REQUIRE(ba_trace_save_csv(trace, csv.c_str()) == BA_OK);
    ba_trace_guard loaded;
    REQUIRE(ba_trace_load_csv(csv.c_str(), 1, 4, loaded.out()) == BA_OK);
    const double* back = nullptr;
    size_t back_count = 0;
    REQUIRE(ba_trace_samples(loaded, &back, &back_count) == BA_OK);
    CHECK(back_count == count);

    SUBCASE("invalid labels are rejected") {
        ba_trace_guard bad;
        CHECK(ba_trace_synth(config, 2, 0, 1, bad.out()) == BA_ERR_INVALID_ARGUMENT);
        CHECK(ba_trace_synth(config, 0, 9, 1, bad.out()) == BA_ERR_INVALID_ARGUMENT);
    }
}

TEST_CASE("full C API workflow: synth -> features -> train -> eval -> theory") {
    testutil::TempDir dir;

    ba_synth_config_guard config;
    REQUIRE(ba_synth_config_create_default(config.out()) == BA_OK);
    REQUIRE(ba_synth_config_set_duration(config, 5.0) == BA_OK);

    // Balanced mini dataset: controlled motions only for training.
    ba_trace_list_guard list;
    REQUIRE(ba_trace_list_synth_balanced(config, 4, 2, 99, list.out()) == BA_OK);
    size_t n_traces = 0;
    REQUIRE(ba_trace_list_size(list, &n_traces) == BA_OK);
    CHECK(n_traces == 4 * 10 + 2 * 2);

    ba_profile_set_guard train_set, test_set;
    REQUIRE(ba_profile_set_create(train_set.out()) == BA_OK);
    REQUIRE(ba_profile_set_create(test_set.out()) == BA_OK);
    for (size_t i = 0; i < n_traces; ++i) {
        const ba_trace* trace = nullptr;
        REQUIRE(ba_trace_list_get(list, i, &trace) == BA_OK);
        int device = 0, motion = 0;
        REQUIRE(ba_trace_labels(trace, &device, &motion) == BA_OK);
        ba_profile_set* target = motion == 5 ? test_set.p : train_set.p;
        REQUIRE(ba_profile_set_add_trace(target, trace,
                                         static_cast<uint32_t>(i)) == BA_OK);
    }
    size_t n_train = 0;
    REQUIRE(ba_profile_set_size(train_set, &n_train) == BA_OK);
    CHECK(n_train == 40);

    // Profile accessor sanity.
    std::vector<double> values(380);
    int device = -1, motion = -1;
    REQUIRE(ba_profile_set_get(train_set, 0, values.data(), &device, &motion) ==
            BA_OK);
    CHECK((device == 0 || device == 1));
    for (double v : values) REQUIRE(std::isfinite(v));

    // Feature file round trip.
    const auto features = dir.file("features.bin");
    REQUIRE(ba_profile_set_save(train_set, features.c_str()) == BA_OK);
    ba_profile_set_guard reloaded;
    REQUIRE(ba_profile_set_load(features.c_str(), reloaded.out()) == BA_OK);
    size_t n_reloaded = 0;
    REQUIRE(ba_profile_set_size(reloaded, &n_reloaded) == BA_OK);
    CHECK(n_reloaded == n_train);

    // Motion filtering.
    const int keep[] = {0, 1};
    ba_profile_set_guard filtered;
    REQUIRE(ba_profile_set_filter_motions(train_set, keep, 2, 0,
                                          filtered.out()) == BA_OK);
    size_t n_filtered = 0;
    REQUIRE(ba_profile_set_size(filtered, &n_filtered) == BA_OK);
    CHECK(n_filtered == 16);  // 2 links x 2 motions x 4 traces x 1 segment

    // Short training run.
    ba_train_config_guard tc;
    REQUIRE(ba_train_config_create_default(tc.out()) == BA_OK);
    REQUIRE(ba_train_config_set_epochs(tc, 2) == BA_OK);
    REQUIRE(ba_train_config_set_batch_size(tc, 16) == BA_OK);
    REQUIRE(ba_train_config_set_seed(tc, 7) == BA_OK);
    CHECK(ba_train_config_set_lambda(tc, -1.0) == BA_ERR_INVALID_ARGUMENT);
    REQUIRE(ba_train_config_set_lambda(tc, 1.0) == BA_OK);

    ba_model_guard model;
    ba_history_guard history;
    REQUIRE(ba_train(train_set, nullptr, tc, BA_MODE_ADVERSARIAL, model.out(),
                     history.out()) == BA_OK);
    int epochs = 0;
    REQUIRE(ba_history_epochs(history, &epochs) == BA_OK);
    CHECK(epochs == 2);
    char* csv = nullptr;
    REQUIRE(ba_history_csv(history, &csv) == BA_OK);
    CHECK(std::string(csv).rfind("epoch,loss_p_train,loss_d_train,loss_p_test\n",
                                 0) == 0);
    ba_string_free(csv);

    // Prediction and checkpoint round trip.
    double p_on = -1.0;
    REQUIRE(ba_model_predict(model, values.data(), &p_on) == BA_OK);
    CHECK(p_on >= 0.0);
    CHECK(p_on <= 1.0);
    const auto ckpt = dir.file("model.ckpt");
    REQUIRE(ba_model_save(model, ckpt.c_str()) == BA_OK);
    ba_model_guard loaded_model;
    REQUIRE(ba_model_load(ckpt.c_str(), loaded_model.out()) == BA_OK);
    double p_on_again = -1.0;
    REQUIRE(ba_model_predict(loaded_model, values.data(), &p_on_again) == BA_OK);
    CHECK(p_on_again == p_on);

    // Evaluation emits parsable JSON + CSV.
    char* report = nullptr;
    REQUIRE(ba_evaluate_json(model, train_set, 0.5, &report) == BA_OK);
    const auto parsed = nlohmann::json::parse(report);
    CHECK(parsed["counts"]["total"] == 40);
    CHECK(parsed["auroc"].is_number());
    ba_string_free(report);
    char* roc = nullptr;
    REQUIRE(ba_evaluate_roc_csv(model, train_set, &roc) == BA_OK);
    CHECK(std::string(roc).rfind("threshold,fp_rate,tp_rate\n", 0) == 0);
    ba_string_free(roc);

    // Theory certificates through the C surface.
    char* certs = nullptr;
    const double lambdas[] = {0.5, 2.0};
    REQUIRE(ba_theory_check_json(5, 2, 6, 3, 3, lambdas, 2, &certs) == BA_OK);
    const auto cert_json = nlohmann::json::parse(certs);
    CHECK(cert_json["all_pass"].get<bool>());
    ba_string_free(certs);

    // Corrupt checkpoint detection through the C surface.
    auto bytes = testutil::slurp(ckpt);
    bytes[bytes.size() / 3] = static_cast<char>(bytes[bytes.size() / 3] ^ 0x77);
    testutil::spit(ckpt, bytes);
    ba_model_guard corrupt;
    CHECK(ba_model_load(ckpt.c_str(), corrupt.out()) == BA_ERR_CORRUPT);
}

TEST_CASE("version string is set") {
    CHECK(std::string(ba_version_string()) == "0.1.0");
}
