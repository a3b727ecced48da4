// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "model.hpp"

namespace bodyauth::adv {

enum class TrainMode { adversarial, baseline };

const char* to_string(TrainMode mode);
TrainMode train_mode_from_string(const std::string& s);

struct TrainConfig {
    double lambda = 1.0;    // adversarial weight; 0 degenerates to baseline
    double lr_ep = 1e-3;    // extractor + predictor learning rate
    double lr_d = 1e-3;     // discriminator learning rate
    double momentum = 0.9;
    int batch_size = 64;
    int epochs = 60;
    int d_steps_per_ep_step = 1;
    double val_fraction = 0.15;  // internal held-out split when no valid set
    int patience = 20;           // early stopping on held-out predictor loss
    std::uint64_t seed = 1;
    ArchConfig arch;

    void validate() const;
};

struct TrainHistory {
    std::vector<double> loss_p_train;
    std::vector<double> loss_d_train;
    std::vector<double> loss_p_test;
    int best_epoch = 0;  // epoch whose parameters were kept (0-based)

    int epochs() const { return static_cast<int>(loss_p_train.size()); }
};

struct TrainResult {
    ModelParams model;
    TrainHistory history;
};

// Alternating minimax training: per batch, d_steps_per_ep_step descent
// steps on the discriminator loss (D only), then one descent step of
// E on loss_p - lambda*loss_d and of P on loss_p. `baseline` runs the
// same loop with the adversarial term removed from E's update (D still
// trains, but contributes no gradient to the extractor), which is exactly
// the lambda = 0 case.
//
// Requires both device labels and at least two controlled motions in the
// training set; uncontrolled profiles are rejected in training data.
TrainResult train(std::span<const feat::ProfileRecord> train_set,
                  const TrainConfig& config, TrainMode mode,
                  std::span<const feat::ProfileRecord> valid_set = {});

inline TrainResult train_adversarial(std::span<const feat::ProfileRecord> s,
                                     const TrainConfig& c,
                                     std::span<const feat::ProfileRecord> v = {}) {
    return train(s, c, TrainMode::adversarial, v);
}
inline TrainResult train_baseline(std::span<const feat::ProfileRecord> s,
                                  const TrainConfig& c,
                                  std::span<const feat::ProfileRecord> v = {}) {
    return train(s, c, TrainMode::baseline, v);
}

// CSV with header `epoch,loss_p_train,loss_d_train,loss_p_test`.
std::string history_csv(const TrainHistory& history);

}  // namespace bodyauth::adv
