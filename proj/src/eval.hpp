// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "features.hpp"
#include "train.hpp"

namespace bodyauth::eval {

struct Confusion {
    double accuracy = 0.0;
    double tp_rate = 0.0;  // on-body segments accepted / on-body segments
    double fp_rate = 0.0;  // off-body segments accepted / off-body segments
    int tp = 0, fp = 0, tn = 0, fn = 0;
};

// Decision rule: accept (on-body) iff score >= threshold. Errors if either
// class is absent (the corresponding rate would be undefined).
Confusion confusion_metrics(std::span<const double> scores,
                            std::span<const ban::DeviceLabel> labels,
                            double threshold);

struct RocPoint {
    double threshold = 0.0;  // +inf on the (0,0) endpoint
    double fp_rate = 0.0;
    double tp_rate = 0.0;
};

// Threshold sweep over the distinct scores (ties grouped), endpoints (0,0)
// and (1,1) included; sorted by fp_rate then tp_rate.
std::vector<RocPoint> roc_curve(std::span<const double> scores,
                                std::span<const ban::DeviceLabel> labels);

// Trapezoidal area under the curve.
double auroc(std::span<const RocPoint> curve);

// Independent route: normalized Mann-Whitney U statistic with half credit
// for ties. Equal to the trapezoidal area within floating-point noise.
double auroc_rank(std::span<const double> scores,
                  std::span<const ban::DeviceLabel> labels);

struct MotionMetrics {
    int count = 0;
    double accuracy = 0.0;
    double tp_rate = 0.0;
    double fp_rate = 0.0;
    bool rates_defined = false;  // both classes present for this motion
};

struct EvalReport {
    int schema_version = 1;
    double threshold = 0.5;
    int count = 0;
    int on_count = 0;
    int off_count = 0;
    Confusion overall;
    double auroc_value = 0.0;
    std::vector<RocPoint> roc;
    std::map<std::string, MotionMetrics> per_motion;
};

EvalReport evaluate(const adv::ModelParams& model,
                    std::span<const feat::ProfileRecord> profiles,
                    double threshold);

std::string report_json(const EvalReport& report);
std::string roc_csv(std::span<const RocPoint> curve);  // threshold,fp_rate,tp_rate

// --- leave-one-motion-out ----------------------------------------------------

struct LomoFold {
    std::string holdout;          // held-out motion
    std::uint64_t seed = 0;
    adv::TrainMode mode;
    double holdout_accuracy = 0.0;
    double holdout_auroc = 0.0;
    double uncontrolled_accuracy = -1.0;  // -1 when no uncontrolled data
    double uncontrolled_auroc = -1.0;
    double d_loss_converged = 0.0;  // mean discriminator loss, last 5 epochs
    int epochs_run = 0;
};

struct LomoArmSummary {
    double holdout_accuracy_mean = 0.0;
    double holdout_accuracy_std = 0.0;
    double holdout_auroc_mean = 0.0;
    double holdout_auroc_std = 0.0;
    double d_loss_converged_mean = 0.0;
};

struct LomoReport {
    int schema_version = 1;
    std::vector<std::uint64_t> seeds;
    std::vector<LomoFold> folds;  // per (motion, seed, arm), deterministic order
    LomoArmSummary adversarial;
    LomoArmSummary baseline;
};

// Trains both arms on every (held-out motion, seed) pair: training data is
// every controlled motion except the held-out one; evaluation is on the
// held-out motion (and on uncontrolled profiles when present). Jobs run on
// `threads` workers; each job is single-threaded and deterministic.
LomoReport leave_one_motion_out(std::span<const feat::ProfileRecord> dataset,
                                const adv::TrainConfig& config,
                                std::span<const std::uint64_t> seeds,
                                int threads = 2);

std::string lomo_json(const LomoReport& report);

}  // namespace bodyauth::eval
