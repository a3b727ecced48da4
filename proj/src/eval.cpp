// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#include "eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <thread>

#include <json.hpp>

#include "common.hpp"

namespace bodyauth::eval {

Confusion confusion_metrics(std::span<const double> scores,
                            std::span<const ban::DeviceLabel> labels,
                            double threshold) {
    require(!scores.empty() && scores.size() == labels.size(),
            Errc::invalid_argument, "scores/labels must be non-empty and match");
    Confusion c;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool on = labels[i] == ban::DeviceLabel::on_body;
        const bool accept = scores[i] >= threshold;
        if (on && accept) ++c.tp;
        if (on && !accept) ++c.fn;
        if (!on && accept) ++c.fp;
        if (!on && !accept) ++c.tn;
    }
    const int n_on = c.tp + c.fn, n_off = c.fp + c.tn;
    require(n_on > 0, Errc::invalid_argument,
            "TP rate undefined: no on-body samples");
    require(n_off > 0, Errc::invalid_argument,
            "FP rate undefined: no off-body samples");
    c.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(scores.size());
    c.tp_rate = static_cast<double>(c.tp) / n_on;
    c.fp_rate = static_cast<double>(c.fp) / n_off;
    return c;
}

std::vector<RocPoint> roc_curve(std::span<const double> scores,
                                std::span<const ban::DeviceLabel> labels) {
    require(!scores.empty() && scores.size() == labels.size(),
            Errc::invalid_argument, "scores/labels must be non-empty and match");
    int n_on = 0, n_off = 0;
    for (auto l : labels) (l == ban::DeviceLabel::on_body ? n_on : n_off)++;
    require(n_on > 0 && n_off > 0, Errc::invalid_argument,
            "ROC needs both classes present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    std::vector<RocPoint> curve;
    curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    int tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        // Group tied scores into a single threshold step.
        while (i < order.size() && scores[order[i]] == s) {
            if (labels[order[i]] == ban::DeviceLabel::on_body)
                ++tp;
            else
                ++fp;
            ++i;
        }
        curve.push_back({s, static_cast<double>(fp) / n_off,
                         static_cast<double>(tp) / n_on});
    }
    // The lowest threshold accepts everything, so (1,1) is always last.
    std::sort(curve.begin(), curve.end(), [](const RocPoint& a, const RocPoint& b) {
        if (a.fp_rate != b.fp_rate) return a.fp_rate < b.fp_rate;
        return a.tp_rate < b.tp_rate;
    });
    return curve;
}

double auroc(std::span<const RocPoint> curve) {
    require(curve.size() >= 2, Errc::invalid_argument, "ROC curve too short");
    double area = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        area += (curve[i].fp_rate - curve[i - 1].fp_rate) *
                (curve[i].tp_rate + curve[i - 1].tp_rate) * 0.5;
    return area;
}

double auroc_rank(std::span<const double> scores,
                  std::span<const ban::DeviceLabel> labels) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] < scores[b];
    });
    // Average ranks over ties give the half-credit convention.
    std::vector<double> rank(scores.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k) rank[order[k]] = avg;
        i = j;
    }
    double rank_sum = 0.0;
    int n_on = 0, n_off = 0;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        if (labels[k] == ban::DeviceLabel::on_body) {
            rank_sum += rank[k];
            ++n_on;
        } else {
            ++n_off;
        }
    }
    require(n_on > 0 && n_off > 0, Errc::invalid_argument,
            "AUROC needs both classes present");
    const double u = rank_sum - static_cast<double>(n_on) * (n_on + 1) / 2.0;
    return u / (static_cast<double>(n_on) * static_cast<double>(n_off));
}

namespace {

std::vector<double> score_profiles(const adv::ModelParams& model,
                                   std::span<const feat::ProfileRecord> profiles) {
    const int dim = model.arch.input_dim;
    std::vector<double> scores;
    scores.reserve(profiles.size());
    const int chunk = 256;
    std::vector<double> buf;
    for (std::size_t start = 0; start < profiles.size();
         start += static_cast<std::size_t>(chunk)) {
        const int count = static_cast<int>(
            std::min<std::size_t>(chunk, profiles.size() - start));
        buf.assign(static_cast<std::size_t>(count) * dim, 0.0);
        for (int i = 0; i < count; ++i)
            std::copy(profiles[start + static_cast<std::size_t>(i)].profile.values.begin(),
                      profiles[start + static_cast<std::size_t>(i)].profile.values.end(),
                      buf.begin() + static_cast<std::ptrdiff_t>(i) * dim);
        const auto p = predict_batch(model, buf, count);
        scores.insert(scores.end(), p.begin(), p.end());
    }
    return scores;
}

}  // namespace

EvalReport evaluate(const adv::ModelParams& model,
                    std::span<const feat::ProfileRecord> profiles,
                    double threshold) {
    require(!profiles.empty(), Errc::invalid_argument, "empty evaluation set");
    EvalReport report;
    report.threshold = threshold;
    report.count = static_cast<int>(profiles.size());

    const auto scores = score_profiles(model, profiles);
    std::vector<ban::DeviceLabel> labels(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        labels[i] = profiles[i].profile.link;
        (labels[i] == ban::DeviceLabel::on_body ? report.on_count
                                                : report.off_count)++;
    }

    report.overall = confusion_metrics(scores, labels, threshold);
    report.roc = roc_curve(scores, labels);
    report.auroc_value = auroc(report.roc);

    for (int m = 0; m < ban::kMotionCount; ++m) {
        const auto motion = static_cast<ban::MotionLabel>(m);
        MotionMetrics mm;
        int tp = 0, fp = 0, tn = 0, fn = 0;
        for (std::size_t i = 0; i < profiles.size(); ++i) {
            if (profiles[i].profile.motion != motion) continue;
            ++mm.count;
            const bool on = labels[i] == ban::DeviceLabel::on_body;
            const bool accept = scores[i] >= threshold;
            if (on && accept) ++tp;
            if (on && !accept) ++fn;
            if (!on && accept) ++fp;
            if (!on && !accept) ++tn;
        }
        if (mm.count == 0) continue;
        mm.accuracy = static_cast<double>(tp + tn) / mm.count;
        if (tp + fn > 0 && fp + tn > 0) {
            mm.rates_defined = true;
            mm.tp_rate = static_cast<double>(tp) / (tp + fn);
            mm.fp_rate = static_cast<double>(fp) / (fp + tn);
        }
        report.per_motion[ban::to_string(motion)] = mm;
    }
    return report;
}

std::string report_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["schema_version"] = report.schema_version;
    j["threshold"] = report.threshold;
    j["counts"] = {{"total", report.count},
                   {"on_body", report.on_count},
                   {"off_body", report.off_count}};
    j["accuracy"] = report.overall.accuracy;
    j["tp_rate"] = report.overall.tp_rate;
    j["fp_rate"] = report.overall.fp_rate;
    j["confusion"] = {{"tp", report.overall.tp},
                      {"fp", report.overall.fp},
                      {"tn", report.overall.tn},
                      {"fn", report.overall.fn}};
    j["auroc"] = report.auroc_value;
    nlohmann::ordered_json per_motion = nlohmann::ordered_json::object();
    for (const auto& [name, mm] : report.per_motion) {
        nlohmann::ordered_json m;
        m["count"] = mm.count;
        m["accuracy"] = mm.accuracy;
        if (mm.rates_defined) {
            m["tp_rate"] = mm.tp_rate;
            m["fp_rate"] = mm.fp_rate;
        } else {
            m["tp_rate"] = nullptr;
            m["fp_rate"] = nullptr;
        }
        per_motion[name] = m;
    }
    j["per_motion"] = per_motion;
    nlohmann::ordered_json roc = nlohmann::ordered_json::array();
    for (const auto& p : report.roc) {
        roc.push_back({{"threshold", std::isinf(p.threshold) ? nlohmann::ordered_json()
                                                             : nlohmann::ordered_json(p.threshold)},
                       {"fp_rate", p.fp_rate},
                       {"tp_rate", p.tp_rate}});
    }
    j["roc"] = roc;
    return j.dump(2) + "\n";
}

std::string roc_csv(std::span<const RocPoint> curve) {
    std::string csv = "threshold,fp_rate,tp_rate\n";
    char buf[128];
    for (const auto& p : curve) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.threshold,
                      p.fp_rate, p.tp_rate);
        csv += buf;
    }
    return csv;
}

namespace {

struct Accumulator {
    double sum = 0.0, sum_sq = 0.0;
    int n = 0;
    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    double mean() const { return n > 0 ? sum / n : 0.0; }
    double stddev() const {
        if (n <= 0) return 0.0;
        const double m = mean();
        return std::sqrt(std::max(0.0, sum_sq / n - m * m));
    }
};

}  // namespace

LomoReport leave_one_motion_out(std::span<const feat::ProfileRecord> dataset,
                                const adv::TrainConfig& config,
                                std::span<const std::uint64_t> seeds,
                                int threads) {
    require(!seeds.empty(), Errc::invalid_argument, "need at least one seed");
    std::set<int> controlled;
    for (const auto& r : dataset)
        if (r.profile.motion != ban::MotionLabel::uncontrolled)
            controlled.insert(static_cast<int>(r.profile.motion));
    require(controlled.size() >= 3, Errc::invalid_argument,
            "leave-one-motion-out needs at least three controlled motions");

    struct Job {
        ban::MotionLabel holdout;
        std::uint64_t seed;
        adv::TrainMode mode;
    };
    std::vector<Job> jobs;
    for (int m : controlled)
        for (std::uint64_t seed : seeds)
            for (auto mode : {adv::TrainMode::adversarial, adv::TrainMode::baseline})
                jobs.push_back({static_cast<ban::MotionLabel>(m), seed, mode});

    LomoReport report;
    report.seeds.assign(seeds.begin(), seeds.end());
    report.folds.resize(jobs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= jobs.size()) return;
            const Job& job = jobs[idx];

            std::vector<feat::ProfileRecord> train_set, holdout_set, unc_set;
            for (const auto& r : dataset) {
                if (r.profile.motion == ban::MotionLabel::uncontrolled)
                    unc_set.push_back(r);
                else if (r.profile.motion == job.holdout)
                    holdout_set.push_back(r);
                else
                    train_set.push_back(r);
            }

            adv::TrainConfig cfg = config;
            cfg.seed = job.seed;
            const auto result = adv::train(train_set, cfg, job.mode);

            LomoFold fold;
            fold.holdout = ban::to_string(job.holdout);
            fold.seed = job.seed;
            fold.mode = job.mode;
            fold.epochs_run = result.history.epochs();
            const int tail = std::min(5, fold.epochs_run);
            double d_sum = 0.0;
            for (int e = fold.epochs_run - tail; e < fold.epochs_run; ++e)
                d_sum += result.history.loss_d_train[static_cast<std::size_t>(e)];
            fold.d_loss_converged = tail > 0 ? d_sum / tail : 0.0;

            const EvalReport holdout_report =
                evaluate(result.model, holdout_set, 0.5);
            fold.holdout_accuracy = holdout_report.overall.accuracy;
            fold.holdout_auroc = holdout_report.auroc_value;
            if (!unc_set.empty()) {
                const EvalReport unc_report = evaluate(result.model, unc_set, 0.5);
                fold.uncontrolled_accuracy = unc_report.overall.accuracy;
                fold.uncontrolled_auroc = unc_report.auroc_value;
            }
            report.folds[idx] = fold;
        }
    };

    const int n_threads = std::max(1, std::min<int>(threads,
                                                    static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    Accumulator adv_acc, adv_auc, adv_d, base_acc, base_auc, base_d;
    for (const auto& fold : report.folds) {
        if (fold.mode == adv::TrainMode::adversarial) {
            adv_acc.add(fold.holdout_accuracy);
            adv_auc.add(fold.holdout_auroc);
            adv_d.add(fold.d_loss_converged);
        } else {
            base_acc.add(fold.holdout_accuracy);
            base_auc.add(fold.holdout_auroc);
            base_d.add(fold.d_loss_converged);
        }
    }
    report.adversarial = {adv_acc.mean(), adv_acc.stddev(), adv_auc.mean(),
                          adv_auc.stddev(), adv_d.mean()};
    report.baseline = {base_acc.mean(), base_acc.stddev(), base_auc.mean(),
                       base_auc.stddev(), base_d.mean()};
    return report;
}

std::string lomo_json(const LomoReport& report) {
    nlohmann::ordered_json j;
    j["schema_version"] = report.schema_version;
    j["seeds"] = report.seeds;
    auto arm = [](const LomoArmSummary& s) {
        return nlohmann::ordered_json{
            {"holdout_accuracy_mean", s.holdout_accuracy_mean},
            {"holdout_accuracy_std", s.holdout_accuracy_std},
            {"holdout_auroc_mean", s.holdout_auroc_mean},
            {"holdout_auroc_std", s.holdout_auroc_std},
            {"d_loss_converged_mean", s.d_loss_converged_mean}};
    };
    j["adversarial"] = arm(report.adversarial);
    j["baseline"] = arm(report.baseline);
    nlohmann::ordered_json folds = nlohmann::ordered_json::array();
    for (const auto& f : report.folds) {
        nlohmann::ordered_json fj;
        fj["holdout"] = f.holdout;
        fj["seed"] = f.seed;
        fj["mode"] = adv::to_string(f.mode);
        fj["holdout_accuracy"] = f.holdout_accuracy;
        fj["holdout_auroc"] = f.holdout_auroc;
        if (f.uncontrolled_accuracy >= 0.0) {
            fj["uncontrolled_accuracy"] = f.uncontrolled_accuracy;
            fj["uncontrolled_auroc"] = f.uncontrolled_auroc;
        }
        fj["d_loss_converged"] = f.d_loss_converged;
        fj["epochs_run"] = f.epochs_run;
        folds.push_back(fj);
    }
    j["folds"] = folds;
    return j.dump(2) + "\n";
}

}  // namespace bodyauth::eval
