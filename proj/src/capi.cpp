// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#include "bodyauth.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "ban_synth.hpp"
#include "common.hpp"
#include "eval.hpp"
#include "features.hpp"
#include "model.hpp"
#include "theory_certify.hpp"
#include "train.hpp"

using namespace bodyauth;

namespace {

thread_local std::string g_last_error;

ba_status to_status(Errc code) {
    switch (code) {
        case Errc::invalid_argument: return BA_ERR_INVALID_ARGUMENT;
        case Errc::io: return BA_ERR_IO;
        case Errc::parse: return BA_ERR_PARSE;
        case Errc::too_short: return BA_ERR_TOO_SHORT;
        case Errc::format_version: return BA_ERR_FORMAT_VERSION;
        case Errc::corrupt: return BA_ERR_CORRUPT;
        case Errc::state: return BA_ERR_STATE;
        case Errc::numeric: return BA_ERR_NUMERIC;
        case Errc::unsupported: return BA_ERR_UNSUPPORTED;
    }
    return BA_ERR_STATE;
}

template <typename Fn>
ba_status guarded(Fn&& fn) {
    try {
        fn();
        return BA_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return BA_ERR_STATE;
    }
}

ba_status fail_null(const char* what) {
    g_last_error = std::string(what) + ": null argument";
    return BA_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

ban::DeviceLabel device_from_int(int v) {
    require(v == 0 || v == 1, Errc::invalid_argument,
            "device label must be 0 (off-body) or 1 (on-body)");
    return static_cast<ban::DeviceLabel>(v);
}

ban::MotionLabel motion_from_int(int v) {
    require(v >= 0 && v < ban::kMotionCount, Errc::invalid_argument,
            "motion label out of range");
    return static_cast<ban::MotionLabel>(v);
}

}  // namespace

struct ba_synth_config {
    ban::SynthConfig config;
};
struct ba_trace {
    ban::RssTrace trace;
};
struct ba_trace_list {
    std::vector<ba_trace> traces;
};
struct ba_profile_set {
    std::vector<feat::ProfileRecord> records;
};
struct ba_train_config {
    adv::TrainConfig config;
};
struct ba_model {
    adv::ModelParams model;
};
struct ba_history {
    adv::TrainHistory history;
};

extern "C" {

const char* ba_last_error(void) { return g_last_error.c_str(); }

const char* ba_version_string(void) { return "0.1.0"; }

void ba_string_free(char* s) { std::free(s); }

/* --- synth config --------------------------------------------------------- */

ba_status ba_synth_config_create_default(ba_synth_config** out) {
    if (!out) return fail_null("ba_synth_config_create_default");
    return guarded([&] { *out = new ba_synth_config(); });
}

ba_status ba_synth_config_load(const char* path, ba_synth_config** out) {
    if (!path || !out) return fail_null("ba_synth_config_load");
    return guarded([&] {
        std::ifstream in(path);
        require(in.good(), Errc::io, std::string("cannot open: ") + path);
        auto cfg = std::make_unique<ba_synth_config>();
        cfg->config = ban::load_synth_config(in);
        *out = cfg.release();
    });
}

ba_status ba_synth_config_save(const ba_synth_config* config, const char* path) {
    if (!config || !path) return fail_null("ba_synth_config_save");
    return guarded([&] {
        std::ofstream outf(path, std::ios::trunc);
        require(outf.good(), Errc::io, std::string("cannot open: ") + path);
        ban::save_synth_config(config->config, outf);
        require(outf.good(), Errc::io, std::string("write failed: ") + path);
    });
}

ba_status ba_synth_config_set_duration(ba_synth_config* config, double seconds) {
    if (!config) return fail_null("ba_synth_config_set_duration");
    return guarded([&] {
        require(seconds >= 5.0, Errc::invalid_argument,
                "duration must be >= 5 seconds");
        config->config.duration_s = seconds;
    });
}

void ba_synth_config_free(ba_synth_config* config) { delete config; }

/* --- traces ---------------------------------------------------------------- */

ba_status ba_trace_synth(const ba_synth_config* config, int device_label,
                         int motion_label, uint64_t seed, ba_trace** out) {
    if (!config || !out) return fail_null("ba_trace_synth");
    return guarded([&] {
        auto t = std::make_unique<ba_trace>();
        t->trace = ban::synth_trace(config->config, device_from_int(device_label),
                                    motion_from_int(motion_label), seed);
        *out = t.release();
    });
}

ba_status ba_trace_load_csv(const char* path, int device_label,
                            int motion_label, ba_trace** out) {
    if (!path || !out) return fail_null("ba_trace_load_csv");
    return guarded([&] {
        std::ifstream in(path);
        require(in.good(), Errc::io, std::string("cannot open: ") + path);
        auto t = std::make_unique<ba_trace>();
        t->trace = ban::ingest_csv(in, device_from_int(device_label),
                                   motion_from_int(motion_label));
        *out = t.release();
    });
}

ba_status ba_trace_save_csv(const ba_trace* trace, const char* path) {
    if (!trace || !path) return fail_null("ba_trace_save_csv");
    return guarded([&] {
        std::ofstream outf(path, std::ios::trunc);
        require(outf.good(), Errc::io, std::string("cannot open: ") + path);
        ban::write_csv(trace->trace, outf);
        require(outf.good(), Errc::io, std::string("write failed: ") + path);
    });
}

ba_status ba_trace_samples(const ba_trace* trace, const double** samples,
                           size_t* count) {
    if (!trace || !samples || !count) return fail_null("ba_trace_samples");
    *samples = trace->trace.samples_dbm.data();
    *count = trace->trace.samples_dbm.size();
    return BA_OK;
}

ba_status ba_trace_labels(const ba_trace* trace, int* device_label,
                          int* motion_label) {
    if (!trace || !device_label || !motion_label)
        return fail_null("ba_trace_labels");
    *device_label = static_cast<int>(trace->trace.link);
    *motion_label = static_cast<int>(trace->trace.motion);
    return BA_OK;
}

ba_status ba_trace_seed(const ba_trace* trace, uint64_t* seed) {
    if (!trace || !seed) return fail_null("ba_trace_seed");
    *seed = trace->trace.seed;
    return BA_OK;
}

void ba_trace_free(ba_trace* trace) { delete trace; }

namespace {

ba_status synth_list(const ba_synth_config* config,
                     std::span<const ban::CellCount> counts,
                     uint64_t master_seed, ba_trace_list** out) {
    return guarded([&] {
        auto traces = ban::synth_dataset(config->config, counts, master_seed);
        auto list = std::make_unique<ba_trace_list>();
        list->traces.reserve(traces.size());
        for (auto& t : traces) list->traces.push_back({std::move(t)});
        *out = list.release();
    });
}

}  // namespace

ba_status ba_trace_list_synth(const ba_synth_config* config,
                              const ba_cell_count* cells, size_t n_cells,
                              uint64_t master_seed, ba_trace_list** out) {
    if (!config || !out || (!cells && n_cells > 0))
        return fail_null("ba_trace_list_synth");
    std::vector<ban::CellCount> counts;
    try {
        for (size_t i = 0; i < n_cells; ++i)
            counts.push_back({device_from_int(cells[i].device_label),
                              motion_from_int(cells[i].motion_label),
                              cells[i].count});
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    }
    return synth_list(config, counts, master_seed, out);
}

ba_status ba_trace_list_synth_balanced(const ba_synth_config* config,
                                       int per_cell, int uncontrolled_per_link,
                                       uint64_t master_seed,
                                       ba_trace_list** out) {
    if (!config || !out) return fail_null("ba_trace_list_synth_balanced");
    const auto counts = ban::balanced_counts(per_cell, uncontrolled_per_link);
    return synth_list(config, counts, master_seed, out);
}

ba_status ba_trace_list_size(const ba_trace_list* list, size_t* count) {
    if (!list || !count) return fail_null("ba_trace_list_size");
    *count = list->traces.size();
    return BA_OK;
}

ba_status ba_trace_list_get(const ba_trace_list* list, size_t index,
                            const ba_trace** out) {
    if (!list || !out) return fail_null("ba_trace_list_get");
    if (index >= list->traces.size()) {
        g_last_error = "trace index out of range";
        return BA_ERR_INVALID_ARGUMENT;
    }
    *out = &list->traces[index];
    return BA_OK;
}

void ba_trace_list_free(ba_trace_list* list) { delete list; }

/* --- profiles --------------------------------------------------------------- */

ba_status ba_profile_set_create(ba_profile_set** out) {
    if (!out) return fail_null("ba_profile_set_create");
    return guarded([&] { *out = new ba_profile_set(); });
}

ba_status ba_profile_set_add_trace(ba_profile_set* set, const ba_trace* trace,
                                   uint32_t trace_id) {
    if (!set || !trace) return fail_null("ba_profile_set_add_trace");
    return guarded([&] {
        for (const auto& segment : feat::segment_trace(trace->trace)) {
            feat::ProfileRecord r;
            r.profile = feat::build_profile(segment);
            r.trace_id = trace_id;
            set->records.push_back(r);
        }
    });
}

ba_status ba_profile_set_load(const char* path, ba_profile_set** out) {
    if (!path || !out) return fail_null("ba_profile_set_load");
    return guarded([&] {
        auto set = std::make_unique<ba_profile_set>();
        set->records = feat::load_profiles(path);
        *out = set.release();
    });
}

ba_status ba_profile_set_save(const ba_profile_set* set, const char* path) {
    if (!set || !path) return fail_null("ba_profile_set_save");
    return guarded([&] { feat::save_profiles(set->records, path); });
}

ba_status ba_profile_set_size(const ba_profile_set* set, size_t* count) {
    if (!set || !count) return fail_null("ba_profile_set_size");
    *count = set->records.size();
    return BA_OK;
}

ba_status ba_profile_set_get(const ba_profile_set* set, size_t index,
                             double* values, int* device_label,
                             int* motion_label) {
    if (!set || !values || !device_label || !motion_label)
        return fail_null("ba_profile_set_get");
    if (index >= set->records.size()) {
        g_last_error = "profile index out of range";
        return BA_ERR_INVALID_ARGUMENT;
    }
    const auto& r = set->records[index];
    std::memcpy(values, r.profile.values.data(),
                sizeof(double) * feat::kProfileDim);
    *device_label = static_cast<int>(r.profile.link);
    *motion_label = static_cast<int>(r.profile.motion);
    return BA_OK;
}

ba_status ba_profile_set_filter_motions(const ba_profile_set* set,
                                        const int* motions, size_t n_motions,
                                        int include_uncontrolled,
                                        ba_profile_set** out) {
    if (!set || (!motions && n_motions > 0) || !out)
        return fail_null("ba_profile_set_filter_motions");
    return guarded([&] {
        bool keep[ban::kMotionCount] = {};
        for (size_t i = 0; i < n_motions; ++i)
            keep[static_cast<int>(motion_from_int(motions[i]))] = true;
        if (include_uncontrolled)
            keep[static_cast<int>(ban::MotionLabel::uncontrolled)] = true;
        auto filtered = std::make_unique<ba_profile_set>();
        for (const auto& r : set->records)
            if (keep[static_cast<int>(r.profile.motion)])
                filtered->records.push_back(r);
        *out = filtered.release();
    });
}

void ba_profile_set_free(ba_profile_set* set) { delete set; }

/* --- training ---------------------------------------------------------------- */

ba_status ba_train_config_create_default(ba_train_config** out) {
    if (!out) return fail_null("ba_train_config_create_default");
    return guarded([&] { *out = new ba_train_config(); });
}

#define BA_CONFIG_SETTER(name, stmt)                          \
    ba_status name {                                          \
        if (!config) return fail_null(#name);                 \
        return guarded([&] {                                  \
            stmt;                                             \
            config->config.validate();                        \
        });                                                   \
    }

BA_CONFIG_SETTER(ba_train_config_set_lambda(ba_train_config* config, double lambda),
                 config->config.lambda = lambda)
BA_CONFIG_SETTER(ba_train_config_set_learning_rates(ba_train_config* config,
                                                    double lr_ep, double lr_d),
                 config->config.lr_ep = lr_ep;
                 config->config.lr_d = lr_d)
BA_CONFIG_SETTER(ba_train_config_set_batch_size(ba_train_config* config, int batch),
                 config->config.batch_size = batch)
BA_CONFIG_SETTER(ba_train_config_set_epochs(ba_train_config* config, int epochs),
                 config->config.epochs = epochs)
BA_CONFIG_SETTER(ba_train_config_set_patience(ba_train_config* config, int patience),
                 config->config.patience = patience)
BA_CONFIG_SETTER(ba_train_config_set_d_steps(ba_train_config* config, int d_steps),
                 config->config.d_steps_per_ep_step = d_steps)
BA_CONFIG_SETTER(ba_train_config_set_seed(ba_train_config* config, uint64_t seed),
                 config->config.seed = seed)

#undef BA_CONFIG_SETTER

void ba_train_config_free(ba_train_config* config) { delete config; }

ba_status ba_train(const ba_profile_set* train_set,
                   const ba_profile_set* valid_set,
                   const ba_train_config* config, int mode, ba_model** out_model,
                   ba_history** out_history) {
    if (!train_set || !config || !out_model) return fail_null("ba_train");
    return guarded([&] {
        require(mode == BA_MODE_ADVERSARIAL || mode == BA_MODE_BASELINE,
                Errc::invalid_argument, "mode must be adversarial or baseline");
        const auto result = adv::train(
            train_set->records, config->config,
            mode == BA_MODE_ADVERSARIAL ? adv::TrainMode::adversarial
                                        : adv::TrainMode::baseline,
            valid_set ? std::span<const feat::ProfileRecord>(valid_set->records)
                      : std::span<const feat::ProfileRecord>());
        auto model = std::make_unique<ba_model>();
        model->model = result.model;
        if (out_history) {
            auto history = std::make_unique<ba_history>();
            history->history = result.history;
            *out_history = history.release();
        }
        *out_model = model.release();
    });
}

ba_status ba_model_save(const ba_model* model, const char* path) {
    if (!model || !path) return fail_null("ba_model_save");
    return guarded([&] { adv::save_checkpoint(model->model, path); });
}

ba_status ba_model_load(const char* path, ba_model** out) {
    if (!path || !out) return fail_null("ba_model_load");
    return guarded([&] {
        auto model = std::make_unique<ba_model>();
        model->model = adv::load_checkpoint(path);
        *out = model.release();
    });
}

ba_status ba_model_predict(const ba_model* model, const double* profile,
                           double* p_on) {
    if (!model || !profile || !p_on) return fail_null("ba_model_predict");
    return guarded([&] {
        const std::span<const double> x(profile,
                                        static_cast<std::size_t>(
                                            model->model.arch.input_dim));
        *p_on = adv::predict_batch(model->model, x, 1)[0];
    });
}

void ba_model_free(ba_model* model) { delete model; }

ba_status ba_history_csv(const ba_history* history, char** out_csv) {
    if (!history || !out_csv) return fail_null("ba_history_csv");
    return guarded([&] { *out_csv = dup_string(adv::history_csv(history->history)); });
}

ba_status ba_history_epochs(const ba_history* history, int* epochs) {
    if (!history || !epochs) return fail_null("ba_history_epochs");
    *epochs = history->history.epochs();
    return BA_OK;
}

void ba_history_free(ba_history* history) { delete history; }

/* --- evaluation ---------------------------------------------------------------- */

ba_status ba_evaluate_json(const ba_model* model, const ba_profile_set* set,
                           double threshold, char** out_report_json) {
    if (!model || !set || !out_report_json) return fail_null("ba_evaluate_json");
    return guarded([&] {
        const auto report = eval::evaluate(model->model, set->records, threshold);
        *out_report_json = dup_string(eval::report_json(report));
    });
}

ba_status ba_evaluate_roc_csv(const ba_model* model, const ba_profile_set* set,
                              char** out_csv) {
    if (!model || !set || !out_csv) return fail_null("ba_evaluate_roc_csv");
    return guarded([&] {
        const auto report = eval::evaluate(model->model, set->records, 0.5);
        *out_csv = dup_string(eval::roc_csv(report.roc));
    });
}

ba_status ba_lomo_json(const ba_profile_set* dataset,
                       const ba_train_config* config, const uint64_t* seeds,
                       size_t n_seeds, int threads, char** out_report_json) {
    if (!dataset || !config || !seeds || !out_report_json)
        return fail_null("ba_lomo_json");
    return guarded([&] {
        const auto report = eval::leave_one_motion_out(
            dataset->records, config->config,
            std::span<const std::uint64_t>(seeds, n_seeds), threads);
        *out_report_json = dup_string(eval::lomo_json(report));
    });
}

/* --- theory -------------------------------------------------------------------- */

ba_status ba_theory_check_json(uint64_t seed, int instances, int nx, int nz,
                               int codomain, const double* lambdas,
                               size_t n_lambdas, char** out_json) {
    if (!out_json || (!lambdas && n_lambdas > 0))
        return fail_null("ba_theory_check_json");
    return guarded([&] {
        theory::CertifyOptions opt;
        opt.seed = seed;
        opt.instances = instances;
        opt.nx = nx;
        opt.nz = nz;
        opt.codomain = codomain;
        if (n_lambdas > 0)
            opt.lambdas.assign(lambdas, lambdas + n_lambdas);
        const auto certs = theory::certify(opt);
        *out_json = dup_string(theory::certificates_json(opt, certs));
    });
}

}  // extern "C"
