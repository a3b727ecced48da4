// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers
//
// Command-line front end. Talks to the core exclusively through the public
// C API in bodyauth.h; every command writes a manifest.json that suffices
// to reproduce its outputs (see the `replay` subcommand).

#include <bodyauth.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <utility>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kToolVersion = "0.1.0";

const std::vector<std::string> kControlledMotions = {
    "sitting", "standing", "arm_moving", "rotating", "walking"};

int motion_id(const std::string& name) {
    for (std::size_t i = 0; i < kControlledMotions.size(); ++i)
        if (kControlledMotions[i] == name) return static_cast<int>(i);
    if (name == "uncontrolled") return 5;
    throw CLI::ValidationError("--motions", "unknown motion: " + name);
}

const char* motion_name(int id) {
    static const char* names[] = {"sitting",  "standing", "arm_moving",
                                  "rotating", "walking",  "uncontrolled"};
    return (id >= 0 && id < 6) ? names[id] : "?";
}

struct CliError {
    int exit_code;
    int status;
    std::string message;
};

int exit_code_of(ba_status s) {
    switch (s) {
        case BA_OK: return 0;
        case BA_ERR_INVALID_ARGUMENT: return 2;
        case BA_ERR_IO: return 3;
        case BA_ERR_FORMAT_VERSION: return 4;
        case BA_ERR_PARSE:
        case BA_ERR_TOO_SHORT:
        case BA_ERR_CORRUPT: return 5;
        default: return 6;
    }
}

void check(ba_status s, const std::string& context) {
    if (s == BA_OK) return;
    throw CliError{exit_code_of(s), static_cast<int>(s),
                   context + ": " + ba_last_error()};
}

[[noreturn]] void fail_usage(const std::string& message) {
    throw CliError{2, BA_ERR_INVALID_ARGUMENT, message};
}

// RAII for C handles and returned strings.
template <typename T, void (*Free)(T*)>
struct Handle {
    T* ptr = nullptr;
    Handle() = default;
    explicit Handle(T* p) : ptr(p) {}
    ~Handle() { Free(ptr); }
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    Handle(Handle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
    Handle& operator=(Handle&& other) noexcept {
        std::swap(ptr, other.ptr);
        return *this;
    }
    T** out() { return &ptr; }
    operator T*() const { return ptr; }
};

using SynthConfig = Handle<ba_synth_config, ba_synth_config_free>;
using Trace = Handle<ba_trace, ba_trace_free>;
using TraceList = Handle<ba_trace_list, ba_trace_list_free>;
using ProfileSet = Handle<ba_profile_set, ba_profile_set_free>;
using TrainConfig = Handle<ba_train_config, ba_train_config_free>;
using Model = Handle<ba_model, ba_model_free>;
using History = Handle<ba_history, ba_history_free>;

struct CString {
    char* ptr = nullptr;
    ~CString() { ba_string_free(ptr); }
    std::string str() const { return ptr ? ptr : ""; }
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out.good())
        throw CliError{3, BA_ERR_IO, "cannot open for writing: " + path.string()};
    out << content;
    if (!out.good())
        throw CliError{3, BA_ERR_IO, "write failed: " + path.string()};
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good())
        throw CliError{3, BA_ERR_IO, "cannot open: " + path.string()};
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const json& args, const json& outputs) {
    json manifest;
    manifest["manifest_version"] = 1;
    manifest["command"] = command;
    manifest["tool_version"] = kToolVersion;
    manifest["timestamp_utc"] = utc_timestamp();
    manifest["args"] = args;
    manifest["outputs"] = outputs;
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

fs::path ensure_out_dir(const json& args) {
    const fs::path out_dir = args.at("out_dir").get<std::string>();
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw CliError{3, BA_ERR_IO,
                       "cannot create output directory: " + out_dir.string()};
    return out_dir;
}

SynthConfig load_or_default_synth_config(const json& args) {
    SynthConfig config;
    if (args.contains("config") && !args.at("config").get<std::string>().empty())
        check(ba_synth_config_load(args.at("config").get<std::string>().c_str(),
                                   config.out()),
              "loading synth config");
    else
        check(ba_synth_config_create_default(config.out()), "creating config");
    if (args.contains("duration"))
        check(ba_synth_config_set_duration(config, args.at("duration").get<double>()),
              "setting duration");
    return config;
}

TrainConfig train_config_from_args(const json& args) {
    TrainConfig config;
    check(ba_train_config_create_default(config.out()), "creating train config");
    if (args.contains("lambda"))
        check(ba_train_config_set_lambda(config, args.at("lambda").get<double>()),
              "setting lambda");
    if (args.contains("epochs"))
        check(ba_train_config_set_epochs(config, args.at("epochs").get<int>()),
              "setting epochs");
    if (args.contains("batch_size"))
        check(ba_train_config_set_batch_size(config,
                                             args.at("batch_size").get<int>()),
              "setting batch size");
    if (args.contains("lr") || args.contains("lr_d"))
        check(ba_train_config_set_learning_rates(
                  config, args.value("lr", 1e-3), args.value("lr_d", 1e-3)),
              "setting learning rates");
    if (args.contains("d_steps"))
        check(ba_train_config_set_d_steps(config, args.at("d_steps").get<int>()),
              "setting d steps");
    if (args.contains("patience"))
        check(ba_train_config_set_patience(config, args.at("patience").get<int>()),
              "setting patience");
    if (args.contains("seed"))
        check(ba_train_config_set_seed(config, args.at("seed").get<std::uint64_t>()),
              "setting seed");
    return config;
}

// --- commands ---------------------------------------------------------------

void run_synth(const json& args) {
    const fs::path out_dir = ensure_out_dir(args);
    const auto config = load_or_default_synth_config(args);

    std::vector<ba_cell_count> cells;
    const int per_cell = args.at("per_cell").get<int>();
    const int uncontrolled = args.at("uncontrolled").get<int>();
    for (int device : {1, 0})
        for (const auto& motion : args.at("motions"))
            cells.push_back({device, motion_id(motion.get<std::string>()), per_cell});
    if (uncontrolled > 0)
        for (int device : {1, 0}) cells.push_back({device, 5, uncontrolled});

    TraceList list;
    check(ba_trace_list_synth(config, cells.data(), cells.size(),
                              args.at("seed").get<std::uint64_t>(), list.out()),
          "synthesizing traces");

    const fs::path trace_dir = out_dir / "traces";
    fs::create_directories(trace_dir);
    size_t count = 0;
    check(ba_trace_list_size(list, &count), "listing traces");

    std::string index = "file,link,motion,seed\n";
    char row[160];
    for (size_t i = 0; i < count; ++i) {
        const ba_trace* trace = nullptr;
        check(ba_trace_list_get(list, i, &trace), "reading trace list");
        char name[32];
        std::snprintf(name, sizeof name, "trace_%05zu.csv", i);
        check(ba_trace_save_csv(trace, (trace_dir / name).string().c_str()),
              "writing trace CSV");
        int device = 0, motion = 0;
        std::uint64_t seed = 0;
        check(ba_trace_labels(trace, &device, &motion), "reading labels");
        check(ba_trace_seed(trace, &seed), "reading seed");
        std::snprintf(row, sizeof row, "traces/%s,%s,%s,%llu\n", name,
                      device ? "on" : "off", motion_name(motion),
                      static_cast<unsigned long long>(seed));
        index += row;
    }
    write_file(out_dir / "index.csv", index);
    check(ba_synth_config_save(config, (out_dir / "synth_config.txt").string().c_str()),
          "writing config snapshot");

    write_manifest(out_dir, "synth", args,
                   {{"traces", count},
                    {"index", "index.csv"},
                    {"config_snapshot", "synth_config.txt"}});
    std::printf("synth: wrote %zu traces to %s\n", count, out_dir.string().c_str());
}

void run_featurize(const json& args) {
    const fs::path out_dir = ensure_out_dir(args);
    ProfileSet set;
    check(ba_profile_set_create(set.out()), "creating profile set");

    std::vector<std::string> keep_motions;
    if (args.contains("motions"))
        for (const auto& m : args.at("motions"))
            keep_motions.push_back(m.get<std::string>());
    const auto keep = [&](const std::string& motion) {
        if (keep_motions.empty()) return true;
        for (const auto& m : keep_motions)
            if (m == motion) return true;
        return false;
    };

    if (args.contains("traces")) {
        const fs::path trace_root = args.at("traces").get<std::string>();
        std::istringstream index(read_file(trace_root / "index.csv"));
        std::string line;
        if (!std::getline(index, line) || line != "file,link,motion,seed")
            throw CliError{5, BA_ERR_PARSE,
                           "bad index header in " + (trace_root / "index.csv").string()};
        std::uint32_t trace_id = 0;
        while (std::getline(index, line)) {
            if (line.empty()) continue;
            std::istringstream row(line);
            std::string file, link, motion, seed;
            std::getline(row, file, ',');
            std::getline(row, link, ',');
            std::getline(row, motion, ',');
            std::getline(row, seed, ',');
            ++trace_id;
            if (!keep(motion)) continue;
            Trace trace;
            check(ba_trace_load_csv((trace_root / file).string().c_str(),
                                    link == "on" ? 1 : 0, motion_id(motion),
                                    trace.out()),
                  "ingesting " + file);
            check(ba_profile_set_add_trace(set, trace, trace_id - 1),
                  "featurizing " + file);
        }
    } else if (args.contains("trace")) {
        Trace trace;
        check(ba_trace_load_csv(args.at("trace").get<std::string>().c_str(),
                                args.at("link").get<std::string>() == "on" ? 1 : 0,
                                motion_id(args.at("motion").get<std::string>()),
                                trace.out()),
              "ingesting trace");
        check(ba_profile_set_add_trace(set, trace, 0), "featurizing trace");
    } else {
        fail_usage("featurize needs --traces <dir> or --trace <csv>");
    }

    const fs::path features = out_dir / "features.bin";
    check(ba_profile_set_save(set, features.string().c_str()), "saving features");
    size_t count = 0;
    check(ba_profile_set_size(set, &count), "counting profiles");
    write_manifest(out_dir, "featurize", args,
                   {{"features", "features.bin"}, {"profiles", count}});
    std::printf("featurize: %zu profiles -> %s\n", count,
                features.string().c_str());
}

void run_train(const json& args) {
    const fs::path out_dir = ensure_out_dir(args);
    ProfileSet train_set;
    check(ba_profile_set_load(args.at("dataset").get<std::string>().c_str(),
                              train_set.out()),
          "loading dataset");
    ProfileSet valid_set;
    const bool has_valid = args.contains("val_dataset");
    if (has_valid)
        check(ba_profile_set_load(args.at("val_dataset").get<std::string>().c_str(),
                                  valid_set.out()),
              "loading validation dataset");

    const auto config = train_config_from_args(args);
    const std::string mode = args.at("mode").get<std::string>();
    if (mode != "adversarial" && mode != "baseline")
        fail_usage("--mode must be adversarial or baseline");

    Model model;
    History history;
    check(ba_train(train_set, has_valid ? valid_set.ptr : nullptr, config,
                   mode == "adversarial" ? BA_MODE_ADVERSARIAL : BA_MODE_BASELINE,
                   model.out(), history.out()),
          "training");

    check(ba_model_save(model, (out_dir / "checkpoint.bin").string().c_str()),
          "saving checkpoint");
    CString csv;
    check(ba_history_csv(history, &csv.ptr), "exporting history");
    write_file(out_dir / "history.csv", csv.str());
    int epochs = 0;
    check(ba_history_epochs(history, &epochs), "reading history");
    write_manifest(out_dir, "train", args,
                   {{"checkpoint", "checkpoint.bin"},
                    {"history", "history.csv"},
                    {"epochs_run", epochs}});
    std::printf("train: %s mode, %d epochs -> %s\n", mode.c_str(), epochs,
                (out_dir / "checkpoint.bin").string().c_str());
}

void run_eval(const json& args) {
    const fs::path out_dir = ensure_out_dir(args);
    Model model;
    check(ba_model_load(args.at("checkpoint").get<std::string>().c_str(),
                        model.out()),
          "loading checkpoint");
    ProfileSet set;
    check(ba_profile_set_load(args.at("dataset").get<std::string>().c_str(),
                              set.out()),
          "loading dataset");

    CString report;
    check(ba_evaluate_json(model, set, args.at("threshold").get<double>(),
                           &report.ptr),
          "evaluating");
    write_file(out_dir / "report.json", report.str());
    CString roc;
    check(ba_evaluate_roc_csv(model, set, &roc.ptr), "exporting ROC");
    write_file(out_dir / "roc.csv", roc.str());

    write_manifest(out_dir, "eval", args,
                   {{"report", "report.json"}, {"roc", "roc.csv"}});
    const auto parsed = json::parse(report.str());
    std::printf("eval: accuracy %.4f  tp %.4f  fp %.4f  auroc %.4f\n",
                parsed["accuracy"].get<double>(), parsed["tp_rate"].get<double>(),
                parsed["fp_rate"].get<double>(), parsed["auroc"].get<double>());
}

void run_lomo(const json& args) {
    const fs::path out_dir = ensure_out_dir(args);
    ProfileSet set;
    check(ba_profile_set_load(args.at("dataset").get<std::string>().c_str(),
                              set.out()),
          "loading dataset");
    const auto config = train_config_from_args(args);
    std::vector<std::uint64_t> seeds;
    for (const auto& s : args.at("seeds")) seeds.push_back(s.get<std::uint64_t>());

    CString report;
    check(ba_lomo_json(set, config, seeds.data(), seeds.size(),
                       args.at("threads").get<int>(), &report.ptr),
          "running leave-one-motion-out");
    write_file(out_dir / "lomo_report.json", report.str());
    write_manifest(out_dir, "lomo", args, {{"report", "lomo_report.json"}});

    const auto parsed = json::parse(report.str());
    std::printf("lomo: adversarial holdout acc %.4f  baseline %.4f\n",
                parsed["adversarial"]["holdout_accuracy_mean"].get<double>(),
                parsed["baseline"]["holdout_accuracy_mean"].get<double>());
}

void run_theory_check(const json& args) {
    const fs::path out_dir = ensure_out_dir(args);
    std::vector<double> lambdas;
    for (const auto& l : args.at("lambdas")) lambdas.push_back(l.get<double>());
    CString out;
    check(ba_theory_check_json(args.at("seed").get<std::uint64_t>(),
                               args.at("instances").get<int>(),
                               args.at("nx").get<int>(), args.at("nz").get<int>(),
                               args.at("codomain").get<int>(), lambdas.data(),
                               lambdas.size(), &out.ptr),
          "running theory checks");
    write_file(out_dir / "certificates.json", out.str());
    write_manifest(out_dir, "theory-check", args,
                   {{"certificates", "certificates.json"}});
    const auto parsed = json::parse(out.str());
    std::printf("theory-check: all_pass = %s\n",
                parsed["all_pass"].get<bool>() ? "true" : "false");
}

void run_pipeline(const json& args) {
    const fs::path out_dir = ensure_out_dir(args);
    const std::uint64_t seed = args.at("seed").get<std::uint64_t>();

    json synth_args{{"out_dir", (out_dir / "synth_train").string()},
                    {"seed", seed},
                    {"per_cell", args.at("per_cell")},
                    {"uncontrolled", 0},
                    {"motions", kControlledMotions}};
    if (args.contains("config")) synth_args["config"] = args.at("config");
    if (args.contains("duration")) synth_args["duration"] = args.at("duration");
    run_synth(synth_args);
    json synth_test = synth_args;
    synth_test["out_dir"] = (out_dir / "synth_test").string();
    synth_test["seed"] = seed + 1;
    synth_test["uncontrolled"] = args.at("uncontrolled");
    run_synth(synth_test);

    json feat_train{{"out_dir", (out_dir / "features_train").string()},
                    {"traces", (out_dir / "synth_train").string()}};
    run_featurize(feat_train);
    json feat_test{{"out_dir", (out_dir / "features_test").string()},
                   {"traces", (out_dir / "synth_test").string()}};
    run_featurize(feat_test);

    json train_args{{"out_dir", (out_dir / "train").string()},
                    {"dataset", (out_dir / "features_train" / "features.bin").string()},
                    {"mode", args.at("mode")},
                    {"lambda", args.at("lambda")},
                    {"epochs", args.at("epochs")},
                    {"seed", seed}};
    run_train(train_args);

    json eval_args{{"out_dir", (out_dir / "eval").string()},
                   {"checkpoint", (out_dir / "train" / "checkpoint.bin").string()},
                   {"dataset", (out_dir / "features_test" / "features.bin").string()},
                   {"threshold", args.at("threshold")}};
    run_eval(eval_args);

    write_manifest(out_dir, "pipeline", args,
                   {{"stages", {"synth_train", "synth_test", "features_train",
                                "features_test", "train", "eval"}}});
}

void dispatch(const std::string& command, const json& args) {
    if (command == "synth") return run_synth(args);
    if (command == "featurize") return run_featurize(args);
    if (command == "train") return run_train(args);
    if (command == "eval") return run_eval(args);
    if (command == "lomo") return run_lomo(args);
    if (command == "theory-check") return run_theory_check(args);
    if (command == "pipeline") return run_pipeline(args);
    fail_usage("unknown command in manifest: " + command);
}

void run_replay(const std::string& manifest_path, const std::string& out_dir) {
    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path));
    } catch (const json::exception& e) {
        throw CliError{5, BA_ERR_PARSE,
                       std::string("cannot parse manifest: ") + e.what()};
    }
    if (!manifest.contains("command") || !manifest.contains("args"))
        throw CliError{5, BA_ERR_PARSE, "manifest lacks command/args"};
    if (manifest.value("manifest_version", 0) != 1)
        throw CliError{4, BA_ERR_FORMAT_VERSION, "unsupported manifest version"};
    json args = manifest["args"];
    if (!out_dir.empty()) args["out_dir"] = out_dir;
    dispatch(manifest["command"].get<std::string>(), args);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bodyauth: on-/off-body device authentication from RSS traces"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    // synth
    auto* synth = app.add_subcommand("synth", "generate labeled synthetic RSS traces");
    std::string synth_out, synth_config;
    std::uint64_t synth_seed = 1;
    int per_cell = 24, uncontrolled = 12;
    double duration = -1.0;
    std::vector<std::string> motions = kControlledMotions;
    synth->add_option("--out-dir", synth_out)->required();
    synth->add_option("--seed", synth_seed);
    synth->add_option("--config", synth_config)->check(CLI::ExistingFile);
    synth->add_option("--per-cell", per_cell, "traces per (link, motion) cell");
    synth->add_option("--uncontrolled", uncontrolled, "uncontrolled traces per link");
    synth->add_option("--duration", duration, "trace duration in seconds");
    synth->add_option("--motions", motions, "controlled motion subset");

    // featurize
    auto* featurize = app.add_subcommand("featurize", "turn traces into propagation profiles");
    std::string feat_out, feat_traces, feat_trace, feat_link = "on",
                feat_motion = "sitting";
    std::vector<std::string> feat_motions;
    featurize->add_option("--out-dir", feat_out)->required();
    featurize->add_option("--traces", feat_traces, "trace directory with index.csv");
    featurize->add_option("--trace", feat_trace, "single trace CSV");
    featurize->add_option("--link", feat_link)->check(CLI::IsMember({"on", "off"}));
    featurize->add_option("--motion", feat_motion);
    featurize->add_option("--motions", feat_motions,
                          "keep only these motions (default: all)");

    // train
    auto* train = app.add_subcommand("train", "train the authentication model");
    std::string train_out, train_dataset, train_valid, mode = "adversarial";
    double lambda = 1.0, lr = 1e-3, lr_d = 1e-3;
    int epochs = 60, batch_size = 64, d_steps = 1, patience = 20;
    std::uint64_t train_seed = 1;
    train->add_option("--out-dir", train_out)->required();
    train->add_option("--dataset", train_dataset)->required();
    train->add_option("--val-dataset", train_valid);
    train->add_option("--mode", mode)->check(CLI::IsMember({"adversarial", "baseline"}));
    train->add_option("--lambda", lambda);
    train->add_option("--lr", lr);
    train->add_option("--lr-d", lr_d);
    train->add_option("--epochs", epochs);
    train->add_option("--batch-size", batch_size);
    train->add_option("--d-steps", d_steps);
    train->add_option("--patience", patience);
    train->add_option("--seed", train_seed);

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
    std::string eval_out, eval_checkpoint, eval_dataset;
    double threshold = 0.5;
    eval->add_option("--out-dir", eval_out)->required();
    eval->add_option("--checkpoint", eval_checkpoint)->required();
    eval->add_option("--dataset", eval_dataset)->required();
    eval->add_option("--threshold", threshold);

    // lomo
    auto* lomo = app.add_subcommand("lomo", "leave-one-motion-out comparison");
    std::string lomo_out, lomo_dataset;
    std::vector<std::uint64_t> lomo_seeds = {1, 2, 3, 4, 5};
    int lomo_threads = 2, lomo_epochs = 30, lomo_batch = 64;
    double lomo_lambda = 1.0;
    lomo->add_option("--out-dir", lomo_out)->required();
    lomo->add_option("--dataset", lomo_dataset)->required();
    lomo->add_option("--seeds", lomo_seeds);
    lomo->add_option("--threads", lomo_threads);
    lomo->add_option("--epochs", lomo_epochs);
    lomo->add_option("--batch-size", lomo_batch);
    lomo->add_option("--lambda", lomo_lambda);

    // theory-check
    auto* theory = app.add_subcommand("theory-check", "emit proposition certificates");
    std::string theory_out;
    std::uint64_t theory_seed = 7;
    int instances = 20, nx = 8, nz = 3, codomain = 4;
    std::vector<double> lambdas = {0.1, 1.0, 10.0};
    theory->add_option("--out-dir", theory_out)->required();
    theory->add_option("--seed", theory_seed);
    theory->add_option("--instances", instances);
    theory->add_option("--nx", nx);
    theory->add_option("--nz", nz);
    theory->add_option("--codomain", codomain);
    theory->add_option("--lambdas", lambdas);

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "synth -> featurize -> train -> eval");
    std::string pipe_out, pipe_config, pipe_mode = "adversarial";
    std::uint64_t pipe_seed = 1;
    int pipe_per_cell = 6, pipe_uncontrolled = 3, pipe_epochs = 30;
    double pipe_lambda = 1.0, pipe_threshold = 0.5, pipe_duration = -1.0;
    pipeline->add_option("--out-dir", pipe_out)->required();
    pipeline->add_option("--seed", pipe_seed);
    pipeline->add_option("--config", pipe_config)->check(CLI::ExistingFile);
    pipeline->add_option("--per-cell", pipe_per_cell);
    pipeline->add_option("--uncontrolled", pipe_uncontrolled);
    pipeline->add_option("--epochs", pipe_epochs);
    pipeline->add_option("--lambda", pipe_lambda);
    pipeline->add_option("--mode", pipe_mode)
        ->check(CLI::IsMember({"adversarial", "baseline"}));
    pipeline->add_option("--threshold", pipe_threshold);
    pipeline->add_option("--duration", pipe_duration);

    // replay
    auto* replay = app.add_subcommand("replay", "re-run a command from its manifest");
    std::string replay_manifest, replay_out;
    replay->add_option("manifest", replay_manifest)->required();
    replay->add_option("--out-dir", replay_out, "override the output directory");

    try {
        app.parse(argc, argv);

        if (*synth) {
            json args{{"out_dir", synth_out}, {"seed", synth_seed},
                      {"per_cell", per_cell}, {"uncontrolled", uncontrolled},
                      {"motions", motions}};
            if (!synth_config.empty()) args["config"] = synth_config;
            if (duration > 0) args["duration"] = duration;
            run_synth(args);
        } else if (*featurize) {
            json args{{"out_dir", feat_out}};
            if (!feat_traces.empty()) args["traces"] = feat_traces;
            if (!feat_trace.empty()) {
                args["trace"] = feat_trace;
                args["link"] = feat_link;
                args["motion"] = feat_motion;
            }
            if (!feat_motions.empty()) args["motions"] = feat_motions;
            run_featurize(args);
        } else if (*train) {
            json args{{"out_dir", train_out},   {"dataset", train_dataset},
                      {"mode", mode},           {"lambda", lambda},
                      {"lr", lr},               {"lr_d", lr_d},
                      {"epochs", epochs},       {"batch_size", batch_size},
                      {"d_steps", d_steps},     {"patience", patience},
                      {"seed", train_seed}};
            if (!train_valid.empty()) args["val_dataset"] = train_valid;
            run_train(args);
        } else if (*eval) {
            run_eval(json{{"out_dir", eval_out},
                          {"checkpoint", eval_checkpoint},
                          {"dataset", eval_dataset},
                          {"threshold", threshold}});
        } else if (*lomo) {
            run_lomo(json{{"out_dir", lomo_out}, {"dataset", lomo_dataset},
                          {"seeds", lomo_seeds}, {"threads", lomo_threads},
                          {"epochs", lomo_epochs}, {"batch_size", lomo_batch},
                          {"lambda", lomo_lambda}});
        } else if (*theory) {
            run_theory_check(json{{"out_dir", theory_out}, {"seed", theory_seed},
                                  {"instances", instances}, {"nx", nx},
                                  {"nz", nz}, {"codomain", codomain},
                                  {"lambdas", lambdas}});
        } else if (*pipeline) {
            json args{{"out_dir", pipe_out},       {"seed", pipe_seed},
                      {"per_cell", pipe_per_cell}, {"uncontrolled", pipe_uncontrolled},
                      {"epochs", pipe_epochs},     {"lambda", pipe_lambda},
                      {"mode", pipe_mode},         {"threshold", pipe_threshold}};
            if (!pipe_config.empty()) args["config"] = pipe_config;
            if (pipe_duration > 0) args["duration"] = pipe_duration;
            run_pipeline(args);
        } else if (*replay) {
            run_replay(replay_manifest, replay_out);
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        json err{{"error",
                  {{"exit_code", 2},
                   {"status", BA_ERR_INVALID_ARGUMENT},
                   {"message", e.what()}}}};
        std::fprintf(stderr, "%s\n", err.dump().c_str());
        return 2;
    } catch (const CliError& e) {
        json err{{"error",
                  {{"exit_code", e.exit_code},
                   {"status", e.status},
                   {"message", e.message}}}};
        std::fprintf(stderr, "%s\n", err.dump().c_str());
        return e.exit_code;
    }
}
