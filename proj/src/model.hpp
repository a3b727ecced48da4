// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autodiff.hpp"
#include "features.hpp"

namespace bodyauth::adv {

// Three-block architecture: convolutional extractor E over the 380-d
// profile treated as a 1-D signal, dense on-off predictor P (2-way) and
// dense motion discriminator D (n_z-way) fed with [E(x), P(x)].
struct ArchConfig {
    std::string name = "arch_v1";
    int input_dim = feat::kProfileDim;
    int kernel_width = 5;
    std::vector<int> channels = {8, 8, 16, 16, 32, 32, 64, 64};
    std::vector<int> strides = {1, 2, 1, 2, 1, 2, 1, 2};
    int representation_dim = 64;
    std::vector<int> predictor_hidden = {32, 16};
    std::vector<int> discriminator_hidden = {32, 16};

    void validate() const;
    int conv_layer_count() const { return static_cast<int>(channels.size()); }
    // Signal length after the conv stack (with same-padding).
    int conv_output_len() const;
};

struct Standardization {
    std::vector<double> mean;  // per feature
    std::vector<double> std;   // per feature; entries < 1e-9 treated as 1
};

enum class Block { extractor, predictor, discriminator };

struct ModelParams {
    ArchConfig arch;
    int n_z = ban::kControlledMotionCount;
    Standardization standardization;

    std::vector<nn::Tensor> conv_w, conv_b;
    nn::Tensor proj_w, proj_b;
    std::vector<nn::Tensor> p_w, p_b;
    std::vector<nn::Tensor> d_w, d_b;

    struct ParamInfo {
        nn::Tensor* tensor;
        std::string name;
        Block block;
    };
    // Stable enumeration order; parameter ids are indices into this list.
    std::vector<ParamInfo> param_list();
    std::vector<const nn::Tensor*> param_view() const;
};

// Deterministic fan-in-scaled uniform initialization from the seed.
ModelParams build_model(const ArchConfig& arch, int n_z, std::uint64_t seed);

bool same_params(const ModelParams& a, const ModelParams& b);  // bitwise

// One assembled forward graph over a standardized batch.
struct ModelGraph {
    nn::Graph graph;
    nn::Graph::NodeRef x = -1;
    nn::Graph::NodeRef repr = -1;
    nn::Graph::NodeRef p_probs = -1;
    nn::Graph::NodeRef d_probs = -1;
    nn::Graph::NodeRef loss_p = -1;
    nn::Graph::NodeRef loss_d = -1;
    nn::Graph::NodeRef value = -1;  // loss_p - lambda_e * loss_d
    std::vector<nn::Graph::NodeRef> param_nodes;  // aligned with param_list()
};

struct GraphOptions {
    bool params_trainable = true;   // bind parameters as differentiable leaves
    bool build_discriminator = true;
    std::span<const int> y_targets; // empty: no predictor loss
    std::span<const int> z_targets; // empty: no discriminator loss
    double lambda_e = 0.0;          // weight of the adversarial term in `value`
};

// x_std: batch*input_dim standardized features, row-major.
ModelGraph build_graph(ModelParams& model, std::span<const double> x_std,
                       int batch, const GraphOptions& options);

// Standardizes with the model statistics and runs E+P.
// Returns p_on per row.
std::vector<double> predict_batch(const ModelParams& model,
                                  std::span<const double> x_raw, int batch);
double predict(const ModelParams& model, const feat::PropagationProfile& profile);

void standardize(const Standardization& s, std::span<const double> raw,
                 std::span<double> out);

// --- checkpoint file -------------------------------------------------------
//
// Little-endian binary: magic "BACP", u32 version, architecture config,
// n_z, standardization, parameter blobs, trailing CRC-32 of everything
// before it. Round trips are byte-identical.

void save_checkpoint(const ModelParams& model, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

std::uint32_t crc32(std::span<const unsigned char> bytes);

}  // namespace bodyauth::adv
