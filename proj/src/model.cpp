// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#include "model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "common.hpp"
#include "rng.hpp"

namespace bodyauth::adv {

void ArchConfig::validate() const {
    require(input_dim > 0, Errc::invalid_argument, "input_dim must be positive");
    require(kernel_width >= 1 && kernel_width % 2 == 1, Errc::invalid_argument,
            "kernel_width must be odd");
    require(!channels.empty() && channels.size() == strides.size(),
            Errc::invalid_argument, "channels/strides must be non-empty and match");
    for (int c : channels)
        require(c > 0, Errc::invalid_argument, "channel counts must be positive");
    for (int s : strides)
        require(s >= 1, Errc::invalid_argument, "strides must be >= 1");
    require(representation_dim > 0, Errc::invalid_argument,
            "representation_dim must be positive");
    require(conv_output_len() >= 1, Errc::invalid_argument,
            "conv stack reduces the signal to nothing");
}

int ArchConfig::conv_output_len() const {
    int len = input_dim;
    const int pad = kernel_width / 2;
    for (int s : strides) len = (len + 2 * pad - kernel_width) / s + 1;
    return len;
}

std::vector<ModelParams::ParamInfo> ModelParams::param_list() {
    std::vector<ParamInfo> list;
    for (std::size_t i = 0; i < conv_w.size(); ++i) {
        list.push_back({&conv_w[i], "E.conv" + std::to_string(i) + ".w", Block::extractor});
        list.push_back({&conv_b[i], "E.conv" + std::to_string(i) + ".b", Block::extractor});
    }
    list.push_back({&proj_w, "E.proj.w", Block::extractor});
    list.push_back({&proj_b, "E.proj.b", Block::extractor});
    for (std::size_t i = 0; i < p_w.size(); ++i) {
        list.push_back({&p_w[i], "P.fc" + std::to_string(i) + ".w", Block::predictor});
        list.push_back({&p_b[i], "P.fc" + std::to_string(i) + ".b", Block::predictor});
    }
    for (std::size_t i = 0; i < d_w.size(); ++i) {
        list.push_back({&d_w[i], "D.fc" + std::to_string(i) + ".w", Block::discriminator});
        list.push_back({&d_b[i], "D.fc" + std::to_string(i) + ".b", Block::discriminator});
    }
    return list;
}

std::vector<const nn::Tensor*> ModelParams::param_view() const {
    auto& self = const_cast<ModelParams&>(*this);
    std::vector<const nn::Tensor*> view;
    for (const auto& info : self.param_list()) view.push_back(info.tensor);
    return view;
}

namespace {

nn::Tensor init_uniform(std::vector<int> shape, int fan_in, Rng& rng,
                        double scale = 1.0) {
    nn::Tensor t(std::move(shape));
    const double limit = scale * std::sqrt(6.0 / fan_in);
    for (double& v : t.data) v = rng.uniform(-limit, limit);
    return t;
}

std::vector<int> dense_dims(int in_dim, std::span<const int> hidden, int out_dim) {
    std::vector<int> dims;
    dims.push_back(in_dim);
    for (int h : hidden) dims.push_back(h);
    dims.push_back(out_dim);
    return dims;
}

}  // namespace

ModelParams build_model(const ArchConfig& arch, int n_z, std::uint64_t seed) {
    arch.validate();
    require(n_z >= 2, Errc::invalid_argument, "n_z must be >= 2");

    ModelParams m;
    m.arch = arch;
    m.n_z = n_z;
    m.standardization.mean.assign(static_cast<std::size_t>(arch.input_dim), 0.0);
    m.standardization.std.assign(static_cast<std::size_t>(arch.input_dim), 1.0);

    Rng rng(mix_seed(seed, 0xA1CE));
    int cin = 1;
    for (std::size_t layer = 0; layer < arch.channels.size(); ++layer) {
        const int cout = arch.channels[layer];
        m.conv_w.push_back(
            init_uniform({cout, cin, arch.kernel_width}, cin * arch.kernel_width, rng));
        m.conv_b.emplace_back(std::vector<int>{cout});
        cin = cout;
    }
    const int flat = arch.channels.back() * arch.conv_output_len();
    m.proj_w = init_uniform({arch.representation_dim, flat}, flat, rng);
    m.proj_b = nn::Tensor({arch.representation_dim});

    // Output layers start small so fresh predictors and discriminators sit
    // near the uniform distribution.
    const auto p_dims = dense_dims(arch.representation_dim, arch.predictor_hidden, 2);
    for (std::size_t i = 0; i + 1 < p_dims.size(); ++i) {
        const double scale = (i + 2 == p_dims.size()) ? 0.25 : 1.0;
        m.p_w.push_back(init_uniform({p_dims[i + 1], p_dims[i]}, p_dims[i], rng, scale));
        m.p_b.emplace_back(std::vector<int>{p_dims[i + 1]});
    }

    const auto d_dims =
        dense_dims(arch.representation_dim + 2, arch.discriminator_hidden, n_z);
    for (std::size_t i = 0; i + 1 < d_dims.size(); ++i) {
        const double scale = (i + 2 == d_dims.size()) ? 0.25 : 1.0;
        m.d_w.push_back(init_uniform({d_dims[i + 1], d_dims[i]}, d_dims[i], rng, scale));
        m.d_b.emplace_back(std::vector<int>{d_dims[i + 1]});
    }
    return m;
}

bool same_params(const ModelParams& a, const ModelParams& b) {
    const auto va = a.param_view();
    const auto vb = b.param_view();
    if (va.size() != vb.size()) return false;
    for (std::size_t i = 0; i < va.size(); ++i) {
        if (va[i]->shape != vb[i]->shape) return false;
        if (std::memcmp(va[i]->data.data(), vb[i]->data.data(),
                        va[i]->data.size() * sizeof(double)) != 0)
            return false;
    }
    if (a.standardization.mean != b.standardization.mean) return false;
    if (a.standardization.std != b.standardization.std) return false;
    return true;
}

ModelGraph build_graph(ModelParams& model, std::span<const double> x_std,
                       int batch, const GraphOptions& options) {
    const ArchConfig& arch = model.arch;
    require(static_cast<int>(x_std.size()) == batch * arch.input_dim,
            Errc::invalid_argument, "batch size / feature length mismatch");

    ModelGraph mg;
    nn::Graph& g = mg.graph;

    auto bind = [&](nn::Tensor& t) {
        return options.params_trainable ? g.param(t) : g.input(t);
    };

    nn::Tensor x({batch, 1, arch.input_dim});
    std::copy(x_std.begin(), x_std.end(), x.data.begin());
    mg.x = g.input(std::move(x));

    const auto infos = model.param_list();
    mg.param_nodes.resize(infos.size(), -1);
    std::size_t pi = 0;
    auto next_param = [&](nn::Tensor& t) {
        const auto node = bind(t);
        mg.param_nodes[pi++] = node;
        return node;
    };

    // Extractor: conv stack with same-padding, relu between layers, then a
    // linear projection to the representation.
    const int pad = arch.kernel_width / 2;
    nn::Graph::NodeRef h = mg.x;
    for (std::size_t layer = 0; layer < model.conv_w.size(); ++layer) {
        const auto w = next_param(model.conv_w[layer]);
        const auto b = next_param(model.conv_b[layer]);
        h = g.relu(g.conv1d(h, w, b, arch.strides[layer], pad));
    }
    const int flat = arch.channels.back() * arch.conv_output_len();
    h = g.reshape(h, {batch, flat});
    {
        const auto w = next_param(model.proj_w);
        const auto b = next_param(model.proj_b);
        mg.repr = g.dense(h, w, b);
    }

    // Predictor: dense stack, relu on hidden layers, softmax output.
    nn::Graph::NodeRef p = mg.repr;
    for (std::size_t i = 0; i < model.p_w.size(); ++i) {
        const auto w = next_param(model.p_w[i]);
        const auto b = next_param(model.p_b[i]);
        p = g.dense(p, w, b);
        if (i + 1 < model.p_w.size()) p = g.relu(p);
    }
    mg.p_probs = g.softmax(p);

    if (options.build_discriminator) {
        // One-way link from P: D sees the on-off probabilities but its loss
        // never reaches P's parameters.
        nn::Graph::NodeRef d = g.concat(mg.repr, g.stop_gradient(mg.p_probs));
        for (std::size_t i = 0; i < model.d_w.size(); ++i) {
            const auto w = next_param(model.d_w[i]);
            const auto b = next_param(model.d_b[i]);
            d = g.dense(d, w, b);
            if (i + 1 < model.d_w.size()) d = g.relu(d);
        }
        mg.d_probs = g.softmax(d);
    }

    if (!options.y_targets.empty())
        mg.loss_p = g.cross_entropy(mg.p_probs, options.y_targets);
    if (!options.z_targets.empty() && mg.d_probs >= 0)
        mg.loss_d = g.cross_entropy(mg.d_probs, options.z_targets);
    if (mg.loss_p >= 0 && mg.loss_d >= 0)
        mg.value = g.sub(mg.loss_p, g.scale(mg.loss_d, options.lambda_e));
    return mg;
}

void standardize(const Standardization& s, std::span<const double> raw,
                 std::span<double> out) {
    require(raw.size() == out.size() && !s.mean.empty() &&
                raw.size() % s.mean.size() == 0,
            Errc::invalid_argument, "standardization size mismatch");
    const std::size_t dim = s.mean.size();
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const std::size_t f = i % dim;
        const double denom = s.std[f] < 1e-9 ? 1.0 : s.std[f];
        out[i] = (raw[i] - s.mean[f]) / denom;
    }
}

std::vector<double> predict_batch(const ModelParams& model,
                                  std::span<const double> x_raw, int batch) {
    auto& m = const_cast<ModelParams&>(model);
    std::vector<double> x_std(x_raw.size());
    standardize(model.standardization, x_raw, x_std);
    GraphOptions opt;
    opt.params_trainable = false;
    opt.build_discriminator = false;
    ModelGraph mg = build_graph(m, x_std, batch, opt);
    const nn::Tensor& probs = mg.graph.value(mg.p_probs);
    std::vector<double> p_on(static_cast<std::size_t>(batch));
    for (int b = 0; b < batch; ++b)
        p_on[static_cast<std::size_t>(b)] =
            probs.data[static_cast<std::size_t>(b) * 2 +
                       static_cast<std::size_t>(ban::DeviceLabel::on_body)];
    return p_on;
}

double predict(const ModelParams& model, const feat::PropagationProfile& profile) {
    return predict_batch(model, profile.values, 1)[0];
}

// --- checkpoint -------------------------------------------------------------

std::uint32_t crc32(std::span<const unsigned char> bytes) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k)
                c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t c = 0xffffffffu;
    for (unsigned char b : bytes) c = table[(c ^ b) & 0xffu] ^ (c >> 8);
    return c ^ 0xffffffffu;
}

namespace {

constexpr char kMagic[4] = {'B', 'A', 'C', 'P'};
constexpr std::uint32_t kCheckpointVersion = 1;

struct ByteWriter {
    std::string bytes;
    void u32(std::uint32_t v) { bytes.append(reinterpret_cast<const char*>(&v), 4); }
    void f64(double v) { bytes.append(reinterpret_cast<const char*>(&v), 8); }
    void f64s(std::span<const double> v) {
        bytes.append(reinterpret_cast<const char*>(v.data()), v.size() * 8);
    }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes.append(s);
    }
    void ints(std::span<const int> v) {
        u32(static_cast<std::uint32_t>(v.size()));
        for (int i : v) u32(static_cast<std::uint32_t>(i));
    }
};

struct ByteReader {
    std::string bytes;
    std::size_t pos = 0;
    void need(std::size_t n) {
        require(pos + n <= bytes.size(), Errc::corrupt, "checkpoint truncated");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v;
        std::memcpy(&v, bytes.data() + pos, 4);
        pos += 4;
        return v;
    }
    double f64() {
        need(8);
        double v;
        std::memcpy(&v, bytes.data() + pos, 8);
        pos += 8;
        return v;
    }
    void f64s(std::span<double> out) {
        need(out.size() * 8);
        std::memcpy(out.data(), bytes.data() + pos, out.size() * 8);
        pos += out.size() * 8;
    }
    std::string str() {
        const std::uint32_t n = u32();
        need(n);
        std::string s = bytes.substr(pos, n);
        pos += n;
        return s;
    }
    std::vector<int> ints() {
        const std::uint32_t n = u32();
        std::vector<int> v(n);
        for (auto& i : v) i = static_cast<int>(u32());
        return v;
    }
};

}  // namespace

void save_checkpoint(const ModelParams& model, const std::string& path) {
    ByteWriter w;
    w.bytes.append(kMagic, 4);
    w.u32(kCheckpointVersion);

    w.str(model.arch.name);
    w.u32(static_cast<std::uint32_t>(model.arch.input_dim));
    w.u32(static_cast<std::uint32_t>(model.arch.kernel_width));
    w.ints(model.arch.channels);
    w.ints(model.arch.strides);
    w.u32(static_cast<std::uint32_t>(model.arch.representation_dim));
    w.ints(model.arch.predictor_hidden);
    w.ints(model.arch.discriminator_hidden);
    w.u32(static_cast<std::uint32_t>(model.n_z));

    w.u32(static_cast<std::uint32_t>(model.standardization.mean.size()));
    w.f64s(model.standardization.mean);
    w.f64s(model.standardization.std);

    const auto view = model.param_view();
    w.u32(static_cast<std::uint32_t>(view.size()));
    for (std::size_t id = 0; id < view.size(); ++id) {
        w.u32(static_cast<std::uint32_t>(id));
        w.ints(view[id]->shape);
        w.f64s(view[id]->data);
    }

    const std::uint32_t digest = crc32(
        {reinterpret_cast<const unsigned char*>(w.bytes.data()), w.bytes.size()});
    w.u32(digest);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), Errc::io, "cannot open for writing: " + path);
    out.write(w.bytes.data(), static_cast<std::streamsize>(w.bytes.size()));
    require(out.good(), Errc::io, "write failed: " + path);
}

ModelParams load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), Errc::io, "cannot open checkpoint: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();

    ByteReader r;
    r.bytes = buf.str();
    require(r.bytes.size() >= 8, Errc::corrupt, "checkpoint too small");

    const std::uint32_t stored_crc = [&] {
        std::uint32_t v;
        std::memcpy(&v, r.bytes.data() + r.bytes.size() - 4, 4);
        return v;
    }();
    const std::uint32_t actual_crc =
        crc32({reinterpret_cast<const unsigned char*>(r.bytes.data()),
               r.bytes.size() - 4});
    require(stored_crc == actual_crc, Errc::corrupt,
            "checkpoint checksum mismatch (file damaged or truncated)");

    require(std::memcmp(r.bytes.data(), kMagic, 4) == 0, Errc::parse,
            "not a bodyauth checkpoint: " + path);
    r.pos = 4;
    const std::uint32_t version = r.u32();
    require(version == kCheckpointVersion, Errc::format_version,
            "unsupported checkpoint version " + std::to_string(version));

    ArchConfig arch;
    arch.name = r.str();
    arch.input_dim = static_cast<int>(r.u32());
    arch.kernel_width = static_cast<int>(r.u32());
    arch.channels = r.ints();
    arch.strides = r.ints();
    arch.representation_dim = static_cast<int>(r.u32());
    arch.predictor_hidden = r.ints();
    arch.discriminator_hidden = r.ints();
    const int n_z = static_cast<int>(r.u32());

    ModelParams model = build_model(arch, n_z, 0);

    const std::uint32_t dim = r.u32();
    require(dim == static_cast<std::uint32_t>(arch.input_dim), Errc::corrupt,
            "checkpoint standardization dimension mismatch");
    model.standardization.mean.resize(dim);
    model.standardization.std.resize(dim);
    r.f64s(model.standardization.mean);
    r.f64s(model.standardization.std);

    auto infos = model.param_list();
    const std::uint32_t count = r.u32();
    require(count == infos.size(), Errc::corrupt,
            "checkpoint parameter count mismatch");
    for (std::size_t id = 0; id < infos.size(); ++id) {
        const std::uint32_t stored_id = r.u32();
        require(stored_id == id, Errc::corrupt, "checkpoint parameter id mismatch");
        const auto shape = r.ints();
        require(shape == infos[id].tensor->shape, Errc::corrupt,
                "checkpoint parameter shape mismatch for " + infos[id].name);
        r.f64s(infos[id].tensor->data);
    }
    require(r.pos + 4 == r.bytes.size(), Errc::corrupt,
            "checkpoint has trailing bytes");
    return model;
}

}  // namespace bodyauth::adv
