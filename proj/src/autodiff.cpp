// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#include "autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "common.hpp"

namespace bodyauth::nn {

Tensor::Tensor(std::vector<int> s, double fill) : shape(std::move(s)) {
    std::size_t n = 1;
    for (int d : shape) {
        require(d > 0, Errc::invalid_argument, "tensor dimensions must be positive");
        n *= static_cast<std::size_t>(d);
    }
    data.assign(n, fill);
}

bool Tensor::all_finite() const {
    return std::all_of(data.begin(), data.end(),
                       [](double v) { return std::isfinite(v); });
}

Graph::NodeRef Graph::push(Node node) {
    nodes_.push_back(std::move(node));
    return static_cast<NodeRef>(nodes_.size() - 1);
}

Graph::NodeRef Graph::input(Tensor value) {
    Node n;
    n.op = Op::leaf;
    n.needs_grad = false;
    n.value = std::move(value);
    return push(std::move(n));
}

Graph::NodeRef Graph::param(Tensor value) {
    Node n;
    n.op = Op::leaf;
    n.needs_grad = true;
    n.value = std::move(value);
    return push(std::move(n));
}

namespace {

void check_rank(const Tensor& t, int rank, const char* what) {
    require(t.rank() == rank, Errc::invalid_argument,
            std::string(what) + ": unexpected tensor rank");
}

}  // namespace

Graph::NodeRef Graph::conv1d(NodeRef x, NodeRef w, NodeRef bias, int stride,
                             int pad) {
    const Tensor& xv = value(x);
    const Tensor& wv = value(w);
    const Tensor& bv = value(bias);
    check_rank(xv, 3, "conv1d input");
    check_rank(wv, 3, "conv1d kernel");
    check_rank(bv, 1, "conv1d bias");
    const int batch = xv.dim(0), cin = xv.dim(1), len = xv.dim(2);
    const int cout = wv.dim(0), k = wv.dim(2);
    require(wv.dim(1) == cin, Errc::invalid_argument,
            "conv1d kernel channel mismatch");
    require(bv.dim(0) == cout, Errc::invalid_argument, "conv1d bias mismatch");
    require(stride >= 1 && pad >= 0, Errc::invalid_argument,
            "conv1d stride/pad out of range");
    const int lout = (len + 2 * pad - k) / stride + 1;
    require(lout >= 1, Errc::invalid_argument, "conv1d output would be empty");

    Node n;
    n.op = Op::conv1d;
    n.a = x;
    n.b = w;
    n.c = bias;
    n.stride = stride;
    n.pad = pad;
    n.needs_grad = nodes_[static_cast<std::size_t>(x)].needs_grad ||
                   nodes_[static_cast<std::size_t>(w)].needs_grad ||
                   nodes_[static_cast<std::size_t>(bias)].needs_grad;
    n.value = Tensor({batch, cout, lout});

    for (int b = 0; b < batch; ++b) {
        for (int co = 0; co < cout; ++co) {
            double* out =
                n.value.data.data() + (static_cast<std::size_t>(b) * cout + co) * lout;
            const double bias_v = bv.data[static_cast<std::size_t>(co)];
            for (int i = 0; i < lout; ++i) out[i] = bias_v;
            for (int ci = 0; ci < cin; ++ci) {
                const double* xp =
                    xv.data.data() + (static_cast<std::size_t>(b) * cin + ci) * len;
                const double* wp =
                    wv.data.data() + (static_cast<std::size_t>(co) * cin + ci) * k;
                for (int kk = 0; kk < k; ++kk) {
                    const double weight = wp[kk];
                    if (weight == 0.0) continue;
                    const int off = kk - pad;
                    const int n_lo = off >= 0 ? 0 : (-off + stride - 1) / stride;
                    const int n_hi = std::min(lout - 1, (len - 1 - off) / stride);
                    const double* src = xp + (n_lo * stride + off);
                    double* dst = out + n_lo;
                    const int cnt = n_hi - n_lo + 1;
                    if (stride == 1) {
                        for (int i = 0; i < cnt; ++i) dst[i] += weight * src[i];
                    } else {
                        for (int i = 0; i < cnt; ++i) dst[i] += weight * src[i * stride];
                    }
                }
            }
        }
    }
    return push(std::move(n));
}

Graph::NodeRef Graph::dense(NodeRef x, NodeRef w, NodeRef bias) {
    const Tensor& xv = value(x);
    const Tensor& wv = value(w);
    const Tensor& bv = value(bias);
    check_rank(xv, 2, "dense input");
    check_rank(wv, 2, "dense weights");
    check_rank(bv, 1, "dense bias");
    const int batch = xv.dim(0), feat = xv.dim(1), out_dim = wv.dim(0);
    require(wv.dim(1) == feat, Errc::invalid_argument, "dense shape mismatch");
    require(bv.dim(0) == out_dim, Errc::invalid_argument, "dense bias mismatch");

    Node n;
    n.op = Op::dense;
    n.a = x;
    n.b = w;
    n.c = bias;
    n.needs_grad = nodes_[static_cast<std::size_t>(x)].needs_grad ||
                   nodes_[static_cast<std::size_t>(w)].needs_grad ||
                   nodes_[static_cast<std::size_t>(bias)].needs_grad;
    n.value = Tensor({batch, out_dim});
    for (int b = 0; b < batch; ++b) {
        const double* xp = xv.data.data() + static_cast<std::size_t>(b) * feat;
        double* yp = n.value.data.data() + static_cast<std::size_t>(b) * out_dim;
        for (int o = 0; o < out_dim; ++o) {
            const double* wp = wv.data.data() + static_cast<std::size_t>(o) * feat;
            double acc = bv.data[static_cast<std::size_t>(o)];
            for (int f = 0; f < feat; ++f) acc += xp[f] * wp[f];
            yp[o] = acc;
        }
    }
    return push(std::move(n));
}

Graph::NodeRef Graph::relu(NodeRef x) {
    Node n;
    n.op = Op::relu;
    n.a = x;
    n.needs_grad = nodes_[static_cast<std::size_t>(x)].needs_grad;
    n.value = value(x);
    for (double& v : n.value.data) v = v > 0.0 ? v : 0.0;
    return push(std::move(n));
}

Graph::NodeRef Graph::softmax(NodeRef x) {
    const Tensor& xv = value(x);
    check_rank(xv, 2, "softmax input");
    Node n;
    n.op = Op::softmax;
    n.a = x;
    n.needs_grad = nodes_[static_cast<std::size_t>(x)].needs_grad;
    n.value = xv;
    const int batch = xv.dim(0), k = xv.dim(1);
    for (int b = 0; b < batch; ++b) {
        double* row = n.value.data.data() + static_cast<std::size_t>(b) * k;
        const double m = *std::max_element(row, row + k);
        double sum = 0.0;
        for (int i = 0; i < k; ++i) {
            row[i] = std::exp(row[i] - m);
            sum += row[i];
        }
        for (int i = 0; i < k; ++i) row[i] /= sum;
    }
    return push(std::move(n));
}

Graph::NodeRef Graph::concat(NodeRef a, NodeRef b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    check_rank(av, 2, "concat lhs");
    check_rank(bv, 2, "concat rhs");
    require(av.dim(0) == bv.dim(0), Errc::invalid_argument,
            "concat batch mismatch");
    const int batch = av.dim(0), fa = av.dim(1), fb = bv.dim(1);
    Node n;
    n.op = Op::concat;
    n.a = a;
    n.b = b;
    n.needs_grad = nodes_[static_cast<std::size_t>(a)].needs_grad ||
                   nodes_[static_cast<std::size_t>(b)].needs_grad;
    n.value = Tensor({batch, fa + fb});
    for (int i = 0; i < batch; ++i) {
        std::copy_n(av.data.data() + static_cast<std::size_t>(i) * fa, fa,
                    n.value.data.data() + static_cast<std::size_t>(i) * (fa + fb));
        std::copy_n(bv.data.data() + static_cast<std::size_t>(i) * fb, fb,
                    n.value.data.data() + static_cast<std::size_t>(i) * (fa + fb) + fa);
    }
    return push(std::move(n));
}

Graph::NodeRef Graph::reshape(NodeRef x, std::vector<int> shape) {
    const Tensor& xv = value(x);
    std::size_t n_elems = 1;
    for (int d : shape) n_elems *= static_cast<std::size_t>(d);
    require(n_elems == xv.data.size(), Errc::invalid_argument,
            "reshape element count mismatch");
    Node n;
    n.op = Op::reshape;
    n.a = x;
    n.needs_grad = nodes_[static_cast<std::size_t>(x)].needs_grad;
    n.value.shape = std::move(shape);
    n.value.data = xv.data;
    return push(std::move(n));
}

Graph::NodeRef Graph::stop_gradient(NodeRef x) {
    Node n;
    n.op = Op::stop_gradient;
    n.a = x;
    n.needs_grad = false;  // forward identity; blocks the reverse sweep
    n.value = value(x);
    return push(std::move(n));
}

Graph::NodeRef Graph::cross_entropy(NodeRef probs, std::span<const int> targets) {
    const Tensor& pv = value(probs);
    check_rank(pv, 2, "cross_entropy probabilities");
    const int batch = pv.dim(0), k = pv.dim(1);
    require(static_cast<int>(targets.size()) == batch, Errc::invalid_argument,
            "cross_entropy target count mismatch");
    Node n;
    n.op = Op::cross_entropy;
    n.a = probs;
    n.needs_grad = nodes_[static_cast<std::size_t>(probs)].needs_grad;
    n.targets.assign(targets.begin(), targets.end());
    double loss = 0.0;
    for (int b = 0; b < batch; ++b) {
        const int t = n.targets[static_cast<std::size_t>(b)];
        require(t >= 0 && t < k, Errc::invalid_argument,
                "cross_entropy target out of range");
        double p = pv.data[static_cast<std::size_t>(b) * k + t];
        if (p < 1e-12) {
            p = 1e-12;
            ++clamp_count_;
        }
        loss -= std::log(p);
    }
    n.value = Tensor({1});
    n.value.data[0] = loss / batch;
    return push(std::move(n));
}

Graph::NodeRef Graph::add(NodeRef a, NodeRef b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require(av.same_shape(bv), Errc::invalid_argument, "add shape mismatch");
    Node n;
    n.op = Op::add;
    n.a = a;
    n.b = b;
    n.needs_grad = nodes_[static_cast<std::size_t>(a)].needs_grad ||
                   nodes_[static_cast<std::size_t>(b)].needs_grad;
    n.value = av;
    for (std::size_t i = 0; i < n.value.data.size(); ++i)
        n.value.data[i] += bv.data[i];
    return push(std::move(n));
}

Graph::NodeRef Graph::mul(NodeRef a, NodeRef b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require(av.same_shape(bv), Errc::invalid_argument, "mul shape mismatch");
    Node n;
    n.op = Op::mul;
    n.a = a;
    n.b = b;
    n.needs_grad = nodes_[static_cast<std::size_t>(a)].needs_grad ||
                   nodes_[static_cast<std::size_t>(b)].needs_grad;
    n.value = av;
    for (std::size_t i = 0; i < n.value.data.size(); ++i)
        n.value.data[i] *= bv.data[i];
    return push(std::move(n));
}

Graph::NodeRef Graph::sub(NodeRef a, NodeRef b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require(av.same_shape(bv), Errc::invalid_argument, "sub shape mismatch");
    Node n;
    n.op = Op::sub;
    n.a = a;
    n.b = b;
    n.needs_grad = nodes_[static_cast<std::size_t>(a)].needs_grad ||
                   nodes_[static_cast<std::size_t>(b)].needs_grad;
    n.value = av;
    for (std::size_t i = 0; i < n.value.data.size(); ++i)
        n.value.data[i] -= bv.data[i];
    return push(std::move(n));
}

Graph::NodeRef Graph::scale(NodeRef a, double k) {
    Node n;
    n.op = Op::scale;
    n.a = a;
    n.k = k;
    n.needs_grad = nodes_[static_cast<std::size_t>(a)].needs_grad;
    n.value = value(a);
    for (double& v : n.value.data) v *= k;
    return push(std::move(n));
}

void Graph::backward(NodeRef loss) {
    require(value(loss).size() == 1, Errc::invalid_argument,
            "backward expects a scalar loss node");
    for (Node& n : nodes_) {
        if (n.needs_grad)
            n.grad = Tensor(n.value.shape);
        else
            n.grad = Tensor();
    }
    Node& top = nodes_[static_cast<std::size_t>(loss)];
    if (!top.needs_grad) return;  // loss does not depend on any parameter
    top.grad.data[0] = 1.0;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        if (nodes_[i].needs_grad) backward_node(nodes_[i]);
    }
}

void Graph::backward_node(Node& node) {
    auto grad_of = [&](NodeRef r) -> Tensor* {
        Node& n = nodes_[static_cast<std::size_t>(r)];
        return n.needs_grad ? &n.grad : nullptr;
    };
    const Tensor& g = node.grad;

    switch (node.op) {
        case Op::leaf:
        case Op::stop_gradient:
            return;
        case Op::conv1d: {
            const Tensor& xv = value(node.a);
            const Tensor& wv = value(node.b);
            Tensor* gx = grad_of(node.a);
            Tensor* gw = grad_of(node.b);
            Tensor* gb = grad_of(node.c);
            const int batch = xv.dim(0), cin = xv.dim(1), len = xv.dim(2);
            const int cout = wv.dim(0), k = wv.dim(2);
            const int lout = node.value.dim(2);
            const int stride = node.stride, pad = node.pad;
            for (int b = 0; b < batch; ++b) {
                for (int co = 0; co < cout; ++co) {
                    const double* go =
                        g.data.data() + (static_cast<std::size_t>(b) * cout + co) * lout;
                    if (gb) {
                        double acc = 0.0;
                        for (int i = 0; i < lout; ++i) acc += go[i];
                        gb->data[static_cast<std::size_t>(co)] += acc;
                    }
                    for (int ci = 0; ci < cin; ++ci) {
                        const double* xp =
                            xv.data.data() + (static_cast<std::size_t>(b) * cin + ci) * len;
                        const double* wp =
                            wv.data.data() + (static_cast<std::size_t>(co) * cin + ci) * k;
                        double* gxp =
                            gx ? gx->data.data() +
                                     (static_cast<std::size_t>(b) * cin + ci) * len
                               : nullptr;
                        double* gwp =
                            gw ? gw->data.data() +
                                     (static_cast<std::size_t>(co) * cin + ci) * k
                               : nullptr;
                        for (int kk = 0; kk < k; ++kk) {
                            const int off = kk - pad;
                            const int n_lo = off >= 0 ? 0 : (-off + stride - 1) / stride;
                            const int n_hi = std::min(lout - 1, (len - 1 - off) / stride);
                            const int cnt = n_hi - n_lo + 1;
                            if (cnt <= 0) continue;
                            const double* gsrc = go + n_lo;
                            const int base = n_lo * stride + off;
                            if (gwp) {
                                const double* xsrc = xp + base;
                                double acc = 0.0;
                                if (stride == 1) {
                                    for (int i = 0; i < cnt; ++i) acc += gsrc[i] * xsrc[i];
                                } else {
                                    for (int i = 0; i < cnt; ++i)
                                        acc += gsrc[i] * xsrc[i * stride];
                                }
                                gwp[kk] += acc;
                            }
                            if (gxp) {
                                const double weight = wp[kk];
                                double* xdst = gxp + base;
                                if (stride == 1) {
                                    for (int i = 0; i < cnt; ++i) xdst[i] += weight * gsrc[i];
                                } else {
                                    for (int i = 0; i < cnt; ++i)
                                        xdst[i * stride] += weight * gsrc[i];
                                }
                            }
                        }
                    }
                }
            }
            return;
        }
        case Op::dense: {
            const Tensor& xv = value(node.a);
            const Tensor& wv = value(node.b);
            Tensor* gx = grad_of(node.a);
            Tensor* gw = grad_of(node.b);
            Tensor* gb = grad_of(node.c);
            const int batch = xv.dim(0), feat = xv.dim(1), out_dim = wv.dim(0);
            for (int b = 0; b < batch; ++b) {
                const double* gp = g.data.data() + static_cast<std::size_t>(b) * out_dim;
                const double* xp = xv.data.data() + static_cast<std::size_t>(b) * feat;
                double* gxp =
                    gx ? gx->data.data() + static_cast<std::size_t>(b) * feat : nullptr;
                for (int o = 0; o < out_dim; ++o) {
                    const double go = gp[o];
                    if (go == 0.0) continue;
                    const double* wp = wv.data.data() + static_cast<std::size_t>(o) * feat;
                    if (gxp)
                        for (int f = 0; f < feat; ++f) gxp[f] += go * wp[f];
                    if (gw) {
                        double* gwp =
                            gw->data.data() + static_cast<std::size_t>(o) * feat;
                        for (int f = 0; f < feat; ++f) gwp[f] += go * xp[f];
                    }
                    if (gb) gb->data[static_cast<std::size_t>(o)] += go;
                }
            }
            return;
        }
        case Op::relu: {
            Tensor* gx = grad_of(node.a);
            if (!gx) return;
            const Tensor& xv = value(node.a);
            for (std::size_t i = 0; i < g.data.size(); ++i)
                if (xv.data[i] > 0.0) gx->data[i] += g.data[i];
            return;
        }
        case Op::softmax: {
            Tensor* gx = grad_of(node.a);
            if (!gx) return;
            const int batch = node.value.dim(0), k = node.value.dim(1);
            for (int b = 0; b < batch; ++b) {
                const double* y =
                    node.value.data.data() + static_cast<std::size_t>(b) * k;
                const double* gy = g.data.data() + static_cast<std::size_t>(b) * k;
                double dot = 0.0;
                for (int i = 0; i < k; ++i) dot += gy[i] * y[i];
                double* gxp = gx->data.data() + static_cast<std::size_t>(b) * k;
                for (int i = 0; i < k; ++i) gxp[i] += y[i] * (gy[i] - dot);
            }
            return;
        }
        case Op::concat: {
            Tensor* ga = grad_of(node.a);
            Tensor* gb = grad_of(node.b);
            const int batch = node.value.dim(0);
            const int fa = value(node.a).dim(1), fb = value(node.b).dim(1);
            for (int i = 0; i < batch; ++i) {
                const double* gp =
                    g.data.data() + static_cast<std::size_t>(i) * (fa + fb);
                if (ga)
                    for (int f = 0; f < fa; ++f)
                        ga->data[static_cast<std::size_t>(i) * fa + f] += gp[f];
                if (gb)
                    for (int f = 0; f < fb; ++f)
                        gb->data[static_cast<std::size_t>(i) * fb + f] += gp[fa + f];
            }
            return;
        }
        case Op::reshape: {
            Tensor* gx = grad_of(node.a);
            if (!gx) return;
            for (std::size_t i = 0; i < g.data.size(); ++i) gx->data[i] += g.data[i];
            return;
        }
        case Op::cross_entropy: {
            Tensor* gp = grad_of(node.a);
            if (!gp) return;
            const Tensor& pv = value(node.a);
            const int batch = pv.dim(0), k = pv.dim(1);
            const double go = g.data[0];
            for (int b = 0; b < batch; ++b) {
                const int t = node.targets[static_cast<std::size_t>(b)];
                const double p = pv.data[static_cast<std::size_t>(b) * k + t];
                if (p < 1e-12) continue;  // clamped region: flat
                gp->data[static_cast<std::size_t>(b) * k + t] -= go / (batch * p);
            }
            return;
        }
        case Op::add: {
            Tensor* ga = grad_of(node.a);
            Tensor* gb = grad_of(node.b);
            for (std::size_t i = 0; i < g.data.size(); ++i) {
                if (ga) ga->data[i] += g.data[i];
                if (gb) gb->data[i] += g.data[i];
            }
            return;
        }
        case Op::mul: {
            Tensor* ga = grad_of(node.a);
            Tensor* gb = grad_of(node.b);
            const Tensor& av = value(node.a);
            const Tensor& bv = value(node.b);
            for (std::size_t i = 0; i < g.data.size(); ++i) {
                if (ga) ga->data[i] += g.data[i] * bv.data[i];
                if (gb) gb->data[i] += g.data[i] * av.data[i];
            }
            return;
        }
        case Op::sub: {
            Tensor* ga = grad_of(node.a);
            Tensor* gb = grad_of(node.b);
            for (std::size_t i = 0; i < g.data.size(); ++i) {
                if (ga) ga->data[i] += g.data[i];
                if (gb) gb->data[i] -= g.data[i];
            }
            return;
        }
        case Op::scale: {
            Tensor* ga = grad_of(node.a);
            if (!ga) return;
            for (std::size_t i = 0; i < g.data.size(); ++i)
                ga->data[i] += node.k * g.data[i];
            return;
        }
    }
}

double grad_check(const std::function<double(std::span<const double>)>& f,
                  std::span<const double> point,
                  std::span<const double> analytic_grad, double h) {
    require(point.size() == analytic_grad.size(), Errc::invalid_argument,
            "grad_check size mismatch");
    std::vector<double> x(point.begin(), point.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double saved = x[i];
        x[i] = saved + h;
        const double fp = f(x);
        x[i] = saved - h;
        const double fm = f(x);
        x[i] = saved;
        const double fd = (fp - fm) / (2.0 * h);
        const double denom = std::max(std::abs(fd) + std::abs(analytic_grad[i]), 1e-8);
        worst = std::max(worst, std::abs(fd - analytic_grad[i]) / denom);
    }
    return worst;
}

void sgd_step(Tensor& param, const Tensor& grad, Tensor& velocity, double lr,
              double momentum, const char* param_name) {
    require(param.same_shape(grad), Errc::invalid_argument,
            "sgd_step shape mismatch");
    if (velocity.data.empty()) velocity = Tensor(param.shape);
    for (std::size_t i = 0; i < param.data.size(); ++i) {
        const double gi = grad.data[i];
        if (!std::isfinite(gi))
            fail(Errc::numeric, std::string("non-finite gradient in parameter ") +
                                    param_name);
        velocity.data[i] = momentum * velocity.data[i] - lr * gi;
        param.data[i] += velocity.data[i];
    }
}

}  // namespace bodyauth::nn
