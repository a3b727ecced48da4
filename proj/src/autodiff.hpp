// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace bodyauth::nn {

// Dense double-precision tensor; row-major, shape up to rank 3.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<int> s, double fill = 0.0);

    int size() const { return static_cast<int>(data.size()); }
    int dim(std::size_t i) const { return shape[i]; }
    int rank() const { return static_cast<int>(shape.size()); }
    bool same_shape(const Tensor& other) const { return shape == other.shape; }
    bool all_finite() const;
};

// Eager tape: node values are computed at creation; backward() runs the
// reverse sweep over the tape in reverse creation order (which is a valid
// reverse topological order by construction).
class Graph {
public:
    using NodeRef = int;

    NodeRef input(Tensor value);              // leaf without gradient
    NodeRef param(Tensor value);              // leaf with gradient

    // (B, Cin, L) x (Cout, Cin, K) -> (B, Cout, Lout); cross-correlation
    // with zero padding, Lout = (L + 2*pad - K)/stride + 1.
    NodeRef conv1d(NodeRef x, NodeRef w, NodeRef bias, int stride, int pad);
    // (B, F) x (O, F) + (O) -> (B, O)
    NodeRef dense(NodeRef x, NodeRef w, NodeRef bias);
    NodeRef relu(NodeRef x);
    NodeRef softmax(NodeRef x);               // rows of (B, K), max-subtracted
    NodeRef concat(NodeRef a, NodeRef b);     // along axis 1 of (B, *)
    NodeRef reshape(NodeRef x, std::vector<int> shape);
    NodeRef stop_gradient(NodeRef x);         // identity forward, blocks grads
    // Mean over the batch of -log p[target]; probabilities are clamped at
    // 1e-12 (clamp events are counted, see clamp_count()).
    NodeRef cross_entropy(NodeRef probs, std::span<const int> targets);
    NodeRef add(NodeRef a, NodeRef b);
    NodeRef mul(NodeRef a, NodeRef b);        // elementwise
    NodeRef scale(NodeRef a, double k);
    NodeRef sub(NodeRef a, NodeRef b);        // scalar or same-shape

    const Tensor& value(NodeRef n) const { return nodes_[static_cast<std::size_t>(n)].value; }
    const Tensor& grad(NodeRef n) const { return nodes_[static_cast<std::size_t>(n)].grad; }
    double scalar(NodeRef n) const { return value(n).data[0]; }

    // Reverse sweep seeded with d(loss)/d(loss) = 1. Clears previous grads.
    void backward(NodeRef loss);

    std::int64_t clamp_count() const { return clamp_count_; }

private:
    enum class Op {
        leaf,
        conv1d,
        dense,
        relu,
        softmax,
        concat,
        reshape,
        stop_gradient,
        cross_entropy,
        add,
        mul,
        scale,
        sub,
    };

    struct Node {
        Op op = Op::leaf;
        bool needs_grad = false;
        Tensor value;
        Tensor grad;
        NodeRef a = -1, b = -1, c = -1;   // inputs
        int stride = 1, pad = 0;
        double k = 0.0;
        std::vector<int> targets;         // cross_entropy only
    };

    NodeRef push(Node node);
    void backward_node(Node& node);

    std::vector<Node> nodes_;
    std::int64_t clamp_count_ = 0;
};

// Max relative error between analytic gradients and central finite
// differences (h = 1e-5) of `f` at `point`. `f` must be a pure function.
double grad_check(const std::function<double(std::span<const double>)>& f,
                  std::span<const double> point,
                  std::span<const double> analytic_grad, double h = 1e-5);

// In-place SGD with classical momentum:
//   velocity = momentum * velocity - lr * grad;  param += velocity.
// Throws Errc::numeric on non-finite gradients, naming the parameter.
void sgd_step(Tensor& param, const Tensor& grad, Tensor& velocity, double lr,
              double momentum, const char* param_name);

}  // namespace bodyauth::nn
