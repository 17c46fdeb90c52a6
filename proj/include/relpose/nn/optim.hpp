#pragma once

#include <span>

#include "relpose/nn/tensor.hpp"

namespace relpose::nn {

// Adam with bias correction and decoupled weight decay
// (param -= lr * wd * param, applied independently of the moment update).
// Throws NonFiniteGradient when any gradient entry is not finite.
class Adam {
public:
    struct Config {
        double lr = 1e-4;
        double weight_decay = 1e-5;
        double beta1 = 0.9;
        double beta2 = 0.999;
        double eps = 1e-8;
    };

    Adam() = default;
    explicit Adam(const Config& cfg) : cfg_(cfg) {}

    const Config& config() const { return cfg_; }
    long steps_taken() const { return step_; }

    void step(std::span<const NodePtr> params);

private:
    Config cfg_;
    long step_ = 0;
    std::vector<Tensor> m_, v_;
};

// Plain SGD with the same decoupled weight decay convention.
class Sgd {
public:
    struct Config {
        double lr = 1e-4;
        double weight_decay = 1e-5;
    };

    Sgd() = default;
    explicit Sgd(const Config& cfg) : cfg_(cfg) {}

    void step(std::span<const NodePtr> params);

private:
    Config cfg_;
};

}  // namespace relpose::nn
