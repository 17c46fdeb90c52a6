#include "relpose/nn/optim.hpp"

#include <cmath>

namespace relpose::nn {

namespace {

void check_finite(const NodePtr& param) {
    const double* g = param->grad.data();
    for (std::size_t i = 0; i < param->grad.size(); ++i)
        if (!std::isfinite(g[i]))
            throw NonFiniteGradient("nnet: non-finite gradient in parameter '" + param->name + "'");
}

}  // namespace

void Adam::step(std::span<const NodePtr> params) {
    if (m_.empty()) {
        for (const NodePtr& p : params) {
            m_.push_back(Tensor::zeros_like(p->value));
            v_.push_back(Tensor::zeros_like(p->value));
        }
    }
    if (m_.size() != params.size())
        throw ShapeMismatch("nnet: optimizer state does not match parameter list");

    ++step_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, step_);
    const double bc2 = 1.0 - std::pow(cfg_.beta2, step_);

    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        const NodePtr& p = params[pi];
        if (!p->grad.same_shape(p->value))
            throw ShapeMismatch("nnet: gradient missing for parameter '" + p->name + "'");
        check_finite(p);

        double* value = p->value.data();
        const double* grad = p->grad.data();
        double* m = m_[pi].data();
        double* v = v_[pi].data();
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * grad[i];
            v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            const double pre = value[i];
            value[i] = pre - cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps)
                           - cfg_.lr * cfg_.weight_decay * pre;
        }
    }
}

void Sgd::step(std::span<const NodePtr> params) {
    for (const NodePtr& p : params) {
        if (!p->grad.same_shape(p->value))
            throw ShapeMismatch("nnet: gradient missing for parameter '" + p->name + "'");
        check_finite(p);
        double* value = p->value.data();
        const double* grad = p->grad.data();
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            const double pre = value[i];
            value[i] = pre - cfg_.lr * grad[i] - cfg_.lr * cfg_.weight_decay * pre;
        }
    }
}

}  // namespace relpose::nn
