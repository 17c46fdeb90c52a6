#include "relpose/nn/tensor.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace relpose::nn {

std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) os << 'x';
        os << s[i];
    }
    os << ']';
    return os.str();
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
    std::size_t n = 1;
    for (int d : shape_) {
        if (d <= 0) throw ShapeMismatch("nnet: non-positive tensor extent in " + shape_str(shape_));
        n *= static_cast<std::size_t>(d);
    }
    data_.assign(n, fill);
}

void Tensor::fill(double v) {
    std::fill(data_.begin(), data_.end(), v);
}

NodePtr constant(Tensor value) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    return n;
}

NodePtr parameter(Tensor value, std::string name) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->requires_grad = true;
    n->name = std::move(name);
    return n;
}

void backward(const NodePtr& root) {
    if (root->value.size() != 1)
        throw ShapeMismatch("nnet: backward requires a scalar root, got " +
                            shape_str(root->value.shape()));

    // Iterative post-order DFS over parents.
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, std::size_t>> stack{{root.get(), 0}};
    visited.insert(root.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* p = node->parents[next++].get();
            if (visited.insert(p).second) stack.emplace_back(p, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    for (Node* n : order) n->zero_grad();
    root->grad[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        if ((*it)->backprop) (*it)->backprop();
}

}  // namespace relpose::nn
