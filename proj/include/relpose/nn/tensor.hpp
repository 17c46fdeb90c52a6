#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "relpose/errors.hpp"

namespace relpose::nn {

using Shape = std::vector<int>;

std::string shape_str(const Shape& s);

// Dense row-major n-dimensional array of doubles.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape, double fill = 0.0);

    static Tensor zeros_like(const Tensor& t) { return Tensor(t.shape_); }
    static Tensor scalar(double v) { return Tensor(Shape{1}, v); }

    const Shape& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    void fill(double v);
    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

private:
    Shape shape_;
    std::vector<double> data_;
};

class Node;
using NodePtr = std::shared_ptr<Node>;

// One vertex of the reverse-mode differentiation graph. The value is written
// once by the operation that creates the node; gradients accumulate during
// backward().
class Node {
public:
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    std::string name;             // set for parameters
    std::vector<NodePtr> parents;
    std::function<void()> backprop;  // pushes this->grad into parents

    void zero_grad() {
        grad = Tensor::zeros_like(value);
    }
};

NodePtr constant(Tensor value);
NodePtr parameter(Tensor value, std::string name);

// Reverse-mode sweep from a scalar root: topological order, seed gradient 1.
void backward(const NodePtr& root);

}  // namespace relpose::nn
