#pragma once

#include "relpose/nn/tensor.hpp"

namespace relpose::nn {

// Convolution block parameters: `filters` output channels, square `kernel`,
// stride and zero padding.
struct ConvSpec {
    int filters = 1;
    int kernel = 1;
    int stride = 1;
    int pad = 0;
};

struct PoolSpec {
    int window = 1;
    int stride = 1;
};

// Pyramid level bin counts, strictly increasing (coarse to fine).
struct SppSpec {
    std::vector<int> levels;

    // Output bins per channel: sum of n^2 over levels.
    int bins_per_channel() const;
};

// floor((extent + 2*pad - window)/stride) + 1
int conv_output_extent(int extent, int window, int stride, int pad);

// Per-axis SPP window geometry for an n-bin level over `extent` cells:
// window = ceil(extent/n), stride = floor(extent/n), origin i*stride.
struct SppWindow {
    int origin = 0;
    int size = 0;
};
SppWindow spp_window(int extent, int bins, int index);

// x: [N,Cin,H,W], weights: [Cout,Cin,k,k], bias: [Cout] -> [N,Cout,Ho,Wo]
NodePtr conv2d(const NodePtr& x, const NodePtr& weights, const NodePtr& bias,
               const ConvSpec& spec);

// x: [N,C,H,W] -> [N,C,Ho,Wo]; argmax ties go to the first element in
// row-major scan order.
NodePtr maxpool2d(const NodePtr& x, const PoolSpec& spec);

NodePtr relu(const NodePtr& x);

// x: [N,D], weights: [O,D], bias: [O] -> [N,O]
NodePtr linear(const NodePtr& x, const NodePtr& weights, const NodePtr& bias);

// Concatenation along axis 1 (features/channels). Inputs must agree on every
// other axis.
NodePtr concat(const NodePtr& a, const NodePtr& b);

// [N, ...] -> [N, product of trailing extents]
NodePtr flatten_rows(const NodePtr& x);

// x: [N,C,H,W] -> [N, C * bins_per_channel], levels concatenated coarse to
// fine, channel-major within a level. Throws InputTooSmall when a spatial
// extent is below the largest level.
NodePtr spp(const NodePtr& x, const SppSpec& spec);

// Plain (non-squared) Euclidean norm of pred - target over all elements.
// Gradient is 0 when the norm is below 1e-12.
NodePtr euclidean_loss(const NodePtr& pred, const NodePtr& target);

// Pose regression loss over a batch of 7-vectors [q(4) | t(3)]:
//   mean_i( ||t_i - t*_i|| + beta * ||q_i - q*_i|| ).
// Gradients flow to pred only.
NodePtr pair_pose_loss(const NodePtr& pred, const NodePtr& target, double beta);

}  // namespace relpose::nn
