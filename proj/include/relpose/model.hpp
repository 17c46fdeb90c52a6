#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "relpose/geom.hpp"
#include "relpose/image.hpp"
#include "relpose/nn/ops.hpp"

namespace relpose {

// Branch layer stack plus head configuration for the Siamese regressor.
// Presets: cnnA, cnnB (fixed 227 input), cnnAspp, cnnBspp (SPP, variable
// input) and tiny (64, SPP, desk scale).
struct ModelConfig {
    std::string name;
    int input_channels = 3;
    int input_size = 227;  // declared size; a lower bound when SPP is present
    std::vector<std::variant<nn::ConvSpec, nn::PoolSpec>> layers;
    std::optional<nn::SppSpec> spp;
    double beta = 10.0;

    bool variable_input() const { return spp.has_value(); }

    // Channels and spatial extent of the branch feature map for a given
    // square input, before SPP/flatten. Throws ConfigInvalid if some layer
    // cannot run at this size.
    struct MapShape {
        int channels = 0;
        int extent = 0;
    };
    MapShape feature_map(int input_size_px) const;

    // Flattened branch output length at the declared input size.
    int branch_feature_length() const;

    static ModelConfig preset(const std::string& name);
    static const std::vector<std::string>& preset_names();
};

// Two identical branches with shared parameter storage feeding two affine
// heads: 4 outputs for the orientation quaternion, 3 for the translation
// direction. No normalization during training; predict() normalizes.
class SiameseModel {
public:
    SiameseModel(ModelConfig cfg, std::uint64_t seed);

    const ModelConfig& config() const { return cfg_; }

    // Branch parameters followed by head parameters, in container order.
    const std::vector<nn::NodePtr>& parameters() const { return params_; }

    // Raw 7-vector head output [q(4) | t(3)] per batch row, no normalization.
    nn::NodePtr forward_pair(const nn::NodePtr& img1, const nn::NodePtr& img2) const;

    RelativePose predict(const Image& img1, const Image& img2) const;
    RelativePose predict(const nn::Tensor& img1, const nn::Tensor& img2) const;

    void save(const std::string& path) const;
    void load(const std::string& path);

private:
    nn::NodePtr branch(const nn::NodePtr& x) const;

    ModelConfig cfg_;
    std::vector<nn::NodePtr> conv_weights_, conv_biases_;  // one per conv layer
    nn::NodePtr fc_q_weight_, fc_q_bias_, fc_t_weight_, fc_t_bias_;
    std::vector<nn::NodePtr> params_;
};

// Eq-style pose loss on a raw batch prediction: mean over rows of
// ||t - t*|| + beta * ||q - q*||. Gradients flow to pred only.
nn::NodePtr pose_loss(const nn::NodePtr& pred, const nn::NodePtr& target, double beta);

// Normalizes a raw 7-vector into a RelativePose (unit, canonical quaternion;
// unit translation direction).
RelativePose normalize_prediction(const double raw[7]);

// Image -> [3,H,W] slice of a batch tensor; values mapped to [-0.5, 0.5].
nn::Tensor image_tensor(const Image& img);
void fill_image_slot(nn::Tensor& batch, int slot, const Image& img);

}  // namespace relpose
