#include "relpose/model.hpp"

#include <cmath>

#include "relpose/nn/weights_io.hpp"
#include "relpose/prng.hpp"

namespace relpose {

using nn::ConvSpec;
using nn::NodePtr;
using nn::PoolSpec;
using nn::SppSpec;
using nn::Tensor;

ModelConfig::MapShape ModelConfig::feature_map(int input_size_px) const {
    MapShape m{input_channels, input_size_px};
    for (const auto& layer : layers) {
        if (std::holds_alternative<ConvSpec>(layer)) {
            const auto& c = std::get<ConvSpec>(layer);
            const int next = nn::conv_output_extent(m.extent, c.kernel, c.stride, c.pad);
            if (next < 1)
                throw ConfigInvalid("regressor: input " + std::to_string(input_size_px) +
                                    " too small for conv stack of preset '" + name + "'");
            m.channels = c.filters;
            m.extent = next;
        } else {
            const auto& p = std::get<PoolSpec>(layer);
            if (m.extent < p.window)
                throw ConfigInvalid("regressor: input " + std::to_string(input_size_px) +
                                    " too small for pool stack of preset '" + name + "'");
            m.extent = (m.extent - p.window) / p.stride + 1;
        }
    }
    return m;
}

int ModelConfig::branch_feature_length() const {
    const MapShape m = feature_map(input_size);
    if (spp) {
        if (m.extent < spp->levels.back())
            throw ConfigInvalid("regressor: preset '" + name + "' SPP level " +
                                std::to_string(spp->levels.back()) + " exceeds feature map " +
                                std::to_string(m.extent));
        return m.channels * spp->bins_per_channel();
    }
    return m.channels * m.extent * m.extent;
}

namespace {

// Shared convolutional trunk of the paper-scale presets; cnnA keeps the
// final pool (6x6 map at 227), cnnB drops it (13x13 map).
std::vector<std::variant<ConvSpec, PoolSpec>> alexnet_trunk(bool final_pool) {
    std::vector<std::variant<ConvSpec, PoolSpec>> layers{
        ConvSpec{96, 11, 4, 0},  PoolSpec{3, 2}, ConvSpec{256, 5, 1, 2},
        PoolSpec{3, 2},          ConvSpec{384, 3, 1, 1}, ConvSpec{384, 3, 1, 1},
        ConvSpec{256, 3, 1, 1},
    };
    if (final_pool) layers.push_back(PoolSpec{3, 2});
    return layers;
}

}  // namespace

ModelConfig ModelConfig::preset(const std::string& name) {
    ModelConfig cfg;
    cfg.name = name;
    if (name == "cnnA") {
        cfg.layers = alexnet_trunk(true);
    } else if (name == "cnnB") {
        cfg.layers = alexnet_trunk(false);
    } else if (name == "cnnAspp") {
        cfg.layers = alexnet_trunk(true);
        cfg.spp = SppSpec{{1, 2, 3, 6}};
    } else if (name == "cnnBspp") {
        cfg.layers = alexnet_trunk(false);
        cfg.spp = SppSpec{{1, 2, 3, 6, 13}};
    } else if (name == "tiny") {
        cfg.input_size = 64;
        cfg.layers = {ConvSpec{16, 5, 2, 0}, PoolSpec{3, 2}, ConvSpec{32, 3, 1, 1}};
        cfg.spp = SppSpec{{1, 2, 4}};
    } else {
        throw ConfigInvalid("regressor: unknown preset '" + name + "'");
    }
    return cfg;
}

const std::vector<std::string>& ModelConfig::preset_names() {
    static const std::vector<std::string> names{"cnnA", "cnnB", "cnnAspp", "cnnBspp", "tiny"};
    return names;
}

SiameseModel::SiameseModel(ModelConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
    if (cfg_.beta <= 0.0) throw ConfigInvalid("regressor: beta must be positive");
    const int feature_len = cfg_.branch_feature_length();  // validates the stack
    const int head_in = 2 * feature_len;

    SplitRng rng = SplitRng(seed).split(0x696e6974);  // "init" stream

    // Fan-in-scaled uniform init: U(-b, b) with b = sqrt(6 / fan_in).
    auto init_uniform = [&rng](Tensor& t, int fan_in) {
        const double bound = std::sqrt(6.0 / fan_in);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
    };

    int channels = cfg_.input_channels;
    int conv_index = 0;
    for (const auto& layer : cfg_.layers) {
        if (!std::holds_alternative<ConvSpec>(layer)) continue;
        const auto& c = std::get<ConvSpec>(layer);
        ++conv_index;
        Tensor w(nn::Shape{c.filters, channels, c.kernel, c.kernel});
        init_uniform(w, channels * c.kernel * c.kernel);
        Tensor b(nn::Shape{c.filters});
        const std::string stem = "conv" + std::to_string(conv_index);
        conv_weights_.push_back(nn::parameter(std::move(w), stem + ".weight"));
        conv_biases_.push_back(nn::parameter(std::move(b), stem + ".bias"));
        channels = c.filters;
    }

    auto make_head = [&](int outputs, const std::string& stem, NodePtr& w_out, NodePtr& b_out) {
        Tensor w(nn::Shape{outputs, head_in});
        init_uniform(w, head_in);
        Tensor b(nn::Shape{outputs});
        w_out = nn::parameter(std::move(w), stem + ".weight");
        b_out = nn::parameter(std::move(b), stem + ".bias");
    };
    make_head(4, "fc_q", fc_q_weight_, fc_q_bias_);
    make_head(3, "fc_t", fc_t_weight_, fc_t_bias_);

    for (std::size_t i = 0; i < conv_weights_.size(); ++i) {
        params_.push_back(conv_weights_[i]);
        params_.push_back(conv_biases_[i]);
    }
    params_.push_back(fc_q_weight_);
    params_.push_back(fc_q_bias_);
    params_.push_back(fc_t_weight_);
    params_.push_back(fc_t_bias_);
}

nn::NodePtr SiameseModel::branch(const NodePtr& x) const {
    const Tensor& xv = x->value;
    if (xv.rank() != 4 || xv.dim(1) != cfg_.input_channels)
        throw ShapeMismatch("regressor: branch input must be [N," +
                            std::to_string(cfg_.input_channels) + ",H,W], got " +
                            nn::shape_str(xv.shape()));
    if (!cfg_.variable_input() &&
        (xv.dim(2) != cfg_.input_size || xv.dim(3) != cfg_.input_size))
        throw ShapeMismatch("regressor: preset '" + cfg_.name + "' expects fixed " +
                            std::to_string(cfg_.input_size) + "x" +
                            std::to_string(cfg_.input_size) + " input, got " +
                            nn::shape_str(xv.shape()));

    NodePtr h = x;
    std::size_t conv_i = 0;
    for (const auto& layer : cfg_.layers) {
        if (std::holds_alternative<ConvSpec>(layer)) {
            const auto& c = std::get<ConvSpec>(layer);
            h = nn::relu(nn::conv2d(h, conv_weights_[conv_i], conv_biases_[conv_i], c));
            ++conv_i;
        } else {
            h = nn::maxpool2d(h, std::get<PoolSpec>(layer));
        }
    }
    return cfg_.spp ? nn::spp(h, *cfg_.spp) : nn::flatten_rows(h);
}

nn::NodePtr SiameseModel::forward_pair(const NodePtr& img1, const NodePtr& img2) const {
    const NodePtr features = nn::concat(branch(img1), branch(img2));
    const NodePtr q = nn::linear(features, fc_q_weight_, fc_q_bias_);
    const NodePtr t = nn::linear(features, fc_t_weight_, fc_t_bias_);
    return nn::concat(q, t);
}

RelativePose normalize_prediction(const double raw[7]) {
    const Quaternion q{raw[0], raw[1], raw[2], raw[3]};
    if (q.norm() <= 1e-12)
        throw NearZeroQuaternion("regressor: raw quaternion head output near zero");
    const Vec3 t(raw[4], raw[5], raw[6]);
    if (t.norm() <= 1e-12)
        throw NearZeroTranslation("regressor: raw translation head output near zero");
    return RelativePose{quat_normalize(q), t.normalized()};
}

RelativePose SiameseModel::predict(const nn::Tensor& img1, const nn::Tensor& img2) const {
    const NodePtr out = forward_pair(nn::constant(img1), nn::constant(img2));
    return normalize_prediction(out->value.data());
}

RelativePose SiameseModel::predict(const Image& img1, const Image& img2) const {
    return predict(image_tensor(img1), image_tensor(img2));
}

void SiameseModel::save(const std::string& path) const {
    nn::save_weights(path, params_);
}

void SiameseModel::load(const std::string& path) {
    nn::load_weights_into(path, params_);
}

nn::NodePtr pose_loss(const NodePtr& pred, const NodePtr& target, double beta) {
    return nn::pair_pose_loss(pred, target, beta);
}

nn::Tensor image_tensor(const Image& img) {
    Tensor t(nn::Shape{1, 3, img.height, img.width});
    fill_image_slot(t, 0, img);
    return t;
}

void fill_image_slot(nn::Tensor& batch, int slot, const Image& img) {
    if (batch.rank() != 4 || batch.dim(1) != 3 || batch.dim(2) != img.height ||
        batch.dim(3) != img.width)
        throw ShapeMismatch("regressor: image " + std::to_string(img.width) + "x" +
                            std::to_string(img.height) + " does not fit batch tensor " +
                            nn::shape_str(batch.shape()));
    const std::size_t plane = static_cast<std::size_t>(img.width) * img.height;
    double* base = batch.data() + static_cast<std::size_t>(slot) * 3 * plane;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const std::size_t px = static_cast<std::size_t>(y) * img.width + x;
            for (int c = 0; c < 3; ++c)
                base[c * plane + px] = img.at(x, y, c) / 255.0 - 0.5;
        }
}

}  // namespace relpose
