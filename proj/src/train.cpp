#include "relpose/train.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "relpose/evaluation.hpp"
#include "relpose/prng.hpp"

namespace relpose {

namespace {

struct LoadedPairs {
    std::vector<Image> first, second;
    int width = 0, height = 0;
};

LoadedPairs load_images(const PairManifest& manifest, const char* which) {
    if (manifest.empty())
        throw ConfigInvalid(std::string("regressor: empty ") + which + " manifest");
    LoadedPairs out;
    out.first.reserve(manifest.size());
    out.second.reserve(manifest.size());
    for (const PairRecord& r : manifest.records) {
        out.first.push_back(read_ppm(r.img1));
        out.second.push_back(read_ppm(r.img2));
    }
    out.width = out.first.front().width;
    out.height = out.first.front().height;
    for (std::size_t i = 0; i < out.first.size(); ++i)
        if (out.first[i].width != out.width || out.first[i].height != out.height ||
            out.second[i].width != out.width || out.second[i].height != out.height)
            throw ShapeMismatch(std::string("regressor: ") + which +
                                " images disagree in size at record " + std::to_string(i));
    return out;
}

nn::Tensor target_tensor(const PairManifest& manifest, const std::vector<std::size_t>& idx) {
    nn::Tensor t(nn::Shape{static_cast<int>(idx.size()), 7});
    for (std::size_t row = 0; row < idx.size(); ++row) {
        const RelativePose& gt = manifest.records[idx[row]].ground_truth;
        double* d = t.data() + row * 7;
        d[0] = gt.dq.w;
        d[1] = gt.dq.x;
        d[2] = gt.dq.y;
        d[3] = gt.dq.z;
        d[4] = gt.dt.x();
        d[5] = gt.dt.y();
        d[6] = gt.dt.z();
    }
    return t;
}

std::pair<nn::Tensor, nn::Tensor> batch_tensors(const LoadedPairs& pairs,
                                                const std::vector<std::size_t>& idx) {
    nn::Tensor x1(nn::Shape{static_cast<int>(idx.size()), 3, pairs.height, pairs.width});
    nn::Tensor x2 = nn::Tensor::zeros_like(x1);
    for (std::size_t row = 0; row < idx.size(); ++row) {
        fill_image_slot(x1, static_cast<int>(row), pairs.first[idx[row]]);
        fill_image_slot(x2, static_cast<int>(row), pairs.second[idx[row]]);
    }
    return {std::move(x1), std::move(x2)};
}

}  // namespace

std::vector<EpochLog> train(SiameseModel& model, const PairManifest& train_set,
                            const PairManifest& val_set, const TrainConfig& cfg) {
    if (cfg.batch < 1) throw ConfigInvalid("regressor: batch size must be >= 1");
    const LoadedPairs train_imgs = load_images(train_set, "train");
    const LoadedPairs val_imgs = load_images(val_set, "validation");

    nn::Adam optimizer(nn::Adam::Config{cfg.lr, cfg.weight_decay, 0.9, 0.999, 1e-8});
    SplitRng shuffle_root = SplitRng(cfg.seed).split(0x73687566);  // "shuf" stream

    const std::size_t n = train_set.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<EpochLog> logs;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        SplitRng rng = shuffle_root.split(static_cast<std::uint64_t>(epoch));
        for (std::size_t i = n; i > 1; --i)
            std::swap(order[i - 1], order[rng.below(i)]);

        double loss_sum = 0.0;
        for (std::size_t start = 0, batch_no = 0; start < n; start += cfg.batch, ++batch_no) {
            const std::size_t stop = std::min(n, start + cfg.batch);
            const std::vector<std::size_t> idx(order.begin() + start, order.begin() + stop);

            auto [x1, x2] = batch_tensors(train_imgs, idx);
            const nn::NodePtr pred =
                model.forward_pair(nn::constant(std::move(x1)), nn::constant(std::move(x2)));
            const nn::NodePtr loss =
                pose_loss(pred, nn::constant(target_tensor(train_set, idx)), cfg.beta);

            const double loss_value = loss->value[0];
            if (!std::isfinite(loss_value))
                throw NonFiniteLoss("regressor: non-finite loss at epoch " +
                                    std::to_string(epoch) + ", batch " +
                                    std::to_string(batch_no));
            loss_sum += loss_value * static_cast<double>(idx.size());

            nn::backward(loss);
            optimizer.step(model.parameters());
        }

        EpochLog log;
        log.epoch = epoch;
        log.train_loss = loss_sum / static_cast<double>(n);

        std::vector<double> roe, rte;
        roe.reserve(val_set.size());
        rte.reserve(val_set.size());
        std::vector<std::size_t> vidx(val_set.size());
        std::iota(vidx.begin(), vidx.end(), std::size_t{0});
        for (std::size_t start = 0; start < vidx.size(); start += cfg.batch) {
            const std::size_t stop = std::min(vidx.size(), start + cfg.batch);
            const std::vector<std::size_t> idx(vidx.begin() + start, vidx.begin() + stop);
            auto [x1, x2] = batch_tensors(val_imgs, idx);
            const nn::NodePtr pred =
                model.forward_pair(nn::constant(std::move(x1)), nn::constant(std::move(x2)));
            for (std::size_t row = 0; row < idx.size(); ++row) {
                const RelativePose p = normalize_prediction(pred->value.data() + row * 7);
                const RelativePose& gt = val_set.records[idx[row]].ground_truth;
                roe.push_back(roe_deg(p.dq, gt.dq));
                rte.push_back(rte_deg(p.dt, gt.dt));
            }
        }
        log.val_median_roe_deg = median(roe);
        log.val_median_rte_deg = median(rte);
        logs.push_back(log);
    }
    return logs;
}

std::vector<RelativePose> predict_manifest(const SiameseModel& model,
                                           const PairManifest& manifest, int batch) {
    if (batch < 1) throw ConfigInvalid("regressor: batch size must be >= 1");
    const LoadedPairs imgs = load_images(manifest, "prediction");
    std::vector<RelativePose> out;
    out.reserve(manifest.size());
    std::vector<std::size_t> all(manifest.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (std::size_t start = 0; start < all.size(); start += batch) {
        const std::size_t stop = std::min(all.size(), start + batch);
        const std::vector<std::size_t> idx(all.begin() + start, all.begin() + stop);
        auto [x1, x2] = batch_tensors(imgs, idx);
        const nn::NodePtr pred =
            model.forward_pair(nn::constant(std::move(x1)), nn::constant(std::move(x2)));
        for (std::size_t row = 0; row < idx.size(); ++row)
            out.push_back(normalize_prediction(pred->value.data() + row * 7));
    }
    return out;
}

namespace {

std::string fmt_log_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_train_log(const std::vector<EpochLog>& log, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoFailure("regressor: cannot open '" + path + "' for writing");
    os << "epoch,train_loss,val_median_roe_deg,val_median_rte_deg\n";
    for (const EpochLog& e : log)
        os << e.epoch << "," << fmt_log_double(e.train_loss) << ","
           << fmt_log_double(e.val_median_roe_deg) << ","
           << fmt_log_double(e.val_median_rte_deg) << "\n";
    if (!os) throw IoFailure("regressor: write to '" + path + "' failed");
}

}  // namespace relpose
