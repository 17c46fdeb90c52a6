#pragma once

#include "relpose/manifest.hpp"
#include "relpose/model.hpp"
#include "relpose/nn/optim.hpp"

namespace relpose {

struct TrainConfig {
    double lr = 1e-4;
    double weight_decay = 1e-5;
    int batch = 128;
    int epochs = 15;
    double beta = 10.0;
    std::uint64_t seed = 0;
};

struct EpochLog {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_median_roe_deg = 0.0;
    double val_median_rte_deg = 0.0;
};

// Mini-batch Adam on the pose loss. Shuffling, batching and the optimizer are
// all driven by cfg.seed, so a rerun reproduces the same parameters bit for
// bit. Throws NonFiniteLoss (with epoch/batch diagnostic) if the loss leaves
// the finite range.
std::vector<EpochLog> train(SiameseModel& model, const PairManifest& train_set,
                            const PairManifest& val_set, const TrainConfig& cfg);

// Batched inference over a manifest; rows normalized per predict().
std::vector<RelativePose> predict_manifest(const SiameseModel& model,
                                           const PairManifest& manifest, int batch = 32);

// CSV: epoch,train_loss,val_median_roe_deg,val_median_rte_deg
void write_train_log(const std::vector<EpochLog>& log, const std::string& path);

}  // namespace relpose
