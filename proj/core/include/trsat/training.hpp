#pragma once

#include <string>
#include <vector>

#include "trsat/model.hpp"

namespace trsat {

// lr = d^-0.5 * min(step^-0.5, step * warmup^-1.5); peaks at step == warmup.
double noam_lr(long step, int model_dim, long warmup);

struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.98;
    double epsilon = 1e-9;
    long t = 0;
    std::vector<DenseMatrix> m;  // first moments, aligned with the parameter list
    std::vector<DenseMatrix> v;  // second moments
};

// Bias-corrected Adam over params' accumulated gradients. Moment buffers
// are allocated lazily on the first call.
void adam_step(AdamState& state, const std::vector<Parameter*>& params, double lr);

struct TrainConfig {
    int epochs = 500;
    long warmup_steps = 400;
    uint64_t shuffle_seed = 0;
    int checkpoint_every = 0;  // 0 disables periodic checkpoints
    std::string checkpoint_dir;
    double validation_fraction = 0.2;  // used when no explicit validation set is given
    double early_stop_val_rate = -1.0; // stop once validation completion reaches this
};

struct EpochStats {
    int epoch = 0;
    double mean_loss = 0.0;
    double train_completion = 0.0;
    double val_completion = 0.0;
    double learning_rate = 0.0;
};

using TrainHistory = std::vector<EpochStats>;

struct EvalStats {
    double mean = 0.0;
    double stddev = 0.0;  // population
    std::vector<double> per_instance;
};

struct TrainResult {
    TrsatModel model;
    TrainHistory history;
};

// Self-supervised: per epoch, seeded shuffle, one forward/backward/Adam
// step per instance at the Noam-scheduled rate. Graph artifacts are built
// once per instance and cached. When validation is empty, a deterministic
// 80/20 split of `dataset` is used.
TrainResult train(const std::vector<CnfFormula>& dataset, const TrainConfig& cfg,
                  const ModelConfig& model_cfg, const std::vector<CnfFormula>& validation = {});

EvalStats evaluate(TrsatModel& model, const std::vector<CnfFormula>& dataset,
                   uint64_t eval_seed = 12345);

// CSV: epoch,loss,train_rate,val_rate,lr
std::string history_to_csv(const TrainHistory& h);

}  // namespace trsat
