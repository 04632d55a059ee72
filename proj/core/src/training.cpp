#include "trsat/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace trsat {

double noam_lr(long step, int model_dim, long warmup) {
    if (step < 1) throw Error("noam_lr: step must be >= 1");
    double s = static_cast<double>(step);
    double w = static_cast<double>(warmup);
    return std::pow(model_dim, -0.5) * std::min(std::pow(s, -0.5), s * std::pow(w, -1.5));
}

void adam_step(AdamState& state, const std::vector<Parameter*>& params, double lr) {
    if (state.m.empty()) {
        for (Parameter* p : params) {
            state.m.emplace_back(p->value.rows, p->value.cols);
            state.v.emplace_back(p->value.rows, p->value.cols);
        }
    }
    if (state.m.size() != params.size()) throw Error("adam_step: parameter list changed");
    ++state.t;
    double bc1 = 1.0 - std::pow(state.beta1, state.t);
    double bc2 = 1.0 - std::pow(state.beta2, state.t);
    for (size_t i = 0; i < params.size(); ++i) {
        Parameter& p = *params[i];
        if (p.grad.rows != state.m[i].rows || p.grad.cols != state.m[i].cols)
            throw Error("adam_step: shape mismatch for " + p.name);
        for (size_t j = 0; j < p.value.size(); ++j) {
            double g = p.grad.data[j];
            if (!std::isfinite(g)) throw Error("adam_step: non-finite gradient in " + p.name);
            double& m = state.m[i].data[j];
            double& v = state.v[i].data[j];
            m = state.beta1 * m + (1.0 - state.beta1) * g;
            v = state.beta2 * v + (1.0 - state.beta2) * g * g;
            p.value.data[j] -= lr * (m / bc1) / (std::sqrt(v / bc2) + state.epsilon);
        }
    }
}

namespace {

struct GraphArtifacts {
    SignedBiAdjacency biadj;
    MetaPathSet paths;
};

GraphArtifacts build_artifacts(const CnfFormula& f) {
    GraphArtifacts g;
    g.biadj = build_biadjacency(f);
    g.paths = meta_paths(g.biadj);
    return g;
}

uint64_t mix_seed(uint64_t a, uint64_t b) {
    uint64_t x = a * 0x9e3779b97f4a7c15ull + b + 0x7f4a7c15ull;
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    return x;
}

double completion_of(TrsatModel& model, const CnfFormula& f, const GraphArtifacts& g,
                     uint64_t seed) {
    ForwardResult r = forward(model, f, g.biadj, g.paths, seed);
    Assignment a = threshold(r.outputs, model.config.epsilon_threshold);
    return count_satisfied(f, a).completion_rate;
}

}  // namespace

TrainResult train(const std::vector<CnfFormula>& dataset, const TrainConfig& cfg,
                  const ModelConfig& model_cfg, const std::vector<CnfFormula>& validation) {
    if (dataset.empty()) throw Error("train: empty dataset");
    if (cfg.epochs < 1 || cfg.warmup_steps < 1) throw Error("train: epochs and warmup must be >= 1");

    // Deterministic 80/20 split when no explicit validation set is given.
    std::vector<const CnfFormula*> train_set, val_set;
    if (validation.empty()) {
        std::vector<int> idx(dataset.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::mt19937_64 split_rng(mix_seed(cfg.shuffle_seed, 0x5011dull));
        std::shuffle(idx.begin(), idx.end(), split_rng);
        size_t n_val = static_cast<size_t>(dataset.size() * cfg.validation_fraction);
        if (n_val == 0 && dataset.size() > 1) n_val = 1;
        for (size_t i = 0; i < idx.size(); ++i)
            (i < n_val ? val_set : train_set).push_back(&dataset[idx[i]]);
    } else {
        for (const CnfFormula& f : dataset) train_set.push_back(&f);
        for (const CnfFormula& f : validation) val_set.push_back(&f);
    }
    if (train_set.empty()) throw Error("train: training split is empty");

    std::vector<GraphArtifacts> train_graphs, val_graphs;
    for (const CnfFormula* f : train_set) train_graphs.push_back(build_artifacts(*f));
    for (const CnfFormula* f : val_set) val_graphs.push_back(build_artifacts(*f));

    TrainResult result{init_model(model_cfg), {}};
    TrsatModel& model = result.model;
    auto params = model.parameters();
    AdamState adam;
    std::mt19937_64 shuffle_rng(cfg.shuffle_seed);
    long step = 0;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::vector<int> order(train_set.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double loss_sum = 0.0, train_rate_sum = 0.0, lr = 0.0;
        for (int i : order) {
            const CnfFormula& f = *train_set[i];
            uint64_t inst_seed = mix_seed(cfg.shuffle_seed, mix_seed(epoch, i));
            model.zero_grads();
            ForwardResult r =
                forward(model, f, train_graphs[i].biadj, train_graphs[i].paths, inst_seed, true);
            double loss = r.tape.value(r.loss_node).at(0, 0);
            if (!std::isfinite(loss))
                throw Error("train: non-finite loss at epoch " + std::to_string(epoch));
            r.tape.backward(r.loss_node);
            lr = noam_lr(++step, model.config.channels, cfg.warmup_steps);
            adam_step(adam, params, lr);
            loss_sum += loss;
            Assignment a = threshold(r.outputs, model.config.epsilon_threshold);
            train_rate_sum += count_satisfied(f, a).completion_rate;
        }

        double val_rate = 0.0;
        for (size_t i = 0; i < val_set.size(); ++i)
            val_rate += completion_of(model, *val_set[i], val_graphs[i], mix_seed(0xe7a1ull, i));
        if (!val_set.empty()) val_rate /= static_cast<double>(val_set.size());

        EpochStats es;
        es.epoch = epoch;
        es.mean_loss = loss_sum / static_cast<double>(train_set.size());
        es.train_completion = train_rate_sum / static_cast<double>(train_set.size());
        es.val_completion = val_rate;
        es.learning_rate = lr;
        result.history.push_back(es);

        if (cfg.checkpoint_every > 0 && epoch % cfg.checkpoint_every == 0 &&
            !cfg.checkpoint_dir.empty())
            save_checkpoint(model, cfg.checkpoint_dir + "/epoch_" + std::to_string(epoch) + ".ckpt");
        if (cfg.early_stop_val_rate > 0.0 && !val_set.empty() &&
            val_rate >= cfg.early_stop_val_rate)
            break;
    }
    return result;
}

EvalStats evaluate(TrsatModel& model, const std::vector<CnfFormula>& dataset, uint64_t eval_seed) {
    if (dataset.empty()) throw Error("evaluate: empty dataset");
    EvalStats s;
    for (size_t i = 0; i < dataset.size(); ++i) {
        GraphArtifacts g = build_artifacts(dataset[i]);
        s.per_instance.push_back(completion_of(model, dataset[i], g, mix_seed(eval_seed, i)));
    }
    double n = static_cast<double>(s.per_instance.size());
    for (double r : s.per_instance) s.mean += r;
    s.mean /= n;
    for (double r : s.per_instance) s.stddev += (r - s.mean) * (r - s.mean);
    s.stddev = std::sqrt(s.stddev / n);
    return s;
}

std::string history_to_csv(const TrainHistory& h) {
    std::ostringstream out;
    out << "epoch,loss,train_rate,val_rate,lr\n";
    for (const EpochStats& e : h)
        out << e.epoch << ',' << e.mean_loss << ',' << e.train_completion << ','
            << e.val_completion << ',' << e.learning_rate << '\n';
    return out.str();
}

}  // namespace trsat
