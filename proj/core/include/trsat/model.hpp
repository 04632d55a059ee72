#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "trsat/autodiff.hpp"
#include "trsat/graph.hpp"

namespace trsat {

struct ModelConfig {
    int num_encoder_layers = 4;
    int num_decoder_layers = 4;
    int channels = 64;
    int heads = 4;
    int ffn_hidden = 256;
    double tau = 5.0;
    double epsilon_threshold = 0.01;
    double noise_scale = 1.0;  // 0 disables the symmetry-breaking noise
    uint64_t init_seed = 0;

    void validate() const;
    std::string to_text() const;  // "key = value" per line
    static ModelConfig from_text(const std::string& text);
};

struct AttnProjections {
    Parameter wq, wk, wv;  // F x F, no bias (projections per Eq. of the attention)
};

struct EncoderLayer {
    std::array<AttnProjections, 4> var_paths;     // indexed by PathType
    std::array<AttnProjections, 4> clause_paths;  // indexed by PathType
    Parameter var_merge_w, var_merge_b;           // 4F -> F
    Parameter clause_merge_w, clause_merge_b;
    Parameter var_ln_gain, var_ln_bias;
    Parameter clause_ln_gain, clause_ln_bias;
};

struct DecoderLayer {
    std::array<AttnProjections, 2> clause_cross;  // [A+^T, A-^T] branches, queries = clauses
    std::array<AttnProjections, 2> var_cross;     // [A+, A-] branches, queries = variables
    Parameter clause_merge_w, clause_merge_b;     // 2F -> F
    Parameter var_merge_w, var_merge_b;
    Parameter clause_ln_gain, clause_ln_bias;
    Parameter var_ln_gain, var_ln_bias;
    Parameter ffn_w1, ffn_b1, ffn_w2, ffn_b2;  // shared across both sides
    Parameter var_ffn_ln_gain, var_ffn_ln_bias;
    Parameter clause_ffn_ln_gain, clause_ffn_ln_bias;
};

struct TrsatModel {
    ModelConfig config;
    Parameter var_type_embedding;    // 1 x F
    Parameter clause_type_embedding; // 1 x F
    Parameter input_projection;      // F x F, applied to the noise vector
    std::vector<EncoderLayer> encoders;
    std::vector<DecoderLayer> decoders;
    Parameter readout_w, readout_b;  // F -> 1

    std::vector<Parameter*> parameters();
    std::vector<const Parameter*> parameters() const;
    size_t parameter_count() const;
    void zero_grads();
};

struct VariableOutputs {
    std::vector<double> x;  // each in [0,1]
};

TrsatModel init_model(const ModelConfig& cfg);

struct NodeFeatures {
    DenseMatrix var_noise;     // n x F seeded unit normals (scaled)
    DenseMatrix clause_noise;  // m x F
};

// Seeded noise for symmetry breaking; feature = type embedding +
// input_projection(noise) inside the forward pass.
NodeFeatures make_instance_noise(int num_vars, int num_clauses, int channels, double noise_scale,
                                 uint64_t instance_seed);

struct ForwardResult {
    VariableOutputs outputs;
    int encoder_applications = 0;
    int decoder_applications = 0;
    Tape tape;             // kept alive for backward during training
    Tape::NodeId x_node;   // n x 1 readout before flattening into outputs
    Tape::NodeId loss_node = -1;  // set when with_loss was requested
};

// Full encoder/decoder stack. When with_loss is true the tape also carries
// the differentiable satisfaction loss; the caller owns the backward call.
// The formula must outlive the tape when with_loss is set.
ForwardResult forward(TrsatModel& model, const CnfFormula& f, const SignedBiAdjacency& b,
                      const MetaPathSet& mp, const NodeFeatures& noise, bool with_loss = false);
ForwardResult forward(TrsatModel& model, const CnfFormula& f, const SignedBiAdjacency& b,
                      const MetaPathSet& mp, uint64_t instance_seed, bool with_loss = false);

// Eq.-style rounding: v_i = floor(x_i / (0.5 + eps)).
Assignment threshold(const VariableOutputs& x, double eps);

void save_checkpoint(const TrsatModel& model, const std::string& path);
TrsatModel load_checkpoint(const std::string& path);

}  // namespace trsat
