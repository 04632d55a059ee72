#include "trsat/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace trsat {

void ModelConfig::validate() const {
    if (num_encoder_layers < 1 || num_decoder_layers < 1 || channels < 1 || heads < 1 ||
        ffn_hidden < 1)
        throw Error("model config: all counts must be >= 1");
    if (channels % heads != 0) throw Error("model config: channels must be divisible by heads");
    if (tau <= 0.0) throw Error("model config: tau must be positive");
    if (epsilon_threshold <= 0.0 || epsilon_threshold >= 0.5)
        throw Error("model config: epsilon_threshold must be in (0, 0.5)");
    if (noise_scale < 0.0) throw Error("model config: noise_scale must be >= 0");
}

std::string ModelConfig::to_text() const {
    std::ostringstream out;
    out << "num_encoder_layers = " << num_encoder_layers << '\n'
        << "num_decoder_layers = " << num_decoder_layers << '\n'
        << "channels = " << channels << '\n'
        << "heads = " << heads << '\n'
        << "ffn_hidden = " << ffn_hidden << '\n'
        << "tau = " << tau << '\n'
        << "epsilon_threshold = " << epsilon_threshold << '\n'
        << "noise_scale = " << noise_scale << '\n'
        << "init_seed = " << init_seed << '\n';
    return out.str();
}

ModelConfig ModelConfig::from_text(const std::string& text) {
    ModelConfig cfg;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::istringstream key_s(line.substr(0, eq)), val_s(line.substr(eq + 1));
        std::string key;
        key_s >> key;
        if (key.empty()) continue;
        if (key == "num_encoder_layers") val_s >> cfg.num_encoder_layers;
        else if (key == "num_decoder_layers") val_s >> cfg.num_decoder_layers;
        else if (key == "channels") val_s >> cfg.channels;
        else if (key == "heads") val_s >> cfg.heads;
        else if (key == "ffn_hidden") val_s >> cfg.ffn_hidden;
        else if (key == "tau") val_s >> cfg.tau;
        else if (key == "epsilon_threshold") val_s >> cfg.epsilon_threshold;
        else if (key == "noise_scale") val_s >> cfg.noise_scale;
        else if (key == "init_seed") val_s >> cfg.init_seed;
        else throw ParseError("model config: unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

namespace {

class Initializer {
public:
    explicit Initializer(uint64_t seed) : rng_(seed) {}

    Parameter glorot(const std::string& name, int rows, int cols) {
        double bound = std::sqrt(6.0 / (rows + cols));
        DenseMatrix m(rows, cols);
        for (double& x : m.data) x = (uniform01() * 2.0 - 1.0) * bound;
        return Parameter(name, std::move(m));
    }
    Parameter zeros(const std::string& name, int rows, int cols) {
        return Parameter(name, DenseMatrix(rows, cols));
    }
    Parameter ones(const std::string& name, int rows, int cols) {
        return Parameter(name, DenseMatrix(rows, cols, 1.0));
    }
    AttnProjections attn(const std::string& prefix, int f) {
        AttnProjections a;
        a.wq = glorot(prefix + ".wq", f, f);
        a.wk = glorot(prefix + ".wk", f, f);
        a.wv = glorot(prefix + ".wv", f, f);
        return a;
    }

private:
    double uniform01() {
        return static_cast<double>(rng_()) / (static_cast<double>(std::mt19937_64::max()) + 1.0);
    }
    std::mt19937_64 rng_;
};

const char* path_name(int t) {
    static const char* names[4] = {"pp", "pm", "mp", "mm"};
    return names[t];
}

}  // namespace

TrsatModel init_model(const ModelConfig& cfg) {
    cfg.validate();
    Initializer init(cfg.init_seed);
    const int F = cfg.channels;
    TrsatModel m;
    m.config = cfg;
    m.var_type_embedding = init.glorot("var_type_embedding", 1, F);
    m.clause_type_embedding = init.glorot("clause_type_embedding", 1, F);
    m.input_projection = init.glorot("input_projection", F, F);
    for (int l = 0; l < cfg.num_encoder_layers; ++l) {
        std::string p = "enc" + std::to_string(l);
        EncoderLayer e;
        for (int t = 0; t < 4; ++t) {
            e.var_paths[t] = init.attn(p + ".var." + path_name(t), F);
            e.clause_paths[t] = init.attn(p + ".clause." + path_name(t), F);
        }
        e.var_merge_w = init.glorot(p + ".var_merge_w", 4 * F, F);
        e.var_merge_b = init.zeros(p + ".var_merge_b", 1, F);
        e.clause_merge_w = init.glorot(p + ".clause_merge_w", 4 * F, F);
        e.clause_merge_b = init.zeros(p + ".clause_merge_b", 1, F);
        e.var_ln_gain = init.ones(p + ".var_ln_gain", 1, F);
        e.var_ln_bias = init.zeros(p + ".var_ln_bias", 1, F);
        e.clause_ln_gain = init.ones(p + ".clause_ln_gain", 1, F);
        e.clause_ln_bias = init.zeros(p + ".clause_ln_bias", 1, F);
        m.encoders.push_back(std::move(e));
    }
    for (int l = 0; l < cfg.num_decoder_layers; ++l) {
        std::string p = "dec" + std::to_string(l);
        DecoderLayer d;
        for (int s = 0; s < 2; ++s) {
            const char* pol = s == 0 ? "pos" : "neg";
            d.clause_cross[s] = init.attn(p + ".clause_cross." + pol, F);
            d.var_cross[s] = init.attn(p + ".var_cross." + pol, F);
        }
        d.clause_merge_w = init.glorot(p + ".clause_merge_w", 2 * F, F);
        d.clause_merge_b = init.zeros(p + ".clause_merge_b", 1, F);
        d.var_merge_w = init.glorot(p + ".var_merge_w", 2 * F, F);
        d.var_merge_b = init.zeros(p + ".var_merge_b", 1, F);
        d.clause_ln_gain = init.ones(p + ".clause_ln_gain", 1, F);
        d.clause_ln_bias = init.zeros(p + ".clause_ln_bias", 1, F);
        d.var_ln_gain = init.ones(p + ".var_ln_gain", 1, F);
        d.var_ln_bias = init.zeros(p + ".var_ln_bias", 1, F);
        d.ffn_w1 = init.glorot(p + ".ffn_w1", F, cfg.ffn_hidden);
        d.ffn_b1 = init.zeros(p + ".ffn_b1", 1, cfg.ffn_hidden);
        d.ffn_w2 = init.glorot(p + ".ffn_w2", cfg.ffn_hidden, F);
        d.ffn_b2 = init.zeros(p + ".ffn_b2", 1, F);
        d.var_ffn_ln_gain = init.ones(p + ".var_ffn_ln_gain", 1, F);
        d.var_ffn_ln_bias = init.zeros(p + ".var_ffn_ln_bias", 1, F);
        d.clause_ffn_ln_gain = init.ones(p + ".clause_ffn_ln_gain", 1, F);
        d.clause_ffn_ln_bias = init.zeros(p + ".clause_ffn_ln_bias", 1, F);
        m.decoders.push_back(std::move(d));
    }
    m.readout_w = init.glorot("readout_w", F, 1);
    m.readout_b = init.zeros("readout_b", 1, 1);
    return m;
}

std::vector<Parameter*> TrsatModel::parameters() {
    std::vector<Parameter*> out = {&var_type_embedding, &clause_type_embedding, &input_projection};
    for (EncoderLayer& e : encoders) {
        for (int t = 0; t < 4; ++t) {
            out.push_back(&e.var_paths[t].wq);
            out.push_back(&e.var_paths[t].wk);
            out.push_back(&e.var_paths[t].wv);
        }
        for (int t = 0; t < 4; ++t) {
            out.push_back(&e.clause_paths[t].wq);
            out.push_back(&e.clause_paths[t].wk);
            out.push_back(&e.clause_paths[t].wv);
        }
        out.push_back(&e.var_merge_w);
        out.push_back(&e.var_merge_b);
        out.push_back(&e.clause_merge_w);
        out.push_back(&e.clause_merge_b);
        out.push_back(&e.var_ln_gain);
        out.push_back(&e.var_ln_bias);
        out.push_back(&e.clause_ln_gain);
        out.push_back(&e.clause_ln_bias);
    }
    for (DecoderLayer& d : decoders) {
        for (int s = 0; s < 2; ++s) {
            out.push_back(&d.clause_cross[s].wq);
            out.push_back(&d.clause_cross[s].wk);
            out.push_back(&d.clause_cross[s].wv);
        }
        for (int s = 0; s < 2; ++s) {
            out.push_back(&d.var_cross[s].wq);
            out.push_back(&d.var_cross[s].wk);
            out.push_back(&d.var_cross[s].wv);
        }
        out.push_back(&d.clause_merge_w);
        out.push_back(&d.clause_merge_b);
        out.push_back(&d.var_merge_w);
        out.push_back(&d.var_merge_b);
        out.push_back(&d.clause_ln_gain);
        out.push_back(&d.clause_ln_bias);
        out.push_back(&d.var_ln_gain);
        out.push_back(&d.var_ln_bias);
        out.push_back(&d.ffn_w1);
        out.push_back(&d.ffn_b1);
        out.push_back(&d.ffn_w2);
        out.push_back(&d.ffn_b2);
        out.push_back(&d.var_ffn_ln_gain);
        out.push_back(&d.var_ffn_ln_bias);
        out.push_back(&d.clause_ffn_ln_gain);
        out.push_back(&d.clause_ffn_ln_bias);
    }
    out.push_back(&readout_w);
    out.push_back(&readout_b);
    return out;
}

std::vector<const Parameter*> TrsatModel::parameters() const {
    auto ps = const_cast<TrsatModel*>(this)->parameters();
    return {ps.begin(), ps.end()};
}

size_t TrsatModel::parameter_count() const {
    size_t n = 0;
    for (const Parameter* p : parameters()) n += p->value.size();
    return n;
}

void TrsatModel::zero_grads() {
    for (Parameter* p : parameters()) p->zero_grad();
}

NodeFeatures make_instance_noise(int num_vars, int num_clauses, int channels, double noise_scale,
                                 uint64_t instance_seed) {
    std::mt19937_64 rng(instance_seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    NodeFeatures nf;
    nf.var_noise = DenseMatrix(num_vars, channels);
    nf.clause_noise = DenseMatrix(num_clauses, channels);
    for (double& x : nf.var_noise.data) x = normal(rng) * noise_scale;
    for (double& x : nf.clause_noise.data) x = normal(rng) * noise_scale;
    return nf;
}

ForwardResult forward(TrsatModel& model, const CnfFormula& f, const SignedBiAdjacency& b,
                      const MetaPathSet& mp, const NodeFeatures& noise, bool with_loss) {
    const int n = f.num_variables;
    const int m = f.num_clauses();
    const int heads = model.config.heads;
    ForwardResult res;
    Tape& t = res.tape;

    SparseMatrix a_plus_t = b.a_plus.transposed();
    SparseMatrix a_minus_t = b.a_minus.transposed();
    const SparseMatrix* cross_to_clause[2] = {&a_plus_t, &a_minus_t};  // m x n
    const SparseMatrix* cross_to_var[2] = {&b.a_plus, &b.a_minus};     // n x m

    auto win = t.leaf(model.input_projection);
    auto xv = t.add(t.broadcast_row(t.leaf(model.var_type_embedding), n),
                    t.matmul(t.constant(noise.var_noise), win));
    auto xc = t.add(t.broadcast_row(t.leaf(model.clause_type_embedding), m),
                    t.matmul(t.constant(noise.clause_noise), win));

    auto attention = [&](AttnProjections& p, Tape::NodeId queries, Tape::NodeId keys,
                         const SparseMatrix& topo) {
        return t.sparse_attention(t.matmul(queries, t.leaf(p.wq)), t.matmul(keys, t.leaf(p.wk)),
                                  t.matmul(keys, t.leaf(p.wv)), topo, heads);
    };

    for (EncoderLayer& e : model.encoders) {
        std::vector<Tape::NodeId> vparts, cparts;
        for (int pt = 0; pt < 4; ++pt) {
            vparts.push_back(attention(e.var_paths[pt], xv, xv, mp.var_topology[pt]));
            cparts.push_back(attention(e.clause_paths[pt], xc, xc, mp.clause_topology[pt]));
        }
        auto v_merged = t.affine(t.concat_cols(vparts), t.leaf(e.var_merge_w), t.leaf(e.var_merge_b));
        auto c_merged =
            t.affine(t.concat_cols(cparts), t.leaf(e.clause_merge_w), t.leaf(e.clause_merge_b));
        xv = t.layer_norm(t.add(v_merged, xv), t.leaf(e.var_ln_gain), t.leaf(e.var_ln_bias));
        xc = t.layer_norm(t.add(c_merged, xc), t.leaf(e.clause_ln_gain), t.leaf(e.clause_ln_bias));
        ++res.encoder_applications;
    }

    for (DecoderLayer& d : model.decoders) {
        // Clauses pull from variables first, then variables from the fresh clauses.
        std::vector<Tape::NodeId> cparts;
        for (int s = 0; s < 2; ++s)
            cparts.push_back(attention(d.clause_cross[s], xc, xv, *cross_to_clause[s]));
        auto c_merged =
            t.affine(t.concat_cols(cparts), t.leaf(d.clause_merge_w), t.leaf(d.clause_merge_b));
        xc = t.layer_norm(t.add(c_merged, xc), t.leaf(d.clause_ln_gain), t.leaf(d.clause_ln_bias));

        std::vector<Tape::NodeId> vparts;
        for (int s = 0; s < 2; ++s)
            vparts.push_back(attention(d.var_cross[s], xv, xc, *cross_to_var[s]));
        auto v_merged = t.affine(t.concat_cols(vparts), t.leaf(d.var_merge_w), t.leaf(d.var_merge_b));
        xv = t.layer_norm(t.add(v_merged, xv), t.leaf(d.var_ln_gain), t.leaf(d.var_ln_bias));

        auto ffn = [&](Tape::NodeId x) {
            return t.affine(t.relu(t.affine(x, t.leaf(d.ffn_w1), t.leaf(d.ffn_b1))),
                            t.leaf(d.ffn_w2), t.leaf(d.ffn_b2));
        };
        xv = t.layer_norm(t.add(ffn(xv), xv), t.leaf(d.var_ffn_ln_gain), t.leaf(d.var_ffn_ln_bias));
        xc = t.layer_norm(t.add(ffn(xc), xc), t.leaf(d.clause_ffn_ln_gain),
                          t.leaf(d.clause_ffn_ln_bias));
        ++res.decoder_applications;
    }

    res.x_node = t.sigmoid(t.affine(xv, t.leaf(model.readout_w), t.leaf(model.readout_b)));
    res.outputs.x = t.value(res.x_node).data;
    if (with_loss) res.loss_node = t.sat_loss(res.x_node, f, model.config.tau);
    return res;
}

ForwardResult forward(TrsatModel& model, const CnfFormula& f, const SignedBiAdjacency& b,
                      const MetaPathSet& mp, uint64_t instance_seed, bool with_loss) {
    NodeFeatures noise = make_instance_noise(f.num_variables, f.num_clauses(),
                                             model.config.channels, model.config.noise_scale,
                                             instance_seed);
    return forward(model, f, b, mp, noise, with_loss);
}

Assignment threshold(const VariableOutputs& x, double eps) {
    if (eps <= 0.0 || eps >= 0.5) throw Error("threshold: eps must be in (0, 0.5)");
    Assignment a(x.x.size());
    for (size_t i = 0; i < x.x.size(); ++i) {
        double xi = x.x[i];
        if (xi < 0.0 || xi > 1.0) throw Error("threshold: output outside [0,1]");
        a[i] = std::floor(xi / (0.5 + eps)) >= 1.0;
    }
    return a;
}

namespace {

constexpr char kMagic[5] = {'T', 'R', 'S', 'A', 'T'};
constexpr uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& in) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw Error("checkpoint: truncated file");
    return v;
}

}  // namespace

void save_checkpoint(const TrsatModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("checkpoint: cannot open for write: " + path);
    out.write(kMagic, sizeof(kMagic));
    put<uint32_t>(out, kVersion);
    const ModelConfig& c = model.config;
    put<int32_t>(out, c.num_encoder_layers);
    put<int32_t>(out, c.num_decoder_layers);
    put<int32_t>(out, c.channels);
    put<int32_t>(out, c.heads);
    put<int32_t>(out, c.ffn_hidden);
    put<double>(out, c.tau);
    put<double>(out, c.epsilon_threshold);
    put<double>(out, c.noise_scale);
    put<uint64_t>(out, c.init_seed);
    auto params = model.parameters();
    put<uint32_t>(out, static_cast<uint32_t>(params.size()));
    for (const Parameter* p : params) {
        put<uint32_t>(out, static_cast<uint32_t>(p->name.size()));
        out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
        put<uint32_t>(out, static_cast<uint32_t>(p->value.rows));
        put<uint32_t>(out, static_cast<uint32_t>(p->value.cols));
        out.write(reinterpret_cast<const char*>(p->value.data.data()),
                  static_cast<std::streamsize>(p->value.size() * sizeof(double)));
    }
    if (!out) throw Error("checkpoint: write failed: " + path);
}

TrsatModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("checkpoint: cannot open: " + path);
    char magic[5];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw Error("checkpoint: bad magic bytes");
    uint32_t version = get<uint32_t>(in);
    if (version != kVersion)
        throw Error("checkpoint: unsupported version " + std::to_string(version));
    ModelConfig c;
    c.num_encoder_layers = get<int32_t>(in);
    c.num_decoder_layers = get<int32_t>(in);
    c.channels = get<int32_t>(in);
    c.heads = get<int32_t>(in);
    c.ffn_hidden = get<int32_t>(in);
    c.tau = get<double>(in);
    c.epsilon_threshold = get<double>(in);
    c.noise_scale = get<double>(in);
    c.init_seed = get<uint64_t>(in);
    TrsatModel model = init_model(c);
    auto params = model.parameters();
    uint32_t count = get<uint32_t>(in);
    if (count != params.size())
        throw Error("checkpoint: parameter count mismatch, file has " + std::to_string(count));
    for (Parameter* p : params) {
        uint32_t name_len = get<uint32_t>(in);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        if (!in || name != p->name)
            throw Error("checkpoint: parameter name mismatch, expected '" + p->name + "' got '" +
                        name + "'");
        uint32_t rows = get<uint32_t>(in);
        uint32_t cols = get<uint32_t>(in);
        if (rows != static_cast<uint32_t>(p->value.rows) ||
            cols != static_cast<uint32_t>(p->value.cols))
            throw Error("checkpoint: shape mismatch for '" + p->name + "'");
        in.read(reinterpret_cast<char*>(p->value.data.data()),
                static_cast<std::streamsize>(p->value.size() * sizeof(double)));
        if (!in) throw Error("checkpoint: truncated file");
    }
    return model;
}

}  // namespace trsat
