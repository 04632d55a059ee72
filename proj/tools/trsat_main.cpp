// trsat: generate, train, solve, evaluate and benchmark CNF instances with
// the meta-path graph transformer solver.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trsat/cnf.hpp"
#include "trsat/extsolver.hpp"
#include "trsat/generators.hpp"
#include "trsat/model.hpp"
#include "trsat/solver.hpp"
#include "trsat/training.hpp"
#include "trsat/walksat.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace trsat;

namespace {

// Exit codes: 0 success, 2 usage, 3 missing file, 4 cap violation,
// 5 malformed input, 1 anything else.
struct CliError : std::runtime_error {
    int code;
    CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

uint64_t fnv1a(const std::string& bytes) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError(3, "cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a(buf.str())));
    return hex;
}

struct Manifest {
    json doc;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    Manifest(const std::string& command, int argc, char** argv) {
        doc["command"] = command;
        std::vector<std::string> args(argv, argv + argc);
        doc["argv"] = args;
        doc["inputs"] = json::array();
        doc["outputs"] = json::array();
        doc["checksums"] = json::object();
        doc["seeds"] = json::object();
        doc["config"] = json::object();
    }
    void input(const std::string& p) { doc["inputs"].push_back(p); }
    void output(const std::string& p) {
        doc["outputs"].push_back(p);
        doc["checksums"][p] = file_checksum(p);
    }
    void seed(const std::string& name, uint64_t s) { doc["seeds"][name] = s; }
    // Written atomically at run end: tmp file then rename.
    void write(const std::string& path) {
        doc["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                  .count();
        std::string tmp = path + ".tmp";
        {
            std::ofstream out(tmp);
            out << doc.dump(2) << '\n';
        }
        fs::rename(tmp, path);
    }
};

CnfFormula load_cnf(const std::string& path) {
    if (!fs::exists(path)) throw CliError(3, "missing file: " + path);
    try {
        return parse_dimacs_file(path);
    } catch (const ParseError& e) {
        throw CliError(5, e.what());
    }
}

std::vector<CnfFormula> load_cnf_dir(const std::string& dir) {
    if (!fs::is_directory(dir)) throw CliError(3, "missing dataset directory: " + dir);
    std::vector<std::string> paths;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".cnf") paths.push_back(e.path().string());
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw CliError(3, "no .cnf files in " + dir);
    std::vector<CnfFormula> out;
    for (const std::string& p : paths) out.push_back(load_cnf(p));
    return out;
}

double median_solve_seconds(const std::function<void()>& fn, int reps = 5) {
    std::vector<double> t;
    for (int r = 0; r < reps; ++r) {
        auto a = std::chrono::steady_clock::now();
        fn();
        t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - a).count());
    }
    std::sort(t.begin(), t.end());
    return t[t.size() / 2];
}

int run(int argc, char** argv) {
    CLI::App app{"TRSAT: meta-path graph transformer MaxSAT toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config")->configurable(false);
    std::string manifest_path = "trsat_manifest.json";
    app.add_option("--manifest", manifest_path, "run manifest output path")->configurable(false);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate CNF instances");
    std::string gen_kind, gen_out = ".", gen_netlist;
    int gen_vars = 100, gen_clauses = 430, gen_count = 1, gen_n = 10, gen_k = 3;
    double gen_p = 0.5;
    uint64_t gen_seed = 1;
    std::vector<std::string> gen_constraints;
    gen->add_option("kind", gen_kind, "rand3|color|cover|clique|circuit")->required();
    gen->add_option("--vars", gen_vars, "rand3: variable count");
    gen->add_option("--clauses", gen_clauses, "rand3: clause count");
    gen->add_option("--n", gen_n, "graph problems: vertex count N");
    gen->add_option("--k", gen_k, "graph problems: parameter k");
    gen->add_option("--p", gen_p, "graph problems: edge probability");
    gen->add_option("--count", gen_count, "number of instances");
    gen->add_option("--seed", gen_seed, "base RNG seed");
    gen->add_option("--out", gen_out, "output directory (or file for circuit)");
    gen->add_option("--netlist", gen_netlist, "circuit: netlist file");
    gen->add_option("--constrain", gen_constraints, "circuit: wire=0|1 (repeatable)");

    // ---- train ----
    auto* train_cmd = app.add_subcommand("train", "train a model on a DIMACS dataset");
    std::string train_data, train_val_data, train_out = "model.ckpt", train_hist = "history.csv";
    ModelConfig mc;
    TrainConfig tc;
    train_cmd->add_option("--data", train_data, "directory of .cnf files")->required();
    train_cmd->add_option("--val-data", train_val_data, "optional validation directory");
    train_cmd->add_option("--out", train_out, "checkpoint output path");
    train_cmd->add_option("--history", train_hist, "training history CSV path");
    train_cmd->add_option("--epochs", tc.epochs);
    train_cmd->add_option("--warmup", tc.warmup_steps);
    train_cmd->add_option("--seed", tc.shuffle_seed);
    train_cmd->add_option("--checkpoint-every", tc.checkpoint_every);
    train_cmd->add_option("--early-stop-val", tc.early_stop_val_rate);
    train_cmd->add_option("--encoder-layers", mc.num_encoder_layers);
    train_cmd->add_option("--decoder-layers", mc.num_decoder_layers);
    train_cmd->add_option("--channels", mc.channels);
    train_cmd->add_option("--heads", mc.heads);
    train_cmd->add_option("--ffn-hidden", mc.ffn_hidden);
    train_cmd->add_option("--tau", mc.tau);
    train_cmd->add_option("--init-seed", mc.init_seed);

    // ---- solve ----
    auto* solve_cmd = app.add_subcommand("solve", "solve one DIMACS instance");
    std::string solve_model, solve_cnf, solve_mode = "maxsat", solve_out;
    int solve_max_iters = 20;
    uint64_t solve_seed = 0;
    solve_cmd->add_option("--model", solve_model, "checkpoint path")->required();
    solve_cmd->add_option("--cnf", solve_cnf, "DIMACS file")->required();
    solve_cmd->add_option("--mode", solve_mode, "maxsat|exact");
    solve_cmd->add_option("--max-iters", solve_max_iters);
    solve_cmd->add_option("--seed", solve_seed);
    solve_cmd->add_option("--out", solve_out, "report file (default stdout)");

    // ---- eval ----
    auto* eval_cmd = app.add_subcommand("eval", "mean/std completion rate over a dataset");
    std::string eval_model, eval_data, eval_name = "dataset";
    uint64_t eval_seed = 12345;
    eval_cmd->add_option("--model", eval_model)->required();
    eval_cmd->add_option("--data", eval_data)->required();
    eval_cmd->add_option("--name", eval_name);
    eval_cmd->add_option("--seed", eval_seed);

    // ---- bench ----
    auto* bench_cmd = app.add_subcommand("bench", "timing comparison vs WalkSAT");
    std::string bench_model, bench_data;
    long bench_flips = 100000;
    uint64_t bench_seed = 0;
    bench_cmd->add_option("--model", bench_model)->required();
    bench_cmd->add_option("--data", bench_data)->required();
    bench_cmd->add_option("--max-flips", bench_flips);
    bench_cmd->add_option("--seed", bench_seed);

    // ---- oracle ----
    auto* oracle_cmd = app.add_subcommand("oracle", "brute-force MaxSAT answer");
    std::string oracle_cnf;
    int oracle_cap = 24;
    oracle_cmd->add_option("--cnf", oracle_cnf)->required();
    oracle_cmd->add_option("--cap", oracle_cap, "variable cap for enumeration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (gen->parsed()) {
        Manifest man("gen", argc, argv);
        man.seed("base", gen_seed);
        if (gen_kind == "circuit") {
            if (gen_netlist.empty()) throw CliError(2, "gen circuit requires --netlist");
            man.input(gen_netlist);
            if (!fs::exists(gen_netlist)) throw CliError(3, "missing file: " + gen_netlist);
            GateNetlist nl;
            try {
                nl = parse_netlist_file(gen_netlist);
            } catch (const ParseError& e) {
                throw CliError(5, e.what());
            }
            std::vector<std::pair<std::string, bool>> cons;
            for (const std::string& c : gen_constraints) {
                auto eq = c.find('=');
                if (eq == std::string::npos) throw CliError(2, "bad --constrain '" + c + "'");
                cons.emplace_back(c.substr(0, eq), c.substr(eq + 1) != "0");
            }
            CnfFormula f = encode_circuit(nl, cons);
            std::string path = gen_out;
            if (fs::is_directory(gen_out)) path = (fs::path(gen_out) / "circuit.cnf").string();
            write_dimacs_file(f, path);
            man.output(path);
            std::cout << "wrote " << path << " (n=" << f.num_variables << " m=" << f.num_clauses()
                      << ")\n";
        } else {
            fs::create_directories(gen_out);
            for (int i = 0; i < gen_count; ++i) {
                uint64_t seed = gen_seed + static_cast<uint64_t>(i);
                CnfFormula f = [&] {
                    if (gen_kind == "rand3") return gen_random_3sat(gen_vars, gen_clauses, seed);
                    RandomGraph g = gen_random_graph(gen_n, gen_p, seed);
                    if (gen_kind == "color") return encode_k_coloring(g, gen_k);
                    if (gen_kind == "cover") return encode_k_cover(g, gen_k);
                    if (gen_kind == "clique") return encode_k_clique(g, gen_k);
                    throw CliError(2, "unknown gen kind '" + gen_kind + "'");
                }();
                char name[64];
                std::snprintf(name, sizeof(name), "%s_%04d.cnf", gen_kind.c_str(), i);
                std::string path = (fs::path(gen_out) / name).string();
                write_dimacs_file(f, path);
                man.output(path);
            }
            std::cout << "wrote " << gen_count << " instances to " << gen_out << '\n';
        }
        man.write(manifest_path);
        return 0;
    }

    if (train_cmd->parsed()) {
        Manifest man("train", argc, argv);
        man.seed("shuffle", tc.shuffle_seed);
        man.seed("init", mc.init_seed);
        man.input(train_data);
        std::vector<CnfFormula> data = load_cnf_dir(train_data);
        std::vector<CnfFormula> val;
        if (!train_val_data.empty()) {
            val = load_cnf_dir(train_val_data);
            man.input(train_val_data);
        }
        man.doc["config"]["model"] = mc.to_text();
        TrainResult r = train(data, tc, mc, val);
        save_checkpoint(r.model, train_out);
        std::ofstream hist(train_hist);
        hist << history_to_csv(r.history);
        hist.close();
        man.output(train_out);
        man.output(train_hist);
        man.write(manifest_path);
        const EpochStats& last = r.history.back();
        std::cout << "trained " << r.history.size() << " epochs, final loss " << last.mean_loss
                  << ", train rate " << last.train_completion << ", val rate "
                  << last.val_completion << '\n';
        return 0;
    }

    if (solve_cmd->parsed()) {
        Manifest man("solve", argc, argv);
        man.seed("instance", solve_seed);
        man.input(solve_model);
        man.input(solve_cnf);
        if (!fs::exists(solve_model)) throw CliError(3, "missing file: " + solve_model);
        TrsatModel model = load_checkpoint(solve_model);
        CnfFormula f = load_cnf(solve_cnf);
        std::string report;
        if (solve_mode == "maxsat") {
            auto [a, stats] = solve_max_sat(model, f, solve_seed);
            SatResult r;
            r.status = stats.satisfied == stats.total ? SolveStatus::satisfied : SolveStatus::partial;
            r.assignment = a;
            r.satisfied_count = stats.satisfied;
            r.iterations = 1;
            report = result_report(f, r);
        } else if (solve_mode == "exact") {
            SatResult r = solve_exact(model, f, solve_max_iters, solve_seed);
            if (!verify_result(f, r)) throw CliError(1, "soundness bug: satisfied claim failed re-verification");
            report = result_report(f, r);
        } else {
            throw CliError(2, "unknown --mode '" + solve_mode + "'");
        }
        if (solve_out.empty()) {
            std::cout << report;
        } else {
            std::ofstream out(solve_out);
            out << report;
            out.close();
            man.output(solve_out);
        }
        man.write(manifest_path);
        return 0;
    }

    if (eval_cmd->parsed()) {
        Manifest man("eval", argc, argv);
        man.seed("eval", eval_seed);
        man.input(eval_model);
        man.input(eval_data);
        if (!fs::exists(eval_model)) throw CliError(3, "missing file: " + eval_model);
        TrsatModel model = load_checkpoint(eval_model);
        std::vector<CnfFormula> data = load_cnf_dir(eval_data);
        EvalStats s = evaluate(model, data, eval_seed);
        std::printf("%s %.4f±%.4f %zu\n", eval_name.c_str(), s.mean, s.stddev,
                    s.per_instance.size());
        man.write(manifest_path);
        return 0;
    }

    if (bench_cmd->parsed()) {
        Manifest man("bench", argc, argv);
        man.seed("walksat", bench_seed);
        man.input(bench_model);
        man.input(bench_data);
        if (!fs::exists(bench_model)) throw CliError(3, "missing file: " + bench_model);
        TrsatModel model = load_checkpoint(bench_model);
        std::vector<CnfFormula> data = load_cnf_dir(bench_data);
        const char* ext = std::getenv("TRSAT_EXT_SOLVER");
        std::printf("# instance model_s walksat_s speedup%s\n", ext ? " external_s" : "");
        for (size_t i = 0; i < data.size(); ++i) {
            const CnfFormula& f = data[i];
            double tm = median_solve_seconds([&] { solve_max_sat(model, f, bench_seed); });
            double tw = median_solve_seconds([&] {
                WalkSatConfig wc;
                wc.max_flips = bench_flips;
                wc.seed = bench_seed;
                walksat(f, wc);
            });
            if (ext) {
                std::string tmp = (fs::temp_directory_path() / "trsat_bench.cnf").string();
                write_dimacs_file(f, tmp);
                double te = median_solve_seconds([&] { run_external_solver(ext, tmp, f.num_variables); });
                std::printf("%zu %.6f %.6f %.2f %.6f\n", i, tm, tw, tw / tm, te);
            } else {
                std::printf("%zu %.6f %.6f %.2f\n", i, tm, tw, tw / tm);
            }
        }
        man.write(manifest_path);
        return 0;
    }

    if (oracle_cmd->parsed()) {
        Manifest man("oracle", argc, argv);
        man.input(oracle_cnf);
        CnfFormula f = load_cnf(oracle_cnf);
        try {
            MaxSatOracleResult r = brute_force_max_sat(f, oracle_cap);
            std::cout << "max_satisfied " << r.best_count << " of " << f.num_clauses() << '\n';
            std::cout << "v";
            for (size_t i = 0; i < r.witness.size(); ++i)
                std::cout << ' ' << (r.witness[i] ? int(i) + 1 : -(int(i) + 1));
            std::cout << " 0\n";
        } catch (const Error& e) {
            throw CliError(4, e.what());
        }
        man.write(manifest_path);
        return 0;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CliError& e) {
        std::cerr << "error code=" << e.code << " msg=\"" << e.what() << "\"\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error code=1 msg=\"" << e.what() << "\"\n";
        return 1;
    }
}
