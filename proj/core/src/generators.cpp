#include "trsat/generators.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace trsat {

bool RandomGraph::has_edge(int u, int v) const {
    if (u > v) std::swap(u, v);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
}

CnfFormula gen_random_3sat(int n, int m, uint64_t seed) {
    if (n < 3) throw Error("gen_random_3sat: need n >= 3");
    if (m < 1) throw Error("gen_random_3sat: need m >= 1");
    std::mt19937_64 rng(seed);
    std::vector<Clause> clauses;
    clauses.reserve(m);
    for (int j = 0; j < m; ++j) {
        int v[3];
        v[0] = static_cast<int>(rng() % n);
        do v[1] = static_cast<int>(rng() % n); while (v[1] == v[0]);
        do v[2] = static_cast<int>(rng() % n); while (v[2] == v[0] || v[2] == v[1]);
        std::vector<Literal> lits;
        for (int t = 0; t < 3; ++t) lits.emplace_back(v[t] + 1, (rng() & 1) ? 1 : -1);
        clauses.emplace_back(std::move(lits));
    }
    return CnfFormula(n, std::move(clauses));
}

RandomGraph gen_random_graph(int num_vertices, double p, uint64_t seed) {
    if (p < 0.0 || p > 1.0) throw Error("gen_random_graph: p must be in [0,1]");
    RandomGraph g;
    g.num_vertices = num_vertices;
    g.seed = seed;
    std::mt19937_64 rng(seed);
    const double scale = 1.0 / (static_cast<double>(std::mt19937_64::max()) + 1.0);
    for (int u = 0; u < num_vertices; ++u)
        for (int v = u + 1; v < num_vertices; ++v)
            if (static_cast<double>(rng()) * scale < p) g.edges.emplace_back(u, v);
    return g;
}

CnfFormula encode_k_coloring(const RandomGraph& g, int k) {
    if (k < 1) throw Error("encode_k_coloring: need k >= 1");
    const int N = g.num_vertices;
    auto var = [&](int v, int c) { return v * k + c + 1; };  // x_{v,c}
    std::vector<Clause> clauses;
    for (int v = 0; v < N; ++v) {
        std::vector<Literal> alo;
        for (int c = 0; c < k; ++c) alo.emplace_back(var(v, c), 1);
        clauses.emplace_back(std::move(alo));
        for (int c = 0; c < k; ++c)
            for (int d = c + 1; d < k; ++d)
                clauses.emplace_back(std::vector<Literal>{{var(v, c), -1}, {var(v, d), -1}});
    }
    for (auto [u, v] : g.edges)
        for (int c = 0; c < k; ++c)
            clauses.emplace_back(std::vector<Literal>{{var(u, c), -1}, {var(v, c), -1}});
    return CnfFormula(k * N, std::move(clauses));
}

CnfFormula encode_k_cover(const RandomGraph& g, int k) {
    const int N = g.num_vertices;
    if (k < 1 || k >= N) throw Error("encode_k_cover: need 1 <= k < N");
    auto sel = [&](int v) { return v + 1; };                     // s_v, v in [0,N)
    auto reg = [&](int i, int j) { return N + i * k + j + 1; };  // counter s_{i,j}, i in [0,N), j in [0,k)
    std::vector<Clause> clauses;
    for (auto [u, v] : g.edges)
        clauses.emplace_back(std::vector<Literal>{{sel(u), 1}, {sel(v), 1}});
    // Sequential counter for sum(s_v) <= k over all N selection variables.
    clauses.emplace_back(std::vector<Literal>{{sel(0), -1}, {reg(0, 0), 1}});
    for (int j = 1; j < k; ++j)
        clauses.emplace_back(std::vector<Literal>{{reg(0, j), -1}});
    for (int i = 1; i < N; ++i) {
        clauses.emplace_back(std::vector<Literal>{{sel(i), -1}, {reg(i, 0), 1}});
        clauses.emplace_back(std::vector<Literal>{{reg(i - 1, 0), -1}, {reg(i, 0), 1}});
        for (int j = 1; j < k; ++j) {
            clauses.emplace_back(
                std::vector<Literal>{{sel(i), -1}, {reg(i - 1, j - 1), -1}, {reg(i, j), 1}});
            clauses.emplace_back(std::vector<Literal>{{reg(i - 1, j), -1}, {reg(i, j), 1}});
        }
        clauses.emplace_back(std::vector<Literal>{{sel(i), -1}, {reg(i - 1, k - 1), -1}});
    }
    return CnfFormula((k + 1) * N, std::move(clauses));
}

CnfFormula encode_k_clique(const RandomGraph& g, int k) {
    const int N = g.num_vertices;
    if (k < 1 || k > N) throw Error("encode_k_clique: need 1 <= k <= N");
    auto var = [&](int i, int v) { return i * N + v + 1; };  // y_{i,v}
    std::vector<Clause> clauses;
    for (int i = 0; i < k; ++i) {
        std::vector<Literal> alo;
        for (int v = 0; v < N; ++v) alo.emplace_back(var(i, v), 1);
        clauses.emplace_back(std::move(alo));
        for (int v = 0; v < N; ++v)
            for (int w = v + 1; w < N; ++w)
                clauses.emplace_back(std::vector<Literal>{{var(i, v), -1}, {var(i, w), -1}});
    }
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            for (int v = 0; v < N; ++v)
                clauses.emplace_back(std::vector<Literal>{{var(i, v), -1}, {var(j, v), -1}});
            for (int u = 0; u < N; ++u)
                for (int v = 0; v < N; ++v)
                    if (u != v && !g.has_edge(u, v))
                        clauses.emplace_back(std::vector<Literal>{{var(i, u), -1}, {var(j, v), -1}});
        }
    return CnfFormula(k * N, std::move(clauses));
}

static GateKind parse_gate_kind(const std::string& s) {
    if (s == "AND") return GateKind::AND;
    if (s == "OR") return GateKind::OR;
    if (s == "NOT") return GateKind::NOT;
    if (s == "XOR") return GateKind::XOR;
    throw ParseError("netlist: unknown gate kind '" + s + "'");
}

GateNetlist parse_netlist(const std::string& text) {
    GateNetlist c;
    std::set<std::string> defined;  // wires with a driver so far
    std::set<std::string> all_names;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw) || kw[0] == '#') continue;
        if (kw == "INPUT") {
            std::string w;
            if (!(ls >> w)) throw ParseError("netlist: INPUT without wire at line " + std::to_string(lineno));
            if (!all_names.insert(w).second)
                throw ParseError("netlist: duplicate wire '" + w + "' at line " + std::to_string(lineno));
            c.inputs.push_back(w);
            defined.insert(w);
        } else if (kw == "GATE") {
            std::string kind, out;
            if (!(ls >> kind >> out))
                throw ParseError("netlist: malformed GATE at line " + std::to_string(lineno));
            Gate g;
            g.kind = parse_gate_kind(kind);
            g.output = out;
            std::string w;
            while (ls >> w) g.inputs.push_back(w);
            size_t want = g.kind == GateKind::NOT ? 1 : 2;
            if (g.inputs.size() != want)
                throw ParseError("netlist: gate '" + out + "' expects " + std::to_string(want) +
                                 " inputs at line " + std::to_string(lineno));
            for (const std::string& i : g.inputs)
                if (!defined.count(i))
                    throw ParseError("netlist: gate input '" + i + "' not yet defined at line " +
                                     std::to_string(lineno) + " (unknown wire or cycle)");
            if (!all_names.insert(out).second)
                throw ParseError("netlist: duplicate wire '" + out + "' at line " + std::to_string(lineno));
            defined.insert(out);
            c.gates.push_back(std::move(g));
        } else if (kw == "OUTPUT") {
            std::string w;
            if (!(ls >> w)) throw ParseError("netlist: OUTPUT without wire at line " + std::to_string(lineno));
            if (!defined.count(w)) throw ParseError("netlist: OUTPUT wire '" + w + "' has no driver");
            c.outputs.push_back(w);
        } else {
            throw ParseError("netlist: unknown keyword '" + kw + "' at line " + std::to_string(lineno));
        }
    }
    return c;
}

GateNetlist parse_netlist_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_netlist(buf.str());
}

std::map<std::string, bool> simulate_netlist(const GateNetlist& c,
                                             const std::map<std::string, bool>& input_values) {
    std::map<std::string, bool> wires = input_values;
    for (const std::string& w : c.inputs)
        if (!wires.count(w)) throw Error("simulate_netlist: missing value for input '" + w + "'");
    for (const Gate& g : c.gates) {
        bool a = wires.at(g.inputs[0]);
        bool z = false;
        switch (g.kind) {
            case GateKind::AND: z = a && wires.at(g.inputs[1]); break;
            case GateKind::OR: z = a || wires.at(g.inputs[1]); break;
            case GateKind::NOT: z = !a; break;
            case GateKind::XOR: z = a != wires.at(g.inputs[1]); break;
        }
        wires[g.output] = z;
    }
    return wires;
}

std::map<std::string, int> circuit_variable_map(const GateNetlist& c) {
    std::map<std::string, int> var;
    int next = 1;
    for (const std::string& w : c.inputs) var[w] = next++;
    for (const Gate& g : c.gates) var[g.output] = next++;
    return var;
}

CnfFormula encode_circuit(const GateNetlist& c,
                          const std::vector<std::pair<std::string, bool>>& output_constraints) {
    std::map<std::string, int> var = circuit_variable_map(c);
    std::vector<Clause> clauses;
    for (const Gate& g : c.gates) {
        int z = var.at(g.output);
        int a = var.at(g.inputs[0]);
        switch (g.kind) {
            case GateKind::AND: {
                int b = var.at(g.inputs[1]);
                clauses.emplace_back(std::vector<Literal>{{a, 1}, {z, -1}});
                clauses.emplace_back(std::vector<Literal>{{b, 1}, {z, -1}});
                clauses.emplace_back(std::vector<Literal>{{a, -1}, {b, -1}, {z, 1}});
                break;
            }
            case GateKind::OR: {
                int b = var.at(g.inputs[1]);
                clauses.emplace_back(std::vector<Literal>{{a, -1}, {z, 1}});
                clauses.emplace_back(std::vector<Literal>{{b, -1}, {z, 1}});
                clauses.emplace_back(std::vector<Literal>{{a, 1}, {b, 1}, {z, -1}});
                break;
            }
            case GateKind::NOT: {
                clauses.emplace_back(std::vector<Literal>{{a, 1}, {z, 1}});
                clauses.emplace_back(std::vector<Literal>{{a, -1}, {z, -1}});
                break;
            }
            case GateKind::XOR: {
                int b = var.at(g.inputs[1]);
                clauses.emplace_back(std::vector<Literal>{{a, 1}, {b, 1}, {z, -1}});
                clauses.emplace_back(std::vector<Literal>{{a, 1}, {b, -1}, {z, 1}});
                clauses.emplace_back(std::vector<Literal>{{a, -1}, {b, -1}, {z, -1}});
                clauses.emplace_back(std::vector<Literal>{{a, -1}, {b, 1}, {z, 1}});
                break;
            }
        }
    }
    for (const auto& [wire, value] : output_constraints) {
        auto it = var.find(wire);
        if (it == var.end()) throw Error("encode_circuit: unknown wire '" + wire + "'");
        clauses.emplace_back(std::vector<Literal>{{it->second, value ? 1 : -1}});
    }
    return CnfFormula(static_cast<int>(var.size()), std::move(clauses));
}

}  // namespace trsat
