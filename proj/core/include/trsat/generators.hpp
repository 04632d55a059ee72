#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "trsat/cnf.hpp"

namespace trsat {

struct RandomGraph {
    int num_vertices = 0;
    std::vector<std::pair<int, int>> edges;  // 0-based, first < second, sorted
    uint64_t seed = 0;

    bool has_edge(int u, int v) const;
};

CnfFormula gen_random_3sat(int n, int m, uint64_t seed);
RandomGraph gen_random_graph(int num_vertices, double p, uint64_t seed);

// Variables x_{v,c}: at-least-one and pairwise at-most-one color per vertex,
// conflict clause per edge per color. n = k*N.
CnfFormula encode_k_coloring(const RandomGraph& g, int k);

// N selection variables plus k*N sequential-counter registers (n = (k+1)*N).
// Edge clauses (s_u | s_v) plus cardinality |{v: s_v}| <= k.
CnfFormula encode_k_cover(const RandomGraph& g, int k);

// Slot variables y_{i,v}: per-slot at-least/at-most-one, distinctness, and
// non-edge exclusion clauses. n = k*N.
CnfFormula encode_k_clique(const RandomGraph& g, int k);

enum class GateKind { AND, OR, NOT, XOR };

struct Gate {
    GateKind kind;
    std::vector<std::string> inputs;  // 1 for NOT, 2 otherwise
    std::string output;
};

struct GateNetlist {
    std::vector<std::string> inputs;
    std::vector<Gate> gates;  // topologically ordered
    std::vector<std::string> outputs;
};

// Line format: "INPUT w", "GATE kind out in1 [in2]", "OUTPUT w".
GateNetlist parse_netlist(const std::string& text);
GateNetlist parse_netlist_file(const std::string& path);

// Truth-table reference: evaluate every wire given primary input values.
std::map<std::string, bool> simulate_netlist(const GateNetlist& c,
                                             const std::map<std::string, bool>& input_values);

// One variable per wire, Tseitin clauses per gate, unit clause per constraint.
CnfFormula encode_circuit(const GateNetlist& c,
                          const std::vector<std::pair<std::string, bool>>& output_constraints);

// Wire-name -> CNF variable mapping used by encode_circuit (1-based, inputs
// first in declaration order, then gate outputs).
std::map<std::string, int> circuit_variable_map(const GateNetlist& c);

}  // namespace trsat
