#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "trsat/cnf.hpp"
#include "trsat/sparse.hpp"

namespace trsat {

struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;  // row-major

    DenseMatrix() = default;
    DenseMatrix(int r, int c, double fill = 0.0) : rows(r), cols(c), data(size_t(r) * c, fill) {}

    double& at(int r, int c) { return data[size_t(r) * cols + c]; }
    double at(int r, int c) const { return data[size_t(r) * cols + c]; }
    size_t size() const { return data.size(); }
    void zero() { std::fill(data.begin(), data.end(), 0.0); }
    bool operator==(const DenseMatrix&) const = default;
};

struct Parameter {
    std::string name;
    DenseMatrix value;
    DenseMatrix grad;

    Parameter() = default;
    Parameter(std::string n, DenseMatrix v)
        : name(std::move(n)), value(std::move(v)), grad(value.rows, value.cols) {}
    void zero_grad() { grad.zero(); }
};

// Reverse-mode tape over the fixed primitive set the model needs. One
// forward build, one backward replay; a second backward on the same tape
// is an error.
class Tape {
public:
    using NodeId = int;

    NodeId constant(DenseMatrix v);
    NodeId leaf(Parameter& p);  // gradient accumulates into p.grad on backward

    NodeId matmul(NodeId x, NodeId w);
    NodeId affine(NodeId x, NodeId w, NodeId b);  // x*w + row-broadcast b (b is 1 x cols)
    NodeId add(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);  // elementwise
    NodeId relu(NodeId a);
    NodeId sigmoid(NodeId a);
    // per-row standardization with stabilizer 1e-5, then gain*xhat + bias
    // (gain/bias are 1 x cols).
    NodeId layer_norm(NodeId x, NodeId gain, NodeId bias);
    NodeId concat_cols(const std::vector<NodeId>& parts);
    NodeId broadcast_row(NodeId row, int n);  // tile a 1 x F row to n x F
    NodeId sum(NodeId a);                     // 1x1 sum of all entries

    // Multi-head softmax attention restricted to edges of `topology`
    // (rows index queries, cols index keys/values). Rows with no
    // neighbors emit zeros.
    NodeId sparse_attention(NodeId q, NodeId k, NodeId v, const SparseMatrix& topology, int heads);

    // x is n x 1 in [0,1]. Negative log of the per-clause smoothmax of
    // literal values, summed over clauses; scores clamped at 1e-12.
    NodeId sat_loss(NodeId x, const CnfFormula& f, double tau);

    const DenseMatrix& value(NodeId id) const { return nodes_[id].value; }
    const DenseMatrix& grad(NodeId id) const { return nodes_[id].grad; }

    void backward(NodeId loss_node, double loss_seed = 1.0);

    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int count_op(const std::string& op) const;

private:
    struct Node {
        std::string op;
        DenseMatrix value;
        DenseMatrix grad;
        Parameter* param = nullptr;
        std::function<void(Tape&, const Node&)> backward;
    };

    NodeId push(std::string op, DenseMatrix value, std::function<void(Tape&, const Node&)> bw);
    void check_finite(const DenseMatrix& m, const char* where) const;

    std::vector<Node> nodes_;
    bool backward_done_ = false;

    friend struct TapeTestAccess;
};

// Central finite differences over every parameter coordinate. Returns the
// maximum relative error against the gradients already stored in params
// (denominator max(|a|,|b|,1e-8)). loss_fn must be a deterministic fresh
// forward pass.
double grad_check(const std::function<double()>& loss_fn, std::vector<Parameter*> params, double h);

}  // namespace trsat
