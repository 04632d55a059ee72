#include "trsat/autodiff.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace trsat {

namespace {
constexpr double kLayerNormEps = 1e-5;
constexpr double kScoreClamp = 1e-12;
}  // namespace

Tape::NodeId Tape::push(std::string op, DenseMatrix value,
                        std::function<void(Tape&, const Node&)> bw) {
    Node n;
    n.op = std::move(op);
    n.grad = DenseMatrix(value.rows, value.cols);
    n.value = std::move(value);
    n.backward = std::move(bw);
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size()) - 1;
}

void Tape::check_finite(const DenseMatrix& m, const char* where) const {
    for (double x : m.data)
        if (!std::isfinite(x)) throw Error(std::string(where) + ": non-finite value");
}

int Tape::count_op(const std::string& op) const {
    int c = 0;
    for (const Node& n : nodes_)
        if (n.op == op) ++c;
    return c;
}

Tape::NodeId Tape::constant(DenseMatrix v) { return push("constant", std::move(v), nullptr); }

Tape::NodeId Tape::leaf(Parameter& p) {
    NodeId id = push("leaf", p.value, nullptr);
    nodes_[id].param = &p;
    return id;
}

Tape::NodeId Tape::matmul(NodeId x, NodeId w) {
    const DenseMatrix& a = nodes_[x].value;
    const DenseMatrix& b = nodes_[w].value;
    if (a.cols != b.rows) throw Error("matmul: shape mismatch");
    DenseMatrix out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            double av = a.at(i, k);
            if (av == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) out.at(i, j) += av * b.at(k, j);
        }
    return push("matmul", std::move(out), [x, w](Tape& t, const Node& self) {
        const DenseMatrix& a = t.nodes_[x].value;
        const DenseMatrix& b = t.nodes_[w].value;
        DenseMatrix& da = t.nodes_[x].grad;
        DenseMatrix& db = t.nodes_[w].grad;
        const DenseMatrix& g = self.grad;
        for (int i = 0; i < a.rows; ++i)
            for (int j = 0; j < b.cols; ++j) {
                double gv = g.at(i, j);
                if (gv == 0.0) continue;
                for (int k = 0; k < a.cols; ++k) {
                    da.at(i, k) += gv * b.at(k, j);
                    db.at(k, j) += a.at(i, k) * gv;
                }
            }
    });
}

Tape::NodeId Tape::affine(NodeId x, NodeId w, NodeId b) {
    NodeId xw = matmul(x, w);
    const DenseMatrix& bias = nodes_[b].value;
    const DenseMatrix& base = nodes_[xw].value;
    if (bias.rows != 1 || bias.cols != base.cols) throw Error("affine: bias shape mismatch");
    DenseMatrix out = base;
    for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < out.cols; ++j) out.at(i, j) += bias.at(0, j);
    return push("affine", std::move(out), [xw, b](Tape& t, const Node& self) {
        DenseMatrix& dxw = t.nodes_[xw].grad;
        DenseMatrix& db = t.nodes_[b].grad;
        for (int i = 0; i < self.grad.rows; ++i)
            for (int j = 0; j < self.grad.cols; ++j) {
                dxw.at(i, j) += self.grad.at(i, j);
                db.at(0, j) += self.grad.at(i, j);
            }
    });
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
    const DenseMatrix& va = nodes_[a].value;
    const DenseMatrix& vb = nodes_[b].value;
    if (va.rows != vb.rows || va.cols != vb.cols) throw Error("add: shape mismatch");
    DenseMatrix out = va;
    for (size_t i = 0; i < out.size(); ++i) out.data[i] += vb.data[i];
    return push("add", std::move(out), [a, b](Tape& t, const Node& self) {
        DenseMatrix& da = t.nodes_[a].grad;
        DenseMatrix& db = t.nodes_[b].grad;
        for (size_t i = 0; i < self.grad.size(); ++i) {
            da.data[i] += self.grad.data[i];
            db.data[i] += self.grad.data[i];
        }
    });
}

Tape::NodeId Tape::mul(NodeId a, NodeId b) {
    const DenseMatrix& va = nodes_[a].value;
    const DenseMatrix& vb = nodes_[b].value;
    if (va.rows != vb.rows || va.cols != vb.cols) throw Error("mul: shape mismatch");
    DenseMatrix out = va;
    for (size_t i = 0; i < out.size(); ++i) out.data[i] *= vb.data[i];
    return push("mul", std::move(out), [a, b](Tape& t, const Node& self) {
        DenseMatrix& da = t.nodes_[a].grad;
        DenseMatrix& db = t.nodes_[b].grad;
        const DenseMatrix& va = t.nodes_[a].value;
        const DenseMatrix& vb = t.nodes_[b].value;
        for (size_t i = 0; i < self.grad.size(); ++i) {
            da.data[i] += self.grad.data[i] * vb.data[i];
            db.data[i] += self.grad.data[i] * va.data[i];
        }
    });
}

Tape::NodeId Tape::relu(NodeId a) {
    DenseMatrix out = nodes_[a].value;
    for (double& x : out.data) x = x > 0.0 ? x : 0.0;
    return push("relu", std::move(out), [a](Tape& t, const Node& self) {
        const DenseMatrix& in = t.nodes_[a].value;
        DenseMatrix& da = t.nodes_[a].grad;
        for (size_t i = 0; i < in.size(); ++i)
            if (in.data[i] > 0.0) da.data[i] += self.grad.data[i];
    });
}

Tape::NodeId Tape::sigmoid(NodeId a) {
    DenseMatrix out = nodes_[a].value;
    for (double& x : out.data) x = 1.0 / (1.0 + std::exp(-x));
    NodeId id = push("sigmoid", std::move(out), nullptr);
    nodes_[id].backward = [a, id](Tape& t, const Node& self) {
        const DenseMatrix& y = t.nodes_[id].value;
        DenseMatrix& da = t.nodes_[a].grad;
        for (size_t i = 0; i < y.size(); ++i)
            da.data[i] += self.grad.data[i] * y.data[i] * (1.0 - y.data[i]);
    };
    return id;
}

Tape::NodeId Tape::layer_norm(NodeId x, NodeId gain, NodeId bias) {
    const DenseMatrix& in = nodes_[x].value;
    const DenseMatrix& g = nodes_[gain].value;
    const DenseMatrix& b = nodes_[bias].value;
    if (g.rows != 1 || g.cols != in.cols || b.rows != 1 || b.cols != in.cols)
        throw Error("layer_norm: gain/bias shape mismatch");
    const int F = in.cols;
    DenseMatrix out(in.rows, F);
    for (int i = 0; i < in.rows; ++i) {
        double mu = 0.0;
        for (int j = 0; j < F; ++j) mu += in.at(i, j);
        mu /= F;
        double var = 0.0;
        for (int j = 0; j < F; ++j) {
            double d = in.at(i, j) - mu;
            var += d * d;
        }
        var /= F;
        double inv = 1.0 / std::sqrt(var + kLayerNormEps);
        for (int j = 0; j < F; ++j)
            out.at(i, j) = g.at(0, j) * (in.at(i, j) - mu) * inv + b.at(0, j);
    }
    return push("layer_norm", std::move(out), [x, gain, bias](Tape& t, const Node& self) {
        const DenseMatrix& in = t.nodes_[x].value;
        const DenseMatrix& g = t.nodes_[gain].value;
        DenseMatrix& dx = t.nodes_[x].grad;
        DenseMatrix& dg = t.nodes_[gain].grad;
        DenseMatrix& db = t.nodes_[bias].grad;
        const int F = in.cols;
        for (int i = 0; i < in.rows; ++i) {
            double mu = 0.0;
            for (int j = 0; j < F; ++j) mu += in.at(i, j);
            mu /= F;
            double var = 0.0;
            for (int j = 0; j < F; ++j) {
                double d = in.at(i, j) - mu;
                var += d * d;
            }
            var /= F;
            double inv = 1.0 / std::sqrt(var + kLayerNormEps);
            double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
            for (int j = 0; j < F; ++j) {
                double xhat = (in.at(i, j) - mu) * inv;
                double dout = self.grad.at(i, j);
                dg.at(0, j) += dout * xhat;
                db.at(0, j) += dout;
                double dxhat = dout * g.at(0, j);
                mean_dxhat += dxhat;
                mean_dxhat_xhat += dxhat * xhat;
            }
            mean_dxhat /= F;
            mean_dxhat_xhat /= F;
            for (int j = 0; j < F; ++j) {
                double xhat = (in.at(i, j) - mu) * inv;
                double dxhat = self.grad.at(i, j) * g.at(0, j);
                dx.at(i, j) += inv * (dxhat - mean_dxhat - xhat * mean_dxhat_xhat);
            }
        }
    });
}

Tape::NodeId Tape::concat_cols(const std::vector<NodeId>& parts) {
    if (parts.empty()) throw Error("concat_cols: empty");
    int rows = nodes_[parts[0]].value.rows;
    int cols = 0;
    for (NodeId p : parts) {
        if (nodes_[p].value.rows != rows) throw Error("concat_cols: row mismatch");
        cols += nodes_[p].value.cols;
    }
    DenseMatrix out(rows, cols);
    int off = 0;
    for (NodeId p : parts) {
        const DenseMatrix& v = nodes_[p].value;
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < v.cols; ++j) out.at(i, off + j) = v.at(i, j);
        off += v.cols;
    }
    std::vector<NodeId> ps = parts;
    return push("concat_cols", std::move(out), [ps](Tape& t, const Node& self) {
        int off = 0;
        for (NodeId p : ps) {
            DenseMatrix& dp = t.nodes_[p].grad;
            for (int i = 0; i < dp.rows; ++i)
                for (int j = 0; j < dp.cols; ++j) dp.at(i, j) += self.grad.at(i, off + j);
            off += dp.cols;
        }
    });
}

Tape::NodeId Tape::broadcast_row(NodeId row, int n) {
    const DenseMatrix& r = nodes_[row].value;
    if (r.rows != 1) throw Error("broadcast_row: expected 1 x F input");
    DenseMatrix out(n, r.cols);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < r.cols; ++j) out.at(i, j) = r.at(0, j);
    return push("broadcast_row", std::move(out), [row](Tape& t, const Node& self) {
        DenseMatrix& dr = t.nodes_[row].grad;
        for (int i = 0; i < self.grad.rows; ++i)
            for (int j = 0; j < self.grad.cols; ++j) dr.at(0, j) += self.grad.at(i, j);
    });
}

Tape::NodeId Tape::sum(NodeId a) {
    double s = 0.0;
    for (double x : nodes_[a].value.data) s += x;
    DenseMatrix out(1, 1);
    out.at(0, 0) = s;
    return push("sum", std::move(out), [a](Tape& t, const Node& self) {
        DenseMatrix& da = t.nodes_[a].grad;
        for (double& g : da.data) g += self.grad.at(0, 0);
    });
}

Tape::NodeId Tape::sparse_attention(NodeId q, NodeId k, NodeId v, const SparseMatrix& topology,
                                    int heads) {
    const DenseMatrix& Q = nodes_[q].value;
    const DenseMatrix& K = nodes_[k].value;
    const DenseMatrix& V = nodes_[v].value;
    if (Q.cols != K.cols) throw Error("sparse_attention: q/k feature mismatch");
    if (K.rows != V.rows) throw Error("sparse_attention: k/v row mismatch");
    if (Q.cols % heads != 0 || V.cols % heads != 0)
        throw Error("sparse_attention: feature dims not divisible by heads");
    if (topology.rows != Q.rows || topology.cols != K.rows)
        throw Error("sparse_attention: topology shape mismatch");
    check_finite(Q, "sparse_attention q");
    check_finite(K, "sparse_attention k");
    check_finite(V, "sparse_attention v");

    const int dk = Q.cols / heads;
    const int dv = V.cols / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
    const int nnz = topology.nnz();

    // alphas[e * heads + h] for edge index e in CSR order.
    auto alphas = std::make_shared<std::vector<double>>(size_t(nnz) * heads, 0.0);
    DenseMatrix out(Q.rows, V.cols);
    std::vector<double> scores;
    for (int i = 0; i < topology.rows; ++i) {
        int beg = topology.row_ptr[i], end = topology.row_ptr[i + 1];
        if (beg == end) continue;  // empty neighborhood: zero message
        for (int h = 0; h < heads; ++h) {
            scores.assign(end - beg, 0.0);
            double mx = -std::numeric_limits<double>::infinity();
            for (int e = beg; e < end; ++e) {
                int j = topology.col_idx[e];
                double s = 0.0;
                for (int d = 0; d < dk; ++d) s += Q.at(i, h * dk + d) * K.at(j, h * dk + d);
                s *= scale;
                scores[e - beg] = s;
                mx = std::max(mx, s);
            }
            double z = 0.0;
            for (int e = beg; e < end; ++e) z += std::exp(scores[e - beg] - mx);
            for (int e = beg; e < end; ++e) {
                double alpha = std::exp(scores[e - beg] - mx) / z;
                (*alphas)[size_t(e) * heads + h] = alpha;
                int j = topology.col_idx[e];
                for (int d = 0; d < dv; ++d) out.at(i, h * dv + d) += alpha * V.at(j, h * dv + d);
            }
        }
    }

    SparseMatrix topo = topology;  // captured for backward
    return push("sparse_attention", std::move(out),
                [q, k, v, topo = std::move(topo), heads, dk, dv, scale, alphas](Tape& t,
                                                                                const Node& self) {
                    const DenseMatrix& Q = t.nodes_[q].value;
                    const DenseMatrix& K = t.nodes_[k].value;
                    const DenseMatrix& V = t.nodes_[v].value;
                    DenseMatrix& dQ = t.nodes_[q].grad;
                    DenseMatrix& dK = t.nodes_[k].grad;
                    DenseMatrix& dV = t.nodes_[v].grad;
                    std::vector<double> dalpha;
                    for (int i = 0; i < topo.rows; ++i) {
                        int beg = topo.row_ptr[i], end = topo.row_ptr[i + 1];
                        if (beg == end) continue;
                        for (int h = 0; h < heads; ++h) {
                            dalpha.assign(end - beg, 0.0);
                            double dot_sum = 0.0;
                            for (int e = beg; e < end; ++e) {
                                int j = topo.col_idx[e];
                                double da = 0.0;
                                for (int d = 0; d < dv; ++d)
                                    da += self.grad.at(i, h * dv + d) * V.at(j, h * dv + d);
                                dalpha[e - beg] = da;
                                double alpha = (*alphas)[size_t(e) * heads + h];
                                dot_sum += alpha * da;
                                for (int d = 0; d < dv; ++d)
                                    dV.at(j, h * dv + d) += alpha * self.grad.at(i, h * dv + d);
                            }
                            for (int e = beg; e < end; ++e) {
                                int j = topo.col_idx[e];
                                double alpha = (*alphas)[size_t(e) * heads + h];
                                double ds = alpha * (dalpha[e - beg] - dot_sum) * scale;
                                for (int d = 0; d < dk; ++d) {
                                    dQ.at(i, h * dk + d) += ds * K.at(j, h * dk + d);
                                    dK.at(j, h * dk + d) += ds * Q.at(i, h * dk + d);
                                }
                            }
                        }
                    }
                });
}

namespace {

struct ClauseScore {
    double score = 0.0;              // smoothmax of literal values
    std::vector<double> weights;     // softmax(tau * lit values)
    std::vector<double> lit_values;  // l(x_i, e)
};

ClauseScore clause_smoothmax(const std::vector<double>& x, const Clause& c, double tau) {
    ClauseScore r;
    r.lit_values.reserve(c.literals.size());
    double mx = -std::numeric_limits<double>::infinity();
    for (const Literal& l : c.literals) {
        double xi = x[l.variable - 1];
        double lv = l.polarity > 0 ? xi : 1.0 - xi;
        r.lit_values.push_back(lv);
        mx = std::max(mx, tau * lv);
    }
    double z = 0.0;
    for (double lv : r.lit_values) z += std::exp(tau * lv - mx);
    r.weights.resize(r.lit_values.size());
    for (size_t i = 0; i < r.lit_values.size(); ++i) {
        r.weights[i] = std::exp(tau * r.lit_values[i] - mx) / z;
        r.score += r.weights[i] * r.lit_values[i];
    }
    return r;
}

}  // namespace

Tape::NodeId Tape::sat_loss(NodeId x, const CnfFormula& f, double tau) {
    const DenseMatrix& X = nodes_[x].value;
    if (X.cols != 1 || X.rows != f.num_variables) throw Error("sat_loss: expected n x 1 input");
    if (tau <= 0.0) throw Error("sat_loss: tau must be positive");
    std::vector<double> xv(X.data);
    double loss = 0.0;
    for (const Clause& c : f.clauses) {
        ClauseScore cs = clause_smoothmax(xv, c, tau);
        loss -= std::log(std::max(cs.score, kScoreClamp));
    }
    if (!std::isfinite(loss)) throw Error("sat_loss: non-finite loss");
    DenseMatrix out(1, 1);
    out.at(0, 0) = loss;
    const CnfFormula* fp = &f;
    return push("sat_loss", std::move(out), [x, fp, tau](Tape& t, const Node& self) {
        const DenseMatrix& X = t.nodes_[x].value;
        DenseMatrix& dX = t.nodes_[x].grad;
        std::vector<double> xv(X.data);
        double seed = self.grad.at(0, 0);
        for (const Clause& c : fp->clauses) {
            ClauseScore cs = clause_smoothmax(xv, c, tau);
            if (cs.score <= kScoreClamp) continue;  // clamped region, zero gradient
            double dS = -seed / cs.score;
            for (size_t i = 0; i < c.literals.size(); ++i) {
                double dl = dS * cs.weights[i] * (1.0 + tau * (cs.lit_values[i] - cs.score));
                dX.at(c.literals[i].variable - 1, 0) += c.literals[i].polarity > 0 ? dl : -dl;
            }
        }
    });
}

void Tape::backward(NodeId loss_node, double loss_seed) {
    if (backward_done_) throw Error("backward: already invoked on this tape");
    backward_done_ = true;
    Node& loss = nodes_[loss_node];
    if (loss.value.rows != 1 || loss.value.cols != 1)
        throw Error("backward: loss node must be a scalar");
    loss.grad.at(0, 0) = loss_seed;
    for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i)
        if (nodes_[i].backward) nodes_[i].backward(*this, nodes_[i]);
    for (Node& n : nodes_)
        if (n.param)
            for (size_t i = 0; i < n.grad.size(); ++i) n.param->grad.data[i] += n.grad.data[i];
}

double grad_check(const std::function<double()>& loss_fn, std::vector<Parameter*> params,
                  double h) {
    double max_rel = 0.0;
    for (Parameter* p : params) {
        for (size_t i = 0; i < p->value.size(); ++i) {
            double orig = p->value.data[i];
            p->value.data[i] = orig + h;
            double lp = loss_fn();
            p->value.data[i] = orig - h;
            double lm = loss_fn();
            p->value.data[i] = orig;
            if (!std::isfinite(lp) || !std::isfinite(lm)) throw Error("grad_check: non-finite loss");
            double fd = (lp - lm) / (2.0 * h);
            double an = p->grad.data[i];
            double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8});
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

}  // namespace trsat
