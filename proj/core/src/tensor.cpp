#include "polystyle/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace polystyle {

namespace {

thread_local Tape* g_active_tape = nullptr;
thread_local int g_no_grad_depth = 0;

std::string shape_str(const std::vector<int>& s) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) os << ",";
        os << s[i];
    }
    os << "]";
    return os.str();
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
    throw std::invalid_argument(std::string("op '") + op + "': incompatible shapes " +
                                shape_str(a.shape()) + " and " + shape_str(b.shape()));
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const std::string& why) {
    throw std::invalid_argument(std::string("op '") + op + "': bad shape " +
                                shape_str(a.shape()) + " (" + why + ")");
}

void check_finite(const char* op, const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw numeric_error(std::string("op '") + op + "' produced a non-finite value");
        }
    }
}

int numel(const std::vector<int>& shape) {
    int n = 1;
    for (int d : shape) n *= d;
    return n;
}

bool any_requires_grad(std::initializer_list<const Tensor*> ts) {
    for (const Tensor* t : ts) {
        if (t->defined() && t->requires_grad()) return true;
    }
    return false;
}

void ensure_grad(const std::shared_ptr<TensorNode>& n) {
    if (n->grad.size() != n->data.size()) n->grad.assign(n->data.size(), 0.0);
}

// Builds the output tensor for an op and, when tracing, marks it diff'able.
Tensor make_output(const char* op, std::vector<int> shape, std::vector<double> data,
                   bool traced) {
    check_finite(op, data);
    Tensor out(std::move(shape), std::move(data));
    if (traced) out.set_requires_grad(true);
    return out;
}

bool trace_now(std::initializer_list<const Tensor*> inputs) {
    return Tape::recording() && any_requires_grad(inputs);
}

}  // namespace

// ---- Tensor -----------------------------------------------------------------

Tensor::Tensor(std::vector<int> shape) {
    node_ = std::make_shared<TensorNode>();
    node_->data.assign(static_cast<size_t>(numel(shape)), 0.0);
    node_->shape = std::move(shape);
}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data) {
    if (static_cast<int>(data.size()) != numel(shape)) {
        throw std::invalid_argument("tensor: data size " + std::to_string(data.size()) +
                                    " does not match shape " + shape_str(shape));
    }
    node_ = std::make_shared<TensorNode>();
    node_->shape = std::move(shape);
    node_->data = std::move(data);
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::parameter(std::vector<int> shape, std::vector<double> data) {
    Tensor t(std::move(shape), std::move(data));
    t.node_->requires_grad = true;
    ensure_grad(t.node_);
    return t;
}

double Tensor::value() const {
    if (size() != 1) {
        throw std::invalid_argument("value(): tensor has " + std::to_string(size()) +
                                    " elements, expected 1");
    }
    return node_->data[0];
}

void Tensor::set_requires_grad(bool b) {
    node_->requires_grad = b;
    if (b) ensure_grad(node_);
}

std::vector<double>& Tensor::grad() {
    ensure_grad(node_);
    return node_->grad;
}

const std::vector<double>& Tensor::grad() const {
    ensure_grad(node_);
    return node_->grad;
}

void Tensor::zero_grad() {
    node_->grad.assign(node_->data.size(), 0.0);
}

// ---- Tape -------------------------------------------------------------------

Tape::Tape() {
    if (g_active_tape != nullptr) {
        throw std::logic_error("a tape is already active on this thread");
    }
    g_active_tape = this;
}

Tape::~Tape() {
    if (g_active_tape == this) g_active_tape = nullptr;
}

bool Tape::recording() {
    return g_active_tape != nullptr && g_no_grad_depth == 0;
}

void Tape::record(std::function<void()> step) {
    g_active_tape->steps_.push_back(std::move(step));
}

void Tape::backward(const Tensor& loss) {
    if (used_) {
        throw std::logic_error("backward() already called on this tape; rebuild the forward pass");
    }
    if (loss.size() != 1) {
        throw std::invalid_argument("backward(): loss must be a scalar");
    }
    if (steps_.empty()) {
        throw std::logic_error("backward(): tape is empty");
    }
    used_ = true;
    ensure_grad(loss.shared_node());
    loss.shared_node()->grad[0] = 1.0;
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
}

void backward(const Tensor& loss) {
    if (g_active_tape == nullptr) {
        throw std::logic_error("backward(): no active tape");
    }
    g_active_tape->backward(loss);
}

NoGradGuard::NoGradGuard() { ++g_no_grad_depth; }
NoGradGuard::~NoGradGuard() { --g_no_grad_depth; }

// ---- SGD --------------------------------------------------------------------

void SgdConfig::validate() const {
    if (!(learning_rate > 0)) throw std::invalid_argument("sgd: learning_rate must be positive");
    if (!(decay_factor > 0 && decay_factor < 1)) {
        throw std::invalid_argument("sgd: decay_factor must be in (0,1)");
    }
    if (!(min_learning_rate > 0)) {
        throw std::invalid_argument("sgd: min_learning_rate must be positive");
    }
    if (min_learning_rate > learning_rate) {
        throw std::invalid_argument("sgd: min_learning_rate must not exceed learning_rate");
    }
}

void sgd_step(std::vector<NamedParam>& params, double learning_rate) {
    for (auto& p : params) {
        auto node = p.value.shared_node();
        ensure_grad(node);
        for (double g : node->grad) {
            if (!std::isfinite(g)) {
                throw numeric_error("sgd_step: non-finite gradient in parameter '" + p.name + "'");
            }
        }
        for (size_t i = 0; i < node->data.size(); ++i) {
            node->data[i] -= learning_rate * node->grad[i];
        }
        node->grad.assign(node->data.size(), 0.0);
    }
}

void sgd_step(std::vector<NamedParam>& params, const SgdConfig& config) {
    config.validate();
    sgd_step(params, config.learning_rate);
}

Tensor init_uniform(std::vector<int> shape, int fan_in, std::mt19937_64& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    std::vector<double> data(static_cast<size_t>(numel(shape)));
    for (double& v : data) v = dist(rng);
    return Tensor::parameter(std::move(shape), std::move(data));
}

// ---- elementwise ops ----------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) shape_error("add", a, b);
    std::vector<double> out(a.data().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
    const bool traced = trace_now({&a, &b});
    Tensor y = make_output("add", a.shape(), std::move(out), traced);
    if (traced) {
        auto an = a.shared_node(), bn = b.shared_node(), yn = y.shared_node();
        const bool need_a = an->requires_grad, need_b = bn->requires_grad;
        Tape::record([an, bn, yn, need_a, need_b] {
            if (need_a) {
                ensure_grad(an);
                for (size_t i = 0; i < yn->grad.size(); ++i) an->grad[i] += yn->grad[i];
            }
            if (need_b) {
                ensure_grad(bn);
                for (size_t i = 0; i < yn->grad.size(); ++i) bn->grad[i] += yn->grad[i];
            }
        });
    }
    return y;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) shape_error("sub", a, b);
    std::vector<double> out(a.data().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
    const bool traced = trace_now({&a, &b});
    Tensor y = make_output("sub", a.shape(), std::move(out), traced);
    if (traced) {
        auto an = a.shared_node(), bn = b.shared_node(), yn = y.shared_node();
        const bool need_a = an->requires_grad, need_b = bn->requires_grad;
        Tape::record([an, bn, yn, need_a, need_b] {
            if (need_a) {
                ensure_grad(an);
                for (size_t i = 0; i < yn->grad.size(); ++i) an->grad[i] += yn->grad[i];
            }
            if (need_b) {
                ensure_grad(bn);
                for (size_t i = 0; i < yn->grad.size(); ++i) bn->grad[i] -= yn->grad[i];
            }
        });
    }
    return y;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) shape_error("mul", a, b);
    std::vector<double> out(a.data().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
    const bool traced = trace_now({&a, &b});
    Tensor y = make_output("mul", a.shape(), std::move(out), traced);
    if (traced) {
        auto an = a.shared_node(), bn = b.shared_node(), yn = y.shared_node();
        const bool need_a = an->requires_grad, need_b = bn->requires_grad;
        Tape::record([an, bn, yn, need_a, need_b] {
            if (need_a) {
                ensure_grad(an);
                for (size_t i = 0; i < yn->grad.size(); ++i) an->grad[i] += yn->grad[i] * bn->data[i];
            }
            if (need_b) {
                ensure_grad(bn);
                for (size_t i = 0; i < yn->grad.size(); ++i) bn->grad[i] += yn->grad[i] * an->data[i];
            }
        });
    }
    return y;
}

Tensor scale(const Tensor& a, double c) {
    std::vector<double> out(a.data().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * c;
    const bool traced = trace_now({&a});
    Tensor y = make_output("scale", a.shape(), std::move(out), traced);
    if (traced) {
        auto an = a.shared_node(), yn = y.shared_node();
        Tape::record([an, yn, c] {
            ensure_grad(an);
            for (size_t i = 0; i < yn->grad.size(); ++i) an->grad[i] += yn->grad[i] * c;
        });
    }
    return y;
}

Tensor add_scalar(const Tensor& a, double c) {
    std::vector<double> out(a.data().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + c;
    const bool traced = trace_now({&a});
    Tensor y = make_output("add_scalar", a.shape(), std::move(out), traced);
    if (traced) {
        auto an = a.shared_node(), yn = y.shared_node();
        Tape::record([an, yn] {
            ensure_grad(an);
            for (size_t i = 0; i < yn->grad.size(); ++i) an->grad[i] += yn->grad[i];
        });
    }
    return y;
}

// ---- matmul -------------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) shape_error("matmul", a, b);
    const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
    std::vector<double> out(static_cast<size_t>(m) * n, 0.0);
    const double* pa = a.data().data();
    const double* pb = b.data().data();
    for (int i = 0; i < m; ++i) {
        for (int p = 0; p < k; ++p) {
            const double av = pa[i * k + p];
            if (av == 0.0) continue;
            const double* brow = pb + p * n;
            double* orow = out.data() + i * n;
            for (int j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    }
    const bool traced = trace_now({&a, &b});
    Tensor y = make_output("matmul", {m, n}, std::move(out), traced);
    if (traced) {
        auto an = a.shared_node(), bn = b.shared_node(), yn = y.shared_node();
        const bool need_a = an->requires_grad, need_b = bn->requires_grad;
        Tape::record([an, bn, yn, m, k, n, need_a, need_b] {
            const double* g = yn->grad.data();
            if (need_a) {
                ensure_grad(an);
                // dA = G * B^T
                for (int i = 0; i < m; ++i) {
                    for (int p = 0; p < k; ++p) {
                        double s = 0.0;
                        const double* grow = g + i * n;
                        const double* brow = bn->data.data() + p * n;
                        for (int j = 0; j < n; ++j) s += grow[j] * brow[j];
                        an->grad[i * k + p] += s;
                    }
                }
            }
            if (need_b) {
                ensure_grad(bn);
                // dB = A^T * G
                for (int p = 0; p < k; ++p) {
                    for (int i = 0; i < m; ++i) {
                        const double av = an->data[i * k + p];
                        if (av == 0.0) continue;
                        const double* grow = g + i * n;
                        double* brow = bn->grad.data() + p * n;
                        for (int j = 0; j < n; ++j) brow[j] += av * grow[j];
                    }
                }
            }
        });
    }
    return y;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(1)) shape_error("matmul_nt", a, b);
    const int m = a.dim(0), k = a.dim(1), n = b.dim(0);
    std::vector<double> out(static_cast<size_t>(m) * n, 0.0);
    for (int i = 0; i < m; ++i) {
        const double* arow = a.data().data() + i * k;
        for (int j = 0; j < n; ++j) {
            const double* brow = b.data().data() + j * k;
            double s = 0.0;
            for (int p = 0; p < k; ++p) s += arow[p] * brow[p];
            out[static_cast<size_t>(i) * n + j] = s;
        }
    }
    const bool traced = trace_now({&a, &b});
    Tensor y = make_output("matmul_nt", {m, n}, std::move(out), traced);
    if (traced) {
        auto an = a.shared_node(), bn = b.shared_node(), yn = y.shared_node();
        const bool need_a = an->requires_grad, need_b = bn->requires_grad;
        Tape::record([an, bn, yn, m, k, n, need_a, need_b] {
            const double* g = yn->grad.data();
            if (need_a) {
                ensure_grad(an);
                for (int i = 0; i < m; ++i) {
                    for (int j = 0; j < n; ++j) {
                        const double gv = g[i * n + j];
                        if (gv == 0.0) continue;
                        const double* brow = bn->data.data() + j * k;
                        double* arow = an->grad.data() + i * k;
                        for (int p = 0; p < k; ++p) arow[p] += gv * brow[p];
                    }
                }
            }
            if (need_b) {
                ensure_grad(bn);
                for (int j = 0; j < n; ++j) {
                    for (int i = 0; i < m; ++i) {
                        const double gv = g[i * n + j];
                        if (gv == 0.0) continue;
                        const double* arow = an->data.data() + i * k;
                        double* brow = bn->grad.data() + j * k;
                        for (int p = 0; p < k; ++p) brow[p] += gv * arow[p];
                    }
                }
            }
        });
    }
    return y;
}

// ---- conv1d -------------------------------------------------------------------

Tensor conv1d(const Tensor& x, const Tensor& w, const Tensor& b,
              int pad_left, int pad_right) {
    if (x.rank() != 2 || w.rank() != 3) shape_error("conv1d", x, w);
    const int m = x.dim(0), cin = x.dim(1);
    const int cout = w.dim(0), k = w.dim(1), wcin = w.dim(2);
    if (wcin != cin) shape_error("conv1d", x, w);
    if (b.rank() != 1 || b.dim(0) != cout) shape_error("conv1d", w, b);
    if (pad_left < 0 || pad_right < 0) {
        throw std::invalid_argument("op 'conv1d': negative padding");
    }
    const int mo = m + pad_left + pad_right - k + 1;
    if (mo < 1) shape_error("conv1d", x, "input too short for kernel and padding");

    std::vector<double> out(static_cast<size_t>(mo) * cout);
    const double* px = x.data().data();
    const double* pw = w.data().data();
    const double* pb = b.data().data();
    for (int t = 0; t < mo; ++t) {
        double* orow = out.data() + static_cast<size_t>(t) * cout;
        for (int co = 0; co < cout; ++co) orow[co] = pb[co];
        for (int dk = 0; dk < k; ++dk) {
            const int ti = t + dk - pad_left;
            if (ti < 0 || ti >= m) continue;
            const double* xrow = px + static_cast<size_t>(ti) * cin;
            for (int co = 0; co < cout; ++co) {
                const double* wrow = pw + (static_cast<size_t>(co) * k + dk) * cin;
                double s = 0.0;
                for (int ci = 0; ci < cin; ++ci) s += wrow[ci] * xrow[ci];
                orow[co] += s;
            }
        }
    }
    const bool traced = trace_now({&x, &w, &b});
    Tensor y = make_output("conv1d", {mo, cout}, std::move(out), traced);
    if (traced) {
        auto xn = x.shared_node(), wn = w.shared_node(), bn = b.shared_node(),
             yn = y.shared_node();
        const bool need_x = xn->requires_grad;
        const bool need_w = wn->requires_grad;
        const bool need_b = bn->requires_grad;
        Tape::record([xn, wn, bn, yn, m, cin, cout, k, mo, pad_left, need_x, need_w, need_b] {
            const double* g = yn->grad.data();
            if (need_b) {
                ensure_grad(bn);
                for (int t = 0; t < mo; ++t) {
                    const double* grow = g + static_cast<size_t>(t) * cout;
                    for (int co = 0; co < cout; ++co) bn->grad[co] += grow[co];
                }
            }
            if (need_x) ensure_grad(xn);
            if (need_w) ensure_grad(wn);
            if (!need_x && !need_w) return;
            for (int t = 0; t < mo; ++t) {
                const double* grow = g + static_cast<size_t>(t) * cout;
                for (int dk = 0; dk < k; ++dk) {
                    const int ti = t + dk - pad_left;
                    if (ti < 0 || ti >= m) continue;
                    for (int co = 0; co < cout; ++co) {
                        const double gv = grow[co];
                        if (gv == 0.0) continue;
                        const double* wrow =
                            wn->data.data() + (static_cast<size_t>(co) * k + dk) * cin;
                        const double* xrow = xn->data.data() + static_cast<size_t>(ti) * cin;
                        if (need_x) {
                            double* gx = xn->grad.data() + static_cast<size_t>(ti) * cin;
                            for (int ci = 0; ci < cin; ++ci) gx[ci] += gv * wrow[ci];
                        }
                        if (need_w) {
                            double* gw =
                                wn->grad.data() + (static_cast<size_t>(co) * k + dk) * cin;
                            for (int ci = 0; ci < cin; ++ci) gw[ci] += gv * xrow[ci];
                        }
                    }
                }
            }
        });
    }
    return y;
}

// ---- softmax family -------------------------------------------------------------

namespace {

void rows_of(const Tensor& x, const char* op, int* rows, int* cols) {
    if (x.rank() == 1) {
        *rows = 1;
        *cols = x.dim(0);
    } else if (x.rank() == 2) {
        *rows = x.dim(0);
        *cols = x.dim(1);
    } else {
        shape_error(op, x, "rank must be 1 or 2");
    }
}

}  // namespace

Tensor softmax(const Tensor& x) {
    int m, n;
    rows_of(x, "softmax", &m, &n);
    std::vector<double> out(x.data().size());
    for (int i = 0; i < m; ++i) {
        const double* row = x.data().data() + static_cast<size_t>(i) * n;
        double* orow = out.data() + static_cast<size_t>(i) * n;
        double mx = row[0];
        for (int j = 1; j < n; ++j) mx = std::max(mx, row[j]);
        double z = 0.0;
        for (int j = 0; j < n; ++j) {
            orow[j] = std::exp(row[j] - mx);
            z += orow[j];
        }
        for (int j = 0; j < n; ++j) orow[j] /= z;
    }
    const bool traced = trace_now({&x});
    Tensor y = make_output("softmax", x.shape(), std::move(out), traced);
    if (traced) {
        auto xn = x.shared_node(), yn = y.shared_node();
        Tape::record([xn, yn, m, n] {
            ensure_grad(xn);
            for (int i = 0; i < m; ++i) {
                const double* yrow = yn->data.data() + static_cast<size_t>(i) * n;
                const double* grow = yn->grad.data() + static_cast<size_t>(i) * n;
                double dot = 0.0;
                for (int j = 0; j < n; ++j) dot += grow[j] * yrow[j];
                double* gx = xn->grad.data() + static_cast<size_t>(i) * n;
                for (int j = 0; j < n; ++j) gx[j] += yrow[j] * (grow[j] - dot);
            }
        });
    }
    return y;
}

Tensor log_softmax(const Tensor& x) {
    int m, n;
    rows_of(x, "log_softmax", &m, &n);
    std::vector<double> out(x.data().size());
    for (int i = 0; i < m; ++i) {
        const double* row = x.data().data() + static_cast<size_t>(i) * n;
        double* orow = out.data() + static_cast<size_t>(i) * n;
        double mx = row[0];
        for (int j = 1; j < n; ++j) mx = std::max(mx, row[j]);
        double z = 0.0;
        for (int j = 0; j < n; ++j) z += std::exp(row[j] - mx);
        const double lz = mx + std::log(z);
        for (int j = 0; j < n; ++j) orow[j] = row[j] - lz;
    }
    const bool traced = trace_now({&x});
    Tensor y = make_output("log_softmax", x.shape(), std::move(out), traced);
    if (traced) {
        auto xn = x.shared_node(), yn = y.shared_node();
        Tape::record([xn, yn, m, n] {
            ensure_grad(xn);
            for (int i = 0; i < m; ++i) {
                const double* yrow = yn->data.data() + static_cast<size_t>(i) * n;
                const double* grow = yn->grad.data() + static_cast<size_t>(i) * n;
                double gsum = 0.0;
                for (int j = 0; j < n; ++j) gsum += grow[j];
                double* gx = xn->grad.data() + static_cast<size_t>(i) * n;
                for (int j = 0; j < n; ++j) gx[j] += grow[j] - std::exp(yrow[j]) * gsum;
            }
        });
    }
    return y;
}

// ---- sequence statistics ---------------------------------------------------------

Tensor mean_over_positions(const Tensor& x) {
    if (x.rank() != 2) shape_error("mean_over_positions", x, "rank must be 2");
    const int m = x.dim(0), d = x.dim(1);
    std::vector<double> out(static_cast<size_t>(d), 0.0);
    for (int t = 0; t < m; ++t) {
        const double* row = x.data().data() + static_cast<size_t>(t) * d;
        for (int c = 0; c < d; ++c) out[c] += row[c];
    }
    for (int c = 0; c < d; ++c) out[c] /= m;
    const bool traced = trace_now({&x});
    Tensor y = make_output("mean_over_positions", {d}, std::move(out), traced);
    if (traced) {
        auto xn = x.shared_node(), yn = y.shared_node();
        Tape::record([xn, yn, m, d] {
            ensure_grad(xn);
            for (int t = 0; t < m; ++t) {
                double* gx = xn->grad.data() + static_cast<size_t>(t) * d;
                for (int c = 0; c < d; ++c) gx[c] += yn->grad[c] / m;
            }
        });
    }
    return y;
}

Tensor std_over_positions(const Tensor& x) {
    if (x.rank() != 2) shape_error("std_over_positions", x, "rank must be 2");
    if (x.dim(0) < 1) shape_error("std_over_positions", x, "need at least one position");
    const int m = x.dim(0), d = x.dim(1);
    std::vector<double> mean(static_cast<size_t>(d), 0.0);
    for (int t = 0; t < m; ++t) {
        for (int c = 0; c < d; ++c) mean[c] += x.data()[static_cast<size_t>(t) * d + c];
    }
    for (int c = 0; c < d; ++c) mean[c] /= m;
    std::vector<double> raw(static_cast<size_t>(d), 0.0);
    for (int t = 0; t < m; ++t) {
        for (int c = 0; c < d; ++c) {
            const double dv = x.data()[static_cast<size_t>(t) * d + c] - mean[c];
            raw[c] += dv * dv;
        }
    }
    std::vector<double> out(static_cast<size_t>(d));
    for (int c = 0; c < d; ++c) {
        raw[c] = std::sqrt(raw[c] / m);  // population std
        out[c] = std::max(raw[c], kStdFloor);
    }
    const bool traced = trace_now({&x});
    Tensor y = make_output("std_over_positions", {d}, std::move(out), traced);
    if (traced) {
        auto xn = x.shared_node(), yn = y.shared_node();
        Tape::record([xn, yn, m, d, mean, raw] {
            ensure_grad(xn);
            for (int c = 0; c < d; ++c) {
                if (raw[c] <= kStdFloor) continue;  // flat on the floor
                const double coef = yn->grad[c] / (m * raw[c]);
                for (int t = 0; t < m; ++t) {
                    const size_t i = static_cast<size_t>(t) * d + c;
                    xn->grad[i] += coef * (xn->data[i] - mean[c]);
                }
            }
        });
    }
    return y;
}

// ---- pointwise nonlinearities ------------------------------------------------------

namespace {

template <typename Fwd, typename Bwd>
Tensor pointwise(const char* op, const Tensor& x, Fwd fwd, Bwd bwd) {
    std::vector<double> out(x.data().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = fwd(x.data()[i]);
    const bool traced = trace_now({&x});
    Tensor y = make_output(op, x.shape(), std::move(out), traced);
    if (traced) {
        auto xn = x.shared_node(), yn = y.shared_node();
        Tape::record([xn, yn, bwd] {
            ensure_grad(xn);
            for (size_t i = 0; i < yn->grad.size(); ++i) {
                xn->grad[i] += yn->grad[i] * bwd(xn->data[i], yn->data[i]);
            }
        });
    }
    return y;
}

double sigmoid_val(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

Tensor softplus(const Tensor& x) {
    // Stable ln(1+e^v) = max(v,0) + log1p(exp(-|v|)).
    return pointwise(
        "softplus", x,
        [](double v) { return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v))); },
        [](double v, double) { return sigmoid_val(v); });
}

Tensor tanh(const Tensor& x) {
    return pointwise(
        "tanh", x, [](double v) { return std::tanh(v); },
        [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& x) {
    return pointwise(
        "sigmoid", x, [](double v) { return sigmoid_val(v); },
        [](double, double y) { return y * (1.0 - y); });
}

Tensor log(const Tensor& x) {
    return pointwise(
        "log", x, [](double v) { return std::log(v); },
        [](double v, double) { return 1.0 / v; });
}

Tensor clamp(const Tensor& x, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("op 'clamp': lo must be < hi");
    return pointwise(
        "clamp", x, [lo, hi](double v) { return std::min(std::max(v, lo), hi); },
        [lo, hi](double v, double) { return (v > lo && v < hi) ? 1.0 : 0.0; });
}

Tensor glu(const Tensor& x) {
    if (x.rank() != 2 || x.dim(1) % 2 != 0) shape_error("glu", x, "needs [m, 2d]");
    const int m = x.dim(0), d = x.dim(1) / 2;
    std::vector<double> out(static_cast<size_t>(m) * d);
    for (int t = 0; t < m; ++t) {
        const double* row = x.data().data() + static_cast<size_t>(t) * 2 * d;
        double* orow = out.data() + static_cast<size_t>(t) * d;
        for (int c = 0; c < d; ++c) orow[c] = row[c] * sigmoid_val(row[d + c]);
    }
    const bool traced = trace_now({&x});
    Tensor y = make_output("glu", {m, d}, std::move(out), traced);
    if (traced) {
        auto xn = x.shared_node(), yn = y.shared_node();
        Tape::record([xn, yn, m, d] {
            ensure_grad(xn);
            for (int t = 0; t < m; ++t) {
                const double* row = xn->data.data() + static_cast<size_t>(t) * 2 * d;
                const double* grow = yn->grad.data() + static_cast<size_t>(t) * d;
                double* gx = xn->grad.data() + static_cast<size_t>(t) * 2 * d;
                for (int c = 0; c < d; ++c) {
                    const double s = sigmoid_val(row[d + c]);
                    gx[c] += grow[c] * s;
                    gx[d + c] += grow[c] * row[c] * s * (1.0 - s);
                }
            }
        });
    }
    return y;
}

// ---- lookup ops ----------------------------------------------------------------

Tensor embed(const Tensor& table, const std::vector<int>& ids) {
    if (table.rank() != 2) shape_error("embed", table, "table must be [V,d]");
    const int v = table.dim(0), d = table.dim(1);
    const int m = static_cast<int>(ids.size());
    if (m == 0) throw std::invalid_argument("op 'embed': empty id list");
    std::vector<double> out(static_cast<size_t>(m) * d);
    for (int t = 0; t < m; ++t) {
        const int id = ids[static_cast<size_t>(t)];
        if (id < 0 || id >= v) {
            throw std::invalid_argument("op 'embed': id " + std::to_string(id) +
                                        " out of range [0," + std::to_string(v) + ")");
        }
        std::copy_n(table.data().data() + static_cast<size_t>(id) * d, d,
                    out.data() + static_cast<size_t>(t) * d);
    }
    const bool traced = trace_now({&table});
    Tensor y = make_output("embed", {m, d}, std::move(out), traced);
    if (traced) {
        auto tn = table.shared_node(), yn = y.shared_node();
        Tape::record([tn, yn, ids, d] {
            ensure_grad(tn);
            for (size_t t = 0; t < ids.size(); ++t) {
                const double* grow = yn->grad.data() + t * d;
                double* dst = tn->grad.data() + static_cast<size_t>(ids[t]) * d;
                for (int c = 0; c < d; ++c) dst[c] += grow[c];
            }
        });
    }
    return y;
}

Tensor gather(const Tensor& x, const std::vector<int>& ids) {
    if (x.rank() != 2) shape_error("gather", x, "input must be [m,n]");
    const int m = x.dim(0), n = x.dim(1);
    if (static_cast<int>(ids.size()) != m) {
        throw std::invalid_argument("op 'gather': need one id per row, got " +
                                    std::to_string(ids.size()) + " for " + std::to_string(m));
    }
    std::vector<double> out(static_cast<size_t>(m));
    for (int t = 0; t < m; ++t) {
        const int id = ids[static_cast<size_t>(t)];
        if (id < 0 || id >= n) {
            throw std::invalid_argument("op 'gather': id " + std::to_string(id) +
                                        " out of range [0," + std::to_string(n) + ")");
        }
        out[static_cast<size_t>(t)] = x.data()[static_cast<size_t>(t) * n + id];
    }
    const bool traced = trace_now({&x});
    Tensor y = make_output("gather", {m}, std::move(out), traced);
    if (traced) {
        auto xn = x.shared_node(), yn = y.shared_node();
        Tape::record([xn, yn, ids, n] {
            ensure_grad(xn);
            for (size_t t = 0; t < ids.size(); ++t) {
                xn->grad[t * n + static_cast<size_t>(ids[t])] += yn->grad[t];
            }
        });
    }
    return y;
}

// ---- shape ops -----------------------------------------------------------------

Tensor concat(const std::vector<Tensor>& parts, int axis) {
    if (parts.empty()) throw std::invalid_argument("op 'concat': no inputs");
    const int rank = parts[0].rank();
    for (const Tensor& p : parts) {
        if (p.rank() != rank) shape_error("concat", parts[0], p);
    }
    std::vector<int> out_shape;
    std::vector<double> out;
    if (rank == 1 && axis == 0) {
        int total = 0;
        for (const Tensor& p : parts) total += p.dim(0);
        out.reserve(static_cast<size_t>(total));
        for (const Tensor& p : parts) out.insert(out.end(), p.data().begin(), p.data().end());
        out_shape = {total};
    } else if (rank == 2 && axis == 0) {
        const int cols = parts[0].dim(1);
        int rows = 0;
        for (const Tensor& p : parts) {
            if (p.dim(1) != cols) shape_error("concat", parts[0], p);
            rows += p.dim(0);
        }
        out.reserve(static_cast<size_t>(rows) * cols);
        for (const Tensor& p : parts) out.insert(out.end(), p.data().begin(), p.data().end());
        out_shape = {rows, cols};
    } else if (rank == 2 && axis == 1) {
        const int rows = parts[0].dim(0);
        int cols = 0;
        for (const Tensor& p : parts) {
            if (p.dim(0) != rows) shape_error("concat", parts[0], p);
            cols += p.dim(1);
        }
        out.assign(static_cast<size_t>(rows) * cols, 0.0);
        int off = 0;
        for (const Tensor& p : parts) {
            const int pc = p.dim(1);
            for (int r = 0; r < rows; ++r) {
                std::copy_n(p.data().data() + static_cast<size_t>(r) * pc, pc,
                            out.data() + static_cast<size_t>(r) * cols + off);
            }
            off += pc;
        }
        out_shape = {rows, cols};
    } else {
        throw std::invalid_argument("op 'concat': unsupported rank/axis combination");
    }
    bool traced = Tape::recording();
    if (traced) {
        traced = false;
        for (const Tensor& p : parts) traced = traced || p.requires_grad();
    }
    Tensor y = make_output("concat", std::move(out_shape), std::move(out), traced);
    if (traced) {
        std::vector<std::shared_ptr<TensorNode>> ins;
        std::vector<char> needs;
        ins.reserve(parts.size());
        for (const Tensor& p : parts) {
            ins.push_back(p.shared_node());
            needs.push_back(p.requires_grad() ? 1 : 0);
        }
        auto yn = y.shared_node();
        Tape::record([ins, needs, yn, rank, axis] {
            if (rank == 1 || axis == 0) {
                size_t off = 0;
                for (size_t pi = 0; pi < ins.size(); ++pi) {
                    const auto& in = ins[pi];
                    if (needs[pi]) {
                        ensure_grad(in);
                        for (size_t i = 0; i < in->data.size(); ++i) {
                            in->grad[i] += yn->grad[off + i];
                        }
                    }
                    off += in->data.size();
                }
            } else {
                const int rows = yn->shape[0], cols = yn->shape[1];
                int off = 0;
                for (size_t pi = 0; pi < ins.size(); ++pi) {
                    const auto& in = ins[pi];
                    const int pc = in->shape[1];
                    if (needs[pi]) {
                        ensure_grad(in);
                        for (int r = 0; r < rows; ++r) {
                            for (int c = 0; c < pc; ++c) {
                                in->grad[static_cast<size_t>(r) * pc + c] +=
                                    yn->grad[static_cast<size_t>(r) * cols + off + c];
                            }
                        }
                    }
                    off += pc;
                }
            }
        });
    }
    return y;
}

Tensor pad_rows(const Tensor& x, int left, int right) {
    if (x.rank() != 2) shape_error("pad", x, "rank must be 2");
    if (left < 0 || right < 0) throw std::invalid_argument("op 'pad': negative padding");
    const int m = x.dim(0), d = x.dim(1);
    const int mo = m + left + right;
    std::vector<double> out(static_cast<size_t>(mo) * d, 0.0);
    std::copy(x.data().begin(), x.data().end(),
              out.begin() + static_cast<size_t>(left) * d);
    const bool traced = trace_now({&x});
    Tensor y = make_output("pad", {mo, d}, std::move(out), traced);
    if (traced) {
        auto xn = x.shared_node(), yn = y.shared_node();
        Tape::record([xn, yn, left, m, d] {
            ensure_grad(xn);
            for (int t = 0; t < m; ++t) {
                const double* grow = yn->grad.data() + static_cast<size_t>(t + left) * d;
                double* gx = xn->grad.data() + static_cast<size_t>(t) * d;
                for (int c = 0; c < d; ++c) gx[c] += grow[c];
            }
        });
    }
    return y;
}

Tensor slice_rows(const Tensor& x, int begin, int end) {
    if (x.rank() != 2) shape_error("slice_rows", x, "rank must be 2");
    const int m = x.dim(0), d = x.dim(1);
    if (begin < 0 || end > m || begin >= end) {
        throw std::invalid_argument("op 'slice_rows': range [" + std::to_string(begin) + "," +
                                    std::to_string(end) + ") invalid for " + std::to_string(m) +
                                    " rows");
    }
    std::vector<double> out(x.data().begin() + static_cast<size_t>(begin) * d,
                            x.data().begin() + static_cast<size_t>(end) * d);
    const bool traced = trace_now({&x});
    Tensor y = make_output("slice_rows", {end - begin, d}, std::move(out), traced);
    if (traced) {
        auto xn = x.shared_node(), yn = y.shared_node();
        Tape::record([xn, yn, begin, d] {
            ensure_grad(xn);
            const size_t off = static_cast<size_t>(begin) * d;
            for (size_t i = 0; i < yn->grad.size(); ++i) xn->grad[off + i] += yn->grad[i];
        });
    }
    return y;
}

Tensor slice_vec(const Tensor& x, int begin, int end) {
    if (x.rank() != 1) shape_error("slice_vec", x, "rank must be 1");
    const int n = x.dim(0);
    if (begin < 0 || end > n || begin >= end) {
        throw std::invalid_argument("op 'slice_vec': range [" + std::to_string(begin) + "," +
                                    std::to_string(end) + ") invalid for length " +
                                    std::to_string(n));
    }
    std::vector<double> out(x.data().begin() + begin, x.data().begin() + end);
    const bool traced = trace_now({&x});
    Tensor y = make_output("slice_vec", {end - begin}, std::move(out), traced);
    if (traced) {
        auto xn = x.shared_node(), yn = y.shared_node();
        Tape::record([xn, yn, begin] {
            ensure_grad(xn);
            for (size_t i = 0; i < yn->grad.size(); ++i) {
                xn->grad[static_cast<size_t>(begin) + i] += yn->grad[i];
            }
        });
    }
    return y;
}

// ---- pooling -------------------------------------------------------------------

Tensor avg_pool1d(const Tensor& x, int k) {
    if (x.rank() != 2) shape_error("avg_pool1d", x, "rank must be 2");
    if (k < 1) throw std::invalid_argument("op 'avg_pool1d': window must be >= 1");
    const int m = x.dim(0), d = x.dim(1);
    const int half = (k - 1) / 2;
    std::vector<double> out(static_cast<size_t>(m) * d, 0.0);
    for (int t = 0; t < m; ++t) {
        const int lo = std::max(0, t - half);
        const int hi = std::min(m - 1, t - half + k - 1);
        const double inv = 1.0 / (hi - lo + 1);
        double* orow = out.data() + static_cast<size_t>(t) * d;
        for (int ti = lo; ti <= hi; ++ti) {
            const double* row = x.data().data() + static_cast<size_t>(ti) * d;
            for (int c = 0; c < d; ++c) orow[c] += row[c];
        }
        for (int c = 0; c < d; ++c) orow[c] *= inv;
    }
    const bool traced = trace_now({&x});
    Tensor y = make_output("avg_pool1d", {m, d}, std::move(out), traced);
    if (traced) {
        auto xn = x.shared_node(), yn = y.shared_node();
        Tape::record([xn, yn, m, d, k, half] {
            ensure_grad(xn);
            for (int t = 0; t < m; ++t) {
                const int lo = std::max(0, t - half);
                const int hi = std::min(m - 1, t - half + k - 1);
                const double inv = 1.0 / (hi - lo + 1);
                const double* grow = yn->grad.data() + static_cast<size_t>(t) * d;
                for (int ti = lo; ti <= hi; ++ti) {
                    double* gx = xn->grad.data() + static_cast<size_t>(ti) * d;
                    for (int c = 0; c < d; ++c) gx[c] += grow[c] * inv;
                }
            }
        });
    }
    return y;
}

Tensor max_pool1d(const Tensor& x, int k) {
    if (x.rank() != 2) shape_error("max_pool1d", x, "rank must be 2");
    if (k < 1) throw std::invalid_argument("op 'max_pool1d': window must be >= 1");
    const int m = x.dim(0), d = x.dim(1);
    const int half = (k - 1) / 2;
    std::vector<double> out(static_cast<size_t>(m) * d);
    std::vector<int> argmax(static_cast<size_t>(m) * d);
    for (int t = 0; t < m; ++t) {
        const int lo = std::max(0, t - half);
        const int hi = std::min(m - 1, t - half + k - 1);
        for (int c = 0; c < d; ++c) {
            int best = lo;
            double bv = x.data()[static_cast<size_t>(lo) * d + c];
            for (int ti = lo + 1; ti <= hi; ++ti) {
                const double v = x.data()[static_cast<size_t>(ti) * d + c];
                if (v > bv) {
                    bv = v;
                    best = ti;
                }
            }
            out[static_cast<size_t>(t) * d + c] = bv;
            argmax[static_cast<size_t>(t) * d + c] = best;
        }
    }
    const bool traced = trace_now({&x});
    Tensor y = make_output("max_pool1d", {m, d}, std::move(out), traced);
    if (traced) {
        auto xn = x.shared_node(), yn = y.shared_node();
        Tape::record([xn, yn, m, d, argmax] {
            ensure_grad(xn);
            for (int t = 0; t < m; ++t) {
                for (int c = 0; c < d; ++c) {
                    const size_t i = static_cast<size_t>(t) * d + c;
                    xn->grad[static_cast<size_t>(argmax[i]) * d + c] += yn->grad[i];
                }
            }
        });
    }
    return y;
}

// ---- row broadcast ops ------------------------------------------------------------

namespace {

enum class RowOp { Add, Sub, Mul, Div };

Tensor row_broadcast(const char* name, RowOp op, const Tensor& x, const Tensor& v) {
    if (x.rank() != 2 || v.rank() != 1 || x.dim(1) != v.dim(0)) shape_error(name, x, v);
    const int m = x.dim(0), d = x.dim(1);
    std::vector<double> out(x.data().size());
    for (int t = 0; t < m; ++t) {
        const double* row = x.data().data() + static_cast<size_t>(t) * d;
        double* orow = out.data() + static_cast<size_t>(t) * d;
        for (int c = 0; c < d; ++c) {
            switch (op) {
                case RowOp::Add: orow[c] = row[c] + v.data()[c]; break;
                case RowOp::Sub: orow[c] = row[c] - v.data()[c]; break;
                case RowOp::Mul: orow[c] = row[c] * v.data()[c]; break;
                case RowOp::Div: orow[c] = row[c] / v.data()[c]; break;
            }
        }
    }
    const bool traced = trace_now({&x, &v});
    Tensor y = make_output(name, x.shape(), std::move(out), traced);
    if (traced) {
        auto xn = x.shared_node(), vn = v.shared_node(), yn = y.shared_node();
        const bool need_x = xn->requires_grad, need_v = vn->requires_grad;
        Tape::record([xn, vn, yn, m, d, op, need_x, need_v] {
            if (need_x) ensure_grad(xn);
            if (need_v) ensure_grad(vn);
            for (int t = 0; t < m; ++t) {
                const double* grow = yn->grad.data() + static_cast<size_t>(t) * d;
                const double* xrow = xn->data.data() + static_cast<size_t>(t) * d;
                for (int c = 0; c < d; ++c) {
                    const double g = grow[c];
                    switch (op) {
                        case RowOp::Add:
                            if (need_x) xn->grad[static_cast<size_t>(t) * d + c] += g;
                            if (need_v) vn->grad[c] += g;
                            break;
                        case RowOp::Sub:
                            if (need_x) xn->grad[static_cast<size_t>(t) * d + c] += g;
                            if (need_v) vn->grad[c] -= g;
                            break;
                        case RowOp::Mul:
                            if (need_x) xn->grad[static_cast<size_t>(t) * d + c] += g * vn->data[c];
                            if (need_v) vn->grad[c] += g * xrow[c];
                            break;
                        case RowOp::Div:
                            if (need_x) xn->grad[static_cast<size_t>(t) * d + c] += g / vn->data[c];
                            if (need_v) vn->grad[c] -= g * xrow[c] / (vn->data[c] * vn->data[c]);
                            break;
                    }
                }
            }
        });
    }
    return y;
}

}  // namespace

Tensor row_add(const Tensor& x, const Tensor& v) { return row_broadcast("row_add", RowOp::Add, x, v); }
Tensor row_sub(const Tensor& x, const Tensor& v) { return row_broadcast("row_sub", RowOp::Sub, x, v); }
Tensor row_mul(const Tensor& x, const Tensor& v) { return row_broadcast("row_mul", RowOp::Mul, x, v); }
Tensor row_div(const Tensor& x, const Tensor& v) { return row_broadcast("row_div", RowOp::Div, x, v); }

// ---- reductions --------------------------------------------------------------------

Tensor sum_all(const Tensor& x) {
    double s = std::accumulate(x.data().begin(), x.data().end(), 0.0);
    const bool traced = trace_now({&x});
    Tensor y = make_output("sum_all", {1}, {s}, traced);
    if (traced) {
        auto xn = x.shared_node(), yn = y.shared_node();
        Tape::record([xn, yn] {
            ensure_grad(xn);
            for (double& g : xn->grad) g += yn->grad[0];
        });
    }
    return y;
}

Tensor mean_all(const Tensor& x) {
    const double inv = 1.0 / x.size();
    double s = std::accumulate(x.data().begin(), x.data().end(), 0.0) * inv;
    const bool traced = trace_now({&x});
    Tensor y = make_output("mean_all", {1}, {s}, traced);
    if (traced) {
        auto xn = x.shared_node(), yn = y.shared_node();
        Tape::record([xn, yn, inv] {
            ensure_grad(xn);
            for (double& g : xn->grad) g += yn->grad[0] * inv;
        });
    }
    return y;
}

Tensor reshape(const Tensor& x, std::vector<int> shape) {
    if (numel(shape) != x.size()) {
        throw std::invalid_argument("op 'reshape': cannot view " + shape_str(x.shape()) +
                                    " as " + shape_str(shape));
    }
    const bool traced = trace_now({&x});
    Tensor y = make_output("reshape", std::move(shape), x.data(), traced);
    if (traced) {
        auto xn = x.shared_node(), yn = y.shared_node();
        Tape::record([xn, yn] {
            ensure_grad(xn);
            for (size_t i = 0; i < yn->grad.size(); ++i) xn->grad[i] += yn->grad[i];
        });
    }
    return y;
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
    if (x.rank() == 1) {
        Tensor y = row_add(matmul(reshape(x, {1, x.dim(0)}), w), b);
        return reshape(y, {y.dim(1)});
    }
    return row_add(matmul(x, w), b);
}

// ---- dispatcher --------------------------------------------------------------------

double OpAttrs::get(const std::string& k, double def) const {
    auto it = values.find(k);
    return it == values.end() ? def : it->second;
}

int OpAttrs::get_int(const std::string& k, int def) const {
    return static_cast<int>(get(k, def));
}

namespace {

std::vector<int> ids_from_tensor(const char* op, const Tensor& t) {
    std::vector<int> ids;
    ids.reserve(t.data().size());
    for (double v : t.data()) {
        const int id = static_cast<int>(v);
        if (static_cast<double>(id) != v) {
            throw std::invalid_argument(std::string("op '") + op +
                                        "': id tensor holds a non-integral value");
        }
        ids.push_back(id);
    }
    return ids;
}

void need_inputs(const std::string& op, const std::vector<Tensor>& in, size_t n) {
    if (in.size() != n) {
        throw std::invalid_argument("op '" + op + "': expected " + std::to_string(n) +
                                    " inputs, got " + std::to_string(in.size()));
    }
}

}  // namespace

Tensor forward_op(const std::string& op_name, const std::vector<Tensor>& inputs,
                  const OpAttrs& attrs) {
    if (op_name == "add") {
        need_inputs(op_name, inputs, 2);
        return add(inputs[0], inputs[1]);
    }
    if (op_name == "mul") {
        need_inputs(op_name, inputs, 2);
        return mul(inputs[0], inputs[1]);
    }
    if (op_name == "matmul") {
        need_inputs(op_name, inputs, 2);
        return matmul(inputs[0], inputs[1]);
    }
    if (op_name == "conv1d") {
        need_inputs(op_name, inputs, 3);
        return conv1d(inputs[0], inputs[1], inputs[2], attrs.get_int("pad_left", 0),
                      attrs.get_int("pad_right", 0));
    }
    if (op_name == "softmax") {
        need_inputs(op_name, inputs, 1);
        return softmax(inputs[0]);
    }
    if (op_name == "log_softmax") {
        need_inputs(op_name, inputs, 1);
        return log_softmax(inputs[0]);
    }
    if (op_name == "mean_over_positions") {
        need_inputs(op_name, inputs, 1);
        return mean_over_positions(inputs[0]);
    }
    if (op_name == "std_over_positions") {
        need_inputs(op_name, inputs, 1);
        return std_over_positions(inputs[0]);
    }
    if (op_name == "softplus") {
        need_inputs(op_name, inputs, 1);
        return softplus(inputs[0]);
    }
    if (op_name == "tanh") {
        need_inputs(op_name, inputs, 1);
        return tanh(inputs[0]);
    }
    if (op_name == "glu") {
        need_inputs(op_name, inputs, 1);
        return glu(inputs[0]);
    }
    if (op_name == "embed") {
        need_inputs(op_name, inputs, 2);
        return embed(inputs[0], ids_from_tensor("embed", inputs[1]));
    }
    if (op_name == "gather") {
        need_inputs(op_name, inputs, 2);
        return gather(inputs[0], ids_from_tensor("gather", inputs[1]));
    }
    if (op_name == "concat") {
        return concat(inputs, attrs.get_int("axis", 0));
    }
    if (op_name == "pad") {
        need_inputs(op_name, inputs, 1);
        return pad_rows(inputs[0], attrs.get_int("left", 0), attrs.get_int("right", 0));
    }
    throw std::invalid_argument("forward_op: unknown op '" + op_name + "'");
}

}  // namespace polystyle
