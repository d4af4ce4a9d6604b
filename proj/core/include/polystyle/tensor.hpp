#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace polystyle {

/// Raised when an op produces NaN/Inf or a gradient is non-finite.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TensorNode {
    std::vector<int> shape;
    std::vector<double> data;
    std::vector<double> grad;  // empty until requested
    bool requires_grad = false;
};

// Dense fp64 tensor. Handle semantics: copies alias the same storage, which
// is what the tape needs to accumulate gradients into shared parameters.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int> shape);
    Tensor(std::vector<int> shape, std::vector<double> data);

    static Tensor scalar(double v);
    // Leaf with requires_grad set and a zeroed gradient buffer.
    static Tensor parameter(std::vector<int> shape, std::vector<double> data);

    bool defined() const { return node_ != nullptr; }
    const std::vector<int>& shape() const { return node_->shape; }
    int rank() const { return static_cast<int>(node_->shape.size()); }
    int dim(int i) const { return node_->shape[static_cast<size_t>(i)]; }
    int size() const { return static_cast<int>(node_->data.size()); }

    std::vector<double>& data() { return node_->data; }
    const std::vector<double>& data() const { return node_->data; }
    double value() const;  // scalar convenience, errors if size != 1

    bool requires_grad() const { return node_->requires_grad; }
    void set_requires_grad(bool b);
    std::vector<double>& grad();  // allocates zeros on first use
    const std::vector<double>& grad() const;
    void zero_grad();

    TensorNode* node() const { return node_.get(); }
    std::shared_ptr<TensorNode> shared_node() const { return node_; }

private:
    std::shared_ptr<TensorNode> node_;
};

// Records ops of one forward pass; one tape per training step. Constructing a
// Tape makes it the active tape for this thread; destruction deactivates it.
class Tape {
public:
    Tape();
    ~Tape();
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // Seeds d(loss)/d(loss) = 1 and runs recorded ops in reverse. Errors if
    // called a second time without rebuilding the forward pass.
    void backward(const Tensor& loss);

    size_t size() const { return steps_.size(); }

    static bool recording();
    static void record(std::function<void()> step);

private:
    std::vector<std::function<void()>> steps_;
    bool used_ = false;
};

// Suspends tape recording while alive (frozen forward passes, greedy decode).
struct NoGradGuard {
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;
};

struct SgdConfig {
    double learning_rate = 0.1;
    double decay_factor = 0.1;
    double min_learning_rate = 0.0001;
    void validate() const;
};

struct NamedParam {
    std::string name;
    Tensor value;
};

// p <- p - lr * grad(p) for every parameter, then zeroes grads.
// A non-finite gradient raises numeric_error naming the parameter.
void sgd_step(std::vector<NamedParam>& params, double learning_rate);
void sgd_step(std::vector<NamedParam>& params, const SgdConfig& config);

// uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) initialized parameter.
Tensor init_uniform(std::vector<int> shape, int fan_in, std::mt19937_64& rng);

// ---- ops ------------------------------------------------------------------
// Elementwise ops require identical shapes. Rank conventions:
//   [m, d] sequences are position-major (row = position, col = channel).

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor scale(const Tensor& a, double c);
Tensor add_scalar(const Tensor& a, double c);

Tensor matmul(const Tensor& a, const Tensor& b);     // [m,k] x [k,n]
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // [m,k] x [n,k]^T -> [m,n]

// x: [m, c_in], w: [c_out, k, c_in], b: [c_out]. Implicit zero padding.
// Output length = m + pad_left + pad_right - k + 1.
Tensor conv1d(const Tensor& x, const Tensor& w, const Tensor& b,
              int pad_left, int pad_right);

Tensor softmax(const Tensor& x);      // over last axis, rank 1 or 2
Tensor log_softmax(const Tensor& x);  // over last axis, rank 1 or 2

Tensor mean_over_positions(const Tensor& x);  // [m,d] -> [d]
// Per-channel population std over positions, floored at kStdFloor.
Tensor std_over_positions(const Tensor& x);   // [m,d] -> [d]
inline constexpr double kStdFloor = 1e-5;

Tensor softplus(const Tensor& x);  // ln(1 + e^x), strictly positive
Tensor tanh(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor log(const Tensor& x);
Tensor clamp(const Tensor& x, double lo, double hi);

Tensor glu(const Tensor& x);  // [m,2d] -> [m,d]: a * sigmoid(b)

Tensor embed(const Tensor& table, const std::vector<int>& ids);  // [V,d],[m] -> [m,d]
Tensor gather(const Tensor& x, const std::vector<int>& ids);     // [m,n],[m] -> [m]

Tensor concat(const std::vector<Tensor>& parts, int axis);
Tensor pad_rows(const Tensor& x, int left, int right);        // zero rows
Tensor slice_rows(const Tensor& x, int begin, int end);       // [m,d] -> [end-begin,d]
Tensor slice_vec(const Tensor& x, int begin, int end);        // rank-1 slice

// Stride-1 pooling over a window of k positions; edge windows are clipped,
// so the sequence length is preserved.
Tensor avg_pool1d(const Tensor& x, int k);
Tensor max_pool1d(const Tensor& x, int k);

// [m,d] op [d] broadcast across rows.
Tensor row_add(const Tensor& x, const Tensor& v);
Tensor row_sub(const Tensor& x, const Tensor& v);
Tensor row_mul(const Tensor& x, const Tensor& v);
Tensor row_div(const Tensor& x, const Tensor& v);

Tensor sum_all(const Tensor& x);   // -> scalar
Tensor mean_all(const Tensor& x);  // -> scalar

Tensor reshape(const Tensor& x, std::vector<int> shape);  // same element count

// x: [m,in] or [in]; w: [in,out]; b: [out].
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

// ---- generic dispatcher ----------------------------------------------------

struct OpAttrs {
    std::map<std::string, double> values;
    bool has(const std::string& k) const { return values.count(k) != 0; }
    double get(const std::string& k, double def) const;
    int get_int(const std::string& k, int def) const;
};

// Dispatch by name over the op set; integer-id inputs (embed/gather) are
// passed as tensors holding integral values.
Tensor forward_op(const std::string& op_name, const std::vector<Tensor>& inputs,
                  const OpAttrs& attrs = {});

// Backprop entry point; equivalent to tape.backward(loss) on the active tape.
void backward(const Tensor& loss);

}  // namespace polystyle
