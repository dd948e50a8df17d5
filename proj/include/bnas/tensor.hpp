#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bnas/common.hpp"

namespace bnas {

// Dense n-dimensional double tensor with an optional gradient slot.
// Tensor is a shared handle: copies alias the same storage. Gradients are
// allocated lazily and read as all-zeros until something accumulates into
// them.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<int> shape);
  static Tensor full(std::vector<int> shape, real value);
  static Tensor from(std::vector<int> shape, std::vector<real> values);
  static Tensor scalar(real value);
  // Leaf parameter: requires_grad = true.
  static Tensor param(std::vector<int> shape, std::vector<real> values);

  bool defined() const { return d_ != nullptr; }
  const std::vector<int>& shape() const { return d_->shape; }
  std::size_t numel() const { return d_->value.size(); }
  bool is_scalar() const { return d_->value.size() == 1; }

  std::span<real> data() { return {d_->value.data(), d_->value.size()}; }
  std::span<const real> data() const { return {d_->value.data(), d_->value.size()}; }
  real& operator[](std::size_t i) { return d_->value[i]; }
  real operator[](std::size_t i) const { return d_->value[i]; }
  real item() const;

  bool requires_grad() const { return d_->requires_grad; }
  void set_requires_grad(bool v);
  // True if this tensor is a leaf parameter or was produced by a recorded op.
  bool traced() const { return d_->traced; }

  bool has_grad() const { return !d_->grad.empty(); }
  // Grad storage, allocated (zero-filled) on first access.
  std::span<real> grad();
  // Read-only grad view; all-zeros if nothing was accumulated.
  std::vector<real> grad_values() const;
  void zero_grad();
  void accumulate_grad(std::span<const real> g);

  bool same_storage(const Tensor& other) const { return d_ == other.d_; }

 private:
  struct Data {
    std::vector<int> shape;
    std::vector<real> value;
    std::vector<real> grad;  // empty until touched; logically all zeros
    bool requires_grad = false;
    bool traced = false;
  };
  explicit Tensor(std::shared_ptr<Data> d) : d_(std::move(d)) {}
  static Tensor make(std::vector<int> shape, std::vector<real> values);

  std::shared_ptr<Data> d_;
  friend class Graph;
  friend void mark_traced(Tensor& t);
};

std::size_t shape_numel(const std::vector<int>& shape);
std::string shape_str(const std::vector<int>& shape);
void check_shape_match(const Tensor& a, const Tensor& b, const char* what);

// Reverse-mode tape. Operations append nodes in execution order (which is a
// topological order); backward() replays the tape once in reverse. A Graph
// and its tensors are confined to one thread during a pass; distinct graphs
// may run in parallel.
class Graph {
 public:
  // Record a backward rule if any input is traced. Returns true when the
  // output should be marked traced.
  bool track(std::initializer_list<const Tensor*> inputs);
  void record(std::function<void()> backward_rule);

  // Seeds d(loss)/d(loss) = 1 and replays the tape in reverse. The loss must
  // be a scalar produced on this graph (or a traced leaf).
  void backward(Tensor& loss);

  std::size_t size() const { return tape_.size(); }
  void clear() { tape_.clear(); }

 private:
  std::vector<std::function<void()>> tape_;
};

enum class PoolKind { Max, Avg };

// ---- elementwise / scalar ----
Tensor add(Graph& g, const Tensor& a, const Tensor& b);
Tensor sub(Graph& g, const Tensor& a, const Tensor& b);
Tensor mul(Graph& g, const Tensor& a, const Tensor& b);
Tensor scale(Graph& g, const Tensor& a, real c);
Tensor neg(Graph& g, const Tensor& a);
Tensor relu(Graph& g, const Tensor& a);
Tensor sum(Graph& g, const Tensor& a);
Tensor mean(Graph& g, const Tensor& a);
Tensor sum_squares(Graph& g, const Tensor& a);
// Scalar read with gradient routing to one element.
Tensor pick(Graph& g, const Tensor& a, std::size_t flat_index);

// ---- convolutions (NCHW inputs, OIKK weights) ----
Tensor conv2d(Graph& g, const Tensor& input, const Tensor& weight, int stride,
              int padding, int dilation = 1);
// weight shape (C, 1, K, K): one filter per input channel.
Tensor depthwise_conv2d(Graph& g, const Tensor& input, const Tensor& weight,
                        int stride, int padding, int dilation = 1);
Tensor depthwise_separable_conv(Graph& g, const Tensor& input, const Tensor& dw_weight,
                                const Tensor& pw_weight, int stride);
Tensor dilated_conv(Graph& g, const Tensor& input, const Tensor& weight, int rate,
                    int stride, int padding);

// ---- pooling / spatial ----
Tensor pool(Graph& g, const Tensor& input, PoolKind kind, int window, int stride,
            int padding = 0);
Tensor global_avg_pool(Graph& g, const Tensor& input);  // (N,C,H,W) -> (N,C)
// x[:, :, ::2, ::2]; parameterless spatial reduction for identity edges.
Tensor strided_slice2(Graph& g, const Tensor& input);
Tensor concat_channels(Graph& g, const std::vector<Tensor>& parts);

// ---- dense / classifier ----
Tensor linear(Graph& g, const Tensor& input, const Tensor& weight, const Tensor& bias);

// ---- probabilistic ----
// Probabilities are clamped at this floor wherever they are logged.
inline constexpr real kLogFloor = 1e-12;

Tensor softmax_rows(Graph& g, const Tensor& logits);      // (N,C) or (C)
Tensor log_softmax_rows(Graph& g, const Tensor& logits);  // (N,C) or (C)
// Mean over rows of -log p[label].
Tensor cross_entropy(Graph& g, const Tensor& logits, const std::vector<int>& labels);
// Mean over rows of sum_c p log(p/q); p is treated as constant.
Tensor kl_div(Graph& g, const Tensor& p, const Tensor& q);

// ---- mixture plumbing ----
// out = sum_i weights[row, cols[i]] * xs[i]; differentiable in both the
// weights tensor and every xs[i].
Tensor weighted_sum(Graph& g, const std::vector<Tensor>& xs, const Tensor& weights,
                    int row, const std::vector<int>& cols);
// Row softmax over the active columns only; masked entries get exactly zero
// weight and zero gradient.
Tensor masked_row_softmax(Graph& g, const Tensor& logits_matrix,
                          const std::vector<std::vector<bool>>& active);

// Per-channel scale: x shape (N,C,...) (axis=1) or (O,...) (axis=0) scaled by
// beta of length C resp. O. Differentiable in both x and beta.
Tensor channel_scale(Graph& g, const Tensor& x, const Tensor& beta, int axis);

// Batch statistics cache for batch_affine_norm; eval mode reuses the last
// batch's statistics.
struct NormStats {
  std::vector<real> mean;
  std::vector<real> var;
  bool valid = false;
};

// Per-channel affine normalization over the batch: y = gain * (x - mu)/sqrt(var + eps) + bias.
// training=true computes fresh statistics into `stats`; training=false reuses them.
Tensor batch_affine_norm(Graph& g, const Tensor& x, const Tensor& gain, const Tensor& bias,
                         NormStats& stats, bool training, real eps = 1e-5);

}  // namespace bnas
