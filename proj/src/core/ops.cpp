#include "srea/core/ops.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

namespace srea::core {

namespace {

template <typename T>
using MatR = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapR = Eigen::Map<MatR<T>>;
template <typename T>
using ConstMapR = Eigen::Map<const MatR<T>>;

template <typename T>
using NodeT = detail::Node<T>;

template <typename T>
void require_same_shape(const char* op, const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) +
                     " vs " + shape_string(b.shape()));
  }
}

template <typename T>
void require_rank(const char* op, const char* what, const Tensor<T>& t, std::size_t rank) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(op) + ": " + what + " must have rank " +
                     std::to_string(rank) + ", got " + shape_string(t.shape()));
  }
}

[[noreturn]] void axis_error(const char* op, const std::string& axis, std::size_t expected,
                             std::size_t got) {
  throw ShapeError(std::string(op) + ": " + axis + " mismatch (expected " +
                   std::to_string(expected) + ", got " + std::to_string(got) + ")");
}

template <typename T>
bool wants_grad(const NodeT<T>& parent) {
  return parent.requires_grad;
}

// Elementwise unary op with derivative expressed through (x, y).
template <typename T, typename F, typename D>
Tensor<T> unary(const Tensor<T>& a, F f, D dfdx) {
  std::vector<T> out(a.size());
  auto in = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = f(in[i]);
  }
  return make_result<T>(a.shape(), std::move(out), {a}, [dfdx](NodeT<T>& self) {
    auto& p = *self.parents[0];
    auto& g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] += self.grad[i] * dfdx(p.value[i], self.value[i]);
    }
  });
}

// cols[(c*K + k), (b*Lout + o)] = x[b, c, o*stride + k - pad] (zero outside).
template <typename T>
void im2col(const T* x, std::size_t batch, std::size_t channels, std::size_t length,
            std::size_t kernel, std::size_t stride, std::size_t pad, std::size_t out_len,
            T* cols) {
  const std::size_t ncols = batch * out_len;
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t k = 0; k < kernel; ++k) {
      T* row = cols + (c * kernel + k) * ncols;
      for (std::size_t b = 0; b < batch; ++b) {
        const T* src = x + (b * channels + c) * length;
        T* dst = row + b * out_len;
        for (std::size_t o = 0; o < out_len; ++o) {
          const long pos = static_cast<long>(o * stride + k) - static_cast<long>(pad);
          dst[o] = (pos >= 0 && pos < static_cast<long>(length)) ? src[pos] : T(0);
        }
      }
    }
  }
}

// Adjoint of im2col: scatters-and-adds columns back into x.
template <typename T>
void col2im(const T* cols, std::size_t batch, std::size_t channels, std::size_t length,
            std::size_t kernel, std::size_t stride, std::size_t pad, std::size_t out_len,
            T* x) {
  const std::size_t ncols = batch * out_len;
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t k = 0; k < kernel; ++k) {
      const T* row = cols + (c * kernel + k) * ncols;
      for (std::size_t b = 0; b < batch; ++b) {
        T* dst = x + (b * channels + c) * length;
        const T* src = row + b * out_len;
        for (std::size_t o = 0; o < out_len; ++o) {
          const long pos = static_cast<long>(o * stride + k) - static_cast<long>(pad);
          if (pos >= 0 && pos < static_cast<long>(length)) {
            dst[pos] += src[o];
          }
        }
      }
    }
  }
}

// [B, C, L] <-> [C, B*L]
template <typename T>
void batch_to_channel_major(const T* x, std::size_t batch, std::size_t channels,
                            std::size_t length, T* out) {
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t c = 0; c < channels; ++c) {
      std::copy_n(x + (b * channels + c) * length, length, out + c * batch * length + b * length);
    }
  }
}

template <typename T>
void channel_major_to_batch(const T* x, std::size_t batch, std::size_t channels,
                            std::size_t length, T* out) {
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t c = 0; c < channels; ++c) {
      std::copy_n(x + c * batch * length + b * length, length, out + (b * channels + c) * length);
    }
  }
}

// Runs a batched op on a rank-2 [C x L] input by lifting it to [1 x C x L].
template <typename T, typename F>
Tensor<T> with_unit_batch(const Tensor<T>& input, F&& op) {
  Tensor<T> lifted = reshape(input, Shape{1, input.dim(0), input.dim(1)});
  Tensor<T> out = op(lifted);
  return reshape(out, Shape{out.dim(1), out.dim(2)});
}

}  // namespace

std::size_t conv1d_output_length(std::size_t length, std::size_t kernel, std::size_t stride,
                                 std::size_t padding) {
  if (stride == 0) {
    throw ShapeError("conv1d: stride must be >= 1");
  }
  if (length + 2 * padding < kernel) {
    throw ShapeError("conv1d: length axis too short (L + 2*padding = " +
                     std::to_string(length + 2 * padding) + " < kernel " +
                     std::to_string(kernel) + ")");
  }
  return (length + 2 * padding - kernel) / stride + 1;
}

std::size_t conv_transpose1d_output_length(std::size_t length, std::size_t kernel,
                                           std::size_t stride, std::size_t padding,
                                           std::size_t output_padding) {
  if (stride == 0) {
    throw ShapeError("conv_transpose1d: stride must be >= 1");
  }
  if (length == 0) {
    throw ShapeError("conv_transpose1d: empty length axis");
  }
  if (output_padding >= stride && output_padding > 0) {
    throw ShapeError("conv_transpose1d: output_padding must be smaller than stride");
  }
  const std::size_t full = (length - 1) * stride + kernel + output_padding;
  if (full < 2 * padding + 1) {
    throw ShapeError("conv_transpose1d: padding removes the whole length axis");
  }
  return full - 2 * padding;
}

// ---------------------------------------------------------------------------
// Elementwise and reductions

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("add", a, b);
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + b.values()[i];
  return make_result<T>(a.shape(), std::move(out), {a, b}, [](NodeT<T>& self) {
    for (auto& parent : self.parents) {
      if (!wants_grad(*parent)) continue;
      auto& g = parent->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("sub", a, b);
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] - b.values()[i];
  return make_result<T>(a.shape(), std::move(out), {a, b}, [](NodeT<T>& self) {
    if (wants_grad(*self.parents[0])) {
      auto& g = self.parents[0]->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (wants_grad(*self.parents[1])) {
      auto& g = self.parents[1]->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("mul", a, b);
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * b.values()[i];
  return make_result<T>(a.shape(), std::move(out), {a, b}, [](NodeT<T>& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    if (wants_grad(pa)) {
      auto& g = pa.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pb.value[i];
    }
    if (wants_grad(pb)) {
      auto& g = pb.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pa.value[i];
    }
  });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  return unary(
      a, [factor](T x) { return x * factor; }, [factor](T, T) { return factor; });
}

template <typename T>
Tensor<T> square(const Tensor<T>& a) {
  return unary(
      a, [](T x) { return x * x; }, [](T x, T) { return T(2) * x; });
}

template <typename T>
Tensor<T> exp(const Tensor<T>& a) {
  return unary(
      a, [](T x) { return std::exp(x); }, [](T, T y) { return y; });
}

template <typename T>
Tensor<T> log(const Tensor<T>& a, T floor) {
  return unary(
      a, [floor](T x) { return std::log(std::max(x, floor)); },
      [floor](T x, T) { return x > floor ? T(1) / x : T(0); });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& a) {
  return unary(
      a, [](T x) { return x > T(0) ? x : T(0); }, [](T x, T) { return x > T(0) ? T(1) : T(0); });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T total = T(0);
  for (T v : a.values()) total += v;
  return make_result<T>(Shape{1}, {total}, {a}, [](NodeT<T>& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (auto& gi : g) gi += self.grad[0];
  });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
  if (a.size() == 0) {
    throw ShapeError("mean: empty tensor");
  }
  return scale(sum(a), T(1) / static_cast<T>(a.size()));
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
  if (numel(shape) != a.size()) {
    throw ShapeError("reshape: cannot view " + shape_string(a.shape()) + " as " +
                     shape_string(shape));
  }
  std::vector<T> out(a.values().begin(), a.values().end());
  return make_result<T>(std::move(shape), std::move(out), {a}, [](NodeT<T>& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& logits) {
  if (logits.rank() != 1 && logits.rank() != 2) {
    throw ShapeError("softmax: expected [k] or [B x k], got " + shape_string(logits.shape()));
  }
  const std::size_t k = logits.shape().back();
  const std::size_t rows = logits.size() / k;
  std::vector<T> out(logits.size());
  auto in = logits.values();
  for (std::size_t r = 0; r < rows; ++r) {
    const T* x = in.data() + r * k;
    T* y = out.data() + r * k;
    const T peak = *std::max_element(x, x + k);
    T total = T(0);
    for (std::size_t j = 0; j < k; ++j) {
      y[j] = std::exp(x[j] - peak);
      total += y[j];
    }
    for (std::size_t j = 0; j < k; ++j) y[j] /= total;
  }
  return make_result<T>(logits.shape(), std::move(out), {logits}, [k, rows](NodeT<T>& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t r = 0; r < rows; ++r) {
      const T* y = self.value.data() + r * k;
      const T* dy = self.grad.data() + r * k;
      T dot = T(0);
      for (std::size_t j = 0; j < k; ++j) dot += dy[j] * y[j];
      for (std::size_t j = 0; j < k; ++j) g[r * k + j] += y[j] * (dy[j] - dot);
    }
  });
}

// ---------------------------------------------------------------------------
// Layers

template <typename T>
Tensor<T> dense(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias) {
  require_rank("dense", "weight", weight, 2);
  require_rank("dense", "bias", bias, 1);
  if (input.rank() == 1) {
    Tensor<T> out = dense(reshape(input, Shape{1, input.dim(0)}), weight, bias);
    return reshape(out, Shape{out.dim(1)});
  }
  require_rank("dense", "input", input, 2);
  const std::size_t batch = input.dim(0);
  const std::size_t n_in = input.dim(1);
  const std::size_t n_out = weight.dim(0);
  if (weight.dim(1) != n_in) axis_error("dense", "inner dimension (weight axis 1)", n_in, weight.dim(1));
  if (bias.dim(0) != n_out) axis_error("dense", "bias axis 0", n_out, bias.dim(0));

  std::vector<T> out(batch * n_out);
  ConstMapR<T> x(input.values().data(), batch, n_in);
  ConstMapR<T> w(weight.values().data(), n_out, n_in);
  MapR<T> y(out.data(), batch, n_out);
  y.noalias() = x * w.transpose();
  auto b = bias.values();
  for (std::size_t r = 0; r < batch; ++r)
    for (std::size_t j = 0; j < n_out; ++j) y(r, j) += b[j];

  return make_result<T>(Shape{batch, n_out}, std::move(out), {input, weight, bias},
                        [batch, n_in, n_out](NodeT<T>& self) {
    auto& px = *self.parents[0];
    auto& pw = *self.parents[1];
    auto& pb = *self.parents[2];
    ConstMapR<T> gy(self.grad.data(), batch, n_out);
    if (wants_grad(px)) {
      MapR<T> gx(px.ensure_grad().data(), batch, n_in);
      gx.noalias() += gy * ConstMapR<T>(pw.value.data(), n_out, n_in);
    }
    if (wants_grad(pw)) {
      MapR<T> gw(pw.ensure_grad().data(), n_out, n_in);
      gw.noalias() += gy.transpose() * ConstMapR<T>(px.value.data(), batch, n_in);
    }
    if (wants_grad(pb)) {
      auto& gb = pb.ensure_grad();
      for (std::size_t r = 0; r < batch; ++r)
        for (std::size_t j = 0; j < n_out; ++j) gb[j] += gy(r, j);
    }
  });
}

template <typename T>
Tensor<T> conv1d(const Tensor<T>& input, const Tensor<T>& kernels, const Tensor<T>& bias,
                 std::size_t stride, std::size_t padding) {
  if (input.rank() == 2) {
    return with_unit_batch(input, [&](const Tensor<T>& x) {
      return conv1d(x, kernels, bias, stride, padding);
    });
  }
  require_rank("conv1d", "input", input, 3);
  require_rank("conv1d", "kernels", kernels, 3);
  require_rank("conv1d", "bias", bias, 1);
  const std::size_t batch = input.dim(0);
  const std::size_t c_in = input.dim(1);
  const std::size_t length = input.dim(2);
  const std::size_t c_out = kernels.dim(0);
  const std::size_t kernel = kernels.dim(2);
  if (kernels.dim(1) != c_in) axis_error("conv1d", "input channel axis", kernels.dim(1), c_in);
  if (bias.dim(0) != c_out) axis_error("conv1d", "bias axis 0", c_out, bias.dim(0));
  const std::size_t out_len = conv1d_output_length(length, kernel, stride, padding);
  const std::size_t rows = c_in * kernel;
  const std::size_t ncols = batch * out_len;

  auto cols = std::make_shared<std::vector<T>>(rows * ncols);
  im2col(input.values().data(), batch, c_in, length, kernel, stride, padding, out_len,
         cols->data());
  MatR<T> prod = ConstMapR<T>(kernels.values().data(), c_out, rows) *
                 ConstMapR<T>(cols->data(), rows, ncols);
  std::vector<T> out(batch * c_out * out_len);
  channel_major_to_batch(prod.data(), batch, c_out, out_len, out.data());
  auto b = bias.values();
  for (std::size_t bi = 0; bi < batch; ++bi)
    for (std::size_t co = 0; co < c_out; ++co) {
      T* y = out.data() + (bi * c_out + co) * out_len;
      for (std::size_t o = 0; o < out_len; ++o) y[o] += b[co];
    }

  if (!(grad_enabled() && kernels.requires_grad())) {
    cols.reset();
  }
  return make_result<T>(
      Shape{batch, c_out, out_len}, std::move(out), {input, kernels, bias},
      [=](NodeT<T>& self) {
        auto& px = *self.parents[0];
        auto& pw = *self.parents[1];
        auto& pb = *self.parents[2];
        MatR<T> gy(c_out, ncols);
        batch_to_channel_major(self.grad.data(), batch, c_out, out_len, gy.data());
        if (wants_grad(pw)) {
          MapR<T> gw(pw.ensure_grad().data(), c_out, rows);
          gw.noalias() += gy * ConstMapR<T>(cols->data(), rows, ncols).transpose();
        }
        if (wants_grad(pb)) {
          auto& gb = pb.ensure_grad();
          for (std::size_t co = 0; co < c_out; ++co) gb[co] += gy.row(co).sum();
        }
        if (wants_grad(px)) {
          MatR<T> gcols = ConstMapR<T>(pw.value.data(), c_out, rows).transpose() * gy;
          col2im(gcols.data(), batch, c_in, length, kernel, stride, padding, out_len,
                 px.ensure_grad().data());
        }
      });
}

template <typename T>
Tensor<T> conv_transpose1d(const Tensor<T>& input, const Tensor<T>& kernels,
                           const Tensor<T>& bias, std::size_t stride, std::size_t padding,
                           std::size_t output_padding) {
  if (input.rank() == 2) {
    return with_unit_batch(input, [&](const Tensor<T>& x) {
      return conv_transpose1d(x, kernels, bias, stride, padding, output_padding);
    });
  }
  require_rank("conv_transpose1d", "input", input, 3);
  require_rank("conv_transpose1d", "kernels", kernels, 3);
  require_rank("conv_transpose1d", "bias", bias, 1);
  const std::size_t batch = input.dim(0);
  const std::size_t c_in = input.dim(1);
  const std::size_t length = input.dim(2);
  const std::size_t c_out = kernels.dim(1);
  const std::size_t kernel = kernels.dim(2);
  if (kernels.dim(0) != c_in)
    axis_error("conv_transpose1d", "input channel axis", kernels.dim(0), c_in);
  if (bias.dim(0) != c_out) axis_error("conv_transpose1d", "bias axis 0", c_out, bias.dim(0));
  const std::size_t out_len =
      conv_transpose1d_output_length(length, kernel, stride, padding, output_padding);
  const std::size_t rows = c_out * kernel;
  const std::size_t ncols = batch * length;

  // Channel-major copy of the input doubles as the saved operand for dW.
  auto x_cm = std::make_shared<MatR<T>>(c_in, ncols);
  batch_to_channel_major(input.values().data(), batch, c_in, length, x_cm->data());
  MatR<T> cols = ConstMapR<T>(kernels.values().data(), c_in, rows).transpose() * (*x_cm);
  std::vector<T> out(batch * c_out * out_len, T(0));
  col2im(cols.data(), batch, c_out, out_len, kernel, stride, padding, length, out.data());
  auto b = bias.values();
  for (std::size_t bi = 0; bi < batch; ++bi)
    for (std::size_t co = 0; co < c_out; ++co) {
      T* y = out.data() + (bi * c_out + co) * out_len;
      for (std::size_t o = 0; o < out_len; ++o) y[o] += b[co];
    }

  if (!(grad_enabled() && kernels.requires_grad())) {
    x_cm.reset();
  }
  return make_result<T>(
      Shape{batch, c_out, out_len}, std::move(out), {input, kernels, bias},
      [=](NodeT<T>& self) {
        auto& px = *self.parents[0];
        auto& pw = *self.parents[1];
        auto& pb = *self.parents[2];
        if (wants_grad(pb)) {
          auto& gb = pb.ensure_grad();
          for (std::size_t bi = 0; bi < batch; ++bi)
            for (std::size_t co = 0; co < c_out; ++co) {
              const T* g = self.grad.data() + (bi * c_out + co) * out_len;
              T total = T(0);
              for (std::size_t o = 0; o < out_len; ++o) total += g[o];
              gb[co] += total;
            }
        }
        if (!wants_grad(px) && !wants_grad(pw)) return;
        MatR<T> gcols(rows, ncols);
        im2col(self.grad.data(), batch, c_out, out_len, kernel, stride, padding, length,
               gcols.data());
        if (wants_grad(pw)) {
          MapR<T> gw(pw.ensure_grad().data(), c_in, rows);
          gw.noalias() += (*x_cm) * gcols.transpose();
        }
        if (wants_grad(px)) {
          MatR<T> gx = ConstMapR<T>(pw.value.data(), c_in, rows) * gcols;
          auto& g = px.ensure_grad();
          for (std::size_t bi = 0; bi < batch; ++bi)
            for (std::size_t c = 0; c < c_in; ++c) {
              T* dst = g.data() + (bi * c_in + c) * length;
              const T* src = gx.data() + c * ncols + bi * length;
              for (std::size_t i = 0; i < length; ++i) dst[i] += src[i];
            }
        }
      });
}

template <typename T>
Tensor<T> batch_norm1d(const Tensor<T>& input, const Tensor<T>& gamma, const Tensor<T>& beta,
                       BatchNormState<T>& state, Mode mode) {
  if (input.rank() != 2 && input.rank() != 3) {
    throw ShapeError("batch_norm1d: expected [B x C] or [B x C x L], got " +
                     shape_string(input.shape()));
  }
  const std::size_t batch = input.dim(0);
  const std::size_t channels = input.dim(1);
  const std::size_t length = input.rank() == 3 ? input.dim(2) : 1;
  if (gamma.size() != channels) axis_error("batch_norm1d", "gamma channel axis", channels, gamma.size());
  if (beta.size() != channels) axis_error("batch_norm1d", "beta channel axis", channels, beta.size());
  if (state.running_mean.size() != channels || state.running_var.size() != channels) {
    axis_error("batch_norm1d", "running statistics channel axis", channels,
               state.running_mean.size());
  }
  const std::size_t count = batch * length;
  if (mode == Mode::train && count <= 1) {
    throw std::invalid_argument(
        "batch_norm1d: degenerate batch (B*L == 1) cannot be normalized in train mode");
  }

  auto x = input.values();
  auto g = gamma.values();
  auto bt = beta.values();
  auto xhat = std::make_shared<std::vector<T>>(input.size());
  auto inv_std = std::make_shared<std::vector<T>>(channels);
  std::vector<T> out(input.size());
  for (std::size_t c = 0; c < channels; ++c) {
    double mu;
    double var;
    if (mode == Mode::train) {
      double total = 0.0;
      for (std::size_t b = 0; b < batch; ++b) {
        const T* row = x.data() + (b * channels + c) * length;
        for (std::size_t i = 0; i < length; ++i) total += row[i];
      }
      mu = total / static_cast<double>(count);
      double sq = 0.0;
      for (std::size_t b = 0; b < batch; ++b) {
        const T* row = x.data() + (b * channels + c) * length;
        for (std::size_t i = 0; i < length; ++i) {
          const double d = row[i] - mu;
          sq += d * d;
        }
      }
      var = sq / static_cast<double>(count);
      if (state.update_running) {
        const double m = state.momentum;
        const double unbiased = sq / static_cast<double>(count - 1);
        state.running_mean[c] = static_cast<T>((1.0 - m) * state.running_mean[c] + m * mu);
        state.running_var[c] = static_cast<T>((1.0 - m) * state.running_var[c] + m * unbiased);
      }
    } else {
      mu = state.running_mean[c];
      var = state.running_var[c];
    }
    const double istd = 1.0 / std::sqrt(var + state.eps);
    (*inv_std)[c] = static_cast<T>(istd);
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t off = (b * channels + c) * length;
      for (std::size_t i = 0; i < length; ++i) {
        const T h = static_cast<T>((x[off + i] - mu) * istd);
        (*xhat)[off + i] = h;
        out[off + i] = g[c] * h + bt[c];
      }
    }
  }

  const bool train = mode == Mode::train;
  return make_result<T>(
      input.shape(), std::move(out), {input, gamma, beta},
      [=](NodeT<T>& self) {
        auto& px = *self.parents[0];
        auto& pg = *self.parents[1];
        auto& pb = *self.parents[2];
        const auto& dy = self.grad;
        std::vector<T>* gg = wants_grad(pg) ? &pg.ensure_grad() : nullptr;
        std::vector<T>* gb = wants_grad(pb) ? &pb.ensure_grad() : nullptr;
        std::vector<T>* gx = wants_grad(px) ? &px.ensure_grad() : nullptr;
        for (std::size_t c = 0; c < channels; ++c) {
          double sum_dy = 0.0;
          double sum_dy_xhat = 0.0;
          for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t off = (b * channels + c) * length;
            for (std::size_t i = 0; i < length; ++i) {
              sum_dy += dy[off + i];
              sum_dy_xhat += dy[off + i] * (*xhat)[off + i];
            }
          }
          if (gg) (*gg)[c] += static_cast<T>(sum_dy_xhat);
          if (gb) (*gb)[c] += static_cast<T>(sum_dy);
          if (!gx) continue;
          const double gam = pg.value[c];
          const double istd = (*inv_std)[c];
          const double n = static_cast<double>(count);
          for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t off = (b * channels + c) * length;
            for (std::size_t i = 0; i < length; ++i) {
              double d;
              if (train) {
                d = gam * istd / n *
                    (n * dy[off + i] - sum_dy - (*xhat)[off + i] * sum_dy_xhat);
              } else {
                d = gam * istd * dy[off + i];
              }
              (*gx)[off + i] += static_cast<T>(d);
            }
          }
        }
      });
}

template <typename T>
Tensor<T> global_avg_pool1d(const Tensor<T>& input) {
  if (input.rank() == 2) {
    return with_unit_batch(input, [](const Tensor<T>& x) { return global_avg_pool1d(x); });
  }
  require_rank("global_avg_pool1d", "input", input, 3);
  const std::size_t batch = input.dim(0);
  const std::size_t channels = input.dim(1);
  const std::size_t length = input.dim(2);
  if (length == 0) {
    throw ShapeError("global_avg_pool1d: empty length axis");
  }
  std::vector<T> out(batch * channels);
  auto x = input.values();
  for (std::size_t r = 0; r < batch * channels; ++r) {
    T total = T(0);
    for (std::size_t i = 0; i < length; ++i) total += x[r * length + i];
    out[r] = total / static_cast<T>(length);
  }
  return make_result<T>(Shape{batch, channels, 1}, std::move(out), {input},
                        [length](NodeT<T>& self) {
    auto& g = self.parents[0]->ensure_grad();
    const T inv = T(1) / static_cast<T>(length);
    for (std::size_t r = 0; r < self.grad.size(); ++r)
      for (std::size_t i = 0; i < length; ++i) g[r * length + i] += self.grad[r] * inv;
  });
}

template <typename T>
Tensor<T> upsample_nearest1d(const Tensor<T>& input, std::size_t out_len) {
  require_rank("upsample_nearest1d", "input", input, 3);
  const std::size_t rows = input.dim(0) * input.dim(1);
  const std::size_t in_len = input.dim(2);
  if (in_len == 0 || out_len == 0) {
    throw ShapeError("upsample_nearest1d: empty length axis");
  }
  std::vector<std::size_t> source(out_len);
  for (std::size_t o = 0; o < out_len; ++o) source[o] = o * in_len / out_len;
  std::vector<T> out(rows * out_len);
  auto x = input.values();
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t o = 0; o < out_len; ++o) out[r * out_len + o] = x[r * in_len + source[o]];
  return make_result<T>(Shape{input.dim(0), input.dim(1), out_len}, std::move(out), {input},
                        [rows, in_len, out_len, source](NodeT<T>& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t o = 0; o < out_len; ++o)
        g[r * in_len + source[o]] += self.grad[r * out_len + o];
  });
}

template <typename T>
Tensor<T> dropout(const Tensor<T>& input, double p, Rng& rng, Mode mode) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw std::invalid_argument("dropout: probability must lie in [0, 1), got " +
                                std::to_string(p));
  }
  if (mode == Mode::eval || p == 0.0) {
    return input;
  }
  const T keep_scale = static_cast<T>(1.0 / (1.0 - p));
  auto mask = std::make_shared<std::vector<T>>(input.size());
  std::vector<T> out(input.size());
  auto x = input.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    (*mask)[i] = rng.uniform() < p ? T(0) : keep_scale;
    out[i] = x[i] * (*mask)[i];
  }
  return make_result<T>(input.shape(), std::move(out), {input}, [mask](NodeT<T>& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * (*mask)[i];
  });
}

#define SREA_INSTANTIATE_OPS(T)                                                             \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                               \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                               \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                               \
  template Tensor<T> scale(const Tensor<T>&, T);                                            \
  template Tensor<T> square(const Tensor<T>&);                                              \
  template Tensor<T> exp(const Tensor<T>&);                                                 \
  template Tensor<T> log(const Tensor<T>&, T);                                              \
  template Tensor<T> relu(const Tensor<T>&);                                                \
  template Tensor<T> sum(const Tensor<T>&);                                                 \
  template Tensor<T> mean(const Tensor<T>&);                                                \
  template Tensor<T> reshape(const Tensor<T>&, Shape);                                      \
  template Tensor<T> softmax(const Tensor<T>&);                                             \
  template Tensor<T> dense(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);           \
  template Tensor<T> conv1d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,           \
                            std::size_t, std::size_t);                                      \
  template Tensor<T> conv_transpose1d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, \
                                      std::size_t, std::size_t, std::size_t);               \
  template Tensor<T> batch_norm1d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,     \
                                  BatchNormState<T>&, Mode);                                \
  template Tensor<T> global_avg_pool1d(const Tensor<T>&);                                   \
  template Tensor<T> upsample_nearest1d(const Tensor<T>&, std::size_t);                     \
  template Tensor<T> dropout(const Tensor<T>&, double, Rng&, Mode);

SREA_INSTANTIATE_OPS(float)
SREA_INSTANTIATE_OPS(double)

#undef SREA_INSTANTIATE_OPS

}  // namespace srea::core
