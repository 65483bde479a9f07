#include "srea/core/tensor.hpp"

#include <atomic>
#include <sstream>
#include <unordered_set>

namespace srea::core {

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t extent : shape) {
    n *= extent;
  }
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) {
      os << 'x';
    }
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace detail {

std::uint64_t next_node_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace detail

namespace {
thread_local bool g_grad_enabled = true;
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

bool grad_enabled() { return g_grad_enabled; }

template <typename T>
Tensor<T> Tensor<T>::from(Shape shape, std::vector<T> values, bool requires_grad) {
  if (numel(shape) != values.size()) {
    throw ShapeError("Tensor::from: shape " + shape_string(shape) + " holds " +
                     std::to_string(numel(shape)) + " values, got " +
                     std::to_string(values.size()));
  }
  auto node = std::make_shared<detail::Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::full(Shape shape, T value, bool requires_grad) {
  std::vector<T> values(numel(shape), value);
  return from(std::move(shape), std::move(values), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value, bool requires_grad) {
  return from(Shape{1}, std::vector<T>{value}, requires_grad);
}

template <typename T>
T Tensor<T>::item() const {
  if (node_->value.size() != 1) {
    throw ShapeError("Tensor::item: tensor of shape " + shape_string(shape()) +
                     " is not a scalar");
  }
  return node_->value[0];
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  return from(node_->shape, node_->value, false);
}

template <typename T>
Tensor<T> make_result(Shape shape, std::vector<T> values,
                      std::vector<Tensor<T>> parents,
                      std::function<void(detail::Node<T>&)> backward) {
  auto node = std::make_shared<detail::Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  bool needs = false;
  if (grad_enabled()) {
    for (const auto& p : parents) {
      needs = needs || p.requires_grad();
    }
  }
  if (needs) {
    node->requires_grad = true;
    node->parents.reserve(parents.size());
    for (auto& p : parents) {
      node->parents.push_back(p.node());
    }
    node->backward = std::move(backward);
  }
  return Tensor<T>(std::move(node));
}

namespace {

template <typename T>
std::vector<detail::Node<T>*> topological_order(detail::Node<T>* root) {
  // Iterative post-order DFS; result lists parents before children.
  std::vector<detail::Node<T>*> order;
  std::unordered_set<detail::Node<T>*> seen;
  std::vector<std::pair<detail::Node<T>*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  seen.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node<T>* parent = node->parents[next++].get();
      if (parent->requires_grad && seen.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

}  // namespace

template <typename T>
void backward(const Tensor<T>& loss) {
  if (!loss) {
    throw std::invalid_argument("backward: empty tensor");
  }
  if (loss.size() != 1) {
    throw ShapeError("backward: loss must be a scalar, got shape " +
                     shape_string(loss.shape()));
  }
  if (!loss.requires_grad()) {
    return;
  }
  auto order = topological_order(loss.node().get());
  loss.node()->ensure_grad()[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node<T>* node = *it;
    if (node->backward && !node->grad.empty()) {
      node->backward(*node);
    }
  }
}

template <typename T>
std::vector<std::uint64_t> backward_order(const Tensor<T>& loss) {
  std::vector<std::uint64_t> ids;
  if (!loss || !loss.requires_grad()) {
    return ids;
  }
  auto order = topological_order(loss.node().get());
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    ids.push_back((*it)->id);
  }
  return ids;
}

#define SREA_INSTANTIATE_TENSOR(T)                                            \
  template class Tensor<T>;                                                   \
  template Tensor<T> make_result<T>(Shape, std::vector<T>,                    \
                                    std::vector<Tensor<T>>,                   \
                                    std::function<void(detail::Node<T>&)>);  \
  template void backward<T>(const Tensor<T>&);                                \
  template std::vector<std::uint64_t> backward_order<T>(const Tensor<T>&);

SREA_INSTANTIATE_TENSOR(float)
SREA_INSTANTIATE_TENSOR(double)

#undef SREA_INSTANTIATE_TENSOR

}  // namespace srea::core
