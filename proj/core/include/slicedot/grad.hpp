#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "slicedot/tensor.hpp"

/// Minimal reverse-mode automatic differentiation over Tensor values.
///
/// A Tape records one forward evaluation as an append-only list of nodes.
/// Parents always precede their children, so reverse insertion order is a
/// valid reverse topological order and backward() visits each node once.
///
/// Non-smooth points follow fixed subgradient conventions: d|x|/dx = 0 at 0,
/// relu'(0) = 0, and the derivative of sqrt / root_p at 0 is taken as 0.
namespace slicedot::grad {

enum class Op {
  leaf,
  affine,
  l2_normalize_rows,
  matmul,
  transpose,
  add,
  sub,
  scalar_mul,
  abs,
  pow_p,
  root_p,
  mean,
  sum,
  inner,
  gather_rows,
  reshape,
  relu,
  leaky_relu,
  tanh,
  sqrt,
  norm_rows,
  project_linear,
  project_circular,
  offdiag_mean,
  concat_cols,
};

class Tape;

/// Handle to a node on a tape. Cheap to copy; valid while the tape is alive
/// and has not been cleared.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  Tape& tape() const { return *tape_; }
  std::size_t index() const noexcept { return index_; }
  bool valid() const noexcept { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t index) : tape_(tape), index_(index) {}

  Tape* tape_ = nullptr;
  std::size_t index_ = 0;
};

/// Gradients of a scalar root with respect to the parameter leaves.
class Gradients {
 public:
  const Tensor& operator[](const Var& parameter) const;
  bool contains(const Var& parameter) const { return grads_.contains(parameter.index()); }
  std::size_t size() const noexcept { return grads_.size(); }

 private:
  friend class Tape;
  std::unordered_map<std::size_t, Tensor> grads_;
};

/// View handed to a node's backward rule.
struct BackwardContext {
  const Tensor& value;
  const Tensor& adjoint;
  std::span<const Tensor* const> inputs;
  /// Null where the corresponding input does not require a gradient.
  std::span<Tensor* const> input_adjoints;
};

using BackwardFn = std::function<void(const BackwardContext&)>;

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf that never receives a gradient.
  Var constant(Tensor value);
  /// Leaf whose gradient is reported by backward().
  Var parameter(Tensor value);

  /// Reverse sweep from a scalar root. Adjoints are fresh on every call.
  Gradients backward(const Var& root);

  /// Drops every node; outstanding Vars become dangling.
  void clear();
  std::size_t size() const noexcept { return nodes_.size(); }

  Op op(const Var& v) const { return nodes_.at(v.index()).op; }
  const Tensor& value(std::size_t index) const { return nodes_[index].value; }
  bool requires_grad(const Var& v) const { return nodes_.at(v.index()).requires_grad; }

  /// Appends a derived node. Used by the primitive implementations.
  Var record(Op op, Tensor value, std::vector<std::size_t> parents, BackwardFn backward);

 private:
  struct Node {
    Op op = Op::leaf;
    Tensor value;
    std::vector<std::size_t> parents;
    BackwardFn backward;
    bool requires_grad = false;
    bool parameter = false;
  };

  void check_owned(const Var& v) const;

  std::vector<Node> nodes_;
};

// Primitives. Shapes: vectors are (n,), matrices (rows, cols).

/// x (n, in), W (out, in), b (out,) -> x W^T + b, (n, out).
Var affine(const Var& weight, const Var& bias, const Var& x);
/// Rows divided by their Euclidean norm; DomainError when a norm is < 1e-12.
Var l2_normalize_rows(const Var& x);
Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var scalar_mul(const Var& x, double c);
Var abs(const Var& x);
/// |x|^p elementwise, p >= 1.
Var pow_p(const Var& x, double p);
/// x^(1/p) elementwise for x >= 0, p >= 1.
Var root_p(const Var& x, double p);
/// Scalar mean / sum over all entries.
Var mean(const Var& x);
Var sum(const Var& x);
/// Scalar sum_i a_i b_i over equal shapes.
Var inner(const Var& a, const Var& b);
/// out[r] = x[index[r]] over leading-axis rows; backward scatter-adds.
Var gather_rows(const Var& x, std::vector<std::size_t> index);
Var reshape(const Var& x, Shape shape);
Var relu(const Var& x);
Var leaky_relu(const Var& x, double slope);
Var tanh(const Var& x);
Var sqrt(const Var& x);
/// (n, d) -> (n,) Euclidean row norms.
Var norm_rows(const Var& x);
/// points (k, d), dirs (n, d) -> (n, k) with out[i][j] = <x_j, theta_i>.
Var project_linear(const Var& points, const Var& dirs);
/// points (k, d), dirs (n, d) -> (n, k) with out[i][j] = ||x_j - r theta_i||.
Var project_circular(const Var& points, const Var& dirs, double radius);
/// Mean over the off-diagonal entries of a square matrix; 0 when n == 1.
Var offdiag_mean(const Var& x);
/// (n, p), (n, q) -> (n, p + q).
Var concat_cols(const Var& a, const Var& b);

}  // namespace slicedot::grad
