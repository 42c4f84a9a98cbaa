#include "slicedot/grad.hpp"

#include <cmath>
#include <string>

#include "slicedot/errors.hpp"
#include "slicedot/parallel.hpp"

namespace slicedot::grad {
namespace {

constexpr double kNormFloor = 1e-12;

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void require_rank(const Tensor& t, std::size_t rank, const char* what) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(what) + ": expected rank " + std::to_string(rank) + ", got " +
                     shape_string(t.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shapes " + shape_string(a.shape()) + " and " +
                     shape_string(b.shape()) + " differ");
  }
}

Tape& common_tape(const Var& a, const Var& b) {
  if (&a.tape() != &b.tape()) throw ShapeError("operands live on different tapes");
  return a.tape();
}

// Elementwise unary op with derivative expressed in terms of input and output.
template <class Fwd, class Deriv>
Var unary(const Var& x, Op op, Fwd fwd, Deriv deriv) {
  Tensor out(x.shape());
  const auto in = x.value().data();
  auto o = out.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = fwd(in[i]);
  return x.tape().record(op, std::move(out), {x.index()}, [deriv](const BackwardContext& ctx) {
    const auto xin = ctx.inputs[0]->data();
    const auto y = ctx.value.data();
    const auto g = ctx.adjoint.data();
    auto dx = ctx.input_adjoints[0]->data();
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i] * deriv(xin[i], y[i]);
  });
}

void accumulate(Tensor& dst, const Tensor& src, double scale = 1.0) {
  auto d = dst.data();
  const auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += scale * s[i];
}

}  // namespace

const Tensor& Var::value() const {
  if (!tape_) throw ShapeError("use of an unbound Var");
  return tape_->value(index_);
}

const Tensor& Gradients::operator[](const Var& parameter) const {
  const auto it = grads_.find(parameter.index());
  if (it == grads_.end()) throw ShapeError("no gradient recorded for this node (not a parameter?)");
  return it->second;
}

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{Op::leaf, std::move(value), {}, {}, false, false});
  return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(Tensor value) {
  nodes_.push_back(Node{Op::leaf, std::move(value), {}, {}, true, true});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Op op, Tensor value, std::vector<std::size_t> parents, BackwardFn backward) {
  bool needs = false;
  for (std::size_t p : parents) {
    if (p >= nodes_.size()) throw ShapeError("parent index out of range");
    needs = needs || nodes_[p].requires_grad;
  }
  nodes_.push_back(Node{op, std::move(value), std::move(parents), needs ? std::move(backward) : BackwardFn{}, needs,
                        false});
  return Var(this, nodes_.size() - 1);
}

void Tape::check_owned(const Var& v) const {
  if (!v.valid() || &v.tape() != this || v.index() >= nodes_.size()) throw ShapeError("Var does not belong to tape");
}

Gradients Tape::backward(const Var& root) {
  check_owned(root);
  if (nodes_[root.index()].value.size() != 1) {
    throw NonScalarRootError("backward() needs a scalar root, got shape " +
                             shape_string(nodes_[root.index()].value.shape()));
  }
  std::vector<Tensor> adjoints(root.index() + 1);
  adjoints[root.index()] = Tensor::filled(nodes_[root.index()].value.shape(), 1.0);

  std::vector<const Tensor*> inputs;
  std::vector<Tensor*> input_adjoints;
  for (std::size_t i = root.index() + 1; i-- > 0;) {
    const Node& node = nodes_[i];
    if (!node.backward || adjoints[i].empty()) continue;
    inputs.clear();
    input_adjoints.clear();
    for (std::size_t p : node.parents) {
      inputs.push_back(&nodes_[p].value);
      if (nodes_[p].requires_grad) {
        const Tensor& v = nodes_[p].value;
        if (adjoints[p].size() != v.size() || !adjoints[p].same_shape(v)) adjoints[p] = Tensor(v.shape());
        input_adjoints.push_back(&adjoints[p]);
      } else {
        input_adjoints.push_back(nullptr);
      }
    }
    node.backward(BackwardContext{node.value, adjoints[i], inputs, input_adjoints});
  }

  Gradients out;
  for (std::size_t i = 0; i <= root.index(); ++i) {
    if (!nodes_[i].parameter) continue;
    Tensor g = adjoints[i].same_shape(nodes_[i].value) ? std::move(adjoints[i]) : Tensor(nodes_[i].value.shape());
    out.grads_.emplace(i, std::move(g));
  }
  return out;
}

void Tape::clear() { nodes_.clear(); }

Var affine(const Var& weight, const Var& bias, const Var& x) {
  Tape& tape = common_tape(weight, x);
  common_tape(bias, x);
  const Tensor& W = weight.value();
  const Tensor& b = bias.value();
  const Tensor& X = x.value();
  require_rank(W, 2, "affine weight");
  require_rank(b, 1, "affine bias");
  require_rank(X, 2, "affine input");
  const std::size_t n = X.rows(), in = X.cols(), out_dim = W.rows();
  if (W.cols() != in || b.size() != out_dim) {
    throw ShapeError("affine: W " + shape_string(W.shape()) + ", b " + shape_string(b.shape()) + ", x " +
                     shape_string(X.shape()));
  }
  Tensor y({n, out_dim});
  for (std::size_t r = 0; r < n; ++r) {
    const auto xr = X.row(r);
    for (std::size_t o = 0; o < out_dim; ++o) {
      const auto wr = W.row(o);
      double acc = b[o];
      for (std::size_t c = 0; c < in; ++c) acc += wr[c] * xr[c];
      y.at(r, o) = acc;
    }
  }
  return tape.record(Op::affine, std::move(y), {weight.index(), bias.index(), x.index()},
                     [n, in, out_dim](const BackwardContext& ctx) {
                       const Tensor& W = *ctx.inputs[0];
                       const Tensor& X = *ctx.inputs[2];
                       const Tensor& G = ctx.adjoint;
                       if (Tensor* dW = ctx.input_adjoints[0]) {
                         for (std::size_t r = 0; r < n; ++r)
                           for (std::size_t o = 0; o < out_dim; ++o) {
                             const double g = G.at(r, o);
                             if (g == 0.0) continue;
                             auto dwr = dW->row(o);
                             const auto xr = X.row(r);
                             for (std::size_t c = 0; c < in; ++c) dwr[c] += g * xr[c];
                           }
                       }
                       if (Tensor* db = ctx.input_adjoints[1]) {
                         for (std::size_t r = 0; r < n; ++r)
                           for (std::size_t o = 0; o < out_dim; ++o) (*db)[o] += G.at(r, o);
                       }
                       if (Tensor* dX = ctx.input_adjoints[2]) {
                         for (std::size_t r = 0; r < n; ++r) {
                           auto dxr = dX->row(r);
                           for (std::size_t o = 0; o < out_dim; ++o) {
                             const double g = G.at(r, o);
                             if (g == 0.0) continue;
                             const auto wr = W.row(o);
                             for (std::size_t c = 0; c < in; ++c) dxr[c] += g * wr[c];
                           }
                         }
                       }
                     });
}

Var l2_normalize_rows(const Var& x) {
  const Tensor& X = x.value();
  require_rank(X, 2, "l2_normalize_rows");
  const std::size_t n = X.rows(), d = X.cols();
  Tensor y({n, d});
  std::vector<double> norms(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto xr = X.row(r);
    double s = 0.0;
    for (double v : xr) s += v * v;
    norms[r] = std::sqrt(s);
    if (norms[r] < kNormFloor) throw DomainError("l2_normalize_rows: row " + std::to_string(r) + " has norm < 1e-12");
    auto yr = y.row(r);
    for (std::size_t c = 0; c < d; ++c) yr[c] = xr[c] / norms[r];
  }
  return x.tape().record(Op::l2_normalize_rows, std::move(y), {x.index()},
                         [norms = std::move(norms), n, d](const BackwardContext& ctx) {
                           Tensor& dX = *ctx.input_adjoints[0];
                           for (std::size_t r = 0; r < n; ++r) {
                             const auto yr = ctx.value.row(r);
                             const auto gr = ctx.adjoint.row(r);
                             double dot = 0.0;
                             for (std::size_t c = 0; c < d; ++c) dot += yr[c] * gr[c];
                             auto dr = dX.row(r);
                             for (std::size_t c = 0; c < d; ++c) dr[c] += (gr[c] - yr[c] * dot) / norms[r];
                           }
                         });
}

Var matmul(const Var& a, const Var& b) {
  Tape& tape = common_tape(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require_rank(A, 2, "matmul lhs");
  require_rank(B, 2, "matmul rhs");
  const std::size_t n = A.rows(), m = A.cols(), q = B.cols();
  if (B.rows() != m) throw ShapeError("matmul: " + shape_string(A.shape()) + " x " + shape_string(B.shape()));
  Tensor C({n, q});
  for (std::size_t i = 0; i < n; ++i) {
    auto cr = C.row(i);
    for (std::size_t k = 0; k < m; ++k) {
      const double aik = A.at(i, k);
      const auto br = B.row(k);
      for (std::size_t j = 0; j < q; ++j) cr[j] += aik * br[j];
    }
  }
  return tape.record(Op::matmul, std::move(C), {a.index(), b.index()}, [n, m, q](const BackwardContext& ctx) {
    const Tensor& A = *ctx.inputs[0];
    const Tensor& B = *ctx.inputs[1];
    const Tensor& G = ctx.adjoint;
    if (Tensor* dA = ctx.input_adjoints[0]) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < m; ++k) {
          const auto br = B.row(k);
          const auto gr = G.row(i);
          double acc = 0.0;
          for (std::size_t j = 0; j < q; ++j) acc += gr[j] * br[j];
          dA->at(i, k) += acc;
        }
    }
    if (Tensor* dB = ctx.input_adjoints[1]) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < m; ++k) {
          const double aik = A.at(i, k);
          auto dbr = dB->row(k);
          const auto gr = G.row(i);
          for (std::size_t j = 0; j < q; ++j) dbr[j] += aik * gr[j];
        }
    }
  });
}

Var transpose(const Var& a) {
  const Tensor& A = a.value();
  require_rank(A, 2, "transpose");
  const std::size_t n = A.rows(), m = A.cols();
  Tensor T({m, n});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) T.at(j, i) = A.at(i, j);
  return a.tape().record(Op::transpose, std::move(T), {a.index()}, [n, m](const BackwardContext& ctx) {
    Tensor& dA = *ctx.input_adjoints[0];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) dA.at(i, j) += ctx.adjoint.at(j, i);
  });
}

Var add(const Var& a, const Var& b) {
  Tape& tape = common_tape(a, b);
  require_same_shape(a.value(), b.value(), "add");
  Tensor out = a.value();
  accumulate(out, b.value());
  return tape.record(Op::add, std::move(out), {a.index(), b.index()}, [](const BackwardContext& ctx) {
    if (ctx.input_adjoints[0]) accumulate(*ctx.input_adjoints[0], ctx.adjoint);
    if (ctx.input_adjoints[1]) accumulate(*ctx.input_adjoints[1], ctx.adjoint);
  });
}

Var sub(const Var& a, const Var& b) {
  Tape& tape = common_tape(a, b);
  require_same_shape(a.value(), b.value(), "sub");
  Tensor out = a.value();
  accumulate(out, b.value(), -1.0);
  return tape.record(Op::sub, std::move(out), {a.index(), b.index()}, [](const BackwardContext& ctx) {
    if (ctx.input_adjoints[0]) accumulate(*ctx.input_adjoints[0], ctx.adjoint);
    if (ctx.input_adjoints[1]) accumulate(*ctx.input_adjoints[1], ctx.adjoint, -1.0);
  });
}

Var scalar_mul(const Var& x, double c) {
  return unary(x, Op::scalar_mul, [c](double v) { return c * v; }, [c](double, double) { return c; });
}

Var abs(const Var& x) {
  return unary(x, Op::abs, [](double v) { return std::abs(v); }, [](double v, double) { return sign(v); });
}

Var pow_p(const Var& x, double p) {
  if (!(p >= 1.0)) throw DomainError("pow_p requires p >= 1");
  if (p == 1.0) return unary(x, Op::pow_p, [](double v) { return std::abs(v); }, [](double v, double) { return sign(v); });
  if (p == 2.0) {
    return unary(x, Op::pow_p, [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; });
  }
  return unary(
      x, Op::pow_p, [p](double v) { return std::pow(std::abs(v), p); },
      [p](double v, double) { return p * std::pow(std::abs(v), p - 1.0) * sign(v); });
}

Var root_p(const Var& x, double p) {
  if (!(p >= 1.0)) throw DomainError("root_p requires p >= 1");
  for (double v : x.value().data())
    if (v < 0.0) throw DomainError("root_p of a negative value");
  if (p == 1.0) return unary(x, Op::root_p, [](double v) { return v; }, [](double, double) { return 1.0; });
  return unary(
      x, Op::root_p, [p](double v) { return p == 2.0 ? std::sqrt(v) : std::pow(v, 1.0 / p); },
      [p](double v, double y) { return v > 0.0 ? y / (p * v) : 0.0; });
}

Var mean(const Var& x) {
  const auto data = x.value().data();
  if (data.empty()) throw ShapeError("mean of an empty tensor");
  double s = 0.0;
  for (double v : data) s += v;
  const double n = static_cast<double>(data.size());
  return x.tape().record(Op::mean, Tensor::scalar(s / n), {x.index()}, [n](const BackwardContext& ctx) {
    const double g = ctx.adjoint[0] / n;
    for (double& v : ctx.input_adjoints[0]->data()) v += g;
  });
}

Var sum(const Var& x) {
  double s = 0.0;
  for (double v : x.value().data()) s += v;
  return x.tape().record(Op::sum, Tensor::scalar(s), {x.index()}, [](const BackwardContext& ctx) {
    const double g = ctx.adjoint[0];
    for (double& v : ctx.input_adjoints[0]->data()) v += g;
  });
}

Var inner(const Var& a, const Var& b) {
  Tape& tape = common_tape(a, b);
  require_same_shape(a.value(), b.value(), "inner");
  const auto x = a.value().data();
  const auto y = b.value().data();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return tape.record(Op::inner, Tensor::scalar(s), {a.index(), b.index()}, [](const BackwardContext& ctx) {
    const double g = ctx.adjoint[0];
    if (ctx.input_adjoints[0]) accumulate(*ctx.input_adjoints[0], *ctx.inputs[1], g);
    if (ctx.input_adjoints[1]) accumulate(*ctx.input_adjoints[1], *ctx.inputs[0], g);
  });
}

Var gather_rows(const Var& x, std::vector<std::size_t> index) {
  const Tensor& X = x.value();
  if (X.rank() == 0) throw ShapeError("gather_rows on a scalar");
  const std::size_t c = X.cols();
  Shape shape = X.shape();
  shape[0] = index.size();
  Tensor out(shape);
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] >= X.rows()) throw ShapeError("gather_rows: index " + std::to_string(index[r]) + " out of range");
    const auto src = X.row(index[r]);
    std::copy(src.begin(), src.end(), out.data().begin() + static_cast<std::ptrdiff_t>(r * c));
  }
  return x.tape().record(Op::gather_rows, std::move(out), {x.index()},
                         [index = std::move(index), c](const BackwardContext& ctx) {
                           auto dx = ctx.input_adjoints[0]->data();
                           const auto g = ctx.adjoint.data();
                           for (std::size_t r = 0; r < index.size(); ++r)
                             for (std::size_t j = 0; j < c; ++j) dx[index[r] * c + j] += g[r * c + j];
                         });
}

Var reshape(const Var& x, Shape shape) {
  Tensor out = x.value().reshaped(std::move(shape));
  return x.tape().record(Op::reshape, std::move(out), {x.index()}, [](const BackwardContext& ctx) {
    auto dx = ctx.input_adjoints[0]->data();
    const auto g = ctx.adjoint.data();
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i];
  });
}

Var relu(const Var& x) {
  return unary(x, Op::relu, [](double v) { return v > 0.0 ? v : 0.0; }, [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Var leaky_relu(const Var& x, double slope) {
  return unary(
      x, Op::leaky_relu, [slope](double v) { return v > 0.0 ? v : slope * v; },
      [slope](double v, double) { return v > 0.0 ? 1.0 : slope; });
}

Var tanh(const Var& x) {
  return unary(x, Op::tanh, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Var sqrt(const Var& x) {
  for (double v : x.value().data())
    if (v < 0.0) throw DomainError("sqrt of a negative value");
  return unary(x, Op::sqrt, [](double v) { return std::sqrt(v); }, [](double, double y) { return y > 0.0 ? 0.5 / y : 0.0; });
}

Var norm_rows(const Var& x) {
  const Tensor& X = x.value();
  require_rank(X, 2, "norm_rows");
  const std::size_t n = X.rows(), d = X.cols();
  Tensor out({n});
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (double v : X.row(r)) s += v * v;
    out[r] = std::sqrt(s);
  }
  return x.tape().record(Op::norm_rows, std::move(out), {x.index()}, [n, d](const BackwardContext& ctx) {
    const Tensor& X = *ctx.inputs[0];
    Tensor& dX = *ctx.input_adjoints[0];
    for (std::size_t r = 0; r < n; ++r) {
      if (ctx.value[r] == 0.0) continue;
      const double g = ctx.adjoint[r] / ctx.value[r];
      const auto xr = X.row(r);
      auto dr = dX.row(r);
      for (std::size_t c = 0; c < d; ++c) dr[c] += g * xr[c];
    }
  });
}

Var project_linear(const Var& points, const Var& dirs) {
  Tape& tape = common_tape(points, dirs);
  const Tensor& P = points.value();
  const Tensor& D = dirs.value();
  require_rank(P, 2, "project points");
  require_rank(D, 2, "project directions");
  const std::size_t k = P.rows(), d = P.cols(), n = D.rows();
  if (D.cols() != d) throw ShapeError("project: points " + shape_string(P.shape()) + " vs directions " + shape_string(D.shape()));
  Tensor out({n, k});
  parallel_for(n, [&](std::size_t i) {
    const auto th = D.row(i);
    auto orow = out.row(i);
    for (std::size_t j = 0; j < k; ++j) {
      const auto x = P.row(j);
      double acc = 0.0;
      for (std::size_t c = 0; c < d; ++c) acc += x[c] * th[c];
      orow[j] = acc;
    }
  });
  return tape.record(Op::project_linear, std::move(out), {points.index(), dirs.index()},
                     [k, d, n](const BackwardContext& ctx) {
                       const Tensor& P = *ctx.inputs[0];
                       const Tensor& D = *ctx.inputs[1];
                       const Tensor& G = ctx.adjoint;
                       if (Tensor* dP = ctx.input_adjoints[0]) {
                         for (std::size_t i = 0; i < n; ++i) {
                           const auto th = D.row(i);
                           const auto gr = G.row(i);
                           for (std::size_t j = 0; j < k; ++j) {
                             const double g = gr[j];
                             if (g == 0.0) continue;
                             auto pr = dP->row(j);
                             for (std::size_t c = 0; c < d; ++c) pr[c] += g * th[c];
                           }
                         }
                       }
                       if (Tensor* dD = ctx.input_adjoints[1]) {
                         for (std::size_t i = 0; i < n; ++i) {
                           auto dr = dD->row(i);
                           const auto gr = G.row(i);
                           for (std::size_t j = 0; j < k; ++j) {
                             const double g = gr[j];
                             if (g == 0.0) continue;
                             const auto x = P.row(j);
                             for (std::size_t c = 0; c < d; ++c) dr[c] += g * x[c];
                           }
                         }
                       }
                     });
}

Var project_circular(const Var& points, const Var& dirs, double radius) {
  if (!(radius > 0.0)) throw DomainError("circular defining function needs radius > 0");
  Tape& tape = common_tape(points, dirs);
  const Tensor& P = points.value();
  const Tensor& D = dirs.value();
  require_rank(P, 2, "project points");
  require_rank(D, 2, "project directions");
  const std::size_t k = P.rows(), d = P.cols(), n = D.rows();
  if (D.cols() != d) throw ShapeError("project: points " + shape_string(P.shape()) + " vs directions " + shape_string(D.shape()));
  Tensor out({n, k});
  parallel_for(n, [&](std::size_t i) {
    const auto th = D.row(i);
    auto orow = out.row(i);
    for (std::size_t j = 0; j < k; ++j) {
      const auto x = P.row(j);
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = x[c] - radius * th[c];
        s += diff * diff;
      }
      orow[j] = std::sqrt(s);
    }
  });
  return tape.record(Op::project_circular, std::move(out), {points.index(), dirs.index()},
                     [k, d, n, radius](const BackwardContext& ctx) {
                       const Tensor& P = *ctx.inputs[0];
                       const Tensor& D = *ctx.inputs[1];
                       Tensor* dP = ctx.input_adjoints[0];
                       Tensor* dD = ctx.input_adjoints[1];
                       for (std::size_t i = 0; i < n; ++i) {
                         const auto th = D.row(i);
                         for (std::size_t j = 0; j < k; ++j) {
                           const double dist = ctx.value.at(i, j);
                           const double g = ctx.adjoint.at(i, j);
                           if (g == 0.0 || dist == 0.0) continue;
                           const auto x = P.row(j);
                           const double s = g / dist;
                           for (std::size_t c = 0; c < d; ++c) {
                             const double diff = x[c] - radius * th[c];
                             if (dP) dP->at(j, c) += s * diff;
                             if (dD) dD->at(i, c) -= s * radius * diff;
                           }
                         }
                       }
                     });
}

Var offdiag_mean(const Var& x) {
  const Tensor& X = x.value();
  require_rank(X, 2, "offdiag_mean");
  const std::size_t n = X.rows();
  if (X.cols() != n) throw ShapeError("offdiag_mean needs a square matrix, got " + shape_string(X.shape()));
  const double pairs = static_cast<double>(n) * static_cast<double>(n > 0 ? n - 1 : 0);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += X.at(i, j);
  const double value = pairs > 0.0 ? s / pairs : 0.0;
  return x.tape().record(Op::offdiag_mean, Tensor::scalar(value), {x.index()}, [n, pairs](const BackwardContext& ctx) {
    if (pairs == 0.0) return;
    const double g = ctx.adjoint[0] / pairs;
    Tensor& dX = *ctx.input_adjoints[0];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) dX.at(i, j) += g;
  });
}

Var concat_cols(const Var& a, const Var& b) {
  Tape& tape = common_tape(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require_rank(A, 2, "concat_cols lhs");
  require_rank(B, 2, "concat_cols rhs");
  if (A.rows() != B.rows()) throw ShapeError("concat_cols: row counts differ");
  const std::size_t n = A.rows(), p = A.cols(), q = B.cols();
  Tensor out({n, p + q});
  for (std::size_t r = 0; r < n; ++r) {
    auto o = out.row(r);
    const auto ar = A.row(r);
    const auto br = B.row(r);
    std::copy(ar.begin(), ar.end(), o.begin());
    std::copy(br.begin(), br.end(), o.begin() + static_cast<std::ptrdiff_t>(p));
  }
  return tape.record(Op::concat_cols, std::move(out), {a.index(), b.index()}, [n, p, q](const BackwardContext& ctx) {
    for (std::size_t r = 0; r < n; ++r) {
      const auto g = ctx.adjoint.row(r);
      if (Tensor* dA = ctx.input_adjoints[0]) {
        auto d = dA->row(r);
        for (std::size_t c = 0; c < p; ++c) d[c] += g[c];
      }
      if (Tensor* dB = ctx.input_adjoints[1]) {
        auto d = dB->row(r);
        for (std::size_t c = 0; c < q; ++c) d[c] += g[p + c];
      }
    }
  });
}

}  // namespace slicedot::grad
