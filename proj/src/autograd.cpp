// tsasr/autograd.cpp

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "tsasr/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

namespace tsasr {

Tensor::Tensor(std::vector<int64_t> s, double fill) : shape(std::move(s)) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  data.assign(static_cast<size_t>(n), fill);
}

Tensor Tensor::FromData(std::vector<int64_t> s, std::vector<double> d) {
  Tensor t;
  t.shape = std::move(s);
  t.data = std::move(d);
  if (t.NumElements() != static_cast<int64_t>(t.data.size()))
    throw std::invalid_argument("Tensor::FromData: shape/data size mismatch");
  return t;
}

int64_t Tensor::NumElements() const {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

int64_t Tensor::Rows() const {
  if (shape.size() != 2) throw std::invalid_argument("Tensor::Rows: not 2-D");
  return shape[0];
}

int64_t Tensor::Cols() const {
  if (shape.size() != 2) throw std::invalid_argument("Tensor::Cols: not 2-D");
  return shape[1];
}

double &Tensor::At(int64_t r, int64_t c) { return data[static_cast<size_t>(r * Cols() + c)]; }
double Tensor::At(int64_t r, int64_t c) const { return data[static_cast<size_t>(r * Cols() + c)]; }

void Node::EnsureGrad() {
  if (grad.data.size() != value.data.size()) {
    grad.shape = value.shape;
    grad.data.assign(value.data.size(), 0.0);
  }
}

void Node::ZeroGrad() {
  grad.shape = value.shape;
  grad.data.assign(value.data.size(), 0.0);
}

Var Constant(Tensor v) { return std::make_shared<Node>(std::move(v), false); }
Var Param(Tensor v) { return std::make_shared<Node>(std::move(v), true); }

namespace {

bool AnyRequiresGrad(const std::vector<Var> &parents) {
  for (const auto &p : parents)
    if (p->requires_grad) return true;
  return false;
}

Var MakeOp(Tensor out, std::vector<Var> parents, std::function<void(Node &)> bw) {
  bool rg = AnyRequiresGrad(parents);
  auto n = std::make_shared<Node>(std::move(out), rg);
  if (rg) {
    n->parents = std::move(parents);
    n->backward_fn = std::move(bw);
  }
  return n;
}

void CheckSameShape(const Var &a, const Var &b, const char *op) {
  if (a->value.shape != b->value.shape)
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

}  // namespace

void Backward(const Var &root) {
  if (root->value.NumElements() != 1)
    throw std::invalid_argument("Backward: root must be scalar");
  // Post-order DFS, then walk in reverse so each node is complete before
  // it pushes gradient to its parents.
  std::vector<Node *> order;
  std::unordered_set<Node *> seen;
  std::vector<std::pair<Node *, size_t>> stack;
  stack.emplace_back(root.get(), 0);
  seen.insert(root.get());
  while (!stack.empty()) {
    auto &[node, idx] = stack.back();
    if (idx < node->parents.size()) {
      Node *p = node->parents[idx++].get();
      if (p->requires_grad && !seen.count(p)) {
        seen.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  root->EnsureGrad();
  root->grad.data[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node *n = *it;
    if (n->backward_fn) {
      for (auto &p : n->parents)
        if (p->requires_grad) p->EnsureGrad();
      n->backward_fn(*n);
    }
  }
}

Var Add(const Var &a, const Var &b) {
  CheckSameShape(a, b, "Add");
  Tensor out = a->value;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += b->value.data[i];
  return MakeOp(std::move(out), {a, b}, [a, b](Node &n) {
    if (a->requires_grad)
      for (size_t i = 0; i < n.grad.data.size(); ++i) a->grad.data[i] += n.grad.data[i];
    if (b->requires_grad)
      for (size_t i = 0; i < n.grad.data.size(); ++i) b->grad.data[i] += n.grad.data[i];
  });
}

Var Sub(const Var &a, const Var &b) {
  CheckSameShape(a, b, "Sub");
  Tensor out = a->value;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] -= b->value.data[i];
  return MakeOp(std::move(out), {a, b}, [a, b](Node &n) {
    if (a->requires_grad)
      for (size_t i = 0; i < n.grad.data.size(); ++i) a->grad.data[i] += n.grad.data[i];
    if (b->requires_grad)
      for (size_t i = 0; i < n.grad.data.size(); ++i) b->grad.data[i] -= n.grad.data[i];
  });
}

Var Mul(const Var &a, const Var &b) {
  CheckSameShape(a, b, "Mul");
  Tensor out = a->value;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b->value.data[i];
  return MakeOp(std::move(out), {a, b}, [a, b](Node &n) {
    if (a->requires_grad)
      for (size_t i = 0; i < n.grad.data.size(); ++i)
        a->grad.data[i] += n.grad.data[i] * b->value.data[i];
    if (b->requires_grad)
      for (size_t i = 0; i < n.grad.data.size(); ++i)
        b->grad.data[i] += n.grad.data[i] * a->value.data[i];
  });
}

Var Scale(const Var &a, double c) {
  Tensor out = a->value;
  for (double &x : out.data) x *= c;
  return MakeOp(std::move(out), {a}, [a, c](Node &n) {
    for (size_t i = 0; i < n.grad.data.size(); ++i) a->grad.data[i] += n.grad.data[i] * c;
  });
}

Var AddRowVec(const Var &x, const Var &v) {
  int64_t T = x->value.Rows(), D = x->value.Cols();
  if (v->value.NumElements() != D)
    throw std::invalid_argument("AddRowVec: vector length mismatch");
  Tensor out = x->value;
  for (int64_t t = 0; t < T; ++t)
    for (int64_t d = 0; d < D; ++d) out.data[t * D + d] += v->value.data[d];
  return MakeOp(std::move(out), {x, v}, [x, v, T, D](Node &n) {
    if (x->requires_grad)
      for (size_t i = 0; i < n.grad.data.size(); ++i) x->grad.data[i] += n.grad.data[i];
    if (v->requires_grad)
      for (int64_t t = 0; t < T; ++t)
        for (int64_t d = 0; d < D; ++d) v->grad.data[d] += n.grad.data[t * D + d];
  });
}

Var MulRowVec(const Var &x, const Var &v) {
  int64_t T = x->value.Rows(), D = x->value.Cols();
  if (v->value.NumElements() != D)
    throw std::invalid_argument("MulRowVec: vector length mismatch");
  Tensor out = x->value;
  for (int64_t t = 0; t < T; ++t)
    for (int64_t d = 0; d < D; ++d) out.data[t * D + d] *= v->value.data[d];
  return MakeOp(std::move(out), {x, v}, [x, v, T, D](Node &n) {
    if (x->requires_grad)
      for (int64_t t = 0; t < T; ++t)
        for (int64_t d = 0; d < D; ++d)
          x->grad.data[t * D + d] += n.grad.data[t * D + d] * v->value.data[d];
    if (v->requires_grad)
      for (int64_t t = 0; t < T; ++t)
        for (int64_t d = 0; d < D; ++d)
          v->grad.data[d] += n.grad.data[t * D + d] * x->value.data[t * D + d];
  });
}

Var ScaleRows(const Var &x, const std::vector<double> &w) {
  int64_t T = x->value.Rows(), D = x->value.Cols();
  if (static_cast<int64_t>(w.size()) != T)
    throw std::invalid_argument("ScaleRows: weight length mismatch");
  Tensor out = x->value;
  for (int64_t t = 0; t < T; ++t)
    for (int64_t d = 0; d < D; ++d) out.data[t * D + d] *= w[t];
  return MakeOp(std::move(out), {x}, [x, w, T, D](Node &n) {
    for (int64_t t = 0; t < T; ++t)
      for (int64_t d = 0; d < D; ++d) x->grad.data[t * D + d] += n.grad.data[t * D + d] * w[t];
  });
}

Var MatMul(const Var &a, const Var &b) {
  int64_t m = a->value.Rows(), k = a->value.Cols();
  if (b->value.Rows() != k) throw std::invalid_argument("MatMul: inner dim mismatch");
  int64_t nc = b->value.Cols();
  Tensor out({m, nc});
  const double *ad = a->value.data.data();
  const double *bd = b->value.data.data();
  for (int64_t i = 0; i < m; ++i)
    for (int64_t p = 0; p < k; ++p) {
      double av = ad[i * k + p];
      if (av == 0.0) continue;
      double *od = &out.data[i * nc];
      const double *bro = &bd[p * nc];
      for (int64_t j = 0; j < nc; ++j) od[j] += av * bro[j];
    }
  return MakeOp(std::move(out), {a, b}, [a, b, m, k, nc](Node &n) {
    const double *g = n.grad.data.data();
    if (a->requires_grad) {
      // dA = G B^T
      const double *bd = b->value.data.data();
      for (int64_t i = 0; i < m; ++i)
        for (int64_t p = 0; p < k; ++p) {
          double s = 0.0;
          const double *gro = &g[i * nc];
          const double *bro = &bd[p * nc];
          for (int64_t j = 0; j < nc; ++j) s += gro[j] * bro[j];
          a->grad.data[i * k + p] += s;
        }
    }
    if (b->requires_grad) {
      // dB = A^T G
      const double *ad = a->value.data.data();
      for (int64_t i = 0; i < m; ++i)
        for (int64_t p = 0; p < k; ++p) {
          double av = ad[i * k + p];
          if (av == 0.0) continue;
          double *bg = &b->grad.data[p * nc];
          const double *gro = &g[i * nc];
          for (int64_t j = 0; j < nc; ++j) bg[j] += av * gro[j];
        }
    }
  });
}

Var MatMulNT(const Var &a, const Var &b) {
  int64_t m = a->value.Rows(), k = a->value.Cols();
  if (b->value.Cols() != k) throw std::invalid_argument("MatMulNT: inner dim mismatch");
  int64_t nr = b->value.Rows();
  Tensor out({m, nr});
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < nr; ++j) {
      double s = 0.0;
      const double *ar = &a->value.data[i * k];
      const double *br = &b->value.data[j * k];
      for (int64_t p = 0; p < k; ++p) s += ar[p] * br[p];
      out.data[i * nr + j] = s;
    }
  return MakeOp(std::move(out), {a, b}, [a, b, m, k, nr](Node &n) {
    const double *g = n.grad.data.data();
    if (a->requires_grad) {
      for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < nr; ++j) {
          double gv = g[i * nr + j];
          if (gv == 0.0) continue;
          double *ag = &a->grad.data[i * k];
          const double *br = &b->value.data[j * k];
          for (int64_t p = 0; p < k; ++p) ag[p] += gv * br[p];
        }
    }
    if (b->requires_grad) {
      for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < nr; ++j) {
          double gv = g[i * nr + j];
          if (gv == 0.0) continue;
          double *bg = &b->grad.data[j * k];
          const double *ar = &a->value.data[i * k];
          for (int64_t p = 0; p < k; ++p) bg[p] += gv * ar[p];
        }
    }
  });
}

Var SoftmaxRows(const Var &x) {
  int64_t T = x->value.Rows(), D = x->value.Cols();
  Tensor out = x->value;
  for (int64_t t = 0; t < T; ++t) {
    double *row = &out.data[t * D];
    double mx = row[0];
    for (int64_t d = 1; d < D; ++d) mx = std::max(mx, row[d]);
    double sum = 0.0;
    for (int64_t d = 0; d < D; ++d) {
      row[d] = std::exp(row[d] - mx);
      sum += row[d];
    }
    for (int64_t d = 0; d < D; ++d) row[d] /= sum;
  }
  return MakeOp(std::move(out), {x}, [x, T, D](Node &n) {
    for (int64_t t = 0; t < T; ++t) {
      const double *y = &n.value.data[t * D];
      const double *g = &n.grad.data[t * D];
      double dot = 0.0;
      for (int64_t d = 0; d < D; ++d) dot += y[d] * g[d];
      for (int64_t d = 0; d < D; ++d) x->grad.data[t * D + d] += y[d] * (g[d] - dot);
    }
  });
}

Var LayerNormRows(const Var &x, double eps) {
  int64_t T = x->value.Rows(), D = x->value.Cols();
  Tensor out({T, D});
  std::vector<double> inv_std(static_cast<size_t>(T));
  for (int64_t t = 0; t < T; ++t) {
    const double *row = &x->value.data[t * D];
    double mu = 0.0;
    for (int64_t d = 0; d < D; ++d) mu += row[d];
    mu /= static_cast<double>(D);
    double var = 0.0;
    for (int64_t d = 0; d < D; ++d) var += (row[d] - mu) * (row[d] - mu);
    var /= static_cast<double>(D);
    double is = 1.0 / std::sqrt(var + eps);
    inv_std[static_cast<size_t>(t)] = is;
    for (int64_t d = 0; d < D; ++d) out.data[t * D + d] = (row[d] - mu) * is;
  }
  return MakeOp(std::move(out), {x}, [x, inv_std, T, D](Node &n) {
    for (int64_t t = 0; t < T; ++t) {
      const double *y = &n.value.data[t * D];
      const double *g = &n.grad.data[t * D];
      double gsum = 0.0, gysum = 0.0;
      for (int64_t d = 0; d < D; ++d) {
        gsum += g[d];
        gysum += g[d] * y[d];
      }
      double is = inv_std[static_cast<size_t>(t)];
      double invD = 1.0 / static_cast<double>(D);
      for (int64_t d = 0; d < D; ++d)
        x->grad.data[t * D + d] += is * (g[d] - gsum * invD - y[d] * gysum * invD);
    }
  });
}

namespace {
inline double GeluFwd(double v) { return 0.5 * v * (1.0 + std::erf(v / std::sqrt(2.0))); }
inline double GeluBwd(double v) {
  double cdf = 0.5 * (1.0 + std::erf(v / std::sqrt(2.0)));
  double pdf = std::exp(-0.5 * v * v) / std::sqrt(2.0 * M_PI);
  return cdf + v * pdf;
}
}  // namespace

Var Gelu(const Var &x) {
  Tensor out = x->value;
  for (double &v : out.data) v = GeluFwd(v);
  return MakeOp(std::move(out), {x}, [x](Node &n) {
    for (size_t i = 0; i < n.grad.data.size(); ++i)
      x->grad.data[i] += n.grad.data[i] * GeluBwd(x->value.data[i]);
  });
}

Var ConcatCols(const std::vector<Var> &parts) {
  if (parts.empty()) throw std::invalid_argument("ConcatCols: empty input");
  int64_t T = parts[0]->value.Rows();
  int64_t D = 0;
  for (const auto &p : parts) {
    if (p->value.Rows() != T) throw std::invalid_argument("ConcatCols: row mismatch");
    D += p->value.Cols();
  }
  Tensor out({T, D});
  int64_t off = 0;
  for (const auto &p : parts) {
    int64_t pc = p->value.Cols();
    for (int64_t t = 0; t < T; ++t)
      for (int64_t d = 0; d < pc; ++d) out.data[t * D + off + d] = p->value.At(t, d);
    off += pc;
  }
  return MakeOp(std::move(out), parts, [parts, T, D](Node &n) {
    int64_t off = 0;
    for (const auto &p : parts) {
      int64_t pc = p->value.Cols();
      if (p->requires_grad)
        for (int64_t t = 0; t < T; ++t)
          for (int64_t d = 0; d < pc; ++d)
            p->grad.data[t * pc + d] += n.grad.data[t * D + off + d];
      off += pc;
    }
  });
}

Var SliceCols(const Var &x, int64_t start, int64_t len) {
  int64_t T = x->value.Rows(), D = x->value.Cols();
  if (start < 0 || len < 1 || start + len > D)
    throw std::invalid_argument("SliceCols: range out of bounds");
  Tensor out({T, len});
  for (int64_t t = 0; t < T; ++t)
    for (int64_t d = 0; d < len; ++d) out.data[t * len + d] = x->value.At(t, start + d);
  return MakeOp(std::move(out), {x}, [x, start, len, T, D](Node &n) {
    for (int64_t t = 0; t < T; ++t)
      for (int64_t d = 0; d < len; ++d)
        x->grad.data[t * D + start + d] += n.grad.data[t * len + d];
  });
}

Var SliceRows(const Var &x, int64_t start, int64_t len) {
  int64_t T = x->value.Rows(), D = x->value.Cols();
  if (start < 0 || len < 1 || start + len > T)
    throw std::invalid_argument("SliceRows: range out of bounds");
  Tensor out({len, D});
  std::copy(x->value.data.begin() + start * D, x->value.data.begin() + (start + len) * D,
            out.data.begin());
  return MakeOp(std::move(out), {x}, [x, start, len, D](Node &n) {
    for (int64_t i = 0; i < len * D; ++i) x->grad.data[start * D + i] += n.grad.data[i];
  });
}

Var MeanAll(const Var &x) {
  int64_t n = x->value.NumElements();
  double s = 0.0;
  for (double v : x->value.data) s += v;
  Tensor out({1});
  out.data[0] = s / static_cast<double>(n);
  return MakeOp(std::move(out), {x}, [x, n](Node &nd) {
    double g = nd.grad.data[0] / static_cast<double>(n);
    for (double &gv : x->grad.data) gv += g;
  });
}

Var SumAll(const Var &x) {
  double s = 0.0;
  for (double v : x->value.data) s += v;
  Tensor out({1});
  out.data[0] = s;
  return MakeOp(std::move(out), {x}, [x](Node &nd) {
    double g = nd.grad.data[0];
    for (double &gv : x->grad.data) gv += g;
  });
}

Var CrossEntropyMean(const Var &logits, const std::vector<int> &targets, int ignore_index) {
  int64_t T = logits->value.Rows(), V = logits->value.Cols();
  if (static_cast<int64_t>(targets.size()) != T)
    throw std::invalid_argument("CrossEntropyMean: target length mismatch");
  int64_t count = 0;
  double total = 0.0;
  for (int64_t t = 0; t < T; ++t) {
    int tgt = targets[static_cast<size_t>(t)];
    if (tgt == ignore_index) continue;
    if (tgt < 0 || tgt >= V) throw std::invalid_argument("CrossEntropyMean: target out of range");
    const double *row = &logits->value.data[t * V];
    double mx = row[0];
    for (int64_t v = 1; v < V; ++v) mx = std::max(mx, row[v]);
    double lse = 0.0;
    for (int64_t v = 0; v < V; ++v) lse += std::exp(row[v] - mx);
    lse = std::log(lse) + mx;
    total += lse - row[tgt];
    ++count;
  }
  if (count == 0) throw std::domain_error("CrossEntropyMean: all frames ignored");
  Tensor out({1});
  out.data[0] = total / static_cast<double>(count);
  return MakeOp(std::move(out), {logits}, [logits, targets, ignore_index, T, V, count](Node &n) {
    double g = n.grad.data[0] / static_cast<double>(count);
    for (int64_t t = 0; t < T; ++t) {
      int tgt = targets[static_cast<size_t>(t)];
      if (tgt == ignore_index) continue;
      const double *row = &logits->value.data[t * V];
      double mx = row[0];
      for (int64_t v = 1; v < V; ++v) mx = std::max(mx, row[v]);
      double sum = 0.0;
      for (int64_t v = 0; v < V; ++v) sum += std::exp(row[v] - mx);
      for (int64_t v = 0; v < V; ++v) {
        double p = std::exp(row[v] - mx) / sum;
        logits->grad.data[t * V + v] += g * (p - (v == tgt ? 1.0 : 0.0));
      }
    }
  });
}

Var Conv1d(const Var &x, const Var &w, const Var &b, int kernel, int stride, int pad) {
  int64_t T = x->value.Rows(), Fin = x->value.Cols();
  if (T < 1) throw std::invalid_argument("Conv1d: empty input");
  if (w->value.Rows() != static_cast<int64_t>(kernel) * Fin)
    throw std::invalid_argument("Conv1d: weight shape mismatch");
  int64_t Fout = w->value.Cols();
  if (b->value.NumElements() != Fout) throw std::invalid_argument("Conv1d: bias shape mismatch");
  int64_t Tout = (T + 2 * pad - kernel) / stride + 1;
  if (Tout < 1) throw std::invalid_argument("Conv1d: input shorter than kernel");
  Tensor out({Tout, Fout});
  for (int64_t to = 0; to < Tout; ++to) {
    double *orow = &out.data[to * Fout];
    for (int64_t o = 0; o < Fout; ++o) orow[o] = b->value.data[o];
    for (int k = 0; k < kernel; ++k) {
      int64_t ti = to * stride + k - pad;
      if (ti < 0 || ti >= T) continue;
      const double *xrow = &x->value.data[ti * Fin];
      const double *wrow = &w->value.data[static_cast<int64_t>(k) * Fin * Fout];
      for (int64_t f = 0; f < Fin; ++f) {
        double xv = xrow[f];
        if (xv == 0.0) continue;
        const double *wr = &wrow[f * Fout];
        for (int64_t o = 0; o < Fout; ++o) orow[o] += xv * wr[o];
      }
    }
  }
  return MakeOp(std::move(out), {x, w, b},
                [x, w, b, kernel, stride, pad, T, Fin, Fout, Tout](Node &n) {
    for (int64_t to = 0; to < Tout; ++to) {
      const double *grow = &n.grad.data[to * Fout];
      if (b->requires_grad)
        for (int64_t o = 0; o < Fout; ++o) b->grad.data[o] += grow[o];
      for (int k = 0; k < kernel; ++k) {
        int64_t ti = to * stride + k - pad;
        if (ti < 0 || ti >= T) continue;
        for (int64_t f = 0; f < Fin; ++f) {
          const double *wr = &w->value.data[(static_cast<int64_t>(k) * Fin + f) * Fout];
          double xv = x->value.data[ti * Fin + f];
          if (x->requires_grad) {
            double s = 0.0;
            for (int64_t o = 0; o < Fout; ++o) s += grow[o] * wr[o];
            x->grad.data[ti * Fin + f] += s;
          }
          if (w->requires_grad && xv != 0.0) {
            double *wg = &w->grad.data[(static_cast<int64_t>(k) * Fin + f) * Fout];
            for (int64_t o = 0; o < Fout; ++o) wg[o] += xv * grow[o];
          }
        }
      }
    }
  });
}

GradCheckResult FiniteDiffCheck(const std::function<Var()> &build_loss,
                                const std::vector<std::pair<std::string, Var>> &params,
                                double eps, int max_coords_per_param, uint64_t coord_seed) {
  for (const auto &[name, p] : params) p->ZeroGrad();
  Var loss = build_loss();
  Backward(loss);
  if (!std::isfinite(loss->value.data[0]))
    throw std::domain_error("FiniteDiffCheck: non-finite loss");

  std::mt19937_64 rng(coord_seed);
  GradCheckResult res;
  for (const auto &[name, p] : params) {
    int64_t n = p->value.NumElements();
    std::vector<int64_t> coords;
    if (max_coords_per_param > 0 && n > max_coords_per_param) {
      std::uniform_int_distribution<int64_t> dist(0, n - 1);
      for (int i = 0; i < max_coords_per_param; ++i) coords.push_back(dist(rng));
    } else {
      coords.resize(static_cast<size_t>(n));
      for (int64_t i = 0; i < n; ++i) coords[static_cast<size_t>(i)] = i;
    }
    for (int64_t c : coords) {
      double orig = p->value.data[static_cast<size_t>(c)];
      p->value.data[static_cast<size_t>(c)] = orig + eps;
      double fp = build_loss()->value.data[0];
      p->value.data[static_cast<size_t>(c)] = orig - eps;
      double fm = build_loss()->value.data[0];
      p->value.data[static_cast<size_t>(c)] = orig;
      if (!std::isfinite(fp) || !std::isfinite(fm))
        throw std::domain_error("FiniteDiffCheck: non-finite perturbed loss");
      double numeric = (fp - fm) / (2.0 * eps);
      double analytic = p->grad.data[static_cast<size_t>(c)];
      double rel = std::abs(analytic - numeric) /
                   std::max(1e-8, std::abs(analytic) + std::abs(numeric));
      if (rel > res.max_rel_err) {
        res.max_rel_err = rel;
        res.worst_param = name;
        res.worst_coord = c;
      }
    }
  }
  return res;
}

}  // namespace tsasr
