// tsasr/autograd.hpp

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

#ifndef TSASR_AUTOGRAD_HPP
#define TSASR_AUTOGRAD_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsasr {

/// Dense row-major float64 tensor. Rank 1 or 2 is all the encoder needs.
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int64_t> s, double fill = 0.0);
  static Tensor FromData(std::vector<int64_t> s, std::vector<double> d);

  int64_t NumElements() const;
  int64_t Rows() const;
  int64_t Cols() const;

  double &At(int64_t r, int64_t c);
  double At(int64_t r, int64_t c) const;
};

class Node;
using Var = std::shared_ptr<Node>;

/// One vertex of a reverse-mode tape. Gradients accumulate (+=) into
/// every requires_grad ancestor so shared parameters used on multiple
/// streams collect contributions from all of them.
class Node {
 public:
  Tensor value;
  Tensor grad;  // allocated on first use, same shape as value
  bool requires_grad = false;
  std::vector<Var> parents;
  std::function<void(Node &)> backward_fn;

  explicit Node(Tensor v, bool rg = false) : value(std::move(v)), requires_grad(rg) {}
  void EnsureGrad();
  void ZeroGrad();
};

Var Constant(Tensor v);
Var Param(Tensor v);

/// Runs reverse-mode accumulation from a scalar root.
void Backward(const Var &root);

// Elementwise / broadcast primitives.
Var Add(const Var &a, const Var &b);
Var Sub(const Var &a, const Var &b);
Var Mul(const Var &a, const Var &b);
Var Scale(const Var &a, double c);
Var AddRowVec(const Var &x, const Var &v);  // x: [T,D], v: [D]
Var MulRowVec(const Var &x, const Var &v);
/// Scales row t of x by the constant weight w[t]; w is not differentiated.
Var ScaleRows(const Var &x, const std::vector<double> &w);

Var MatMul(const Var &a, const Var &b);    // [m,k] x [k,n]
Var MatMulNT(const Var &a, const Var &b);  // [m,k] x [n,k]^T

Var SoftmaxRows(const Var &x);
Var LayerNormRows(const Var &x, double eps = 1e-5);
Var Gelu(const Var &x);

Var ConcatCols(const std::vector<Var> &parts);
Var SliceCols(const Var &x, int64_t start, int64_t len);
Var SliceRows(const Var &x, int64_t start, int64_t len);

Var MeanAll(const Var &x);
Var SumAll(const Var &x);

/// Mean cross-entropy over frames whose target != ignore_index.
/// Throws std::domain_error when every frame is ignored.
Var CrossEntropyMean(const Var &logits, const std::vector<int> &targets,
                     int ignore_index = -1);

/// 1-D convolution over rows of x [T,Fin] with weight [kernel*Fin, Fout]
/// and bias [Fout]; zero padding `pad` on both sides.
Var Conv1d(const Var &x, const Var &w, const Var &b, int kernel, int stride,
           int pad);

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_param;
  int64_t worst_coord = -1;
};

/// Central-difference verification of the tape. build_loss must rebuild the
/// graph from the current parameter values on every call. When
/// max_coords_per_param > 0, a deterministic subsample of coordinates is
/// checked per tensor.
GradCheckResult FiniteDiffCheck(
    const std::function<Var()> &build_loss,
    const std::vector<std::pair<std::string, Var>> &params, double eps = 1e-5,
    int max_coords_per_param = -1, uint64_t coord_seed = 12345);

}  // namespace tsasr

#endif  // TSASR_AUTOGRAD_HPP
