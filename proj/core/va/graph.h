// va/graph.h

// Copyright 2026  The va-pipeline Authors

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

#pragma once

#include <functional>
#include <vector>

#include "va/types.h"

namespace va::ad {

using va::Mat;

// Reverse-mode tape over dense matrices. One tape per forward pass; node
// creation order is the topological order, so backward() is a single
// reverse sweep. Gradients only propagate through nodes flagged needs_grad,
// which makes the same builders usable for inference (wrap the parameters
// as no-grad leaves and never call backward).
class Tape {
 public:
  struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
  };

  Var leaf(Mat value, bool needs_grad);

  const Mat& value(Var v) const { return nodes_[check(v)].value; }
  bool needs_grad(Var v) const { return nodes_[check(v)].needs_grad; }
  // Zero until backward() has run (or the node never received gradient).
  Mat grad(Var v) const;

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var scale(Var a, double s);
  Var mul(Var a, Var b);                 // element-wise
  Var matmul(Var a, Var b);              // A·B
  Var matmul_nt(Var a, Var b);           // A·Bᵀ
  Var linear(Var x, Var w, Var b);       // X·Wᵀ + 1·b   (w: out×in, b: 1×out)
  Var concat_cols(Var a, Var b);
  Var slice_cols(Var a, int offset, int count);
  Var slice_rows(Var a, int offset, int count);
  Var vstack(const std::vector<Var>& parts);
  Var select_rows(Var a, std::vector<int> rows);  // gather
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var relu(Var a);
  // keep holds 0 or 1/(1-rate) per entry; drawn by the caller.
  Var dropout(Var a, Mat keep);
  Var add_const(Var a, const Mat& c);
  // Row-wise softmax over the columns where key_mask is true; masked columns
  // get probability exactly zero. key_mask=nullptr means no masking.
  Var softmax_rows(Var a, const std::vector<bool>* key_mask);
  Var layer_norm_rows(Var x, Var gamma, Var beta, double eps = 1e-5);
  // Σ over channels of 1 − CCC(pred_c, target_c); value is 1×1. Gradients
  // use the closed-form expression from objectives.
  Var ccc_loss(Var pred, Mat target);

  // Seeds d(root) = 1 and sweeps the tape in reverse creation order.
  void backward(Var root);

  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Mat value;
    Mat grad;  // empty until first accumulation
    bool needs_grad = false;
    std::function<void(Tape&)> back;  // empty for leaves
  };

  int check(Var v) const;
  Var emplace(Mat value, bool needs_grad, std::function<void(Tape&)> back);
  Mat& grad_buffer(int id);
  void accumulate(int id, const Mat& g);

  std::vector<Node> nodes_;
};

using Var = Tape::Var;

}  // namespace va::ad
