// va/graph.cc

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

#include "va/graph.h"

#include <cmath>
#include <utility>

#include "va/objectives.h"

namespace va::ad {

int Tape::check(Var v) const {
  require(v.id >= 0 && v.id < static_cast<int>(nodes_.size()),
          "tape: invalid node id ", v.id);
  return v.id;
}

Tape::Var Tape::emplace(Mat value, bool needs_grad,
                        std::function<void(Tape&)> back) {
  Node node;
  node.value = std::move(value);
  node.needs_grad = needs_grad;
  if (needs_grad) node.back = std::move(back);
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tape::Var Tape::leaf(Mat value, bool needs_grad) {
  return emplace(std::move(value), needs_grad, {});
}

Mat Tape::grad(Var v) const {
  const Node& node = nodes_[static_cast<size_t>(check(v))];
  if (node.grad.size() == 0)
    return Mat::Zero(node.value.rows(), node.value.cols());
  return node.grad;
}

Mat& Tape::grad_buffer(int id) {
  Node& node = nodes_[static_cast<size_t>(id)];
  if (node.grad.size() == 0)
    node.grad = Mat::Zero(node.value.rows(), node.value.cols());
  return node.grad;
}

void Tape::accumulate(int id, const Mat& g) {
  if (!nodes_[static_cast<size_t>(id)].needs_grad) return;
  grad_buffer(id) += g;
}

// Value expressions below are evaluated before emplace(), so references into
// nodes_ cannot dangle across the push_back. Backward closures capture node
// ids only and resolve them at sweep time.

#define VA_VAL(i) nodes_[static_cast<size_t>(i)].value
#define VA_TVAL(i) t.nodes_[static_cast<size_t>(i)].value
#define VA_TGRAD(i) t.nodes_[static_cast<size_t>(i)].grad

Tape::Var Tape::add(Var a, Var b) {
  int ia = check(a), ib = check(b);
  require(VA_VAL(ia).rows() == VA_VAL(ib).rows() &&
              VA_VAL(ia).cols() == VA_VAL(ib).cols(),
          "add: shape mismatch ", VA_VAL(ia).rows(), "x", VA_VAL(ia).cols(),
          " vs ", VA_VAL(ib).rows(), "x", VA_VAL(ib).cols());
  bool ng = nodes_[static_cast<size_t>(ia)].needs_grad ||
            nodes_[static_cast<size_t>(ib)].needs_grad;
  int self = static_cast<int>(nodes_.size());
  return emplace(VA_VAL(ia) + VA_VAL(ib), ng, [self, ia, ib](Tape& t) {
    t.accumulate(ia, VA_TGRAD(self));
    t.accumulate(ib, VA_TGRAD(self));
  });
}

Tape::Var Tape::sub(Var a, Var b) {
  int ia = check(a), ib = check(b);
  bool ng = nodes_[static_cast<size_t>(ia)].needs_grad ||
            nodes_[static_cast<size_t>(ib)].needs_grad;
  int self = static_cast<int>(nodes_.size());
  return emplace(VA_VAL(ia) - VA_VAL(ib), ng, [self, ia, ib](Tape& t) {
    t.accumulate(ia, VA_TGRAD(self));
    t.accumulate(ib, -VA_TGRAD(self));
  });
}

Tape::Var Tape::scale(Var a, double s) {
  int ia = check(a);
  bool ng = nodes_[static_cast<size_t>(ia)].needs_grad;
  int self = static_cast<int>(nodes_.size());
  return emplace(VA_VAL(ia) * s, ng, [self, ia, s](Tape& t) {
    t.accumulate(ia, VA_TGRAD(self) * s);
  });
}

Tape::Var Tape::mul(Var a, Var b) {
  int ia = check(a), ib = check(b);
  require(VA_VAL(ia).rows() == VA_VAL(ib).rows() &&
              VA_VAL(ia).cols() == VA_VAL(ib).cols(),
          "mul: shape mismatch");
  bool ng = nodes_[static_cast<size_t>(ia)].needs_grad ||
            nodes_[static_cast<size_t>(ib)].needs_grad;
  int self = static_cast<int>(nodes_.size());
  return emplace(VA_VAL(ia).cwiseProduct(VA_VAL(ib)), ng,
                 [self, ia, ib](Tape& t) {
                   t.accumulate(ia, VA_TGRAD(self).cwiseProduct(VA_TVAL(ib)));
                   t.accumulate(ib, VA_TGRAD(self).cwiseProduct(VA_TVAL(ia)));
                 });
}

Tape::Var Tape::matmul(Var a, Var b) {
  int ia = check(a), ib = check(b);
  require(VA_VAL(ia).cols() == VA_VAL(ib).rows(), "matmul: inner dims ",
          VA_VAL(ia).cols(), " vs ", VA_VAL(ib).rows());
  bool ng = nodes_[static_cast<size_t>(ia)].needs_grad ||
            nodes_[static_cast<size_t>(ib)].needs_grad;
  int self = static_cast<int>(nodes_.size());
  return emplace(VA_VAL(ia) * VA_VAL(ib), ng, [self, ia, ib](Tape& t) {
    t.accumulate(ia, VA_TGRAD(self) * VA_TVAL(ib).transpose());
    t.accumulate(ib, VA_TVAL(ia).transpose() * VA_TGRAD(self));
  });
}

Tape::Var Tape::matmul_nt(Var a, Var b) {
  int ia = check(a), ib = check(b);
  require(VA_VAL(ia).cols() == VA_VAL(ib).cols(), "matmul_nt: inner dims ",
          VA_VAL(ia).cols(), " vs ", VA_VAL(ib).cols());
  bool ng = nodes_[static_cast<size_t>(ia)].needs_grad ||
            nodes_[static_cast<size_t>(ib)].needs_grad;
  int self = static_cast<int>(nodes_.size());
  return emplace(VA_VAL(ia) * VA_VAL(ib).transpose(), ng,
                 [self, ia, ib](Tape& t) {
                   t.accumulate(ia, VA_TGRAD(self) * VA_TVAL(ib));
                   t.accumulate(ib, VA_TGRAD(self).transpose() * VA_TVAL(ia));
                 });
}

Tape::Var Tape::linear(Var x, Var w, Var b) {
  int ix = check(x), iw = check(w), ib = check(b);
  require(VA_VAL(ix).cols() == VA_VAL(iw).cols(), "linear: input dim ",
          VA_VAL(ix).cols(), " vs weight in-dim ", VA_VAL(iw).cols());
  require(VA_VAL(ib).rows() == 1 && VA_VAL(ib).cols() == VA_VAL(iw).rows(),
          "linear: bias must be 1x", VA_VAL(iw).rows());
  bool ng = nodes_[static_cast<size_t>(ix)].needs_grad ||
            nodes_[static_cast<size_t>(iw)].needs_grad ||
            nodes_[static_cast<size_t>(ib)].needs_grad;
  Mat value = VA_VAL(ix) * VA_VAL(iw).transpose();
  value.rowwise() += VA_VAL(ib).row(0);
  int self = static_cast<int>(nodes_.size());
  return emplace(std::move(value), ng, [self, ix, iw, ib](Tape& t) {
    const Mat& g = VA_TGRAD(self);
    t.accumulate(ix, g * VA_TVAL(iw));
    t.accumulate(iw, g.transpose() * VA_TVAL(ix));
    t.accumulate(ib, g.colwise().sum());
  });
}

Tape::Var Tape::concat_cols(Var a, Var b) {
  int ia = check(a), ib = check(b);
  require(VA_VAL(ia).rows() == VA_VAL(ib).rows(), "concat_cols: row counts ",
          VA_VAL(ia).rows(), " vs ", VA_VAL(ib).rows());
  bool ng = nodes_[static_cast<size_t>(ia)].needs_grad ||
            nodes_[static_cast<size_t>(ib)].needs_grad;
  Mat value(VA_VAL(ia).rows(), VA_VAL(ia).cols() + VA_VAL(ib).cols());
  value.leftCols(VA_VAL(ia).cols()) = VA_VAL(ia);
  value.rightCols(VA_VAL(ib).cols()) = VA_VAL(ib);
  int self = static_cast<int>(nodes_.size());
  return emplace(std::move(value), ng, [self, ia, ib](Tape& t) {
    const Mat& g = VA_TGRAD(self);
    Eigen::Index ca = VA_TVAL(ia).cols();
    t.accumulate(ia, g.leftCols(ca));
    t.accumulate(ib, g.rightCols(g.cols() - ca));
  });
}

Tape::Var Tape::slice_cols(Var a, int offset, int count) {
  int ia = check(a);
  require(offset >= 0 && count >= 1 &&
              offset + count <= VA_VAL(ia).cols(),
          "slice_cols: [", offset, ", ", offset + count, ") out of ",
          VA_VAL(ia).cols());
  bool ng = nodes_[static_cast<size_t>(ia)].needs_grad;
  int self = static_cast<int>(nodes_.size());
  return emplace(VA_VAL(ia).middleCols(offset, count), ng,
                 [self, ia, offset, count](Tape& t) {
                   if (!t.nodes_[static_cast<size_t>(ia)].needs_grad) return;
                   t.grad_buffer(ia).middleCols(offset, count) += VA_TGRAD(self);
                 });
}

Tape::Var Tape::slice_rows(Var a, int offset, int count) {
  int ia = check(a);
  require(offset >= 0 && count >= 1 &&
              offset + count <= VA_VAL(ia).rows(),
          "slice_rows: [", offset, ", ", offset + count, ") out of ",
          VA_VAL(ia).rows());
  bool ng = nodes_[static_cast<size_t>(ia)].needs_grad;
  int self = static_cast<int>(nodes_.size());
  return emplace(VA_VAL(ia).middleRows(offset, count), ng,
                 [self, ia, offset, count](Tape& t) {
                   if (!t.nodes_[static_cast<size_t>(ia)].needs_grad) return;
                   t.grad_buffer(ia).middleRows(offset, count) += VA_TGRAD(self);
                 });
}

Tape::Var Tape::vstack(const std::vector<Var>& parts) {
  require(!parts.empty(), "vstack: empty part list");
  std::vector<int> ids;
  ids.reserve(parts.size());
  Eigen::Index rows = 0;
  bool ng = false;
  for (Var p : parts) {
    int ip = check(p);
    ids.push_back(ip);
    rows += VA_VAL(ip).rows();
    ng = ng || nodes_[static_cast<size_t>(ip)].needs_grad;
    require(VA_VAL(ip).cols() == VA_VAL(ids[0]).cols(),
            "vstack: column mismatch");
  }
  Mat value(rows, VA_VAL(ids[0]).cols());
  Eigen::Index at = 0;
  for (int ip : ids) {
    value.middleRows(at, VA_VAL(ip).rows()) = VA_VAL(ip);
    at += VA_VAL(ip).rows();
  }
  int self = static_cast<int>(nodes_.size());
  return emplace(std::move(value), ng, [self, ids](Tape& t) {
    const Mat& g = VA_TGRAD(self);
    Eigen::Index at = 0;
    for (int ip : ids) {
      Eigen::Index r = VA_TVAL(ip).rows();
      t.accumulate(ip, g.middleRows(at, r));
      at += r;
    }
  });
}

Tape::Var Tape::select_rows(Var a, std::vector<int> rows) {
  int ia = check(a);
  require(!rows.empty(), "select_rows: empty selection");
  for (int r : rows)
    require(r >= 0 && r < VA_VAL(ia).rows(), "select_rows: row ", r,
            " out of ", VA_VAL(ia).rows());
  bool ng = nodes_[static_cast<size_t>(ia)].needs_grad;
  Mat value(static_cast<Eigen::Index>(rows.size()), VA_VAL(ia).cols());
  for (size_t i = 0; i < rows.size(); ++i)
    value.row(static_cast<Eigen::Index>(i)) = VA_VAL(ia).row(rows[i]);
  int self = static_cast<int>(nodes_.size());
  return emplace(std::move(value), ng,
                 [self, ia, rows = std::move(rows)](Tape& t) {
                   if (!t.nodes_[static_cast<size_t>(ia)].needs_grad) return;
                   Mat& ga = t.grad_buffer(ia);
                   const Mat& g = VA_TGRAD(self);
                   for (size_t i = 0; i < rows.size(); ++i)
                     ga.row(rows[i]) += g.row(static_cast<Eigen::Index>(i));
                 });
}

Tape::Var Tape::sigmoid(Var a) {
  int ia = check(a);
  bool ng = nodes_[static_cast<size_t>(ia)].needs_grad;
  Mat value = (1.0 / (1.0 + (-VA_VAL(ia).array()).exp())).matrix();
  int self = static_cast<int>(nodes_.size());
  return emplace(std::move(value), ng, [self, ia](Tape& t) {
    const Mat& s = VA_TVAL(self);
    t.accumulate(ia, VA_TGRAD(self).cwiseProduct(
                         (s.array() * (1.0 - s.array())).matrix()));
  });
}

Tape::Var Tape::tanh(Var a) {
  int ia = check(a);
  bool ng = nodes_[static_cast<size_t>(ia)].needs_grad;
  Mat value = VA_VAL(ia).array().tanh().matrix();
  int self = static_cast<int>(nodes_.size());
  return emplace(std::move(value), ng, [self, ia](Tape& t) {
    const Mat& y = VA_TVAL(self);
    t.accumulate(ia, VA_TGRAD(self).cwiseProduct(
                         (1.0 - y.array().square()).matrix()));
  });
}

Tape::Var Tape::relu(Var a) {
  int ia = check(a);
  bool ng = nodes_[static_cast<size_t>(ia)].needs_grad;
  Mat value = VA_VAL(ia).cwiseMax(0.0);
  int self = static_cast<int>(nodes_.size());
  return emplace(std::move(value), ng, [self, ia](Tape& t) {
    Mat gate = (VA_TVAL(ia).array() > 0.0).cast<double>();
    t.accumulate(ia, VA_TGRAD(self).cwiseProduct(gate));
  });
}

Tape::Var Tape::dropout(Var a, Mat keep) {
  int ia = check(a);
  require(keep.rows() == VA_VAL(ia).rows() && keep.cols() == VA_VAL(ia).cols(),
          "dropout: mask shape mismatch");
  bool ng = nodes_[static_cast<size_t>(ia)].needs_grad;
  Mat value = VA_VAL(ia).cwiseProduct(keep);
  int self = static_cast<int>(nodes_.size());
  return emplace(std::move(value), ng,
                 [self, ia, keep = std::move(keep)](Tape& t) {
                   t.accumulate(ia, VA_TGRAD(self).cwiseProduct(keep));
                 });
}

Tape::Var Tape::add_const(Var a, const Mat& c) {
  int ia = check(a);
  require(c.rows() == VA_VAL(ia).rows() && c.cols() == VA_VAL(ia).cols(),
          "add_const: shape mismatch");
  bool ng = nodes_[static_cast<size_t>(ia)].needs_grad;
  int self = static_cast<int>(nodes_.size());
  return emplace(VA_VAL(ia) + c, ng, [self, ia](Tape& t) {
    t.accumulate(ia, VA_TGRAD(self));
  });
}

Tape::Var Tape::softmax_rows(Var a, const std::vector<bool>* key_mask) {
  int ia = check(a);
  const Mat& x = VA_VAL(ia);
  std::vector<bool> mask;
  if (key_mask) {
    require(static_cast<Eigen::Index>(key_mask->size()) == x.cols(),
            "softmax_rows: mask size ", key_mask->size(), " vs ", x.cols(),
            " columns");
    mask = *key_mask;
    bool any = false;
    for (bool b : mask) any = any || b;
    require(any, "softmax_rows: all columns masked");
  } else {
    mask.assign(static_cast<size_t>(x.cols()), true);
  }

  Mat value(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < x.cols(); ++c)
      if (mask[static_cast<size_t>(c)]) mx = std::max(mx, x(r, c));
    double sum = 0.0;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (mask[static_cast<size_t>(c)]) {
        value(r, c) = std::exp(x(r, c) - mx);
        sum += value(r, c);
      } else {
        value(r, c) = 0.0;
      }
    }
    value.row(r) /= sum;
  }

  bool ng = nodes_[static_cast<size_t>(ia)].needs_grad;
  int self = static_cast<int>(nodes_.size());
  return emplace(std::move(value), ng, [self, ia](Tape& t) {
    // dX_rc = P_rc (g_rc − Σ_k g_rk P_rk); masked columns have P=0.
    const Mat& p = VA_TVAL(self);
    const Mat& g = VA_TGRAD(self);
    Eigen::VectorXd dot = (g.array() * p.array()).rowwise().sum();
    Mat dx = p.array() * (g.array().colwise() - dot.array());
    t.accumulate(ia, dx);
  });
}

Tape::Var Tape::layer_norm_rows(Var x, Var gamma, Var beta, double eps) {
  int ix = check(x), ig = check(gamma), ib = check(beta);
  const Mat& v = VA_VAL(ix);
  require(VA_VAL(ig).rows() == 1 && VA_VAL(ig).cols() == v.cols() &&
              VA_VAL(ib).rows() == 1 && VA_VAL(ib).cols() == v.cols(),
          "layer_norm_rows: gamma/beta must be 1x", v.cols());

  const double d = static_cast<double>(v.cols());
  Eigen::VectorXd mean = v.rowwise().mean();
  Mat centered = v.colwise() - mean;
  Eigen::VectorXd inv_std =
      ((centered.array().square().rowwise().sum() / d) + eps)
          .sqrt()
          .inverse();
  Mat norm = centered.array().colwise() * inv_std.array();
  Mat value = (norm.array().rowwise() * VA_VAL(ig).row(0).array()).rowwise() +
              VA_VAL(ib).row(0).array();

  bool ng = nodes_[static_cast<size_t>(ix)].needs_grad ||
            nodes_[static_cast<size_t>(ig)].needs_grad ||
            nodes_[static_cast<size_t>(ib)].needs_grad;
  int self = static_cast<int>(nodes_.size());
  return emplace(std::move(value), ng,
                 [self, ix, ig, ib, norm = std::move(norm),
                  inv_std = std::move(inv_std), d](Tape& t) {
                   const Mat& g = VA_TGRAD(self);
                   t.accumulate(ib, g.colwise().sum());
                   t.accumulate(ig, (g.array() * norm.array())
                                        .colwise()
                                        .sum()
                                        .matrix());
                   if (!t.nodes_[static_cast<size_t>(ix)].needs_grad) return;
                   // dnorm = g ∘ gamma; dx = inv_std (dnorm − mean(dnorm)
                   //        − norm ∘ mean(dnorm ∘ norm)) per row.
                   Mat dnorm =
                       g.array().rowwise() * VA_TVAL(ig).row(0).array();
                   Eigen::VectorXd m1 = dnorm.rowwise().sum() / d;
                   Eigen::VectorXd m2 =
                       (dnorm.array() * norm.array()).rowwise().sum() / d;
                   Mat dx = ((dnorm.array().colwise() - m1.array()) -
                             (norm.array().colwise() * m2.array()))
                                .colwise() *
                            inv_std.array();
                   t.accumulate(ix, dx);
                 });
}

Tape::Var Tape::ccc_loss(Var pred, Mat target) {
  int ip = check(pred);
  require(VA_VAL(ip).rows() == target.rows() &&
              VA_VAL(ip).cols() == target.cols(),
          "ccc_loss: prediction/target shape mismatch");
  double loss = ccc_loss_pooled(VA_VAL(ip), target);
  Mat value(1, 1);
  value(0, 0) = loss;
  bool ng = nodes_[static_cast<size_t>(ip)].needs_grad;
  int self = static_cast<int>(nodes_.size());
  return emplace(std::move(value), ng,
                 [self, ip, target = std::move(target)](Tape& t) {
                   double g = VA_TGRAD(self)(0, 0);
                   t.accumulate(
                       ip, g * ccc_loss_gradient_pooled(VA_TVAL(ip), target));
                 });
}

#undef VA_VAL
#undef VA_TVAL
#undef VA_TGRAD

void Tape::backward(Var root) {
  int ir = check(root);
  require(nodes_[static_cast<size_t>(ir)].needs_grad,
          "backward: root does not require gradients");
  grad_buffer(ir) = Mat::Ones(nodes_[static_cast<size_t>(ir)].value.rows(),
                              nodes_[static_cast<size_t>(ir)].value.cols());
  for (int i = ir; i >= 0; --i) {
    Node& node = nodes_[static_cast<size_t>(i)];
    if (node.grad.size() != 0 && node.back) node.back(*this);
  }
}

}  // namespace va::ad
