// va/objectives.cc

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

#include "va/objectives.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "va/csv.h"

namespace va {

namespace {

struct ChannelStats {
  double mean_p = 0.0, mean_y = 0.0;
  double var_p = 0.0, var_y = 0.0;
  double cov = 0.0;
  double denom = 0.0;  // var_p + var_y + (mean_p − mean_y)² + ε
  double concordance = 0.0;
};

ChannelStats channel_stats(const Mat& pred, const Mat& target, int c) {
  const double n = static_cast<double>(pred.rows());
  ChannelStats s;
  s.mean_p = pred.col(c).mean();
  s.mean_y = target.col(c).mean();
  Eigen::ArrayXd dp = pred.col(c).array() - s.mean_p;
  Eigen::ArrayXd dy = target.col(c).array() - s.mean_y;
  s.var_p = dp.square().sum() / n;
  s.var_y = dy.square().sum() / n;
  s.cov = (dp * dy).sum() / n;
  double shift = s.mean_p - s.mean_y;
  s.denom = s.var_p + s.var_y + shift * shift + kCccEpsilon;
  s.concordance = 2.0 * s.cov / s.denom;
  return s;
}

// Rows of pred/target where mask is true, stacked in order.
std::pair<Mat, Mat> pool_masked(const Mat& pred, const Mat& target,
                                const std::vector<bool>& frame_mask) {
  require(pred.rows() == target.rows() && pred.cols() == target.cols(),
          "ccc_loss: prediction ", pred.rows(), "x", pred.cols(),
          " vs target ", target.rows(), "x", target.cols());
  require(static_cast<Eigen::Index>(frame_mask.size()) == pred.rows(),
          "ccc_loss: mask has ", frame_mask.size(), " entries for ",
          pred.rows(), " rows");
  Eigen::Index count =
      static_cast<Eigen::Index>(std::count(frame_mask.begin(), frame_mask.end(), true));
  Mat p(count, pred.cols()), y(count, pred.cols());
  Eigen::Index out = 0;
  for (Eigen::Index r = 0; r < pred.rows(); ++r) {
    if (!frame_mask[static_cast<size_t>(r)]) continue;
    p.row(out) = pred.row(r);
    y.row(out) = target.row(r);
    ++out;
  }
  return {std::move(p), std::move(y)};
}

}  // namespace

double ccc(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "ccc: length mismatch: ", x.size(), " vs ",
          y.size());
  require(x.size() >= 2, "ccc: need at least 2 samples, got ", x.size());
  Mat p(static_cast<Eigen::Index>(x.size()), 1);
  Mat t(static_cast<Eigen::Index>(y.size()), 1);
  for (size_t i = 0; i < x.size(); ++i) {
    p(static_cast<Eigen::Index>(i), 0) = x[i];
    t(static_cast<Eigen::Index>(i), 0) = y[i];
  }
  return channel_stats(p, t, 0).concordance;
}

double ccc_loss_pooled(const Mat& pred, const Mat& target) {
  if (pred.rows() < 2)
    throw DegenerateBatch(
        msg("degenerate batch: ", pred.rows(), " scorable frames (need >= 2)"));
  double loss = 0.0;
  for (int c = 0; c < pred.cols(); ++c)
    loss += 1.0 - channel_stats(pred, target, c).concordance;
  return loss;
}

Mat ccc_loss_gradient_pooled(const Mat& pred, const Mat& target) {
  if (pred.rows() < 2)
    throw DegenerateBatch(
        msg("degenerate batch: ", pred.rows(), " scorable frames (need >= 2)"));
  const double n = static_cast<double>(pred.rows());
  Mat grad = Mat::Zero(pred.rows(), pred.cols());
  for (int c = 0; c < pred.cols(); ++c) {
    ChannelStats s = channel_stats(pred, target, c);
    // CCC = 2·cov / D with D = var_p + var_y + (μp−μy)² + ε.
    // dcov/dp_i = (y_i − μy)/n, dvar_p/dp_i = 2(p_i − μp)/n,
    // d(μp−μy)²/dp_i = 2(μp−μy)/n; loss adds −dCCC.
    double shift = s.mean_p - s.mean_y;
    for (Eigen::Index i = 0; i < pred.rows(); ++i) {
      double dp = pred(i, c) - s.mean_p;
      double dy = target(i, c) - s.mean_y;
      double dccc = 2.0 / n * (dy * s.denom - 2.0 * s.cov * (dp + shift)) /
                    (s.denom * s.denom);
      grad(i, c) = -dccc;
    }
  }
  return grad;
}

double ccc_loss(const Mat& pred, const Mat& target,
                const std::vector<bool>& frame_mask) {
  auto [p, y] = pool_masked(pred, target, frame_mask);
  return ccc_loss_pooled(p, y);
}

Mat ccc_loss_gradient(const Mat& pred, const Mat& target,
                      const std::vector<bool>& frame_mask) {
  auto [p, y] = pool_masked(pred, target, frame_mask);
  Mat pooled_grad = ccc_loss_gradient_pooled(p, y);
  Mat grad = Mat::Zero(pred.rows(), pred.cols());
  Eigen::Index out = 0;
  for (Eigen::Index r = 0; r < pred.rows(); ++r) {
    if (!frame_mask[static_cast<size_t>(r)]) continue;
    grad.row(r) = pooled_grad.row(out++);
  }
  return grad;
}

EvalReport evaluate(const std::vector<PredictionTrack>& preds,
                    const std::vector<LabelTrack>& labels) {
  std::unordered_map<std::string, const LabelTrack*> by_id;
  for (const LabelTrack& l : labels) by_id[l.video_id] = &l;
  require(by_id.size() == labels.size(), "evaluate: duplicate label video ids");

  std::string missing;
  for (const PredictionTrack& p : preds)
    if (!by_id.count(p.video_id)) missing += " " + p.video_id;
  require(missing.empty(), "evaluate: no labels for video(s):", missing);
  std::string extra;
  if (preds.size() != labels.size()) {
    std::unordered_map<std::string, int> pred_ids;
    for (const PredictionTrack& p : preds) pred_ids[p.video_id] = 1;
    for (const LabelTrack& l : labels)
      if (!pred_ids.count(l.video_id)) extra += " " + l.video_id;
  }
  require(extra.empty(), "evaluate: no predictions for video(s):", extra);

  std::vector<double> pv, pa, yv, ya;
  for (const PredictionTrack& p : preds) {
    const LabelTrack& l = *by_id.at(p.video_id);
    require(p.n() == l.n(), "evaluate: video '", p.video_id, "': ", p.n(),
            " predictions vs ", l.n(), " labels");
    for (int j = 0; j < p.n(); ++j) {
      if (!l.label_valid[static_cast<size_t>(j)]) continue;
      pv.push_back(p.valence[static_cast<size_t>(j)]);
      pa.push_back(p.arousal[static_cast<size_t>(j)]);
      yv.push_back(l.valence[static_cast<size_t>(j)]);
      ya.push_back(l.arousal[static_cast<size_t>(j)]);
    }
  }
  require(pv.size() >= 2, "evaluate: fewer than 2 scorable frames (",
          pv.size(), ")");

  EvalReport report;
  report.ccc_valence = ccc(pv, yv);
  report.ccc_arousal = ccc(pa, ya);
  report.frames_scored = static_cast<long>(pv.size());
  return report;
}

std::string eval_report_csv(const EvalReport& report) {
  return msg("ccc_valence,ccc_arousal,frames_scored\n",
             csv::format_double(report.ccc_valence), ",",
             csv::format_double(report.ccc_arousal), ",",
             report.frames_scored, "\n");
}

void write_eval_report(const std::string& path, const EvalReport& report) {
  csv::Writer out(path);
  out.header({"ccc_valence", "ccc_arousal", "frames_scored"});
  out.row({csv::format_double(report.ccc_valence),
           csv::format_double(report.ccc_arousal),
           msg(report.frames_scored)});
  out.close();
}

EvalReport read_eval_report(const std::string& path) {
  csv::NumericTable t = csv::read_numeric(path);
  require(t.header.size() == 3 && t.header[0] == "ccc_valence" &&
              t.header[1] == "ccc_arousal" && t.header[2] == "frames_scored",
          path, ": expected header ccc_valence,ccc_arousal,frames_scored");
  require(t.values.rows() == 1, path, ": expected exactly one row");
  EvalReport r;
  r.ccc_valence = t.values(0, 0);
  r.ccc_arousal = t.values(0, 1);
  r.frames_scored = static_cast<long>(t.values(0, 2));
  return r;
}

}  // namespace va
