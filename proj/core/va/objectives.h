// va/objectives.h

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

#include <span>
#include <string>
#include <vector>

#include "va/types.h"

namespace va {

// Thrown when a batch has fewer than two scorable frames; the trainer skips
// such batches instead of aborting.
class DegenerateBatch : public Error {
 public:
  using Error::Error;
};

// Denominator stabilizer for the concordance statistics.
inline constexpr double kCccEpsilon = 1e-8;

// Lin's concordance correlation coefficient with population (divide-by-N)
// statistics:  2·cov(x,y) / (var x + var y + (mean x − mean y)² + ε).
// Requires equal lengths >= 2; the result lies in [-1, 1].
double ccc(std::span<const double> x, std::span<const double> y);

// Sum over channels (columns) of 1 − CCC(pred_c, target_c), computed over
// the rows where frame_mask is true. Range [0, 2·channels].
double ccc_loss(const Mat& pred, const Mat& target,
                const std::vector<bool>& frame_mask);

// Analytic d(loss)/d(pred); rows excluded by frame_mask get exactly zero.
Mat ccc_loss_gradient(const Mat& pred, const Mat& target,
                      const std::vector<bool>& frame_mask);

// Unmasked variants over already-pooled rows (the masked versions and the
// training graph both reduce to these).
double ccc_loss_pooled(const Mat& pred, const Mat& target);
Mat ccc_loss_gradient_pooled(const Mat& pred, const Mat& target);

struct EvalReport {
  double ccc_valence = 0.0;
  double ccc_arousal = 0.0;
  long frames_scored = 0;
};

// CCC per channel over the concatenation of every label-valid frame of every
// video. Prediction and label sets must contain the same video ids with
// matching lengths.
EvalReport evaluate(const std::vector<PredictionTrack>& preds,
                    const std::vector<LabelTrack>& labels);

// CSV row `ccc_valence,ccc_arousal,frames_scored` (with header).
std::string eval_report_csv(const EvalReport& report);
void write_eval_report(const std::string& path, const EvalReport& report);
EvalReport read_eval_report(const std::string& path);

}  // namespace va
