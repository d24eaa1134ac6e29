// va/network.h

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

#include <utility>
#include <vector>

#include "va/graph.h"
#include "va/types.h"

namespace va {

// Fresh parameters for a config and input split. Affine and recurrent
// weights use uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)); layer norms start
// at identity.
ModelParams init_params(const ModelConfig& config, int d_visual, int d_audio,
                        Rng& rng);

// -- evaluation-mode blocks ----------------------------------------------
// These run the same graph builders as training with dropout off and no
// gradient bookkeeping.

// Per row: W_f · concat(visual, audio) + b_f. No nonlinearity.
Mat fuse(const Mat& visual_rows, const Mat& audio_rows,
         const AffineParams& fusion);

// Stacked recurrent encoder. state_in must be zeros for a video's first
// segment; state_out is taken after the last real frame, so feeding
// consecutive segments with carried state reproduces the unsplit run.
std::pair<Mat, EncoderState> encode_lstm(
    const Mat& fused, const std::vector<bool>& real_mask,
    const EncoderState& state_in, const std::vector<LstmLayerParams>& layers);

// Transformer encoder over one segment. Padding positions are excluded from
// attention; a sinusoidal position signal is added before the first layer.
Mat encode_trm(const Mat& fused, const std::vector<bool>& real_mask,
               const std::vector<TrmLayerParams>& layers, int attention_heads);

// Affine stack with ReLU after each hidden layer; final width 2. Outputs
// are not squashed (post-processing clips them).
Mat regress(const Mat& encoded, const std::vector<AffineParams>& head);

Mat sinusoidal_position_encoding(int length, int d_model);

// Full per-video pass: fill invalid frames, segment, fuse, encode, regress,
// stitch. Frames covered by several (trm) segments get the mean of all
// covering segments' predictions; padding rows are discarded. Output length
// is exactly n.
PredictionTrack predict_video(const VideoRecord& record,
                              const ModelConfig& config,
                              const ModelParams& params);

// Concatenated per-modality matrices for one video, with invalid frames
// filled in the visual tracks (audio does not depend on face validity).
struct ModalityInputs {
  Mat visual;  // n × d_visual_total (0 cols when no visual tracks)
  Mat audio;   // n × d_audio_total
};
ModalityInputs assemble_inputs(const VideoRecord& record);

// -- training-facing graph builders --------------------------------------

// Tape leaves mirroring ModelParams. `flat` follows for_each_param order so
// the optimizer can pair gradients with tensors positionally.
struct TapeAffine {
  ad::Var w, b;
};
struct TapeLstmLayer {
  ad::Var w_x, w_h, b;
};
struct TapeTrmLayer {
  TapeAffine q, k, v, o, ff1, ff2;
  ad::Var ln1_gamma, ln1_beta, ln2_gamma, ln2_beta;
};
struct TapeModel {
  TapeAffine fusion;
  std::vector<TapeLstmLayer> lstm;
  std::vector<TapeTrmLayer> trm;
  std::vector<TapeAffine> regression;
  std::vector<ad::Var> flat;
};

TapeModel wrap_params(ad::Tape& tape, const ModelParams& params,
                      bool needs_grad);

// Dropout configuration for one forward pass; rng=nullptr disables dropout
// (evaluation mode).
struct ForwardPolicy {
  double dropout = 0.0;
  Rng* rng = nullptr;
};

struct SegmentInput {
  Mat visual;              // l × d_visual (padded)
  Mat audio;               // l × d_audio (padded)
  std::vector<bool> real;  // true = real frame
};

struct SegmentForward {
  ad::Var prediction;       // l × 2
  EncoderState state_out;   // lstm only; values detached from the tape
};

// Builds fuse → encode → regress for one segment on the given tape.
// state_in is required for lstm configs and ignored for trm.
SegmentForward forward_segment(ad::Tape& tape, const TapeModel& model,
                               const ModelConfig& config,
                               const SegmentInput& input,
                               const EncoderState* state_in,
                               const ForwardPolicy& policy);

}  // namespace va
