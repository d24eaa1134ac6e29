// va/types.h

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

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "va/util.h"

namespace va {

using Mat = Eigen::MatrixXd;

// Frame indices are 1-based in segment arithmetic and 0-based in CSV files.
// The conversion lives in this header (Segment::first_row / last_row); no
// other module converts.

// One video's frame axis: frame rate, frame count and per-frame face
// validity. Frame j is valid when a usable face (and therefore a usable
// visual feature) exists for it.
struct FrameTrack {
  std::string video_id;
  double fps = 0.0;
  int n_frames = 0;
  std::vector<bool> valid;  // n_frames entries
};

enum class Modality { visual, audio };

// One modality's per-frame feature matrix for one video, n × d after
// alignment. Row j (0-based) belongs to frame j+1.
struct FeatureTrack {
  std::string video_id;
  Modality modality = Modality::visual;
  std::string name;
  Mat values;  // n × d

  int rows() const { return static_cast<int>(values.rows()); }
  int dim() const { return static_cast<int>(values.cols()); }
};

// Per-frame valence/arousal annotations. Frames whose raw labels fall
// outside [-1, 1] (e.g. a -5 sentinel) are kept with label_valid=false.
struct LabelTrack {
  std::string video_id;
  std::vector<double> valence;
  std::vector<double> arousal;
  std::vector<bool> label_valid;

  int n() const { return static_cast<int>(valence.size()); }
};

// A length-l window cut from a video at 1-based start_frame. Positions past
// the real span are padding; padding is always a contiguous suffix.
struct Segment {
  std::string video_id;
  int index = 0;        // 1-based segment number
  int start_frame = 0;  // 1-based, inclusive
  int end_frame = 0;    // 1-based, inclusive
  int length = 0;       // l
  std::vector<bool> mask;  // length entries, true = real frame

  int real_count() const { return end_frame - start_frame + 1; }
  // 0-based row indices into per-video matrices.
  int first_row() const { return start_frame - 1; }
  int last_row() const { return end_frame - 1; }
};

enum class PredictionStage { raw, clipped, smoothed, ensembled };

const char* to_string(PredictionStage stage);

// Per-frame valence/arousal predictions. Stages past raw guarantee all
// values within [-1, 1].
struct PredictionTrack {
  std::string video_id;
  std::vector<double> valence;
  std::vector<double> arousal;
  PredictionStage stage = PredictionStage::raw;

  int n() const { return static_cast<int>(valence.size()); }
};

enum class EncoderKind { lstm, trm };

const char* to_string(EncoderKind kind);
EncoderKind encoder_kind_from_string(const std::string& s);

struct SmoothingWindows {
  int valence = 20;
  int arousal = 50;
};

// Hyper-parameters of one model. encoder_kind=lstm forces stride ==
// segment_length (adjacent segments must be consecutive frames so carried
// state is meaningful); trm allows stride <= segment_length.
struct ModelConfig {
  EncoderKind encoder_kind = EncoderKind::trm;
  int d_model = 256;
  int segment_length = 250;  // l
  int stride = 250;          // p
  int encoder_layers = 4;
  int attention_heads = 4;  // trm only
  int d_ff = 1024;          // trm only
  std::vector<int> regression_hidden = {256, 256};
  double dropout = 0.3;
  double learning_rate = 2e-4;
  int batch_size = 16;
  int epochs = 30;
  SmoothingWindows smoothing;

  void validate() const;  // throws Error on inconsistent settings
};

// w is out × in, b is 1 × out; applied to row vectors as X·wᵀ + b.
struct AffineParams {
  Mat w;
  Mat b;
};

// Gate order in the stacked matrices is [input, forget, cell, output].
struct LstmLayerParams {
  Mat w_x;  // 4H × in
  Mat w_h;  // 4H × H
  Mat b;    // 1 × 4H
};

struct TrmLayerParams {
  AffineParams attn_q, attn_k, attn_v, attn_out;
  AffineParams ff1, ff2;
  Mat ln1_gamma, ln1_beta;  // 1 × d_model
  Mat ln2_gamma, ln2_beta;
};

// All learnable weights. Exactly one of lstm/trm is populated, matching
// ModelConfig::encoder_kind. d_visual/d_audio record the input split the
// fusion layer was built for.
struct ModelParams {
  AffineParams fusion;
  std::vector<LstmLayerParams> lstm;
  std::vector<TrmLayerParams> trm;
  std::vector<AffineParams> regression;  // hidden layers, then out-width-2
  int d_visual = 0;
  int d_audio = 0;
};

// Visits every tensor in a fixed order with a stable name. The order is the
// contract for optimizer moments and checkpoint layout.
void for_each_param(ModelParams& params,
                    const std::function<void(const std::string&, Mat&)>& fn);
void for_each_param(const ModelParams& params,
                    const std::function<void(const std::string&, const Mat&)>& fn);

// Recurrent encoder memory carried between segments of one video. Both the
// hidden vector and the cell memory cross the boundary; zeroed at each
// video start.
struct EncoderState {
  Mat hidden;  // layers × d_model
  Mat cell;    // layers × d_model

  static EncoderState zeros(int layers, int d_model);
};

// One video's worth of aligned inputs: frame axis, frame-aligned feature
// tracks, and optionally labels.
struct VideoRecord {
  FrameTrack frames;
  std::vector<FeatureTrack> features;
  std::optional<LabelTrack> labels;
};

// Checks every cross-type invariant (matching lengths, matching video ids,
// finite features, label ranges) and returns the record unchanged.
// Validating a validated record is a no-op by construction.
const VideoRecord& validate_record(const VideoRecord& record);

}  // namespace va
