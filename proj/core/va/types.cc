// va/types.cc

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

#include "va/types.h"

#include <cmath>

namespace va {

const char* to_string(PredictionStage stage) {
  switch (stage) {
    case PredictionStage::raw: return "raw";
    case PredictionStage::clipped: return "clipped";
    case PredictionStage::smoothed: return "smoothed";
    case PredictionStage::ensembled: return "ensembled";
  }
  return "?";
}

const char* to_string(EncoderKind kind) {
  return kind == EncoderKind::lstm ? "lstm" : "trm";
}

EncoderKind encoder_kind_from_string(const std::string& s) {
  if (s == "lstm") return EncoderKind::lstm;
  if (s == "trm") return EncoderKind::trm;
  fail("unknown encoder kind '", s, "' (expected lstm or trm)");
}

void ModelConfig::validate() const {
  require(d_model >= 1, "d_model must be positive, got ", d_model);
  require(segment_length >= 1, "segment_length must be positive, got ",
          segment_length);
  require(stride >= 1, "stride must be positive, got ", stride);
  require(stride <= segment_length, "stride ", stride,
          " exceeds segment_length ", segment_length);
  if (encoder_kind == EncoderKind::lstm) {
    require(stride == segment_length,
            "lstm encoder requires stride == segment_length (no overlap), got ",
            stride, " vs ", segment_length);
  } else {
    require(attention_heads >= 1, "attention_heads must be positive");
    require(d_model % attention_heads == 0, "d_model ", d_model,
            " not divisible by attention_heads ", attention_heads);
    require(d_ff >= 1, "d_ff must be positive");
  }
  require(encoder_layers >= 1, "encoder_layers must be positive");
  for (int h : regression_hidden)
    require(h >= 1, "regression hidden width must be positive, got ", h);
  require(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0,1), got ",
          dropout);
  require(learning_rate > 0.0, "learning_rate must be positive");
  require(batch_size >= 1, "batch_size must be positive");
  require(epochs >= 1, "epochs must be positive");
  require(smoothing.valence >= 1 && smoothing.arousal >= 1,
          "smoothing windows must be >= 1");
}

void for_each_param(ModelParams& params,
                    const std::function<void(const std::string&, Mat&)>& fn) {
  fn("fusion.w", params.fusion.w);
  fn("fusion.b", params.fusion.b);
  for (size_t i = 0; i < params.lstm.size(); ++i) {
    auto& l = params.lstm[i];
    const std::string p = msg("lstm", i, ".");
    fn(p + "w_x", l.w_x);
    fn(p + "w_h", l.w_h);
    fn(p + "b", l.b);
  }
  for (size_t i = 0; i < params.trm.size(); ++i) {
    auto& l = params.trm[i];
    const std::string p = msg("trm", i, ".");
    fn(p + "q.w", l.attn_q.w);
    fn(p + "q.b", l.attn_q.b);
    fn(p + "k.w", l.attn_k.w);
    fn(p + "k.b", l.attn_k.b);
    fn(p + "v.w", l.attn_v.w);
    fn(p + "v.b", l.attn_v.b);
    fn(p + "o.w", l.attn_out.w);
    fn(p + "o.b", l.attn_out.b);
    fn(p + "ff1.w", l.ff1.w);
    fn(p + "ff1.b", l.ff1.b);
    fn(p + "ff2.w", l.ff2.w);
    fn(p + "ff2.b", l.ff2.b);
    fn(p + "ln1.gamma", l.ln1_gamma);
    fn(p + "ln1.beta", l.ln1_beta);
    fn(p + "ln2.gamma", l.ln2_gamma);
    fn(p + "ln2.beta", l.ln2_beta);
  }
  for (size_t i = 0; i < params.regression.size(); ++i) {
    const std::string p = msg("reg", i, ".");
    fn(p + "w", params.regression[i].w);
    fn(p + "b", params.regression[i].b);
  }
}

void for_each_param(const ModelParams& params,
                    const std::function<void(const std::string&, const Mat&)>& fn) {
  for_each_param(const_cast<ModelParams&>(params),
                 [&fn](const std::string& name, Mat& m) { fn(name, m); });
}

EncoderState EncoderState::zeros(int layers, int d_model) {
  EncoderState s;
  s.hidden = Mat::Zero(layers, d_model);
  s.cell = Mat::Zero(layers, d_model);
  return s;
}

const VideoRecord& validate_record(const VideoRecord& record) {
  const FrameTrack& frames = record.frames;
  require(frames.n_frames >= 1, "video '", frames.video_id,
          "': n_frames must be >= 1, got ", frames.n_frames);
  require(frames.fps > 0.0, "video '", frames.video_id,
          "': fps must be positive, got ", frames.fps);
  require(static_cast<int>(frames.valid.size()) == frames.n_frames, "video '",
          frames.video_id, "': validity flags: expected ", frames.n_frames,
          " entries, got ", frames.valid.size());

  for (const FeatureTrack& feat : record.features) {
    require(feat.video_id == frames.video_id, "feature track '", feat.name,
            "': video_id '", feat.video_id, "' does not match '",
            frames.video_id, "'");
    require(feat.rows() == frames.n_frames, "feature track '", feat.name,
            "' of video '", feat.video_id, "': expected ", frames.n_frames,
            " rows, got ", feat.rows());
    require(feat.dim() >= 1, "feature track '", feat.name, "': empty dim");
    require(feat.values.allFinite(), "feature track '", feat.name,
            "' of video '", feat.video_id, "': non-finite values");
  }

  if (record.labels.has_value()) {
    const LabelTrack& labels = *record.labels;
    require(labels.video_id == frames.video_id, "label track: video_id '",
            labels.video_id, "' does not match '", frames.video_id, "'");
    require(labels.n() == frames.n_frames, "label track of video '",
            labels.video_id, "': expected ", frames.n_frames, " rows, got ",
            labels.n());
    require(labels.arousal.size() == labels.valence.size() &&
                labels.label_valid.size() == labels.valence.size(),
            "label track of video '", labels.video_id,
            "': channel lengths disagree");
    for (int j = 0; j < labels.n(); ++j) {
      if (!labels.label_valid[static_cast<size_t>(j)]) continue;
      double v = labels.valence[static_cast<size_t>(j)];
      double a = labels.arousal[static_cast<size_t>(j)];
      require(std::isfinite(v) && v >= -1.0 && v <= 1.0 && std::isfinite(a) &&
                  a >= -1.0 && a <= 1.0,
              "label track of video '", labels.video_id, "': frame ", j,
              " flagged valid but outside [-1,1]: valence=", v,
              " arousal=", a);
    }
  }
  return record;
}

}  // namespace va
