// va/postprocess.h

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

#include <string>
#include <vector>

#include "va/types.h"

namespace va {

struct PostprocessConfig {
  double clip_low = -1.0;
  double clip_high = 1.0;
  int w_valence = 20;
  int w_arousal = 50;

  void validate() const;
};

// Maps every value into [clip_low, clip_high]. Idempotent.
PredictionTrack clip_track(const PredictionTrack& track, double clip_low = -1.0,
                           double clip_high = 1.0);

// Window mean around each frame: indices j−⌊w/2⌋ .. j+⌊w/2⌋ clipped to the
// track, so the effective window is 2⌊w/2⌋+1 frames and shrinks at the
// boundaries. w=1 is the identity.
std::vector<double> smooth_series(const std::vector<double>& xs, int w);

// Applies smooth_series per channel with the configured windows. The input
// must already be within clip bounds (clip first; the window mean then
// cannot leave the range).
PredictionTrack smooth_track(const PredictionTrack& track,
                             const PostprocessConfig& config);

// Per-frame per-channel arithmetic mean over tracks of the same video.
PredictionTrack ensemble_average(const std::vector<PredictionTrack>& tracks);

// Prediction CSV: header `frame,valence,arousal`, one file per video.
void write_prediction_csv(const std::string& path,
                          const PredictionTrack& track);
PredictionTrack read_prediction_csv(const std::string& path,
                                    const std::string& video_id,
                                    PredictionStage stage);

}  // namespace va
