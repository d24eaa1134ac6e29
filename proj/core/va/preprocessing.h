// va/preprocessing.h

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

#include <vector>

#include "va/types.h"

namespace va {

// The windowing of one video: candidate segment i (1-based) starts at frame
// (i-1)*stride + 1; candidates starting past the last frame are dropped, so
// every kept segment has at least one real frame and the kept count is
// ceil(n / stride).
struct SegmentationPlan {
  int segment_length = 0;  // l
  int stride = 0;          // p
  std::vector<Segment> segments;
};

// Replaces every invalid frame's feature row with the nearest valid frame's
// row; equidistant ties pick the preceding valid frame. Valid frames are
// never touched, so the operation is idempotent.
FeatureTrack fill_invalid_frames(const FeatureTrack& track,
                                 const std::vector<bool>& valid);

// Computes the per-frame fill source: source[j] == j for valid frames, else
// the 0-based index of the nearest valid frame. Shared by fill and by tests.
std::vector<int> nearest_valid_sources(const std::vector<bool>& valid);

SegmentationPlan plan_segments(const std::string& video_id, int n_frames,
                               int segment_length, int stride);

struct PaddedRows {
  Mat values;              // l × d
  std::vector<bool> mask;  // true = real row
};

// Pads k rows up to l by repeating the last real row; mask marks padding.
PaddedRows pad_segment(const Mat& rows, int target_length);

}  // namespace va
