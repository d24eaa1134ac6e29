// va/preprocessing.cc

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

#include "va/preprocessing.h"

#include <algorithm>

namespace va {

std::vector<int> nearest_valid_sources(const std::vector<bool>& valid) {
  const int n = static_cast<int>(valid.size());
  require(n >= 1, "fill: empty validity vector");
  require(std::find(valid.begin(), valid.end(), true) != valid.end(),
          "unusable video: no valid frames to fill from");

  // Distance to the closest valid frame on each side, then pick; ties go to
  // the preceding frame.
  constexpr int kFar = 1 << 30;
  std::vector<int> prev(static_cast<size_t>(n)), next(static_cast<size_t>(n));
  int last = -1;
  for (int j = 0; j < n; ++j) {
    if (valid[static_cast<size_t>(j)]) last = j;
    prev[static_cast<size_t>(j)] = last;
  }
  last = -1;
  for (int j = n - 1; j >= 0; --j) {
    if (valid[static_cast<size_t>(j)]) last = j;
    next[static_cast<size_t>(j)] = last;
  }

  std::vector<int> source(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    if (valid[static_cast<size_t>(j)]) {
      source[static_cast<size_t>(j)] = j;
      continue;
    }
    int p = prev[static_cast<size_t>(j)];
    int q = next[static_cast<size_t>(j)];
    int dp = p < 0 ? kFar : j - p;
    int dq = q < 0 ? kFar : q - j;
    source[static_cast<size_t>(j)] = dp <= dq ? p : q;
  }
  return source;
}

FeatureTrack fill_invalid_frames(const FeatureTrack& track,
                                 const std::vector<bool>& valid) {
  require(static_cast<int>(valid.size()) == track.rows(), "fill: track '",
          track.name, "' has ", track.rows(), " rows but ", valid.size(),
          " validity flags");
  std::vector<int> source = nearest_valid_sources(valid);
  FeatureTrack filled = track;
  for (int j = 0; j < track.rows(); ++j) {
    int s = source[static_cast<size_t>(j)];
    if (s != j) filled.values.row(j) = track.values.row(s);
  }
  return filled;
}

SegmentationPlan plan_segments(const std::string& video_id, int n_frames,
                               int segment_length, int stride) {
  require(n_frames >= 1, "plan_segments: n_frames must be >= 1, got ",
          n_frames);
  require(stride >= 1, "plan_segments: stride must be >= 1, got ", stride);
  require(stride <= segment_length, "plan_segments: stride ", stride,
          " exceeds segment_length ", segment_length);

  SegmentationPlan plan;
  plan.segment_length = segment_length;
  plan.stride = stride;

  // Candidate count floor(n/p)+1; a candidate whose start frame exceeds n
  // would be empty and is dropped.
  const int candidates = n_frames / stride + 1;
  for (int i = 1; i <= candidates; ++i) {
    const int start = (i - 1) * stride + 1;
    if (start > n_frames) continue;
    Segment seg;
    seg.video_id = video_id;
    seg.index = static_cast<int>(plan.segments.size()) + 1;
    seg.start_frame = start;
    seg.end_frame = std::min(start + segment_length - 1, n_frames);
    seg.length = segment_length;
    seg.mask.assign(static_cast<size_t>(segment_length), false);
    for (int k = 0; k < seg.real_count(); ++k)
      seg.mask[static_cast<size_t>(k)] = true;
    plan.segments.push_back(std::move(seg));
  }
  return plan;
}

PaddedRows pad_segment(const Mat& rows, int target_length) {
  const int k = static_cast<int>(rows.rows());
  require(k >= 1, "pad_segment: cannot pad an empty segment");
  require(k <= target_length, "pad_segment: ", k, " rows exceed target length ",
          target_length);

  PaddedRows out;
  out.values.resize(target_length, rows.cols());
  out.values.topRows(k) = rows;
  for (int j = k; j < target_length; ++j) out.values.row(j) = rows.row(k - 1);
  out.mask.assign(static_cast<size_t>(target_length), false);
  for (int j = 0; j < k; ++j) out.mask[static_cast<size_t>(j)] = true;
  return out;
}

}  // namespace va
