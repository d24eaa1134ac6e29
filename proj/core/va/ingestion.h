// va/ingestion.h

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

// Audio features arrive on their own time grid: row k sits at timestamp
// k * hop_seconds. They are mapped onto video frames by averaging the two
// rows closest to each frame's timestamp.
struct AudioFeatureFile {
  double hop_seconds = 0.02;
  Mat values;  // m × d

  int rows() const { return static_cast<int>(values.rows()); }
  int dim() const { return static_cast<int>(values.cols()); }
};

// Frame-aligned feature CSV: header `frame,f0..f{d-1}`, frame column 0-based
// and sequential. Rejects non-finite values.
FeatureTrack load_visual_features_csv(const std::string& path,
                                      const std::string& video_id,
                                      const std::string& name);

// Same file format, but rows live on the hop grid rather than frames.
AudioFeatureFile load_audio_features_csv(const std::string& path,
                                         double hop_seconds);

// Frame j (1-based) lands at t_j = (j-1)/fps. Its feature is the mean of
// the two distinct audio rows whose timestamps are closest to t_j; exact
// distance ties prefer the earlier row.
FeatureTrack align_audio_to_frames(const AudioFeatureFile& audio, double fps,
                                   int n_frames, const std::string& video_id,
                                   const std::string& name);

// Label CSV: header `frame,valence,arousal`. Finite values outside [-1, 1]
// (dataset sentinels such as -5) are ingested with label_valid=false.
LabelTrack load_labels_csv(const std::string& path,
                           const std::string& video_id);

// Validity CSV: header `frame,valid`, cells 0/1.
std::vector<bool> load_validity_csv(const std::string& path);

// -- dataset directory layout -------------------------------------------
//
// features_dir/
//   manifest.csv              video_id,fps,n_frames,split
//   features.csv              name,modality,hop_seconds
//   features/<name>/<id>.csv  per-video feature files
//   validity/<id>.csv         optional per-video face validity
// labels_dir/
//   <id>.csv                  per-video label files

struct FeatureInfo {
  std::string name;
  Modality modality = Modality::visual;
  double hop_seconds = 0.0;  // > 0 for hop-grid audio files
};

struct ManifestEntry {
  std::string video_id;
  double fps = 0.0;
  int n_frames = 0;
  std::string split;  // train | val
};

std::vector<ManifestEntry> load_manifest(const std::string& features_dir);
std::vector<FeatureInfo> load_feature_infos(const std::string& features_dir);

// Picks infos by name, preserving features.csv order (visual tracks first,
// then audio, each in listed order). Unknown names are an error. An empty
// selection means all features.
std::vector<FeatureInfo> select_features(const std::vector<FeatureInfo>& all,
                                         const std::vector<std::string>& names);

// Loads one video: visual tracks as-is, audio tracks aligned to frames,
// validity if present (all-valid otherwise), labels when labels_dir is
// non-empty. The returned record has been through validate_record.
VideoRecord load_video_record(const std::string& features_dir,
                              const std::string& labels_dir,
                              const ManifestEntry& entry,
                              const std::vector<FeatureInfo>& selected);

}  // namespace va
