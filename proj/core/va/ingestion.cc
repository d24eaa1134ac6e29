// va/ingestion.cc

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

#include "va/ingestion.h"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "va/csv.h"

namespace va {

namespace {

namespace fs = std::filesystem;

// Shared body of the feature loaders: header `frame,...`, sequential frame
// column, finite values.
Mat load_feature_matrix(const std::string& path) {
  csv::NumericTable table = csv::read_numeric(path);
  require(table.header.size() >= 2, path, ": expected header frame,f0,...");
  require(table.header[0] == "frame", path,
          ": first column must be 'frame', got '", table.header[0], "'");
  const int n = static_cast<int>(table.values.rows());
  require(n >= 1, path, ": no frames (header-only file)");
  const int d = static_cast<int>(table.values.cols()) - 1;
  Mat values(n, d);
  for (int r = 0; r < n; ++r) {
    double idx = table.values(r, 0);
    require(idx == static_cast<double>(r), path, ":", r + 2,
            ": frame column must be sequential from 0, got ",
            csv::format_double(idx));
    for (int c = 0; c < d; ++c) {
      double v = table.values(r, c + 1);
      require(std::isfinite(v), path, ":", r + 2, ": non-finite value in column '",
              table.header[static_cast<size_t>(c + 1)], "'");
      values(r, c) = v;
    }
  }
  return values;
}

}  // namespace

FeatureTrack load_visual_features_csv(const std::string& path,
                                      const std::string& video_id,
                                      const std::string& name) {
  FeatureTrack track;
  track.video_id = video_id;
  track.modality = Modality::visual;
  track.name = name;
  track.values = load_feature_matrix(path);
  return track;
}

AudioFeatureFile load_audio_features_csv(const std::string& path,
                                         double hop_seconds) {
  require(hop_seconds > 0.0, path, ": hop_seconds must be positive, got ",
          hop_seconds);
  AudioFeatureFile audio;
  audio.hop_seconds = hop_seconds;
  audio.values = load_feature_matrix(path);
  return audio;
}

FeatureTrack align_audio_to_frames(const AudioFeatureFile& audio, double fps,
                                   int n_frames, const std::string& video_id,
                                   const std::string& name) {
  require(fps > 0.0, "align: fps must be positive, got ", fps);
  require(n_frames >= 1, "align: n_frames must be >= 1, got ", n_frames);
  require(audio.rows() >= 2, "align: need at least 2 audio rows, got ",
          audio.rows());

  const int m = audio.rows();
  const double hop = audio.hop_seconds;

  FeatureTrack track;
  track.video_id = video_id;
  track.modality = Modality::audio;
  track.name = name;
  track.values.resize(n_frames, audio.dim());

  for (int j = 1; j <= n_frames; ++j) {
    const double t = static_cast<double>(j - 1) / fps;
    // The two closest rows are within a couple of hops of t/hop; scanning a
    // small window around it is equivalent to a full scan over sorted
    // timestamps (the unit tests check this against a brute-force oracle).
    int center =
        static_cast<int>(std::min(std::floor(t / hop), static_cast<double>(m)));
    int lo = std::clamp(center - 2, 0, m - 2);
    int hi = std::clamp(center + 2, 0, m - 1);
    int best1 = -1, best2 = -1;
    double d1 = 0.0, d2 = 0.0;
    for (int k = lo; k <= hi; ++k) {
      double d = std::abs(static_cast<double>(k) * hop - t);
      // Strict comparisons keep the earlier row on exact ties.
      if (best1 < 0 || d < d1) {
        best2 = best1;
        d2 = d1;
        best1 = k;
        d1 = d;
      } else if (best2 < 0 || d < d2) {
        best2 = k;
        d2 = d;
      }
    }
    track.values.row(j - 1) =
        0.5 * (audio.values.row(best1) + audio.values.row(best2));
  }
  return track;
}

LabelTrack load_labels_csv(const std::string& path,
                           const std::string& video_id) {
  csv::NumericTable table = csv::read_numeric(path);
  require(table.header.size() == 3 && table.header[0] == "frame" &&
              table.header[1] == "valence" && table.header[2] == "arousal",
          path, ": expected header frame,valence,arousal");
  const int n = static_cast<int>(table.values.rows());
  require(n >= 1, path, ": no frames (header-only file)");

  LabelTrack labels;
  labels.video_id = video_id;
  labels.valence.resize(static_cast<size_t>(n));
  labels.arousal.resize(static_cast<size_t>(n));
  labels.label_valid.resize(static_cast<size_t>(n));
  for (int r = 0; r < n; ++r) {
    require(table.values(r, 0) == static_cast<double>(r), path, ":", r + 2,
            ": frame column must be sequential from 0");
    double v = table.values(r, 1);
    double a = table.values(r, 2);
    require(std::isfinite(v) && std::isfinite(a), path, ":", r + 2,
            ": non-finite label");
    bool in_range = v >= -1.0 && v <= 1.0 && a >= -1.0 && a <= 1.0;
    labels.valence[static_cast<size_t>(r)] = v;
    labels.arousal[static_cast<size_t>(r)] = a;
    labels.label_valid[static_cast<size_t>(r)] = in_range;
  }
  return labels;
}

std::vector<bool> load_validity_csv(const std::string& path) {
  csv::NumericTable table = csv::read_numeric(path);
  require(table.header.size() == 2 && table.header[0] == "frame" &&
              table.header[1] == "valid",
          path, ": expected header frame,valid");
  const int n = static_cast<int>(table.values.rows());
  require(n >= 1, path, ": no frames (header-only file)");
  std::vector<bool> valid(static_cast<size_t>(n));
  for (int r = 0; r < n; ++r) {
    require(table.values(r, 0) == static_cast<double>(r), path, ":", r + 2,
            ": frame column must be sequential from 0");
    double v = table.values(r, 1);
    require(v == 0.0 || v == 1.0, path, ":", r + 2,
            ": valid column must be 0 or 1");
    valid[static_cast<size_t>(r)] = v == 1.0;
  }
  return valid;
}

std::vector<ManifestEntry> load_manifest(const std::string& features_dir) {
  const std::string path = (fs::path(features_dir) / "manifest.csv").string();
  csv::Table table = csv::read_table(path);
  require(table.header.size() == 4 && table.header[0] == "video_id" &&
              table.header[1] == "fps" && table.header[2] == "n_frames" &&
              table.header[3] == "split",
          path, ": expected header video_id,fps,n_frames,split");
  std::vector<ManifestEntry> entries;
  entries.reserve(table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    ManifestEntry e;
    e.video_id = row[0];
    e.fps = csv::parse_double(row[1], path, r + 2, "fps");
    e.n_frames = static_cast<int>(csv::parse_long(row[2], path, r + 2, "n_frames"));
    e.split = row[3];
    require(e.fps > 0.0, path, ":", r + 2, ": fps must be positive");
    require(e.n_frames >= 1, path, ":", r + 2, ": n_frames must be >= 1");
    require(e.split == "train" || e.split == "val", path, ":", r + 2,
            ": split must be train or val, got '", e.split, "'");
    entries.push_back(std::move(e));
  }
  require(!entries.empty(), path, ": empty manifest");
  return entries;
}

std::vector<FeatureInfo> load_feature_infos(const std::string& features_dir) {
  const std::string path = (fs::path(features_dir) / "features.csv").string();
  csv::Table table = csv::read_table(path);
  require(table.header.size() == 3 && table.header[0] == "name" &&
              table.header[1] == "modality" && table.header[2] == "hop_seconds",
          path, ": expected header name,modality,hop_seconds");
  std::vector<FeatureInfo> infos;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    FeatureInfo info;
    info.name = row[0];
    if (row[1] == "visual") {
      info.modality = Modality::visual;
    } else if (row[1] == "audio") {
      info.modality = Modality::audio;
    } else {
      fail(path, ":", r + 2, ": modality must be visual or audio, got '",
           row[1], "'");
    }
    info.hop_seconds =
        row[2].empty() ? 0.0 : csv::parse_double(row[2], path, r + 2, "hop_seconds");
    require(info.hop_seconds >= 0.0, path, ":", r + 2,
            ": hop_seconds must be >= 0");
    require(info.modality == Modality::audio || info.hop_seconds == 0.0, path,
            ":", r + 2, ": visual features cannot carry a hop");
    infos.push_back(std::move(info));
  }
  require(!infos.empty(), path, ": empty feature list");
  return infos;
}

std::vector<FeatureInfo> select_features(const std::vector<FeatureInfo>& all,
                                         const std::vector<std::string>& names) {
  std::vector<FeatureInfo> picked;
  if (names.empty()) {
    picked = all;
  } else {
    for (const std::string& name : names) {
      auto it = std::find_if(all.begin(), all.end(),
                             [&](const FeatureInfo& f) { return f.name == name; });
      require(it != all.end(), "unknown feature '", name, "'");
      picked.push_back(*it);
    }
  }
  // Visual tracks first, audio after; stable within each modality.
  std::stable_sort(picked.begin(), picked.end(),
                   [](const FeatureInfo& a, const FeatureInfo& b) {
                     return a.modality == Modality::visual &&
                            b.modality == Modality::audio;
                   });
  return picked;
}

VideoRecord load_video_record(const std::string& features_dir,
                              const std::string& labels_dir,
                              const ManifestEntry& entry,
                              const std::vector<FeatureInfo>& selected) {
  VideoRecord record;
  record.frames.video_id = entry.video_id;
  record.frames.fps = entry.fps;
  record.frames.n_frames = entry.n_frames;

  const std::string validity_path =
      (fs::path(features_dir) / "validity" / (entry.video_id + ".csv")).string();
  if (fs::exists(validity_path)) {
    record.frames.valid = load_validity_csv(validity_path);
  } else {
    record.frames.valid.assign(static_cast<size_t>(entry.n_frames), true);
  }

  for (const FeatureInfo& info : selected) {
    const std::string path =
        (fs::path(features_dir) / "features" / info.name / (entry.video_id + ".csv"))
            .string();
    if (info.modality == Modality::visual) {
      record.features.push_back(
          load_visual_features_csv(path, entry.video_id, info.name));
    } else {
      AudioFeatureFile audio = load_audio_features_csv(path, info.hop_seconds);
      record.features.push_back(align_audio_to_frames(
          audio, entry.fps, entry.n_frames, entry.video_id, info.name));
    }
  }

  if (!labels_dir.empty()) {
    const std::string path =
        (fs::path(labels_dir) / (entry.video_id + ".csv")).string();
    record.labels = load_labels_csv(path, entry.video_id);
  }

  validate_record(record);
  return record;
}

}  // namespace va
