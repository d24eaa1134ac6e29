// va/postprocess.cc

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

#include "va/postprocess.h"

#include <algorithm>
#include <cmath>

#include "va/csv.h"

namespace va {

namespace {

void check_range(const PredictionTrack& track, double lo, double hi) {
  for (int j = 0; j < track.n(); ++j) {
    double v = track.valence[static_cast<size_t>(j)];
    double a = track.arousal[static_cast<size_t>(j)];
    require(v >= lo && v <= hi && a >= lo && a <= hi, "track '",
            track.video_id, "' stage ", to_string(track.stage), ": frame ",
            j, " outside [", lo, ",", hi, "]: valence=", v, " arousal=", a);
  }
}

}  // namespace

void PostprocessConfig::validate() const {
  require(clip_low < clip_high, "postprocess: clip_low ", clip_low,
          " must be below clip_high ", clip_high);
  require(w_valence >= 1 && w_arousal >= 1,
          "postprocess: smoothing windows must be >= 1");
}

PredictionTrack clip_track(const PredictionTrack& track, double clip_low,
                           double clip_high) {
  require(clip_low < clip_high, "clip: clip_low must be below clip_high");
  PredictionTrack out = track;
  for (auto* channel : {&out.valence, &out.arousal})
    for (double& v : *channel) v = std::clamp(v, clip_low, clip_high);
  out.stage = PredictionStage::clipped;
  return out;
}

std::vector<double> smooth_series(const std::vector<double>& xs, int w) {
  require(!xs.empty(), "smooth: empty series");
  require(w >= 1, "smooth: window must be >= 1, got ", w);
  const int n = static_cast<int>(xs.size());
  const int half = w / 2;
  // Prefix sums make each window mean O(1).
  std::vector<double> prefix(static_cast<size_t>(n) + 1, 0.0);
  for (int j = 0; j < n; ++j)
    prefix[static_cast<size_t>(j) + 1] = prefix[static_cast<size_t>(j)] +
                                         xs[static_cast<size_t>(j)];
  std::vector<double> out(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    int lo = std::max(0, j - half);
    int hi = std::min(n - 1, j + half);
    double sum = prefix[static_cast<size_t>(hi) + 1] - prefix[static_cast<size_t>(lo)];
    out[static_cast<size_t>(j)] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

PredictionTrack smooth_track(const PredictionTrack& track,
                             const PostprocessConfig& config) {
  config.validate();
  check_range(track, config.clip_low, config.clip_high);
  PredictionTrack out = track;
  out.valence = smooth_series(track.valence, config.w_valence);
  out.arousal = smooth_series(track.arousal, config.w_arousal);
  out.stage = PredictionStage::smoothed;
  return out;
}

PredictionTrack ensemble_average(const std::vector<PredictionTrack>& tracks) {
  require(!tracks.empty(), "ensemble: no tracks");
  const PredictionTrack& first = tracks.front();
  PredictionTrack out;
  out.video_id = first.video_id;
  out.stage = PredictionStage::ensembled;
  out.valence.assign(static_cast<size_t>(first.n()), 0.0);
  out.arousal.assign(static_cast<size_t>(first.n()), 0.0);
  for (const PredictionTrack& t : tracks) {
    require(t.video_id == first.video_id, "ensemble: video id '", t.video_id,
            "' does not match '", first.video_id, "'");
    require(t.n() == first.n(), "ensemble: video '", t.video_id, "': ",
            t.n(), " frames vs ", first.n());
    for (int j = 0; j < t.n(); ++j) {
      out.valence[static_cast<size_t>(j)] += t.valence[static_cast<size_t>(j)];
      out.arousal[static_cast<size_t>(j)] += t.arousal[static_cast<size_t>(j)];
    }
  }
  const double k = static_cast<double>(tracks.size());
  for (double& v : out.valence) v /= k;
  for (double& a : out.arousal) a /= k;
  check_range(out, -1.0, 1.0);
  return out;
}

void write_prediction_csv(const std::string& path,
                          const PredictionTrack& track) {
  csv::Writer out(path);
  out.header({"frame", "valence", "arousal"});
  for (int j = 0; j < track.n(); ++j) {
    double vals[2] = {track.valence[static_cast<size_t>(j)],
                      track.arousal[static_cast<size_t>(j)]};
    out.row(j, vals, 2);
  }
  out.close();
}

PredictionTrack read_prediction_csv(const std::string& path,
                                    const std::string& video_id,
                                    PredictionStage stage) {
  csv::NumericTable table = csv::read_numeric(path);
  require(table.header.size() == 3 && table.header[0] == "frame" &&
              table.header[1] == "valence" && table.header[2] == "arousal",
          path, ": expected header frame,valence,arousal");
  const int n = static_cast<int>(table.values.rows());
  require(n >= 1, path, ": empty prediction file");
  PredictionTrack track;
  track.video_id = video_id;
  track.stage = stage;
  track.valence.resize(static_cast<size_t>(n));
  track.arousal.resize(static_cast<size_t>(n));
  for (int r = 0; r < n; ++r) {
    require(table.values(r, 0) == static_cast<double>(r), path, ":", r + 2,
            ": frame column must be sequential from 0");
    double v = table.values(r, 1);
    double a = table.values(r, 2);
    require(std::isfinite(v) && std::isfinite(a), path, ":", r + 2,
            ": non-finite prediction");
    track.valence[static_cast<size_t>(r)] = v;
    track.arousal[static_cast<size_t>(r)] = a;
  }
  return track;
}

}  // namespace va
