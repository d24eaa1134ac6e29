// va/training.h

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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "va/objectives.h"
#include "va/preprocessing.h"
#include "va/types.h"

namespace va {

// The three shipped configurations: LSTM, TRM-v1, TRM-v2.
struct Preset {
  std::string name;
  ModelConfig config;
};

const std::vector<Preset>& presets();
ModelConfig preset_config(const std::string& name);

struct SegmentRef {
  int video = 0;    // index into the record/plan lists
  int segment = 0;  // 0-based index into that video's plan
};

struct Batch {
  std::vector<SegmentRef> items;
};

// trm: segments from all videos pooled and shuffled by seed, then chunked.
// lstm: each batch slot follows one video; videos are shuffled by seed and
// grouped batch_size wide, and step t of a group carries segment t of every
// video that still has one, so carried state always sees segments in order.
std::vector<Batch> make_batches(const std::vector<SegmentationPlan>& plans,
                                const ModelConfig& config, uint64_t seed);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<Mat> m, v;  // for_each_param order
  long step = 0;
};

AdamState make_adam_state(const ModelParams& params);

// One bias-corrected Adam update; grads pair with for_each_param order.
void adam_step(ModelParams& params, AdamState& state,
               const std::vector<Mat>& grads, double learning_rate,
               const AdamConfig& config = {});

// A trained model plus everything needed to resume or audit it. The file
// round-trips bit-exactly.
struct Checkpoint {
  ModelConfig config;
  std::vector<std::string> visual_features;  // concatenation order
  std::vector<std::string> audio_features;
  ModelParams params;
  AdamState opt;
  int epoch = 0;  // epoch the parameters were taken from
  uint64_t seed = 0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

struct EpochStats {
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;
  int batches = 0;
  int batches_skipped = 0;
  EvalReport validation;
};

struct FitOptions {
  std::vector<std::string> visual_features;
  std::vector<std::string> audio_features;
  std::function<void(const EpochStats&)> on_epoch;
};

struct FitResult {
  Checkpoint best;  // highest validation ccc_valence + ccc_arousal
  std::vector<EpochStats> history;
};

// Full optimization loop: per epoch, batched CCC-loss gradient steps with
// Adam, then a validation pass on raw predictions. Degenerate batches
// (fewer than 2 scorable frames) are skipped and counted; a non-finite loss
// aborts with a diagnostic.
FitResult fit(const std::vector<VideoRecord>& train,
              const std::vector<VideoRecord>& val, const ModelConfig& config,
              uint64_t seed, const FitOptions& options = {});

}  // namespace va
