// va/network.cc

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

#include "va/network.h"

#include <cmath>

#include "va/preprocessing.h"

namespace va {

namespace {

Mat uniform_init(int rows, int cols, double bound, Rng& rng) {
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(-bound, bound);
  return m;
}

AffineParams init_affine(int out, int in, Rng& rng) {
  double bound = 1.0 / std::sqrt(static_cast<double>(in));
  return AffineParams{uniform_init(out, in, bound, rng),
                      uniform_init(1, out, bound, rng)};
}

}  // namespace

ModelParams init_params(const ModelConfig& config, int d_visual, int d_audio,
                        Rng& rng) {
  config.validate();
  require(d_visual >= 0 && d_audio >= 0 && d_visual + d_audio >= 1,
          "init_params: need at least one input dimension");

  ModelParams params;
  params.d_visual = d_visual;
  params.d_audio = d_audio;
  params.fusion = init_affine(config.d_model, d_visual + d_audio, rng);

  if (config.encoder_kind == EncoderKind::lstm) {
    const int h = config.d_model;
    double bound = 1.0 / std::sqrt(static_cast<double>(h));
    for (int layer = 0; layer < config.encoder_layers; ++layer) {
      LstmLayerParams l;
      l.w_x = uniform_init(4 * h, config.d_model, bound, rng);
      l.w_h = uniform_init(4 * h, h, bound, rng);
      l.b = uniform_init(1, 4 * h, bound, rng);
      params.lstm.push_back(std::move(l));
    }
  } else {
    const int d = config.d_model;
    for (int layer = 0; layer < config.encoder_layers; ++layer) {
      TrmLayerParams l;
      l.attn_q = init_affine(d, d, rng);
      l.attn_k = init_affine(d, d, rng);
      l.attn_v = init_affine(d, d, rng);
      l.attn_out = init_affine(d, d, rng);
      l.ff1 = init_affine(config.d_ff, d, rng);
      l.ff2 = init_affine(d, config.d_ff, rng);
      l.ln1_gamma = Mat::Ones(1, d);
      l.ln1_beta = Mat::Zero(1, d);
      l.ln2_gamma = Mat::Ones(1, d);
      l.ln2_beta = Mat::Zero(1, d);
      params.trm.push_back(std::move(l));
    }
  }

  int in = config.d_model;
  for (int width : config.regression_hidden) {
    params.regression.push_back(init_affine(width, in, rng));
    in = width;
  }
  params.regression.push_back(init_affine(2, in, rng));
  return params;
}

TapeModel wrap_params(ad::Tape& tape, const ModelParams& params,
                      bool needs_grad) {
  TapeModel model;
  for_each_param(params, [&](const std::string&, const Mat& m) {
    model.flat.push_back(tape.leaf(m, needs_grad));
  });

  size_t at = 0;
  auto next = [&]() { return model.flat[at++]; };
  model.fusion = {next(), next()};
  for (size_t i = 0; i < params.lstm.size(); ++i)
    model.lstm.push_back(TapeLstmLayer{next(), next(), next()});
  for (size_t i = 0; i < params.trm.size(); ++i) {
    TapeTrmLayer l;
    l.q = {next(), next()};
    l.k = {next(), next()};
    l.v = {next(), next()};
    l.o = {next(), next()};
    l.ff1 = {next(), next()};
    l.ff2 = {next(), next()};
    l.ln1_gamma = next();
    l.ln1_beta = next();
    l.ln2_gamma = next();
    l.ln2_beta = next();
    model.trm.push_back(l);
  }
  for (size_t i = 0; i < params.regression.size(); ++i)
    model.regression.push_back(TapeAffine{next(), next()});
  require(at == model.flat.size(), "wrap_params: enumeration mismatch");
  return model;
}

Mat sinusoidal_position_encoding(int length, int d_model) {
  Mat pe(length, d_model);
  for (int pos = 0; pos < length; ++pos) {
    for (int i = 0; i < d_model; ++i) {
      double exponent = static_cast<double>(2 * (i / 2)) / d_model;
      double angle = pos / std::pow(10000.0, exponent);
      pe(pos, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return pe;
}

namespace {

// Bernoulli keep mask pre-scaled by 1/keep_prob; identity when no rng.
ad::Var maybe_dropout(ad::Tape& tape, ad::Var x, const ForwardPolicy& policy) {
  if (!policy.rng || policy.dropout <= 0.0) return x;
  const Mat& v = tape.value(x);
  double keep_prob = 1.0 - policy.dropout;
  Mat keep(v.rows(), v.cols());
  for (Eigen::Index r = 0; r < v.rows(); ++r)
    for (Eigen::Index c = 0; c < v.cols(); ++c)
      keep(r, c) = policy.rng->uniform() < keep_prob ? 1.0 / keep_prob : 0.0;
  return tape.dropout(x, std::move(keep));
}

struct LstmResult {
  ad::Var outputs;  // l × H (top layer)
  EncoderState state_out;
};

LstmResult lstm_forward(ad::Tape& tape, const std::vector<TapeLstmLayer>& layers,
                        ad::Var inputs, const std::vector<bool>& real_mask,
                        const EncoderState& state_in,
                        const ForwardPolicy& policy) {
  const int l = static_cast<int>(tape.value(inputs).rows());
  const int n_layers = static_cast<int>(layers.size());
  const int h = static_cast<int>(state_in.hidden.cols());
  require(state_in.hidden.rows() == n_layers && state_in.cell.rows() == n_layers,
          "lstm: state has ", state_in.hidden.rows(), " layers, model has ",
          n_layers);

  int last_real = -1;
  for (int j = 0; j < l; ++j)
    if (real_mask[static_cast<size_t>(j)]) last_real = j;
  require(last_real >= 0, "lstm: segment with no real frames");

  LstmResult result;
  result.state_out = EncoderState::zeros(n_layers, h);

  ad::Var layer_input = inputs;
  for (int k = 0; k < n_layers; ++k) {
    const TapeLstmLayer& weights = layers[static_cast<size_t>(k)];
    // Gate preactivations from the inputs for the whole segment at once.
    ad::Var xproj = tape.linear(layer_input, weights.w_x, weights.b);
    ad::Var hv = tape.leaf(state_in.hidden.row(k), false);
    ad::Var cv = tape.leaf(state_in.cell.row(k), false);
    std::vector<ad::Var> rows;
    rows.reserve(static_cast<size_t>(l));
    for (int j = 0; j < l; ++j) {
      ad::Var pre =
          tape.add(tape.slice_rows(xproj, j, 1), tape.matmul_nt(hv, weights.w_h));
      ad::Var gi = tape.sigmoid(tape.slice_cols(pre, 0, h));
      ad::Var gf = tape.sigmoid(tape.slice_cols(pre, h, h));
      ad::Var gc = tape.tanh(tape.slice_cols(pre, 2 * h, h));
      ad::Var go = tape.sigmoid(tape.slice_cols(pre, 3 * h, h));
      cv = tape.add(tape.mul(gf, cv), tape.mul(gi, gc));
      hv = tape.mul(go, tape.tanh(cv));
      rows.push_back(hv);
      if (j == last_real) {
        result.state_out.hidden.row(k) = tape.value(hv);
        result.state_out.cell.row(k) = tape.value(cv);
      }
    }
    ad::Var stacked = tape.vstack(rows);
    // Inter-layer dropout, torch-style: between stacked layers only.
    layer_input =
        (k + 1 < n_layers) ? maybe_dropout(tape, stacked, policy) : stacked;
  }
  result.outputs = layer_input;
  return result;
}

ad::Var trm_forward(ad::Tape& tape, const std::vector<TapeTrmLayer>& layers,
                    ad::Var inputs, const std::vector<bool>& real_mask,
                    int heads, const ForwardPolicy& policy) {
  const int l = static_cast<int>(tape.value(inputs).rows());
  const int d = static_cast<int>(tape.value(inputs).cols());
  const int dh = d / heads;

  ad::Var x = tape.add_const(inputs, sinusoidal_position_encoding(l, d));
  for (const TapeTrmLayer& layer : layers) {
    ad::Var q = tape.linear(x, layer.q.w, layer.q.b);
    ad::Var k = tape.linear(x, layer.k.w, layer.k.b);
    ad::Var v = tape.linear(x, layer.v.w, layer.v.b);
    ad::Var ctx;
    for (int hd = 0; hd < heads; ++hd) {
      ad::Var qh = tape.slice_cols(q, hd * dh, dh);
      ad::Var kh = tape.slice_cols(k, hd * dh, dh);
      ad::Var vh = tape.slice_cols(v, hd * dh, dh);
      ad::Var scores =
          tape.scale(tape.matmul_nt(qh, kh), 1.0 / std::sqrt(double(dh)));
      ad::Var probs = tape.softmax_rows(scores, &real_mask);
      probs = maybe_dropout(tape, probs, policy);
      ad::Var head_ctx = tape.matmul(probs, vh);
      ctx = hd == 0 ? head_ctx : tape.concat_cols(ctx, head_ctx);
    }
    ad::Var attn = tape.linear(ctx, layer.o.w, layer.o.b);
    attn = maybe_dropout(tape, attn, policy);
    x = tape.layer_norm_rows(tape.add(x, attn), layer.ln1_gamma,
                             layer.ln1_beta);
    ad::Var ff = tape.linear(tape.relu(tape.linear(x, layer.ff1.w, layer.ff1.b)),
                             layer.ff2.w, layer.ff2.b);
    ff = maybe_dropout(tape, ff, policy);
    x = tape.layer_norm_rows(tape.add(x, ff), layer.ln2_gamma, layer.ln2_beta);
  }
  return x;
}

ad::Var head_forward(ad::Tape& tape, const std::vector<TapeAffine>& head,
                     ad::Var g) {
  ad::Var h = g;
  for (size_t i = 0; i + 1 < head.size(); ++i)
    h = tape.relu(tape.linear(h, head[i].w, head[i].b));
  return tape.linear(h, head.back().w, head.back().b);
}

}  // namespace

SegmentForward forward_segment(ad::Tape& tape, const TapeModel& model,
                               const ModelConfig& config,
                               const SegmentInput& input,
                               const EncoderState* state_in,
                               const ForwardPolicy& policy) {
  const int l = static_cast<int>(input.visual.rows());
  require(static_cast<int>(input.audio.rows()) == l,
          "forward_segment: visual rows ", l, " vs audio rows ",
          input.audio.rows());
  require(static_cast<int>(input.real.size()) == l,
          "forward_segment: mask size mismatch");

  ad::Var vis = tape.leaf(input.visual, false);
  ad::Var aud = tape.leaf(input.audio, false);
  ad::Var joint;
  if (input.visual.cols() == 0) {
    joint = aud;
  } else if (input.audio.cols() == 0) {
    joint = vis;
  } else {
    joint = tape.concat_cols(vis, aud);
  }
  ad::Var fused = tape.linear(joint, model.fusion.w, model.fusion.b);
  fused = maybe_dropout(tape, fused, policy);

  SegmentForward out;
  ad::Var g;
  if (config.encoder_kind == EncoderKind::lstm) {
    require(state_in != nullptr, "forward_segment: lstm requires state_in");
    LstmResult r =
        lstm_forward(tape, model.lstm, fused, input.real, *state_in, policy);
    g = r.outputs;
    out.state_out = std::move(r.state_out);
  } else {
    g = trm_forward(tape, model.trm, fused, input.real, config.attention_heads,
                    policy);
  }
  out.prediction = head_forward(tape, model.regression, g);

  require(tape.value(out.prediction).allFinite(),
          "numeric failure: non-finite network output");
  return out;
}

Mat fuse(const Mat& visual_rows, const Mat& audio_rows,
         const AffineParams& fusion) {
  require(visual_rows.rows() == audio_rows.rows(), "fuse: row counts ",
          visual_rows.rows(), " vs ", audio_rows.rows());
  require(visual_rows.cols() + audio_rows.cols() == fusion.w.cols(),
          "fuse: concat dim ", visual_rows.cols() + audio_rows.cols(),
          " vs fusion weight in-dim ", fusion.w.cols());
  Mat joint(visual_rows.rows(), visual_rows.cols() + audio_rows.cols());
  if (visual_rows.cols() > 0) joint.leftCols(visual_rows.cols()) = visual_rows;
  if (audio_rows.cols() > 0) joint.rightCols(audio_rows.cols()) = audio_rows;
  Mat out = joint * fusion.w.transpose();
  out.rowwise() += fusion.b.row(0);
  return out;
}

std::pair<Mat, EncoderState> encode_lstm(
    const Mat& fused, const std::vector<bool>& real_mask,
    const EncoderState& state_in, const std::vector<LstmLayerParams>& layers) {
  ad::Tape tape;
  TapeModel model;
  for (const LstmLayerParams& l : layers) {
    TapeLstmLayer t;
    t.w_x = tape.leaf(l.w_x, false);
    t.w_h = tape.leaf(l.w_h, false);
    t.b = tape.leaf(l.b, false);
    model.lstm.push_back(t);
  }
  ForwardPolicy eval;
  ad::Var in = tape.leaf(fused, false);
  LstmResult r = lstm_forward(tape, model.lstm, in, real_mask, state_in, eval);
  Mat g = tape.value(r.outputs);
  require(g.allFinite(), "numeric failure: non-finite lstm output");
  return {std::move(g), std::move(r.state_out)};
}

Mat encode_trm(const Mat& fused, const std::vector<bool>& real_mask,
               const std::vector<TrmLayerParams>& layers,
               int attention_heads) {
  require(attention_heads >= 1 &&
              fused.cols() % attention_heads == 0,
          "encode_trm: d_model ", fused.cols(), " not divisible by ",
          attention_heads, " heads");
  ad::Tape tape;
  std::vector<TapeTrmLayer> wrapped;
  for (const TrmLayerParams& l : layers) {
    TapeTrmLayer t;
    t.q = {tape.leaf(l.attn_q.w, false), tape.leaf(l.attn_q.b, false)};
    t.k = {tape.leaf(l.attn_k.w, false), tape.leaf(l.attn_k.b, false)};
    t.v = {tape.leaf(l.attn_v.w, false), tape.leaf(l.attn_v.b, false)};
    t.o = {tape.leaf(l.attn_out.w, false), tape.leaf(l.attn_out.b, false)};
    t.ff1 = {tape.leaf(l.ff1.w, false), tape.leaf(l.ff1.b, false)};
    t.ff2 = {tape.leaf(l.ff2.w, false), tape.leaf(l.ff2.b, false)};
    t.ln1_gamma = tape.leaf(l.ln1_gamma, false);
    t.ln1_beta = tape.leaf(l.ln1_beta, false);
    t.ln2_gamma = tape.leaf(l.ln2_gamma, false);
    t.ln2_beta = tape.leaf(l.ln2_beta, false);
    wrapped.push_back(t);
  }
  ForwardPolicy eval;
  ad::Var in = tape.leaf(fused, false);
  ad::Var g = trm_forward(tape, wrapped, in, real_mask, attention_heads, eval);
  Mat out = tape.value(g);
  require(out.allFinite(), "numeric failure: non-finite trm output");
  return out;
}

Mat regress(const Mat& encoded, const std::vector<AffineParams>& head) {
  require(!head.empty(), "regress: empty head");
  Mat h = encoded;
  for (size_t i = 0; i + 1 < head.size(); ++i) {
    h = h * head[i].w.transpose();
    h.rowwise() += head[i].b.row(0);
    h = h.cwiseMax(0.0);
  }
  Mat out = h * head.back().w.transpose();
  out.rowwise() += head.back().b.row(0);
  return out;
}

ModalityInputs assemble_inputs(const VideoRecord& record) {
  const int n = record.frames.n_frames;
  int d_visual = 0, d_audio = 0;
  for (const FeatureTrack& f : record.features)
    (f.modality == Modality::visual ? d_visual : d_audio) += f.dim();

  ModalityInputs inputs;
  inputs.visual.resize(n, d_visual);
  inputs.audio.resize(n, d_audio);
  int at_v = 0, at_a = 0;
  for (const FeatureTrack& f : record.features) {
    if (f.modality == Modality::visual) {
      FeatureTrack filled = fill_invalid_frames(f, record.frames.valid);
      inputs.visual.middleCols(at_v, f.dim()) = filled.values;
      at_v += f.dim();
    } else {
      inputs.audio.middleCols(at_a, f.dim()) = f.values;
      at_a += f.dim();
    }
  }
  return inputs;
}

PredictionTrack predict_video(const VideoRecord& record,
                              const ModelConfig& config,
                              const ModelParams& params) {
  config.validate();
  validate_record(record);
  const int n = record.frames.n_frames;

  ModalityInputs inputs = assemble_inputs(record);
  require(static_cast<int>(inputs.visual.cols()) == params.d_visual,
          "predict: model expects ", params.d_visual, " visual dims, got ",
          inputs.visual.cols());
  require(static_cast<int>(inputs.audio.cols()) == params.d_audio,
          "predict: model expects ", params.d_audio, " audio dims, got ",
          inputs.audio.cols());

  SegmentationPlan plan = plan_segments(record.frames.video_id, n,
                                        config.segment_length, config.stride);

  Mat sum = Mat::Zero(n, 2);
  Eigen::VectorXd coverage = Eigen::VectorXd::Zero(n);
  EncoderState state =
      EncoderState::zeros(config.encoder_layers, config.d_model);

  for (const Segment& seg : plan.segments) {
    const int k = seg.real_count();
    PaddedRows vis = pad_segment(inputs.visual.middleRows(seg.first_row(), k),
                                 seg.length);
    PaddedRows aud = pad_segment(inputs.audio.middleRows(seg.first_row(), k),
                                 seg.length);

    ad::Tape tape;
    TapeModel model = wrap_params(tape, params, false);
    SegmentInput seg_in{std::move(vis.values), std::move(aud.values), seg.mask};
    ForwardPolicy eval;
    SegmentForward fwd =
        forward_segment(tape, model, config, seg_in, &state, eval);
    if (config.encoder_kind == EncoderKind::lstm) state = fwd.state_out;

    const Mat& pred = tape.value(fwd.prediction);
    sum.middleRows(seg.first_row(), k) += pred.topRows(k);
    coverage.segment(seg.first_row(), k).array() += 1.0;
  }

  PredictionTrack track;
  track.video_id = record.frames.video_id;
  track.stage = PredictionStage::raw;
  track.valence.resize(static_cast<size_t>(n));
  track.arousal.resize(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    require(coverage(j) > 0.0, "predict: frame ", j + 1, " not covered");
    track.valence[static_cast<size_t>(j)] = sum(j, 0) / coverage(j);
    track.arousal[static_cast<size_t>(j)] = sum(j, 1) / coverage(j);
  }
  return track;
}

}  // namespace va
